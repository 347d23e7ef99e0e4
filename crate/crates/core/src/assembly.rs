//! Mesh and global semi-discrete operator `dU/dt = G U + b(t)`.
//!
//! Degrees of freedom are element-major, node-minor. Row block `el` of `G` is
//! `(2/Δx^el) M⁻¹ [L | C | R]` placed against the neighbouring elements,
//! cyclically for periodic boundaries.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::norms::{self, EnergyNorm, WeightedNorm};
use crate::operators::{positive_speed, ElementOperators, Face, FluxKind, ReferenceElement, SplitConfig};
use crate::speed::AdvectionSpeed;
use crate::{Error, Execution, Result};

const PERIODIC_SPEED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    breakpoints: Vec<f64>,
}

impl Mesh {
    pub fn uniform(x_min: f64, x_max: f64, elements: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::InvalidConfig("mesh needs at least one element".into()));
        }
        if !(x_max > x_min) {
            return Err(Error::InvalidConfig(format!(
                "domain [{x_min}, {x_max}] is empty"
            )));
        }
        let h = (x_max - x_min) / elements as f64;
        let mut breakpoints: Vec<f64> = (0..elements).map(|k| x_min + k as f64 * h).collect();
        breakpoints.push(x_max);
        Ok(Self { breakpoints })
    }

    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidConfig("mesh needs at least two breakpoints".into()));
        }
        if let Some(e) = breakpoints.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateElement {
                element: e,
                dx: breakpoints[e + 1] - breakpoints[e],
            });
        }
        Ok(Self { breakpoints })
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn interval(&self, element: usize) -> (f64, f64) {
        (self.breakpoints[element], self.breakpoints[element + 1])
    }

    pub fn dx(&self, element: usize) -> f64 {
        self.breakpoints[element + 1] - self.breakpoints[element]
    }

    pub fn x_min(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty mesh")
    }

    pub fn min_dx(&self) -> f64 {
        (0..self.len()).map(|e| self.dx(e)).fold(f64::INFINITY, f64::min)
    }
}

/// Time-dependent inflow data `g_L(t)`.
pub type Inflow = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Upwind flux `a(x_min) g_L(t)` at the left face, pure upwind outflow at
    /// the right face.
    InflowOutflow { inflow: Inflow },
}

impl BoundaryCondition {
    pub fn inflow<F>(g: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        BoundaryCondition::InflowOutflow { inflow: Arc::new(g) }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryCondition::Periodic)
    }
}

impl fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryCondition::Periodic => f.write_str("Periodic"),
            BoundaryCondition::InflowOutflow { .. } => f.write_str("InflowOutflow"),
        }
    }
}

/// Anything that produces `dU/dt` from `U` and `t`.
pub trait LinearDynamics: Sync {
    fn dim(&self) -> usize;
    fn apply_into(&self, u: &[f64], t: f64, out: &mut [f64]);
}

impl LinearDynamics for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_into(&self, u: &[f64], _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        crate::operators::add_mat_vec(self, u, out);
    }
}

#[derive(Debug, Clone)]
struct ScaledBlocks {
    left: DMatrix<f64>,
    center: DMatrix<f64>,
    right: DMatrix<f64>,
}

/// Assembled operator with its element data and optional inflow forcing.
#[derive(Debug, Clone)]
pub struct GlobalOperator {
    mesh: Mesh,
    config: SplitConfig,
    flux: FluxKind,
    bc: BoundaryCondition,
    elements: Vec<ElementOperators>,
    blocks: Vec<ScaledBlocks>,
    neighbours: Vec<(Option<usize>, Option<usize>)>,
    matrix: DMatrix<f64>,
    /// `b(t) = forcing_profile · g_L(t)`.
    forcing_profile: Option<Vec<f64>>,
    inflow_speed: f64,
}

pub fn assemble<S: AdvectionSpeed + ?Sized>(
    mesh: &Mesh,
    config: &SplitConfig,
    flux: FluxKind,
    bc: BoundaryCondition,
    speed: &S,
) -> Result<GlobalOperator> {
    GlobalOperator::assemble(mesh, config, flux, bc, speed, Execution::default())
}

impl GlobalOperator {
    pub fn assemble<S: AdvectionSpeed + ?Sized>(
        mesh: &Mesh,
        config: &SplitConfig,
        flux: FluxKind,
        bc: BoundaryCondition,
        speed: &S,
        exec: Execution,
    ) -> Result<Self> {
        let reference = Arc::new(ReferenceElement::for_config(config)?);
        let k = mesh.len();
        let n = reference.len();
        let a_min = positive_speed(speed, mesh.x_min())?;
        let a_max = positive_speed(speed, mesh.x_max())?;

        let faces: Vec<Face> = (0..=k)
            .map(|f| {
                let boundary = f == 0 || f == k;
                match (&bc, boundary) {
                    (BoundaryCondition::Periodic, true) => {
                        if flux == FluxKind::Central && (a_min - a_max).abs() > PERIODIC_SPEED_TOLERANCE {
                            return Err(Error::PeriodicSpeedMismatch {
                                left: a_min,
                                right: a_max,
                            });
                        }
                        Ok(Face::interior(flux, a_max, a_min))
                    }
                    (BoundaryCondition::InflowOutflow { .. }, true) => Ok(if f == 0 {
                        Face::inflow(a_min)
                    } else {
                        Face::outflow(a_max)
                    }),
                    (_, false) => {
                        let a = positive_speed(speed, mesh.breakpoints()[f])?;
                        Ok(Face::interior(flux, a, a))
                    }
                }
            })
            .collect::<Result<_>>()?;

        let elements = exec
            .map(k, |e| {
                let (xl, xr) = mesh.interval(e);
                ElementOperators::build(config, reference.clone(), speed, xl, xr, faces[e], faces[e + 1])
                    .map_err(|err| match err {
                        Error::DegenerateElement { dx, .. } => Error::DegenerateElement { element: e, dx },
                        other => other,
                    })
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let blocks: Vec<ScaledBlocks> = exec.map_slice(&elements, |el| {
            let scale: Vec<f64> = el.weights().iter().map(|w| 2.0 / (el.dx() * w)).collect();
            let s = |m: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| scale[i] * m[(i, j)]);
            ScaledBlocks {
                left: s(el.left()),
                center: s(el.center()),
                right: s(el.right()),
            }
        });

        let periodic = bc.is_periodic();
        let neighbours: Vec<_> = (0..k)
            .map(|e| {
                let left = if e > 0 {
                    Some(e - 1)
                } else if periodic {
                    Some(k - 1)
                } else {
                    None
                };
                let right = if e + 1 < k {
                    Some(e + 1)
                } else if periodic {
                    Some(0)
                } else {
                    None
                };
                (left, right)
            })
            .collect();

        let mut matrix = DMatrix::zeros(k * n, k * n);
        for (e, (b, &(l, r))) in blocks.iter().zip(&neighbours).enumerate() {
            add_block(&mut matrix, e, e, &b.center, n);
            if let Some(l) = l {
                add_block(&mut matrix, e, l, &b.left, n);
            }
            if let Some(r) = r {
                add_block(&mut matrix, e, r, &b.right, n);
            }
        }

        let forcing_profile = match &bc {
            BoundaryCondition::Periodic => None,
            BoundaryCondition::InflowOutflow { .. } => {
                let el = &elements[0];
                let lm = el.reference().face_left();
                let mut profile = vec![0.0; k * n];
                for i in 0..n {
                    profile[i] = 2.0 / (el.dx() * el.weights()[i]) * lm[i] * a_min;
                }
                Some(profile)
            }
        };

        Ok(Self {
            mesh: mesh.clone(),
            config: *config,
            flux,
            bc,
            elements,
            blocks,
            neighbours,
            matrix,
            forcing_profile,
            inflow_speed: a_min,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn config(&self) -> &SplitConfig {
        &self.config
    }

    pub fn flux(&self) -> FluxKind {
        self.flux
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn elements(&self) -> &[ElementOperators] {
        &self.elements
    }

    /// Homogeneous part `G`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn nodes_per_element(&self) -> usize {
        self.elements[0].len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `‖G‖_∞`, the maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Physical coordinates of every degree of freedom.
    pub fn node_coordinates(&self) -> Vec<f64> {
        (0..self.mesh.len())
            .flat_map(|e| {
                let (l, r) = self.mesh.interval(e);
                self.elements[e].rule().map_to(l, r)
            })
            .collect()
    }

    /// Largest nodal or face speed.
    pub fn max_speed(&self) -> f64 {
        self.elements
            .iter()
            .flat_map(|el| el.speed().iter().copied().chain([el.a_left(), el.a_right()]))
            .fold(0.0, f64::max)
    }

    /// `a(x_min)`, the speed multiplying `g_L` in the inflow flux.
    pub fn inflow_speed(&self) -> f64 {
        self.inflow_speed
    }

    pub fn inflow_value(&self, t: f64) -> Option<f64> {
        match &self.bc {
            BoundaryCondition::InflowOutflow { inflow } => Some(inflow(t)),
            BoundaryCondition::Periodic => None,
        }
    }

    /// Affine forcing `b(t)`; zero for periodic boundaries.
    pub fn forcing(&self, t: f64) -> Vec<f64> {
        match (&self.forcing_profile, self.inflow_value(t)) {
            (Some(p), Some(g)) => p.iter().map(|v| v * g).collect(),
            _ => vec![0.0; self.dim()],
        }
    }

    pub fn energy_norm(&self, norm: EnergyNorm) -> WeightedNorm {
        WeightedNorm::new(&self.elements, norm)
    }

    /// `max_el γ^el / (Δx^el/2)` in the given norm.
    pub fn gamma_global(&self, norm: EnergyNorm, exec: Execution) -> f64 {
        norms::global_gamma(&self.elements, norm, exec)
    }

    /// `G U + b(t)`.
    pub fn apply(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        if u.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        let mut out = vec![0.0; u.len()];
        self.apply_into(u, t, &mut out);
        Ok(out)
    }

    /// Dense product `G U` without forcing.
    pub fn apply_dense(&self, u: &[f64]) -> Vec<f64> {
        crate::operators::mat_vec(&self.matrix, u)
    }
}

impl LinearDynamics for GlobalOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let n = self.nodes_per_element();
        for (e, (b, &(l, r))) in self.blocks.iter().zip(&self.neighbours).enumerate() {
            let dst = &mut out[e * n..(e + 1) * n];
            dst.iter_mut().for_each(|v| *v = 0.0);
            crate::operators::add_mat_vec(&b.center, &u[e * n..(e + 1) * n], dst);
            if let Some(l) = l {
                crate::operators::add_mat_vec(&b.left, &u[l * n..(l + 1) * n], dst);
            }
            if let Some(r) = r {
                crate::operators::add_mat_vec(&b.right, &u[r * n..(r + 1) * n], dst);
            }
        }
        if let (Some(p), Some(g)) = (&self.forcing_profile, self.inflow_value(t)) {
            out.iter_mut().zip(p).for_each(|(o, pi)| *o += pi * g);
        }
    }
}

fn add_block(matrix: &mut DMatrix<f64>, row: usize, col: usize, block: &DMatrix<f64>, n: usize) {
    let mut view = matrix.view_mut((row * n, col * n), (n, n));
    view += block;
}
