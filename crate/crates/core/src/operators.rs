//! Element operators of the split-form DG discretisation of
//! `u_t + (a u)_x = θ a_x u`.
//!
//! Per element the scheme reads
//!
//! ```text
//! (Δx/2) M dU/dt = L U⁻ + C U + R U⁺
//! ```
//!
//! with the volume part of `C`
//!
//! ```text
//! V = α Dᵀ M [A] − (1 − θ − α) M [A_ξ] + (1 − α) [A] Dᵀ M
//! ```
//!
//! and rank-one face couplings built from the basis evaluation vectors
//! `l(±1)` and the numerical flux weights of each face.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::quadrature::{DerivativeMatrix, NodeFamily, QuadratureRule};
use crate::speed::AdvectionSpeed;
use crate::{Error, Result};

/// Selects the equation: `θ = 0` conservative, `θ = 1` non-conservative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationForm {
    Conservative,
    NonConservative,
}

impl EquationForm {
    pub fn theta(self) -> f64 {
        match self {
            EquationForm::Conservative => 0.0,
            EquationForm::NonConservative => 1.0,
        }
    }

    pub fn from_theta(theta: f64) -> Result<Self> {
        if theta == 0.0 {
            Ok(EquationForm::Conservative)
        } else if theta == 1.0 {
            Ok(EquationForm::NonConservative)
        } else {
            Err(Error::InvalidConfig(format!("theta must be 0 or 1, got {theta}")))
        }
    }

    /// Energy-norm exponent and growth coefficient `(δ, c)` of the discrete
    /// estimate: `(+1, 1 − α)` for the conservative equation and `(−1, α)`
    /// for the non-conservative one.
    pub fn estimate(self, alpha: f64) -> (crate::EnergyNorm, f64) {
        match self {
            EquationForm::Conservative => (crate::EnergyNorm::A, 1.0 - alpha),
            EquationForm::NonConservative => (crate::EnergyNorm::InverseA, alpha),
        }
    }
}

/// Where the over-integrated volume terms sample the advection speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OverIntegrationSpeed {
    /// The exact `a(x)` at the enlarged quadrature.
    #[default]
    Exact,
    /// The degree-`N` nodal interpolant of `a`.
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverIntegration {
    /// Number of Gauss-Lobatto points of the volume quadrature.
    pub points: usize,
    pub speed: OverIntegrationSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    pub alpha: f64,
    pub form: EquationForm,
    pub family: NodeFamily,
    pub degree: usize,
    pub over_integration: Option<OverIntegration>,
}

impl SplitConfig {
    pub fn new(alpha: f64, form: EquationForm, family: NodeFamily, degree: usize) -> Self {
        Self {
            alpha,
            form,
            family,
            degree,
            over_integration: None,
        }
    }

    pub fn with_over_integration(mut self, points: usize, speed: OverIntegrationSpeed) -> Self {
        self.over_integration = Some(OverIntegration { points, speed });
        self
    }

    pub fn theta(&self) -> f64 {
        self.form.theta()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if let Some(oi) = self.over_integration {
            check_over_integration(self.degree, oi.points)?;
        }
        Ok(())
    }
}

fn check_over_integration(degree: usize, points: usize) -> Result<()> {
    // Q > 3N/2
    if 2 * points <= 3 * degree {
        return Err(Error::QuadratureTooLow { degree, points });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FluxKind {
    Central,
    Upwind,
}

/// Interface flux `F*` for a positive speed.
pub fn numerical_flux(kind: FluxKind, a_left: f64, u_left: f64, a_right: f64, u_right: f64) -> f64 {
    match kind {
        FluxKind::Central => 0.5 * (a_left * u_left + a_right * u_right),
        FluxKind::Upwind => a_left * u_left,
    }
}

/// Linear flux at one face, `F* = w⁻ a⁻ u⁻ + w⁺ a⁺ u⁺`, with `−` the
/// upstream (left) side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub speed_upstream: f64,
    pub speed_downstream: f64,
    pub weight_upstream: f64,
    pub weight_downstream: f64,
}

impl Face {
    pub fn interior(kind: FluxKind, speed_upstream: f64, speed_downstream: f64) -> Self {
        let (wu, wd) = match kind {
            FluxKind::Central => (0.5, 0.5),
            FluxKind::Upwind => (1.0, 0.0),
        };
        Self {
            speed_upstream,
            speed_downstream,
            weight_upstream: wu,
            weight_downstream: wd,
        }
    }

    /// Physical inflow: the flux is prescribed data and carries no state.
    pub fn inflow(speed: f64) -> Self {
        Self {
            speed_upstream: speed,
            speed_downstream: speed,
            weight_upstream: 0.0,
            weight_downstream: 0.0,
        }
    }

    /// Physical outflow: pure upwind from the interior.
    pub fn outflow(speed: f64) -> Self {
        Self {
            speed_upstream: speed,
            speed_downstream: speed,
            weight_upstream: 1.0,
            weight_downstream: 0.0,
        }
    }

    pub fn flux(&self, u_upstream: f64, u_downstream: f64) -> f64 {
        self.weight_upstream * self.speed_upstream * u_upstream
            + self.weight_downstream * self.speed_downstream * u_downstream
    }
}

/// Enlarged Gauss-Lobatto volume quadrature with the nodal basis sampled on it.
#[derive(Debug, Clone)]
pub struct OverQuadrature {
    pub rule: QuadratureRule,
    /// `P_qj = l_j(η_q)`.
    pub basis: DMatrix<f64>,
    /// `P'_qj = l'_j(η_q)`.
    pub basis_derivative: DMatrix<f64>,
}

/// Data shared by every element of one discretisation: the nodal rule, its
/// derivative matrix, the face evaluation vectors and the optional
/// over-integration quadrature.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    rule: QuadratureRule,
    derivative: DerivativeMatrix,
    face_left: Vec<f64>,
    face_right: Vec<f64>,
    over: Option<OverQuadrature>,
}

impl ReferenceElement {
    pub fn new(family: NodeFamily, degree: usize, over_points: Option<usize>) -> Result<Self> {
        let rule = QuadratureRule::new(family, degree)?;
        let derivative = rule.derivative_matrix();
        let face_left = rule.basis_at(-1.0);
        let face_right = rule.basis_at(1.0);
        let over = match over_points {
            Some(points) => {
                check_over_integration(degree, points)?;
                let q = QuadratureRule::new(NodeFamily::GaussLobatto, points - 1)?;
                let n = rule.len();
                let mut basis = DMatrix::zeros(q.len(), n);
                for (iq, &eta) in q.nodes().iter().enumerate() {
                    for (j, l) in rule.basis_at(eta).into_iter().enumerate() {
                        basis[(iq, j)] = l;
                    }
                }
                let basis_derivative = &basis * derivative.matrix();
                Some(OverQuadrature {
                    rule: q,
                    basis,
                    basis_derivative,
                })
            }
            None => None,
        };
        Ok(Self {
            rule,
            derivative,
            face_left,
            face_right,
            over,
        })
    }

    pub fn for_config(cfg: &SplitConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(cfg.family, cfg.degree, cfg.over_integration.map(|o| o.points))
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn derivative(&self) -> &DerivativeMatrix {
        &self.derivative
    }

    /// `l(−1)`.
    pub fn face_left(&self) -> &[f64] {
        &self.face_left
    }

    /// `l(+1)`.
    pub fn face_right(&self) -> &[f64] {
        &self.face_right
    }

    pub fn over_quadrature(&self) -> Option<&OverQuadrature> {
        self.over.as_ref()
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    /// `[A_ξ] = diag(D A)`, evaluated as `Σ_j D_ij (A_j − A_i)` so that a
    /// constant speed gives exactly zero.
    pub fn speed_derivative(&self, speed: &[f64]) -> Vec<f64> {
        let d = self.derivative.matrix();
        (0..speed.len())
            .map(|i| {
                (0..speed.len())
                    .filter(|&j| j != i)
                    .map(|j| d[(i, j)] * (speed[j] - speed[i]))
                    .sum()
            })
            .collect()
    }

    /// Volume matrix of the split form at the nodal quadrature.
    pub fn split_volume(&self, speed: &[f64], speed_xi: &[f64], alpha: f64, theta: f64) -> DMatrix<f64> {
        let n = self.len();
        let d = self.derivative.matrix();
        let w = self.rule.weights();
        let advective = 1.0 - theta - alpha;
        DMatrix::from_fn(n, n, |i, j| {
            let dtm = d[(j, i)] * w[j];
            let conservative = dtm * speed[j];
            let skew = speed[i] * dtm;
            let mut v = alpha * conservative + (1.0 - alpha) * skew;
            if i == j {
                v -= advective * w[i] * speed_xi[i];
            }
            v
        })
    }

    /// Volume matrix with every integrand evaluated at the enlarged quadrature.
    ///
    /// `speed_q` and `speed_xi_q` are `a` and `∂a/∂ξ` at the quadrature points.
    /// The product rule `(a Φ)_ξ = a_ξ Φ + a Φ_ξ` is applied pointwise, so the
    /// split forms coincide up to round-off for every `α`.
    pub fn over_integrated_volume(
        &self,
        speed_q: &[f64],
        speed_xi_q: &[f64],
        alpha: f64,
        theta: f64,
    ) -> Result<DMatrix<f64>> {
        let over = self.over.as_ref().ok_or_else(|| {
            Error::InvalidConfig("reference element has no over-integration quadrature".into())
        })?;
        let nq = over.rule.len();
        if speed_q.len() != nq || speed_xi_q.len() != nq {
            return Err(Error::DimensionMismatch {
                expected: nq,
                found: speed_q.len().min(speed_xi_q.len()),
            });
        }
        let n = self.len();
        let p = &over.basis;
        let dp = &over.basis_derivative;
        let omega = over.rule.weights();
        // ⟨Φ_ξ, a U⟩, ⟨Φ, a_ξ U⟩ and ⟨U, (a Φ)_ξ⟩ at the Q points.
        let mut flux_term = DMatrix::zeros(n, n);
        let mut source_term = DMatrix::zeros(n, n);
        let mut product_term = DMatrix::zeros(n, n);
        for q in 0..nq {
            let wa = omega[q] * speed_q[q];
            let wax = omega[q] * speed_xi_q[q];
            for i in 0..n {
                let (pi, dpi) = (p[(q, i)], dp[(q, i)]);
                for j in 0..n {
                    let pj = p[(q, j)];
                    flux_term[(i, j)] += dpi * wa * pj;
                    source_term[(i, j)] += pi * wax * pj;
                    product_term[(i, j)] += (wax * pi + wa * dpi) * pj;
                }
            }
        }
        Ok(alpha * flux_term - (1.0 - alpha - theta) * &source_term + (1.0 - alpha) * product_term)
    }
}

/// Convenience wrapper: over-integrated volume of a degree-`degree`
/// Gauss-Lobatto element from the speed sampled at `points` quadrature nodes.
pub fn over_integrated_volume(
    degree: usize,
    points: usize,
    speed_q: &[f64],
    speed_xi_q: &[f64],
    alpha: f64,
    form: EquationForm,
) -> Result<DMatrix<f64>> {
    let reference = ReferenceElement::new(NodeFamily::GaussLobatto, degree, Some(points))?;
    reference.over_integrated_volume(speed_q, speed_xi_q, alpha, form.theta())
}

/// Nodal advection speed `A_j = a(X(ξ_j))` on `[left, right]`.
pub fn interpolate_speed<S: AdvectionSpeed + ?Sized>(
    speed: &S,
    left: f64,
    right: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    rule.map_to(left, right)
        .into_iter()
        .map(|x| positive_speed(speed, x))
        .collect()
}

pub(crate) fn positive_speed<S: AdvectionSpeed + ?Sized>(speed: &S, x: f64) -> Result<f64> {
    let value = speed.value(x);
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonPositiveSpeed { x, value })
    }
}

/// Matrices and speed data of one element.
#[derive(Debug, Clone)]
pub struct ElementOperators {
    reference: Arc<ReferenceElement>,
    speed: Vec<f64>,
    speed_xi: Vec<f64>,
    volume: DMatrix<f64>,
    left: DMatrix<f64>,
    center: DMatrix<f64>,
    right: DMatrix<f64>,
    dx: f64,
    left_face: Face,
    right_face: Face,
}

impl ElementOperators {
    /// Builds the element on `[x_left, x_right]`. Nodal speeds come from
    /// `speed`; the over-integrated volume (when configured with the exact
    /// speed) samples `speed` at the enlarged quadrature.
    pub fn build<S: AdvectionSpeed + ?Sized>(
        cfg: &SplitConfig,
        reference: Arc<ReferenceElement>,
        speed: &S,
        x_left: f64,
        x_right: f64,
        left_face: Face,
        right_face: Face,
    ) -> Result<Self> {
        let dx = x_right - x_left;
        if !(dx > 0.0) {
            return Err(Error::DegenerateElement { element: 0, dx });
        }
        let nodal = interpolate_speed(speed, x_left, x_right, reference.rule())?;
        let volume = match cfg.over_integration {
            None => None,
            Some(oi) => {
                let over = reference
                    .over_quadrature()
                    .ok_or_else(|| Error::InvalidConfig("reference lacks over-integration".into()))?;
                let (aq, axq) = match oi.speed {
                    OverIntegrationSpeed::Exact => {
                        let xs = over.rule.map_to(x_left, x_right);
                        let aq = xs
                            .iter()
                            .map(|&x| positive_speed(speed, x))
                            .collect::<Result<Vec<_>>>()?;
                        let axq = xs.iter().map(|&x| 0.5 * dx * speed.derivative(x)).collect();
                        (aq, axq)
                    }
                    OverIntegrationSpeed::Interpolated => {
                        let speed_xi = reference.speed_derivative(&nodal);
                        let aq = mat_vec(&over.basis, &nodal);
                        let axq = mat_vec(&over.basis, &speed_xi);
                        (aq, axq)
                    }
                };
                Some(reference.over_integrated_volume(&aq, &axq, cfg.alpha, cfg.theta())?)
            }
        };
        Self::assemble_parts(cfg, reference, nodal, volume, dx, left_face, right_face)
    }

    /// Element matrices from nodal speeds at standard quadrature with interior
    /// faces of kind `flux` and face speeds `a_left`, `a_right`.
    pub fn from_nodal(
        cfg: &SplitConfig,
        flux: FluxKind,
        speed: Vec<f64>,
        a_left: f64,
        a_right: f64,
        dx: f64,
    ) -> Result<Self> {
        if cfg.over_integration.is_some() {
            return Err(Error::InvalidConfig(
                "over-integrated elements need the speed function; use ElementOperators::build".into(),
            ));
        }
        if !(dx > 0.0) {
            return Err(Error::DegenerateElement { element: 0, dx });
        }
        let reference = Arc::new(ReferenceElement::for_config(cfg)?);
        if speed.len() != reference.len() {
            return Err(Error::DimensionMismatch {
                expected: reference.len(),
                found: speed.len(),
            });
        }
        if let Some(&bad) = speed.iter().find(|&&a| !(a > 0.0)) {
            return Err(Error::NonPositiveSpeed { x: f64::NAN, value: bad });
        }
        for a in [a_left, a_right] {
            if !(a > 0.0) {
                return Err(Error::NonPositiveSpeed { x: f64::NAN, value: a });
            }
        }
        Self::assemble_parts(
            cfg,
            reference,
            speed,
            None,
            dx,
            Face::interior(flux, a_left, a_left),
            Face::interior(flux, a_right, a_right),
        )
    }

    fn assemble_parts(
        cfg: &SplitConfig,
        reference: Arc<ReferenceElement>,
        speed: Vec<f64>,
        volume: Option<DMatrix<f64>>,
        dx: f64,
        left_face: Face,
        right_face: Face,
    ) -> Result<Self> {
        for face in [&left_face, &right_face] {
            for a in [face.speed_upstream, face.speed_downstream] {
                if !(a > 0.0) {
                    return Err(Error::NonPositiveSpeed { x: f64::NAN, value: a });
                }
            }
        }
        let speed_xi = reference.speed_derivative(&speed);
        let volume =
            volume.unwrap_or_else(|| reference.split_volume(&speed, &speed_xi, cfg.alpha, cfg.theta()));
        let lm = reference.face_left();
        let lp = reference.face_right();
        let outer = |u: &[f64], v: &[f64], s: f64| DMatrix::from_fn(u.len(), v.len(), |i, j| s * u[i] * v[j]);

        // +F*(−1) l(−1) − F*(+1) l(+1) moved to the right-hand side.
        let left = outer(lm, lp, left_face.weight_upstream * left_face.speed_upstream);
        let right = outer(lp, lm, -right_face.weight_downstream * right_face.speed_downstream);
        let center = &volume
            + outer(lm, lm, left_face.weight_downstream * left_face.speed_downstream)
            - outer(lp, lp, right_face.weight_upstream * right_face.speed_upstream);

        Ok(Self {
            reference,
            speed,
            speed_xi,
            volume,
            left,
            center,
            right,
            dx,
            left_face,
            right_face,
        })
    }

    pub fn reference(&self) -> &Arc<ReferenceElement> {
        &self.reference
    }

    pub fn rule(&self) -> &QuadratureRule {
        self.reference.rule()
    }

    pub fn derivative(&self) -> &DMatrix<f64> {
        self.reference.derivative().matrix()
    }

    /// Diagonal mass matrix of quadrature weights.
    pub fn mass(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(self.rule().weights()))
    }

    pub fn weights(&self) -> &[f64] {
        self.rule().weights()
    }

    /// Nodal speeds `A_j`.
    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// `D A`.
    pub fn speed_xi(&self) -> &[f64] {
        &self.speed_xi
    }

    pub fn volume(&self) -> &DMatrix<f64> {
        &self.volume
    }

    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    pub fn center(&self) -> &DMatrix<f64> {
        &self.center
    }

    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn left_face(&self) -> &Face {
        &self.left_face
    }

    pub fn right_face(&self) -> &Face {
        &self.right_face
    }

    /// Speed at the left face as seen from inside the element.
    pub fn a_left(&self) -> f64 {
        self.left_face.speed_downstream
    }

    /// Speed at the right face as seen from inside the element.
    pub fn a_right(&self) -> f64 {
        self.right_face.speed_upstream
    }

    pub fn len(&self) -> usize {
        self.speed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speed.is_empty()
    }

    /// `(Δx/2) M dU/dt` for the element given its own and neighbouring states.
    pub fn residual(&self, u_left: Option<&[f64]>, u: &[f64], u_right: Option<&[f64]>) -> Vec<f64> {
        let mut out = mat_vec(&self.center, u);
        if let Some(ul) = u_left {
            add_mat_vec(&self.left, ul, &mut out);
        }
        if let Some(ur) = u_right {
            add_mat_vec(&self.right, ur, &mut out);
        }
        out
    }
}

/// Convenience wrapper: [`ElementOperators::from_nodal`] with central or
/// upwind interior faces.
pub fn element_matrices(
    cfg: &SplitConfig,
    flux: FluxKind,
    speed: Vec<f64>,
    a_left: f64,
    a_right: f64,
    dx: f64,
) -> Result<ElementOperators> {
    ElementOperators::from_nodal(cfg, flux, speed, a_left, a_right, dx)
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.nrows()];
    add_mat_vec(m, v, &mut out);
    out
}

pub(crate) fn add_mat_vec(m: &DMatrix<f64>, v: &[f64], out: &mut [f64]) {
    // column-major storage: accumulate column by column
    for (j, &vj) in v.iter().enumerate() {
        if vj == 0.0 {
            continue;
        }
        let col = m.column(j);
        for (o, &mij) in out.iter_mut().zip(col.iter()) {
            *o += mij * vj;
        }
    }
}
