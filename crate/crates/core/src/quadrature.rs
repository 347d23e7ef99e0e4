//! Legendre quadrature rules, Lagrange bases and derivative matrices on [-1, 1].
//!
//! Nodes are roots of `(1 - ξ²) P'_N` (Gauss-Lobatto) or `P_{N+1}` (Gauss),
//! found by Newton iteration from Chebyshev initial guesses. Interpolation and
//! differentiation use the barycentric form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 64;

const NEWTON_MAX_ITERATIONS: usize = 100;
const NEWTON_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeFamily {
    GaussLobatto,
    Gauss,
}

impl NodeFamily {
    /// Highest polynomial degree integrated exactly by the `N + 1` point rule.
    pub fn exactness(self, degree: usize) -> usize {
        match self {
            NodeFamily::GaussLobatto => (2 * degree).saturating_sub(1),
            NodeFamily::Gauss => 2 * degree + 1,
        }
    }
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term recurrence.
pub fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    // P'_{k+1} = P'_{k-1} + (2k + 1) P_k stays finite at x = ±1.
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Node and weight set of a Legendre quadrature family, with the barycentric
/// weights of the associated Lagrange basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    family: NodeFamily,
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    barycentric: Vec<f64>,
}

/// Builds the `N + 1` point rule of `family` for polynomial degree `degree`.
pub fn build_rule(family: NodeFamily, degree: usize) -> Result<QuadratureRule> {
    QuadratureRule::new(family, degree)
}

impl QuadratureRule {
    pub fn new(family: NodeFamily, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "polynomial degree {degree} exceeds the supported maximum {MAX_DEGREE}"
            )));
        }
        let (nodes, weights) = match family {
            NodeFamily::GaussLobatto => {
                if degree == 0 {
                    return Err(Error::InvalidConfig(
                        "Gauss-Lobatto rules need N >= 1".into(),
                    ));
                }
                lobatto_nodes_weights(degree)?
            }
            NodeFamily::Gauss => gauss_nodes_weights(degree)?,
        };
        let barycentric = barycentric_weights(&nodes);
        Ok(Self {
            family,
            degree,
            nodes,
            weights,
            barycentric,
        })
    }

    pub fn family(&self) -> NodeFamily {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes, `N + 1`.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn barycentric_weights(&self) -> &[f64] {
        &self.barycentric
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Lagrange basis values `l_j(x)` for all `j`.
    pub fn basis_at(&self, x: f64) -> Vec<f64> {
        lagrange_basis(&self.nodes, &self.barycentric, x)
    }

    /// Value at `x` of the interpolant through `values` at the nodes.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        interpolate(values, &self.nodes, &self.barycentric, x)
    }

    pub fn derivative_matrix(&self) -> DerivativeMatrix {
        derivative_matrix(self)
    }

    /// Maps a reference coordinate to the physical interval `[left, right]`.
    pub fn map_to(&self, left: f64, right: f64) -> Vec<f64> {
        let half = 0.5 * (right - left);
        self.nodes.iter().map(|&xi| left + half * (xi + 1.0)).collect()
    }
}

fn newton<F>(mut x: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (value, slope) = f(x);
        let step = value / slope;
        x -= step;
        if step.abs() <= NEWTON_TOLERANCE {
            return Ok(x);
        }
    }
    Err(Error::NonConvergence {
        what: "quadrature node Newton iteration",
        iterations: NEWTON_MAX_ITERATIONS,
    })
}

fn lobatto_nodes_weights(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let count = n + 1;
    let mut nodes = vec![0.0; count];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let nn1 = (n * (n + 1)) as f64;
    // Interior nodes are the roots of P'_N; P''_N comes from the Legendre ODE.
    for j in 1..count.div_ceil(2) {
        let guess = -(PI * j as f64 / n as f64).cos();
        let x = newton(guess, |x| {
            let (p, dp) = legendre_eval(n, x);
            let ddp = (2.0 * x * dp - nn1 * p) / (1.0 - x * x);
            (dp, ddp)
        })?;
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    if n.is_multiple_of(2) {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre_eval(n, x);
            2.0 / (nn1 * p * p)
        })
        .collect();
    Ok((nodes, weights))
}

fn gauss_nodes_weights(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let count = n + 1;
    let mut nodes = vec![0.0; count];
    for j in 0..count / 2 {
        let guess = -(PI * (j as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let x = newton(guess, |x| legendre_eval(count, x))?;
        nodes[j] = x;
        nodes[n - j] = -x;
    }
    if count % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = legendre_eval(count, x);
            2.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok((nodes, weights))
}

/// Barycentric weights `1 / Π_{k≠j} (x_j − x_k)`, scaled to unit max norm.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product();
            1.0 / prod
        })
        .collect();
    let scale = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    w.iter_mut().for_each(|v| *v /= scale);
    w
}

/// Lagrange basis values at `x` in barycentric form; a unit vector when `x`
/// coincides with a node.
pub fn lagrange_basis(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    if let Some(hit) = nodes.iter().position(|&xj| xj == x) {
        let mut out = vec![0.0; nodes.len()];
        out[hit] = 1.0;
        return out;
    }
    let mut out: Vec<f64> = nodes
        .iter()
        .zip(bary)
        .map(|(&xj, &bj)| bj / (x - xj))
        .collect();
    let denom: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= denom);
    out
}

/// Barycentric interpolation of nodal `values` at `x`.
pub fn interpolate(values: &[f64], nodes: &[f64], bary: &[f64], x: f64) -> f64 {
    debug_assert_eq!(values.len(), nodes.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &bj), &fj) in nodes.iter().zip(bary).zip(values) {
        let diff = x - xj;
        if diff == 0.0 {
            return fj;
        }
        let t = bj / diff;
        num += t * fj;
        den += t;
    }
    num / den
}

/// Polynomial derivative matrix `D_ij = l'_j(ξ_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeMatrix(DMatrix<f64>);

impl DerivativeMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Nodal derivative of the interpolant through `values`.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(values);
        (&self.0 * v).as_slice().to_vec()
    }
}

pub fn derivative_matrix(rule: &QuadratureRule) -> DerivativeMatrix {
    let x = rule.nodes();
    let b = rule.barycentric_weights();
    let n = x.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (b[j] / b[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        // Negative-sum diagonal keeps D·1 = 0 to round-off.
        d[(i, i)] = diag;
    }
    DerivativeMatrix(d)
}
