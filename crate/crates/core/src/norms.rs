//! Discrete `a^δ`-weighted norms and the aliasing coefficient `γ`.
//!
//! On one element `‖U‖²_{a^δ,N} = Σ_m w_m A_m^δ U_m²`; globally the element
//! contributions are summed with their `Δx/2` Jacobians. The aliasing
//! functional
//!
//! ```text
//! 𝓛(A, U) = Uᵀ [A]^δ M ([A_ξ] + [A]D − D[A]) U = ⟨J U, U⟩_{a^δ,N}
//! ```
//!
//! measures how far the discrete product rule is from the continuous one.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::ElementOperators;
use crate::quadrature::{NodeFamily, QuadratureRule};
use crate::Execution;

/// Weight exponent: `A` is `δ = +1`, `InverseA` is `δ = −1`, `L2` is `δ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyNorm {
    A,
    InverseA,
    L2,
}

impl EnergyNorm {
    pub fn exponent(self) -> i32 {
        match self {
            EnergyNorm::A => 1,
            EnergyNorm::InverseA => -1,
            EnergyNorm::L2 => 0,
        }
    }

    pub fn weight(self, speed: f64) -> f64 {
        match self {
            EnergyNorm::A => speed,
            EnergyNorm::InverseA => 1.0 / speed,
            EnergyNorm::L2 => 1.0,
        }
    }
}

/// Per-dof weights `(Δx/2) w_m (A_m)^δ` of the global discrete norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNorm {
    norm: EnergyNorm,
    weights: Vec<f64>,
}

impl WeightedNorm {
    pub fn new(elements: &[ElementOperators], norm: EnergyNorm) -> Self {
        let weights = elements
            .iter()
            .flat_map(|el| {
                let half = 0.5 * el.dx();
                el.weights()
                    .iter()
                    .zip(el.speed())
                    .map(move |(&w, &a)| half * w * norm.weight(a))
            })
            .collect();
        Self { norm, weights }
    }

    pub fn norm(&self) -> EnergyNorm {
        self.norm
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.weights.len());
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        self.inner(u, u)
    }
}

/// `Σ_el (Δx/2) Σ_m w_m (A_m)^δ (U_m)²` over an element-major vector.
pub fn weighted_norm_sq(elements: &[ElementOperators], u: &[f64], norm: EnergyNorm) -> f64 {
    WeightedNorm::new(elements, norm).norm_sq(u)
}

/// Element norm without the Jacobian factor.
pub fn element_norm_sq(element: &ElementOperators, u: &[f64], norm: EnergyNorm) -> f64 {
    element
        .weights()
        .iter()
        .zip(element.speed())
        .zip(u)
        .map(|((&w, &a), &x)| w * norm.weight(a) * x * x)
        .sum()
}

/// Checks, element by element,
///
/// ```text
/// min A ‖U‖² ≤ ‖U‖²_{a,N} ≤ 3 max A ‖U‖²             (δ = +1)
/// ‖U‖² / max A ≤ ‖U‖²_{1/a,N} ≤ 3 ‖U‖² / min A       (δ = −1)
/// ```
///
/// where `‖U‖` is the exact L2 norm of the nodal interpolant, evaluated with an
/// `N + 1` point Gauss rule. Returns `(lower_ok, upper_ok)` over all elements.
pub fn norm_equivalence_check(elements: &[ElementOperators], u: &[f64], norm: EnergyNorm) -> (bool, bool) {
    const SLACK: f64 = 1e-12;
    let mut lower_ok = true;
    let mut upper_ok = true;
    let mut offset = 0;
    for el in elements {
        let n = el.len();
        let ue = &u[offset..offset + n];
        offset += n;
        let exact = QuadratureRule::new(NodeFamily::Gauss, el.rule().degree())
            .expect("Gauss rule for a supported degree");
        let l2: f64 = exact.integrate(|x| el.rule().interpolate(ue, x).powi(2));
        let discrete = element_norm_sq(el, ue, norm);
        let (amin, amax) = el
            .speed()
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        let (lo, hi) = match norm {
            EnergyNorm::A => (amin * l2, 3.0 * amax * l2),
            EnergyNorm::InverseA => (l2 / amax, 3.0 * l2 / amin),
            EnergyNorm::L2 => (l2, 3.0 * l2),
        };
        let tol = SLACK * discrete.abs().max(hi.abs()) + 1e-300;
        lower_ok &= lo <= discrete + tol;
        upper_ok &= discrete <= hi + tol;
    }
    (lower_ok, upper_ok)
}

/// `J = [A_ξ] + [A]D − D[A]`, the discrete product-rule defect.
pub fn aliasing_kernel(element: &ElementOperators) -> DMatrix<f64> {
    let d = element.derivative();
    let a = element.speed();
    let ax = element.speed_xi();
    let n = a.len();
    DMatrix::from_fn(n, n, |i, j| {
        let v = (a[i] - a[j]) * d[(i, j)];
        if i == j {
            v + ax[i]
        } else {
            v
        }
    })
}

/// `𝓛(A, U) = Uᵀ [A]^δ M J U` on one element.
pub fn aliasing_functional(element: &ElementOperators, u: &[f64], norm: EnergyNorm) -> f64 {
    let j = aliasing_kernel(element);
    let ju = crate::operators::mat_vec(&j, u);
    element
        .weights()
        .iter()
        .zip(element.speed())
        .zip(u.iter().zip(&ju))
        .map(|((&w, &a), (&ui, &jui))| w * norm.weight(a) * ui * jui)
        .sum()
}

/// Aliasing coefficient of one element in the `a^δ` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoefficient {
    /// Operator norm of `J` induced by the `a^δ` inner product; bounds
    /// `|𝓛(A, U)| ≤ γ ‖U‖²_{a^δ,N}`.
    pub gamma: f64,
    /// The same induced norm applied to `[A]^δ M J`.
    pub weighted_kernel_norm: f64,
    /// `max |𝓛(A, U)| / ‖U‖²_{a^δ,N}` over the random samples.
    pub empirical: f64,
}

fn induced_norm(matrix: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let n = weights.len();
    let similar = DMatrix::from_fn(n, n, |i, j| sq[i] * matrix[(i, j)] / sq[j]);
    similar.singular_values().max()
}

fn norm_weights(element: &ElementOperators, norm: EnergyNorm) -> Vec<f64> {
    element
        .weights()
        .iter()
        .zip(element.speed())
        .map(|(&w, &a)| w * norm.weight(a))
        .collect()
}

/// Induced-norm `γ` of one element.
pub fn element_gamma(element: &ElementOperators, norm: EnergyNorm) -> f64 {
    induced_norm(&aliasing_kernel(element), &norm_weights(element, norm))
}

pub fn gamma_coefficient(element: &ElementOperators, norm: EnergyNorm, samples: usize, seed: u64) -> GammaCoefficient {
    let kernel = aliasing_kernel(element);
    let weights = norm_weights(element, norm);
    let gamma = induced_norm(&kernel, &weights);
    let n = weights.len();
    let weighted = DMatrix::from_fn(n, n, |i, j| weights[i] * kernel[(i, j)]);
    let weighted_kernel_norm = induced_norm(&weighted, &weights);
    let empirical = (0..samples)
        .map(|s| {
            let u = random_state(seed, s as u64, n);
            aliasing_functional(element, &u, norm).abs() / element_norm_sq(element, &u, norm)
        })
        .fold(0.0_f64, f64::max);
    GammaCoefficient {
        gamma,
        weighted_kernel_norm,
        empirical,
    }
}

/// `γ = max_el γ^el / (Δx^el / 2)`.
pub fn global_gamma(elements: &[ElementOperators], norm: EnergyNorm, exec: Execution) -> f64 {
    exec.map_slice(elements, |el| element_gamma(el, norm) / (0.5 * el.dx()))
        .into_iter()
        .fold(0.0, f64::max)
}

/// Counts random states violating `𝓛(A, U) ≤ γ ‖U‖²_{a^δ,N}` on any element.
pub fn aliasing_bound_violations(
    elements: &[ElementOperators],
    norm: EnergyNorm,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> usize {
    let gammas: Vec<f64> = elements.iter().map(|el| element_gamma(el, norm)).collect();
    exec.map(samples, |s| {
        elements
            .iter()
            .zip(&gammas)
            .enumerate()
            .filter(|(e, (el, &g))| {
                let u = random_state(seed, (s * elements.len() + e) as u64, el.len());
                let lhs = aliasing_functional(el, &u, norm);
                let rhs = g * element_norm_sq(el, &u, norm);
                lhs > rhs * (1.0 + 1e-12) + 1e-15
            })
            .count()
    })
    .into_iter()
    .sum()
}

/// Uniform `[−1, 1]` state; `stream` selects an independent sequence so that
/// parallel and sequential sampling agree.
pub fn random_state(seed: u64, stream: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}
