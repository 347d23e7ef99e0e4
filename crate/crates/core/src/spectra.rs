//! Spectrum of the global operator and its stability classification.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::assembly::GlobalOperator;
use crate::eigen;
use crate::timeint::Rk4;
use crate::{Execution, Result};

/// Relative stability tolerance, multiplied by `‖G‖∞`.
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    /// Display factor `Δx / (a_max (N + 1))`.
    scaling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub max_re: f64,
    pub stable: bool,
    pub paired: bool,
}

impl Spectrum {
    pub fn new(eigenvalues: Vec<Complex64>, scaling: f64) -> Self {
        Self { eigenvalues, scaling }
    }

    /// Full spectrum of the assembled matrix.
    pub fn from_operator(op: &GlobalOperator) -> Result<Self> {
        let eigenvalues = eigen::eigenvalues(op.matrix())?;
        let scaling = op.mesh().min_dx() / (op.max_speed() * op.nodes_per_element() as f64);
        Ok(Self::new(eigenvalues, scaling))
    }

    pub fn from_matrix(matrix: &DMatrix<f64>, scaling: f64) -> Result<Self> {
        Ok(Self::new(eigen::eigenvalues(matrix)?, scaling))
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn scaling(&self) -> f64 {
        self.scaling
    }

    /// Eigenvalues multiplied by the display factor.
    pub fn scaled(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|z| z * self.scaling).collect()
    }

    pub fn max_re(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalues sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex64> {
        let mut v = self.eigenvalues.clone();
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    /// Whether every non-real eigenvalue has its conjugate within `tol`.
    pub fn conjugate_closed(&self, tol: f64) -> bool {
        let mut used = vec![false; self.len()];
        for (i, z) in self.eigenvalues.iter().enumerate() {
            if z.im.abs() <= tol || used[i] {
                continue;
            }
            let partner = self
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i && !used[j])
                .map(|(j, w)| (j, (w - z.conj()).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match partner {
                Some((j, d)) if d <= tol => {
                    used[i] = true;
                    used[j] = true;
                }
                _ => return false,
            }
        }
        true
    }

    /// Largest relative eigenpair residual `‖G v − λ v‖ / (‖v‖ ‖G‖∞)` over
    /// `samples` evenly spaced eigenvalues. `None` if inverse iteration failed.
    pub fn residual_check(&self, matrix: &DMatrix<f64>, samples: usize) -> Option<f64> {
        let norm = inf_norm(matrix).max(f64::MIN_POSITIVE);
        let stride = (self.len() / samples.max(1)).max(1);
        let mut worst: f64 = 0.0;
        for &lambda in self.eigenvalues.iter().step_by(stride).take(samples) {
            let v = eigen::eigenvector(matrix, lambda)?;
            worst = worst.max(eigen::eigenpair_residual(matrix, lambda, &v) / norm);
        }
        Some(worst)
    }
}

pub fn inf_norm(matrix: &DMatrix<f64>) -> f64 {
    matrix.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn stability_report(spectrum: &Spectrum, tol: f64) -> StabilityReport {
    let max_re = spectrum.max_re();
    let mut re: Vec<f64> = spectrum.eigenvalues.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    let n = re.len();
    let paired = (0..n / 2 + n % 2).all(|i| (re[i] + re[n - 1 - i]).abs() <= tol);
    StabilityReport {
        max_re,
        stable: max_re <= tol,
        paired,
    }
}

/// Report with the tolerance `1e-8 ‖G‖∞`.
pub fn classify(op: &GlobalOperator, spectrum: &Spectrum) -> StabilityReport {
    stability_report(spectrum, DEFAULT_RELATIVE_TOLERANCE * op.inf_norm())
}

/// Largest growth rate of `exp(G t)` estimated by marching a random vector.
///
/// RK4 with `dt = min(t_final / 1000, 1 / ‖G‖∞)`, renormalising each step;
/// the rate is the least-squares slope of `log ‖U‖` over the second half.
pub fn growth_rate_oracle(matrix: &DMatrix<f64>, t_final: f64, seed: u64) -> f64 {
    let n = matrix.nrows();
    let norm = inf_norm(matrix);
    let mut dt = t_final / 1000.0;
    if norm > 0.0 {
        dt = dt.min(1.0 / norm);
    }
    let steps = (t_final / dt).ceil() as usize;
    let dt = t_final / steps as f64;
    let mut u = crate::norms::random_state(seed, 0, n);
    let mut rk = Rk4::new(n);
    let mut log_norm = 0.0;
    let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let first = steps / 2;
    let (mut sx, mut sy, mut sxx, mut sxy, mut count) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let n0 = l2(&u);
    u.iter_mut().for_each(|x| *x /= n0);
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        rk.step(matrix, &mut u, t, dt);
        let s = l2(&u);
        log_norm += s.ln();
        u.iter_mut().for_each(|x| *x /= s);
        if step >= first {
            let t = step as f64 * dt;
            sx += t;
            sy += log_norm;
            sxx += t * t;
            sxy += t * log_norm;
            count += 1.0;
        }
    }
    (count * sxy - sx * sy) / (count * sxx - sx * sx)
}

/// Spectra of several operators, solved independently.
pub fn sweep(ops: &[GlobalOperator], exec: Execution) -> Vec<Result<Spectrum>> {
    exec.map_slice(ops, Spectrum::from_operator)
}
