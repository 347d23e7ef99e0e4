//! Advection speed functions `a(x)`.

/// A smooth advection speed with its derivative.
pub trait AdvectionSpeed: Send + Sync {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
}

/// Built-in speeds.
#[derive(Debug, Clone, PartialEq)]
pub enum Speed {
    Constant(f64),
    /// `a(x) = 1 + (1 - x²)⁵`, smooth with large spectral content on [-1, 1].
    Bump,
    /// `a(x) = Σ c_k x^k`, coefficients in ascending order.
    Poly(Vec<f64>),
}

impl AdvectionSpeed for Speed {
    fn value(&self, x: f64) -> f64 {
        match self {
            Speed::Constant(c) => *c,
            Speed::Bump => 1.0 + (1.0 - x * x).powi(5),
            Speed::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Speed::Constant(_) => 0.0,
            Speed::Bump => -10.0 * x * (1.0 - x * x).powi(4),
            Speed::Poly(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck),
        }
    }
}

impl<T: AdvectionSpeed + ?Sized> AdvectionSpeed for &T {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
    fn derivative(&self, x: f64) -> f64 {
        (**self).derivative(x)
    }
}
