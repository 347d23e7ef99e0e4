//! Classic RK4 marching with energy traces in the `a`, `1/a` and L2 norms.

use crate::assembly::{GlobalOperator, LinearDynamics};
use crate::norms::{random_state, EnergyNorm, WeightedNorm};
use crate::{EquationForm, Error, Execution, Result, SplitConfig};

pub const DEFAULT_CFL: f64 = 0.5;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;
/// Relative slack on the energy bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// Reusable RK4 stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    pub fn step<D: LinearDynamics + ?Sized>(&mut self, d: &D, u: &mut [f64], t: f64, dt: f64) {
        let h = 0.5 * dt;
        d.apply_into(u, t, &mut self.k1);
        axpy(&mut self.tmp, u, h, &self.k1);
        d.apply_into(&self.tmp, t + h, &mut self.k2);
        axpy(&mut self.tmp, u, h, &self.k2);
        d.apply_into(&self.tmp, t + h, &mut self.k3);
        axpy(&mut self.tmp, u, dt, &self.k3);
        d.apply_into(&self.tmp, t + dt, &mut self.k4);
        let s = dt / 6.0;
        for i in 0..u.len() {
            u[i] += s * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

fn axpy(out: &mut [f64], u: &[f64], h: f64, k: &[f64]) {
    for ((o, &a), &b) in out.iter_mut().zip(u).zip(k) {
        *o = a + h * b;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchOptions {
    /// Explicit step; derived from `cfl` when absent.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub sample_every: usize,
    pub cfl: f64,
    /// Run even if `dt` exceeds the CFL estimate.
    pub force: bool,
    /// `γ_global` for the bound envelope; computed from the operator when absent.
    pub gamma: Option<f64>,
}

impl MarchOptions {
    pub fn new(t_final: f64) -> Self {
        Self {
            dt: None,
            t_final,
            sample_every: DEFAULT_SAMPLE_EVERY,
            cfl: DEFAULT_CFL,
            force: false,
            gamma: None,
        }
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }
}

/// `min Δx / (a_max (N + 1)²)`, the CFL estimate before the `cfl` factor.
pub fn cfl_base(op: &GlobalOperator) -> f64 {
    let n1 = op.nodes_per_element() as f64;
    op.mesh().min_dx() / (op.max_speed() * n1 * n1)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub e_a: Vec<f64>,
    pub e_inv_a: Vec<f64>,
    pub e_l2: Vec<f64>,
    pub bound_rhs: Vec<f64>,
    /// Cumulative `∫ (boundary term)²` at each sample.
    pub inflow_integral: Vec<f64>,
    pub violated: bool,
}

impl EnergyTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn energy(&self, norm: EnergyNorm) -> &[f64] {
        match norm {
            EnergyNorm::A => &self.e_a,
            EnergyNorm::InverseA => &self.e_inv_a,
            EnergyNorm::L2 => &self.e_l2,
        }
    }

    /// Least-squares slope of `log E` over samples with `t ≥ from`.
    pub fn log_slope(&self, norm: EnergyNorm, from: f64) -> f64 {
        let e = self.energy(norm);
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(e)
            .filter(|(t, _)| **t >= from)
            .map(|(&t, &v)| (t, v.ln()))
            .collect();
        let n = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 * p.0, b + p.0 * p.1));
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchOutcome {
    pub trace: EnergyTrace,
    pub state: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    /// `dt` exceeded the CFL estimate and the march was forced.
    pub cfl_warning: bool,
    /// Time at which a non-finite entry appeared; the trace stops there.
    pub non_finite_at: Option<f64>,
}

/// Squared boundary term of the active estimate at time `t`.
fn boundary_term(op: &GlobalOperator, t: f64) -> f64 {
    match op.inflow_value(t) {
        None => 0.0,
        Some(g) => match op.config().form {
            EquationForm::Conservative => (op.inflow_speed() * g).powi(2),
            EquationForm::NonConservative => g * g,
        },
    }
}

/// Right-hand side `E(0) e^{2cγt} + ∫ b²` of the active energy bound.
pub fn bound_envelope(e0: f64, c: f64, gamma: f64, t: f64, inflow_integral: f64) -> f64 {
    e0 * (2.0 * c * gamma * t).exp() + inflow_integral
}

/// RK4 march of `dU/dt = G U + b(t)` from `u0`.
pub fn rk_march(op: &GlobalOperator, u0: &[f64], opts: &MarchOptions) -> Result<MarchOutcome> {
    if u0.len() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: u0.len(),
        });
    }
    if !(opts.t_final > 0.0 && opts.t_final.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_final must be positive, got {}", opts.t_final)));
    }
    if !(opts.cfl > 0.0) || opts.sample_every == 0 {
        return Err(Error::InvalidConfig("cfl and sample_every must be positive".into()));
    }
    let limit = opts.cfl * cfl_base(op);
    let requested = opts.dt.unwrap_or(limit);
    if !(requested > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {requested}")));
    }
    let steps = (opts.t_final / requested - 1e-9).ceil().max(1.0) as usize;
    let dt = opts.t_final / steps as f64;
    let cfl_warning = dt > limit * (1.0 + 1e-12);
    if cfl_warning && !opts.force {
        return Err(Error::CflViolation { dt, limit });
    }

    let cfg = op.config();
    let (norm, c) = cfg.form.estimate(cfg.alpha);
    let gamma = if c == 0.0 {
        0.0
    } else {
        opts.gamma.unwrap_or_else(|| op.gamma_global(norm, Execution::Sequential))
    };
    let norms = [EnergyNorm::A, EnergyNorm::InverseA, EnergyNorm::L2].map(|n| op.energy_norm(n));
    let active: &WeightedNorm = &norms[match norm {
        EnergyNorm::A => 0,
        EnergyNorm::InverseA => 1,
        EnergyNorm::L2 => 2,
    }];
    let e0 = active.norm_sq(u0);

    let mut trace = EnergyTrace::default();
    let record = |trace: &mut EnergyTrace, t: f64, u: &[f64], integral: f64| {
        trace.times.push(t);
        trace.e_a.push(norms[0].norm_sq(u));
        trace.e_inv_a.push(norms[1].norm_sq(u));
        trace.e_l2.push(norms[2].norm_sq(u));
        let rhs = bound_envelope(e0, c, gamma, t, integral);
        trace.bound_rhs.push(rhs);
        trace.inflow_integral.push(integral);
        if active.norm_sq(u) > rhs * (1.0 + BOUND_SLACK) {
            trace.violated = true;
        }
    };

    let mut u = u0.to_vec();
    let mut rk = Rk4::new(u.len());
    let mut integral = 0.0;
    let mut non_finite_at = None;
    record(&mut trace, 0.0, &u, integral);
    for step in 1..=steps {
        let t = (step - 1) as f64 * dt;
        rk.step(op, &mut u, t, dt);
        if !op.boundary().is_periodic() {
            integral += dt / 6.0
                * (boundary_term(op, t) + 4.0 * boundary_term(op, t + 0.5 * dt) + boundary_term(op, t + dt));
        }
        let t_new = step as f64 * dt;
        if u.iter().any(|v| !v.is_finite()) {
            non_finite_at = Some(t_new);
            trace.violated = true;
            break;
        }
        if step % opts.sample_every == 0 || step == steps {
            record(&mut trace, t_new, &u, integral);
        }
    }
    Ok(MarchOutcome {
        trace,
        state: u,
        dt,
        steps,
        cfl_warning,
        non_finite_at,
    })
}

/// Re-verifies `E_δ(t) ≤ E_δ(0) e^{2cγt} + ∫ b²` at every sample of `trace`.
pub fn bound_check(trace: &EnergyTrace, cfg: &SplitConfig, gamma_global: f64) -> bool {
    if trace.is_empty() {
        return false;
    }
    let (norm, c) = cfg.form.estimate(cfg.alpha);
    let e = trace.energy(norm);
    let e0 = e[0];
    trace.times.iter().zip(e).zip(&trace.inflow_integral).all(|((&t, &v), &integral)| {
        v.is_finite() && v <= bound_envelope(e0, c, gamma_global, t, integral) * (1.0 + BOUND_SLACK)
    })
}

/// Initial conditions sampled at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// `exp(−20 x²)`.
    Gaussian,
    /// `sin(2π k (x − x_min) / L)`.
    Sine(u32),
    Constant(f64),
    /// Uniform on `[−1, 1]` from the given seed.
    Random(u64),
}

impl InitialCondition {
    pub fn sample(&self, op: &GlobalOperator) -> Vec<f64> {
        let x = op.node_coordinates();
        let (x0, x1) = (op.mesh().x_min(), op.mesh().x_max());
        match *self {
            InitialCondition::Gaussian => x.iter().map(|x| (-20.0 * x * x).exp()).collect(),
            InitialCondition::Sine(k) => x
                .iter()
                .map(|x| (2.0 * std::f64::consts::PI * k as f64 * (x - x0) / (x1 - x0)).sin())
                .collect(),
            InitialCondition::Constant(c) => vec![c; x.len()],
            InitialCondition::Random(seed) => random_state(seed, 0, x.len()),
        }
    }
}
