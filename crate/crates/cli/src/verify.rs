//! Built-in property suite behind `splitdg verify`.

use splitdg_core::norms::{aliasing_bound_violations, norm_equivalence_check, random_state};
use splitdg_core::spectra::{classify, growth_rate_oracle, Spectrum};
use splitdg_core::timeint::{rk_march, InitialCondition, MarchOptions};
use splitdg_core::{
    BoundaryCondition, EnergyNorm, EquationForm, Execution, FluxKind, GlobalOperator, LinearDynamics, Mesh,
    NodeFamily, OverIntegrationSpeed, QuadratureRule, Speed, SplitConfig,
};

use crate::Status;

type Check = fn(u64) -> Result<(bool, String), splitdg_core::Error>;

fn form(theta: u8) -> EquationForm {
    if theta == 0 {
        EquationForm::Conservative
    } else {
        EquationForm::NonConservative
    }
}

fn op(k: usize, family: NodeFamily, n: usize, theta: u8, alpha: f64, speed: &Speed) -> Result<GlobalOperator, splitdg_core::Error> {
    let mesh = Mesh::uniform(-1.0, 1.0, k)?;
    let cfg = SplitConfig::new(alpha, form(theta), family, n);
    GlobalOperator::assemble(&mesh, &cfg, FluxKind::Central, BoundaryCondition::Periodic, speed, Execution::Sequential)
}

fn bump(k: usize, family: NodeFamily, theta: u8, alpha: f64) -> Result<GlobalOperator, splitdg_core::Error> {
    op(k, family, 5, theta, alpha, &Speed::Bump)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn quadrature_exactness(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut worst: f64 = 0.0;
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for n in 1..=16 {
            let rule = QuadratureRule::new(family, n)?;
            for k in 0..=family.exactness(n) {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
                worst = worst.max((rule.integrate(|x| x.powi(k as i32)) - exact).abs());
            }
        }
    }
    Ok((worst <= 1e-11, format!("max error {worst:.2e} (N ≤ 16)")))
}

fn derivative_exactness(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut worst: f64 = 0.0;
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for n in 1..=16 {
            let rule = QuadratureRule::new(family, n)?;
            let d = rule.derivative_matrix();
            for k in 1..=n {
                let f: Vec<f64> = rule.nodes().iter().map(|x| x.powi(k as i32)).collect();
                for (x, v) in rule.nodes().iter().zip(d.apply(&f)) {
                    let exact = k as f64 * x.powi(k as i32 - 1);
                    worst = worst.max((v - exact).abs() / (1.0 + exact.abs()));
                }
            }
        }
    }
    Ok((worst <= 1e-11, format!("max relative error {worst:.2e} (N ≤ 16)")))
}

fn sbp(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let defect = |family, n| -> Result<(f64, f64), splitdg_core::Error> {
        let rule = QuadratureRule::new(family, n)?;
        let d = rule.derivative_matrix();
        let w = rule.weights();
        let (mut exact, mut off): (f64, f64) = (0.0, 0.0);
        for i in 0..=n {
            for j in 0..=n {
                let q = w[i] * d.matrix()[(i, j)] + w[j] * d.matrix()[(j, i)];
                let b = match (i == j, i) {
                    (true, 0) => -1.0,
                    (true, i) if i == n => 1.0,
                    _ => 0.0,
                };
                exact = exact.max((q - b).abs());
                if i != j {
                    off = off.max(q.abs());
                }
            }
        }
        Ok((exact, off))
    };
    let mut gl: f64 = 0.0;
    for n in 1..=16 {
        gl = gl.max(defect(NodeFamily::GaussLobatto, n)?.0);
    }
    let gauss = defect(NodeFamily::Gauss, 5)?.1;
    Ok((gl <= 1e-12 && gauss > 1e-3, format!("GL defect {gl:.2e}; Gauss N=5 off-diagonal {gauss:.3e}")))
}

fn matrix_free(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    let g = bump(12, NodeFamily::GaussLobatto, 0, 0.5)?;
    let mut worst: f64 = 0.0;
    let mut out = vec![0.0; g.dim()];
    for s in 0..100 {
        let u = random_state(seed, s, g.dim());
        g.apply_into(&u, 0.0, &mut out);
        worst = worst.max(max_diff(&out, &g.apply_dense(&u)));
    }
    Ok((worst <= 1e-13 * g.inf_norm().max(1.0), format!("max difference {worst:.2e} over 100 vectors")))
}

fn constant_speed(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut worst: f64 = 0.0;
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        let base = op(6, family, 5, 0, 1.0, &Speed::Constant(1.0))?;
        for theta in [0, 1] {
            for alpha in [0.0, 0.3, 0.5, 1.0] {
                let other = op(6, family, 5, theta, alpha, &Speed::Constant(1.0))?;
                worst = worst.max(max_diff(base.matrix().as_slice(), other.matrix().as_slice()));
            }
        }
    }
    Ok((worst <= 1e-13, format!("max entry difference {worst:.2e}")))
}

fn energy_identity(seed: u64, theta: u8) -> Result<(bool, String), splitdg_core::Error> {
    let (alpha, norm) = if theta == 0 { (1.0, EnergyNorm::A) } else { (0.0, EnergyNorm::InverseA) };
    let g = bump(10, NodeFamily::GaussLobatto, theta, alpha)?;
    let w = g.energy_norm(norm);
    let worst = (0..50)
        .map(|s| w.inner(&random_state(seed, s, g.dim()), &g.apply_dense(&random_state(seed, s, g.dim()))).abs())
        .fold(0.0, f64::max);
    Ok((worst <= 1e-11, format!("max |Uᵀ M G U| = {worst:.2e}")))
}

fn energy_a(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    energy_identity(seed, 0)
}

fn energy_inv_a(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    energy_identity(seed, 1)
}

fn spectrum_structure(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut ok = true;
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for alpha in [0.0, 0.5, 1.0] {
            let g = bump(8, family, 0, alpha)?;
            let s = Spectrum::from_operator(&g)?;
            ok &= s.len() == g.dim() && s.conjugate_closed(1e-8 * g.inf_norm());
        }
    }
    Ok((ok, "count K(N+1) and conjugate closure".into()))
}

fn skew_pairing(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut ok = true;
    for theta in [0, 1] {
        let g = bump(10, NodeFamily::GaussLobatto, theta, 0.5)?;
        ok &= classify(&g, &Spectrum::from_operator(&g)?).paired;
    }
    Ok((ok, "α=1/2 real parts symmetric within 1e-8·‖G‖∞".into()))
}

fn gl_classification(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (theta, stable_alpha) in [(0u8, 1.0), (1, 0.0)] {
        for alpha in [0.0, 0.5, 1.0] {
            let g = bump(10, NodeFamily::GaussLobatto, theta, alpha)?;
            let r = classify(&g, &Spectrum::from_operator(&g)?);
            ok &= r.stable == (alpha == stable_alpha);
            parts.push(format!("θ={theta} α={alpha}: {:.3e}", r.max_re));
        }
    }
    Ok((ok, parts.join(", ")))
}

fn gauss_unstable(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut ok = true;
    for theta in [0, 1] {
        for alpha in [0.0, 0.5, 1.0] {
            let g = bump(10, NodeFamily::Gauss, theta, alpha)?;
            ok &= !classify(&g, &Spectrum::from_operator(&g)?).stable;
        }
    }
    Ok((ok, "every Gauss split form has a growing mode".into()))
}

fn over_integration(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mesh = Mesh::uniform(-1.0, 1.0, 10)?;
    let ops = [0.0, 0.5, 1.0]
        .iter()
        .map(|&alpha| {
            let cfg = SplitConfig::new(alpha, EquationForm::Conservative, NodeFamily::GaussLobatto, 5)
                .with_over_integration(10, OverIntegrationSpeed::Exact);
            GlobalOperator::assemble(&mesh, &cfg, FluxKind::Central, BoundaryCondition::Periodic, &Speed::Bump, Execution::Sequential)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spread = ops[1..]
        .iter()
        .map(|o| max_diff(o.matrix().as_slice(), ops[0].matrix().as_slice()))
        .fold(0.0, f64::max);
    let unstable = !classify(&ops[0], &Spectrum::from_operator(&ops[0])?).stable;
    Ok((spread <= 1e-12 && unstable, format!("α spread {spread:.2e}, unstable={unstable}")))
}

fn gamma_bound(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut total = 0;
    for n in [3, 5, 8] {
        let g = op(20, NodeFamily::GaussLobatto, n, 0, 1.0, &Speed::Bump)?;
        for norm in [EnergyNorm::A, EnergyNorm::InverseA] {
            total += aliasing_bound_violations(g.elements(), norm, 1000, seed, Execution::Sequential);
        }
    }
    let c = op(4, NodeFamily::GaussLobatto, 5, 0, 1.0, &Speed::Constant(2.0))?;
    let zero = c.gamma_global(EnergyNorm::A, Execution::Sequential) == 0.0;
    Ok((total == 0 && zero, format!("{total} violations; constant-speed γ = 0: {zero}")))
}

fn norm_equivalence(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    let mut ok = true;
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        let g = bump(10, family, 0, 1.0)?;
        for s in 0..50 {
            let u = random_state(seed, s, g.dim());
            for norm in [EnergyNorm::A, EnergyNorm::InverseA] {
                ok &= norm_equivalence_check(g.elements(), &u, norm) == (true, true);
            }
        }
    }
    Ok((ok, "a-norm and 1/a-norm bracket the L2 norm".into()))
}

fn growth_oracle(seed: u64) -> Result<(bool, String), splitdg_core::Error> {
    let g = bump(10, NodeFamily::GaussLobatto, 0, 0.5)?;
    let eig = Spectrum::from_operator(&g)?.max_re();
    let march = growth_rate_oracle(g.matrix(), 40.0, seed);
    let rel = (march - eig).abs() / eig.abs();
    Ok((rel <= 0.05, format!("eigensolver {eig:.5}, march {march:.5}")))
}

fn energy_march(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let g = bump(10, NodeFamily::GaussLobatto, 0, 1.0)?;
    let u0 = InitialCondition::Gaussian.sample(&g);
    let out = rk_march(&g, &u0, &MarchOptions::new(1.0).with_cfl(0.1))?;
    let e = &out.trace.e_a;
    let drift = e.iter().map(|v| (v / e[0] - 1.0).abs()).fold(0.0, f64::max);
    Ok((drift <= 1e-9 && !out.trace.violated, format!("E_a drift {drift:.2e} over t = 1")))
}

fn eigen_residual(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let g = bump(10, NodeFamily::Gauss, 0, 0.5)?;
    let s = Spectrum::from_operator(&g)?;
    match s.residual_check(g.matrix(), 10) {
        Some(r) => Ok((r <= 1e-8, format!("max ‖Gv − λv‖/‖G‖∞ = {r:.2e}"))),
        None => Ok((false, "inverse iteration failed".into())),
    }
}

const CHECKS: [(&str, Check); 18] = [
    ("quadrature-exactness", quadrature_exactness),
    ("derivative-exactness", derivative_exactness),
    ("sbp-identity", sbp),
    ("matrix-free", matrix_free),
    ("constant-speed-split", constant_speed),
    ("energy-identity-a", energy_a),
    ("energy-identity-inv-a", energy_inv_a),
    ("spectrum-structure", spectrum_structure),
    ("skew-pairing", skew_pairing),
    ("gl-classification", gl_classification),
    ("gauss-unstable", gauss_unstable),
    ("over-integration", over_integration),
    ("gamma-bound", gamma_bound),
    ("norm-equivalence", norm_equivalence),
    ("growth-oracle", growth_oracle),
    ("energy-march", energy_march),
    ("eigen-residual", eigen_residual),
    ("eigen-deterministic", eigen_deterministic),
];

fn eigen_deterministic(_: u64) -> Result<(bool, String), splitdg_core::Error> {
    let g = bump(8, NodeFamily::GaussLobatto, 0, 0.0)?;
    let a = Spectrum::from_operator(&g)?;
    let b = Spectrum::from_operator(&g)?;
    Ok((a == b, "identical bits on repeated solves".into()))
}

pub fn names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs every check whose name contains `filter` and prints a table.
pub fn run(filter: Option<&str>, seed: u64, exec: Execution) -> Status {
    let selected: Vec<&(&str, Check)> = CHECKS
        .iter()
        .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
        .collect();
    if selected.is_empty() {
        eprintln!("no check matches the filter; available: {}", names().join(", "));
        return Status::PropertyFailure;
    }
    let results = exec.map_slice(&selected, |(_, check)| check(seed));
    let width = selected.iter().map(|c| c.0.len()).max().unwrap_or(0);
    let mut failed = 0;
    for ((name, _), result) in selected.iter().zip(results) {
        let (pass, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("{:<width$}  {}  {detail}", name, if pass { "PASS" } else { "FAIL" });
    }
    println!("{} checks, {failed} failed", selected.len());
    if failed == 0 {
        Status::Ok
    } else {
        Status::PropertyFailure
    }
}
