#![allow(dead_code)]

pub mod oracle;

use splitdg_core::{
    assemble, BoundaryCondition, EquationForm, FluxKind, GlobalOperator, Mesh, NodeFamily, OverIntegrationSpeed, Speed,
    SplitConfig,
};

pub fn form(theta: u8) -> EquationForm {
    if theta == 0 {
        EquationForm::Conservative
    } else {
        EquationForm::NonConservative
    }
}

/// Periodic central-flux operator for `a(x) = 1 + (1 − x²)⁵` on `[−1, 1]`, N = 5.
pub fn bump(k: usize, family: NodeFamily, theta: u8, alpha: f64) -> GlobalOperator {
    bump_n(k, family, 5, theta, alpha)
}

pub fn bump_n(k: usize, family: NodeFamily, n: usize, theta: u8, alpha: f64) -> GlobalOperator {
    let mesh = Mesh::uniform(-1.0, 1.0, k).unwrap();
    let cfg = SplitConfig::new(alpha, form(theta), family, n);
    assemble(&mesh, &cfg, FluxKind::Central, BoundaryCondition::Periodic, &Speed::Bump).unwrap()
}

pub fn bump_over_integrated(k: usize, q: usize, alpha: f64) -> GlobalOperator {
    let mesh = Mesh::uniform(-1.0, 1.0, k).unwrap();
    let cfg = SplitConfig::new(alpha, EquationForm::Conservative, NodeFamily::GaussLobatto, 5)
        .with_over_integration(q, OverIntegrationSpeed::Exact);
    assemble(&mesh, &cfg, FluxKind::Central, BoundaryCondition::Periodic, &Speed::Bump).unwrap()
}

/// Prints one verdict line and returns the verdict.
pub fn report(id: &str, pass: bool, detail: &str) -> bool {
    println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
