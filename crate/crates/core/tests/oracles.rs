mod common;

use common::oracle::{basis_derivative, rhs, rule, Setup};
use common::{form, max_abs_diff};
use nalgebra::DMatrix;
use num_complex::Complex64;
use splitdg_core::eigen::eigenvalues;
use splitdg_core::norms::random_state;
use splitdg_core::spectra::growth_rate_oracle;
use splitdg_core::{assemble, BoundaryCondition, FluxKind, Mesh, NodeFamily, QuadratureRule, Speed, SplitConfig};

#[test]
fn nodes_and_weights_match_golub_welsch() {
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for n in 1..=20 {
            let crate_rule = QuadratureRule::new(family, n).unwrap();
            let (x, w) = rule(family, n);
            assert!(max_abs_diff(crate_rule.nodes(), &x) < 1e-13, "{family:?} N={n}");
            assert!(max_abs_diff(crate_rule.weights(), &w) < 1e-13, "{family:?} N={n}");
        }
    }
}

#[test]
fn derivative_matrix_matches_product_formula() {
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for n in [1, 2, 5, 9, 14] {
            let r = QuadratureRule::new(family, n).unwrap();
            let d = r.derivative_matrix();
            let x = r.nodes();
            for i in 0..=n {
                for j in 0..=n {
                    let oracle = basis_derivative(x, j, x[i]);
                    assert!((d.matrix()[(i, j)] - oracle).abs() < 1e-10 * (1.0 + oracle.abs()));
                }
            }
        }
    }
}

fn check_operator(family: NodeFamily, n: usize, k: usize, theta: u8, alpha: f64, flux: FluxKind, speed: Speed) {
    let mesh = Mesh::uniform(-1.0, 1.0, k).unwrap();
    let cfg = SplitConfig::new(alpha, form(theta), family, n);
    let op = assemble(&mesh, &cfg, flux, BoundaryCondition::Periodic, &speed).unwrap();
    let setup = Setup {
        family,
        degree: n,
        elements: k,
        x_min: -1.0,
        x_max: 1.0,
        alpha,
        theta: theta as f64,
        flux,
        speed: &speed,
    };
    for s in 0..10 {
        let u = random_state(21, s, op.dim());
        let g = op.apply_dense(&u);
        let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
        let err = max_abs_diff(&g, &rhs(&setup, &u)) / scale;
        assert!(err < 1e-12, "{family:?} N={n} θ={theta} α={alpha} {flux:?}: {err:e}");
    }
}

#[test]
fn assembled_operator_matches_weak_form() {
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for flux in [FluxKind::Central, FluxKind::Upwind] {
            for theta in [0, 1] {
                for alpha in [0.0, 0.25, 0.5, 1.0] {
                    check_operator(family, 4, 5, theta, alpha, flux, Speed::Bump);
                }
            }
        }
    }
}

#[test]
fn weak_form_with_polynomial_speed() {
    // a(x) = 2 + x/2 + x³/4 is not periodic, so only the upwind flux applies
    let speed = Speed::Poly(vec![2.0, 0.5, 0.0, 0.25]);
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for n in [1, 3, 7] {
            check_operator(family, n, 3, 0, 0.5, FluxKind::Upwind, speed.clone());
            check_operator(family, n, 3, 1, 0.0, FluxKind::Upwind, speed.clone());
        }
    }
}

#[test]
fn eigensolver_matches_nalgebra() {
    let mesh = Mesh::uniform(-1.0, 1.0, 6).unwrap();
    for family in [NodeFamily::GaussLobatto, NodeFamily::Gauss] {
        for alpha in [0.0, 0.5, 1.0] {
            let cfg = SplitConfig::new(alpha, form(0), family, 4);
            let op = assemble(&mesh, &cfg, FluxKind::Central, BoundaryCondition::Periodic, &Speed::Bump).unwrap();
            let mine = eigenvalues(op.matrix()).unwrap();
            let theirs: Vec<Complex64> = op.matrix().complex_eigenvalues().iter().copied().collect();
            let scale = op.inf_norm();
            for z in &theirs {
                let nearest = mine.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-8 * scale, "{family:?} α={alpha}: {z} off by {nearest:e}");
            }
            let re = |v: &[Complex64]| v.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            assert!((re(&mine) - re(&theirs)).abs() < 1e-8 * scale);
        }
    }
}

#[test]
fn growth_rate_oracle_on_known_matrix() {
    // block diagonal: rotation plus a growing mode at rate 0.3
    let m = DMatrix::from_row_slice(3, 3, &[0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.3]);
    let rate = growth_rate_oracle(&m, 40.0, 9);
    assert!((rate - 0.3).abs() < 1e-3, "{rate}");
    let e = eigenvalues(&m).unwrap();
    assert!(e.iter().any(|z| (z.re - 0.3).abs() < 1e-14 && z.im.abs() < 1e-14));
}
