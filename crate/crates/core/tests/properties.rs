mod common;

use common::{form, max_abs_diff};
use proptest::prelude::*;
use splitdg_core::norms::{aliasing_bound_violations, aliasing_functional, element_gamma, element_norm_sq, norm_equivalence_check, random_state};
use splitdg_core::spectra::{stability_report, Spectrum};
use splitdg_core::{
    assemble, BoundaryCondition, EnergyNorm, Execution, FluxKind, GlobalOperator, LinearDynamics, Mesh, NodeFamily,
    QuadratureRule, Speed, SplitConfig,
};

fn family() -> impl Strategy<Value = NodeFamily> {
    prop_oneof![Just(NodeFamily::GaussLobatto), Just(NodeFamily::Gauss)]
}

fn flux() -> impl Strategy<Value = FluxKind> {
    prop_oneof![Just(FluxKind::Central), Just(FluxKind::Upwind)]
}

fn periodic(k: usize, fam: NodeFamily, n: usize, theta: u8, alpha: f64, flux: FluxKind, speed: &Speed) -> GlobalOperator {
    let mesh = Mesh::uniform(-1.0, 1.0, k).unwrap();
    let cfg = SplitConfig::new(alpha, form(theta), fam, n);
    assemble(&mesh, &cfg, flux, BoundaryCondition::Periodic, speed).unwrap()
}

/// Sorted non-uniform breakpoints on `[−1, 1]`.
fn breakpoints(cuts: Vec<f64>) -> Vec<f64> {
    let mut b = vec![-1.0, 1.0];
    b.extend(cuts.into_iter().map(|c| c.clamp(-0.95, 0.95)));
    b.sort_by(f64::total_cmp);
    b.dedup_by(|x, y| (*x - *y).abs() < 1e-3);
    b
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_free_matches_dense(
        cuts in prop::collection::vec(-1.0f64..1.0, 0..6),
        fam in family(), n in 1usize..8, theta in 0u8..2, alpha in 0.0f64..=1.0, fl in flux(), seed in any::<u64>(),
    ) {
        let mesh = Mesh::from_breakpoints(breakpoints(cuts)).unwrap();
        let cfg = SplitConfig::new(alpha, form(theta), fam, n);
        let op = assemble(&mesh, &cfg, fl, BoundaryCondition::Periodic, &Speed::Bump).unwrap();
        let u = random_state(seed, 0, op.dim());
        let mut free = vec![0.0; op.dim()];
        op.apply_into(&u, 0.0, &mut free);
        let dense = op.apply_dense(&u);
        let scale = dense.iter().map(|v| v.abs()).fold(1.0, f64::max);
        prop_assert!(max_abs_diff(&free, &dense) <= 1e-13 * scale);
    }

    #[test]
    fn constant_speed_removes_the_split(
        fam in family(), n in 1usize..8, k in 1usize..6, c in 0.2f64..3.0, fl in flux(),
        alpha in 0.0f64..=1.0, theta in 0u8..2,
    ) {
        let reference = periodic(k, fam, n, 0, 1.0, fl, &Speed::Constant(c));
        let other = periodic(k, fam, n, theta, alpha, fl, &Speed::Constant(c));
        prop_assert!(max_abs_diff(reference.matrix().as_slice(), other.matrix().as_slice()) <= 1e-13);
    }

    #[test]
    fn conservative_energy_identity(n in 1usize..9, k in 1usize..8, seed in any::<u64>()) {
        let op = periodic(k, NodeFamily::GaussLobatto, n, 0, 1.0, FluxKind::Central, &Speed::Bump);
        let u = random_state(seed, 1, op.dim());
        let w = op.energy_norm(EnergyNorm::A);
        prop_assert!(w.inner(&u, &op.apply_dense(&u)).abs() <= 1e-11);
    }

    #[test]
    fn non_conservative_energy_identity(n in 1usize..9, k in 1usize..8, seed in any::<u64>()) {
        let op = periodic(k, NodeFamily::GaussLobatto, n, 1, 0.0, FluxKind::Central, &Speed::Bump);
        let u = random_state(seed, 2, op.dim());
        let w = op.energy_norm(EnergyNorm::InverseA);
        prop_assert!(w.inner(&u, &op.apply_dense(&u)).abs() <= 1e-11);
    }

    #[test]
    fn inflow_energy_rate_bounded_by_boundary_data(
        n in 1usize..8, k in 1usize..6, g in -2.0f64..2.0, seed in any::<u64>(),
    ) {
        let mesh = Mesh::uniform(-1.0, 1.0, k).unwrap();
        let cfg = SplitConfig::new(1.0, form(0), NodeFamily::GaussLobatto, n);
        let op = assemble(&mesh, &cfg, FluxKind::Upwind, BoundaryCondition::inflow(move |_| g), &Speed::Bump).unwrap();
        let u = random_state(seed, 3, op.dim());
        let rate = 2.0 * op.energy_norm(EnergyNorm::A).inner(&u, &op.apply(&u, 0.0).unwrap());
        prop_assert!(rate <= (op.inflow_speed() * g).powi(2) + 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_count_and_conjugate_closure(
        fam in family(), n in 1usize..7, k in 1usize..6, theta in 0u8..2, alpha in 0.0f64..=1.0, fl in flux(),
    ) {
        let op = periodic(k, fam, n, theta, alpha, fl, &Speed::Bump);
        let s = Spectrum::from_operator(&op).unwrap();
        prop_assert_eq!(s.len(), k * (n + 1));
        prop_assert!(s.conjugate_closed(1e-8 * op.inf_norm()));
    }

    #[test]
    fn skew_symmetric_real_parts_pair_up(n in 1usize..7, k in 1usize..8, theta in 0u8..2) {
        let op = periodic(k, NodeFamily::GaussLobatto, n, theta, 0.5, FluxKind::Central, &Speed::Bump);
        let s = Spectrum::from_operator(&op).unwrap();
        prop_assert!(stability_report(&s, 1e-8 * op.inf_norm()).paired);
    }

    #[test]
    fn display_scaling_does_not_change_classification(
        n in 1usize..6, k in 1usize..5, alpha in 0.0f64..=1.0, factor in 1e-3f64..1e3,
    ) {
        let op = periodic(k, NodeFamily::GaussLobatto, n, 0, alpha, FluxKind::Central, &Speed::Bump);
        let s = Spectrum::from_operator(&op).unwrap();
        let rescaled = Spectrum::new(s.eigenvalues().to_vec(), s.scaling() * factor);
        let tol = 1e-8 * op.inf_norm();
        prop_assert_eq!(stability_report(&s, tol), stability_report(&rescaled, tol));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norms_are_equivalent_to_l2(
        fam in family(), n in 1usize..10, k in 1usize..6, seed in any::<u64>(),
        inverse in any::<bool>(),
    ) {
        let op = periodic(k, fam, n, 0, 1.0, FluxKind::Central, &Speed::Bump);
        let u = random_state(seed, 4, op.dim());
        let norm = if inverse { EnergyNorm::InverseA } else { EnergyNorm::A };
        prop_assert_eq!(norm_equivalence_check(op.elements(), &u, norm), (true, true));
    }

    #[test]
    fn aliasing_functional_is_bounded_by_gamma(
        n in 1usize..10, k in 1usize..10, seed in any::<u64>(), inverse in any::<bool>(),
    ) {
        let op = periodic(k, NodeFamily::GaussLobatto, n, 0, 1.0, FluxKind::Central, &Speed::Bump);
        let norm = if inverse { EnergyNorm::InverseA } else { EnergyNorm::A };
        for (e, el) in op.elements().iter().enumerate() {
            let u = random_state(seed, e as u64, el.len());
            let lhs = aliasing_functional(el, &u, norm).abs();
            let rhs = element_gamma(el, norm) * element_norm_sq(el, &u, norm);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
        }
    }

    #[test]
    fn quadrature_integrates_random_polynomials(
        fam in family(), n in 1usize..17, coeffs in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let rule = QuadratureRule::new(fam, n).unwrap();
        let deg = fam.exactness(n);
        let c = &coeffs[..=deg.min(coeffs.len() - 1)];
        let p = |x: f64| c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
        let exact: f64 = c.iter().enumerate().map(|(k, &ck)| if k % 2 == 0 { 2.0 * ck / (k + 1) as f64 } else { 0.0 }).sum();
        prop_assert!((rule.integrate(p) - exact).abs() <= 1e-12);
    }
}

#[test]
fn violation_count_is_policy_independent() {
    let op = periodic(10, NodeFamily::GaussLobatto, 5, 0, 1.0, FluxKind::Central, &Speed::Bump);
    for norm in [EnergyNorm::A, EnergyNorm::InverseA] {
        let seq = aliasing_bound_violations(op.elements(), norm, 200, 3, Execution::Sequential);
        let par = aliasing_bound_violations(op.elements(), norm, 200, 3, Execution::Parallel);
        assert_eq!(seq, par);
    }
}
