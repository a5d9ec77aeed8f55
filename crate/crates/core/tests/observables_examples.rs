use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use driven_exciton::model::{coeff_u, coeff_u_j, coeff_v_j, coeff_w, steady_state_w};
use driven_exciton::observables::*;
use driven_exciton::oracle::{oracle_decoherence_factor, BathGrid, fastest_rate, STEP_RULE};
use driven_exciton::params::{Fig2Variant, SystemParams};
use driven_exciton::units::HBAR_MEV_FS;
use num_complex::Complex64;
use proptest::prelude::*;

fn at(p: &SystemParams, gammas: f64) -> f64 {
    gammas * p.quasimode_lifetime_fs()
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn one() -> Complex64 {
    re(1.0)
}

#[test]
fn mean_number_examples() {
    let p = SystemParams::fig1();
    let alpha = re(10f64.sqrt());
    assert!((mean_number(&p, alpha, 0.0) - 10.0).abs() < 1e-12);
    let q = p.with_xi(0.0);
    for k in 0..20 {
        let t = at(&q, 0.5 * k as f64);
        let n = mean_number(&q, alpha, t);
        assert!((n - 10.0 * coeff_u(&q, t).norm_sqr()).abs() < 1e-12);
    }
    let t = at(&p, 50.0);
    let plateau = steady_state_w(&p).norm_sqr();
    assert!((mean_number(&p, alpha, t) - plateau).abs() < 0.01 * plateau);
    assert!(mean_number(&q, alpha, t) < 1e-3 * 10.0);
}

#[test]
fn product_state_examples() {
    let p = SystemParams::fig1();
    let grid = BathGrid::with_multiplier(&p, 101, 20.0).unwrap();
    let alpha = Complex64::new(1.0, 2.0);
    let s = evolve_product_state(&p, alpha, &grid, 0.0, PhasePolicy::Envelope);
    assert_eq!(s.exciton_label, alpha);
    assert!(s.field_labels.iter().all(|z| z.norm() == 0.0));
    assert_eq!(s.prefactor_phase, one());

    let vac = p.with_xi(0.0);
    for k in 0..10 {
        let t = at(&p, 0.6 * k as f64);
        let s = evolve_product_state(&vac, re(0.0), &grid, t, PhasePolicy::Full);
        assert_eq!(s.exciton_label.norm(), 0.0);
        assert!(s.field_labels.iter().all(|z| z.norm() == 0.0));
    }
}

#[test]
fn full_phase_policy_only_rotates_labels() {
    let p = SystemParams::fig2();
    let grid = BathGrid::with_multiplier(&p, 101, 20.0).unwrap();
    let t = at(&p, 0.7);
    let env = evolve_product_state(&p, re(2.0), &grid, t, PhasePolicy::Envelope);
    let full = evolve_product_state(&p, re(2.0), &grid, t, PhasePolicy::Full);
    assert!((env.exciton_label.norm() - full.exciton_label.norm()).abs() < 1e-12);
    assert_eq!(env.prefactor_phase, full.prefactor_phase);
}

#[test]
fn cat_state_examples() {
    let p = SystemParams::fig2();
    let grid = BathGrid::with_multiplier(&p, 101, 20.0).unwrap();
    let cat = CatSpec::phase_shift(re(3.0), FRAC_PI_2, one(), one()).unwrap();
    let (b1, b2) = evolve_cat_state(&p, &cat, &grid, 0.0, PhasePolicy::Envelope);
    assert_eq!((b1.prefactor_phase, b2.prefactor_phase), (one(), one()));
    assert_eq!((b1.exciton_label, b2.exciton_label), (cat.alpha1, cat.alpha2));

    let q = p.with_xi(0.0);
    for k in 0..10 {
        let (b1, b2) = evolve_cat_state(&q, &cat, &grid, at(&q, 0.5 * k as f64), PhasePolicy::Envelope);
        assert_eq!((b1.prefactor_phase, b2.prefactor_phase), (one(), one()));
    }
}

#[test]
fn cat_branches_conserve_norm_on_converged_grid() {
    let p = SystemParams::fig2();
    let grid = BathGrid::with_multiplier(&p, 16_001, 200.0).unwrap();
    let cat = CatSpec::phase_shift(re(10f64.sqrt()), PI, one(), one()).unwrap();
    for k in 0..=10 {
        let t = at(&p, 0.5 * k as f64);
        for alpha in [cat.alpha1, cat.alpha2] {
            let r = sum_rule_residual(&p, alpha, &grid, t);
            assert!(r.abs() < 1e-6, "t = {}/Γ: residual {r:e}", 0.5 * k as f64);
        }
    }
}

#[test]
fn decoherence_factor_examples() {
    let p = SystemParams::fig2();
    let alpha = re(10f64.sqrt());
    assert_eq!(decoherence_factor(&p, alpha, -alpha, 0.0), one());
    let q = p.with_xi(0.0);
    for k in 1..20 {
        let t = at(&q, 0.25 * k as f64);
        let f = decoherence_factor(&q, alpha, -alpha, t);
        let expect = (-2.0 * 10.0 * (1.0 - coeff_u(&q, t).norm_sqr())).exp();
        assert!(f.im.abs() < 1e-15 && f.re > 0.0);
        assert!((f.re - expect).abs() < 1e-15);
    }
}

#[test]
fn decoherence_factor_matches_overlap_oracle_at_short_time() {
    let p = SystemParams::fig2();
    let grid = BathGrid::default_for(&p);
    let cat = CatSpec::phase_shift(re(10f64.sqrt()), PI, one(), one()).unwrap();
    let t = at(&p, 0.1);
    let dt = STEP_RULE * HBAR_MEV_FS / fastest_rate(&p, Some(grid.window));
    let oracle = oracle_decoherence_factor(&p, &grid, &cat, t, dt).unwrap();
    let f = decoherence_factor(&p, cat.alpha1, cat.alpha2, t);
    assert!((f - oracle).norm() < 1e-3, "{f} vs {oracle}");
}

#[test]
fn phase_matches_overlap_oracle() {
    let p = SystemParams::fig2_variant(Fig2Variant::B, 10.0);
    let grid = BathGrid::default_for(&p);
    let alpha = re(10f64.sqrt());
    let cat = CatSpec::phase_shift(alpha, PI, one(), one()).unwrap();
    let t = at(&p, 1.0);
    let dt = STEP_RULE * HBAR_MEV_FS / fastest_rate(&p, Some(grid.window));
    let oracle = oracle_decoherence_factor(&p, &grid, &cat, t, dt).unwrap();
    let phi = phase_phi(&p, alpha, t);
    let diff = (phi - oracle.arg()).rem_euclid(2.0 * PI);
    assert!(diff.min(2.0 * PI - diff) < 1e-3, "φ = {phi}, arg = {}", oracle.arg());
}

#[test]
fn decoherence_norm_examples() {
    let p = SystemParams::fig2();
    let alpha = re(10f64.sqrt());
    assert_eq!(decoherence_norm(&p, alpha, PI, 0.0, NormForm::Exact), 1.0);
    let d = cat_distance(alpha, -alpha);
    let late = decoherence_norm(&p, alpha, PI, at(&p, 50.0), NormForm::Exact);
    assert!((late - (-0.5 * d * d).exp()).abs() < 1e-6);
    for k in 0..10 {
        assert_eq!(decoherence_norm(&p, alpha, 0.0, at(&p, k as f64), NormForm::Exact), 1.0);
    }
    // The short-time law is an approximation and stays behind its flag.
    let s = decoherence_norm(&p, alpha, PI, at(&p, 0.01), NormForm::ShortTime);
    assert!(s > 0.0 && s < 1.0);
}

#[test]
fn decoherence_time_examples() {
    let gamma = 0.05;
    let tau_p = HBAR_MEV_FS / gamma;
    let alpha = re(10f64.sqrt());
    let t = decoherence_time(alpha, PI, gamma).unwrap();
    assert!((t - tau_p / 20.0).abs() < 1e-9 * t);
    let t2 = decoherence_time(alpha * 2.0, PI, gamma).unwrap();
    assert_eq!(t2, t / 4.0);
    assert!(matches!(decoherence_time(alpha, 0.0, gamma), Err(ObservableError::NoDecoherence)));
    assert!(decoherence_time(alpha, PI, 0.0).is_err());
}

#[test]
fn decoherence_time_ignores_drive_and_detuning() {
    let alpha = re(10f64.sqrt());
    let cat = CatSpec::phase_shift(alpha, FRAC_PI_4, one(), one()).unwrap();
    let base = DecoherenceReport::new(&SystemParams::fig2(), &cat, 0.0).tau_d;
    for (xi, delta) in [(0.0, 0.0), (5.0, 0.5), (10.0, 1.0), (40.0, -3.0)] {
        let p = SystemParams::fig2().with_xi(xi).with_delta(delta);
        assert_eq!(DecoherenceReport::new(&p, &cat, 0.0).tau_d, base);
    }
    let direct = decoherence_time(alpha, FRAC_PI_4, 20.0).unwrap();
    assert!((base.unwrap() - direct).abs() < 1e-12 * direct);
}

#[test]
fn cat_distance_examples() {
    let a = Complex64::new(0.3, -1.2);
    assert_eq!(cat_distance(a, a), 0.0);
    let s = re(10f64.sqrt());
    assert!((cat_distance(s, -s) - 2.0 * 10f64.sqrt()).abs() < 1e-15);
    let c = CatSpec::phase_shift(one(), FRAC_PI_2, one(), one()).unwrap();
    assert!((c.distance() - 2f64.sqrt()).abs() < 1e-15);
    assert!((c.dphi().unwrap() - FRAC_PI_2).abs() < 1e-15);
    assert!(CatSpec::new(re(0.0), re(0.0), one(), one()).is_err());
}

#[test]
fn phase_examples() {
    let p = SystemParams::fig2_variant(Fig2Variant::A, 5.0);
    let alpha = re(10f64.sqrt());
    for k in 0..50 {
        let t = at(&p, 0.1 * k as f64);
        assert_eq!(phase_phi(&p.with_xi(0.0), alpha, t), 0.0);
        assert_eq!(phase_phi(&p.with_xi(10.0), alpha, t), 2.0 * phase_phi(&p, alpha, t));
    }
    let b = SystemParams::fig2_variant(Fig2Variant::B, 10.0);
    let c = SystemParams::fig2_variant(Fig2Variant::C, 10.0);
    let t = at(&b, 1.3);
    assert!((phase_phi(&b, alpha, t) - phase_phi(&c, alpha, t)).abs() > 1e-6);
}

#[test]
fn sum_rule_trivial_cases() {
    let p = SystemParams::fig1();
    let grid = BathGrid::with_multiplier(&p, 101, 20.0).unwrap();
    assert_eq!(sum_rule_residual(&p, re(3.0), &grid, 0.0), 0.0);
    let q = p.with_xi(0.0);
    for k in 0..10 {
        assert_eq!(sum_rule_residual(&q, re(0.0), &grid, at(&q, 0.5 * k as f64)), 0.0);
    }
}

#[test]
fn report_fields() {
    let p = SystemParams::fig2();
    let cat = CatSpec::phase_shift(re(2.0), PI, one(), one()).unwrap();
    let r = DecoherenceReport::new(&p, &cat, at(&p, 0.4));
    assert!((r.f_norm - r.f_complex.norm()).abs() < 1e-15);
    assert_eq!(r.d_distance, 4.0);
    let json = serde_json::to_value(r).unwrap();
    assert!(json["f_complex"].is_array());
    let same = CatSpec::new(one(), one(), re(2.0), re(2.0)).unwrap();
    assert_eq!(DecoherenceReport::new(&p, &same, 1.0).tau_d, None);
}

fn params_strategy() -> impl Strategy<Value = SystemParams> {
    (0.01f64..40.0, 0.0f64..40.0, 0.0f64..40.0, -5.0f64..5.0).prop_map(|(g, m, xi, d)| {
        SystemParams::new(1500.0, g, m, xi, d).unwrap()
    })
}

fn complex_strategy() -> impl Strategy<Value = Complex64> {
    (-4.0f64..4.0, -4.0f64..4.0).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn factor_norm_identity(p in params_strategy(), a1 in complex_strategy(), a2 in complex_strategy(), tg in 0.0f64..20.0) {
        let t = tg * p.quasimode_lifetime_fs();
        let f = decoherence_factor(&p, a1, a2, t);
        let d = cat_distance(a1, a2);
        let expect = (-0.5 * d * d * (1.0 - coeff_u(&p, t).norm_sqr())).exp();
        prop_assert!((f.norm() - expect).abs() < 1e-12);
        prop_assert!(f.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn norm_independent_of_drive(p in params_strategy(), a1 in complex_strategy(), a2 in complex_strategy(), tg in 0.0f64..20.0) {
        let t = tg * p.quasimode_lifetime_fs();
        let cat = CatSpec::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), a1, a2).unwrap();
        let with = DecoherenceReport::new(&p, &cat, t).f_norm;
        let without = DecoherenceReport::new(&p.with_xi(0.0), &cat, t).f_norm;
        prop_assert_eq!(with.to_bits(), without.to_bits());
        // |F| recomputed from the complex value carries one more rounding.
        let f = decoherence_factor(&p, a1, a2, t);
        prop_assert!((f.norm() - with).abs() <= 4.0 * f64::EPSILON * with);
    }

    #[test]
    fn phase_of_antipodal_cat(p in params_strategy(), a in complex_strategy(), tg in 0.0f64..5.0) {
        let t = tg * p.quasimode_lifetime_fs();
        let f = decoherence_factor(&p, a, -a, t);
        prop_assume!(f.norm() > 1e-250);
        let phi = phase_phi(&p, a, t);
        let diff = (phi - f.arg()).rem_euclid(2.0 * PI);
        prop_assert!(diff.min(2.0 * PI - diff) < 1e-12 * phi.abs().max(1.0));
    }

    #[test]
    fn population_non_negative(p in params_strategy(), a in complex_strategy(), tg in 0.0f64..50.0) {
        let t = tg * p.quasimode_lifetime_fs();
        prop_assert!(mean_number(&p, a, t) >= 0.0);
        let label = a * coeff_u(&p, t) + coeff_w(&p, t);
        prop_assert!((mean_number(&p, a, t) - label.norm_sqr()).abs() < 1e-9 * (1.0 + label.norm_sqr()));
    }

    #[test]
    fn phase_linear_in_drive(p in params_strategy(), a in complex_strategy(), tg in 0.0f64..10.0) {
        let t = tg * p.quasimode_lifetime_fs();
        prop_assert_eq!(phase_phi(&p.with_xi(2.0 * p.xi), a, t), 2.0 * phase_phi(&p, a, t));
    }

    #[test]
    fn mode_amplitudes_linear_in_coupling(p in params_strategy(), eps in -50.0f64..50.0, tg in 0.0f64..5.0) {
        let t = tg * p.quasimode_lifetime_fs();
        let om = p.omega0 + eps;
        prop_assert_eq!(coeff_u_j(&p, om, 0.2, t), coeff_u_j(&p, om, 0.1, t) * 2.0);
        prop_assert_eq!(coeff_v_j(&p, om, 0.2, t).value, coeff_v_j(&p, om, 0.1, t).value * 2.0);
    }
}
