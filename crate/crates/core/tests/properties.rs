use proptest::prelude::*;

use stark_spectrum::airy::{ai_prime, airy_eval, airy_zero, envelope};
use stark_spectrum::asymptotics::{decay_rate_fit, lambda_prediction};
use stark_spectrum::basis::basis_eval;
use stark_spectrum::experiment::parse_config;
use stark_spectrum::oracle::DiscreteOperator;
use stark_spectrum::potential::{norms, Potential};
use stark_spectrum::spectrum::{eigenvalue_count, lambda_directional_derivative, locate_eigenvalue};
use stark_spectrum::volterra::{truncation_point, Grid};

fn small_potential() -> impl Strategy<Value = Potential> {
    prop_oneof![
        (-0.5f64..0.5, 0.5f64..2.0).prop_map(|(c, a)| Potential::exp(c, a, 2.0).unwrap()),
        (-0.5f64..0.5, 2.0f64..4.0).prop_map(|(c, p)| Potential::alg(c, p, 2.0).unwrap()),
        (-0.5f64..0.5, 0.5f64..4.0, 0.3f64..2.0).prop_map(|(c, x0, w)| Potential::bump(c, x0, w, 2.0).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn airy_wronskian(w in -20.0f64..20.0) {
        let v = airy_eval(w).unwrap();
        prop_assert!((v.wronskian() * std::f64::consts::PI - 1.0).abs() < 1e-10);
    }

    #[test]
    fn envelope_is_monotone(w1 in -30.0f64..30.0, dw in 0.0f64..10.0) {
        prop_assert!(envelope(w1).unwrap().g_a >= envelope(w1 + dw).unwrap().g_a);
    }

    #[test]
    fn basis_normalisation(z in -20.0f64..60.0, x in 0.0f64..40.0) {
        prop_assume!(x - z < 60.0);
        let b = basis_eval(z, x).unwrap();
        prop_assert!((b.wronskian() - 1.0).abs() < 1e-9);
        prop_assert!((b.s0_dot - (b.c0 - b.s0_prime)).abs() <= 1e-12 * b.c0.abs().max(b.s0_prime.abs()).max(1.0));
        let o = basis_eval(z, 0.0).unwrap();
        prop_assert!(o.s0 == 0.0 && o.c0_prime == 0.0);
        prop_assert!((o.s0_prime - 1.0).abs() < 1e-14 && (o.c0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn alg_decay_needs_enough_decay(p in 1.0f64..4.0, r in 1.01f64..3.0) {
        let ok = Potential::alg(0.5, p, r).is_ok();
        prop_assert_eq!(ok, p > (r + 1.0) / 2.0);
    }

    #[test]
    fn norm_bundle_relations(q in small_potential()) {
        prop_assume!(!q.is_zero());
        let nb = norms(&q).unwrap();
        let lhs = nb.afr_norm.powi(2);
        let rhs = nb.ar_norm.powi(2) + nb.derivative_ar_norm.powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-30));
        prop_assert!(nb.l1_norm <= nb.ar_norm / (q.r() - 1.0).sqrt() * (1.0 + 1e-9));
    }

    #[test]
    fn truncation_grows_as_tolerance_shrinks(z in -10.0f64..50.0, k in 6i32..15, q in small_potential()) {
        let tol = 10f64.powi(-k);
        let a = truncation_point(&q, z, tol).unwrap();
        let b = truncation_point(&q, z, tol / 2.0).unwrap();
        prop_assert!(b >= a);
        let g = Grid::new(z, a).unwrap();
        prop_assert_eq!(g.nodes[0], 0.0);
        prop_assert!(g.nodes.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn oracle_operator_shape(l in 10.0f64..40.0, h in 0.005f64..0.05, q in small_potential()) {
        let op = DiscreteOperator::new(&q, l, h).unwrap();
        prop_assert_eq!(op.dim(), (l / h).round() as usize - 1);
        prop_assert_eq!(op.offdiag.len(), op.dim() - 1);
        prop_assert!(op.offdiag.iter().all(|&o| o == -1.0 / (h * h)));
    }

    #[test]
    fn exact_power_laws_fit(s in 0.3f64..3.0, c in 0.01f64..10.0) {
        let ns: Vec<usize> = (2..=40).collect();
        let r: Vec<f64> = ns.iter().map(|&n| c * (n as f64).powf(-s)).collect();
        let f = decay_rate_fit(&r, &ns, 1e-300).unwrap();
        prop_assert!((f.slope + s).abs() < 1e-9);
    }

    #[test]
    fn positive_tolerances_only(x in -1.0f64..1.0) {
        let text = format!(r#"{{"tolerances": {{"wronskian": {x}}}}}"#);
        prop_assert_eq!(parse_config(&text).is_ok(), x > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn eigen_records_are_consistent(q in small_potential(), n in 1usize..25) {
        let rec = locate_eigenvalue(&q, n).unwrap();
        prop_assert!(rec.bracket.0 < rec.lambda && rec.lambda < rec.bracket.1);
        prop_assert!(rec.shoot_residual <= 1e-10 * rec.psi_prime.abs());
        prop_assert!(rec.norm_sq > 0.0 && rec.norm_gap <= 1e-6);
        prop_assert!((rec.kappa - rec.kappa_alt).abs() <= 1e-6);
        // Sturm counting brackets the index exactly
        prop_assert_eq!(eigenvalue_count(&q, rec.lambda - 1e-6).unwrap(), n - 1);
        prop_assert_eq!(eigenvalue_count(&q, rec.lambda + 1e-6).unwrap(), n);
    }

    #[test]
    fn eigenvalues_increase_with_q(c in 0.05f64..0.5, n in 1usize..20) {
        let a = locate_eigenvalue(&Potential::exp(c, 1.0, 2.0).unwrap(), n).unwrap().lambda;
        let b = locate_eigenvalue(&Potential::exp(c + 0.05, 1.0, 2.0).unwrap(), n).unwrap().lambda;
        prop_assert!(-airy_zero(n).unwrap().a_n < a && a < b);
    }

    #[test]
    fn eigenvalue_gradient_is_linear_in_direction(k in -3.0f64..3.0, n in 1usize..15) {
        prop_assume!(k.abs() > 0.1);
        let q = Potential::bump(0.3, 2.0, 1.0, 2.0).unwrap();
        let v = Potential::exp(1.0, 1.0, 2.0).unwrap();
        let d1 = lambda_directional_derivative(&q, n, &v).unwrap();
        let dk = lambda_directional_derivative(&q, n, &v.scaled(k)).unwrap();
        prop_assert!((dk - k * d1).abs() <= 1e-10 * d1.abs().max(1e-6));
    }
}

/// The first-order formula uses π(-a_n)^{-1/2} where the exact linearisation at
/// q = 0 has 1/Ai'(a_n)², so its remainder carries a term linear in the coupling.
/// Once that term is removed the rest is quadratic.
#[test]
fn remainders_are_second_order_in_the_coupling() {
    for n in [3usize, 6, 12] {
        let a = airy_zero(n).unwrap().a_n;
        let d = ai_prime(a);
        let split = |c: f64| {
            let q = Potential::exp(c, 1.0, 2.0).unwrap();
            let pred = lambda_prediction(&q, n).unwrap();
            let integral = (pred + a) * (-a).sqrt() / std::f64::consts::PI;
            let linear = integral / (d * d) - (pred + a);
            let rem = locate_eigenvalue(&q, n).unwrap().lambda - pred;
            (rem, rem - linear)
        };
        let (full, quad_hi) = split(0.3);
        let (_, quad_lo) = split(0.15);
        let ratio = quad_lo / quad_hi;
        assert!(
            (ratio - 0.25).abs() <= 0.2 * 0.25,
            "n={n}: quadratic part ratio {ratio}"
        );
        assert!((full - quad_hi).abs() > 0.0);
    }
}
