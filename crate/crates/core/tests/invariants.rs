use cmdeg_kit::catalog::CatalogFunction;
use cmdeg_kit::cmdeg::{cm_check, psi_capital};
use cmdeg_kit::inequalities::{poly_lower_bound, rational_bound, sandwich_upper};
use cmdeg_kit::kernel::{h_chain, q_deriv, sigma_deriv};
use cmdeg_kit::polygamma::polygamma;
use cmdeg_kit::series::{q_coefficient, theta_taylor_coefficient};
use cmdeg_kit::{EvalContext, Grid};
use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polygamma_alternates_and_decays(n in 1u32..=6, x in 0.05f64..200.0) {
        let ctx = EvalContext::default();
        let v = polygamma(n, x, &ctx).unwrap();
        let w = polygamma(n, x * 1.1, &ctx).unwrap();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        prop_assert!(sign * v > 0.0);
        prop_assert!(sign * w < sign * v);
    }

    #[test]
    fn sigma_branches_meet(k in 1u32..=4, eps in 1e-13f64..1e-10) {
        let ctx = EvalContext::default();
        let r = ctx.series_radius();
        let inner = sigma_deriv(k, r - eps, &ctx).unwrap();
        let outer = sigma_deriv(k, r + eps, &ctx).unwrap();
        prop_assert!((inner - outer).abs() <= 1e-9 * inner.abs().max(1.0));
    }

    #[test]
    fn kernel_fourth_derivative_positive(t in 1e-3f64..60.0) {
        prop_assert!(q_deriv(4, t, &EvalContext::default()).unwrap() > 0.0);
    }

    #[test]
    fn h_chain_nonnegative(s in 1e-3f64..150.0) {
        let c = h_chain(s).unwrap().values();
        prop_assert!(c.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn sandwich_holds(x in 1e-2f64..1e3) {
        let ctx = EvalContext::default();
        let psi = psi_capital(x, &ctx).unwrap();
        prop_assert!(poly_lower_bound(x) < psi);
        prop_assert!(rational_bound(x, 0.0) < psi);
        prop_assert!(psi < sandwich_upper(x));
    }

    #[test]
    fn power_function_degree_is_exponent(a in 0.5f64..4.0, delta in 0.2f64..1.0) {
        let ctx = EvalContext::default();
        let grid = Grid::log(0.1, 10.0, 40).unwrap();
        let f = CatalogFunction::PowerNeg(a);
        prop_assert!(cm_check(&f, a, 6, &grid, &ctx).unwrap().verdict.is_pass());
        prop_assert!(!cm_check(&f, a + delta, 6, &grid, &ctx).unwrap().verdict.is_pass());
    }
}

#[test]
fn q_table_is_divisible_by_six_and_grows() {
    let six = BigInt::from(6);
    let mut prev = BigInt::from(0);
    for k in 5..=60 {
        let q = q_coefficient(k);
        assert!(q.is_positive());
        assert_eq!(&q % &six, BigInt::from(0));
        assert!(q > prev, "Q({k}) does not exceed Q({})", k - 1);
        prev = q;
    }
}

#[test]
fn theta_vanishes_to_fourth_order() {
    for k in 0..5 {
        assert_eq!(theta_taylor_coefficient(k), BigInt::from(0), "coefficient {k}");
    }
    assert!(theta_taylor_coefficient(5) != BigInt::from(0));
}
