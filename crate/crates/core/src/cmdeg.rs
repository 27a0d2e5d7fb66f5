//! `Ψ(x) = [ψ'(x)]² + ψ''(x)`, the family `f_α(x) = x^α Ψ(x)`, and sampled
//! complete-monotonicity checks.
//!
//! A function `f` is completely monotonic on `(0, ∞)` when
//! `(-1)ᵏ f⁽ᵏ⁾(x) >= 0` for all `k >= 0`; its completely monotonic degree is
//! the supremum of `r` such that `x^r f(x)` stays completely monotonic.
//! The checks here are necessary conditions only: finite order on a finite
//! grid. A passing report means "consistent with complete monotonicity up to
//! order K on this grid".

use std::cell::Cell;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{CatalogFunction, MAX_ORDER};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};
use crate::kernel::q_deriv;
use crate::polygamma::polygamma_jet;
use crate::quad;

/// Relative slack for sign verdicts: `v >= -SIGN_TOL · max(1, scale)`.
pub const SIGN_TOL: f64 = 1e-12;

/// Default derivative order for [`cm_check`].
pub const DEFAULT_ORDER: usize = 12;

/// Bisection cap for [`degree_estimate`].
pub const MAX_BISECTIONS: usize = 60;

/// `q'''(0)`, the constant term in `x⁴Ψ(x) = 1/12 + ∫₀^∞ q⁗(t) e^{-xt} dt`.
pub const Q3_AT_ZERO: f64 = 1.0 / 12.0;

/// `Ψ(x)`.
pub fn psi_capital(x: f64, ctx: &EvalContext) -> Result<f64> {
    check_x(x)?;
    let p = polygamma_jet(2, x, ctx)?;
    Ok(p[0] * p[0] + p[1])
}

/// `x^α Ψ(x)`.
pub fn f_alpha(x: f64, alpha: f64, ctx: &EvalContext) -> Result<f64> {
    Ok(x.powf(alpha) * psi_capital(x, ctx)?)
}

/// `φ(x) = -x Ψ'(x)/Ψ(x) = -x[2ψ'ψ'' + ψ'''](x)/Ψ(x)`.
///
/// `f_α' <= 0` at `x` exactly when `α <= φ(x)`, and `φ(x) → 4` as `x → ∞`.
pub fn phi(x: f64, ctx: &EvalContext) -> Result<f64> {
    let jet = CatalogFunction::Psi.alpha_jet(0.0, 1, x, ctx)?;
    Ok(-x * jet[1].value / jet[0].value)
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite and positive, got {x}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass { Verdict::Pass } else { Verdict::Fail }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// A grid point and derivative order at which the sign condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub x: f64,
    pub k: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CMReport {
    pub function: String,
    pub alpha: f64,
    pub order: usize,
    pub grid: GridSpec,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub tolerance: f64,
}

impl CMReport {
    /// Lowest derivative order with a witness.
    pub fn first_failing_order(&self) -> Option<usize> {
        self.witnesses.iter().map(|w| w.k).min()
    }

    /// Verdict restricted to orders `0..=k`.
    pub fn passes_up_to(&self, k: usize) -> bool {
        self.witnesses.iter().all(|w| w.k > k)
    }
}

/// `true` when `(-1)ᵏ v` counts as nonnegative given the magnitude `scale`
/// of the terms that produced `v`.
pub fn sign_ok(k: usize, value: f64, scale: f64) -> bool {
    let signed = if k % 2 == 0 { value } else { -value };
    signed >= -SIGN_TOL * scale.max(1.0)
}

/// Checks `(-1)ᵏ dᵏ[x^α f](x) >= 0` for `k = 0..=order` at every grid node.
///
/// Witnesses are ordered by grid index, then by `k`.
pub fn cm_check(
    f: &CatalogFunction,
    alpha: f64,
    order: usize,
    grid: &Grid,
    ctx: &EvalContext,
) -> Result<CMReport> {
    if order < 1 {
        return Err(Error::Domain("cm_check needs order >= 1".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
    }
    let per_node: Vec<Vec<Witness>> = grid
        .nodes()
        .par_iter()
        .map(|&x| {
            let jet = f.alpha_jet(alpha, order, x, ctx)?;
            Ok(jet
                .iter()
                .enumerate()
                .filter(|(k, t)| !sign_ok(*k, t.value, t.scale))
                .map(|(k, t)| Witness { x, k, value: t.value })
                .collect())
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = per_node.into_iter().flatten().collect();
    Ok(CMReport {
        function: f.to_string(),
        alpha,
        order,
        grid: grid.spec(),
        verdict: Verdict::from_pass(witnesses.is_empty()),
        witnesses,
        tolerance: SIGN_TOL,
    })
}

/// Bisection bracket for the completely monotonic degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeEstimate {
    pub function: String,
    pub lo: f64,
    pub hi: f64,
    pub order: usize,
    pub grid: GridSpec,
    pub iterations: usize,
    pub tol: f64,
}

impl DegreeEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, r: f64) -> bool {
        self.lo <= r && r <= self.hi
    }
}

/// Bisects on `α` between a passing `lo` and a failing `hi` until
/// `hi - lo <= tol`. The bracket keeps `cm_check` passing at `lo` and failing at `hi`.
pub fn degree_estimate(
    f: &CatalogFunction,
    lo: f64,
    hi: f64,
    tol: f64,
    order: usize,
    grid: &Grid,
    ctx: &EvalContext,
) -> Result<DegreeEstimate> {
    if !(lo < hi) {
        return Err(Error::BracketInvalid(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let passes = |alpha: f64| -> Result<bool> { Ok(cm_check(f, alpha, order, grid, ctx)?.verdict.is_pass()) };
    if !passes(lo)? {
        return Err(Error::BracketInvalid(format!("{f}: check fails at lower end α = {lo}")));
    }
    if passes(hi)? {
        return Err(Error::BracketInvalid(format!("{f}: check passes at upper end α = {hi}")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut iterations = 0;
    while hi - lo > tol {
        if iterations == MAX_BISECTIONS {
            return Err(Error::NonConvergence(iterations));
        }
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(DegreeEstimate {
        function: f.to_string(),
        lo,
        hi,
        order,
        grid: grid.spec(),
        iterations,
        tol,
    })
}

/// Both sides of `x⁴Ψ(x) = 1/12 + ∫₀^∞ q⁗(t) e^{-xt} dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCheck {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub horizon: f64,
    /// Estimated `∫_T^∞` contribution relative to the right-hand side.
    pub tail_estimate: f64,
    pub tail_warning: bool,
}

/// `lhs = x⁴Ψ(x)` from the polygamma evaluator; `rhs` by quadrature of the
/// kernel over `[0, ctx.horizon_for(x)]`.
pub fn laplace_identity_check(x: f64, ctx: &EvalContext) -> Result<LaplaceCheck> {
    check_x(x)?;
    let lhs = x.powi(4) * psi_capital(x, ctx)?;
    let horizon = ctx.horizon_for(x);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |t: f64| match q_deriv(4, t, ctx) {
        Ok(q) => q * (-x * t).exp(),
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let integral = quad::integrate_with_breaks(
        integrand,
        &quad::laplace_breaks(x, horizon),
        ctx.quad_rel_tol(),
        0.0,
        quad::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let rhs = Q3_AT_ZERO + integral.value;
    // q⁗ is positive and slowly varying at the horizon, so its Laplace tail is
    // about q⁗(T) e^{-xT}/x.
    let tail_estimate = q_deriv(4, horizon, ctx)? * (-x * horizon).exp() / x / rhs;
    Ok(LaplaceCheck {
        x,
        lhs,
        rhs,
        rel_err: ((lhs - rhs) / lhs).abs(),
        horizon,
        tail_estimate,
        tail_warning: tail_estimate > ctx.quad_rel_tol(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::richardson_diff;
    use proptest::prelude::*;

    const PSI_1: f64 = 0.301_694_277_958_656_9;

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn psi_at_one() {
        // (π²/6)² - 2ζ(3)
        let zeta3 = 1.202_056_903_159_594_2;
        let expected = (std::f64::consts::PI.powi(2) / 6.0).powi(2) - 2.0 * zeta3;
        let v = psi_capital(1.0, &ctx()).unwrap();
        assert!((v - expected).abs() < 1e-14);
        assert!((v - PSI_1).abs() < 1e-15);
    }

    #[test]
    fn psi_positive_and_quartic_decay() {
        let c = ctx();
        for &x in &[0.1, 1.0, 10.0, 100.0] {
            assert!(psi_capital(x, &c).unwrap() > 0.0);
        }
        let v = 200f64.powi(4) * psi_capital(200.0, &c).unwrap();
        assert!((v - 1.0 / 12.0).abs() <= 1e-3);
    }

    #[test]
    fn f_alpha_identities() {
        let c = ctx();
        assert_eq!(f_alpha(3.0, 0.0, &c).unwrap(), psi_capital(3.0, &c).unwrap());
        assert_eq!(f_alpha(1.0, 4.0, &c).unwrap(), psi_capital(1.0, &c).unwrap());
        let v = f_alpha(10.0, 4.0, &c).unwrap();
        assert!((v - 1e4 * psi_capital(10.0, &c).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn phi_limit_and_rate() {
        let c = ctx();
        let d: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&x| (phi(x, &c).unwrap() - 4.0).abs()).collect();
        assert!(d[2] <= 0.05);
        assert!(d[0] > d[1] && d[1] > d[2]);
        // φ(x) ≈ 4 + 2/x
        assert!((phi(1000.0, &c).unwrap() - 4.001_999_064_267_459).abs() < 1e-10);
        assert!((phi(10.0, &c).unwrap() - 4.1884).abs() < 1e-3);
    }

    #[test]
    fn phi_matches_polygamma_formula() {
        let c = ctx();
        for &x in &[0.3, 1.0, 5.0] {
            let p = polygamma_jet(3, x, &c).unwrap();
            let direct = -x * (2.0 * p[0] * p[1] + p[2]) / (p[0] * p[0] + p[1]);
            assert!(((phi(x, &c).unwrap() - direct) / direct).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_derivatives_match_finite_differences() {
        let c = ctx();
        for &x in &[0.5, 2.0, 10.0] {
            let jet = CatalogFunction::Psi.jet(4, x, &c).unwrap();
            for k in 1..=4u32 {
                let h = [0.002, 0.005, 0.01, 0.02][k as usize - 1] * x;
                let fd = richardson_diff(|s| psi_capital(s, &c).unwrap(), x, k, h);
                let exact = jet[k as usize].value;
                assert!(((fd - exact) / exact).abs() < 1e-5, "k={k} x={x}: {exact} vs {fd}");
            }
        }
    }

    #[test]
    fn main_function_passes_at_four() {
        let r = cm_check(&CatalogFunction::Psi, 4.0, 10, &Grid::default_check(), &ctx()).unwrap();
        assert!(r.verdict.is_pass(), "{:?}", &r.witnesses[..r.witnesses.len().min(5)]);
        assert_eq!(r.grid.points, 400);
    }

    #[test]
    fn main_function_fails_above_four() {
        let grid = Grid::log(1.0, 1e5, 400).unwrap();
        let r = cm_check(&CatalogFunction::Psi, 4.5, 1, &grid, &ctx()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_failing_order(), Some(1));
        // φ(x) < 4.5 roughly for x > 4
        assert!(r.witnesses.iter().all(|w| w.x > 2.0));
    }

    #[test]
    fn witness_moves_out_as_excess_shrinks() {
        let c = ctx();
        let grid = Grid::log(0.01, 1e6, 400).unwrap();
        let mut previous = 1.0;
        for eps in [1.0, 0.5, 0.25] {
            let r = cm_check(&CatalogFunction::Psi, 4.0 + eps, 4, &grid, &c).unwrap();
            assert_eq!(r.first_failing_order(), Some(1));
            // φ peaks near x = 1 and tends to 4 at both ends; follow the large-x branch.
            let first_x = r
                .witnesses
                .iter()
                .filter(|w| w.k == 1 && w.x > 1.0)
                .map(|w| w.x)
                .fold(f64::INFINITY, f64::min);
            assert!(first_x > previous, "ε={eps}: {first_x} <= {previous}");
            previous = first_x;
        }
    }

    #[test]
    fn nesting_in_alpha_and_order() {
        let c = ctx();
        let grid = Grid::log(0.01, 100.0, 60).unwrap();
        for alpha in [0.0, 2.0, 4.0] {
            assert!(cm_check(&CatalogFunction::Psi, alpha, 8, &grid, &c).unwrap().verdict.is_pass());
        }
        let r = cm_check(&CatalogFunction::Psi, 6.0, 8, &grid, &c).unwrap();
        let first = r.first_failing_order().unwrap();
        for k in 0..first {
            assert!(r.passes_up_to(k));
            let lower = cm_check(&CatalogFunction::Psi, 6.0, k.max(1), &grid, &c).unwrap();
            assert_eq!(lower.verdict.is_pass(), k.max(1) < first);
        }
    }

    #[test]
    fn degree_of_main_function() {
        let est = degree_estimate(&CatalogFunction::Psi, 0.0, 8.0, 0.1, 6, &Grid::default_degree(), &ctx()).unwrap();
        assert!(est.width() <= 0.1);
        assert!(est.contains(4.0), "{est:?}");
        assert!((3.8..=4.2).contains(&est.midpoint()));
    }

    #[test]
    fn degree_of_elementary_functions() {
        let c = ctx();
        let grid = Grid::default_degree();
        let inv = degree_estimate(&CatalogFunction::InvX, 0.0, 3.0, 0.05, 6, &grid, &c).unwrap();
        assert!(inv.contains(1.0), "{inv:?}");
        let exp = degree_estimate(&CatalogFunction::ExpNeg, -1.0, 2.0, 0.05, 6, &grid, &c).unwrap();
        assert!(exp.contains(0.0), "{exp:?}");
    }

    #[test]
    fn degree_rejects_bad_brackets() {
        let c = ctx();
        let grid = Grid::log(0.01, 100.0, 40).unwrap();
        assert!(matches!(
            degree_estimate(&CatalogFunction::Psi, 5.0, 8.0, 0.1, 2, &grid, &c),
            Err(Error::BracketInvalid(_))
        ));
        assert!(matches!(
            degree_estimate(&CatalogFunction::Psi, 0.0, 1.0, 0.1, 2, &grid, &c),
            Err(Error::BracketInvalid(_))
        ));
        assert!(matches!(
            degree_estimate(&CatalogFunction::Psi, 1.0, 1.0, 0.1, 2, &grid, &c),
            Err(Error::BracketInvalid(_))
        ));
    }

    #[test]
    fn order_cap_is_enforced() {
        let grid = Grid::log(1.0, 2.0, 2).unwrap();
        assert!(matches!(
            cm_check(&CatalogFunction::Psi, 0.0, MAX_ORDER + 1, &grid, &ctx()),
            Err(Error::OrderTooHigh { .. })
        ));
    }

    #[test]
    fn laplace_identity_small_x() {
        let c = ctx();
        for x in [1.0, 5.0] {
            let r = laplace_identity_check(x, &c).unwrap();
            assert!(r.rel_err <= 1e-6, "x={x}: {r:?}");
            assert!(!r.tail_warning);
        }
    }

    #[test]
    fn laplace_transform_part_is_positive_and_decreasing() {
        let c = ctx();
        let parts: Vec<f64> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| laplace_identity_check(x, &c).unwrap().rhs - Q3_AT_ZERO)
            .collect();
        assert!(parts.iter().all(|p| *p > 0.0));
        assert!(parts.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn laplace_residual_tightens_with_tolerance() {
        let loose = ctx().with_quad_rel_tol(1e-8).unwrap();
        let tight = ctx().with_quad_rel_tol(1e-10).unwrap();
        let a = laplace_identity_check(2.0, &loose).unwrap().rel_err;
        let b = laplace_identity_check(2.0, &tight).unwrap().rel_err;
        assert!(b <= a, "{b} > {a}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn psi_is_positive(x in 0.01f64..1e4) {
            prop_assert!(psi_capital(x, &ctx()).unwrap() > 0.0);
        }

        #[test]
        fn x4_psi_lies_between_zero_and_limit_plus(x in 0.05f64..1e3) {
            // x⁴Ψ decreases towards 1/12 from above
            let v = f_alpha(x, 4.0, &ctx()).unwrap();
            prop_assert!(v > 1.0 / 12.0);
        }
    }
}
