//! Strong complete monotonicity.
//!
//! `f` is strongly completely monotonic when `(-1)ⁿ xⁿ⁺¹ f⁽ⁿ⁾(x)` is
//! nonnegative and decreasing on `(0, ∞)` for every `n >= 0`; this holds
//! exactly when `x f(x)` is completely monotonic. "Decreasing" is checked in
//! the weak sense on adjacent grid pairs.

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{CatalogFunction, Term, MAX_ORDER};
use crate::cmdeg::{cm_check, sign_ok, CMReport, Verdict, Witness, SIGN_TOL};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// `gₙ(x) = (-1)ⁿ xⁿ⁺¹ f⁽ⁿ⁾(x)` for `n = 0..=order`.
fn weighted_jet(f: &CatalogFunction, order: usize, x: f64, ctx: &EvalContext) -> Result<Vec<Term>> {
    let jet = f.jet(order, x, ctx)?;
    Ok(jet
        .iter()
        .enumerate()
        .map(|(n, t)| {
            let w = if n % 2 == 0 { 1.0 } else { -1.0 } * x.powi(n as i32 + 1);
            Term { value: w * t.value, scale: (w * t.scale).abs() }
        })
        .collect())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
    }
    Ok(())
}

/// Nonnegativity of every `gₙ` at every node, and `gₙ(x_{i+1}) <= gₙ(x_i)`
/// for adjacent nodes. A monotonicity witness carries the increase
/// `gₙ(x_{i+1}) - gₙ(x_i)` at `x_{i+1}`.
///
/// The report's `alpha` is 1: the weights are those of `x f(x)`.
pub fn strongly_cm_check(f: &CatalogFunction, order: usize, grid: &Grid, ctx: &EvalContext) -> Result<CMReport> {
    check_order(order)?;
    let rows: Vec<Vec<Term>> = grid
        .nodes()
        .par_iter()
        .map(|&x| weighted_jet(f, order, x, ctx))
        .collect::<Result<_>>()?;
    let nodes = grid.nodes();
    let mut witnesses = Vec::new();
    for (i, (&x, row)) in nodes.iter().zip(&rows).enumerate() {
        for (n, g) in row.iter().enumerate() {
            if !sign_ok(0, g.value, g.scale) {
                witnesses.push(Witness { x, k: n, value: g.value });
            }
            if i > 0 {
                let prev = rows[i - 1][n];
                let rise = g.value - prev.value;
                if rise > SIGN_TOL * g.scale.max(prev.scale).max(1.0) {
                    witnesses.push(Witness { x, k: n, value: rise });
                }
            }
        }
    }
    Ok(CMReport {
        function: format!("strong:{f}"),
        alpha: 1.0,
        order,
        grid: grid.spec(),
        verdict: Verdict::from_pass(witnesses.is_empty()),
        witnesses,
        tolerance: SIGN_TOL,
    })
}

/// `dᵏ[x f(x)] = x f⁽ᵏ⁾(x) + k f⁽ᵏ⁻¹⁾(x)` for `k = 0..=order`.
pub fn x_times_jet(f: &CatalogFunction, order: usize, x: f64, ctx: &EvalContext) -> Result<Vec<Term>> {
    let jet = f.jet(order, x, ctx)?;
    Ok((0..=order)
        .map(|k| {
            let (lower, lower_scale) = if k == 0 { (0.0, 0.0) } else { (jet[k - 1].value, jet[k - 1].scale) };
            Term {
                value: x * jet[k].value + k as f64 * lower,
                scale: x * jet[k].scale + k as f64 * lower_scale,
            }
        })
        .collect())
}

/// Complete-monotonicity check of `x f(x)` via the product rule.
pub fn x_times_cm_check(f: &CatalogFunction, order: usize, grid: &Grid, ctx: &EvalContext) -> Result<CMReport> {
    check_order(order)?;
    let per_node: Vec<Vec<Witness>> = grid
        .nodes()
        .par_iter()
        .map(|&x| {
            Ok(x_times_jet(f, order, x, ctx)?
                .iter()
                .enumerate()
                .filter(|(k, t)| !sign_ok(*k, t.value, t.scale))
                .map(|(k, t)| Witness { x, k, value: t.value })
                .collect())
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<Witness> = per_node.into_iter().flatten().collect();
    Ok(CMReport {
        function: format!("x*{f}"),
        alpha: 1.0,
        order,
        grid: grid.spec(),
        verdict: Verdict::from_pass(witnesses.is_empty()),
        witnesses,
        tolerance: SIGN_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equivalence {
    pub function: String,
    pub order: usize,
    pub strong_verdict: Verdict,
    pub xcm_verdict: Verdict,
    /// Verdict of the generic `x^α f` checker at `α = 1`.
    pub leibniz_verdict: Verdict,
    pub agree: bool,
}

/// Compares the strong-CM verdict of `f` with the CM verdict of `x f(x)`.
pub fn equivalence_test(f: &CatalogFunction, order: usize, grid: &Grid, ctx: &EvalContext) -> Result<Equivalence> {
    let strong = strongly_cm_check(f, order, grid, ctx)?.verdict;
    let xcm = x_times_cm_check(f, order, grid, ctx)?.verdict;
    let leibniz = cm_check(f, 1.0, order.max(1), grid, ctx)?.verdict;
    Ok(Equivalence {
        function: f.to_string(),
        order,
        strong_verdict: strong,
        xcm_verdict: xcm,
        leibniz_verdict: leibniz,
        agree: strong == xcm && xcm == leibniz,
    })
}

/// A point where `(-1)ᵏxᵏ⁺¹f⁽ᵏ⁾ >= k(-1)ᵏ⁻¹xᵏf⁽ᵏ⁻¹⁾` failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainWitness {
    pub x: f64,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InductionReport {
    pub function: String,
    pub order: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<ChainWitness>,
}

/// The chain `gₖ(x) >= k g_{k-1}(x)` behind `gₖ >= k! x f(x) >= 0`, with
/// `gₖ = (-1)ᵏxᵏ⁺¹f⁽ᵏ⁾`, checked for `k = 1..=order` at each node.
pub fn induction_chain_check(f: &CatalogFunction, order: usize, grid: &Grid, ctx: &EvalContext) -> Result<InductionReport> {
    check_order(order)?;
    let per_node: Vec<Vec<ChainWitness>> = grid
        .nodes()
        .par_iter()
        .map(|&x| {
            let g = weighted_jet(f, order, x, ctx)?;
            Ok((1..=order)
                .filter_map(|k| {
                    let lhs = g[k].value;
                    let rhs = k as f64 * g[k - 1].value;
                    let scale = g[k].scale + k as f64 * g[k - 1].scale;
                    (lhs - rhs < -SIGN_TOL * scale.max(1.0)).then_some(ChainWitness { x, k, lhs, rhs })
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let witnesses: Vec<ChainWitness> = per_node.into_iter().flatten().collect();
    Ok(InductionReport {
        function: f.to_string(),
        order,
        verdict: Verdict::from_pass(witnesses.is_empty()),
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmdeg::degree_estimate;

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn inverse_is_strongly_cm_with_constant_weights() {
        let c = ctx();
        let g = weighted_jet(&CatalogFunction::InvX, 6, 3.7, &c).unwrap();
        let mut fact = 1.0;
        for (n, t) in g.iter().enumerate() {
            if n > 0 {
                fact *= n as f64;
            }
            assert!((t.value - fact).abs() <= 1e-12 * fact);
        }
        let r = strongly_cm_check(&CatalogFunction::InvX, 8, &Grid::default_check(), &c).unwrap();
        assert!(r.verdict.is_pass());
    }

    #[test]
    fn exponential_fails_at_order_zero() {
        let r = strongly_cm_check(&CatalogFunction::ExpNeg, 8, &Grid::default_check(), &ctx()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_failing_order(), Some(0));
        assert!(r.witnesses.iter().any(|w| w.k == 0 && w.x < 1.0));
    }

    #[test]
    fn inverse_of_x_times_x_plus_one() {
        let r = strongly_cm_check(&CatalogFunction::InvXXPlus1, 3, &Grid::default_check(), &ctx()).unwrap();
        assert!(r.verdict.is_pass(), "{:?}", r.witnesses.first());
    }

    #[test]
    fn product_rule_matches_leibniz_with_alpha_one() {
        let c = ctx();
        for f in CatalogFunction::strong_catalog() {
            for &x in &[0.2, 1.0, 7.0] {
                let a = x_times_jet(&f, 6, x, &c).unwrap();
                let b = f.alpha_jet(1.0, 6, x, &c).unwrap();
                for k in 0..=6 {
                    let tol = 1e-13 * a[k].scale.max(b[k].scale);
                    assert!((a[k].value - b[k].value).abs() <= tol, "{f} x={x} k={k}");
                }
            }
        }
    }

    #[test]
    fn equivalence_across_catalog() {
        let c = ctx();
        let grid = Grid::default_check();
        for f in CatalogFunction::strong_catalog() {
            let e = equivalence_test(&f, 8, &grid, &c).unwrap();
            assert!(e.agree, "{e:?}");
            let expected = match f {
                CatalogFunction::ExpNeg => false,
                CatalogFunction::PowerNeg(a) => a >= 1.0,
                _ => true,
            };
            assert_eq!(e.strong_verdict.is_pass(), expected, "{f}");
        }
    }

    #[test]
    fn induction_chain_for_passing_members() {
        let c = ctx();
        let grid = Grid::default_check();
        for f in CatalogFunction::strong_catalog() {
            if x_times_cm_check(&f, 8, &grid, &c).unwrap().verdict.is_pass() {
                let r = induction_chain_check(&f, 8, &grid, &c).unwrap();
                assert!(r.verdict.is_pass(), "{f}: {:?}", r.witnesses.first());
            }
        }
        let r = induction_chain_check(&CatalogFunction::PowerNeg(0.5), 4, &grid, &c).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn strongly_cm_members_have_degree_at_least_one() {
        let c = ctx();
        let grid = Grid::log(0.01, 1e4, 120).unwrap();
        let tol = 0.05;
        for f in CatalogFunction::strong_catalog() {
            if strongly_cm_check(&f, 6, &grid, &c).unwrap().verdict.is_pass() {
                let d = degree_estimate(&f, 0.0, 8.0, tol, 6, &grid, &c).unwrap();
                assert!(d.lo >= 1.0 - tol, "{f}: {d:?}");
            }
        }
    }
}
