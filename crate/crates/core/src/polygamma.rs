//! Polygamma functions `ψ⁽ⁿ⁾(x)`, `n >= 1`, `x > 0`.
//!
//! The main evaluator shifts `x` upward with
//! `ψ⁽ⁿ⁾(x) = ψ⁽ⁿ⁾(x + 1) + (-1)^{n+1} n! / x^{n+1}` until it reaches the
//! asymptotic region, then sums the Bernoulli-number expansion
//!
//! ```text
//! ψ⁽ⁿ⁾(z) ~ (-1)^{n+1} [ (n-1)!/zⁿ + n!/(2z^{n+1}) + Σ_k B_{2k} (2k+n-1)!/((2k)! z^{2k+n}) ].
//! ```
//!
//! [`polygamma_integral`] is an independent quadrature of the Laplace
//! representation and exists to cross-check the fast path.

use crate::bernoulli::{bernoulli_even, MAX_CORRECTION_TERMS};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::kernel;
use crate::quad;

/// `n!` as a double (exact up to `n = 22`).
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn sign(n: u32) -> f64 {
    // (-1)^{n+1}
    if n % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Smallest argument at which the expansion is summed for order `n`.
///
/// The configured threshold is used as-is for `n <= 10`; higher orders need
/// a larger argument for the fixed term count to stay at double precision.
pub fn asymptotic_threshold(n: u32, ctx: &EvalContext) -> f64 {
    ctx.shift_threshold().max(1.5 * n as f64)
}

fn check_args(n: u32, x: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain(format!("polygamma order must be >= 1, got {n}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("polygamma argument must be positive and finite, got {x}")));
    }
    // n!/x^{n+1} must stay representable
    if ln_factorial(n) - (n as f64 + 1.0) * x.ln() > f64::MAX.ln() {
        return Err(Error::Overflow(format!(
            "psi^({n})({x:e}) exceeds the double-precision range"
        )));
    }
    Ok(())
}

/// Bernoulli-form expansion with `corrections` terms beyond the two leading
/// ones. Requires `z > 0`.
fn asymptotic_sum(n: u32, z: f64, corrections: usize) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let lead = factorial(n - 1);
    let mut total = lead + 0.5 * n as f64 * lead * inv;
    let mut power = 1.0;
    for k in 1..=corrections {
        power *= inv2;
        // (2k+n-1)!/(2k)! = (2k+1)(2k+2)…(2k+n-1)
        let rising: f64 = (1..n).map(|j| (2 * k as u32 + j) as f64).product();
        total += bernoulli_even(k) * rising * power;
    }
    sign(n) * total * inv.powi(n as i32)
}

/// Truncated asymptotic expansion of `ψ⁽ⁿ⁾(z)` with `terms` total terms,
/// counted in the order `(n-1)!/zⁿ`, `n!/(2z^{n+1})`, then one term per
/// Bernoulli number `B_2, B_4, …`.
pub fn polygamma_asymptotic(n: u32, z: f64, terms: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("polygamma order must be >= 1, got {n}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("asymptotic argument must be positive, got {z}")));
    }
    let max_terms = MAX_CORRECTION_TERMS + 2;
    if terms == 0 || terms > max_terms {
        return Err(Error::Domain(format!(
            "asymptotic term count must lie in 1..={max_terms}, got {terms}"
        )));
    }
    if terms == 1 {
        return Ok(sign(n) * factorial(n - 1) / z.powi(n as i32));
    }
    Ok(asymptotic_sum(n, z, terms - 2))
}

/// `ψ⁽ⁿ⁾(x)` by recurrence shift plus asymptotic expansion.
pub fn polygamma(n: u32, x: f64, ctx: &EvalContext) -> Result<f64> {
    check_args(n, x)?;
    let z_min = asymptotic_threshold(n, ctx);
    let shift = (z_min - x).max(0.0).ceil() as usize;
    let mut recurrence = 0.0;
    for j in 0..shift {
        recurrence += (x + j as f64).powi(-(n as i32 + 1));
    }
    let tail = asymptotic_sum(n, x + shift as f64, ctx.asym_terms());
    Ok(tail + sign(n) * factorial(n) * recurrence)
}

/// `[ψ'(x), ψ''(x), …, ψ^{(n_max)}(x)]`, sharing one shift across orders.
pub fn polygamma_jet(n_max: u32, x: f64, ctx: &EvalContext) -> Result<Vec<f64>> {
    if n_max < 1 {
        return Err(Error::Domain("polygamma jet needs n_max >= 1".into()));
    }
    check_args(n_max, x)?;
    let z_min = asymptotic_threshold(n_max, ctx);
    let shift = (z_min - x).max(0.0).ceil() as usize;
    let z = x + shift as f64;
    let mut sums = vec![0.0; n_max as usize];
    for j in 0..shift {
        let inv = 1.0 / (x + j as f64);
        let mut p = inv;
        for s in sums.iter_mut() {
            p *= inv;
            *s += p;
        }
    }
    Ok((1..=n_max)
        .zip(sums)
        .map(|(n, s)| asymptotic_sum(n, z, ctx.asym_terms()) + sign(n) * factorial(n) * s)
        .collect())
}

/// Quadrature oracle: `(-1)^{n+1} ∫₀^T t^{n-1} σ(t) e^{-xt} dt` with
/// `σ(t) = t/(1-e^{-t})` and `T = max(ctx.horizon_for(x), 4n/x)`.
pub fn polygamma_integral(n: u32, x: f64, ctx: &EvalContext) -> Result<f64> {
    check_args(n, x)?;
    let horizon = ctx.horizon_for(x).max(4.0 * n as f64 / x);
    let breaks = quad::laplace_breaks(x, horizon);
    let power = (n - 1) as f64;
    let integrand = |t: f64| {
        let weight = if n == 1 { (-x * t).exp() } else { (power * t.ln() - x * t).exp() };
        weight * kernel::sigma(t, ctx)
    };
    let r = quad::integrate_with_breaks(
        integrand,
        &breaks,
        ctx.quad_rel_tol(),
        0.0,
        quad::DEFAULT_MAX_SUBDIVISIONS,
    )?;
    Ok(sign(n) * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // ζ(s) from a direct partial sum plus the midpoint of the integral tail
    // bounds ∫_{N+1}^∞ ≤ tail ≤ ∫_N^∞.
    fn zeta_oracle(s: i32) -> f64 {
        let n = 1_000_000u64;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for k in (1..=n).rev() {
            let y = (k as f64).powi(-s) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let sm1 = (s - 1) as f64;
        let lo = ((n + 1) as f64).powf(-sm1) / sm1;
        let hi = (n as f64).powf(-sm1) / sm1;
        sum + 0.5 * (lo + hi)
    }

    #[test]
    fn trigamma_at_one_matches_zeta_two() {
        let ctx = EvalContext::default();
        let oracle = zeta_oracle(2);
        assert!(rel(oracle, std::f64::consts::PI.powi(2) / 6.0) < 1e-12);
        assert!(rel(polygamma(1, 1.0, &ctx).unwrap(), oracle) < 1e-12);
    }

    #[test]
    fn tetragamma_at_one_matches_zeta_three() {
        let ctx = EvalContext::default();
        let oracle = -2.0 * zeta_oracle(3);
        assert!(rel(polygamma(2, 1.0, &ctx).unwrap(), oracle) < 1e-12);
        assert!(rel(polygamma(2, 1.0, &ctx).unwrap(), -2.404_113_806_319_188_5) < 1e-12);
    }

    #[test]
    fn unit_recurrence_step() {
        let ctx = EvalContext::default();
        let d = polygamma(1, 1.0, &ctx).unwrap() - polygamma(1, 2.0, &ctx).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trigamma_at_ten_from_partial_sums() {
        let ctx = EvalContext::default();
        let head: f64 = (1..=9).map(|k| 1.0 / (k * k) as f64).sum();
        let oracle = zeta_oracle(2) - head;
        assert!(rel(polygamma(1, 10.0, &ctx).unwrap(), oracle) < 1e-12);
        assert!(rel(polygamma_integral(1, 10.0, &ctx).unwrap(), oracle) < 1e-9);
    }

    #[test]
    fn large_argument_leading_terms() {
        let ctx = EvalContext::default();
        let x = 1e6;
        let v = polygamma(1, x, &ctx).unwrap();
        let two_terms = 1.0 / x + 0.5 / (x * x);
        assert!(rel(v, two_terms) < 1e-12);
    }

    #[test]
    fn integral_oracle_examples() {
        let ctx = EvalContext::default();
        let z2 = zeta_oracle(2);
        assert!(rel(polygamma_integral(1, 1.0, &ctx).unwrap(), z2) < 1e-9);
        let expected = -2.0 * zeta_oracle(3) + 2.0;
        assert!(rel(polygamma_integral(2, 2.0, &ctx).unwrap(), expected) < 1e-9);
    }

    #[test]
    fn explicit_leading_terms() {
        let z = 7.5;
        assert_eq!(polygamma_asymptotic(1, z, 1).unwrap(), 1.0 / z);
        let two = polygamma_asymptotic(2, z, 2).unwrap();
        assert!(rel(two, -1.0 / (z * z) - 1.0 / (z * z * z)) < 1e-15);
    }

    // Explicit coefficients of ψ', ψ'' and ψ''' (powers start at 1, 2, 3).
    const TRIGAMMA: [(f64, i32); 6] = [
        (1.0, 1),
        (0.5, 2),
        (1.0 / 6.0, 3),
        (-1.0 / 30.0, 5),
        (1.0 / 42.0, 7),
        (-1.0 / 30.0, 9),
    ];
    const TETRAGAMMA: [(f64, i32); 7] = [
        (-1.0, 2),
        (-1.0, 3),
        (-0.5, 4),
        (1.0 / 6.0, 6),
        (-1.0 / 6.0, 8),
        (0.3, 10),
        (-5.0 / 6.0, 12),
    ];
    const PENTAGAMMA: [(f64, i32); 7] = [
        (2.0, 3),
        (3.0, 4),
        (2.0, 5),
        (-1.0, 7),
        (4.0 / 3.0, 9),
        (-3.0, 11),
        (10.0, 13),
    ];

    fn explicit(coeffs: &[(f64, i32)], z: f64, terms: usize) -> f64 {
        coeffs[..terms].iter().map(|&(c, p)| c * z.powi(-p)).sum()
    }

    #[test]
    fn bernoulli_form_reproduces_explicit_expansions() {
        for &z in &[3.0, 16.0, 50.0] {
            for terms in 1..=6 {
                let a = polygamma_asymptotic(1, z, terms).unwrap();
                assert!(rel(a, explicit(&TRIGAMMA, z, terms)) < 1e-15);
            }
            for terms in 1..=7 {
                let a = polygamma_asymptotic(2, z, terms).unwrap();
                assert!(rel(a, explicit(&TETRAGAMMA, z, terms)) < 1e-15);
                let b = polygamma_asymptotic(3, z, terms).unwrap();
                assert!(rel(b, explicit(&PENTAGAMMA, z, terms)) < 1e-15);
            }
        }
    }

    #[test]
    fn seven_terms_are_accurate_from_sixteen() {
        let ctx = EvalContext::default();
        for n in 1..=3 {
            for &z in &[16.0, 20.0, 50.0, 300.0] {
                let a = polygamma_asymptotic(n, z, 7).unwrap();
                let p = polygamma(n, z, &ctx).unwrap();
                assert!(rel(a, p) <= 1e-13, "n={n} z={z}: {}", rel(a, p));
            }
        }
        let a = polygamma_asymptotic(3, 50.0, 7).unwrap();
        let o = polygamma_integral(3, 50.0, &ctx).unwrap();
        assert!(rel(a, o) < 1e-9);
    }

    #[test]
    fn agrees_with_integral_oracle() {
        let ctx = EvalContext::default();
        for n in 1..=4 {
            for &x in &[0.5, 0.9, 1.7, 3.0, 7.25, 15.0, 33.0, 50.0] {
                let fast = polygamma(n, x, &ctx).unwrap();
                let slow = polygamma_integral(n, x, &ctx).unwrap();
                assert!(rel(fast, slow) <= 1e-8, "n={n} x={x}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn jet_matches_individual_calls() {
        let ctx = EvalContext::default();
        for &x in &[0.01, 0.3, 2.0, 17.0, 250.0] {
            let jet = polygamma_jet(14, x, &ctx).unwrap();
            for (i, v) in jet.iter().enumerate() {
                let n = i as u32 + 1;
                let single = polygamma(n, x, &ctx).unwrap();
                assert!(rel(*v, single) < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn high_orders_keep_recurrence() {
        let ctx = EvalContext::default();
        for n in [8u32, 12, 16, 20] {
            for &x in &[0.7, 3.0, 12.0] {
                let a = polygamma(n, x, &ctx).unwrap();
                let b = polygamma(n, x + 1.0, &ctx).unwrap();
                let step = sign(n) * factorial(n) / x.powi(n as i32 + 1);
                assert!(((a - b - step) / a).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn domain_and_overflow_errors() {
        let ctx = EvalContext::default();
        assert!(matches!(polygamma(0, 1.0, &ctx), Err(Error::Domain(_))));
        assert!(matches!(polygamma(1, 0.0, &ctx), Err(Error::Domain(_))));
        assert!(matches!(polygamma(1, -2.0, &ctx), Err(Error::Domain(_))));
        assert!(matches!(polygamma(6, 1e-60, &ctx), Err(Error::Overflow(_))));
        assert!(matches!(polygamma_asymptotic(1, 0.0, 3), Err(Error::Domain(_))));
        assert!(matches!(polygamma_asymptotic(1, 2.0, 0), Err(Error::Domain(_))));
    }

    fn sample_grid() -> Vec<f64> {
        // 60 log-spaced points in [0.05, 100]
        (0..60)
            .map(|i| 0.05 * (2000.0f64).powf(i as f64 / 59.0))
            .collect()
    }

    #[test]
    fn sign_pattern_and_monotone_decay() {
        let ctx = EvalContext::default();
        let grid = sample_grid();
        for n in 1..=6 {
            let mut last = f64::INFINITY;
            for &x in &grid {
                let v = polygamma(n, x, &ctx).unwrap();
                assert_eq!(v.signum(), sign(n), "n={n} x={x}");
                assert!(v.abs() < last, "n={n} x={x}");
                last = v.abs();
            }
        }
    }

    proptest! {
        #[test]
        fn recurrence_residual(n in 1u32..=6, x in 0.05f64..100.0) {
            let ctx = EvalContext::default();
            let a = polygamma(n, x, &ctx).unwrap();
            let b = polygamma(n, x + 1.0, &ctx).unwrap();
            let step = sign(n) * factorial(n) / x.powi(n as i32 + 1);
            prop_assert!((a - b - step).abs() <= 1e-12 * a.abs());
        }
    }
}
