//! `ϑ(t)`, the integer coefficients `Q(k)` and their positivity.
//!
//! ```text
//! ϑ(t) = (5t² - 40t + 48)e^{3t} + (67t² - 108t - 72)e^{2t} + t(67t + 120)eᵗ + 5t² + 28t + 24
//! Q(k) = 6(66k² + 35k - 78) + 3(33k² - 148k + 12)·2ᵏ + 2(2k² - 31k + 66)·3ᵏ
//! ```
//!
//! `Q(k)` is evaluated in exact integer arithmetic. The Maclaurin coefficients
//! of `ϑ` itself are available exactly through [`theta_taylor_coefficient`];
//! note that they are *not* `Q(k)/6` (see the crate README).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Lowest index of the `Q(k)` table.
pub const K_MIN: u32 = 5;

/// `e^{3t}` overflows beyond this point.
pub const THETA_MAX_T: f64 = 236.0;

/// Closed-form `ϑ(t)`.
pub fn theta(t: f64) -> Result<f64> {
    if t > THETA_MAX_T {
        return Err(Error::Overflow(format!("theta({t}) overflows (limit {THETA_MAX_T})")));
    }
    let e = t.exp();
    let t2 = t * t;
    Ok((((5.0 * t2 - 40.0 * t + 48.0) * e + (67.0 * t2 - 108.0 * t - 72.0)) * e
        + t * (67.0 * t + 120.0))
        * e
        + 5.0 * t2
        + 28.0 * t
        + 24.0)
}

/// Exact `Q(k)`. Defined for every `k`; the positivity claim covers `k >= 5`.
pub fn q_coefficient(k: u32) -> BigInt {
    let kk = BigInt::from(k);
    let k2 = &kk * &kk;
    let poly = |a: i64, b: i64, c: i64| BigInt::from(a) * &k2 + BigInt::from(b) * &kk + BigInt::from(c);
    let two_k = BigInt::from(2u32).pow(k);
    let three_k = BigInt::from(3u32).pow(k);
    BigInt::from(6) * poly(66, 35, -78)
        + BigInt::from(3) * poly(33, -148, 12) * two_k
        + BigInt::from(2) * poly(2, -31, 66) * three_k
}

// ϑ as Σ coeff·t^p·e^{ct}: (coeff, p, c)
const THETA_TERMS: [(i64, u32, u32); 12] = [
    (5, 2, 3),
    (-40, 1, 3),
    (48, 0, 3),
    (67, 2, 2),
    (-108, 1, 2),
    (-72, 0, 2),
    (67, 2, 1),
    (120, 1, 1),
    (5, 2, 0),
    (28, 1, 0),
    (24, 0, 0),
    (0, 0, 0),
];

/// Exact `k! · [tᵏ] ϑ(t)`.
pub fn theta_taylor_coefficient(k: u32) -> BigInt {
    let mut total = BigInt::zero();
    for &(coeff, p, c) in &THETA_TERMS {
        if coeff == 0 || k < p {
            continue;
        }
        // k!/(k-p)! · c^{k-p}
        let falling: BigInt = ((k - p + 1)..=k).map(BigInt::from).product();
        let power = if c == 0 {
            if k == p { BigInt::one() } else { BigInt::zero() }
        } else {
            BigInt::from(c).pow(k - p)
        };
        total += BigInt::from(coeff) * falling * power;
    }
    total
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}

fn neumaier<I: Iterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `(1/6) Σ_{k=5}^{k_max} Q(k) tᵏ/k!`, compensated summation.
pub fn q_series_sum(t: f64, k_max: u32) -> f64 {
    neumaier((K_MIN..=k_max).map(|k| {
        let q = q_coefficient(k).to_f64().unwrap_or(f64::INFINITY);
        q / factorial_f64(k) * t.powi(k as i32)
    })) / 6.0
}

/// `Σ_{k=0}^{k_max} ϑ_k tᵏ/k!` from the exact Maclaurin coefficients of `ϑ`.
pub fn theta_series_sum(t: f64, k_max: u32) -> f64 {
    neumaier((0..=k_max).map(|k| {
        let c = theta_taylor_coefficient(k).to_f64().unwrap_or(f64::INFINITY);
        c / factorial_f64(k) * t.powi(k as i32)
    }))
}

/// Exact `Q(k)` for `5 <= k <= k_max`, with the positivity verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub k_min: u32,
    pub k_max: u32,
    pub q_values: Vec<BigInt>,
    pub all_positive: bool,
}

#[derive(Serialize)]
struct Row {
    k: u32,
    q: String,
    positive: bool,
}

impl SeriesTable {
    pub fn rows(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        (self.k_min..=self.k_max).zip(self.q_values.iter())
    }

    /// Index of the first non-positive entry, if any.
    pub fn first_non_positive(&self) -> Option<u32> {
        self.rows().find(|(_, q)| !q.is_positive()).map(|(k, _)| k)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let rows: Vec<Row> = self
            .rows()
            .map(|(k, q)| Row {
                k,
                q: q.to_string(),
                positive: q.is_positive(),
            })
            .collect();
        serde_json::json!({
            "k_min": self.k_min,
            "k_max": self.k_max,
            "all_positive": self.all_positive,
            "rows": rows,
        })
    }

    /// CSV with header `k,Q,positive`; `Q` is a decimal string.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "Q", "positive"])?;
        for (k, q) in self.rows() {
            w.write_record([k.to_string(), q.to_string(), q.is_positive().to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the table for `5..=k_max`.
pub fn q_positivity(k_max: u32) -> Result<SeriesTable> {
    if k_max < K_MIN {
        return Err(Error::Domain(format!("k_max must be >= {K_MIN}, got {k_max}")));
    }
    let q_values: Vec<BigInt> = (K_MIN..=k_max).map(q_coefficient).collect();
    let all_positive = q_values.iter().all(|q| q.is_positive());
    Ok(SeriesTable {
        k_min: K_MIN,
        k_max,
        q_values,
        all_positive,
    })
}

/// Integer quadratic `a x² + b x + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Quadratic {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Quadratic {
    pub fn eval(&self, x: f64) -> f64 {
        (self.a as f64 * x + self.b as f64) * x + self.c as f64
    }

    pub fn eval_int(&self, k: i64) -> i64 {
        (self.a * k + self.b) * k + self.c
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Larger real root by the textbook formula.
    pub fn larger_root(&self) -> f64 {
        (-(self.b as f64) + (self.discriminant() as f64).sqrt()) / (2 * self.a) as f64
    }
}

/// The three quadratics multiplying `1`, `2ᵏ` and `3ᵏ` in `Q(k)`.
pub const Q_QUADRATICS: [Quadratic; 3] = [
    Quadratic { a: 66, b: 35, c: -78 },
    Quadratic { a: 33, b: -148, c: 12 },
    Quadratic { a: 2, b: -31, c: 66 },
];

/// `((√21817 - 35)/132, 2(37 + √1270)/33, (31 + √433)/4)`.
pub fn quadratic_larger_roots() -> [f64; 3] {
    [
        (21817f64.sqrt() - 35.0) / 132.0,
        2.0 * (37.0 + 1270f64.sqrt()) / 33.0,
        (31.0 + 433f64.sqrt()) / 4.0,
    ]
}

/// Smallest integer `k` beyond which all three quadratics stay positive.
pub fn quadratic_positivity_start() -> i64 {
    quadratic_larger_roots()
        .iter()
        .map(|r| r.floor() as i64 + 1)
        .max()
        .unwrap_or(0)
}

/// `true` if `Q(k)` is divisible by 6 for every `k` in `5..=k_max`.
pub fn q_divisible_by_six(k_max: u32) -> bool {
    (K_MIN..=k_max).all(|k| q_coefficient(k).is_multiple_of(&BigInt::from(6)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn theta_at_zero() {
        assert_eq!(theta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn theta_overflow() {
        assert!(matches!(theta(300.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn q_table_golden_values() {
        let expected: [i64; 8] = [840, 4968, 16296, 39888, 104040, 472824, 2962344, 17643744];
        for (k, e) in (5..=12).zip(expected) {
            assert_eq!(q_coefficient(k), BigInt::from(e), "Q({k})");
        }
    }

    #[test]
    fn q_positivity_tables() {
        let t = q_positivity(12).unwrap();
        assert_eq!(t.q_values.len(), 8);
        assert!(t.all_positive);
        let t = q_positivity(200).unwrap();
        assert!(t.all_positive);
        assert_eq!(t.first_non_positive(), None);
        let t = q_positivity(5).unwrap();
        assert_eq!(t.q_values, vec![BigInt::from(840)]);
        assert!(q_positivity(4).is_err());
    }

    #[test]
    fn q_below_summation_range() {
        assert_eq!(q_coefficient(0), BigInt::from(-300));
        assert_eq!(q_coefficient(3), BigInt::zero());
        assert_eq!(q_coefficient(4), BigInt::zero());
    }

    #[test]
    fn roots_close_forms_and_prefixes() {
        let roots = quadratic_larger_roots();
        for (q, r) in Q_QUADRATICS.iter().zip(roots) {
            let residual = q.eval(r);
            assert!(residual.abs() <= 1e-12 * (q.a as f64 * r * r).abs(), "{q:?}");
            assert!((q.larger_root() - r).abs() < 1e-13 * r);
        }
        assert!(format!("{:.4}", roots[0]).starts_with("0.85"));
        assert!(format!("{:.4}", roots[1]).starts_with("4.40"));
        assert!(format!("{:.4}", roots[2]).starts_with("12.9"));
        assert_eq!(quadratic_positivity_start(), 13);
        for q in &Q_QUADRATICS {
            assert!(q.eval_int(13) > 0);
        }
    }

    #[test]
    fn theta_low_order_derivatives_vanish() {
        for k in 0..=4 {
            assert!(theta_taylor_coefficient(k).is_zero(), "k={k}");
        }
        assert_eq!(theta_taylor_coefficient(5), BigInt::from(-120));
        assert_eq!(theta_taylor_coefficient(6), BigInt::from(-1632));
    }

    #[test]
    fn theta_low_order_finite_differences() {
        use crate::testutil::central_diff;
        let scale = 48.0 * 27.0;
        for order in 1..=4 {
            let d = central_diff(|t| theta(t).unwrap(), 0.0, order, 1e-2);
            assert!(d.abs() <= 1e-6 * scale, "order {order}: {d}");
        }
    }

    #[test]
    fn theta_matches_its_own_taylor_series() {
        for &t in &[0.25, 0.5, 1.0, 2.0] {
            let closed = theta(t).unwrap();
            let series = theta_series_sum(t, 80);
            assert!(((closed - series) / closed).abs() <= 1e-10, "t={t}: {closed} vs {series}");
        }
    }

    #[test]
    fn theta_changes_sign_once() {
        // negative near the origin, positive for large t
        assert!(theta(1.0).unwrap() < 0.0);
        assert!(theta(6.3).unwrap() < 0.0);
        assert!(theta(6.5).unwrap() > 0.0);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        q_positivity(6).unwrap().write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,Q,positive\n5,840,true\n6,4968,true\n");
    }

    #[test]
    fn q_entries_are_multiples_of_six() {
        assert!(q_divisible_by_six(200));
    }

    proptest! {
        #[test]
        fn q_positive_beyond_four(k in 5u32..400) {
            prop_assert!(q_coefficient(k).is_positive());
        }
    }
}
