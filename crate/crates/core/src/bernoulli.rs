//! Exact Bernoulli numbers.
//!
//! The table is generated once with rational arithmetic from the recurrence
//! `Σ_{k=0}^{m} C(m+1, k) B_k = 0` and cached. `B_1 = -1/2` here; callers that
//! need the `+1/2` convention flip the sign themselves.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Highest index stored in the table.
pub const MAX_INDEX: usize = 60;

/// Number of even-index corrections `B_2, B_4, …, B_60` available to the
/// asymptotic expansions.
pub const MAX_CORRECTION_TERMS: usize = MAX_INDEX / 2;

struct Table {
    exact: Vec<BigRational>,
    float: Vec<f64>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut exact: Vec<BigRational> = Vec::with_capacity(MAX_INDEX + 1);
        exact.push(BigRational::one());
        for m in 1..=MAX_INDEX {
            // binomial C(m+1, k) built incrementally
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, b) in exact.iter().enumerate() {
                acc += b * BigRational::from_integer(binom.clone());
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            let b_m = -acc / BigRational::from_integer(BigInt::from(m + 1));
            exact.push(b_m);
        }
        let float = exact.iter().map(|b| b.to_f64().unwrap_or(f64::NAN)).collect();
        Table { exact, float }
    })
}

/// Exact `B_n` for `n <= MAX_INDEX`.
pub fn bernoulli_exact(n: usize) -> &'static BigRational {
    &table().exact[n]
}

/// `B_n` rounded to the nearest double.
pub fn bernoulli(n: usize) -> f64 {
    table().float[n]
}

/// `B_{2k}` for `k >= 1`.
pub fn bernoulli_even(k: usize) -> f64 {
    bernoulli(2 * k)
}
