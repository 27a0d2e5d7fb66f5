//! Closed-form test functions with exact derivatives.
//!
//! Every member returns `f⁽ᵏ⁾(x)` for `k = 0..=K` together with a magnitude
//! scale (the absolute sum of the terms that produced the value), which the
//! sign checks use to size their rounding slack.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::bernoulli::bernoulli_exact;
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::polygamma::polygamma_jet;

/// Highest polygamma order the checkers will request.
pub const MAX_POLYGAMMA_ORDER: usize = 20;

/// Highest derivative order of `x^α f` supported for any catalog member.
pub const MAX_ORDER: usize = MAX_POLYGAMMA_ORDER - 2;

/// Terms of the `1/x` expansion used at large `x`.
const INFINITY_SERIES_TERMS: usize = 40;

/// One derivative value and the magnitude of the terms summed to produce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogFunction {
    /// `Ψ(x) = [ψ'(x)]² + ψ''(x)`
    Psi,
    /// `h_λ(x) = Ψ(x) - (x² + λx + 12)/(12x⁴(x+1)²)`
    HLambda(f64),
    /// `-h_μ(x)`
    NegHLambda(f64),
    /// `1/x`
    InvX,
    /// `x^{-a}`
    PowerNeg(f64),
    /// `e^{-x}`
    ExpNeg,
    /// `1/(x(x+1))`
    InvXXPlus1,
}

impl fmt::Display for CatalogFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogFunction::Psi => write!(f, "Psi"),
            CatalogFunction::HLambda(l) => write!(f, "h:{l}"),
            CatalogFunction::NegHLambda(m) => write!(f, "neg-h:{m}"),
            CatalogFunction::InvX => write!(f, "inv-x"),
            CatalogFunction::PowerNeg(a) => write!(f, "pow-neg:{a}"),
            CatalogFunction::ExpNeg => write!(f, "exp-neg"),
            CatalogFunction::InvXXPlus1 => write!(f, "inv-x-x1"),
        }
    }
}

impl FromStr for CatalogFunction {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) form, e.g. `Psi`, `h:0`,
    /// `neg-h:4`, `pow-neg:1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let miss = || Error::CatalogMiss(s.to_string());
        let param = |p: &str| p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(miss);
        match s.split_once(':') {
            None => match s {
                "Psi" | "psi" => Ok(CatalogFunction::Psi),
                "inv-x" => Ok(CatalogFunction::InvX),
                "exp-neg" => Ok(CatalogFunction::ExpNeg),
                "inv-x-x1" => Ok(CatalogFunction::InvXXPlus1),
                _ => Err(miss()),
            },
            Some(("h", p)) => Ok(CatalogFunction::HLambda(param(p)?)),
            Some(("neg-h", p)) => Ok(CatalogFunction::NegHLambda(param(p)?)),
            Some(("pow-neg", p)) => Ok(CatalogFunction::PowerNeg(param(p)?)),
            Some(_) => Err(miss()),
        }
    }
}

impl CatalogFunction {
    /// Members exercised by the strong-CM equivalence checks.
    pub fn strong_catalog() -> Vec<CatalogFunction> {
        vec![
            CatalogFunction::InvX,
            CatalogFunction::PowerNeg(1.0),
            CatalogFunction::PowerNeg(1.5),
            CatalogFunction::PowerNeg(3.0),
            CatalogFunction::PowerNeg(0.5),
            CatalogFunction::ExpNeg,
            CatalogFunction::InvXXPlus1,
            CatalogFunction::Psi,
        ]
    }

    pub fn domain_note(&self) -> &'static str {
        match self {
            CatalogFunction::Psi | CatalogFunction::HLambda(_) | CatalogFunction::NegHLambda(_) => {
                "x > 0; derivatives from the polygamma jet, 1/x expansion at large x"
            }
            _ => "x > 0; closed-form derivatives",
        }
    }

    fn is_psi_family(&self) -> bool {
        matches!(
            self,
            CatalogFunction::Psi | CatalogFunction::HLambda(_) | CatalogFunction::NegHLambda(_)
        )
    }

    /// `f(x)`.
    pub fn value(&self, x: f64, ctx: &EvalContext) -> Result<f64> {
        Ok(self.jet(0, x, ctx)?[0].value)
    }

    /// `f⁽ᵏ⁾(x)` for `k = 0..=order`.
    pub fn jet(&self, order: usize, x: f64, ctx: &EvalContext) -> Result<Vec<Term>> {
        check_x(x)?;
        check_order(order)?;
        Ok(match *self {
            CatalogFunction::Psi => psi_jet(order, x, ctx)?,
            CatalogFunction::HLambda(l) => combine(&psi_jet(order, x, ctx)?, &rational_jet(l, order, x), -1.0),
            CatalogFunction::NegHLambda(m) => combine(&rational_jet(m, order, x), &psi_jet(order, x, ctx)?, -1.0),
            CatalogFunction::InvX => power_jet(1.0, order, x),
            CatalogFunction::PowerNeg(a) => power_jet(a, order, x),
            CatalogFunction::ExpNeg => {
                let e = (-x).exp();
                (0..=order)
                    .map(|k| Term { value: if k % 2 == 0 { e } else { -e }, scale: e })
                    .collect()
            }
            CatalogFunction::InvXXPlus1 => {
                let a = power_jet(1.0, order, x);
                let b = power_jet(1.0, order, x + 1.0);
                combine(&a, &b, -1.0)
            }
        })
    }

    /// `dᵏ[x^α f(x)]` for `k = 0..=order`.
    ///
    /// Members built on `Ψ` switch to their `1/x` expansion once
    /// `x >= infinity_cutoff(order, ctx)`, where the Leibniz form cancels.
    pub fn alpha_jet(&self, alpha: f64, order: usize, x: f64, ctx: &EvalContext) -> Result<Vec<Term>> {
        check_x(x)?;
        check_order(order)?;
        if self.is_psi_family() && x >= infinity_cutoff(order, ctx) {
            let coeffs = self.infinity_coefficients();
            return Ok(series_alpha_jet(&coeffs, alpha, order, x));
        }
        Ok(leibniz_power(alpha, &self.jet(order, x, ctx)?, x))
    }

    /// Coefficients `d_n` with `f(x) ~ Σ d_n x^{-n}` as `x → ∞`; Ψ-based members only.
    pub fn infinity_coefficients(&self) -> Vec<f64> {
        let c = psi_series_coefficients();
        match *self {
            CatalogFunction::Psi => c.to_vec(),
            CatalogFunction::HLambda(l) => (0..c.len()).map(|n| c[n] - rational_series_coefficient(l, n)).collect(),
            CatalogFunction::NegHLambda(m) => (0..c.len()).map(|n| rational_series_coefficient(m, n) - c[n]).collect(),
            _ => Vec::new(),
        }
    }
}

/// Point from which `Ψ`-based jets of the given order use the `1/x` expansion.
pub fn infinity_cutoff(order: usize, ctx: &EvalContext) -> f64 {
    ctx.shift_threshold().max(2.0 * (order as f64 + 4.0))
}

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("catalog functions need finite x > 0, got {x}")));
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
    }
    Ok(())
}

fn combine(a: &[Term], b: &[Term], sign_b: f64) -> Vec<Term> {
    a.iter()
        .zip(b)
        .map(|(p, q)| Term { value: p.value + sign_b * q.value, scale: p.scale + q.scale })
        .collect()
}

pub(crate) fn binomial_row(k: usize) -> Vec<f64> {
    let mut row = vec![1.0; k + 1];
    for i in 1..k {
        row[i] = row[i - 1] * (k + 1 - i) as f64 / i as f64;
    }
    row
}

/// Falling factorials `(a)_0, (a)_1, …, (a)_n`.
fn falling(a: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    out.push(acc);
    for i in 0..n {
        acc *= a - i as f64;
        out.push(acc);
    }
    out
}

/// `dᵏ x^{-a}` for `k = 0..=order`.
fn power_jet(a: f64, order: usize, x: f64) -> Vec<Term> {
    let ff = falling(-a, order);
    (0..=order)
        .map(|k| {
            let v = ff[k] * x.powf(-a - k as f64);
            Term { value: v, scale: v.abs() }
        })
        .collect()
}

/// `dᵏ[x^α g]` from the derivatives of `g`.
fn leibniz_power(alpha: f64, g: &[Term], x: f64) -> Vec<Term> {
    let order = g.len() - 1;
    let ff = falling(alpha, order);
    (0..=order)
        .map(|k| {
            let binom = binomial_row(k);
            let mut value = 0.0;
            let mut scale = 0.0;
            for i in 0..=k {
                let w = binom[i] * ff[i] * x.powf(alpha - i as f64);
                value += w * g[k - i].value;
                scale += (w * g[k - i].scale).abs();
            }
            Term { value, scale }
        })
        .collect()
}

/// `Ψ⁽ᵐ⁾(x) = Σ_j C(m,j) ψ^{(1+j)} ψ^{(1+m-j)} + ψ^{(m+2)}` for `m = 0..=order`.
pub fn psi_jet(order: usize, x: f64, ctx: &EvalContext) -> Result<Vec<Term>> {
    check_order(order)?;
    let p = polygamma_jet(order as u32 + 2, x, ctx)?;
    // p[n - 1] = ψ⁽ⁿ⁾(x)
    Ok((0..=order)
        .map(|m| {
            let binom = binomial_row(m);
            let tail = p[m + 1];
            let mut value = tail;
            let mut scale = tail.abs();
            for j in 0..=m {
                let t = binom[j] * p[j] * p[m - j];
                value += t;
                scale += t.abs();
            }
            Term { value, scale }
        })
        .collect())
}

/// `dᵏ R_λ` for `R_λ(x) = (x² + λx + 12)/(12x⁴(x+1)²)`.
fn rational_jet(lambda: f64, order: usize, x: f64) -> Vec<Term> {
    // g = x^{-4}(x+1)^{-2}, then Leibniz against the quadratic numerator.
    let a = power_jet(4.0, order, x);
    let b = power_jet(2.0, order, x + 1.0);
    let g: Vec<Term> = (0..=order)
        .map(|k| {
            let binom = binomial_row(k);
            let mut value = 0.0;
            let mut scale = 0.0;
            for i in 0..=k {
                let t = binom[i] * a[i].value * b[k - i].value;
                value += t;
                scale += t.abs();
            }
            Term { value, scale }
        })
        .collect();
    let p = [(x * x + lambda * x + 12.0) / 12.0, (2.0 * x + lambda) / 12.0, 2.0 / 12.0];
    (0..=order)
        .map(|k| {
            let mut value = 0.0;
            let mut scale = 0.0;
            for (i, &pi) in p.iter().enumerate().take(k + 1) {
                let c = if i == 2 { (k * (k - 1) / 2) as f64 } else if i == 1 { k as f64 } else { 1.0 };
                let t = c * pi * g[k - i].value;
                value += t;
                scale += (c * pi * g[k - i].scale).abs();
            }
            Term { value, scale }
        })
        .collect()
}

/// `[x^{-n}] R_λ(x)` at infinity.
pub fn rational_series_coefficient(lambda: f64, n: usize) -> f64 {
    let sgn = |m: usize| if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut c = 0.0;
    if n >= 4 {
        c += sgn(n - 4) * (n as f64 - 3.0);
    }
    if n >= 5 {
        c += lambda * sgn(n - 5) * (n as f64 - 4.0);
    }
    if n >= 6 {
        c += 12.0 * sgn(n - 6) * (n as f64 - 5.0);
    }
    c / 12.0
}

/// `[x^{-n}] Ψ(x)` at infinity, `n = 0..=40`.
///
/// With `ψ'(x) ~ Σ aₙ x^{-n}` (`a₁ = 1`, `a₂ = 1/2`, `a_{2k+1} = B_{2k}`),
/// `cₙ = Σ_{i+j=n} aᵢaⱼ - (n-1)a_{n-1}`.
pub fn psi_series_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let n_max = INFINITY_SERIES_TERMS;
        let zero = || BigRational::from_integer(BigInt::zero());
        let mut a = vec![zero(); n_max + 1];
        a[1] = BigRational::from_integer(BigInt::from(1));
        a[2] = BigRational::new(BigInt::from(1), BigInt::from(2));
        let mut k = 1;
        while 2 * k + 1 <= n_max {
            a[2 * k + 1] = bernoulli_exact(2 * k).clone();
            k += 1;
        }
        (0..=n_max)
            .map(|n| {
                let mut c = zero();
                for i in 1..n {
                    c += &a[i] * &a[n - i];
                }
                if n >= 2 {
                    c -= BigRational::from_integer(BigInt::from(n - 1)) * &a[n - 1];
                }
                c.to_f64().unwrap_or(f64::NAN)
            })
            .collect()
    })
}

fn series_alpha_jet(coeffs: &[f64], alpha: f64, order: usize, x: f64) -> Vec<Term> {
    let ln_x = x.ln();
    (0..=order)
        .map(|k| {
            let mut value = 0.0;
            let mut scale = 0.0;
            for (n, &d) in coeffs.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let e = alpha - n as f64;
                let ff = falling(e, k)[k];
                let t = d * ff * ((e - k as f64) * ln_x).exp();
                value += t;
                scale += t.abs();
            }
            Term { value, scale }
        })
        .collect()
}
