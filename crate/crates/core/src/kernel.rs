//! The convolution kernel behind `Ψ(x) = [ψ'(x)]² + ψ''(x) = ∫₀^∞ q(t) e^{-xt} dt`.
//!
//! `σ(s) = s / (1 - e^{-s})` (with `σ(0) = 1`) and
//! `q(t) = ∫₀ᵗ σ(s) σ(t-s) ds - t σ(t)`. Differentiating under the integral
//! and integrating by parts gives
//!
//! ```text
//! q'(t)   = ∫₀ᵗ σ(s) σ'(t-s) ds  - t σ'(t)
//! q''(t)  = ∫₀ᵗ σ'(s) σ'(t-s) ds - t σ''(t)
//! q'''(t) = ∫₀ᵗ σ'(s) σ''(t-s) ds + σ'(t)/2 - σ''(t) - t σ'''(t)
//! q⁗(t)  = ∫₀ᵗ σ''(s) σ''(t-s) ds + σ''(t) - 2σ'''(t) - t σ⁗(t)
//! ```
//!
//! so `q(0) = q'(0) = q''(0) = 0` and `q'''(0) = σ'(0)²  = 1/4 - 1/6 = 1/12`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::bernoulli::bernoulli_exact;
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::quad;

/// Highest Maclaurin power kept for σ; covers 20 nonzero coefficients.
const SIGMA_SERIES_DEGREE: usize = 36;

/// Largest `s` for which [`h_chain`] is finite: `e^{4s}` must not overflow.
pub const H_CHAIN_MAX_S: f64 = 177.0;

/// `b_k / k!` where `b_k` are Bernoulli numbers with `b_1 = +1/2`.
fn sigma_coefficients() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut fact = BigInt::one();
        (0..=SIGMA_SERIES_DEGREE)
            .map(|k| {
                if k > 0 {
                    fact *= BigInt::from(k);
                }
                let mut b = bernoulli_exact(k).clone();
                if k == 1 {
                    b = -b;
                }
                (b / BigRational::from_integer(fact.clone()))
                    .to_f64()
                    .unwrap_or(0.0)
            })
            .collect()
    })
}

fn sigma_series(k: usize, s: f64) -> f64 {
    let c = sigma_coefficients();
    // Σ_{j>=k} c_j j!/(j-k)! s^{j-k}, Horner from the top
    let mut acc = 0.0;
    for j in (k..=SIGMA_SERIES_DEGREE).rev() {
        let falling: f64 = ((j - k + 1)..=j).map(|m| m as f64).product();
        acc = acc * s + c[j] * falling;
    }
    acc
}

// Closed forms in u = e^{-s}, valid for s > 0.
fn sigma_closed(k: usize, s: f64) -> f64 {
    let u = (-s).exp();
    let d = -(-s).exp_m1();
    match k {
        0 => s / d,
        1 => (d - s * u) / (d * d),
        2 => u * ((s - 2.0) + (s + 2.0) * u) / d.powi(3),
        3 => -u * ((s - 3.0) + u * (4.0 * s + (s + 3.0) * u)) / d.powi(4),
        4 => {
            u * ((s - 4.0) + u * ((11.0 * s - 12.0) + u * ((11.0 * s + 12.0) + (s + 4.0) * u)))
                / d.powi(5)
        }
        _ => unreachable!("sigma derivative order is checked by callers"),
    }
}

fn sigma_k(k: usize, s: f64, ctx: &EvalContext) -> f64 {
    if s.abs() < ctx.series_radius() {
        return sigma_series(k, s);
    }
    if s > 0.0 {
        return sigma_closed(k, s);
    }
    // σ(s) - σ(-s) = s: σ', σ''' odd-reflect around 1/2 and 0, σ'', σ⁗ even
    let r = sigma_closed(k, -s);
    match k {
        0 => s + r,
        1 => 1.0 - r,
        2 | 4 => r,
        3 => -r,
        _ => unreachable!(),
    }
}

/// `σ(s) = s/(1 - e^{-s})`, `σ(0) = 1`. Total on the real line.
pub fn sigma(s: f64, ctx: &EvalContext) -> f64 {
    sigma_k(0, s, ctx)
}

/// `σ⁽ᵏ⁾(s)` for `k` in `1..=4`.
pub fn sigma_deriv(k: u32, s: f64, ctx: &EvalContext) -> Result<f64> {
    if !(1..=4).contains(&k) {
        return Err(Error::Domain(format!("sigma derivative order must be 1..=4, got {k}")));
    }
    Ok(sigma_k(k as usize, s, ctx))
}

/// `[σ, σ', σ'', σ''', σ⁗]` at `s`.
pub fn sigma_jet(s: f64, ctx: &EvalContext) -> [f64; 5] {
    std::array::from_fn(|k| sigma_k(k, s, ctx))
}

/// `∫₀ᵗ σ⁽ⁱ⁾(s) σ⁽ʲ⁾(t-s) ds`, split at `t/2`.
fn convolution(i: usize, j: usize, t: f64, ctx: &EvalContext) -> Result<f64> {
    let half = 0.5 * t;
    let tol = ctx.quad_rel_tol();
    let integrand = |s: f64| sigma_k(i, s, ctx) * sigma_k(j, t - s, ctx);
    if i == j {
        // symmetric about t/2
        let r = quad::integrate(integrand, 0.0, half, tol)?;
        return Ok(2.0 * r.value);
    }
    let r = quad::integrate_with_breaks(integrand, &[0.0, half, t], tol, 0.0, quad::DEFAULT_MAX_SUBDIVISIONS)?;
    Ok(r.value)
}

/// `q⁽ᵏ⁾(t)` for `k` in `0..=4`, `t > 0`.
pub fn q_deriv(k: u32, t: f64, ctx: &EvalContext) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("q_deriv needs t > 0, got {t}")));
    }
    let sig = sigma_jet(t, ctx);
    let value = match k {
        0 => convolution(0, 0, t, ctx)? - t * sig[0],
        1 => convolution(0, 1, t, ctx)? - t * sig[1],
        2 => convolution(1, 1, t, ctx)? - t * sig[2],
        3 => convolution(1, 2, t, ctx)? + 0.5 * sig[1] - sig[2] - t * sig[3],
        4 => convolution(2, 2, t, ctx)? + q4_tail(t, &sig),
        _ => return Err(Error::Domain(format!("q derivative order must be 0..=4, got {k}"))),
    };
    Ok(value)
}

fn q4_tail(t: f64, sig: &[f64; 5]) -> f64 {
    sig[2] - 2.0 * sig[3] - t * sig[4]
}

/// Lower bound for `q⁗(t)` obtained by replacing the convolution with
/// `t σ''(0) σ''(t) = t σ''(t)/6`.
pub fn q4_lower_bound(t: f64, ctx: &EvalContext) -> f64 {
    let sig = sigma_jet(t, ctx);
    t * sig[2] / 6.0 + q4_tail(t, &sig)
}

/// Point evaluation of the kernel quantities at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub t: f64,
    pub sigma: f64,
    /// `σ'(t) … σ⁗(t)`
    pub dsigma: [f64; 4],
    pub q4: f64,
    /// `[ln σ''(t)]''`
    pub logconc: f64,
}

pub fn kernel_sample(t: f64, ctx: &EvalContext) -> Result<KernelSample> {
    let jet = sigma_jet(t, ctx);
    Ok(KernelSample {
        t,
        sigma: jet[0],
        dsigma: [jet[1], jet[2], jet[3], jet[4]],
        q4: q_deriv(4, t, ctx)?,
        logconc: log_concavity(t, ctx)?,
    })
}

/// The positivity cascade used to show `σ''` is log-concave.
///
/// `h₁' = 4 h₂ eˢ` and `h₂''' = h₃ eˢ`; every member vanishes at `s = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HChain {
    pub h1: f64,
    pub h1_d1: f64,
    pub h2: f64,
    pub h2_d1: f64,
    pub h2_d2: f64,
    pub h2_d3: f64,
    pub h3: f64,
    pub h3_d1: f64,
    pub h3_d2: f64,
}

impl HChain {
    pub const NAMES: [&'static str; 9] =
        ["h1", "h1'", "h2", "h2'", "h2''", "h2'''", "h3", "h3'", "h3''"];

    pub fn values(&self) -> [f64; 9] {
        [
            self.h1, self.h1_d1, self.h2, self.h2_d1, self.h2_d2, self.h2_d3, self.h3, self.h3_d1,
            self.h3_d2,
        ]
    }
}

fn check_h_arg(s: f64) -> Result<()> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("h-chain needs s >= 0, got {s}")));
    }
    if s > H_CHAIN_MAX_S {
        return Err(Error::Overflow(format!(
            "h-chain at s = {s} overflows (limit {H_CHAIN_MAX_S})"
        )));
    }
    Ok(())
}

// Each cascade member as Σ c·sᵖ·e^{ms}, entries (c, p, m).
type ExpPoly = &'static [(i64, u32, u32)];

const H_TERMS: [ExpPoly; 9] = [
    &[(1, 0, 4), (-4, 2, 3), (12, 1, 3), (-16, 0, 3), (-4, 2, 2), (30, 0, 2), (-4, 2, 1), (-12, 1, 1), (-16, 0, 1), (1, 0, 0)],
    &[(4, 0, 4), (-12, 2, 3), (28, 1, 3), (-36, 0, 3), (-8, 2, 2), (-8, 1, 2), (60, 0, 2), (-4, 2, 1), (-20, 1, 1), (-28, 0, 1)],
    &[(1, 0, 3), (-3, 2, 2), (7, 1, 2), (-9, 0, 2), (-2, 2, 1), (-2, 1, 1), (15, 0, 1), (-1, 2, 0), (-5, 1, 0), (-7, 0, 0)],
    &[(3, 0, 3), (-6, 2, 2), (8, 1, 2), (-11, 0, 2), (-2, 2, 1), (-6, 1, 1), (13, 0, 1), (-2, 1, 0), (-5, 0, 0)],
    &[(9, 0, 3), (-12, 2, 2), (4, 1, 2), (-14, 0, 2), (-2, 2, 1), (-10, 1, 1), (7, 0, 1), (-2, 0, 0)],
    &[(27, 0, 3), (-24, 2, 2), (-16, 1, 2), (-24, 0, 2), (-2, 2, 1), (-14, 1, 1), (-3, 0, 1)],
    &[(27, 0, 2), (-24, 2, 1), (-16, 1, 1), (-24, 0, 1), (-2, 2, 0), (-14, 1, 0), (-3, 0, 0)],
    &[(54, 0, 2), (-24, 2, 1), (-64, 1, 1), (-40, 0, 1), (-4, 1, 0), (-14, 0, 0)],
    &[(108, 0, 2), (-24, 2, 1), (-112, 1, 1), (-104, 0, 1), (-4, 0, 0)],
];

const H_SERIES_DEGREE: usize = 64;
const H_SERIES_RADIUS: f64 = 2.0;

fn exp_poly_series(terms: ExpPoly) -> Vec<f64> {
    (0..=H_SERIES_DEGREE as u32)
        .map(|k| {
            let mut c = BigRational::from_integer(BigInt::from(0));
            for &(coeff, p, m) in terms {
                if k < p {
                    continue;
                }
                let j = k - p;
                let fact: BigInt = (1..=j).map(BigInt::from).product();
                c += BigRational::new(BigInt::from(coeff) * BigInt::from(m).pow(j), fact);
            }
            c.to_f64().unwrap_or(0.0)
        })
        .collect()
}

fn h_series_tables() -> &'static [Vec<f64>; 9] {
    static TABLES: OnceLock<[Vec<f64>; 9]> = OnceLock::new();
    TABLES.get_or_init(|| H_TERMS.map(exp_poly_series))
}

/// All nine cascade values at `s`.
///
/// Below `s = 2` the exponential polynomials cancel to `O(s⁴…s⁸)`, so they
/// are summed from exact Maclaurin coefficients there.
pub fn h_chain(s: f64) -> Result<HChain> {
    check_h_arg(s)?;
    if s < H_SERIES_RADIUS {
        let v = h_series_tables().each_ref().map(|c| c.iter().rev().fold(0.0, |acc, &a| acc * s + a));
        return Ok(HChain {
            h1: v[0],
            h1_d1: v[1],
            h2: v[2],
            h2_d1: v[3],
            h2_d2: v[4],
            h2_d3: v[5],
            h3: v[6],
            h3_d1: v[7],
            h3_d2: v[8],
        });
    }
    let e = s.exp();
    let s2 = s * s;
    let h1 = (((e - 4.0 * (s2 - 3.0 * s + 4.0)) * e - (4.0 * s2 - 30.0)) * e
        - 4.0 * (s2 + 3.0 * s + 4.0))
        * e
        + 1.0;
    let h2 = ((e - (3.0 * s2 - 7.0 * s + 9.0)) * e - (2.0 * s2 + 2.0 * s - 15.0)) * e
        - s2
        - 5.0 * s
        - 7.0;
    let h2_d1 = ((3.0 * e - (6.0 * s2 - 8.0 * s + 11.0)) * e - (2.0 * s2 + 6.0 * s - 13.0)) * e
        - 2.0 * s
        - 5.0;
    let h2_d2 = ((9.0 * e - 2.0 * (6.0 * s2 - 2.0 * s + 7.0)) * e - (2.0 * s2 + 10.0 * s - 7.0)) * e
        - 2.0;
    let h3 = (27.0 * e - 8.0 * (3.0 * s2 + 2.0 * s + 3.0)) * e - 2.0 * s2 - 14.0 * s - 3.0;
    let h3_d1 = (54.0 * e - 8.0 * (3.0 * s2 + 8.0 * s + 5.0)) * e - 2.0 * (2.0 * s + 7.0);
    let h3_d2 = 4.0 * ((27.0 * e - 2.0 * (3.0 * s2 + 14.0 * s + 13.0)) * e - 1.0);
    Ok(HChain {
        h1,
        h1_d1: 4.0 * h2 * e,
        h2,
        h2_d1,
        h2_d2,
        h2_d3: h3 * e,
        h3,
        h3_d1,
        h3_d2,
    })
}

/// `h₃'''(s) = 8(27eˢ - 3s² - 20s - 27)eˢ`, the last link of the cascade.
pub fn h3_third(s: f64) -> Result<f64> {
    check_h_arg(s)?;
    let e = s.exp();
    Ok(8.0 * (27.0 * e - 3.0 * s * s - 20.0 * s - 27.0) * e)
}

/// `[ln σ''(s)]''` for `s >= 0`.
///
/// Uses `-h₁(s) / ((eˢ-1)² [(s-2)eˢ + s + 2]²)`, rescaled by `e^{-4s}`, for
/// `s >= series_radius`, and `(σ⁗σ'' - σ'''²)/σ''²` from the Maclaurin branch
/// below it, where the closed form is `0/0`.
pub fn log_concavity(s: f64, ctx: &EvalContext) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("log_concavity needs s >= 0, got {s}")));
    }
    if s < ctx.series_radius() {
        let j = sigma_jet(s, ctx);
        return Ok((j[4] * j[2] - j[3] * j[3]) / (j[2] * j[2]));
    }
    let u = (-s).exp();
    let d = -(-s).exp_m1();
    let s2 = s * s;
    let numer = 1.0
        - u * (4.0 * (s2 - 3.0 * s + 4.0)
            + u * ((4.0 * s2 - 30.0) + u * (4.0 * (s2 + 3.0 * s + 4.0) - u)));
    let inner = (s - 2.0) + (s + 2.0) * u;
    Ok(-numer / (d * d * inner * inner))
}

/// `(A, B, C)` with `A = ∫₀ᵗ σ''(s)σ''(t-s) ds`,
/// `B = t exp[(2/t) ∫₀ᵗ ln σ''(u) du]` and `C = t σ''(t)/6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionBound {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ConvolutionBound {
    /// `A >= B >= C`, each comparison allowed a relative slack of `rel_slack`.
    pub fn ordered(&self, rel_slack: f64) -> bool {
        self.a >= self.b * (1.0 - rel_slack) && self.b >= self.c * (1.0 - rel_slack)
    }
}

pub fn convolution_bound_check(t: f64, ctx: &EvalContext) -> Result<ConvolutionBound> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("convolution bound needs t > 0, got {t}")));
    }
    let a = convolution(2, 2, t, ctx)?;
    let log_int = quad::integrate(|u| sigma_k(2, u, ctx).ln(), 0.0, t, ctx.quad_rel_tol())?;
    let b = t * (2.0 / t * log_int.value).exp();
    let c = t * sigma_k(2, t, ctx) / 6.0;
    Ok(ConvolutionBound { t, a, b, c })
}

/// A function together with its first two derivatives.
pub trait TwiceDifferentiable {
    fn value(&self, x: f64) -> f64;
    fn first(&self, x: f64) -> f64;
    fn second(&self, x: f64) -> f64;
}

/// Adapter for three closures `(f, f', f'')`.
pub struct FnTriple<F, G, H>(pub F, pub G, pub H);

impl<F, G, H> TwiceDifferentiable for FnTriple<F, G, H>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.0)(x)
    }
    fn first(&self, x: f64) -> f64 {
        (self.1)(x)
    }
    fn second(&self, x: f64) -> f64 {
        (self.2)(x)
    }
}

/// `u ↦ ln σ''(u)`, the function the averaging bounds are applied to.
#[derive(Debug, Clone, Copy)]
pub struct LnSigmaSecond<'a>(pub &'a EvalContext);

impl TwiceDifferentiable for LnSigmaSecond<'_> {
    fn value(&self, x: f64) -> f64 {
        sigma_k(2, x, self.0).ln()
    }
    fn first(&self, x: f64) -> f64 {
        sigma_k(3, x, self.0) / sigma_k(2, x, self.0)
    }
    fn second(&self, x: f64) -> f64 {
        log_concavity(x.abs(), self.0).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HhViolation {
    pub inequality: &'static str,
    /// Signed slack; negative means the inequality failed.
    pub margin: f64,
}

/// Both two-sided averaging bounds evaluated for one `f` on `[a, b]`.
///
/// `gap = (1/(b-a))∫f - (f(a)+f(b))/2` should lie in `[gap_lower, gap_upper]`
/// and `-gap` in `[ujevic_lower, ujevic_upper]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HhBounds {
    pub gap: f64,
    pub s2: f64,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub ujevic_lower: f64,
    pub ujevic_upper: f64,
    pub violations: Vec<HhViolation>,
}

impl HhBounds {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn hh_bounds_check<F: TwiceDifferentiable>(
    f: &F,
    a: f64,
    b: f64,
    m: f64,
    big_m: f64,
    ctx: &EvalContext,
) -> Result<HhBounds> {
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    if !(m <= big_m) {
        return Err(Error::Domain(format!("need m <= M, got m = {m}, M = {big_m}")));
    }
    let width = b - a;
    let integral = quad::integrate(|x| f.value(x), a, b, ctx.quad_rel_tol())?;
    let avg = integral.value / width;
    let ends = 0.5 * (f.value(a) + f.value(b));
    let gap = avg - ends;
    let s2 = (f.first(b) - f.first(a)) / width;
    let w2 = width * width;
    let bounds = HhBounds {
        gap,
        s2,
        gap_lower: (2.0 * m - 3.0 * s2) * w2 / 12.0,
        gap_upper: (2.0 * big_m - 3.0 * s2) * w2 / 12.0,
        ujevic_lower: (3.0 * s2 - big_m) * w2 / 24.0,
        ujevic_upper: (3.0 * s2 - m) * w2 / 24.0,
        violations: Vec::new(),
    };
    let scale = [gap, bounds.gap_lower, bounds.gap_upper, ends, avg]
        .iter()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let slack = 1e-12 * scale + integral.abs_err / width;
    let checks = [
        ("gap >= lower", gap - bounds.gap_lower),
        ("gap <= upper", bounds.gap_upper - gap),
        ("-gap >= ujevic lower", -gap - bounds.ujevic_lower),
        ("-gap <= ujevic upper", bounds.ujevic_upper + gap),
    ];
    let violations = checks
        .iter()
        .filter(|(_, margin)| *margin < -slack)
        .map(|&(inequality, margin)| HhViolation { inequality, margin })
        .collect();
    Ok(HhBounds { violations, ..bounds })
}

/// Grid-scan range of `f''` over the interior of `[a, b]`, widened by 10% of
/// each endpoint's magnitude.
pub fn second_derivative_range<F: TwiceDifferentiable>(f: &F, a: f64, b: f64, points: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 1..=points {
        let x = a + (b - a) * i as f64 / (points + 1) as f64;
        let v = f.second(x);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo - 0.1 * lo.abs(), hi + 0.1 * hi.abs())
}

/// Result of sampling `x ↦ σ''(x)σ''(λ-x)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductMonotonicity {
    pub lambda: f64,
    pub verdict: bool,
    pub values: Vec<f64>,
    /// Grid indices `i` where the step `i -> i+1` broke the expected direction.
    pub violations: Vec<usize>,
}

/// Checks that the product is non-decreasing on the part of `grid` below
/// `λ/2` and non-increasing above it.
pub fn product_monotonicity_check(lambda: f64, grid: &[f64], ctx: &EvalContext) -> Result<ProductMonotonicity> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    if grid.iter().any(|&x| !(x > 0.0 && x < lambda)) {
        return Err(Error::Domain("grid points must lie in (0, lambda)".into()));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("grid must be sorted".into()));
    }
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| sigma_k(2, x, ctx) * sigma_k(2, lambda - x, ctx))
        .collect();
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    let slack = 1e-12 * scale;
    let mid = 0.5 * lambda;
    let violations: Vec<usize> = (0..grid.len().saturating_sub(1))
        .filter(|&i| {
            let step = values[i + 1] - values[i];
            if grid[i + 1] <= mid {
                step < -slack
            } else if grid[i] >= mid {
                step > slack
            } else {
                false
            }
        })
        .collect();
    Ok(ProductMonotonicity {
        lambda,
        verdict: violations.is_empty(),
        values,
        violations,
    })
}

/// A grid point where one member of the positivity chain had the wrong sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainFailure {
    pub s: f64,
    pub quantity: String,
    pub value: f64,
}

/// The sign facts behind `q⁗ > 0`, sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityChain {
    pub grid: crate::grid::GridSpec,
    pub verdict: bool,
    pub failures: Vec<ChainFailure>,
    pub convolution: Vec<ConvolutionBound>,
    pub convolution_ordered: bool,
}

/// Points at which the convolution ordering `A >= B >= C` is sampled.
pub const CONVOLUTION_POINTS: [f64; 4] = [0.1, 1.0, 5.0, 10.0];

/// Nine h-chain members `>= 0`, `[ln σ'']'' < 0` and `q⁗ > 0` at every node,
/// plus the convolution ordering at [`CONVOLUTION_POINTS`].
///
/// The h-chain slack is `1e-12 · max(1, |value at the grid median|)` per member.
pub fn positivity_chain(grid: &crate::grid::Grid, ctx: &EvalContext) -> Result<PositivityChain> {
    use rayon::prelude::*;

    let nodes = grid.nodes();
    let rows: Vec<([f64; 9], f64, f64)> = nodes
        .par_iter()
        .map(|&s| Ok((h_chain(s)?.values(), log_concavity(s, ctx)?, q_deriv(4, s, ctx)?)))
        .collect::<Result<_>>()?;
    let median = rows[rows.len() / 2].0;
    let mut failures = Vec::new();
    for (&s, (h, lc, q4)) in nodes.iter().zip(&rows) {
        for (i, (&v, name)) in h.iter().zip(HChain::NAMES).enumerate() {
            if v < -1e-12 * median[i].abs().max(1.0) {
                failures.push(ChainFailure { s, quantity: name.to_string(), value: v });
            }
        }
        if !(*lc < 0.0) {
            failures.push(ChainFailure { s, quantity: "logconc".into(), value: *lc });
        }
        if !(*q4 > 0.0) {
            failures.push(ChainFailure { s, quantity: "q4".into(), value: *q4 });
        }
    }
    let convolution = CONVOLUTION_POINTS
        .iter()
        .map(|&t| convolution_bound_check(t, ctx))
        .collect::<Result<Vec<_>>>()?;
    let convolution_ordered = convolution.iter().all(|c| c.ordered(10.0 * ctx.quad_rel_tol()));
    Ok(PositivityChain {
        grid: grid.spec(),
        verdict: failures.is_empty() && convolution_ordered,
        failures,
        convolution,
        convolution_ordered,
    })
}
