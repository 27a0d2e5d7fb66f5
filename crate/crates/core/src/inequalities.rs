//! Rational bounds for `Ψ` and the family
//! `h_λ(x) = Ψ(x) - (x² + λx + 12)/(12x⁴(x+1)²)`.
//!
//! ```text
//! max{(x²+12)/(12x⁴(x+1)²), p(x)/(900x⁴(x+1)¹⁰)} < Ψ(x) < (x+12)/(12x⁴(x+1))
//! (x²+μx+12)/(12x⁴(x+1)²) < Ψ(x) < (x²+νx+12)/(12x⁴(x+1)²)  iff μ <= 0, ν >= 4
//! ```
//!
//! Margins are normalized by `max(1, scale)`, with `scale` the magnitude of
//! the terms behind each side, so a report passes exactly when its
//! `min_margin >= -tolerance`.

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{CatalogFunction, Term};
use crate::cmdeg::{degree_estimate, DegreeEstimate, Verdict, SIGN_TOL};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridSpec};

const P_COEFFS: [f64; 11] = [
    75.0, 900.0, 4840.0, 15370.0, 31865.0, 45050.0, 44101.0, 29700.0, 13290.0, 3600.0, 450.0,
];

/// `p(x) = 75x¹⁰ + 900x⁹ + … + 3600x + 450`.
pub fn p_poly(x: f64) -> f64 {
    P_COEFFS.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// `(x² + λx + 12)/(12x⁴(x+1)²)`.
pub fn rational_bound(x: f64, lambda: f64) -> f64 {
    (x * x + lambda * x + 12.0) / (12.0 * x.powi(4) * (x + 1.0).powi(2))
}

/// `p(x)/(900x⁴(x+1)¹⁰)`.
pub fn poly_lower_bound(x: f64) -> f64 {
    p_poly(x) / (900.0 * x.powi(4) * (x + 1.0).powi(10))
}

/// `(x+12)/(12x⁴(x+1))`.
pub fn sandwich_upper(x: f64) -> f64 {
    (x + 12.0) / (12.0 * x.powi(4) * (x + 1.0))
}

/// `h_λ(x)`.
pub fn h_lambda(x: f64, lambda: f64, ctx: &EvalContext) -> Result<f64> {
    CatalogFunction::HLambda(lambda).value(x, ctx)
}

/// One side of a bound that failed: `lhs < rhs` was expected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundWitness {
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub grid: GridSpec,
    pub min_margin: f64,
    pub verdict: Verdict,
    pub witnesses: Vec<BoundWitness>,
    /// Worst violations located by golden-section refinement (scans only).
    pub refined: Vec<BoundWitness>,
    pub tolerance: f64,
}

/// `rhs - lhs` normalized by the magnitude of its terms.
#[derive(Debug, Clone, Copy)]
struct Side {
    lhs: f64,
    rhs: f64,
    margin: f64,
}

fn side(lhs: f64, rhs: f64, diff: Term) -> Side {
    Side { lhs, rhs, margin: diff.value / diff.scale.max(1.0) }
}

fn assemble(bound_id: String, grid: &Grid, sides: Vec<Vec<Side>>) -> BoundReport {
    let mut min_margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    for (&x, cell) in grid.nodes().iter().zip(&sides) {
        for s in cell {
            min_margin = min_margin.min(s.margin);
            if s.margin < -SIGN_TOL {
                witnesses.push(BoundWitness { x, lhs: s.lhs, rhs: s.rhs });
            }
        }
    }
    BoundReport {
        bound_id,
        grid: grid.spec(),
        min_margin,
        verdict: Verdict::from_pass(witnesses.is_empty()),
        witnesses,
        refined: Vec::new(),
        tolerance: SIGN_TOL,
    }
}

fn psi_term(x: f64, ctx: &EvalContext) -> Result<Term> {
    Ok(CatalogFunction::Psi.alpha_jet(0.0, 0, x, ctx)?[0])
}

/// `h_λ(x)` with its scale, via the cancellation-free route at large `x`.
fn h_term(x: f64, lambda: f64, ctx: &EvalContext) -> Result<Term> {
    Ok(CatalogFunction::HLambda(lambda).alpha_jet(0.0, 0, x, ctx)?[0])
}

fn sandwich_sides(x: f64, ctx: &EvalContext) -> Result<Vec<Side>> {
    let psi = psi_term(x, ctx)?;
    let l1 = rational_bound(x, 0.0);
    let l2 = poly_lower_bound(x);
    let upper = sandwich_upper(x);
    let h0 = h_term(x, 0.0, ctx)?;
    let above_poly = Term { value: psi.value - l2, scale: psi.scale + l2 };
    let below_upper = Term { value: upper - psi.value, scale: psi.scale + upper };
    Ok(vec![side(l1, psi.value, h0), side(l2, psi.value, above_poly), side(psi.value, upper, below_upper)])
}

/// Both strict inequalities of the sandwich at every grid node.
pub fn sandwich_check(grid: &Grid, ctx: &EvalContext) -> Result<BoundReport> {
    let sides = grid
        .nodes()
        .par_iter()
        .map(|&x| sandwich_sides(x, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble("sandwich".into(), grid, sides))
}

/// The five numbers behind the sandwich at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichPoint {
    pub x: f64,
    pub rational_lower: f64,
    pub poly_lower: f64,
    pub psi: f64,
    pub upper: f64,
}

pub fn sandwich_point(x: f64, ctx: &EvalContext) -> Result<SandwichPoint> {
    Ok(SandwichPoint {
        x,
        rational_lower: rational_bound(x, 0.0),
        poly_lower: poly_lower_bound(x),
        psi: psi_term(x, ctx)?.value,
        upper: sandwich_upper(x),
    })
}

fn double_sides(x: f64, mu: f64, nu: f64, ctx: &EvalContext) -> Result<Vec<Side>> {
    let psi = psi_term(x, ctx)?.value;
    let lower = h_term(x, mu, ctx)?;
    let upper = h_term(x, nu, ctx)?;
    let neg_upper = Term { value: -upper.value, scale: upper.scale };
    Ok(vec![side(rational_bound(x, mu), psi, lower), side(psi, rational_bound(x, nu), neg_upper)])
}

/// `R_μ < Ψ < R_ν` on the grid.
pub fn double_inequality_check(mu: f64, nu: f64, grid: &Grid, ctx: &EvalContext) -> Result<BoundReport> {
    let sides = grid
        .nodes()
        .par_iter()
        .map(|&x| double_sides(x, mu, nu, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(format!("double(mu={mu},nu={nu})"), grid, sides))
}

/// Points of the violation scan.
pub const SCAN_POINTS: usize = 2000;
pub const SCAN_MIN: f64 = 1e-3;
pub const SCAN_MAX: f64 = 1e6;

/// [`double_inequality_check`] on 2000 log-spaced points in `[1e-3, 1e6]`,
/// followed by golden-section refinement of the worst violation of each side.
pub fn double_inequality_scan(mu: f64, nu: f64, ctx: &EvalContext) -> Result<BoundReport> {
    let grid = Grid::log(SCAN_MIN, SCAN_MAX, SCAN_POINTS)?;
    let mut report = double_inequality_check(mu, nu, &grid, ctx)?;
    let nodes = grid.nodes();
    for which in 0..2 {
        let margin = |x: f64| -> Result<f64> { Ok(double_sides(x, mu, nu, ctx)?[which].margin) };
        let margins = nodes.iter().map(|&x| margin(x)).collect::<Result<Vec<_>>>()?;
        let (worst, &m) = margins
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty scan");
        if m >= -SIGN_TOL {
            continue;
        }
        let a = nodes[worst.saturating_sub(1)];
        let b = nodes[(worst + 1).min(nodes.len() - 1)];
        let x = golden_section_min(|t| margin(t.exp()).unwrap_or(f64::INFINITY), a.ln(), b.ln(), 80).exp();
        let s = double_sides(x, mu, nu, ctx)?[which];
        report.refined.push(BoundWitness { x, lhs: s.lhs, rhs: s.rhs });
    }
    Ok(report)
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iterations: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd { c } else { d }
}

/// Outcome of one half of the conjecture probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ProbeOutcome {
    Bracket(DegreeEstimate),
    Invalid { reason: String },
}

impl ProbeOutcome {
    pub fn bracket(&self) -> Option<&DegreeEstimate> {
        match self {
            ProbeOutcome::Bracket(d) => Some(d),
            ProbeOutcome::Invalid { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureProbe {
    pub lambda: f64,
    pub mu: f64,
    /// `"characterized"` when `λ <= 0` and `μ >= 4`.
    pub regime: String,
    pub h: ProbeOutcome,
    pub neg_h: ProbeOutcome,
}

/// Settings for [`conjecture_probe_with`].
#[derive(Debug, Clone)]
pub struct ProbeSettings {
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    pub order: usize,
    pub grid: Grid,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        Self {
            lo: 0.0,
            hi: 8.0,
            tol: 0.1,
            order: 6,
            grid: Grid::log(1e-3, 1e6, 400).expect("valid probe grid"),
        }
    }
}

/// Brackets the completely monotonic degrees of `h_λ` and `-h_μ`.
/// Exploratory output only.
pub fn conjecture_probe(lambda: f64, mu: f64, ctx: &EvalContext) -> Result<ConjectureProbe> {
    conjecture_probe_with(lambda, mu, &ProbeSettings::default(), ctx)
}

pub fn conjecture_probe_with(lambda: f64, mu: f64, s: &ProbeSettings, ctx: &EvalContext) -> Result<ConjectureProbe> {
    let run = |f: CatalogFunction| -> Result<ProbeOutcome> {
        match degree_estimate(&f, s.lo, s.hi, s.tol, s.order, &s.grid, ctx) {
            Ok(d) => Ok(ProbeOutcome::Bracket(d)),
            Err(e @ (Error::BracketInvalid(_) | Error::NonConvergence(_))) => {
                Ok(ProbeOutcome::Invalid { reason: e.to_string() })
            }
            Err(e) => Err(e),
        }
    };
    let regime = if lambda <= 0.0 && mu >= 4.0 { "characterized" } else { "uncharacterized regime" };
    Ok(ConjectureProbe {
        lambda,
        mu,
        regime: regime.into(),
        h: run(CatalogFunction::HLambda(lambda))?,
        neg_h: run(CatalogFunction::NegHLambda(mu))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn p_values() {
        assert_eq!(p_poly(0.0), 450.0);
        assert_eq!(p_poly(1.0), 189241.0);
        assert_eq!(P_COEFFS.iter().sum::<f64>(), 189241.0);
        for x in [0.1, 1.0, 10.0] {
            assert!(p_poly(x) > 0.0);
        }
    }

    #[test]
    fn sandwich_at_one() {
        let p = sandwich_point(1.0, &ctx()).unwrap();
        assert!((p.rational_lower - 13.0 / 48.0).abs() < 1e-16);
        assert!((p.poly_lower - 189241.0 / 921600.0).abs() < 1e-16);
        assert!((p.upper - 13.0 / 24.0).abs() < 1e-16);
        assert!(p.poly_lower < p.rational_lower && p.rational_lower < p.psi && p.psi < p.upper);
    }

    #[test]
    fn sandwich_ratios_at_large_x() {
        let x = 1e3;
        let p = sandwich_point(x, &ctx()).unwrap();
        for b in [p.rational_lower, p.poly_lower, p.upper] {
            let r = b / p.psi;
            assert!((0.99..=1.01).contains(&r), "{r}");
        }
    }

    #[test]
    fn sandwich_passes_on_default_grid() {
        let r = sandwich_check(&Grid::default_check(), &ctx()).unwrap();
        assert!(r.verdict.is_pass(), "{:?}", r.witnesses.first());
        assert!(r.min_margin >= -r.tolerance);
    }

    #[test]
    fn admissible_double_inequality_passes() {
        let r = double_inequality_check(0.0, 4.0, &Grid::default_check(), &ctx()).unwrap();
        assert!(r.verdict.is_pass(), "{:?}", r.witnesses.first());
    }

    #[test]
    fn lower_parameter_above_zero_fails_near_origin() {
        let r = double_inequality_scan(0.5, 4.0, &ctx()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.refined.len(), 1);
        let w = r.refined[0];
        assert!(w.x < 0.2, "{w:?}");
        assert!(w.lhs >= w.rhs);
    }

    #[test]
    fn upper_parameter_below_four_fails_at_large_x() {
        let r = double_inequality_scan(0.0, 3.5, &ctx()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.refined.len(), 1);
        let w = r.refined[0];
        assert!(w.x > 1.0, "{w:?}");
        assert!(w.lhs >= w.rhs);
        assert!(r.witnesses.iter().all(|w| w.x > 1.0));
    }

    #[test]
    fn h_family_signs() {
        let c = ctx();
        for &x in Grid::default_check().nodes() {
            assert!(h_lambda(x, 0.0, &c).unwrap() > 0.0, "h_0({x})");
            assert!(h_lambda(x, 4.0, &c).unwrap() < 0.0, "h_4({x})");
        }
    }

    #[test]
    fn upper_refines_sandwich_upper() {
        for &x in Grid::default_check().nodes() {
            assert!(rational_bound(x, 4.0) <= sandwich_upper(x));
        }
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section_min(|t| (t - 0.3).powi(2), -1.0, 2.0, 100);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn conjecture_probe_brackets() {
        // h₀ ≈ (2ζ(2) - 37/12)/x² and -h₄ ≈ 1/(3x³) near the origin, which
        // caps the degrees at 2 and 3 there.
        let settings = ProbeSettings { grid: Grid::log(1e-3, 1e6, 120).unwrap(), ..Default::default() };
        let p = conjecture_probe_with(0.0, 4.0, &settings, &ctx()).unwrap();
        assert_eq!(p.regime, "characterized");
        let h = p.h.bracket().expect("bracket for h_0");
        assert!(h.lo >= 0.0);
        assert!(h.contains(2.0) || (h.lo - 2.0).abs() < 0.15, "{h:?}");
        let g = p.neg_h.bracket().expect("bracket for -h_4");
        assert!(g.contains(3.0) || (g.lo - 3.0).abs() < 0.15, "{g:?}");
    }

    #[test]
    fn probe_labels_uncharacterized_regime() {
        let settings = ProbeSettings { grid: Grid::log(1e-2, 1e3, 30).unwrap(), ..Default::default() };
        let p = conjecture_probe_with(2.0, 2.0, &settings, &ctx()).unwrap();
        assert_eq!(p.regime, "uncharacterized regime");
    }

    proptest! {
        #[test]
        fn h_is_decreasing_in_lambda(x in 0.01f64..100.0, l1 in -5.0f64..5.0, dl in 0.1f64..3.0) {
            let c = ctx();
            let a = h_lambda(x, l1, &c).unwrap();
            let b = h_lambda(x, l1 + dl, &c).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn p_is_positive(x in 0.0f64..1e3) {
            prop_assert!(p_poly(x) > 0.0);
        }
    }
}
