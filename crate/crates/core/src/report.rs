//! JSON envelopes and the built-in verification suite.

use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::CatalogFunction;
use crate::cmdeg::{cm_check, degree_estimate, laplace_identity_check, phi, psi_capital};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::inequalities::{double_inequality_check, double_inequality_scan, h_lambda, sandwich_check, sandwich_point};
use crate::kernel::{positivity_chain, q_deriv};
use crate::polygamma::{polygamma, polygamma_integral};
use crate::series::{q_coefficient, q_positivity, q_series_sum, quadratic_larger_roots, theta, Q_QUADRATICS};
use crate::strongcm::{equivalence_test, induction_chain_check, x_times_cm_check};

/// Version of the JSON layout.
pub const SCHEMA: u32 = 1;

/// `{"schema": 1, "command": …, "result": …}`.
pub fn envelope<T: Serialize>(command: &str, result: &T) -> Value {
    json!({ "schema": SCHEMA, "command": command, "result": result })
}

/// `{"schema": 1, "command": …, "error": {"kind": …, "message": …}}`.
pub fn error_envelope(command: &str, err: &Error) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "error": { "kind": error_kind(err), "message": err.to_string() },
    })
}

pub fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Domain(_) => "domain",
        Error::Overflow(_) => "overflow",
        Error::InvalidContext(_) => "invalid_context",
        Error::QuadratureNonConvergence { .. } => "quadrature_nonconvergence",
        Error::CatalogMiss(_) => "catalog_miss",
        Error::OrderTooHigh { .. } => "order_too_high",
        Error::BracketInvalid(_) => "bracket_invalid",
        Error::NonConvergence(_) => "nonconvergence",
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionResult>,
    pub all_pass: bool,
}

const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
const ZETA3: f64 = 1.202_056_903_159_594_3;

type Check = fn(&EvalContext) -> Result<(bool, Value)>;

/// Runs every numbered check. A numeric error marks its criterion as failed
/// and is recorded in the detail.
pub fn run_suite(ctx: &EvalContext) -> SuiteReport {
    let checks: [(u32, &str, Check); 11] = [
        (1, "Q table exactness", q_table),
        (2, "Q positivity and quadratic roots", q_roots),
        (3, "kernel values at the origin", kernel_origin),
        (4, "positivity chain", chain),
        (5, "theta series identity", theta_series),
        (6, "Laplace identity", laplace),
        (7, "main theorem at desk scale", main_theorem),
        (8, "phi limit", phi_limit),
        (9, "inequality suite", inequalities),
        (10, "strong CM equivalence", strong_cm),
        (11, "polygamma accuracy", polygamma_accuracy),
    ];
    let criteria: Vec<CriterionResult> = checks
        .iter()
        .map(|&(id, name, check)| {
            let (pass, detail) = match check(ctx) {
                Ok(r) => r,
                Err(e) => (false, json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } })),
            };
            CriterionResult { id, name: name.into(), pass, detail }
        })
        .collect();
    let all_pass = criteria.iter().all(|c| c.pass);
    SuiteReport { criteria, all_pass }
}

const Q_GOLDEN: [i64; 8] = [840, 4968, 16296, 39888, 104040, 472824, 2962344, 17643744];

fn q_table(_: &EvalContext) -> Result<(bool, Value)> {
    let values: Vec<String> = (5..=12).map(|k| q_coefficient(k).to_string()).collect();
    let pass = values.iter().zip(Q_GOLDEN).all(|(v, e)| *v == e.to_string());
    Ok((pass, json!({ "q": values })))
}

fn q_roots(_: &EvalContext) -> Result<(bool, Value)> {
    let table = q_positivity(200)?;
    let roots = quadratic_larger_roots();
    let residuals: Vec<f64> = Q_QUADRATICS.iter().zip(roots).map(|(q, r)| q.eval(r) / (q.a as f64 * r * r)).collect();
    let shown: Vec<String> = roots.iter().map(|r| format!("{r:.4}")).collect();
    let prefixes_ok = ["0.8", "4.4", "12.9"].iter().zip(&shown).all(|(p, s)| s.starts_with(p));
    let pass = table.all_positive && residuals.iter().all(|r| r.abs() <= 1e-12) && prefixes_ok;
    Ok((pass, json!({ "all_positive": table.all_positive, "roots": shown, "relative_residuals": residuals })))
}

fn kernel_origin(ctx: &EvalContext) -> Result<(bool, Value)> {
    let t = 1e-3;
    let q: Vec<f64> = (0..=3).map(|k| q_deriv(k, t, ctx)).collect::<Result<_>>()?;
    let pass = (q[3] - 1.0 / 12.0).abs() <= 1e-3 && q[..3].iter().all(|v| v.abs() <= 1e-6);
    Ok((pass, json!({ "t": t, "q": q })))
}

fn chain(ctx: &EvalContext) -> Result<(bool, Value)> {
    let r = positivity_chain(&Grid::log(1e-3, 30.0, 200)?, ctx)?;
    Ok((r.verdict, serde_json::to_value(&r).expect("serializable")))
}

fn theta_series(_: &EvalContext) -> Result<(bool, Value)> {
    let mut rows = Vec::new();
    let mut pass = theta(0.0)? == 0.0;
    for t in [0.25, 0.5, 1.0, 2.0] {
        let th = theta(t)?;
        let series = q_series_sum(t, 60);
        let rel = ((th - series) / th).abs();
        pass &= rel <= 1e-10;
        rows.push(json!({ "t": t, "theta": th, "q_series": series, "rel_err": rel }));
    }
    Ok((pass, json!({ "rows": rows })))
}

fn laplace(ctx: &EvalContext) -> Result<(bool, Value)> {
    let rows = [1.0, 2.0, 5.0].iter().map(|&x| laplace_identity_check(x, ctx)).collect::<Result<Vec<_>>>()?;
    let pass = rows.iter().all(|r| r.rel_err <= 1e-6);
    Ok((pass, serde_json::to_value(&rows).expect("serializable")))
}

fn main_theorem(ctx: &EvalContext) -> Result<(bool, Value)> {
    let at_four = cm_check(&CatalogFunction::Psi, 4.0, 10, &Grid::default_check(), ctx)?;
    let above = cm_check(&CatalogFunction::Psi, 4.5, 1, &Grid::log(1.0, 1e5, 400)?, ctx)?;
    let degree = degree_estimate(&CatalogFunction::Psi, 0.0, 8.0, 0.1, 6, &Grid::default_degree(), ctx)?;
    let pass = at_four.verdict.is_pass()
        && !above.verdict.is_pass()
        && !above.witnesses.is_empty()
        && (3.8..=4.2).contains(&degree.midpoint());
    Ok((
        pass,
        json!({
            "alpha_4": { "verdict": at_four.verdict, "witnesses": at_four.witnesses.len() },
            "alpha_4_5": { "verdict": above.verdict, "witnesses": above.witnesses.len(),
                           "first_witness": above.witnesses.first() },
            "degree": degree,
        }),
    ))
}

fn phi_limit(ctx: &EvalContext) -> Result<(bool, Value)> {
    let values: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&x| phi(x, ctx)).collect::<Result<_>>()?;
    let d: Vec<f64> = values.iter().map(|v| (v - 4.0).abs()).collect();
    let pass = d[2] <= 0.05 && d[0] > d[1] && d[1] > d[2];
    Ok((pass, json!({ "x": [10.0, 100.0, 1000.0], "phi": values })))
}

fn inequalities(ctx: &EvalContext) -> Result<(bool, Value)> {
    let grid = Grid::default_check();
    let sandwich = sandwich_check(&grid, ctx)?;
    let p = sandwich_point(1.0, ctx)?;
    let ordered = p.poly_lower < p.rational_lower && p.rational_lower < p.psi && p.psi < p.upper;
    let admissible = double_inequality_check(0.0, 4.0, &grid, ctx)?;
    let low = double_inequality_scan(0.5, 4.0, ctx)?;
    let high = double_inequality_scan(0.0, 3.5, ctx)?;
    let mut signs = true;
    for &x in grid.nodes() {
        signs &= h_lambda(x, 0.0, ctx)? > 0.0 && h_lambda(x, 4.0, ctx)? < 0.0;
    }
    let pass = sandwich.verdict.is_pass()
        && ordered
        && admissible.verdict.is_pass()
        && !low.verdict.is_pass()
        && !low.refined.is_empty()
        && !high.verdict.is_pass()
        && !high.refined.is_empty()
        && signs;
    Ok((
        pass,
        json!({
            "sandwich": { "verdict": sandwich.verdict, "min_margin": sandwich.min_margin },
            "at_one": p,
            "double_0_4": admissible.verdict,
            "double_0.5_4": { "verdict": low.verdict, "refined": low.refined },
            "double_0_3.5": { "verdict": high.verdict, "refined": high.refined },
            "h_signs": signs,
        }),
    ))
}

fn strong_cm(ctx: &EvalContext) -> Result<(bool, Value)> {
    let grid = Grid::default_check();
    let mut rows = Vec::new();
    let mut pass = true;
    for f in CatalogFunction::strong_catalog() {
        let e = equivalence_test(&f, 8, &grid, ctx)?;
        let chain = if x_times_cm_check(&f, 8, &grid, ctx)?.verdict.is_pass() {
            Some(induction_chain_check(&f, 8, &grid, ctx)?.verdict)
        } else {
            None
        };
        pass &= e.agree && chain.is_none_or(|v| v.is_pass());
        rows.push(json!({ "equivalence": e, "induction_chain": chain }));
    }
    Ok((pass, json!({ "rows": rows })))
}

fn polygamma_accuracy(ctx: &EvalContext) -> Result<(bool, Value)> {
    let p1 = polygamma(1, 1.0, ctx)?;
    let p2 = polygamma(2, 1.0, ctx)?;
    let e1 = ((p1 - ZETA2) / ZETA2).abs();
    let e2 = ((p2 + 2.0 * ZETA3) / (2.0 * ZETA3)).abs();
    let mut worst_oracle = 0.0f64;
    let mut worst_recurrence = 0.0f64;
    for n in 1..=4u32 {
        for &x in Grid::log(0.5, 50.0, 12)?.nodes() {
            let v = polygamma(n, x, ctx)?;
            let o = polygamma_integral(n, x, ctx)?;
            worst_oracle = worst_oracle.max(((v - o) / v).abs());
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let step = sign * crate::polygamma::factorial(n) / x.powi(n as i32 + 1);
            let r = (v - polygamma(n, x + 1.0, ctx)? - step) / v;
            worst_recurrence = worst_recurrence.max(r.abs());
        }
    }
    let pass = e1 <= 1e-12 && e2 <= 1e-12 && worst_oracle <= 1e-8 && worst_recurrence <= 1e-12;
    Ok((
        pass,
        json!({
            "trigamma_1_rel_err": e1,
            "tetragamma_1_rel_err": e2,
            "oracle_rel_err": worst_oracle,
            "recurrence_rel_err": worst_recurrence,
            "psi_capital_1": psi_capital(1.0, ctx)?,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_shape() {
        let v = envelope("eval", &json!({ "value": 1.5 }));
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "eval");
        assert_eq!(v["result"]["value"], 1.5);
        let e = error_envelope("eval", &Error::Domain("bad".into()));
        assert_eq!(e["error"]["kind"], "domain");
    }

    #[test]
    fn pretty_output_ends_with_newline() {
        assert!(to_json_string(&json!({})).ends_with('\n'));
    }

    #[test]
    fn cheap_criteria() {
        let c = EvalContext::default();
        assert!(q_table(&c).unwrap().0);
        assert!(q_roots(&c).unwrap().0);
        assert!(phi_limit(&c).unwrap().0);
        assert!(polygamma_accuracy(&c).unwrap().0);
    }
}
