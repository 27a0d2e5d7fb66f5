//! Command-line front end for the `cmdeg-kit` binary.
//!
//! Exit codes: 0 on success or a passing verdict, 1 on a failing verdict or a
//! numeric error (reported in the output), 2 on a usage error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{CatalogFunction, MAX_ORDER};
use crate::cmdeg::{cm_check, degree_estimate, laplace_identity_check, phi, CMReport, DegreeEstimate, LaplaceCheck};
use crate::context::EvalContext;
use crate::error::Error;
use crate::grid::{Grid, Scale};
use crate::inequalities::{
    conjecture_probe, double_inequality_check, double_inequality_scan, p_poly, sandwich_check, BoundReport,
    ConjectureProbe, ProbeOutcome,
};
use crate::kernel::{kernel_sample, log_concavity, positivity_chain, q_deriv, sigma, sigma_deriv, KernelSample, PositivityChain};
use crate::polygamma::polygamma;
use crate::report::{envelope, error_envelope, run_suite, to_json_string, SuiteReport};
use crate::series::{q_positivity, theta};
use crate::strongcm::{equivalence_test, strongly_cm_check, Equivalence};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CMDEG_KIT_THREADS";

/// Keys accepted in a `--config` file; each mirrors the global flag of the same name.
pub const CONFIG_KEYS: [&str; 11] = [
    "format",
    "out",
    "quad-rel-tol",
    "horizon",
    "shift-threshold",
    "series-radius",
    "asym-terms",
    "grid-min",
    "grid-max",
    "grid-points",
    "grid-scale",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridScale {
    Linear,
    Log,
}

/// Numerical verification of the completely monotonic degree of
/// Ψ(x) = [ψ'(x)]² + ψ''(x) and the machinery behind it.
#[derive(Debug, Parser)]
#[command(name = "cmdeg-kit", version)]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat `key=value` file supplying defaults for the global flags; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Relative tolerance for adaptive quadrature.
    #[arg(long, global = true)]
    pub quad_rel_tol: Option<f64>,
    /// Truncation point T for integrals over (0, ∞).
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Smallest argument at which polygamma asymptotics are applied.
    #[arg(long, global = true)]
    pub shift_threshold: Option<f64>,
    /// Radius below which σ and its derivatives use the Maclaurin series.
    #[arg(long, global = true)]
    pub series_radius: Option<f64>,
    /// Correction terms kept in the polygamma asymptotic series.
    #[arg(long, global = true)]
    pub asym_terms: Option<usize>,
    /// Smallest grid point.
    #[arg(long, global = true)]
    pub grid_min: Option<f64>,
    /// Largest grid point.
    #[arg(long, global = true)]
    pub grid_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// Grid spacing.
    #[arg(long, global = true, value_enum)]
    pub grid_scale: Option<GridScale>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a function: catalog ids (Psi, h:λ, neg-h:μ, inv-x, pow-neg:a,
    /// exp-neg, inv-x-x1) give dᵏ[x^α f](x); also phi, polygamma:n, sigma,
    /// sigma:k, q:k, theta, logconc and p.
    Eval(EvalArgs),
    /// Dump kernel samples (t, σ, σ'..σ⁗, q⁗, [ln σ'']'') on the grid.
    Kernel,
    /// Exact coefficient table Q(k), k = 5..=kmax.
    Series {
        #[arg(long, default_value_t = 12)]
        kmax: u32,
    },
    /// Run one verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Bracket the completely monotonic degree by bisection on α.
    Degree(DegreeArgs),
    /// Exploratory probes.
    #[command(subcommand)]
    Probe(ProbeCommand),
    /// Run the full numbered verification suite.
    Report,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Derivative order (catalog functions only).
    #[arg(long, default_value_t = 0)]
    pub order: usize,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Sampled complete monotonicity of x^α f.
    Cm {
        #[arg(long = "fn", default_value = "Psi")]
        function: String,
        #[arg(long, default_value_t = 4.0)]
        alpha: f64,
        #[arg(long, default_value_t = crate::cmdeg::DEFAULT_ORDER)]
        order: usize,
    },
    /// Sandwich bounds and the (μ, ν) double inequality.
    Bounds {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        nu: f64,
        /// Scan 2000 points on [1e-3, 1e6] and refine violations.
        #[arg(long)]
        scan: bool,
    },
    /// Strong complete monotonicity and its equivalence with CM of x f(x).
    Strongcm {
        #[arg(long = "fn", default_value = "inv-x")]
        function: String,
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// x⁴Ψ(x) against 1/12 plus the Laplace transform of q⁗.
    Laplace {
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 5.0])]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        max_rel_err: f64,
    },
    /// h-chain, log-concavity, q⁗ and convolution-ordering signs on the grid.
    Chain,
}

#[derive(Debug, Args)]
pub struct DegreeArgs {
    #[arg(long = "fn", default_value = "Psi")]
    pub function: String,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
    #[arg(long, default_value_t = 6)]
    pub order: usize,
}

#[derive(Debug, Subcommand)]
pub enum ProbeCommand {
    /// Degree brackets for h_λ and -h_μ.
    Conjecture {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        mu: f64,
    },
}

/// A usage problem detected after argument parsing.
#[derive(Debug)]
struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

/// Rendered output and its exit code.
struct Outcome {
    body: String,
    code: i32,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(Usage(msg)) => return usage_error(&msg),
    };
    let cfg = match RunConfig::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(Usage(msg)) => return usage_error(&msg),
    };
    let outcome = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cfg)),
            Err(e) => return usage_error(&format!("cannot build thread pool: {e}")),
        },
        None => execute(&cfg),
    };
    match outcome {
        Ok(out) => match emit(&out.body, cfg.out.as_deref()) {
            Ok(()) => out.code,
            Err(e) => {
                eprintln!("cmdeg-kit: cannot write output: {e}");
                1
            }
        },
        Err(Usage(msg)) => usage_error(&msg),
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}\n\nFor more information, try '--help'.");
    2
}

fn emit(body: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()
        }
    }
}

fn thread_count() -> Result<Option<usize>, Usage> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

/// Appends `--key value` for each config-file entry whose flag is absent from `argv`.
fn apply_config(mut argv: Vec<String>) -> Result<Vec<String>, Usage> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut extra = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(Usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
        }
        let flag = format!("--{key}");
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !given {
            extra.push(format!("{flag}={value}"));
        }
    }
    argv.extend(extra);
    Ok(argv)
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn context(cfg: &RunConfig) -> Result<EvalContext, Usage> {
    let mut ctx = EvalContext::default();
    if let Some(v) = cfg.quad_rel_tol {
        ctx = ctx.with_quad_rel_tol(v)?;
    }
    if let Some(v) = cfg.horizon {
        ctx = ctx.with_horizon(v)?;
    }
    if let Some(v) = cfg.shift_threshold {
        ctx = ctx.with_shift_threshold(v)?;
    }
    if let Some(v) = cfg.series_radius {
        ctx = ctx.with_series_radius(v)?;
    }
    if let Some(v) = cfg.asym_terms {
        ctx = ctx.with_asym_terms(v)?;
    }
    Ok(ctx)
}

fn grid(cfg: &RunConfig, min: f64, max: f64, points: usize) -> Result<Grid, Usage> {
    let scale = match cfg.grid_scale {
        Some(GridScale::Linear) => Scale::Linear,
        _ => Scale::Log,
    };
    Ok(Grid::new(
        cfg.grid_min.unwrap_or(min),
        cfg.grid_max.unwrap_or(max),
        cfg.grid_points.unwrap_or(points),
        scale,
    )?)
}

fn catalog(id: &str) -> Result<CatalogFunction, Usage> {
    Ok(id.parse::<CatalogFunction>()?)
}

fn check_order(order: usize) -> Result<(), Usage> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooHigh { order, max: MAX_ORDER }.into());
    }
    Ok(())
}

fn execute(cfg: &RunConfig) -> Result<Outcome, Usage> {
    let ctx = context(cfg)?;
    let format = cfg.format.unwrap_or(Format::Json);
    let r = match &cfg.command {
        Command::Eval(args) => eval(args, format, &ctx)?,
        Command::Kernel => {
            let g = grid(cfg, 0.1, 20.0, 12)?;
            render("kernel", format, g.nodes().iter().map(|&t| kernel_sample(t, &ctx)).collect(), |rows: &Vec<KernelSample>| {
                (true, kernel_csv(rows), kernel_text(rows))
            })
        }
        Command::Series { kmax } => {
            let result = q_positivity(*kmax).map_err(Usage::from)?;
            let mut csv = Vec::new();
            result.write_csv(&mut csv).expect("in-memory CSV");
            let mut text = String::new();
            for (k, q) in result.rows() {
                let _ = writeln!(text, "Q({k}) = {q}");
            }
            let _ = writeln!(text, "all positive: {}", result.all_positive);
            let body = match format {
                Format::Json => to_json_string(&envelope("series", &result.to_json_value())),
                Format::Csv => String::from_utf8(csv).expect("CSV is UTF-8"),
                Format::Text => text,
            };
            Outcome { body, code: if result.all_positive { 0 } else { 1 } }
        }
        Command::Verify(v) => verify(cfg, v, format, &ctx)?,
        Command::Degree(args) => {
            let f = catalog(&args.function)?;
            check_order(args.order)?;
            let g = grid(cfg, Grid::DEFAULT_MIN, 1e6, Grid::DEFAULT_POINTS)?;
            render(
                "degree",
                format,
                degree_estimate(&f, args.lo, args.hi, args.tol, args.order, &g, &ctx),
                |d: &DegreeEstimate| (true, degree_csv(d), degree_text(d)),
            )
        }
        Command::Probe(ProbeCommand::Conjecture { lambda, mu }) => render(
            "probe conjecture",
            format,
            conjecture_probe(*lambda, *mu, &ctx),
            |p: &ConjectureProbe| (true, probe_csv(p), probe_text(p)),
        ),
        Command::Report => {
            let suite = run_suite(&ctx);
            render("report", format, Ok(suite), |s: &SuiteReport| (s.all_pass, suite_csv(s), suite_text(s)))
        }
    };
    Ok(r)
}

/// Serializes `result` per `format`. `describe` yields the pass flag plus the
/// CSV and text renderings. Numeric errors become an error envelope with exit code 1.
fn render<T, F>(command: &str, format: Format, result: crate::error::Result<T>, describe: F) -> Outcome
where
    T: Serialize,
    F: FnOnce(&T) -> (bool, String, String),
{
    match result {
        Ok(value) => {
            let (pass, csv, text) = describe(&value);
            let body = match format {
                Format::Json => to_json_string(&envelope(command, &value)),
                Format::Csv => csv,
                Format::Text => text,
            };
            Outcome { body, code: if pass { 0 } else { 1 } }
        }
        Err(e) => {
            let body = match format {
                Format::Json => to_json_string(&error_envelope(command, &e)),
                Format::Csv => format!("error_kind,message\n{},\"{}\"\n", crate::report::error_kind(&e), e.to_string().replace('"', "\"\"")),
                Format::Text => format!("{command}: error: {e}\n"),
            };
            Outcome { body, code: 1 }
        }
    }
}

#[derive(Serialize)]
struct EvalResult {
    function: String,
    x: f64,
    alpha: f64,
    order: usize,
    value: f64,
}

fn eval(args: &EvalArgs, format: Format, ctx: &EvalContext) -> Result<Outcome, Usage> {
    let x = args.x;
    let suffix = |prefix: &str| args.function.strip_prefix(prefix).map(str::to_string);
    let parse_u32 = |s: String| s.parse::<u32>().map_err(|_| Usage(format!("bad order in `{}`", args.function)));
    let value: crate::error::Result<f64> = if args.function == "phi" {
        phi(x, ctx)
    } else if let Some(n) = suffix("polygamma:") {
        polygamma(parse_u32(n)?, x, ctx)
    } else if args.function == "sigma" {
        Ok(sigma(x, ctx))
    } else if let Some(k) = suffix("sigma:") {
        sigma_deriv(parse_u32(k)?, x, ctx)
    } else if let Some(k) = suffix("q:") {
        q_deriv(parse_u32(k)?, x, ctx)
    } else if args.function == "theta" {
        theta(x)
    } else if args.function == "logconc" {
        log_concavity(x, ctx)
    } else if args.function == "p" {
        Ok(p_poly(x))
    } else {
        let f = catalog(&args.function)?;
        check_order(args.order)?;
        f.alpha_jet(args.alpha, args.order, x, ctx).map(|j| j[args.order].value)
    };
    let result = value.map(|value| EvalResult {
        function: args.function.clone(),
        x,
        alpha: args.alpha,
        order: args.order,
        value,
    });
    Ok(render("eval", format, result, |r: &EvalResult| {
        (
            true,
            format!("function,x,alpha,order,value\n{},{},{},{},{:e}\n", r.function, r.x, r.alpha, r.order, r.value),
            format!("{:.17e}\n", r.value),
        )
    }))
}

fn verify(cfg: &RunConfig, v: &VerifyCommand, format: Format, ctx: &EvalContext) -> Result<Outcome, Usage> {
    Ok(match v {
        VerifyCommand::Cm { function, alpha, order } => {
            let f = catalog(function)?;
            check_order(*order)?;
            let g = grid(cfg, Grid::DEFAULT_MIN, Grid::DEFAULT_MAX, Grid::DEFAULT_POINTS)?;
            render("verify cm", format, cm_check(&f, *alpha, *order, &g, ctx), |r: &CMReport| {
                (r.verdict.is_pass(), cm_csv(r), cm_text(r))
            })
        }
        VerifyCommand::Bounds { mu, nu, scan } => {
            let g = grid(cfg, Grid::DEFAULT_MIN, Grid::DEFAULT_MAX, Grid::DEFAULT_POINTS)?;
            let result = (|| -> crate::error::Result<Vec<BoundReport>> {
                let double = if *scan {
                    double_inequality_scan(*mu, *nu, ctx)?
                } else {
                    double_inequality_check(*mu, *nu, &g, ctx)?
                };
                Ok(vec![sandwich_check(&g, ctx)?, double])
            })();
            render("verify bounds", format, result, |r: &Vec<BoundReport>| {
                (r.iter().all(|b| b.verdict.is_pass()), bounds_csv(r), bounds_text(r))
            })
        }
        VerifyCommand::Strongcm { function, order } => {
            let f = catalog(function)?;
            check_order(*order)?;
            let g = grid(cfg, Grid::DEFAULT_MIN, Grid::DEFAULT_MAX, Grid::DEFAULT_POINTS)?;
            let result = (|| -> crate::error::Result<StrongResult> {
                Ok(StrongResult {
                    strong: strongly_cm_check(&f, *order, &g, ctx)?,
                    equivalence: equivalence_test(&f, *order, &g, ctx)?,
                })
            })();
            render("verify strongcm", format, result, |r: &StrongResult| {
                let eq = &r.equivalence;
                let pass = eq.strong_verdict.is_pass() && eq.agree;
                let csv = format!(
                    "function,order,strong_verdict,xcm_verdict,leibniz_verdict,agree\n{},{},{},{},{},{}\n",
                    eq.function,
                    eq.order,
                    verdict_str(eq.strong_verdict.is_pass()),
                    verdict_str(eq.xcm_verdict.is_pass()),
                    verdict_str(eq.leibniz_verdict.is_pass()),
                    eq.agree
                );
                let text = format!(
                    "{}: strong CM {}, x*f CM {}, agree {}\n",
                    eq.function,
                    verdict_str(eq.strong_verdict.is_pass()),
                    verdict_str(eq.xcm_verdict.is_pass()),
                    eq.agree
                );
                (pass, csv, text)
            })
        }
        VerifyCommand::Laplace { x, max_rel_err } => {
            let result = x.iter().map(|&x| laplace_identity_check(x, ctx)).collect::<crate::error::Result<Vec<_>>>();
            render("verify laplace", format, result, |rows: &Vec<LaplaceCheck>| {
                let pass = rows.iter().all(|r| r.rel_err <= *max_rel_err && !r.tail_warning);
                (pass, laplace_csv(rows), laplace_text(rows))
            })
        }
        VerifyCommand::Chain => {
            let g = grid(cfg, 1e-3, 30.0, 200)?;
            render("verify chain", format, positivity_chain(&g, ctx), |r: &PositivityChain| {
                (r.verdict, chain_csv(r), chain_text(r))
            })
        }
    })
}

#[derive(Serialize)]
struct StrongResult {
    strong: CMReport,
    equivalence: Equivalence,
}

fn verdict_str(pass: bool) -> &'static str {
    if pass { "pass" } else { "fail" }
}

fn csv_from_rows<R: Serialize>(rows: &[R], header_if_empty: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header_if_empty).expect("in-memory CSV");
    }
    for r in rows {
        w.serialize(r).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
}

fn kernel_csv(rows: &[KernelSample]) -> String {
    let mut s = String::from("t,sigma,dsigma1,dsigma2,dsigma3,dsigma4,q4,logconc\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.t, r.sigma, r.dsigma[0], r.dsigma[1], r.dsigma[2], r.dsigma[3], r.q4, r.logconc
        );
    }
    s
}

fn kernel_text(rows: &[KernelSample]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(s, "t = {:<12.6e} sigma = {:<14.8e} q4 = {:<14.8e} logconc = {:.8e}", r.t, r.sigma, r.q4, r.logconc);
    }
    s
}

#[derive(Serialize)]
struct CmRow<'a> {
    function: &'a str,
    alpha: f64,
    order: usize,
    verdict: &'a str,
    x: Option<f64>,
    k: Option<usize>,
    value: Option<f64>,
}

fn cm_csv(r: &CMReport) -> String {
    let verdict = verdict_str(r.verdict.is_pass());
    let base = |x, k, value| CmRow { function: &r.function, alpha: r.alpha, order: r.order, verdict, x, k, value };
    let rows: Vec<CmRow> = if r.witnesses.is_empty() {
        vec![base(None, None, None)]
    } else {
        r.witnesses.iter().map(|w| base(Some(w.x), Some(w.k), Some(w.value))).collect()
    };
    csv_from_rows(&rows, &[])
}

fn cm_text(r: &CMReport) -> String {
    let mut s = format!(
        "{} with alpha = {}: {} up to order {} on {} points in [{}, {}]\n",
        r.function,
        r.alpha,
        if r.verdict.is_pass() { "consistent with complete monotonicity" } else { "not completely monotonic" },
        r.order,
        r.grid.points,
        r.grid.min,
        r.grid.max
    );
    for w in r.witnesses.iter().take(20) {
        let _ = writeln!(s, "  witness: x = {:.6e}, k = {}, value = {:.6e}", w.x, w.k, w.value);
    }
    if r.witnesses.len() > 20 {
        let _ = writeln!(s, "  … {} witnesses in total", r.witnesses.len());
    }
    s
}

#[derive(Serialize)]
struct BoundRow<'a> {
    bound_id: &'a str,
    verdict: &'a str,
    min_margin: f64,
    kind: &'a str,
    x: Option<f64>,
    lhs: Option<f64>,
    rhs: Option<f64>,
}

fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut rows = Vec::new();
    for r in reports {
        let verdict = verdict_str(r.verdict.is_pass());
        let base = |kind, x, lhs, rhs| BoundRow { bound_id: &r.bound_id, verdict, min_margin: r.min_margin, kind, x, lhs, rhs };
        if r.witnesses.is_empty() {
            rows.push(base("none", None, None, None));
        }
        for w in &r.witnesses {
            rows.push(base("grid", Some(w.x), Some(w.lhs), Some(w.rhs)));
        }
        for w in &r.refined {
            rows.push(base("refined", Some(w.x), Some(w.lhs), Some(w.rhs)));
        }
    }
    csv_from_rows(&rows, &[])
}

fn bounds_text(reports: &[BoundReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(
            s,
            "{}: {} (min normalized margin {:.3e}, {} violations)",
            r.bound_id,
            verdict_str(r.verdict.is_pass()),
            r.min_margin,
            r.witnesses.len()
        );
        for w in &r.refined {
            let _ = writeln!(s, "  worst violation near x = {:.6e}: {:.6e} !< {:.6e}", w.x, w.lhs, w.rhs);
        }
    }
    s
}

fn laplace_csv(rows: &[LaplaceCheck]) -> String {
    csv_from_rows(rows, &[])
}

fn laplace_text(rows: &[LaplaceCheck]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(s, "x = {}: x^4 Psi = {:.15e}, 1/12 + transform = {:.15e}, rel err {:.2e}", r.x, r.lhs, r.rhs, r.rel_err);
    }
    s
}

#[derive(Serialize)]
struct ChainRow<'a> {
    kind: &'a str,
    s: f64,
    quantity: String,
    value: f64,
}

fn chain_csv(r: &PositivityChain) -> String {
    let mut rows: Vec<ChainRow> = r
        .failures
        .iter()
        .map(|f| ChainRow { kind: "failure", s: f.s, quantity: f.quantity.clone(), value: f.value })
        .collect();
    for c in &r.convolution {
        for (name, v) in [("A", c.a), ("B", c.b), ("C", c.c)] {
            rows.push(ChainRow { kind: "convolution", s: c.t, quantity: name.into(), value: v });
        }
    }
    csv_from_rows(&rows, &["kind", "s", "quantity", "value"])
}

fn chain_text(r: &PositivityChain) -> String {
    let mut s = format!(
        "positivity chain on {} points in [{}, {}]: {}\n",
        r.grid.points,
        r.grid.min,
        r.grid.max,
        verdict_str(r.verdict)
    );
    for f in &r.failures {
        let _ = writeln!(s, "  {} at s = {:.6e}: {:.6e}", f.quantity, f.s, f.value);
    }
    for c in &r.convolution {
        let _ = writeln!(s, "  t = {}: A = {:.10e} >= B = {:.10e} >= C = {:.10e}", c.t, c.a, c.b, c.c);
    }
    s
}

fn degree_csv(d: &DegreeEstimate) -> String {
    format!(
        "function,lo,hi,order,iterations,tol\n{},{},{},{},{},{}\n",
        d.function, d.lo, d.hi, d.order, d.iterations, d.tol
    )
}

fn degree_text(d: &DegreeEstimate) -> String {
    format!(
        "{}: degree bracket [{}, {}] (order {}, {} bisections, grid {} points in [{}, {}])\n",
        d.function, d.lo, d.hi, d.order, d.iterations, d.grid.points, d.grid.min, d.grid.max
    )
}

fn probe_rows(p: &ConjectureProbe) -> [(String, &ProbeOutcome); 2] {
    [(format!("h:{}", p.lambda), &p.h), (format!("neg-h:{}", p.mu), &p.neg_h)]
}

fn probe_csv(p: &ConjectureProbe) -> String {
    let mut s = String::from("function,regime,status,lo,hi,reason\n");
    for (name, o) in probe_rows(p) {
        match o {
            ProbeOutcome::Bracket(d) => {
                let _ = writeln!(s, "{name},{},bracket,{},{},", p.regime, d.lo, d.hi);
            }
            ProbeOutcome::Invalid { reason } => {
                let _ = writeln!(s, "{name},{},invalid,,,\"{}\"", p.regime, reason.replace('"', "\"\""));
            }
        }
    }
    s
}

fn probe_text(p: &ConjectureProbe) -> String {
    let mut s = format!("conjecture probe ({})\n", p.regime);
    for (name, o) in probe_rows(p) {
        match o {
            ProbeOutcome::Bracket(d) => {
                let _ = writeln!(s, "  {name}: degree bracket [{}, {}]", d.lo, d.hi);
            }
            ProbeOutcome::Invalid { reason } => {
                let _ = writeln!(s, "  {name}: no bracket ({reason})");
            }
        }
    }
    s
}

fn suite_csv(r: &SuiteReport) -> String {
    let mut s = String::from("id,name,pass\n");
    for c in &r.criteria {
        let _ = writeln!(s, "{},{},{}", c.id, c.name, c.pass);
    }
    s
}

fn suite_text(r: &SuiteReport) -> String {
    let mut s = String::new();
    for c in &r.criteria {
        let _ = writeln!(s, "{} [{:>2}] {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name);
    }
    s
}
