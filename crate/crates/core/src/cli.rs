//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check exceeded its tolerance, 2 invalid input
//! (parse errors, bad flags, malformed JSON, degree mismatch), 3 domain
//! errors (point or segment outside the smooth domain, non-PD matrix).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::homfun::{make_function, FunctionSpec, HomogeneousFunction, SEGMENT_SAMPLES};
use crate::riskagg::{AllocationReport, Portfolio, PortfolioParseError, QuadraticIdentityReport};
use crate::sampling::DEFAULT_SEED;
use crate::taylor::{alternating_binomial_sum, build_report, Mode, TaylorReport, MAX_BINOMIAL_ORDER};
use crate::verify::{run_suite, Suite, SuiteOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

const DEFAULT_TOL: f64 = 1e-8;

/// Parsed invocation: one subcommand with its flags.
#[derive(Debug, Parser)]
#[command(name = "homtaylor", version, about = "Taylor identities for positively homogeneous functions")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the standard and collapsed Taylor polynomials for one (a, b).
    Taylor(TaylorArgs),
    /// Run the seeded property suites.
    Verify(VerifyArgs),
    /// Print the alternating binomial sum table.
    Identity(IdentityArgs),
    /// Aggregate capital, Euler allocation and the quadratic identity.
    Risk(RiskArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum FamilyArg {
    /// √(xᵀx) on ℝⁿ (quadratic_root with R = I)
    Euclidean,
    QuadraticRoot,
    Monomial,
    Pnorm,
    Power,
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Monomial exponents, comma separated.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub alpha: Option<::std::vec::Vec<f64>>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Raise the (degree-1) function to this integer power.
    #[arg(long)]
    pub power: Option<u32>,
    /// Matrix as JSON (`[[1,0.5],[0.5,1]]`) or rows separated by `;`.
    #[arg(long = "R", value_parser = parse_matrix, allow_hyphen_values = true)]
    pub r: Option<::std::vec::Vec<Vec<f64>>>,
    /// FunctionSpec JSON, inline or as a file path.
    #[arg(long)]
    pub spec: Option<String>,
}

#[derive(Debug, Args)]
pub struct TaylorArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub a: ::std::vec::Vec<f64>,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub b: ::std::vec::Vec<f64>,
    #[arg(long)]
    pub order: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// central, corollary, euler, homogeneity, fd, exactness, binomial, risk or all
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long = "max-m", default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=MAX_BINOMIAL_ORDER as i64))]
    pub max_m: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long = "max-m", default_value_t = 12, value_parser = clap::value_parser!(u32).range(0..=MAX_BINOMIAL_ORDER as i64))]
    pub max_m: u32,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RiskArgs {
    #[arg(long)]
    pub portfolio: PathBuf,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    pub target: Option<::std::vec::Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

/// Comma-separated decimal list.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("invalid number {t:?} in {s:?}"))
        })
        .collect()
}

pub fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>, String> {
    if s.trim_start().starts_with('[') {
        serde_json::from_str(s).map_err(|e| format!("invalid matrix JSON: {e}"))
    } else {
        s.split(';').map(parse_vector).collect()
    }
}

/// A failure that ends the command with an exit code.
#[derive(Debug)]
struct Abort {
    code: i32,
    message: String,
}

impl Abort {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::NotPositiveDefinite | Error::ZeroCapital => EXIT_DOMAIN,
            _ => EXIT_INVALID,
        };
        Self { code, message: e.to_string() }
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let result = match &config.command {
        Command::Taylor(a) => cmd_taylor(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Identity(a) => cmd_identity(a, out),
        Command::Risk(a) => cmd_risk(a, out),
    };
    match result {
        Ok(code) => code,
        Err(abort) => {
            let _ = writeln!(err, "error: {}", abort.message);
            abort.code
        }
    }
}

fn read_spec(value: &str) -> Result<FunctionSpec, Abort> {
    let text = if value.trim_start().starts_with('{') {
        value.to_string()
    } else {
        fs::read_to_string(value).map_err(|e| Abort::invalid(format!("cannot read {value}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Abort::invalid(format!("invalid function spec: {e}")))
}

fn resolve_function(args: &FunctionArgs, dim: usize) -> Result<HomogeneousFunction, Abort> {
    let base = match (&args.spec, args.family) {
        (Some(spec), _) => make_function(&read_spec(spec)?)?,
        (None, None) => return Err(Abort::invalid("one of --family or --spec is required")),
        (None, Some(family)) => {
            let need = |flag: &str| Abort::invalid(format!("--family {family:?} needs --{flag}"));
            match family {
                FamilyArg::Euclidean => HomogeneousFunction::euclidean(dim)?,
                FamilyArg::QuadraticRoot => {
                    make_function(&FunctionSpec::quadratic_root(args.r.clone().ok_or_else(|| need("R"))?))?
                }
                FamilyArg::Monomial => {
                    make_function(&FunctionSpec::monomial(args.alpha.clone().ok_or_else(|| need("alpha"))?))?
                }
                FamilyArg::Pnorm => make_function(&FunctionSpec::pnorm(args.p.ok_or_else(|| need("p"))?))?,
                FamilyArg::Power => {
                    return Err(Abort::invalid(
                        "--family power needs --spec; or combine --power with a degree-1 family",
                    ))
                }
            }
        }
    };
    match args.power {
        Some(k) => Ok(HomogeneousFunction::power(base, k)?),
        None => Ok(base),
    }
}

/// `%.9g`-style formatting.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.8e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa =
            if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        format!("{mantissa}e{e}")
    }
}

fn fmt_list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_sig(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Abort> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Abort::invalid(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Abort::invalid(e.to_string()))
}

fn io(e: std::io::Error) -> Abort {
    Abort::invalid(format!("write failed: {e}"))
}

fn cmd_taylor(args: &TaylorArgs, out: &mut dyn Write) -> Result<i32, Abort> {
    if args.a.len() != args.b.len() {
        return Err(Abort::invalid(format!("--a has {} components, --b has {}", args.a.len(), args.b.len())));
    }
    let f = resolve_function(&args.function, args.a.len())?;
    if let Some(d) = f.dim() {
        if d != args.a.len() {
            return Err(Error::DimensionMismatch { expected: d, got: args.a.len() }.into());
        }
    }
    let m = args.order;
    let mode = if f.degree() == m as f64 {
        Mode::Theorem
    } else if f.degree() == 1.0 {
        Mode::Corollary
    } else {
        return Err(Error::DegreeMismatch { degree: f.degree(), order: m }.into());
    };
    for (label, x) in [("a", &args.a), ("b", &args.b)] {
        if !f.in_domain(x) {
            return Err(Error::Domain(format!("{label} = {x:?} is outside the domain of {}", f.name())).into());
        }
    }
    if !f.segment_in_domain(&args.a, &args.b, SEGMENT_SAMPLES) {
        return Err(Error::Domain(format!("segment [a, b] leaves the domain of {}", f.name())).into());
    }
    let report = build_report(&f, &args.a, &args.b, m, mode)?;
    let pass = report.identity_gap <= args.tol;
    if args.json {
        write_json(out, &report)?;
    } else {
        write_taylor_human(out, &f, &report, pass, args.tol).map_err(io)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn write_taylor_human(
    out: &mut dyn Write,
    f: &HomogeneousFunction,
    r: &TaylorReport,
    pass: bool,
    tol: f64,
) -> std::io::Result<()> {
    let mode = match r.mode {
        Mode::Theorem => "theorem",
        Mode::Corollary => "corollary",
    };
    writeln!(out, "function          {}", f.name())?;
    writeln!(out, "mode              {mode}")?;
    writeln!(out, "order             {}", r.order)?;
    writeln!(out, "f_a               {}", fmt_sig(r.f_a))?;
    writeln!(out, "f_b               {}", fmt_sig(r.f_b))?;
    writeln!(out, "taylor_standard   {}", fmt_sig(r.taylor_standard))?;
    writeln!(out, "taylor_collapsed  {}", fmt_sig(r.taylor_collapsed))?;
    writeln!(out, "identity_gap      {}", fmt_sig(r.identity_gap))?;
    writeln!(out, "remainder         {}", fmt_sig(r.remainder))?;
    writeln!(out, "euler_residuals   {}", fmt_list(&r.euler_residuals))?;
    writeln!(
        out,
        "status            {} (identity_gap {} {})",
        if pass { "PASS" } else { "FAIL" },
        if pass { "<=" } else { ">" },
        fmt_sig(tol)
    )
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Abort> {
    let suites: Vec<Suite> =
        if args.suite == "all" { Suite::ALL.to_vec() } else { vec![args.suite.parse().map_err(Abort::invalid)?] };
    let outcomes: Vec<SuiteOutcome> =
        suites.iter().map(|&s| run_suite(s, args.seed, args.trials, args.tol, args.max_m)).collect::<Result<_, _>>()?;
    let all_pass = outcomes.iter().all(SuiteOutcome::passed);
    if args.json {
        write_json(out, &outcomes)?;
    } else {
        for o in &outcomes {
            writeln!(
                out,
                "{:<12} {} checks={} max_residual={} tol={}",
                o.suite.name(),
                if o.passed() { "PASS" } else { "FAIL" },
                o.checks,
                fmt_sig(o.max_residual),
                fmt_sig(o.tolerance)
            )
            .map_err(io)?;
            for fail in &o.failures {
                writeln!(
                    out,
                    "    failing instance: {} seed={} trial={} a={} b={} residual={} ({})",
                    fail.function,
                    fail.seed,
                    fail.trial,
                    fmt_list(&fail.a),
                    fail.b.as_deref().map_or("-".to_string(), fmt_list),
                    fmt_sig(fail.residual),
                    fail.detail
                )
                .map_err(io)?;
            }
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct IdentityTable {
    max_m: u32,
    rows: Vec<Vec<i128>>,
    kronecker: bool,
}

fn cmd_identity(args: &IdentityArgs, out: &mut dyn Write) -> Result<i32, Abort> {
    let mut rows = Vec::new();
    for m in 0..=args.max_m {
        rows.push((0..=m).map(|q| alternating_binomial_sum(m, q)).collect::<Result<Vec<_>, _>>()?);
    }
    let kronecker =
        rows.iter().enumerate().all(|(m, row)| row.iter().enumerate().all(|(q, &v)| v == i128::from(q == m)));
    if args.json {
        write_json(out, &IdentityTable { max_m: args.max_m, rows, kronecker })?;
    } else {
        for (m, row) in rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>2}")).collect();
            writeln!(out, "m={m:<2} q=0..{m:<2} | {}", cells.join(" ")).map_err(io)?;
        }
        writeln!(
            out,
            "{} pairs, {}",
            rows.iter().map(Vec::len).sum::<usize>(),
            if kronecker { "all equal to the Kronecker delta" } else { "MISMATCH" }
        )
        .map_err(io)?;
    }
    Ok(if kronecker { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Serialize)]
struct RiskReport<'a> {
    #[serde(flatten)]
    allocation: &'a AllocationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    identity: Option<QuadraticIdentityReport>,
}

fn cmd_risk(args: &RiskArgs, out: &mut dyn Write) -> Result<i32, Abort> {
    let text = fs::read_to_string(&args.portfolio)
        .map_err(|e| Abort::invalid(format!("cannot read {}: {e}", args.portfolio.display())))?;
    let portfolio = Portfolio::from_json(&text).map_err(|e| match e {
        PortfolioParseError::Json(j) => Abort::invalid(format!("malformed portfolio JSON: {j}")),
        PortfolioParseError::Invalid(inner) => inner.into(),
    })?;
    let allocation = portfolio.allocation_report()?;
    let identity = args.target.as_deref().map(|t| portfolio.capital_quadratic_identity(t)).transpose()?;
    let alloc_ok = allocation.check_sum_gap <= args.tol * (1.0 + allocation.capital);
    let ident_ok = identity.is_none_or(|r| r.gap <= args.tol * (1.0 + r.rhs));

    if args.json {
        write_json(out, &RiskReport { allocation: &allocation, identity })?;
    } else {
        writeln!(out, "capital           {}", fmt_sig(allocation.capital)).map_err(io)?;
        for (i, a) in allocation.allocations.iter().enumerate() {
            let label = portfolio.labels.as_ref().map_or_else(|| format!("risk {i}"), |l| l[i].clone());
            writeln!(out, "  {label:<16} {}", fmt_sig(*a)).map_err(io)?;
        }
        writeln!(out, "check_sum_gap     {}", fmt_sig(allocation.check_sum_gap)).map_err(io)?;
        if let Some(r) = identity {
            writeln!(out, "identity lhs      {}", fmt_sig(r.lhs)).map_err(io)?;
            writeln!(out, "identity rhs      {}", fmt_sig(r.rhs)).map_err(io)?;
            writeln!(out, "identity gap      {}", fmt_sig(r.gap)).map_err(io)?;
        }
    }
    Ok(if alloc_ok && ident_ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}
