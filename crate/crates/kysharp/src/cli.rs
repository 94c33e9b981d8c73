//! Command-line front end.
//!
//! Subcommands map onto the library one-to-one: `lambda` samples mode
//! profiles to CSV, `constant` localises a sharp constant and emits a
//! JSON report, `verify` runs an identity suite, `oracle` cross-checks
//! the operator norm on a scenario, and `info` prints capabilities.
//! Data goes to stdout, diagnostics to stderr.  Identical invocations
//! produce byte-identical output.
//!
//! Exit codes: 0 success, 1 invalid flags or parse failure, 2 supremum
//! not localised, 3 quadrature failure, 4 expectation mismatch,
//! 5 verification failure, 6 truncation not converged.

use crate::lambda::{sample_profile, LambdaProfile, ProfileKind};
use crate::optimum::{
    dirac_constant, dirac_radial_constant, schrodinger_constant, ConstantReport, SearchPolicy,
};
use crate::oracle::{bundled_scenario, bundled_scenario_names, parse_scenario, run_scenario};
use crate::problem::{parse_config, ProblemSpec, WeightSpec};
use crate::verify::{all_pass, run_suite, summary_table, to_json, Suite};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

/// Top-level argument structure.
#[derive(Parser, Debug)]
#[command(
    name = "kysharp",
    version,
    about = "Sharp constants of smoothing estimates for Schrodinger, relativistic and Dirac evolutions",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Cap the worker thread count (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample mode profiles r -> lambda(r) as CSV.
    Lambda(LambdaArgs),
    /// Localise a sharp constant and print a JSON report.
    Constant(ConstantArgs),
    /// Run a verification suite and print per-check residuals as JSON.
    Verify(VerifyArgs),
    /// Cross-check the operator norm on a scenario.
    Oracle(OracleArgs),
    /// Print supported problems, suites, scenarios, and exit codes.
    Info,
}

#[derive(Args, Debug)]
struct ProblemFlags {
    /// Spatial dimension (2 to 6).
    #[arg(long)]
    d: Option<u32>,
    /// Weight family: A, B, C, or gaussian.
    #[arg(long)]
    family: Option<String>,
    /// Weight exponent s.
    #[arg(long)]
    s: Option<f64>,
    /// Mass parameter of the relativistic dispersion.
    #[arg(long)]
    m: Option<f64>,
    /// Plain-text key-value problem description; explicit flags override
    /// the corresponding keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LambdaArgs {
    #[command(flatten)]
    problem: ProblemFlags,
    /// Profile kind: schrodinger, dirac, or dirac-radial.
    #[arg(long, default_value = "schrodinger")]
    kind: String,
    /// Mode range `a..b` (inclusive) or a single index.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    k: String,
    /// Radial grid `MIN..MAX[:N]` (log-spaced, N defaults to 64) or a
    /// single radius.
    #[arg(long, default_value = "1e-2..1e2:64")]
    r: String,
    /// Write the CSV to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConstantArgs {
    /// Evolution: schrodinger, relativistic, dirac, or dirac-radial.
    #[arg(long)]
    equation: String,
    #[command(flatten)]
    problem: ProblemFlags,
    /// Largest mode index searched.
    #[arg(long)]
    k_max: Option<i32>,
    /// Lower end of the radial search window.
    #[arg(long)]
    r_min: Option<f64>,
    /// Upper end of the radial search window.
    #[arg(long)]
    r_max: Option<f64>,
    /// Radial grid resolution of the search.
    #[arg(long)]
    points_per_decade: Option<usize>,
    /// Expected value; a mismatch beyond --rtol exits with code 4.
    #[arg(long)]
    expect: Option<f64>,
    /// Relative tolerance for --expect.
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    /// Reported normalization: paper (the constant itself) or operator
    /// (the squared operator norm).
    #[arg(long, default_value = "paper")]
    norm: String,
    /// Write the JSON report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite: specialfn, harmonics, algebra, funk-hecke, equivalence, all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Seed of the randomized spot checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Bundled scenario name or path to a scenario file.
    #[arg(long)]
    scenario: String,
}

/// Parses the process arguments and runs the selected subcommand,
/// returning the process exit code.
pub fn main_entry() -> i32 {
    run_from(std::env::args_os())
}

/// Like [`main_entry`] with explicit arguments, for tests.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    if let Some(n) = cli.threads {
        // The global pool can only be sized once per process; later
        // invocations keep the existing pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Maps library errors onto the documented exit codes.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::SupNotLocalized(_) => 2,
        Error::QuadratureFailure(_) | Error::DivergentTransform(_) => 3,
        Error::TruncationNotConverged(_) => 6,
        _ => 1,
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Lambda(args) => cmd_lambda(args),
        Command::Constant(args) => cmd_constant(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Info => cmd_info(),
    }
}

// ---------------------------------------------------------------------
// Problem assembly.

/// The evolutions a spec can be built for.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Equation {
    Schrodinger,
    Relativistic,
    Dirac,
    DiracRadial,
}

impl Equation {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "schrodinger" => Ok(Equation::Schrodinger),
            "relativistic" => Ok(Equation::Relativistic),
            "dirac" => Ok(Equation::Dirac),
            "dirac-radial" => Ok(Equation::DiracRadial),
            other => Err(Error::InvalidParameter(format!(
                "unknown equation `{other}`; expected schrodinger, relativistic, dirac, or dirac-radial"
            ))),
        }
    }
}

/// Canonical config token of a CLI family name.
fn family_token(name: &str) -> Result<&'static str> {
    match name {
        "A" | "typeA" => Ok("typeA"),
        "B" | "typeB" => Ok("typeB"),
        "C" | "typeC" => Ok("typeC"),
        "gaussian" => Ok("gaussian"),
        other => Err(Error::InvalidParameter(format!(
            "unknown family `{other}`; expected A, B, C, or gaussian"
        ))),
    }
}

fn weight_for(token: &str, s: f64) -> WeightSpec {
    match token {
        "typeA" => WeightSpec::type_a(s),
        "typeB" => WeightSpec::type_b(s),
        "typeC" => WeightSpec::type_c(s),
        _ => WeightSpec::gaussian(),
    }
}

/// Builds the problem spec from flags, or from a config file with
/// explicit flags overlaid key by key.
fn build_spec(flags: &ProblemFlags, equation: Equation) -> Result<ProblemSpec> {
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)?;
        let mut merged = String::new();
        for line in text.lines() {
            let stripped = line.trim();
            if stripped.is_empty() || stripped.starts_with('#') {
                merged.push_str(line);
                merged.push('\n');
                continue;
            }
            let key = stripped.split('=').next().unwrap_or("").trim();
            let overridden = match key {
                "d" => flags.d.is_some(),
                "family" => flags.family.is_some(),
                "s" => flags.s.is_some(),
                "m" => flags.m.is_some(),
                _ => false,
            };
            if !overridden {
                merged.push_str(line);
                merged.push('\n');
            }
        }
        if let Some(d) = flags.d {
            merged.push_str(&format!("d={d}\n"));
        }
        if let Some(ref family) = flags.family {
            merged.push_str(&format!("family={}\n", family_token(family)?));
        }
        if let Some(s) = flags.s {
            merged.push_str(&format!("s={s}\n"));
        }
        if let Some(m) = flags.m {
            merged.push_str(&format!("m={m}\n"));
        }
        return parse_config(&merged);
    }

    let d = flags
        .d
        .ok_or_else(|| Error::InvalidParameter("--d is required without --config".into()))?;
    let family = flags
        .family
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("--family is required without --config".into()))?;
    let token = family_token(family)?;
    let s = flags.s.unwrap_or(2.0);
    let m = flags.m.unwrap_or(0.0);
    let weight = weight_for(token, s);
    match equation {
        Equation::Schrodinger => {
            if m != 0.0 {
                return Err(Error::InvalidParameter(
                    "--m is a relativistic parameter; use --equation relativistic or dirac".into(),
                ));
            }
            ProblemSpec::schrodinger_family(d, weight, s)
        }
        Equation::Relativistic => ProblemSpec::relativistic_family(d, weight, s, m),
        Equation::Dirac | Equation::DiracRadial => ProblemSpec::dirac_family(d, weight, s, m),
    }
}

fn emit(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload)?,
        None => print!("{payload}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Range parsing.

/// Inclusive mode range: `a..b`, or a single index.  An inverted range
/// is empty, matching the header-only CSV contract.
fn parse_k_range(text: &str) -> Result<Vec<i32>> {
    let bad = || Error::InvalidParameter(format!("bad mode range `{text}`; expected `a..b` or `k`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
        Ok((lo..=hi).collect())
    } else {
        Ok(vec![text.trim().parse().map_err(|_| bad())?])
    }
}

/// Radial grid: `MIN..MAX[:N]` log-spaced (N defaults to 64), or a
/// single radius.
fn parse_r_grid(text: &str) -> Result<Vec<f64>> {
    let bad =
        || Error::InvalidParameter(format!("bad radial grid `{text}`; expected `MIN..MAX[:N]` or `r`"));
    let (range, count) = match text.split_once(':') {
        Some((range, n)) => (range, n.trim().parse::<usize>().map_err(|_| bad())?),
        None => (text, 64),
    };
    if let Some((lo, hi)) = range.split_once("..") {
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > lo && count >= 2) {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs 0 < MIN < MAX and N >= 2, got `{text}`"
            )));
        }
        let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
        Ok((0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                (ln_lo + t * (ln_hi - ln_lo)).exp()
            })
            .collect())
    } else {
        let r: f64 = range.trim().parse().map_err(|_| bad())?;
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got `{text}`")));
        }
        Ok(vec![r])
    }
}

// ---------------------------------------------------------------------
// Subcommands.

fn cmd_lambda(args: LambdaArgs) -> Result<i32> {
    let (kind, equation) = match args.kind.as_str() {
        "schrodinger" => (ProfileKind::Schrodinger, None),
        "dirac" => (ProfileKind::Dirac, Some(Equation::Dirac)),
        "dirac-radial" => (ProfileKind::DiracRadial, Some(Equation::DiracRadial)),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown kind `{other}`; expected schrodinger, dirac, or dirac-radial"
            )))
        }
    };
    // A scalar profile over a massive dispersion is the relativistic
    // scalar problem; massless defaults to the parabolic one.
    let equation = equation.unwrap_or(if args.problem.m.unwrap_or(0.0) > 0.0 {
        Equation::Relativistic
    } else {
        Equation::Schrodinger
    });
    let spec = build_spec(&args.problem, equation)?;
    let ks = parse_k_range(&args.k)?;
    let r_grid = parse_r_grid(&args.r)?;

    let mut csv = String::from(LambdaProfile::CSV_HEADER);
    csv.push('\n');
    for &k in &ks {
        sample_profile(&spec, k, kind, &r_grid)?.append_csv_rows(&mut csv);
    }
    emit(args.out.as_deref(), &csv)?;
    eprintln!(
        "lambda: {} mode(s) x {} radii ({})",
        ks.len(),
        r_grid.len(),
        kind.label()
    );
    Ok(0)
}

fn cmd_constant(args: ConstantArgs) -> Result<i32> {
    let equation = Equation::parse(&args.equation)?;
    let spec = build_spec(&args.problem, equation)?;

    let mut policy = SearchPolicy::default();
    if let Some(k_max) = args.k_max {
        policy.k_max = k_max;
    }
    if let Some(r_min) = args.r_min {
        policy.r_min = r_min;
    }
    if let Some(r_max) = args.r_max {
        policy.r_max = r_max;
    }
    if let Some(ppd) = args.points_per_decade {
        policy.points_per_decade = ppd;
    }
    policy.validate()?;

    let report: ConstantReport = match equation {
        Equation::Schrodinger | Equation::Relativistic => schrodinger_constant(&spec, &policy)?,
        Equation::Dirac => dirac_constant(&spec, &policy)?,
        Equation::DiracRadial => dirac_radial_constant(&spec, &policy)?,
    };

    let (norm_label, scale) = match args.norm.as_str() {
        "paper" => ("paper", 1.0),
        "operator" => ("operator", (2.0 * PI).powi(spec.d as i32)),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown normalization `{other}`; expected paper or operator"
            )))
        }
    };
    let mut json = report.to_json_norm(&policy, norm_label, scale);
    json.push('\n');
    emit(args.out.as_deref(), &json)?;
    eprintln!(
        "constant: {:.16e} ({}, extremiser {})",
        scale * report.value,
        report.method.as_str(),
        report.extremiser.as_str()
    );

    if let Some(expect) = args.expect {
        let got = scale * report.value;
        let gap = (got - expect).abs();
        if gap > args.rtol * expect.abs().max(1e-300) {
            eprintln!(
                "expectation mismatch: got {got:.16e}, expected {expect:.16e} (rtol {:.3e})",
                args.rtol
            );
            return Ok(4);
        }
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let suite = Suite::parse(&args.suite)?;
    let checks = run_suite(suite, args.seed)?;
    println!("{}", to_json(suite, args.seed, &checks));
    eprint!("{}", summary_table(&checks));
    if all_pass(&checks) {
        eprintln!("verify: {} checks passed", checks.len());
        Ok(0)
    } else {
        let failed = checks.iter().filter(|c| !c.pass).count();
        eprintln!("verify: {failed} of {} checks FAILED", checks.len());
        Ok(5)
    }
}

fn cmd_oracle(args: OracleArgs) -> Result<i32> {
    let scenario = if let Some(text) = bundled_scenario(&args.scenario) {
        parse_scenario(&args.scenario, text)?
    } else {
        let path = Path::new(&args.scenario);
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!(
                "`{}` is neither a bundled scenario nor a readable file: {e}",
                args.scenario
            ))
        })?;
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("scenario")
            .to_string();
        parse_scenario(&name, &text)?
    };

    let run = run_scenario(&scenario)?;
    println!("{}", crate::oracle::OracleRun::csv_header());
    println!("{}", run.to_csv_row());

    eprintln!(
        "oracle {}: spectral {:.6e}, direct {:.6e}, rel diff {:.3e} (budget {:.1e})",
        run.scenario, run.spectral, run.direct, run.rel_diff, run.budget
    );
    eprintln!(
        "time tail fraction {:.3e}, outer spatial octave fraction {:.3e}",
        run.trace.tail_fraction, run.trace.x_edge_fraction
    );
    for (lo, hi, mass) in &run.trace.octaves {
        eprintln!("  |t| in [{lo:>7.3}, {hi:>7.3}]: mass {mass:.6e}");
    }
    if run.passed() {
        eprintln!("oracle: agreement within budget");
        Ok(0)
    } else {
        eprintln!("oracle: relative difference exceeds the scenario budget");
        Ok(4)
    }
}

fn cmd_info() -> Result<i32> {
    let mut out = String::new();
    out.push_str(&format!("kysharp {}\n\n", env!("CARGO_PKG_VERSION")));
    out.push_str("commands:  lambda (mode profiles as CSV), constant (sharp constant as JSON),\n");
    out.push_str("           verify (identity suites), oracle (norm cross-check), info\n");
    out.push_str("equations: schrodinger, relativistic, dirac, dirac-radial\n");
    out.push_str("families:  A ((1+r^2)^{-s/2}, s >= 2, d >= 3)\n");
    out.push_str("           B (r^{-s}, 1 < s < d)\n");
    out.push_str("           C ((1+r^2)^{-s/2}, s > 1)\n");
    out.push_str("           gaussian (exp(-r^2/2))\n");
    out.push_str("dimensions: 2 to 6 (closed forms where available, quadrature otherwise)\n");
    out.push_str("normalizations: paper (constant C), operator ((2 pi)^d C)\n");
    out.push_str("verify suites: specialfn, harmonics, algebra, funk-hecke, equivalence, all\n");
    out.push_str("bundled scenarios:");
    for name in bundled_scenario_names() {
        out.push_str(&format!(" {name}"));
    }
    out.push('\n');
    out.push_str("config keys: d, m, family (typeA|typeB|typeC|gaussian), s, psi, phi\n");
    out.push_str("exit codes: 0 ok, 1 invalid flags or parse error, 2 supremum not localised,\n");
    out.push_str("            3 quadrature failure, 4 expectation mismatch, 5 verification\n");
    out.push_str("            failure, 6 truncation not converged\n");
    print!("{out}");
    Ok(0)
}
