//! Command-line front end.
//!
//! [`run_with`] takes the argument list and the two output streams, so the
//! binary is a one-liner and tests can capture everything. Exit codes: `0`
//! success, `1` a check or certificate failed, `2` bad arguments.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::flat::{family_n_witness, find_flat_plane_with, in_region_z, m2_flat_locus, m2_witness, FlatWitness};
use crate::lie::{SpaceConfig, Subspace};
use crate::orbit::{
    f_matrix, random_group_element_from, random_subgroup_element, reduce_to_f, seeded_rng, FundamentalPoint, Reduction,
};
use crate::quat::{GroupElem, Quaternion};
use crate::scan::{classify_seeded, grid_scan, write_csv, write_json, ScanConfig};
use crate::topology::topology_report;
use crate::verify::{all_passed, run_suite, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Round-trip tolerance of `reduce`.
const REDUCE_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "biquotient", version, about = "Flat planes and topology of Sp(n+1)//Sp(n-1)Sp(1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify every point of a grid over the fundamental domain
    Scan(Flags),
    /// Classify a single point (theta, alpha)
    Classify(Flags),
    /// Print a certified flat plane at (theta, alpha)
    Witness(Flags),
    /// Reduce a random pair (g1, g2) to the fundamental domain
    Reduce(Flags),
    /// Run the verification suites
    Verify(Flags),
    /// Print the exact cohomology and Pontryagin class report
    Topology(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// Family index, the space is Sp(n+1)//Sp(n-1)Sp(1)
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Cheeger deformation parameter
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 200)]
    res: usize,
    /// Tolerance on the lift curvature numerator of a valid witness
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    /// Seed of every random choice
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random starts of the flat-plane search
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// First coordinate of the point [default: none, required by classify and witness]
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Second coordinate of the point [default: none, required by classify and witness]
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Unit imaginary quaternion of the open family, i, j, k or a literal like 0.6j+0.8k
    #[arg(long, default_value = "i", allow_hyphen_values = true)]
    b: String,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format [default: csv for scan, text for verify, json otherwise]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Add the boundary flat sets to the scan as labelled rows [default: off]
    #[arg(long)]
    include_boundary: bool,
    /// Verification suite
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Algebra,
    Curvature,
    Flatness,
    Orbits,
    Topology,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Curvature => Suite::Curvature,
            SuiteArg::Flatness => Suite::Flatness,
            SuiteArg::Orbits => Suite::Orbits,
            SuiteArg::Topology => Suite::Topology,
        }
    }
}

/// The fully resolved configuration, echoed with every output.
#[derive(Debug, Clone, Serialize)]
pub struct CliConfig {
    pub command: &'static str,
    pub n: usize,
    pub t: f64,
    pub res: usize,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub b: Quaternion,
    pub out: Option<String>,
    pub format: &'static str,
    pub include_boundary: bool,
    pub suite: &'static str,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Library(Error::InvalidParameter(_) | Error::InadmissiblePoint { .. }) => {
                EXIT_USAGE
            }
            _ => EXIT_FAILED,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Entry point of the binary.
pub fn run(argv: impl IntoIterator<Item = String>) -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with(argv: impl IntoIterator<Item = String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn resolve(command: &'static str, f: &Flags, default_format: &'static str) -> Result<CliConfig, CliError> {
    let b: Quaternion = f.b.parse().map_err(|e: Error| usage(e.to_string()))?;
    for (name, v) in [("t", f.t), ("tol", f.tol)] {
        if !v.is_finite() {
            return Err(usage(format!("--{name} must be finite")));
        }
    }
    Ok(CliConfig {
        command,
        n: f.n,
        t: f.t,
        res: f.res,
        tol: f.tol,
        seed: f.seed,
        restarts: f.restarts,
        theta: f.theta,
        alpha: f.alpha,
        b,
        out: f.out.as_ref().map(|p| p.display().to_string()),
        format: match f.format {
            Some(Format::Csv) => "csv",
            Some(Format::Json) => "json",
            None => default_format,
        },
        include_boundary: f.include_boundary,
        suite: Suite::from(f.suite).name(),
    })
}

fn scan_config(c: &CliConfig) -> Result<ScanConfig, CliError> {
    let cfg = ScanConfig {
        n: c.n,
        t: c.t,
        resolution: c.res,
        tol: c.tol,
        seed: c.seed,
        restarts: c.restarts,
        include_boundary: c.include_boundary,
        ..ScanConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn point(c: &CliConfig) -> Result<FundamentalPoint, CliError> {
    match (c.theta, c.alpha) {
        (Some(theta), Some(alpha)) => Ok(FundamentalPoint::new(theta, alpha)?),
        _ => Err(usage(format!("`{}` needs both --theta and --alpha", c.command))),
    }
}

fn unit_imaginary(b: Quaternion) -> Result<Quaternion, CliError> {
    if b.re() != 0.0 || b.norm() == 0.0 {
        return Err(usage(format!("--b must be a non-zero imaginary quaternion, got {b}")));
    }
    Ok(b.scale(1.0 / b.norm()))
}

/// Writes to `--out` when given, else to `out`.
fn emit(c: &CliConfig, out: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    match &c.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            writeln!(out, "# config {}", serde_json::to_string(c)?)?;
            writeln!(out, "# wrote {path}")
        }
        None => body(out),
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a CliConfig,
    #[serde(flatten)]
    body: T,
}

fn json_report<T: Serialize>(c: &CliConfig, body: T, w: &mut dyn Write) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *w, &Report { config: c, body })?;
    w.write_all(b"\n")
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Scan(f) => scan(resolve("scan", &f, "csv")?, out),
        Command::Classify(f) => classify(resolve("classify", &f, "json")?, out),
        Command::Witness(f) => witness(resolve("witness", &f, "json")?, out),
        Command::Reduce(f) => reduce(resolve("reduce", &f, "json")?, out),
        Command::Verify(f) => verify(resolve("verify", &f, "text")?, out),
        Command::Topology(f) => topology(resolve("topology", &f, "json")?, out),
    }
}

fn scan(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = scan_config(&c)?;
    let rows = grid_scan(&cfg)?;
    let to_stdout = c.out.is_none();
    emit(&c, out, |w| {
        if c.format == "json" {
            write_json(&cfg, &rows, w)
        } else {
            if to_stdout {
                writeln!(w, "# config {}", serde_json::to_string(&c)?)?;
            }
            write_csv(&rows, w)
        }
    })?;
    Ok(true)
}

fn classify(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = scan_config(&c)?;
    let pt = point(&c)?;
    let result = classify_seeded(&pt, &cfg, &cfg.metric()?, cfg.seed)?;
    emit(&c, out, |w| {
        if c.format == "csv" {
            writeln!(w, "# config {}", serde_json::to_string(&c)?)?;
            write_csv(std::slice::from_ref(&result.row), w)
        } else {
            json_report(&c, &result, w)
        }
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct WitnessBody<'a> {
    method: &'static str,
    valid: bool,
    witness: Option<&'a FlatWitness>,
    best_objective: Option<f64>,
}

fn witness(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    if c.format != "json" {
        return Err(usage("witness output is JSON only"));
    }
    let cfg = scan_config(&c)?;
    let pt = point(&c)?;
    let op = cfg.metric()?;
    let b = unit_imaginary(c.b)?;
    let closed = if c.n == 2 && m2_flat_locus(&pt) {
        Some(m2_witness(&pt, &op)?)
    } else if c.n >= 3 && in_region_z(&pt) {
        Some(family_n_witness(&pt, b, &op)?)
    } else {
        None
    };
    let (method, w, best) = match closed {
        Some(mut w) => {
            w.lift_tol = c.tol;
            ("closed_form", Some(w), None)
        }
        None => {
            let mut opts = crate::flat::SearchOptions::new(c.restarts);
            opts.lift_tol = c.tol;
            let s = find_flat_plane_with(&pt, &op, c.seed, &opts)?;
            ("search", s.witness, Some(s.best_objective))
        }
    };
    let valid = w.as_ref().is_some_and(FlatWitness::is_valid);
    emit(&c, out, |o| json_report(&c, WitnessBody { method, valid, witness: w.as_ref(), best_objective: best }, o))?;
    Ok(valid)
}

#[derive(Serialize)]
struct ReduceBody {
    g1: GroupElem,
    g2: GroupElem,
    reduction: Reduction,
    expected: Option<FundamentalPoint>,
    round_trip_error: Option<f64>,
    tolerance: f64,
}

/// Random pair, or with `--theta/--alpha` the pair `(F, 1)` moved by a
/// random `Delta G x K x N` element, reduced back to the domain.
fn reduce(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    if c.format != "json" {
        return Err(usage("reduce output is JSON only"));
    }
    let cfg = SpaceConfig::new(c.n)?;
    let m = cfg.m();
    let mut rng = seeded_rng(c.seed);
    let expected = match (c.theta, c.alpha) {
        (None, None) => None,
        _ => Some(point(&c)?),
    };
    let (g1, g2) = match &expected {
        None => (random_group_element_from(&mut rng, m), random_group_element_from(&mut rng, m)),
        Some(pt) => {
            let g = random_group_element_from(&mut rng, m);
            let k = random_subgroup_element(&mut rng, &cfg, Subspace::K);
            let nn = random_subgroup_element(&mut rng, &cfg, Subspace::N);
            let f = f_matrix(pt, c.n)?;
            (g.mul(&f)?.mul(&k.inverse())?, g.mul(&nn.inverse())?)
        }
    };
    let reduction = reduce_to_f(&g1, &g2)?;
    let err = expected.map(|e| (reduction.point.theta - e.theta).abs().max((reduction.point.alpha - e.alpha).abs()));
    let ok = err.is_none_or(|e| e <= REDUCE_TOL);
    let body = ReduceBody { g1, g2, reduction, expected, round_trip_error: err, tolerance: REDUCE_TOL };
    emit(&c, out, |o| json_report(&c, body, o))?;
    Ok(ok)
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    passed: bool,
    checks: &'a [Check],
}

fn verify(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let checks = run_suite(c.suite.parse()?, c.seed)?;
    let passed = all_passed(&checks);
    emit(&c, out, |w| match c.format {
        "json" => json_report(&c, VerifyBody { passed, checks: &checks }, w),
        "csv" => {
            writeln!(w, "# config {}", serde_json::to_string(&c)?)?;
            writeln!(w, "suite,name,status,value,tolerance,samples")?;
            for k in &checks {
                writeln!(w, "{},{},{},{:e},{:e},{}", k.suite, k.name, k.status(), k.value, k.tolerance, k.samples)?;
            }
            Ok(())
        }
        _ => {
            writeln!(w, "# config {}", serde_json::to_string(&c)?)?;
            for k in &checks {
                writeln!(w, "{k}")?;
            }
            let failed = checks.iter().filter(|k| !k.passed && !k.diagnostic).count();
            writeln!(w, "{} checks, {failed} failed", checks.len())
        }
    })?;
    Ok(passed)
}

fn topology(c: CliConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    if c.format != "json" {
        return Err(usage("topology output is JSON only"));
    }
    let report = topology_report()?;
    let ok = report.exact_checks_pass();
    emit(&c, out, |w| json_report(&c, &report, w))?;
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::CSV_HEADER;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let argv = std::iter::once("biquotient").chain(args.iter().copied()).map(String::from);
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_with(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run_args(&["scan", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus"));
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert_eq!(run_args(&["scan", "--n", "1", "--res", "2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["classify", "--theta", "0.3"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["witness", "--theta", "2", "--alpha", "0.3"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["witness", "--n", "3", "--theta", "1", "--alpha", "0.7", "--b", "1+i"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["topology", "--format", "csv"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("scan") && out.contains("topology"));
    }

    #[test]
    fn small_scan_echoes_config() {
        let (code, out, _) = run_args(&["scan", "--res", "3", "--restarts", "1"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert!(lines.next().unwrap().starts_with("# config {\"command\":\"scan\""));
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.count(), 9);
    }

    #[test]
    fn reduce_round_trip() {
        let (code, out, _) = run_args(&["reduce", "--theta", "0.4", "--alpha", "1.1", "--seed", "5"]);
        assert_eq!(code, EXIT_OK, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["round_trip_error"].as_f64().unwrap() <= REDUCE_TOL);
        assert_eq!(v["config"]["seed"], 5);
    }

    #[test]
    fn topology_report_shape() {
        let (code, out, _) = run_args(&["topology"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["p1_q2"], "4*u^2");
        assert_eq!(v["p1_r2"], "12*u^2");
        for key in ["sigma_check", "prop54", "quotient_q2", "quotient_r2", "config"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
