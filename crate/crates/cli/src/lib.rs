//! Command-line front end: parses parameters, element and measure files,
//! runs the verification harnesses and prints deterministic JSON reports.
//!
//! Exit codes: `0` success, `1` a check exceeded its tolerance, `2` usage or
//! input error.

pub mod dsl;
pub mod files;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qhm_core::classify::{brute_force_orbit_rational, decide_isomorphism};
use qhm_core::element::QhmElement;
use qhm_core::traces::{
    delta_lambda_winding, strip_mass, strip_mass_quadrature, trace, trace_range, InvariantMeasure, DEFAULT_GRID,
};
use qhm_core::{verify, Params};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid scalar `{text}`: {source}")]
    Scalar { text: String, source: qhm_core::Error },
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("component {component} (p = {p}), line {line}, column {column}: {message}")]
    Dsl { component: usize, p: i64, line: usize, column: usize, message: String },
    #[error("component index p = {0} appears twice")]
    DuplicateP(i64),
    #[error(transparent)]
    Core(#[from] qhm_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "qhm", version, about = "Quantum Heisenberg manifold toolkit")]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    pub c: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
    #[arg(long, allow_hyphen_values = true)]
    pub nu: String,
    /// Squarefree field tag; inferred from `mu` and `nu` when omitted.
    #[arg(long)]
    pub d: Option<u64>,
}

impl ParamArgs {
    fn build(&self) -> Result<Params, CliError> {
        files::params(self.c, &self.mu, &self.nu, self.d)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Check {
    Cocycle,
    Embedding,
    Partition,
    Covariance,
    Tracial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two parameter sets give isomorphic algebras.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        c2: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        mu2: String,
        #[arg(long, allow_hyphen_values = true)]
        nu2: String,
    },
    /// Trace of an element under an invariant measure.
    Trace {
        #[arg(long)]
        element: String,
        /// Measure file; Haar measure when omitted.
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Canonical form of Z + 2mu Z + 2nu Z.
    TraceRange {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Mass of the strip [0, 2mu) x T.
    StripMass {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        measure: Option<String>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Value of the winding map on a step unitary.
    Winding {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated breakpoints in (0, 1).
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        breakpoints: String,
        /// Comma-separated winding numbers, one per interval.
        #[arg(long, allow_hyphen_values = true)]
        windings: String,
    },
    /// Sampled identity checks.
    Verify {
        check: Check,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Lower bounds for the C*-norm from nested truncations.
    Norm {
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Smallest index cutoff; defaults to the support radius.
        #[arg(long)]
        cutoff: Option<usize>,
    },
    /// Exhaustive GL_2(Z) orbit search in (Z/q)^2.
    OrbitOracle {
        #[arg(long)]
        q: i64,
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        a2: i64,
        #[arg(long, allow_hyphen_values = true)]
        b2: i64,
    },
}

/// A finished command: its JSON report and whether every check passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
    pub summary: String,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn measure_or_haar(path: &Option<String>, grid: usize) -> Result<InvariantMeasure, CliError> {
    match path {
        Some(p) => files::parse_measure_str(&files::read(p)?),
        None => Ok(InvariantMeasure::haar(grid)),
    }
}

fn measure_name(m: &InvariantMeasure) -> &'static str {
    match m {
        InvariantMeasure::Haar { .. } => "haar",
        InvariantMeasure::Atomic { .. } => "atomic",
        InvariantMeasure::Product { .. } => "product",
    }
}

fn seams(e: &QhmElement) -> Value {
    to_value(&e.seam_check(64))
}

fn list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| CliError::Usage(format!("bad {what} `{s}`"))))
        .collect()
}

pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Classify { params, c2, mu2, nu2 } => {
            let p = params.build()?;
            let q = files::params(c2.unwrap_or(params.c), mu2, nu2, params.d)?;
            let decision = decide_isomorphism(&p, &q)?;
            let summary = format!("{:?}", decision.verdict);
            Ok(Outcome { report: json!({ "params": [p, q], "decision": decision }), pass: true, summary })
        }
        Command::TraceRange { params } => {
            let g = trace_range(&params.build()?);
            Ok(Outcome { summary: g.describe(), report: to_value(&g), pass: true })
        }
        Command::Trace { element, measure, grid } => {
            let phi = files::parse_element(element)?;
            let m = measure_or_haar(measure, *grid)?;
            let defect = m.invariance_defect(phi.params());
            let base = json!({ "measure": measure_name(&m), "grid": grid, "invariance_defect": defect, "seams": seams(&phi) });
            match trace(&phi, &m) {
                Ok(t) => {
                    let mut report = base;
                    report["trace"] = json!({ "re": t.re, "im": t.im });
                    Ok(Outcome { report, pass: true, summary: format!("trace = {} + {}i", t.re, t.im) })
                }
                Err(qhm_core::Error::NotInvariant(d)) => {
                    let mut report = base;
                    report["error"] = json!("measure is not lambda-invariant");
                    Ok(Outcome { report, pass: false, summary: format!("measure rejected, invariance defect {d}") })
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::StripMass { params, measure, grid } => {
            let p = params.build()?;
            let m = measure_or_haar(measure, *grid)?;
            let defect = m.invariance_defect(&p);
            if defect != 0.0 {
                let report = json!({ "measure": measure_name(&m), "error": "measure is not lambda-invariant", "invariance_defect": defect });
                return Ok(Outcome { report, pass: false, summary: format!("measure rejected, invariance defect {defect}") });
            }
            let exact = strip_mass(&m, &p)?;
            let quad = strip_mass_quadrature(&m, &p)?;
            let pass = exact.exact.as_ref() == Some(&exact.expected) && (quad - exact.expected.to_f64()).abs() < 1e-9;
            let report = json!({ "measure": measure_name(&m), "grid": grid, "strip_mass": exact, "quadrature": quad, "tolerance": 1e-9 });
            Ok(Outcome { report, pass, summary: format!("strip mass {:?}", exact.exact) })
        }
        Command::Winding { params, breakpoints, windings } => {
            let p = params.build()?;
            let bps = list::<String>(breakpoints, "breakpoint")?
                .iter()
                .map(|s| files::parse_scalar(s))
                .collect::<Result<Vec<_>, _>>()?;
            let ws = list::<i64>(windings, "winding")?;
            let w = delta_lambda_winding(&p, &bps, &ws)?;
            Ok(Outcome { summary: format!("{w:?}"), report: json!({ "params": p, "winding": w }), pass: true })
        }
        Command::Verify { check, params, seed, samples, pairs, grid } => {
            let p = params.build()?;
            let (report, pass) = match check {
                Check::Cocycle => {
                    let r = verify::cocycle(&p, samples.unwrap_or(1000), *seed);
                    (to_value(&r), r.pass)
                }
                Check::Embedding => {
                    let r = verify::embedding(&p, pairs.unwrap_or(20), samples.unwrap_or(256), 3, *seed)?;
                    (to_value(&r), r.pass)
                }
                Check::Partition => {
                    let r = verify::partition(&p, samples.unwrap_or(256), *seed)?;
                    (to_value(&r), r.pass)
                }
                Check::Covariance => {
                    let r = verify::covariance(&p, pairs.unwrap_or(10), samples.unwrap_or(100), *seed);
                    (to_value(&r), r.pass)
                }
                Check::Tracial => {
                    let r = verify::tracial(&p, pairs.unwrap_or(10), *grid, *seed)?;
                    (to_value(&r), r.pass)
                }
            };
            let name = format!("{check:?}").to_lowercase();
            let summary = format!("verify {name}: {}", if pass { "PASS" } else { "FAIL" });
            Ok(Outcome { report: json!({ "check": name, "params": p, "seed": seed, "report": report }), pass, summary })
        }
        Command::Norm { element, levels, cutoff } => {
            let phi = files::parse_element(element)?;
            let base = cutoff.unwrap_or_else(|| phi.support_radius());
            let r = verify::norms(&phi, &verify::nested_specs(base, (*levels).max(1)))?;
            let last = r.bounds.last().map_or(0.0, |b| b.bound);
            let mut report = to_value(&r);
            report["seams"] = seams(&phi);
            Ok(Outcome { pass: r.pass, report, summary: format!("norm >= {last}") })
        }
        Command::OrbitOracle { q, a, b, a2, b2 } => {
            if *q < 1 {
                return Err(CliError::Usage("q must be positive".into()));
            }
            let same = brute_force_orbit_rational(*q, (*a, *b), (*a2, *b2));
            let report = json!({ "q": q, "from": [a, b], "to": [a2, b2], "same_orbit": same });
            Ok(Outcome { report, pass: true, summary: format!("same orbit: {same}") })
        }
    }
}

/// Parses `args`, runs the command, writes the report and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            let text = serde_json::to_string(&outcome.report).expect("reports serialize");
            let _ = writeln!(err, "{}", outcome.summary);
            let written = match &cli.output {
                Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| e.to_string()),
                None => writeln!(out, "{text}").map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(out, "{}", json!({ "error": e.to_string() }));
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qhm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn trace_range_output() {
        let (code, out) = run_str(&["trace-range", "--mu", "1/4", "--nu", "1/6"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), r#"{"D":6,"H":[[1]]}"#);
    }

    #[test]
    fn classify_output() {
        let args = ["classify", "--c", "1", "--d", "2", "--mu", "1/2*sqrt(2)", "--nu", "1/3", "--mu2", "1/2*sqrt(2)", "--nu2", "2/3"];
        let (code, out) = run_str(&args);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["decision"]["verdict"], "Isomorphic");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["trace-range", "--mu", "1/3*sqrt(4)", "--nu", "0"]).0, 2);
        assert_eq!(run_str(&["trace-range", "--mu", "sqrt(2)", "--nu", "sqrt(3)"]).0, 2);
        assert_eq!(run_str(&["no-such-command"]).0, 2);
        assert_eq!(run_str(&["orbit-oracle", "--q", "0", "--a", "0", "--b", "0", "--a2", "0", "--b2", "0"]).0, 2);
    }

    #[test]
    fn negative_scalars_are_accepted() {
        let (code, out) = run_str(&["trace-range", "--mu", "-1/2+1/2*sqrt(5)", "--nu", "-1/3"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn winding_command() {
        let (code, out) = run_str(&["winding", "--mu", "1/4", "--nu", "1/6", "--breakpoints", "1/2", "--windings", "3,3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["winding"]["Fixed"], "1");
    }
}
