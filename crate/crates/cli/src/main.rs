//! Command-line runner for the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vocheck_core::{root_of_unity_order, run_report, suite_brief, SuiteParams, C64, SUITE_NAMES};

#[derive(Parser)]
#[command(name = "vocheck", version, about = "Verification suites for lattice vertex operators over a quantum torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites and print one verdict line per suite.
    Run(RunArgs),
    /// List the available suites.
    ListSuites,
}

#[derive(Args)]
struct RunArgs {
    /// Suite to run (repeatable); "all" or nothing selects every suite.
    #[arg(long = "suite", value_name = "NAME")]
    suites: Vec<String>,

    /// Matrix size of the clock/shift pair.
    #[arg(long, default_value_t = 2, env = "VOCHECK_M")]
    m: usize,

    /// Torsion order of the twisting group.
    #[arg(long, default_value_t = 2, env = "VOCHECK_N")]
    n: usize,

    /// Root-of-unity order used by torsion suites instead of n.
    #[arg(long, value_name = "ORDER", env = "VOCHECK_XI_ORDER")]
    xi_order: Option<usize>,

    /// Free scale parameter, e.g. "1.3+0.45i"; must not be a root of unity.
    #[arg(long, default_value = "1.3+0.45i", value_parser = parse_complex, env = "VOCHECK_Q")]
    q: C64,

    /// Oscillator degree cutoff used when comparing vectors.
    #[arg(long, default_value_t = 6, env = "VOCHECK_CUTOFF")]
    cutoff: u32,

    /// Degree cutoff used while composing operators.
    #[arg(long, default_value_t = 10, env = "VOCHECK_INTERMEDIATE_CUTOFF")]
    intermediate_cutoff: u32,

    /// Charge coordinates are kept within this symmetric window.
    #[arg(long, default_value_t = 4, env = "VOCHECK_CHARGE_WINDOW")]
    charge_window: i64,

    /// Base tolerance; per-check tolerances scale with it.
    #[arg(long, default_value_t = 1e-9, env = "VOCHECK_TOL")]
    tol: f64,

    /// Seed for the randomized cases.
    #[arg(long, default_value_t = 42, env = "VOCHECK_SEED")]
    seed: u64,

    /// Write the full JSON report to this path.
    #[arg(long, value_name = "PATH", env = "VOCHECK_REPORT")]
    report: Option<PathBuf>,
}

/// Parse "a", "bi", or "a+bi"/"a-bi" into a complex number.
fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    if let Some(body) = t.strip_suffix('i') {
        // split the imaginary suffix from an optional real head: a+bi / a-bi / bi
        let bytes = body.as_bytes();
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-')
                && bytes[k - 1] != b'e'
                && bytes[k - 1] != b'E'
            {
                let re: f64 = body[..k].parse().map_err(|e| format!("real part: {e}"))?;
                let imag = &body[k..];
                let im: f64 = if imag == "+" || imag == "-" {
                    format!("{imag}1").parse().unwrap()
                } else {
                    imag.parse().map_err(|e| format!("imaginary part: {e}"))?
                };
                return Ok(C64::new(re, im));
            }
        }
        let im: f64 = if body.is_empty() || body == "+" || body == "-" {
            format!("{body}1").parse().unwrap()
        } else {
            body.parse().map_err(|e| format!("imaginary part: {e}"))?
        };
        return Ok(C64::new(0.0, im));
    }
    let re: f64 = t.parse().map_err(|e| format!("real part: {e}"))?;
    Ok(C64::new(re, 0.0))
}

fn run(args: &RunArgs) -> ExitCode {
    if args.m == 0 || args.n == 0 || args.xi_order == Some(0) {
        eprintln!("error: sizes and orders must be at least 1");
        return ExitCode::from(2);
    }
    if let Some(k) = root_of_unity_order(args.q, 24) {
        eprintln!("error: q is a root of unity of order {k}; pick a free parameter off the unit circle's torsion points");
        return ExitCode::from(2);
    }
    let params = SuiteParams {
        m: args.m,
        n: args.n,
        xi_order: args.xi_order,
        q: args.q,
        cutoff: args.cutoff,
        intermediate_cutoff: args.intermediate_cutoff,
        charge_window: args.charge_window,
        tol: args.tol,
        seed: args.seed,
    };
    let report = match run_report(&args.suites, &params) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for s in &report.suites {
        let verdict = if s.pass { "pass" } else { "FAIL" };
        println!(
            "{:<18} {} ({} cases, {} failed)",
            s.suite, verdict, s.cases, s.failed
        );
    }
    if let Some(path) = &args.report {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.pass {
        println!("overall: pass");
        ExitCode::SUCCESS
    } else {
        println!("overall: FAIL");
        ExitCode::from(1)
    }
}

fn list_suites() -> ExitCode {
    for name in SUITE_NAMES {
        println!("{:<18} {}", name, suite_brief(name));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(&args),
        Command::ListSuites => list_suites(),
    }
}

#[cfg(test)]
mod tests {
    use super::parse_complex;

    #[test]
    fn complex_forms_parse() {
        assert_eq!(parse_complex("1.5").unwrap(), super::C64::new(1.5, 0.0));
        assert_eq!(parse_complex("-2i").unwrap(), super::C64::new(0.0, -2.0));
        assert_eq!(parse_complex("i").unwrap(), super::C64::new(0.0, 1.0));
        assert_eq!(
            parse_complex("1.3+0.45i").unwrap(),
            super::C64::new(1.3, 0.45)
        );
        assert_eq!(
            parse_complex("-1.3-0.45i").unwrap(),
            super::C64::new(-1.3, -0.45)
        );
        assert_eq!(parse_complex("2-i").unwrap(), super::C64::new(2.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2e-4i").unwrap(),
            super::C64::new(1e-3, 2e-4)
        );
        assert!(parse_complex("").is_err());
        assert!(parse_complex("foo").is_err());
    }
}
