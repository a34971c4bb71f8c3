use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use qsphere_core::connections::{
    check_metric_compatibility, check_torsion_free, check_torsion_free_christoffel, gamma_tilde_to_json,
    levi_civita, CompatLevel, ConnectionError,
};
use qsphere_core::harness::{self, Format, SuiteConfig};
use qsphere_core::json::{element_from_json, element_to_json, parse_word, uq_from_json};
use qsphere_core::uq::{act, UqElement};
use qsphere_core::Side;

#[derive(Parser)]
#[command(name = "qsphere", version, about = "Exact verification of the quantum 3-sphere geometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Verify {
        /// Suite names, or "all".
        #[arg(long = "suite", num_args = 1.., default_value = "all")]
        suites: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        #[arg(long, default_value_t = 4)]
        bundle_range: u32,
        /// Metric JSON: {"h": [[element, ...], ...], "h_inv"?: ..., "side"?: "left"|"right"}.
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Levi-Civita parameters JSON: tau1, tau4, mu2, gamma_pm, rho_zz, f0.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long, default_value_t = harness::DEFAULT_SEED)]
        seed: u64,
        /// Include wall-clock timings (the report is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Print the 27 lowered Levi-Civita symbols for a metric.
    LeviCivita {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        params: Option<PathBuf>,
        /// Also run the torsion and compatibility checks.
        #[arg(long)]
        verify: bool,
    },
    /// Apply a U_q element to an algebra element.
    Act {
        /// A word such as "E", "EK" or "K^-1 F", or a path to a {"words", "coeffs"} JSON file.
        #[arg(long)]
        op: String,
        #[arg(long, value_enum, default_value = "left")]
        side: SideArg,
        /// Element JSON: [{"alpha", "j", "k", "coeff"}, ...].
        #[arg(long)]
        element: PathBuf,
    },
}

/// Errors in the invocation or its input files; reported with exit status 2.
struct Usage(anyhow::Error);

fn usage<E: Into<anyhow::Error>>(e: E) -> Usage {
    Usage(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Usage> {
    match command {
        Command::Verify { suites, max_degree, bundle_range, metric, params, format, seed, timing } => {
            let format: Format = format.parse().map_err(usage)?;
            let cfg = SuiteConfig {
                suites: harness::parse_suites(&suites).map_err(usage)?,
                max_degree,
                bundle_range,
                metric: metric.as_deref().map(harness::load_metric).transpose().map_err(usage)?,
                params: params.as_deref().map(harness::load_params).transpose().map_err(usage)?,
                seed,
                timing,
            };
            let report = harness::run_suite(&cfg);
            let mut out = io::stdout().lock();
            harness::emit_report(&report, format, &mut out).map_err(usage)?;
            Ok(ExitCode::from(report.exit_code() as u8))
        }
        Command::LeviCivita { metric, params, verify } => {
            let user = harness::load_metric(&metric).map_err(usage)?;
            let params = params.as_deref().map(harness::load_params).transpose().map_err(usage)?.unwrap_or_default();
            let conn = match levi_civita(&user.metric, &params, user.side) {
                Ok(c) => c,
                Err(ConnectionError::Reality { residual }) => {
                    return Err(usage(anyhow!(
                        "{}: reality condition fails, H = {} is not hermitian (H as JSON: {})",
                        metric.display(),
                        residual,
                        element_to_json(&residual)
                    )))
                }
                Err(e) => return Err(usage(anyhow!("{}: {e}", metric.display()))),
            };
            let mut doc = json!({ "side": user.side.name(), "gamma_tilde": gamma_tilde_to_json(&conn) });
            let mut ok = true;
            if verify {
                let mut checks = vec![
                    check_torsion_free(&conn).map_err(usage)?,
                    check_metric_compatibility(&conn, CompatLevel::GammaTilde).map_err(usage)?,
                ];
                if conn.gamma.is_some() {
                    checks.push(check_torsion_free_christoffel(&conn).map_err(usage)?);
                    checks.push(check_metric_compatibility(&conn, CompatLevel::Module).map_err(usage)?);
                }
                ok = checks.iter().all(|c| c.passed());
                doc["checks"] = serde_json::to_value(&checks).map_err(usage)?;
            }
            print_json(&doc).map_err(usage)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Act { op, side, element } => {
            let h = parse_op(&op).map_err(Usage)?;
            let text = std::fs::read_to_string(&element)
                .with_context(|| format!("cannot read {}", element.display()))
                .map_err(Usage)?;
            let v: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("{}: invalid JSON", element.display()))
                .map_err(Usage)?;
            let f = element_from_json(&v, "$").with_context(|| element.display().to_string()).map_err(Usage)?;
            let out = act(&h, &f, side.into());
            print_json(&json!({ "result": element_to_json(&out), "display": out.to_string() })).map_err(usage)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_op(op: &str) -> Result<UqElement> {
    let path = PathBuf::from(op);
    if path.is_file() {
        let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {op}"))?;
        let v = serde_json::from_str(&text).with_context(|| format!("{op}: invalid JSON"))?;
        return uq_from_json(&v).with_context(|| op.to_string());
    }
    Ok(UqElement::word(&parse_word(op)?))
}

fn print_json(v: &serde_json::Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)
}
