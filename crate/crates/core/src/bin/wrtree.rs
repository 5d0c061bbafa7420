use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wr_tree::error::{Error, Result};
use wr_tree::params::ModelParams;
use wr_tree::sweep::{self, AxisRange, CurveRegime, Format, Scale, SweepSpec};
use wr_tree::tisgm::{self, PhaseReport};
use wr_tree::verify::{self, Level, VerifyConfig};

#[derive(Parser)]
#[command(name = "wrtree", version, about = "Gibbs measures of the Widom-Rowlinson model on Cayley trees")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify one parameter point and print every translation-invariant law.
    Solve {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
        /// Coupling J, used with --beta instead of --theta.
        #[arg(long, allow_negative_numbers = true, requires = "beta", conflicts_with = "theta")]
        j: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "j")]
        beta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Classify every point of a (theta, lambda) grid.
    Sweep {
        #[arg(long)]
        k: u32,
        #[arg(long, allow_negative_numbers = true)]
        theta_lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta_hi: f64,
        #[arg(long)]
        theta_steps: usize,
        #[arg(long, allow_negative_numbers = true)]
        lambda_lo: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda_hi: f64,
        #[arg(long)]
        lambda_steps: usize,
        #[arg(long, value_enum, default_value = "log")]
        scale: ScaleArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sample the closed-form critical curves of a regime.
    Curves {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        #[arg(long, default_value_t = 200)]
        theta_steps: usize,
        #[arg(long, allow_negative_numbers = true, requires = "theta_hi")]
        theta_lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "theta_lo")]
        theta_hi: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the verification suite and print a JSON report.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
    },
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Antiferro,
    Ferro,
    Periodic,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Serialize)]
struct SolveOutput {
    report: PhaseReport,
    laws: Vec<LawOut>,
}

#[derive(Serialize)]
struct LawOut {
    x: f64,
    y: f64,
    diagonal: bool,
    residual: f64,
}

/// Writes to stdout; a closed pipe is not an error.
fn print_out(text: &str) -> Result<()> {
    let mut lock = std::io::stdout().lock();
    match lock.write_all(text.as_bytes()).and_then(|_| lock.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: &OutputArgs) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => print_out(text)?,
    }
    Ok(())
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Solve { k, theta, j, beta, lambda } => {
            let p = match (theta, j, beta) {
                (Some(t), None, None) => ModelParams::new(k, t, lambda)?,
                (None, Some(j), Some(b)) => ModelParams::from_coupling(k, j, b, lambda)?,
                _ => return Err(Error::Usage("give either --theta or both --j and --beta".into())),
            };
            let report = tisgm::classify_phase(&p)?;
            let laws = report
                .solutions
                .all_laws()
                .into_iter()
                .map(|l| LawOut { x: l.x, y: l.y, diagonal: l.x == l.y, residual: l.residual(&p) })
                .collect();
            print_out(&(serde_json::to_string_pretty(&SolveOutput { report, laws })? + "\n"))?;
        }
        Cmd::Sweep { k, theta_lo, theta_hi, theta_steps, lambda_lo, lambda_hi, lambda_steps, scale, out } => {
            let spec = SweepSpec {
                k,
                theta: AxisRange { lo: theta_lo, hi: theta_hi, steps: theta_steps },
                lambda: AxisRange { lo: lambda_lo, hi: lambda_hi, steps: lambda_steps },
                scale: match scale {
                    ScaleArg::Linear => Scale::Linear,
                    ScaleArg::Log => Scale::Log,
                },
            };
            let rows = sweep::run_sweep(&spec)?;
            let text = match format_of(out.format) {
                Format::Csv => sweep::sweep_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            emit(&text, &out)?;
        }
        Cmd::Curves { k, regime, theta_steps, theta_lo, theta_hi, out } => {
            let regime = match regime {
                RegimeArg::Antiferro => CurveRegime::Antiferro,
                RegimeArg::Ferro => CurveRegime::Ferro,
                RegimeArg::Periodic => CurveRegime::Periodic,
            };
            let table = sweep::critical_curves(k, regime, theta_steps, theta_lo.zip(theta_hi))?;
            let text = match format_of(out.format) {
                Format::Csv => sweep::curves_csv(&table),
                Format::Json => serde_json::to_string_pretty(&table)? + "\n",
            };
            emit(&text, &out)?;
        }
        Cmd::Verify { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let report = verify::run_suite(&VerifyConfig::new(level));
            print_out(&(serde_json::to_string_pretty(&report)? + "\n"))?;
            if !report.passed {
                for c in report.criteria.iter().filter(|c| !c.passed) {
                    eprintln!("criterion {} ({}) failed: {}", c.id, c.title, c.failures().join(", "));
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("WR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails only if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Usage(_) | Error::Domain(_) | Error::UnsupportedRegime(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
