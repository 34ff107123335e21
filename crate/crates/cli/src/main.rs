use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use joinlab_cli::check::{check_dense, check_family, load_dense, Kind};
use joinlab_cli::sweep::{self, Format, Layout, SweepConfig};
use joinlab_cli::{configure_threads, parse_range, CliError};
use joinlab_core::{run_suite, BrauerParams, GridAxis, Pivot, Suite, VerifyConfig};
use serde_json::json;

#[derive(Parser)]
#[command(name = "joinlab", version, about = "Positivity cones, joinability regions and agreement bounds of invariant quantum operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one bipartite operator and print a JSON verdict.
    Check {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Local dimension (werner and brauer).
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Weight of the partially transposed swap (brauer only).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// JSON file with `dims`, `real` and optional `imag` (dense-file only).
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate joinability regions on a grid and write CSV or JSON.
    Sweep {
        #[arg(long)]
        d: usize,
        /// Points per axis of the cube.
        #[arg(long, default_value_t = 41)]
        grid: usize,
        /// Sample only the symmetric line with this many points.
        #[arg(long, conflicts_with = "grid")]
        diagonal: Option<usize>,
        #[arg(long, default_value = "-1:1", allow_hyphen_values = true)]
        range: String,
        /// Comma-separated scenario names, or `all`.
        #[arg(long, default_value = "all")]
        scenarios: String,
        /// Restrict channel scenarios to one pivot party.
        #[arg(long, value_enum, ignore_case = true)]
        pivot: Option<PivotArg>,
        /// Add oracle columns and print a comparison summary to stderr.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Run property suites; exits 1 if any check fails.
    Verify {
        /// maps, positivity, joinability, agreement or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Werner,
    Brauer,
    DenseFile,
}

#[derive(Clone, Copy, ValueEnum)]
enum PivotArg {
    A,
    B,
    C,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match configure_threads().and_then(|()| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("joinlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Writes to standard output; a closed pipe downstream is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(format!("stdout: {e}"))),
        _ => Ok(()),
    }
}

fn require<T>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --kind {kind}")))
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Check {
            kind,
            d,
            eta,
            beta,
            file,
            seed,
        } => {
            let report = match kind {
                KindArg::Werner => {
                    if beta.is_some() {
                        return Err(CliError::Usage("--beta applies to --kind brauer only".into()));
                    }
                    let p = BrauerParams::new(require(d, "d", "werner")?, require(eta, "eta", "werner")?, 0.0)?;
                    check_family(Kind::Werner, p, seed)?
                }
                KindArg::Brauer => {
                    let p = BrauerParams::new(
                        require(d, "d", "brauer")?,
                        require(eta, "eta", "brauer")?,
                        require(beta, "beta", "brauer")?,
                    )?;
                    check_family(Kind::Brauer, p, seed)?
                }
                KindArg::DenseFile => {
                    let path = require(file, "file", "dense-file")?;
                    check_dense(&load_dense(&path)?, seed)?
                }
            };
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            emit(&text)
        }
        Command::Sweep {
            d,
            grid,
            diagonal,
            range,
            scenarios,
            pivot,
            oracle,
            seed,
            out,
            format,
        } => {
            let (lo, hi) = parse_range(&range).map_err(CliError::Usage)?;
            let layout = match diagonal {
                Some(n) => Layout::Diagonal(GridAxis::new(lo, hi, n)?),
                None => Layout::Cube(GridAxis::new(lo, hi, grid)?),
            };
            let pivot = pivot.map(|p| match p {
                PivotArg::A => Pivot::A,
                PivotArg::B => Pivot::B,
                PivotArg::C => Pivot::C,
            });
            let config = SweepConfig {
                d,
                layout,
                scenarios: sweep::resolve_scenarios(&scenarios, pivot, d)?,
                oracle,
                seed,
                format: match format {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Json => Format::Json,
                },
            };
            let result = sweep::run(&config)?;
            let text = result.render();
            match &out {
                Some(path) => {
                    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
                }
                None => emit(&text)?,
            }
            if diagonal.is_some() {
                let changes: serde_json::Map<String, serde_json::Value> = result
                    .sign_changes()
                    .into_iter()
                    .map(|(s, xs)| (s.name().to_string(), json!(xs)))
                    .collect();
                eprintln!("{}", json!({ "sign_changes": changes }));
            }
            if let Some(s) = result.oracle_summary() {
                eprintln!(
                    "{}",
                    json!({
                        "rows": result.rows.len(),
                        "compared": s.compared,
                        "disagreements": s.disagreements,
                        "band_disagreements": s.band_disagreements,
                        "margin_band": joinlab_core::verify::MARGIN_BAND,
                    })
                );
            }
            Ok(())
        }
        Command::Verify { suite, seed, samples } => {
            let suite: Suite = suite
                .parse()
                .map_err(|_| CliError::Usage(format!("unknown suite '{suite}' (maps, positivity, joinability, agreement, all)")))?;
            let report = run_suite(suite, &VerifyConfig { seed, samples });
            emit(&report.to_string())?;
            if report.passed() {
                Ok(())
            } else {
                let n = report.failures().count();
                Err(CliError::Property(format!("{n} check(s) failed")))
            }
        }
    }
}
