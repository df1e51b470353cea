use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use envelope_cli::{load, read_config, run_scenario, CliError, Format, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "envelope",
    version,
    about = "Verify one-valued primitives on multiply connected domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario and print the report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        tol_abs: Option<f64>,
        #[arg(long)]
        tol_rel: Option<f64>,
        /// Highest moment degree K.
        #[arg(long)]
        max_degree: Option<i64>,
        /// Rasterization resolution.
        #[arg(long)]
        grid: Option<i64>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    env_logger::init();
    match Cli::parse().command {
        Command::Validate { scenario } => {
            let plan = read_config(&scenario).and_then(|c| load(&c, &scenario));
            match plan {
                Ok(p) => {
                    let names: Vec<_> = p.checks.iter().map(|c| c.name()).collect();
                    println!("ok: {}", names.join(", "));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Run {
            scenario,
            tol_abs,
            tol_rel,
            max_degree,
            grid,
            format,
            out,
        } => {
            let mut config: ScenarioConfig = match read_config(&scenario) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            if tol_abs.is_some() || tol_rel.is_some() {
                let mut t = config.tolerances.unwrap_or_default();
                t.abs = tol_abs.unwrap_or(t.abs);
                t.rel = tol_rel.unwrap_or(t.rel);
                config.tolerances = Some(t);
            }
            config.k = max_degree.or(config.k);
            config.grid = grid.or(config.grid);
            if let Some(f) = format {
                config.format = Some(match f {
                    OutputFormat::Json => "json".into(),
                    OutputFormat::Text => "text".into(),
                });
            }
            let plan = match load(&config, &scenario) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let report = run_scenario(&config, &plan);
            let text = match plan.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let written = match &out {
                Some(path) => std::fs::write(path, &text).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                }),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                return fail(e);
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
