use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use lcsgeom::fieldcore::Engine;
use lcsgeom::scenario::{list_checks_text, load_scenario, report_json, report_text, run_checks, RunOptions};

#[derive(Parser)]
#[command(name = "lcsgeom", version, about = "Verify LCS-manifold identities on scenario files")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a scenario file.
    Verify {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Overrides the scenario's engine.
        #[arg(long, value_enum)]
        engine: Option<EngineArg>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Evaluate sample points on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Print the check registry.
    ListChecks,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Jet,
    Fd,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::ListChecks => {
            print!("{}", list_checks_text());
            ExitCode::SUCCESS
        }
        Command::Verify {
            scenario,
            format,
            engine,
            seed,
            samples,
            out,
            serial,
        } => {
            let start = Instant::now();
            let sc = match load_scenario(&scenario) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if samples == Some(0) {
                eprintln!("error: --samples must be at least 1");
                return ExitCode::from(2);
            }
            let opts = RunOptions {
                engine: engine.map(|e| match e {
                    EngineArg::Jet => Engine::Jet,
                    EngineArg::Fd => Engine::Fd,
                }),
                seed,
                samples,
                parallel: !serial,
            };
            let report = run_checks(&sc, &opts);
            let body = match format {
                Format::Text => report_text(&report),
                Format::Json => report_json(&report),
            };
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, body) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{body}"),
            }
            if matches!(format, Format::Text) {
                eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
