use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tduality::scenario::{self, Flags};

#[derive(Parser)]
#[command(name = "tduality", version, about = "Run T-duality scenarios and report each check")]
struct Cli {
    /// List the registered scenarios and exit.
    #[arg(long)]
    list: bool,
    /// Directory searched for `<scenario>.toml` before the built-in configs.
    #[arg(long, global = true, env = "TDUALITY_SCENARIOS")]
    scenarios_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run {
        scenario: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Replace every per-check tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write one JSON object per check to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for name in scenario::scenario_names() {
            let description = scenario::load(name, cli.scenarios_dir.as_deref()).map(|c| c.description).unwrap_or_default();
            emit(&format!("{name:<18} {description}\n"));
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run { scenario: name, seed, samples, tol, out }) = cli.command else {
        eprintln!("nothing to do: pass `run <scenario>` or `--list`");
        return ExitCode::from(2);
    };
    let flags = Flags { seed, samples, tol, scenario_dir: cli.scenarios_dir };
    let report = match scenario::run(&name, &flags) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let lines = report.to_json_lines();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &lines) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => emit(&lines),
    }
    emit(&report.summary_table());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Writes to stdout, exiting quietly if the reader has gone away.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write output: {e}");
        std::process::exit(2);
    }
}
