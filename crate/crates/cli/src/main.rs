use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;

use poincare_cli::commands::{run, Command};
use poincare_cli::config::RunConfig;

/// Distortion experiments on interval and critical circle maps.
#[derive(Parser, Debug)]
#[command(name = "pmetric", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp line.
    #[arg(long)]
    no_timestamp: bool,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("pmetric: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let outcome = match run(args.command, &config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("pmetric: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let timestamp = (!args.no_timestamp).then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let target = args.out.or(config.out.clone());
    let written = match &target {
        Some(path) => File::create(path).map_err(|e| e.to_string()).and_then(|f| emit(&outcome.table, BufWriter::new(f), timestamp, args.json)),
        None => emit(&outcome.table, io::stdout().lock(), timestamp, args.json),
    };
    if let Err(e) = written {
        eprintln!("pmetric: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("pmetric: bound or decay check failed");
        ExitCode::from(1)
    }
}

fn emit<W: Write>(table: &poincare_cli::output::Table, mut w: W, timestamp: Option<u64>, json: bool) -> Result<(), String> {
    if json {
        table.write_json(&mut w, timestamp).map_err(|e| e.to_string())?;
        writeln!(w).map_err(|e| e.to_string())?;
    } else {
        table.write_csv(&mut w, timestamp).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}
