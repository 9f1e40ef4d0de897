use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use seisflat::config::RunConfig;
use seisflat::{commands, Result};

/// Seismic layer flattening with diffusion maps, and a numerical check of
/// eigenfunction stability under domain deformation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic layered volume.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// Output volume file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Flatten one slice of a volume.
    Flatten {
        #[arg(long)]
        config: PathBuf,
        /// Input volume file.
        #[arg(long)]
        input: PathBuf,
        /// Prefix for the output files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure projection residuals on deformed rectangles.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Output report table.
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { config, out } => {
            let v = commands::synth(&RunConfig::load(&config)?, &out)?;
            let d = v.dims();
            println!("wrote {} ({} × {} × {})", out.display(), d.m, d.n, d.l);
        }
        Command::Flatten { config, input, out } => {
            let cfg = RunConfig::load(&config)?;
            let start = Instant::now();
            let (run, paths) = commands::flatten(&cfg, &input, &out)?;
            for (j, lambda) in run.spectrum.values.iter().enumerate().skip(1) {
                println!("lambda_{j} = {lambda:.12}");
            }
            println!("elapsed {:.3} s", start.elapsed().as_secs_f64());
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Command::Verify { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let result = commands::verify(&cfg, &out);
            println!("wrote {}", out.display());
            for r in result? {
                let status = match &r.evaluation {
                    None => "skipped".to_string(),
                    Some(e) => format!("residual {:.3e} bound {:.3e} ok", e.residual, e.bound),
                };
                println!("{:<14} a = {:<12.6e} k = {:<3} {status}", r.family.name(), r.amplitude, r.k);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
