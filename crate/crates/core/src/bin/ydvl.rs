use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ydvl::harness;

#[derive(Parser)]
#[command(name = "ydvl", about = "Density-dependent Euler on the periodic square")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and write diagnostics and snapshots.
    Run { config: PathBuf },
    /// Print diagnostics for snapshots given in time order.
    Diagnose {
        #[arg(required = true)]
        snapshots: Vec<PathBuf>,
        #[arg(long, default_value_t = 4.0)]
        p0: f64,
    },
    /// Regularisation sweep over the configured cutoffs.
    Sweep { config: PathBuf },
    /// Twin-run stability traces for each perturbation amplitude.
    Twin {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
    },
    /// Regularise the configured initial datum at one cutoff.
    Mollify {
        config: PathBuf,
        #[arg(long)]
        ncut: usize,
    },
}

fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("YDVL_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("YDVL_THREADS = '{v}'"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn load(path: &std::path::Path) -> anyhow::Result<harness::RunConfig> {
    harness::load_config(path).with_context(|| format!("load_config {}", path.display()))
}

fn main_inner() -> anyhow::Result<()> {
    let cli = Cli::parse();
    init_threads()?;
    match cli.command {
        Command::Run { config } => {
            let out = harness::run(&load(&config)?)?;
            let last = out.series.last().expect("series has the initial row");
            println!(
                "steps = {}, t = {}, energy = {:.16e}, m_accum = {:.16e}\ncsv = {}",
                out.steps,
                last.t,
                last.energy,
                last.m_accum,
                out.csv_path.display()
            );
        }
        Command::Diagnose { snapshots, p0 } => print!("{}", harness::diagnose(&snapshots, p0)?),
        Command::Sweep { config } => print!("{}", harness::sweep(&load(&config)?)?),
        Command::Twin { config, delta } => {
            print!("{}", harness::twin(&load(&config)?, &delta)?.0)
        }
        Command::Mollify { config, ncut } => {
            print!("{}", harness::mollify_datum(&load(&config)?, ncut)?)
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Library errors already embed their source text; skip repeated links.
            let mut msg = String::new();
            for cause in e.chain() {
                let c = cause.to_string();
                if !msg.ends_with(&c) {
                    if !msg.is_empty() {
                        msg.push_str(": ");
                    }
                    msg.push_str(&c);
                }
            }
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
