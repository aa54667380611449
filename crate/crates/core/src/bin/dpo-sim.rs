use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dpo_sim::harness::config::parse_dims;
use dpo_sim::harness::runner::EXIT_CONFIG;
use dpo_sim::harness::{parse_config_unchecked, run_experiment, ConfigError, Experiment, RunConfig};
use dpo_sim::protocols::measurement::Shots;

#[derive(Parser)]
#[command(name = "dpo-sim", version, about = "Two-ion trilinear phonon coupling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mode frequencies, equilibrium spacing and coupling strength
    Modes(Common),
    /// Radial/axial conversion oscillation versus hold time
    Oscillate(Common),
    /// Two-phonon avoided-crossing spectrum
    Crossing(Common),
    /// Parity of a radial state through the adiabatic sweep
    Parity(Common),
    /// Displaced-parity Wigner tomography
    Wigner(Common),
    /// Truncation and step-size convergence report
    Converge(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shots per point
    #[arg(long, conflicts_with = "exact")]
    shots: Option<u64>,
    /// Infinite-shot mode
    #[arg(long)]
    exact: bool,
    /// Truncation as RxA, e.g. 40x20
    #[arg(long)]
    dims: Option<String>,
    /// State descriptor, e.g. fock:2 or cat:1.73:pi:minus
    #[arg(long)]
    state: Option<String>,
}

fn build_config(experiment: Experiment, c: &Common) -> Result<RunConfig, String> {
    let text = match &c.config {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
        None => String::new(),
    };
    let describe = |e: ConfigError| format!("config error ({}): {e}", e.kind());
    let mut cfg = parse_config_unchecked(&text, Some(experiment)).map_err(describe)?;
    if let Some(out) = &c.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = c.seed {
        cfg.measurement.seed = seed;
    }
    if let Some(n) = c.shots {
        cfg.measurement.shots = Shots::Finite(n);
    }
    if c.exact {
        cfg.measurement.shots = Shots::Infinite;
    }
    if let Some(d) = &c.dims {
        let (r, a) = parse_dims(d).map_err(|m| format!("config error (validation): --dims: {m}"))?;
        cfg.simulation.radial_dim = r;
        cfg.simulation.axial_dim = a;
    }
    if let Some(s) = &c.state {
        cfg.state = Some(
            s.parse()
                .map_err(|e| format!("config error (validation): --state: {e}"))?,
        );
    }
    cfg.validate().map_err(describe)?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, common) = match &cli.command {
        Command::Modes(c) => (Experiment::Modes, c),
        Command::Oscillate(c) => (Experiment::Oscillate, c),
        Command::Crossing(c) => (Experiment::Crossing, c),
        Command::Parity(c) => (Experiment::Parity, c),
        Command::Wigner(c) => (Experiment::Wigner, c),
        Command::Converge(c) => (Experiment::Converge, c),
    };
    let cfg = match build_config(experiment, common) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run_experiment(&cfg) {
        Ok(report) => {
            let _ = write!(io::stdout(), "{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
