use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cimdcsk::analysis::ShortageMode;
use cimdcsk::harness::{
    emit, emit_theory, load_config, preset, run_grid, theory_grid, ExperimentConfig,
};
use cimdcsk::{Error, Result};

#[derive(Parser)]
#[command(
    name = "cimdcsk",
    version,
    about = "CIM-MC-M-DCSK MISO-SWIPT link simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shortage {
    Paper,
    Half,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Ebn0,
    Phi,
    Nt,
    N,
    M,
    Beta,
}

#[derive(Args)]
struct Common {
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Separate coincident path means so the fading mixture exists.
    #[arg(long, global = true)]
    jitter_degenerate: bool,
    #[arg(long, global = true, value_enum)]
    shortage_mode: Option<Shortage>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    min_errors: Option<u64>,
    #[arg(long, global = true)]
    max_frames: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo simulation of every grid point, with theory attached.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Analytical curves only.
    Theory {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simulation with one grid axis replaced.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Runs a built-in figure configuration.
    Preset {
        name: String,
        /// Skip the Monte Carlo part.
        #[arg(long)]
        theory_only: bool,
    },
}

impl Common {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if self.jitter_degenerate {
            cfg.jitter_degenerate = true;
        }
        if let Some(m) = self.shortage_mode {
            cfg.shortage_mode = match m {
                Shortage::Paper => ShortageMode::Paper,
                Shortage::Half => ShortageMode::Half,
            };
        }
        if let Some(e) = self.min_errors {
            cfg.stop.min_bit_errors = e;
        }
        if let Some(f) = self.max_frames {
            cfg.stop.max_frames = f;
        }
        cfg.validate()
    }
}

fn as_count(axis: &str, v: f64) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!(
            "{axis} values must be non-negative integers, got {v}"
        )))
    }
}

fn override_axis(cfg: &mut ExperimentConfig, axis: Axis, values: &[f64]) -> Result<()> {
    let counts = |name| {
        values
            .iter()
            .map(|&v| as_count(name, v))
            .collect::<Result<Vec<_>>>()
    };
    let g = &mut cfg.grid;
    match axis {
        Axis::Ebn0 => g.ebn0_db = values.to_vec(),
        Axis::Phi => g.phi = values.to_vec(),
        Axis::Nt => g.nt = counts("nt")?,
        Axis::N => g.n = counts("n")?,
        Axis::M => g.m = counts("m")?,
        Axis::Beta => g.beta = counts("beta")?,
    }
    Ok(())
}

fn simulate(cfg: &ExperimentConfig, common: &Common) -> Result<()> {
    let run = run_grid(cfg, common.workers)?;
    for f in &run.failures {
        log::error!("point {} [{}] failed: {}", f.index, f.key, f.message);
    }
    let (csv, manifest) = emit(&run, &common.out)?;
    println!("{}", csv.display());
    println!("{}", manifest.display());
    Ok(())
}

fn theory(cfg: &ExperimentConfig, common: &Common) -> Result<()> {
    let points = theory_grid(cfg, common.workers)?;
    println!("{}", emit_theory(cfg, &points, &common.out)?.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    match cli.command {
        Command::Simulate { config } => {
            let mut cfg = load_config(&config)?;
            common.apply(&mut cfg)?;
            simulate(&cfg, common)
        }
        Command::Theory { config } => {
            let mut cfg = load_config(&config)?;
            common.apply(&mut cfg)?;
            theory(&cfg, common)
        }
        Command::Sweep {
            config,
            axis,
            values,
        } => {
            let mut cfg = load_config(&config)?;
            override_axis(&mut cfg, axis, &values)?;
            common.apply(&mut cfg)?;
            simulate(&cfg, common)
        }
        Command::Preset { name, theory_only } => {
            for mut cfg in preset(&name)? {
                common.apply(&mut cfg)?;
                theory(&cfg, common)?;
                if !theory_only {
                    simulate(&cfg, common)?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
