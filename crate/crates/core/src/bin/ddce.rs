use clap::{Args, Parser, Subcommand};
use ddce::harness::output::{emit_outputs, replot, OutputFormat};
use ddce::harness::trace::{interference_demo_config, trace_experiment};
use ddce::harness::{run_sweep, ExperimentConfig};
use ddce::Result;
use std::path::PathBuf;
use std::process::ExitCode;

/// Delay-Doppler channel estimation experiments.
#[derive(Parser)]
#[command(name = "ddce", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo NMSE sweep and write CSV + SVG.
    Sweep(Common),
    /// Dump per-iteration correlation vectors of one realization.
    Trace {
        #[command(flatten)]
        common: Common,
        /// Trial index whose channel is traced.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Re-render the SVG of a saved sweep CSV.
    Replot {
        csv: PathBuf,
        /// Output SVG path (default: CSV path with .svg).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Config file (`section.key=value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 = one per core.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated solver ids, e.g. `da_omp_rcos,omp_rect`.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Extra `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self, base: ExperimentConfig) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => base,
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.out_dir = o.clone();
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(s) = &self.solver {
            cfg.set("solver.list", s)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ddce::Error::Config(format!("--set expects key=value, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(common) => {
            let cfg = common.resolve(ExperimentConfig::default())?;
            let result = run_sweep(&cfg)?;
            for p in emit_outputs(&result, &cfg.out_dir, &[OutputFormat::Csv, OutputFormat::Plot])? {
                println!("wrote {}", p.display());
            }
            for s in &result.summaries {
                println!(
                    "{}={:<6} {:<12} nmse={:.3e} (median {:.3e}, se {:.1e}, n={}, mean Q {:.2})",
                    s.var, s.value, s.solver, s.nmse_mean, s.nmse_median, s.nmse_stderr, s.trials, s.mean_q
                );
            }
        }
        Command::Trace { common, trial } => {
            let cfg = common.resolve(interference_demo_config())?;
            let dump = trace_experiment(&cfg, trial)?;
            for p in dump.write(&cfg.out_dir)? {
                println!("wrote {}", p.display());
            }
            print!("{}", dump.summary_csv());
        }
        Command::Replot { csv, out } => {
            let out = out.unwrap_or_else(|| csv.with_extension("svg"));
            replot(&csv, &out)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
