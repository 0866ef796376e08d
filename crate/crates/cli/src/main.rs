use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spinchaos::harness::{
    run_baseline, run_scatter, run_spectrum, run_sweep, scatter_csv, spectrum_csv, sweep_csv,
};
use spinchaos::spectral::{cdf_csv, spacing_histogram, unfold, SpacingSample};
use spinchaos::{Error, Result, SweepConfig, THREADS_ENV};

#[derive(Parser)]
#[command(name = "spinchaos", version, about = "Chaos diagnostics for disordered Heisenberg lattices")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ensemble-averaged diagnostics over the config's ratio grid.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        common: Overrides,
        /// Replace the config's ratio grid (comma-separated).
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<f64>>,
    },
    /// Per-eigenstate NPC and entanglement at one ratio.
    Scatter {
        config: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[command(flatten)]
        common: Overrides,
    },
    /// Raw sector eigenvalues at one ratio.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[command(flatten)]
        common: Overrides,
        /// Also write the pooled unfolded spacing histogram here.
        #[arg(long)]
        histogram: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        bin_width: f64,
        /// Also write the pooled empirical spacing CDF here.
        #[arg(long)]
        cdf: Option<PathBuf>,
    },
    /// Random-state purity and GOE NPC baselines.
    Baseline {
        #[arg(long, default_value_t = 12)]
        sites: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(path: &Path, o: &Overrides) -> Result<SweepConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut cfg = SweepConfig::from_toml_str(&text)?;
    if let Some(r) = o.realizations {
        cfg.realizations = r;
    }
    if let Some(s) = o.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(out: Option<&Path>, csv: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep { config, common, ratios } => {
            let mut cfg = load(&config, &common)?;
            if let Some(r) = ratios {
                cfg.ratios = r;
                cfg.validate()?;
            }
            let rows = run_sweep(&cfg)?;
            emit(common.out.as_deref(), &sweep_csv(&cfg, &rows)?)
        }
        Command::Scatter { config, ratio, common } => {
            let cfg = load(&config, &common)?;
            let rows = run_scatter(&cfg, ratio)?;
            emit(common.out.as_deref(), &scatter_csv(&cfg, &rows)?)
        }
        Command::Spectrum { config, ratio, common, histogram, bin_width, cdf } => {
            let cfg = load(&config, &common)?;
            let spectra = run_spectrum(&cfg, ratio)?;
            if histogram.is_some() || cdf.is_some() {
                let samples = spectra
                    .iter()
                    .map(|(_, values)| unfold(values, &cfg.unfolding))
                    .collect::<Result<Vec<_>>>()?;
                let pooled = SpacingSample::pooled(&samples);
                if let Some(p) = &histogram {
                    fs::write(p, spacing_histogram(&pooled, bin_width)?.to_csv())?;
                }
                if let Some(p) = &cdf {
                    fs::write(p, cdf_csv(&pooled, 401))?;
                }
            }
            emit(common.out.as_deref(), &spectrum_csv(&cfg, &spectra)?)
        }
        Command::Baseline { sites, samples, seed, out } => {
            let report = run_baseline(sites, samples, seed)?;
            emit(out.as_deref(), &report.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
