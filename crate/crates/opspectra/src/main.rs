//! Command-line front end: one subcommand per experiment, flat key-value
//! configuration with CLI flags overriding config-file values, exit code 2
//! for configuration errors and 3 for numerical contract violations.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use opspectra::harness::{run, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "opspectra",
    version = opspectra::VERSION,
    about = "Spectral statistics of random matrix products, composed quantum operations, and stochastic baker maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Flags {
    /// System dimension of a quantum map
    #[arg(long)]
    d: Option<u64>,
    /// Environment dimension M
    #[arg(long)]
    env: Option<u64>,
    /// Baker unitary iterations per measurement
    #[arg(long = "L")]
    l: Option<u64>,
    /// Composition steps / propagator power s; Fuss-Catalan order for
    /// fc-density
    #[arg(long)]
    steps: Option<u64>,
    /// Matrix dimension N for Ginibre ensembles
    #[arg(long)]
    dim: Option<u64>,
    /// Ginibre scale parameter
    #[arg(long)]
    xi: Option<f64>,
    /// Number of samples (matrices, maps, or phase pairs)
    #[arg(long)]
    samples: Option<u64>,
    /// Histogram bin count; curve table length for fc-density
    #[arg(long)]
    bins: Option<u64>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Baker phases: "random" or "fixed:<phi1>,<phi2>"
    #[arg(long)]
    phases: Option<String>,
    /// Edge profile: "standard-erfc" or "gaussian-q"
    #[arg(long)]
    variant: Option<String>,
    /// Worker threads (default 1; any count gives identical output)
    #[arg(long)]
    threads: Option<u64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; CLI flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of complex Ginibre matrices
    GinibreSpectrum(Flags),
    /// Eigenvalues of products of s independent Ginibre matrices
    ProductSpectrum(Flags),
    /// Eigenvalues of s-th powers of single Ginibre matrices
    PowerSpectrum(Flags),
    /// Bulk superoperator spectra of random quantum maps
    MapSpectrum(Flags),
    /// Rescaled squared singular values of composed random maps
    MapSingular(Flags),
    /// Shannon entropies of composed-map Wishart spectra
    MapEntropy(Flags),
    /// Bulk spectra of s-step stochastic baker propagators
    BakerSpectrum(Flags),
    /// Rescaled nonzero squared singular values of baker propagators
    BakerSingular(Flags),
    /// Fuss-Catalan density table
    FcDensity(Flags),
    /// Finite-size edge parameter fit on pooled map or baker spectra
    FitQ(Flags),
    /// Two-sample KS test between product and power spectra
    ProductPowerTest(Flags),
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::GinibreSpectrum(f) => (Experiment::GinibreSpectrum, f),
            Command::ProductSpectrum(f) => (Experiment::ProductSpectrum, f),
            Command::PowerSpectrum(f) => (Experiment::PowerSpectrum, f),
            Command::MapSpectrum(f) => (Experiment::MapSpectrum, f),
            Command::MapSingular(f) => (Experiment::MapSingular, f),
            Command::MapEntropy(f) => (Experiment::MapEntropy, f),
            Command::BakerSpectrum(f) => (Experiment::BakerSpectrum, f),
            Command::BakerSingular(f) => (Experiment::BakerSingular, f),
            Command::FcDensity(f) => (Experiment::FcDensity, f),
            Command::FitQ(f) => (Experiment::FitQ, f),
            Command::ProductPowerTest(f) => (Experiment::ProductPowerTest, f),
        }
    }
}

fn merged_params(experiment: Experiment, flags: &Flags) -> opspectra::Result<BTreeMap<String, Value>> {
    let mut map = match &flags.config {
        Some(path) => ExperimentConfig::load_file(path)?,
        None => BTreeMap::new(),
    };
    let mut set_u64 = |key: &str, v: Option<u64>| {
        if let Some(v) = v {
            map.insert(key.to_string(), Value::from(v));
        }
    };
    set_u64("d", flags.d);
    set_u64("env", flags.env);
    set_u64("L", flags.l);
    set_u64("dim", flags.dim);
    set_u64("samples", flags.samples);
    set_u64("seed", flags.seed);
    set_u64("threads", flags.threads);
    // fc-density has no composition steps or histogram, so its order and
    // curve length ride the spare flags.
    if experiment == Experiment::FcDensity {
        set_u64("order", flags.steps);
        set_u64("points", flags.bins);
    } else {
        set_u64("steps", flags.steps);
        set_u64("bins", flags.bins);
    }
    if let Some(xi) = flags.xi {
        map.insert("xi".into(), Value::from(xi));
    }
    if let Some(phases) = &flags.phases {
        map.insert("phases".into(), Value::from(phases.clone()));
    }
    if let Some(variant) = &flags.variant {
        map.insert("variant".into(), Value::from(variant.clone()));
    }
    if let Some(out) = &flags.out {
        map.insert("out".into(), Value::from(out.display().to_string()));
    }
    Ok(map)
}

fn execute() -> opspectra::Result<()> {
    let cli = Cli::parse();
    let (experiment, flags) = cli.command.split();
    let merged = merged_params(experiment, &flags)?;
    let config = ExperimentConfig::resolve(experiment, &merged)?;
    let outcome = run(&config)?;
    println!("experiment={} out={}", experiment, outcome.data_path.display());
    for (key, value) in &outcome.summary {
        let rendered = match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        println!("{key}={rendered}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
