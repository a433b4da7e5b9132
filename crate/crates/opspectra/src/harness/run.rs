//! Experiment dispatch. Every experiment draws per-sample RNG streams from
//! (seed, sample index), collects results in index order, and writes files
//! from a single thread, so outputs are byte identical for any worker count.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::Value;

use crate::baker::{sstep_singular_spectrum, stochastic_baker, BakerSpec};
use crate::channels::{compose, random_map_with_stream, spectrum_bulk, Superoperator};
use crate::ensembles::{sample_ginibre, GinibreKind, GinibreParams};
use crate::laws::{
    fc_cdf, fc_mean_entropy, ginibre_finite_radial_cdf, product_radial_cdf, EdgeVariant, FcOrder,
    RadialLawParams,
};
use crate::rng::RngStream;
use crate::spectral::{eigenvalues, matrix_power, matrix_product, shannon_entropy_rel,
    wishart_normalize};
use crate::stats::{
    default_bins, fit_q, histogram_from_radii, ks_distance_cdf, product_power_comparison,
    product_power_pools, FitResult, RadialHistogram,
};
use crate::{Error, Result};

use super::config::{Experiment, ExperimentConfig, PhasesMode};
use super::csv::{write_curve_csv, write_eigen_csv, write_histogram_csv, write_scalar_csv};
use super::curves::fc_graded_curve;

/// Paths written and the headline statistics of one run.
#[derive(Debug)]
pub struct RunOutcome {
    pub data_path: PathBuf,
    pub manifest_path: PathBuf,
    pub summary: BTreeMap<String, Value>,
}

/// Maps sample indices through `f` on up to `threads` workers; results come
/// back in index order regardless of scheduling.
fn run_samples<T: Send>(
    threads: usize,
    n: usize,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    if threads <= 1 {
        (0..n).map(f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
        pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}

fn flatten_eigen(per_sample: Vec<Vec<Complex64>>) -> Vec<(usize, Complex64)> {
    let mut rows = Vec::new();
    for (k, values) in per_sample.into_iter().enumerate() {
        rows.extend(values.into_iter().map(|z| (k, z)));
    }
    rows
}

fn flatten_scalar(per_sample: Vec<Vec<f64>>) -> Vec<(usize, f64)> {
    let mut rows = Vec::new();
    for (k, values) in per_sample.into_iter().enumerate() {
        rows.extend(values.into_iter().map(|x| (k, x)));
    }
    rows
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Runs one configured experiment: writes the data CSV and a
/// `<out>.manifest.json` with parameters, library version, elapsed time, and
/// headline statistics.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    crate::linalg::init_linalg();
    let started = Instant::now();
    let summary = match config.experiment {
        Experiment::GinibreSpectrum => ginibre_spectrum(config)?,
        Experiment::ProductSpectrum => product_or_power_spectrum(config, false)?,
        Experiment::PowerSpectrum => product_or_power_spectrum(config, true)?,
        Experiment::MapSpectrum => map_spectrum(config)?,
        Experiment::MapSingular => map_singular(config)?,
        Experiment::MapEntropy => map_entropy(config)?,
        Experiment::BakerSpectrum => baker_spectrum(config)?,
        Experiment::BakerSingular => baker_singular(config)?,
        Experiment::FcDensity => fc_density_table(config)?,
        Experiment::FitQ => fit_q_experiment(config)?,
        Experiment::ProductPowerTest => product_power_test(config)?,
    };
    let manifest_path = PathBuf::from(format!("{}.manifest.json", config.out.display()));
    let manifest = serde_json::json!({
        "experiment": config.experiment.name(),
        "params": Value::Object(config.manifest_params().into_iter().collect()),
        "version": crate::VERSION,
        "elapsed_ms": started.elapsed().as_millis() as u64,
        "summary": Value::Object(summary.clone().into_iter().collect()),
    });
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Io(std::io::Error::other(format!("manifest serialization: {e}"))))?;
    std::fs::write(&manifest_path, text + "\n").map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot write {}: {e}", manifest_path.display()),
        ))
    })?;
    Ok(RunOutcome {
        data_path: config.out.clone(),
        manifest_path,
        summary,
    })
}

fn ginibre_spectrum(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let n = config.need_dim()?;
    let params = GinibreParams::new(n, config.xi, GinibreKind::Complex)?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let mut stream = RngStream::new(config.seed, k as u64);
        let g = sample_ginibre(&params, &mut stream);
        Ok(eigenvalues(&g)?.eigen()?.to_vec())
    })?;
    let rows = flatten_eigen(per_sample);
    write_eigen_csv(&config.out, &config.csv_header(), &rows)?;
    let radii: Vec<f64> = rows.iter().map(|(_, z)| z.norm()).collect();
    let xi = config.xi;
    let ks_finite = ks_distance_cdf(&radii, |r| {
        ginibre_finite_radial_cdf(r / xi, n).unwrap_or(f64::NAN)
    })?;
    let ks_sharp = ks_distance_cdf(&radii, |r| ((r / xi) * (r / xi)).min(1.0))?;
    Ok(BTreeMap::from([
        ("ks_finite".into(), num(ks_finite)),
        ("ks_sharp".into(), num(ks_sharp)),
    ]))
}

fn product_or_power_spectrum(
    config: &ExperimentConfig,
    power: bool,
) -> Result<BTreeMap<String, Value>> {
    let n = config.need_dim()?;
    let s = config.need_steps()?;
    let params = GinibreParams::new(n, config.xi, GinibreKind::Complex)?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let matrix = if power {
            // Stream k s matches the first product factor, so product and
            // power runs with one seed share their base matrices.
            let mut stream = RngStream::new(config.seed, (k * s) as u64);
            matrix_power(&sample_ginibre(&params, &mut stream), s)?
        } else {
            let factors: Vec<_> = (0..s)
                .map(|j| {
                    let mut stream = RngStream::new(config.seed, (k * s + j) as u64);
                    sample_ginibre(&params, &mut stream)
                })
                .collect();
            matrix_product(&factors)?
        };
        Ok(eigenvalues(&matrix)?.eigen()?.to_vec())
    })?;
    let rows = flatten_eigen(per_sample);
    write_eigen_csv(&config.out, &config.csv_header(), &rows)?;
    let radii: Vec<f64> = rows.iter().map(|(_, z)| z.norm()).collect();
    let law = RadialLawParams::new(s, config.xi, 1, 1.0)?;
    let ks_sharp = ks_distance_cdf(&radii, |r| product_radial_cdf(r, &law))?;
    Ok(BTreeMap::from([("ks_sharp".into(), num(ks_sharp))]))
}

fn map_spectrum(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let mut stream = RngStream::new(config.seed, k as u64);
        let sop = random_map_with_stream(d, m, &mut stream)?;
        Ok(spectrum_bulk(&sop)?.eigen()?.to_vec())
    })?;
    let rows = flatten_eigen(per_sample);
    write_eigen_csv(&config.out, &config.csv_header(), &rows)?;
    let max_modulus = rows.iter().map(|(_, z)| z.norm()).fold(0.0, f64::max);
    Ok(BTreeMap::from([
        ("max_bulk_modulus".into(), num(max_modulus)),
        ("disk_radius".into(), num(1.0 / (m as f64).sqrt())),
    ]))
}

fn composed_map(
    d: usize,
    m: usize,
    s: usize,
    seed: u64,
    sample: usize,
) -> Result<Superoperator> {
    let maps: Vec<_> = (0..s)
        .map(|j| {
            let mut stream = RngStream::new(seed, (sample * s + j) as u64);
            random_map_with_stream(d, m, &mut stream)
        })
        .collect::<Result<_>>()?;
    compose(&maps)
}

fn map_singular(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let s = config.steps_or_one()?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let sop = composed_map(d, m, s, config.seed, k)?;
        Ok(wishart_normalize(&sop.matrix, true)?.rescaled)
    })?;
    let rows = flatten_scalar(per_sample);
    write_scalar_csv(&config.out, &config.csv_header(), &rows)?;
    let mut summary = BTreeMap::new();
    if let Ok(order) = FcOrder::new(s) {
        let pooled: Vec<f64> = rows.iter().map(|&(_, x)| x).collect();
        let cdf = fc_cdf(order);
        let ks = ks_distance_cdf(&pooled, |x| cdf.eval(x))?;
        summary.insert("ks_fc".into(), num(ks));
        summary.insert("fc_order".into(), Value::from(s as u64));
    }
    Ok(summary)
}

fn map_entropy(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let s = config.steps_or_one()?;
    let entropies = run_samples(config.threads, config.samples, |k| {
        let sop = composed_map(d, m, s, config.seed, k)?;
        shannon_entropy_rel(&wishart_normalize(&sop.matrix, true)?)
    })?;
    let rows: Vec<(usize, f64)> = entropies.iter().cloned().enumerate().collect();
    write_scalar_csv(&config.out, &config.csv_header(), &rows)?;
    let mean = entropies.iter().sum::<f64>() / entropies.len() as f64;
    let mut summary = BTreeMap::from([("mean_entropy".into(), num(mean))]);
    if let Ok(order) = FcOrder::new(s) {
        summary.insert("fc_entropy".into(), num(fc_mean_entropy(order)?));
    }
    Ok(summary)
}

fn baker_phases(config: &ExperimentConfig, sample: usize) -> (f64, f64) {
    match config.phases {
        PhasesMode::Fixed(p1, p2) => (p1, p2),
        PhasesMode::Random => {
            let mut stream = RngStream::new(config.seed, sample as u64);
            (stream.next_unit(), stream.next_unit())
        }
    }
}

fn baker_spectrum(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let l = config.need_l()?;
    let s = config.steps_or_one()?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let (p1, p2) = baker_phases(config, k);
        let spec = BakerSpec::new(d, m, l, p1, p2, s)?;
        let sop = stochastic_baker(&spec)?;
        let bulk = spectrum_bulk(&sop)?.eigen()?.to_vec();
        // Spectral mapping: the bulk of Phi^s is the s-th powers of the
        // bulk of Phi.
        Ok(bulk.into_iter().map(|z| z.powu(s as u32)).collect::<Vec<_>>())
    })?;
    let rows = flatten_eigen(per_sample);
    write_eigen_csv(&config.out, &config.csv_header(), &rows)?;
    let radius = (m as f64).powf(-(s as f64) / 2.0);
    let allowed = radius * 1.25;
    let outside = rows.iter().filter(|(_, z)| z.norm() > allowed).count();
    Ok(BTreeMap::from([
        ("disk_radius".into(), num(radius)),
        (
            "outlier_fraction".into(),
            num(outside as f64 / rows.len().max(1) as f64),
        ),
    ]))
}

fn baker_singular(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let l = config.need_l()?;
    let s = config.steps_or_one()?;
    let per_sample = run_samples(config.threads, config.samples, |k| {
        let (p1, p2) = baker_phases(config, k);
        let spec = BakerSpec::new(d, m, l, p1, p2, s)?;
        Ok(sstep_singular_spectrum(&spec)?.rescaled)
    })?;
    let rows = flatten_scalar(per_sample);
    write_scalar_csv(&config.out, &config.csv_header(), &rows)?;
    let mut summary = BTreeMap::new();
    if s >= 2 {
        if let Ok(order) = FcOrder::new(s - 1) {
            let pooled: Vec<f64> = rows.iter().map(|&(_, x)| x).collect();
            let cdf = fc_cdf(order);
            let ks = ks_distance_cdf(&pooled, |x| cdf.eval(x))?;
            summary.insert("ks_fc".into(), num(ks));
            summary.insert("fc_order".into(), Value::from((s - 1) as u64));
        }
    }
    Ok(summary)
}

fn fc_density_table(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let order = FcOrder::new(config.need_order()? as usize)?;
    let (rows, raw_mass) = fc_graded_curve(order, config.points)?;
    write_curve_csv(&config.out, &config.csv_header(), &rows)?;
    let integral = super::curves::trapezoid_mass(&rows);
    Ok(BTreeMap::from([
        ("trapezoid_integral".into(), num(integral)),
        ("raw_mass".into(), num(raw_mass)),
    ]))
}

/// Pooled bulk moduli of random maps, leading eigenvalue removed per map.
pub fn pooled_map_bulk_moduli(
    d: usize,
    m: usize,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<Vec<f64>> {
    let per_sample = run_samples(threads, samples, |k| {
        let mut stream = RngStream::new(seed, k as u64);
        let sop = random_map_with_stream(d, m, &mut stream)?;
        Ok(spectrum_bulk(&sop)?
            .eigen()?
            .iter()
            .map(|z| z.norm())
            .collect::<Vec<_>>())
    })?;
    Ok(per_sample.into_iter().flatten().collect())
}

/// Pooled bulk moduli of stochastic baker maps. Each map keeps its largest
/// d^2/M - 1 moduli: beyond the removed leading eigenvalue, the spectrum has
/// d^2 (1 - 1/M) structural zeros that carry no radial information.
pub fn pooled_baker_bulk_moduli(
    d: usize,
    m: usize,
    l: usize,
    samples: usize,
    seed: u64,
    phases: PhasesMode,
    threads: usize,
) -> Result<Vec<f64>> {
    let keep = d * d / m - 1;
    let per_sample = run_samples(threads, samples, |k| {
        let (p1, p2) = match phases {
            PhasesMode::Fixed(p1, p2) => (p1, p2),
            PhasesMode::Random => {
                let mut stream = RngStream::new(seed, k as u64);
                (stream.next_unit(), stream.next_unit())
            }
        };
        let spec = BakerSpec::new(d, m, l, p1, p2, 1)?;
        let sop = stochastic_baker(&spec)?;
        let mut moduli: Vec<f64> = spectrum_bulk(&sop)?
            .eigen()?
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        moduli.truncate(keep);
        Ok(moduli)
    })?;
    Ok(per_sample.into_iter().flatten().collect())
}

/// Histogram and finite-size edge fit for pooled radii at s = 1.
pub fn fit_pooled_radii(
    radii: &[f64],
    xi: f64,
    n_for_fit: usize,
    bins: Option<usize>,
    variant: EdgeVariant,
) -> Result<(RadialHistogram, FitResult)> {
    let bins = bins.unwrap_or_else(|| default_bins(radii.len()));
    let hist = histogram_from_radii(radii, bins)?;
    let law = RadialLawParams::new(1, xi, n_for_fit, 1.0)?;
    let fit = fit_q(&hist, &law, variant)?;
    Ok((hist, fit))
}

fn fit_q_experiment(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let d = config.need_d()?;
    let m = config.need_env()?;
    let xi = 1.0 / (m as f64).sqrt();
    let (mode, radii) = match config.l {
        Some(l) => (
            "baker",
            pooled_baker_bulk_moduli(
                d,
                m,
                l,
                config.samples,
                config.seed,
                config.phases,
                config.threads,
            )?,
        ),
        None => (
            "maps",
            pooled_map_bulk_moduli(d, m, config.samples, config.seed, config.threads)?,
        ),
    };
    let (hist, fit) = fit_pooled_radii(&radii, xi, d * d, config.bins, config.variant)?;
    write_histogram_csv(&config.out, &config.csv_header(), &hist)?;
    Ok(BTreeMap::from([
        ("mode".into(), Value::from(mode)),
        ("q".into(), num(fit.q)),
        ("residual".into(), num(fit.residual)),
        ("iterations".into(), Value::from(fit.iterations as u64)),
        ("converged".into(), Value::from(fit.converged)),
        ("variant".into(), Value::from(config.variant.to_string())),
    ]))
}

fn product_power_test(config: &ExperimentConfig) -> Result<BTreeMap<String, Value>> {
    let n = config.need_dim()?;
    let s = config.need_steps()?;
    let (product_radii, power_radii) = product_power_pools(n, s, config.samples, config.seed)?;
    // Rows 0..samples hold product radii; rows samples..2 samples hold the
    // matching power radii.
    let mut rows: Vec<(usize, f64)> = Vec::with_capacity(product_radii.len() + power_radii.len());
    for (k, chunk) in product_radii.chunks(n).enumerate() {
        rows.extend(chunk.iter().map(|&x| (k, x)));
    }
    for (k, chunk) in power_radii.chunks(n).enumerate() {
        rows.extend(chunk.iter().map(|&x| (config.samples + k, x)));
    }
    write_scalar_csv(&config.out, &config.csv_header(), &rows)?;
    let ks = product_power_comparison(n, s, config.samples, config.seed)?;
    Ok(BTreeMap::from([("ks_two_sample".into(), num(ks))]))
}
