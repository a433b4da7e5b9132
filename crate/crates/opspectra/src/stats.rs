//! Empirical statistics: radial histograms, Kolmogorov-Smirnov distances,
//! least-squares fitting of the finite-size edge parameter q, and the
//! product-versus-power spectral comparison.

use crate::ensembles::{sample_ginibre, GinibreKind, GinibreParams};
use crate::laws::{EdgeVariant, RadialLawParams};
use crate::rng::RngStream;
use crate::spectral::{eigenvalues, matrix_product, matrix_power, SpectrumSample};
use crate::{Error, Result};

/// Histogram of radii with unit-mass density normalization.
#[derive(Debug, Clone)]
pub struct RadialHistogram {
    /// bins + 1 strictly increasing boundaries starting at 0.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// counts / (n_total * width); integrates to 1 over the edge range.
    pub density: Vec<f64>,
    pub n_total: usize,
}

/// Histogram of eigenvalue moduli over [0, max |z|].
pub fn radial_histogram(spec: &SpectrumSample, bins: usize) -> Result<RadialHistogram> {
    let radii: Vec<f64> = spec.eigen()?.iter().map(|z| z.norm()).collect();
    histogram_from_radii(&radii, bins)
}

/// Histogram of precollected radii, the entry point after pooling spectra
/// across ensemble members.
pub fn histogram_from_radii(radii: &[f64], bins: usize) -> Result<RadialHistogram> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 bins, got {bins}"
        )));
    }
    if radii.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut max = 0.0f64;
    for &r in radii {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidInput(format!("invalid radius {r}")));
        }
        max = max.max(r);
    }
    if max == 0.0 {
        return Err(Error::InvalidInput(
            "all radii are zero; histogram range is degenerate".into(),
        ));
    }
    let width = max / bins as f64;
    let mut counts = vec![0u64; bins];
    for &r in radii {
        let idx = ((r / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n_total = radii.len();
    let density: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / (n_total as f64 * width))
        .collect();
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 * width).collect();
    Ok(RadialHistogram {
        edges,
        counts,
        density,
        n_total,
    })
}

/// Default bin count: 50 once a pool reaches 10^4 points, ceil(sqrt(n))
/// below that.
pub fn default_bins(n: usize) -> usize {
    if n >= 10_000 {
        50
    } else {
        ((n as f64).sqrt().ceil() as usize).max(2)
    }
}

/// One-sample Kolmogorov-Smirnov distance between the empirical CDF of
/// `sample` and the reference CDF.
pub fn ks_distance_cdf(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_distance_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        // Consume every copy of the current value from both samples before
        // measuring, so ties across samples produce one atomic CDF jump.
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Outcome of a q fit.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub q: f64,
    /// Sum of squared density errors weighted by bin width at the optimum.
    pub residual: f64,
    /// Total objective evaluations (coarse scan plus golden section).
    pub iterations: u32,
    pub converged: bool,
}

const GL_X: [f64; 16] = [
    -0.9894009349916499,
    -0.9445750230732326,
    -0.8656312023878318,
    -0.755404408355003,
    -0.6178762444026438,
    -0.45801677765722737,
    -0.2816035507792589,
    -0.09501250983763745,
    0.09501250983763745,
    0.2816035507792589,
    0.45801677765722737,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_W: [f64; 16] = [
    0.027152459411754037,
    0.062253523938647706,
    0.09515851168249259,
    0.12462897125553403,
    0.14959598881657676,
    0.16915651939500262,
    0.1826034150449236,
    0.18945061045506859,
    0.18945061045506859,
    0.1826034150449236,
    0.16915651939500262,
    0.14959598881657676,
    0.12462897125553403,
    0.09515851168249259,
    0.062253523938647706,
    0.027152459411754037,
];

fn edge_half(x: f64, variant: EdgeVariant) -> f64 {
    match variant {
        EdgeVariant::StandardErfc => 0.5 * libm::erfc(x),
        EdgeVariant::GaussianQ => 0.25 * libm::erfc(x / std::f64::consts::SQRT_2),
    }
}

/// Model mass per bin under u = (r/xi)^{2/s}, which absorbs the algebraic
/// prefactor: the radial measure P_s(r) dr becomes du, leaving only the
/// smooth edge factor to quadrature.
fn bin_masses(
    edges: &[f64],
    q: f64,
    p: &RadialLawParams,
    variant: EdgeVariant,
    out: &mut Vec<f64>,
) {
    out.clear();
    let s = p.s as f64;
    let rt_n = (p.n as f64).sqrt();
    let ue: Vec<f64> = edges.iter().map(|&e| (e / p.xi).powf(2.0 / s)).collect();
    for win in ue.windows(2) {
        let (a, b) = (win[0], win[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in GL_X.iter().zip(GL_W) {
            let u = mid + half * x;
            let r = p.xi * u.powf(s / 2.0);
            acc += w * edge_half(q * (r - p.xi) * rt_n, variant);
        }
        out.push(half * acc);
    }
}

/// Total model mass over [0, u_hi] in u-space by trapezoid.
fn model_norm(q: f64, p: &RadialLawParams, variant: EdgeVariant, u_hi: f64) -> f64 {
    const GRID: usize = 4000;
    let s = p.s as f64;
    let rt_n = (p.n as f64).sqrt();
    let h = u_hi / GRID as f64;
    let eval = |u: f64| {
        let r = p.xi * u.powf(s / 2.0);
        edge_half(q * (r - p.xi) * rt_n, variant)
    };
    let mut acc = 0.5 * (eval(0.0) + eval(u_hi));
    for i in 1..GRID {
        acc += eval(i as f64 * h);
    }
    acc * h
}

/// Least-squares fit of the edge parameter q: coarse scan of the objective
/// on a log grid over [1e-2, 1e4] followed by golden-section refinement. The
/// q field of `p` is ignored; s, xi, and n define the model family.
pub fn fit_q(
    hist: &RadialHistogram,
    p: &RadialLawParams,
    variant: EdgeVariant,
) -> Result<FitResult> {
    let bins = hist.density.len();
    if bins < 10 {
        return Err(Error::InvalidParameter(format!(
            "fit needs at least 10 bins, got {bins}"
        )));
    }
    let widths: Vec<f64> = hist.edges.windows(2).map(|w| w[1] - w[0]).collect();
    let r_max = *hist.edges.last().unwrap();
    let mut masses = Vec::with_capacity(bins);
    let mut evals = 0u32;
    let objective = |lq: f64, masses: &mut Vec<f64>, evals: &mut u32| -> f64 {
        *evals += 1;
        let q = lq.exp();
        let s = p.s as f64;
        // Cover the edge roll-off tail and the full data range.
        let tail_r = p.xi + 40.0 / (q * (p.n as f64).sqrt());
        let u_hi = ((tail_r / p.xi).powf(2.0 / s)).max((r_max / p.xi).powf(2.0 / s) + 1.0);
        let z = model_norm(q, p, variant, u_hi);
        bin_masses(&hist.edges, q, p, variant, masses);
        let mut acc = 0.0;
        for ((&d, &m), &w) in hist.density.iter().zip(masses.iter()).zip(&widths) {
            let model = m / w / z;
            acc += (d - model) * (d - model) * w;
        }
        acc
    };

    const SCAN: usize = 25;
    let lo = (1e-2f64).ln();
    let hi = (1e4f64).ln();
    let mut best = (0usize, f64::INFINITY);
    let mut scan = [0.0f64; SCAN];
    for (i, slot) in scan.iter_mut().enumerate() {
        let lq = lo + (hi - lo) * i as f64 / (SCAN - 1) as f64;
        *slot = lq;
        let v = objective(lq, &mut masses, &mut evals);
        if v < best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == SCAN - 1 {
        return Err(Error::NonConvergence(format!(
            "objective has no interior minimum on q in [1e-2, 1e4]: best q = {:.4e} at the \
             boundary (objective {:.4e}); the histogram does not constrain the edge parameter",
            scan[best.0].exp(),
            best.1
        )));
    }
    let (mut a, mut b) = (scan[best.0 - 1], scan[best.0 + 1]);
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = objective(c, &mut masses, &mut evals);
    let mut fd = objective(d, &mut masses, &mut evals);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = objective(c, &mut masses, &mut evals);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = objective(d, &mut masses, &mut evals);
        }
    }
    let lq = 0.5 * (a + b);
    let residual = objective(lq, &mut masses, &mut evals);
    Ok(FitResult {
        q: lq.exp(),
        residual,
        iterations: evals,
        converged: true,
    })
}

/// Draw radii from the normalized finite-size model by inverse-CDF sampling
/// on a u-space grid. Used for fit round-trips; `p.q` is the true parameter.
pub fn sample_finite_size_radii(
    n: usize,
    p: &RadialLawParams,
    variant: EdgeVariant,
    stream: &mut RngStream,
) -> Vec<f64> {
    const GRID: usize = 20_000;
    let s = p.s as f64;
    let rt_n = (p.n as f64).sqrt();
    let u_hi = ((p.xi + 10.0 / (p.q * rt_n)) / p.xi).powf(2.0 / s);
    let h = u_hi / GRID as f64;
    let mut cdf = vec![0.0f64; GRID + 1];
    let eval = |u: f64| {
        let r = p.xi * u.powf(s / 2.0);
        edge_half(p.q * (r - p.xi) * rt_n, variant)
    };
    let mut prev = eval(0.0);
    for i in 1..=GRID {
        let cur = eval(i as f64 * h);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + cur) * h;
        prev = cur;
    }
    let total = cdf[GRID];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let target = stream.next_f64() * total;
        let hi = cdf.partition_point(|&c| c < target).clamp(1, GRID);
        let (c0, c1) = (cdf[hi - 1], cdf[hi]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        let u = ((hi - 1) as f64 + frac) * h;
        out.push(p.xi * u.powf(s / 2.0));
    }
    out
}

/// Two-sample KS distance between pooled eigenvalue moduli of products
/// G_1 ... G_s and of powers G^s at matrix dimension n. Product sample k
/// uses factor streams k*s + j; power sample k reuses stream k*s, so s = 1
/// compares a sample to itself and returns exactly 0.
pub fn product_power_comparison(
    n: usize,
    s: usize,
    n_samples: usize,
    seed: u64,
) -> Result<f64> {
    let (product_radii, power_radii) = product_power_pools(n, s, n_samples, seed)?;
    ks_distance_two_sample(&product_radii, &power_radii)
}

/// The two pooled radius samples behind `product_power_comparison`: moduli
/// of products G_1 ... G_s and of powers G^s, where G is the first factor of
/// the corresponding product, so s = 1 makes the pools identical.
pub fn product_power_pools(
    n: usize,
    s: usize,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 32 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be >= 32, got {n}"
        )));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let params = GinibreParams::new(n, 1.0, GinibreKind::Complex)?;
    let mut product_radii = Vec::with_capacity(n * n_samples);
    let mut power_radii = Vec::with_capacity(n * n_samples);
    for k in 0..n_samples {
        let factors: Vec<_> = (0..s)
            .map(|j| {
                let mut stream = RngStream::new(seed, (k * s + j) as u64);
                sample_ginibre(&params, &mut stream)
            })
            .collect();
        let product = matrix_product(&factors)?;
        let spec = eigenvalues(&product)?;
        product_radii.extend(spec.eigen()?.iter().map(|z| z.norm()));

        let base = &factors[0];
        let power = matrix_power(base, s)?;
        let spec = eigenvalues(&power)?;
        power_radii.extend(spec.eigen()?.iter().map(|z| z.norm()));
    }
    Ok((product_radii, power_radii))
}
