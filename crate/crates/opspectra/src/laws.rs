//! Closed-form reference laws: the finite-N circular law, the radial law of
//! eigenvalues of Ginibre products with its finite-size edge ansatz, and the
//! Fuss-Catalan family with moments, supports, and mean-entropy constants.

use num_complex::Complex64;

use crate::quad::integrate;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Regularized upper incomplete gamma Q(n, x) = Gamma(n, x) / Gamma(n) for
/// integer n >= 1, via the exact finite sum e^{-x} sum_{k<n} x^k / k!.
/// Summed in log space with max-term scaling so it stays finite out to
/// n ~ thousands where x^k and k! overflow individually.
pub fn q_upper(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "q_upper needs n >= 1");
    if x <= 0.0 {
        return 1.0;
    }
    let lx = x.ln();
    let mut max_log = f64::NEG_INFINITY;
    for k in 0..n {
        let l = k as f64 * lx - x - libm::lgamma(k as f64 + 1.0);
        if l > max_log {
            max_log = l;
        }
    }
    if max_log < -745.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 0..n {
        let l = k as f64 * lx - x - libm::lgamma(k as f64 + 1.0);
        sum += (l - max_log).exp();
    }
    (max_log.exp() * sum).min(1.0)
}

/// Mean eigenvalue density of an N x N complex Ginibre matrix with entry
/// variance 1/N, normalized to unit mass over the plane:
/// rho(z) = (1/pi) Q(N, N |z|^2). Flat at 1/pi deep inside the unit disk,
/// rolling off over a width ~ 1/sqrt(N) at the edge.
pub fn ginibre_density(z: Complex64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("ginibre density needs N >= 1".into()));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite point {z}")));
    }
    Ok(q_upper(n, n as f64 * z.norm_sqr()) / PI)
}

/// Radial CDF of the finite-N circular law:
/// F(r) = r^2 Q(N, N r^2) + 1 - Q(N+1, N r^2).
/// Follows from integrating the density in polar coordinates; tends to
/// min(r^2, 1) as N grows.
pub fn ginibre_finite_radial_cdf(r: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("radial CDF needs N >= 1".into()));
    }
    if !(r >= 0.0) {
        return Err(Error::InvalidInput(format!("radius must be >= 0, got {r}")));
    }
    let y = n as f64 * r * r;
    Ok((r * r * q_upper(n, y) + 1.0 - q_upper(n + 1, y)).clamp(0.0, 1.0))
}

/// Parameters of the radial eigenvalue law of a product of s square factors:
/// the number of factors s, product scale xi, matrix dimension n entering
/// the finite-size edge width, and the adjustable edge steepness q.
#[derive(Debug, Clone, Copy)]
pub struct RadialLawParams {
    pub s: usize,
    pub xi: f64,
    pub n: usize,
    pub q: f64,
}

impl RadialLawParams {
    pub fn new(s: usize, xi: f64, n: usize, q: f64) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("s must be >= 1".into()));
        }
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        Ok(RadialLawParams { s, xi, n, q })
    }
}

/// Algebraic radial profile (2/s) xi^{-2/s} r^{-1+2/s} without the support
/// cutoff. Diverges at r = 0 for s >= 3, which is fine: consumers integrate
/// it, never evaluate at the origin.
pub fn radial_prefactor(r: f64, p: &RadialLawParams) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let s = p.s as f64;
    (2.0 / s) * p.xi.powf(-2.0 / s) * r.powf(2.0 / s - 1.0)
}

/// Asymptotic radial density of eigenvalues of a product of s factors:
/// the algebraic profile on [0, xi], zero beyond.
pub fn product_radial_density(r: f64, p: &RadialLawParams) -> f64 {
    if r > p.xi {
        return 0.0;
    }
    radial_prefactor(r, p)
}

/// CDF of the asymptotic radial law: (r/xi)^{2/s} clamped to [0, 1].
pub fn product_radial_cdf(r: f64, p: &RadialLawParams) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    (r / p.xi).powf(2.0 / p.s as f64).min(1.0)
}

/// Edge roll-off function of the finite-size ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeVariant {
    /// Conventional complementary error function, E(0) = 1.
    StandardErfc,
    /// Gaussian tail Q(x) = erfc(x / sqrt 2) / 2, E(0) = 1/2.
    GaussianQ,
}

impl std::str::FromStr for EdgeVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard-erfc" => Ok(EdgeVariant::StandardErfc),
            "gaussian-q" => Ok(EdgeVariant::GaussianQ),
            other => Err(Error::InvalidParameter(format!(
                "unknown edge variant '{other}'; expected standard-erfc or gaussian-q"
            ))),
        }
    }
}

impl std::fmt::Display for EdgeVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EdgeVariant::StandardErfc => "standard-erfc",
            EdgeVariant::GaussianQ => "gaussian-q",
        })
    }
}

fn edge_function(x: f64, variant: EdgeVariant) -> f64 {
    match variant {
        EdgeVariant::StandardErfc => libm::erfc(x),
        EdgeVariant::GaussianQ => 0.5 * libm::erfc(x / std::f64::consts::SQRT_2),
    }
}

/// Finite-size ansatz for the radial density near the support edge:
/// prefactor(r) * (1/2) * E(q (r - xi) sqrt N). Un-normalized pointwise
/// values; the q-fitting routine renormalizes its bin-integrated masses over
/// [0, infinity) before comparing to data.
pub fn finite_size_radial_density(r: f64, p: &RadialLawParams, variant: EdgeVariant) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    let arg = p.q * (r - p.xi) * (p.n as f64).sqrt();
    radial_prefactor(r, p) * 0.5 * edge_function(arg, variant)
}

/// Order of a Fuss-Catalan distribution with a closed-form density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcOrder {
    One,
    Two,
    Three,
}

impl FcOrder {
    pub fn new(s: usize) -> Result<Self> {
        match s {
            1 => Ok(FcOrder::One),
            2 => Ok(FcOrder::Two),
            3 => Ok(FcOrder::Three),
            other => Err(Error::InvalidParameter(format!(
                "Fuss-Catalan closed forms cover orders 1..=3, got {other}"
            ))),
        }
    }

    pub fn s(self) -> usize {
        match self {
            FcOrder::One => 1,
            FcOrder::Two => 2,
            FcOrder::Three => 3,
        }
    }
}

/// Support interval [0, (s+1)^{s+1} / s^s].
pub fn fc_support(order: FcOrder) -> (f64, f64) {
    let s = order.s() as f64;
    (0.0, (s + 1.0).powf(s + 1.0) / s.powf(s))
}

/// Leading coefficient C_s of the x -> 0 divergence fc_s(x) ~ C_s x^{-s/(s+1)}.
fn fc_head_coefficient(order: FcOrder) -> f64 {
    match order {
        FcOrder::One => 1.0 / PI,
        FcOrder::Two => 3.0f64.sqrt() / (2.0 * PI),
        FcOrder::Three => 1.0 / (std::f64::consts::SQRT_2 * PI),
    }
}

fn fc1(x: f64) -> f64 {
    if x <= 0.0 || x >= 4.0 {
        return 0.0;
    }
    (4.0 / x - 1.0).sqrt() / (2.0 * PI)
}

fn fc2(x: f64) -> f64 {
    if x <= 0.0 || x >= 6.75 {
        return 0.0;
    }
    let c = 2.0f64.powf(1.0 / 3.0) * 3.0f64.sqrt() / (12.0 * PI);
    let t = 27.0 + 3.0 * (81.0 - 12.0 * x).sqrt();
    c * (2.0f64.powf(1.0 / 3.0) * t.powf(2.0 / 3.0) - 6.0 * x.powf(1.0 / 3.0))
        / (x.powf(2.0 / 3.0) * t.powf(1.0 / 3.0))
}

fn fc3(x: f64) -> f64 {
    if x <= 0.0 || x >= 256.0 / 27.0 {
        return 0.0;
    }
    let z = 27.0 * x / 256.0;
    let sqrt2 = std::f64::consts::SQRT_2;
    // x < support edge keeps z < 1, where the lenient series always returns.
    let t1 = hyp3f2_series([-1.0 / 12.0, 0.25, 7.0 / 12.0], [0.5, 0.75], z).value
        / (sqrt2 * PI * x.powf(0.75));
    let t2 = hyp3f2_series([1.0 / 6.0, 0.5, 5.0 / 6.0], [0.75, 1.25], z).value
        / (4.0 * PI * x.sqrt());
    let t3 = hyp3f2_series([5.0 / 12.0, 0.75, 13.0 / 12.0], [1.25, 1.5], z).value
        / (32.0 * sqrt2 * PI * x.powf(0.25));
    t1 - t2 - t3
}

/// Density of the Fuss-Catalan distribution of the given order. Zero outside
/// the support; diverges like x^{-s/(s+1)} at the origin.
pub fn fc_density(x: f64, order: FcOrder) -> f64 {
    match order {
        FcOrder::One => fc1(x),
        FcOrder::Two => fc2(x),
        FcOrder::Three => fc3(x),
    }
}

struct SeriesResult {
    value: f64,
    /// Relative bound on the truncation error, geometric-tail estimate.
    tail: f64,
}

/// 3F2 power series with term recursion. Always returns its best value for
/// z < 1; the caller decides whether the tail estimate is acceptable.
fn hyp3f2_series(a: [f64; 3], b: [f64; 2], z: f64) -> SeriesResult {
    const MAX_TERMS: usize = 2_000_000;
    let mut term = 1.0f64;
    let mut total = 1.0f64;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a[0] + kf) * (a[1] + kf) * (a[2] + kf)
            / ((b[0] + kf) * (b[1] + kf) * (1.0 + kf))
            * z;
        total += term;
        if term.abs() < 1e-15 * total.abs().max(1.0) {
            return SeriesResult { value: total, tail: 1e-15 };
        }
    }
    let tail = if z < 1.0 {
        (term.abs() * z / (1.0 - z)) / total.abs().max(1.0)
    } else {
        f64::INFINITY
    };
    SeriesResult { value: total, tail }
}

/// Generalized hypergeometric 3F2(a; b; z) for z in [0, 1]. Absolute accuracy
/// 1e-10 for z <= 0.99; degrades to about 1e-6 as z approaches 1, beyond
/// which the series is rejected as non-convergent.
pub fn hypergeometric_3f2(a: [f64; 3], b: [f64; 2], z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::InvalidParameter(format!(
            "series argument must lie in [0, 1], got {z}"
        )));
    }
    for bi in b {
        if bi <= 0.0 && bi.fract() == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lower parameter {bi} is a non-positive integer"
            )));
        }
    }
    let result = hyp3f2_series(a, b, z);
    if result.tail > 1e-6 {
        return Err(Error::Accuracy(format!(
            "3F2 series did not converge at z = {z}; achieved relative tolerance {:.2e}",
            result.tail
        )));
    }
    Ok(result.value)
}

/// Fuss-Catalan number binom(m(s+1), m) / (ms + 1) in exact integer
/// arithmetic. These are the moments of the order-s Fuss-Catalan
/// distribution.
pub fn fuss_catalan_number(m: u64, s: u64) -> Result<u128> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    if m == 0 {
        return Ok(1);
    }
    let n = m
        .checked_mul(s + 1)
        .ok_or_else(|| Error::Overflow("m (s+1) exceeds u64".into()))?;
    // Stepwise binomial: after i steps acc = binom(n - m + i, i), an integer.
    let mut acc: u128 = 1;
    for i in 1..=m {
        acc = acc
            .checked_mul((n - m + i) as u128)
            .ok_or_else(|| Error::Overflow(format!("binom({n}, {m}) exceeds u128")))?;
        acc /= i as u128;
    }
    let divisor = (m * s + 1) as u128;
    debug_assert_eq!(acc % divisor, 0);
    Ok(acc / divisor)
}

/// m-th moment of the order-s density by adaptive quadrature under the
/// substitution u = x^{1/(s+1)}, which removes the origin divergence.
pub fn fc_moment(order: FcOrder, m: u32) -> Result<f64> {
    let s = order.s() as f64;
    let (_, edge) = fc_support(order);
    let u_edge = edge.powf(1.0 / (s + 1.0));
    let head = fc_head_coefficient(order);
    let integrand = move |u: f64| {
        if u <= 0.0 {
            // Limit of the substituted integrand: (s+1) C_s u^{(s+1)m}.
            return if m == 0 { (s + 1.0) * head } else { 0.0 };
        }
        let x = u.powf(s + 1.0);
        (s + 1.0) * u.powf((s + 1.0) * m as f64 + s) * fc_density(x, order)
    };
    integrate(&integrand, 0.0, u_edge, 1e-9)
}

/// Mean of -x ln x under the order-s density: -1/2, -5/6, -13/12 for
/// s = 1, 2, 3.
pub fn fc_mean_entropy(order: FcOrder) -> Result<f64> {
    let s = order.s() as f64;
    let (_, edge) = fc_support(order);
    let u_edge = edge.powf(1.0 / (s + 1.0));
    let integrand = move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let x = u.powf(s + 1.0);
        -(s + 1.0) * (s + 1.0) * u.ln() * u.powf(2.0 * s + 1.0) * fc_density(x, order)
    };
    integrate(&integrand, 0.0, u_edge, 1e-9)
}

/// Tabulated CDF of a Fuss-Catalan density on a grid graded toward the
/// origin, where the density diverges. The first cell uses the analytic head
/// C_s (s+1) x^{1/(s+1)}; the rest is cumulative trapezoid, renormalized.
#[derive(Debug, Clone)]
pub struct FcCdf {
    xs: Vec<f64>,
    cs: Vec<f64>,
}

pub fn fc_cdf(order: FcOrder) -> FcCdf {
    const CELLS: usize = 4000;
    let s = order.s() as f64;
    let (_, edge) = fc_support(order);
    let xs: Vec<f64> = (0..=CELLS)
        .map(|i| edge * (i as f64 / CELLS as f64).powi(4))
        .collect();
    let pdf: Vec<f64> = xs.iter().map(|&x| fc_density(x, order)).collect();
    let mut cs = vec![0.0; CELLS + 1];
    cs[1] = fc_head_coefficient(order) * (s + 1.0) * xs[1].powf(1.0 / (s + 1.0));
    for i in 2..=CELLS {
        cs[i] = cs[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (xs[i] - xs[i - 1]);
    }
    let total = cs[CELLS];
    for c in &mut cs {
        *c /= total;
    }
    FcCdf { xs, cs }
}

impl FcCdf {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let last = self.xs.len() - 1;
        if x >= self.xs[last] {
            return 1.0;
        }
        let hi = self.xs.partition_point(|&v| v < x).max(1);
        let (x0, x1) = (self.xs[hi - 1], self.xs[hi]);
        let (c0, c1) = (self.cs[hi - 1], self.cs[hi]);
        c0 + (c1 - c0) * (x - x0) / (x1 - x0)
    }
}
