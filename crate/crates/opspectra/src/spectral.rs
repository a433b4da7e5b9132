//! Spectrum extraction for general square matrices: eigenvalues, squared
//! singular values, products and powers, Wishart normalization of AA†, and
//! statistics derived from spectra (relative Shannon entropy, real-axis
//! eigenvalue counts).

use faer::Mat;
use num_complex::Complex64;

use crate::linalg::{identity, init_linalg, CMat};
use crate::{Error, Result};

/// What a spectrum holds: complex eigenvalues, or non-negative squared
/// singular values.
#[derive(Debug, Clone)]
pub enum SpectrumValues {
    Eigen(Vec<Complex64>),
    SingularSquared(Vec<f64>),
}

/// Parameter record carried alongside a spectrum so downstream writers can
/// tag rows without re-deriving context.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpectrumMeta {
    pub dim: usize,
    /// Number of factors (product length or power exponent) behind the matrix.
    pub factors: usize,
    pub seed: u64,
    pub stream: u64,
}

#[derive(Debug, Clone)]
pub struct SpectrumSample {
    pub values: SpectrumValues,
    pub meta: SpectrumMeta,
}

impl SpectrumSample {
    pub fn eigen(&self) -> Result<&[Complex64]> {
        match &self.values {
            SpectrumValues::Eigen(v) => Ok(v),
            SpectrumValues::SingularSquared(_) => Err(Error::InvalidInput(
                "expected an eigenvalue spectrum, got squared singular values".into(),
            )),
        }
    }

    pub fn singular_squared(&self) -> Result<&[f64]> {
        match &self.values {
            SpectrumValues::SingularSquared(v) => Ok(v),
            SpectrumValues::Eigen(_) => Err(Error::InvalidInput(
                "expected squared singular values, got an eigenvalue spectrum".into(),
            )),
        }
    }

    /// Largest modulus among the values; 0 for an empty spectrum.
    pub fn spectral_radius(&self) -> f64 {
        match &self.values {
            SpectrumValues::Eigen(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            SpectrumValues::SingularSquared(v) => v.iter().cloned().fold(0.0, f64::max).sqrt(),
        }
    }
}

/// Normalized spectrum of AA†: probabilities lambda summing to one, plus the
/// rescaled values x_i = N' * lambda_i whose mean is one by construction,
/// where N' counts the retained eigenvalues.
#[derive(Debug, Clone)]
pub struct WishartSpectrum {
    pub lambdas: Vec<f64>,
    pub rescaled: Vec<f64>,
}

fn check_square_finite(a: &CMat) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "non-finite entry at ({i}, {j}): {z}"
                )));
            }
        }
    }
    Ok(())
}

/// All N eigenvalues of a complex square matrix, with multiplicity.
pub fn eigenvalues(a: &CMat) -> Result<SpectrumSample> {
    check_square_finite(a)?;
    init_linalg();
    let ev = a
        .eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    Ok(SpectrumSample {
        values: SpectrumValues::Eigen(ev),
        meta: SpectrumMeta {
            dim: a.nrows(),
            factors: 1,
            ..Default::default()
        },
    })
}

/// Eigenvalues of a real square matrix through the real Schur path, which is
/// considerably faster than embedding into complex storage. The result is
/// closed under conjugation up to solver noise.
pub fn eigenvalues_real(a: &Mat<f64>) -> Result<SpectrumSample> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::InvalidInput(format!("non-finite entry at ({i}, {j})")));
            }
        }
    }
    init_linalg();
    let ev = a
        .eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    Ok(SpectrumSample {
        values: SpectrumValues::Eigen(ev),
        meta: SpectrumMeta {
            dim: a.nrows(),
            factors: 1,
            ..Default::default()
        },
    })
}

/// Squared singular values of A, the eigenvalues of AA†. Computed through a
/// bidiagonalizing SVD rather than by forming AA†, which would square the
/// condition number and crush small values.
pub fn singular_values_squared(a: &CMat) -> Result<SpectrumSample> {
    check_square_finite(a)?;
    init_linalg();
    let svd = a
        .svd()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let s = svd.S();
    let n = s.column_vector().nrows();
    // Singular values of a complex matrix come back in the complex scalar
    // type with zero imaginary part.
    let values: Vec<f64> = (0..n).map(|i| s[i].re * s[i].re).collect();
    Ok(SpectrumSample {
        values: SpectrumValues::SingularSquared(values),
        meta: SpectrumMeta {
            dim: a.nrows(),
            factors: 1,
            ..Default::default()
        },
    })
}

/// Left-to-right product of conformable square matrices.
pub fn matrix_product(factors: &[CMat]) -> Result<CMat> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("matrix product needs at least one factor".into()))?;
    let dim = first.nrows();
    if first.ncols() != dim {
        return Err(Error::ShapeMismatch("factors must be square".into()));
    }
    let mut acc = first.clone();
    for f in &factors[1..] {
        if f.nrows() != dim || f.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "factor of shape {}x{} does not match {dim}x{dim}",
                f.nrows(),
                f.ncols()
            )));
        }
        acc = &acc * f;
    }
    Ok(acc)
}

/// A^s by repeated multiplication. s = 0 returns the identity.
pub fn matrix_power(a: &CMat, s: usize) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(Error::ShapeMismatch("matrix power needs a square matrix".into()));
    }
    if s == 0 {
        return Ok(identity(a.nrows()));
    }
    let mut acc = a.clone();
    for _ in 1..s {
        acc = &acc * a;
    }
    Ok(acc)
}

/// Normalized spectrum of AA†. With `drop_leading` the largest eigenvalue is
/// set aside and the remaining N-1 renormalized to unit sum, the protocol
/// used for superoperators whose leading singular value sits far above the
/// bulk; rescaled values then use N' = N - 1.
pub fn wishart_normalize(a: &CMat, drop_leading: bool) -> Result<WishartSpectrum> {
    let sv2 = singular_values_squared(a)?;
    let values = match sv2.values {
        SpectrumValues::SingularSquared(v) => v,
        _ => unreachable!(),
    };
    wishart_from_sv2(values, drop_leading)
}

/// Same normalization starting from precomputed squared singular values.
/// Entry point for spectra obtained without materializing the full matrix.
pub fn wishart_from_sv2(mut sv2: Vec<f64>, drop_leading: bool) -> Result<WishartSpectrum> {
    if sv2.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    let max = sv2.iter().cloned().fold(0.0f64, f64::max);
    if !(max > 0.0) {
        return Err(Error::InvalidInput(
            "degenerate input: all squared singular values are zero".into(),
        ));
    }
    for v in &mut sv2 {
        if *v < 0.0 {
            if *v < -1e-12 * max {
                return Err(Error::InvalidInput(format!(
                    "negative squared singular value {v}"
                )));
            }
            *v = 0.0;
        }
    }
    sv2.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let retained: &[f64] = if drop_leading {
        if sv2.len() < 2 {
            return Err(Error::InvalidInput(
                "cannot drop the leading eigenvalue of a 1-element spectrum".into(),
            ));
        }
        &sv2[1..]
    } else {
        &sv2[..]
    };
    let total: f64 = retained.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidInput(
            "degenerate input: retained spectrum sums to zero".into(),
        ));
    }
    let n = retained.len() as f64;
    let lambdas: Vec<f64> = retained.iter().map(|v| v / total).collect();
    let rescaled: Vec<f64> = lambdas.iter().map(|l| n * l).collect();
    Ok(WishartSpectrum { lambdas, rescaled })
}

/// Shannon entropy deficit S - ln N' with S = -sum lambda ln lambda. Zero
/// eigenvalues contribute nothing; the maximum entropy spectrum returns 0 and
/// every other spectrum is negative.
pub fn shannon_entropy_rel(w: &WishartSpectrum) -> Result<f64> {
    let n = w.lambdas.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    let mut s = 0.0;
    for &l in &w.lambdas {
        if l < 0.0 {
            return Err(Error::InvalidInput(format!("negative eigenvalue {l}")));
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s - (n as f64).ln())
}

/// Number of eigenvalues within `eps` of the real axis.
pub fn count_real_eigenvalues(spec: &SpectrumSample, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let values = spec.eigen()?;
    Ok(values.iter().filter(|z| z.im.abs() < eps).count())
}

/// Default real-axis threshold: 1e-8 times the spectral radius, floored at
/// 1e-300 so an all-zero spectrum still gets a positive threshold.
pub fn default_real_eps(spec: &SpectrumSample) -> f64 {
    (1e-8 * spec.spectral_radius()).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_ginibre, GinibreKind, GinibreParams};
    use crate::rng::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diag(values: &[f64]) -> CMat {
        Mat::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// Greedy multiset match: every left value must have a distinct right
    /// partner within tol.
    fn assert_multiset_close(left: &[Complex64], right: &[Complex64], tol: f64) {
        assert_eq!(left.len(), right.len());
        let mut remaining: Vec<Complex64> = right.to_vec();
        for z in left {
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, w)| (i, (z - w).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap();
            assert!(dist < tol, "no partner for {z} within {tol}, nearest {dist}");
            remaining.swap_remove(idx);
        }
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let spec = eigenvalues(&diag(&[1.0, 2.0, 3.0])).unwrap();
        let mut got: Vec<f64> = spec.eigen().unwrap().iter().map(|z| z.re).collect();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip([1.0, 2.0, 3.0]) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_of_rotation_generator() {
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(1.0, 0.0),
            (1, 0) => c(-1.0, 0.0),
            _ => c(0.0, 0.0),
        });
        let spec = eigenvalues(&a).unwrap();
        assert_multiset_close(spec.eigen().unwrap(), &[c(0.0, 1.0), c(0.0, -1.0)], 1e-12);
    }

    #[test]
    fn eigenvalues_reject_bad_shapes_and_entries() {
        let rect = Mat::<Complex64>::zeros(2, 3);
        assert!(matches!(eigenvalues(&rect), Err(Error::ShapeMismatch(_))));
        let mut bad = Mat::<Complex64>::zeros(2, 2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(eigenvalues(&bad), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn real_spectrum_closed_under_conjugation() {
        let mut stream = RngStream::new(17, 0);
        let params = GinibreParams::new(50, 1.0, GinibreKind::Real).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let spec = eigenvalues(&a).unwrap();
        let values = spec.eigen().unwrap();
        let conjugated: Vec<Complex64> = values.iter().map(|z| z.conj()).collect();
        assert_multiset_close(values, &conjugated, 1e-8);
    }

    #[test]
    fn trace_moment_identity() {
        let mut stream = RngStream::new(23, 0);
        let params = GinibreParams::new(40, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let spec = eigenvalues(&a).unwrap();
        let values = spec.eigen().unwrap();
        let svd = a.svd().unwrap();
        let opnorm = svd.S()[0].re;
        let mut power = identity(40);
        for k in 1..=3usize {
            power = &power * &a;
            let trace: Complex64 = (0..40).map(|i| power[(i, i)]).sum();
            let moment: Complex64 = values.iter().map(|z| z.powu(k as u32)).sum();
            let bound = 1e-8 * 40.0 * opnorm.powi(k as i32);
            assert!(
                (trace - moment).norm() <= bound,
                "k={k}: |sum z^k - tr A^k| = {} > {bound}",
                (trace - moment).norm()
            );
        }
    }

    #[test]
    fn singular_squared_of_diagonal() {
        let spec = singular_values_squared(&diag(&[3.0, 4.0])).unwrap();
        let mut got = spec.singular_squared().unwrap().to_vec();
        got.sort_by(f64::total_cmp);
        assert!((got[0] - 9.0).abs() < 1e-12);
        assert!((got[1] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn singular_squared_of_unitary_is_flat() {
        let mut stream = RngStream::new(3, 0);
        let u = crate::ensembles::sample_haar_unitary(24, &mut stream).unwrap();
        let spec = singular_values_squared(&u).unwrap();
        for &v in spec.singular_squared().unwrap() {
            assert!((v - 1.0).abs() < 1e-10, "unitary sv^2 = {v}");
        }
    }

    #[test]
    fn singular_squared_sum_matches_trace() {
        let mut stream = RngStream::new(4, 0);
        let params = GinibreParams::new(30, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let spec = singular_values_squared(&a).unwrap();
        let sum: f64 = spec.singular_squared().unwrap().iter().sum();
        let trace: f64 = {
            let g = &a * a.adjoint();
            (0..30).map(|i| g[(i, i)].re).sum()
        };
        assert!((sum - trace).abs() <= 1e-8 * trace.abs());
    }

    #[test]
    fn singular_squared_agrees_with_gram_eigenvalues() {
        // AA† route kept as a cross-oracle only.
        let mut stream = RngStream::new(9, 0);
        let params = GinibreParams::new(20, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let direct = singular_values_squared(&a).unwrap();
        let gram = &a * a.adjoint();
        let ev = eigenvalues(&gram).unwrap();
        let mut via_gram: Vec<f64> = ev.eigen().unwrap().iter().map(|z| z.re).collect();
        via_gram.sort_by(f64::total_cmp);
        let mut via_svd = direct.singular_squared().unwrap().to_vec();
        via_svd.sort_by(f64::total_cmp);
        for (x, y) in via_svd.iter().zip(&via_gram) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn product_trivial_cases() {
        let mut stream = RngStream::new(1, 0);
        let params = GinibreParams::new(5, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let i5 = identity(5);
        let p = matrix_product(&[i5.clone(), a.clone(), i5]).unwrap();
        assert_eq!(crate::linalg::max_abs_diff(&p, &a), 0.0);
        let single = matrix_product(std::slice::from_ref(&a)).unwrap();
        assert_eq!(crate::linalg::max_abs_diff(&single, &a), 0.0);
    }

    #[test]
    fn product_of_pair_equals_square() {
        let mut stream = RngStream::new(2, 0);
        let params = GinibreParams::new(6, 1.0, GinibreKind::Complex).unwrap();
        let g = sample_ginibre(&params, &mut stream);
        let p = matrix_product(&[g.clone(), g.clone()]).unwrap();
        let q = matrix_power(&g, 2).unwrap();
        assert_eq!(crate::linalg::max_abs_diff(&p, &q), 0.0);
    }

    #[test]
    fn product_rejects_mismatched_dims() {
        let a = Mat::<Complex64>::zeros(2, 2);
        let b = Mat::<Complex64>::zeros(3, 3);
        assert!(matches!(
            matrix_product(&[a, b]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(matrix_product(&[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn power_trivial_cases() {
        let d = diag(&[2.0, 3.0]);
        let p1 = matrix_power(&d, 1).unwrap();
        assert_eq!(crate::linalg::max_abs_diff(&p1, &d), 0.0);
        let p3 = matrix_power(&d, 3).unwrap();
        assert!((p3[(0, 0)].re - 8.0).abs() < 1e-12);
        assert!((p3[(1, 1)].re - 27.0).abs() < 1e-12);
        let p0 = matrix_power(&d, 0).unwrap();
        assert_eq!(crate::linalg::max_abs_diff(&p0, &identity(2)), 0.0);
    }

    #[test]
    fn spectral_mapping_for_squares() {
        let mut stream = RngStream::new(57, 0);
        let params = GinibreParams::new(30, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        let base = eigenvalues(&a).unwrap();
        let squared_base: Vec<Complex64> =
            base.eigen().unwrap().iter().map(|z| z * z).collect();
        let a2 = matrix_power(&a, 2).unwrap();
        let spec2 = eigenvalues(&a2).unwrap();
        assert_multiset_close(spec2.eigen().unwrap(), &squared_base, 1e-8);
    }

    #[test]
    fn wishart_of_identity() {
        let w = wishart_normalize(&identity(4), false).unwrap();
        for &l in &w.lambdas {
            assert!((l - 0.25).abs() < 1e-14);
        }
        for &x in &w.rescaled {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wishart_invariants_hold() {
        let mut stream = RngStream::new(88, 0);
        let params = GinibreParams::new(25, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut stream);
        for drop_leading in [false, true] {
            let w = wishart_normalize(&a, drop_leading).unwrap();
            let expected_len = if drop_leading { 24 } else { 25 };
            assert_eq!(w.lambdas.len(), expected_len);
            let sum: f64 = w.lambdas.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
            let mean: f64 = w.rescaled.iter().sum::<f64>() / expected_len as f64;
            assert!((mean - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn wishart_drop_leading_removes_largest() {
        let w = wishart_from_sv2(vec![0.1, 5.0, 0.2, 0.3], true).unwrap();
        assert_eq!(w.lambdas.len(), 3);
        let total = 0.1 + 0.2 + 0.3;
        let mut expected = [0.3 / total, 0.2 / total, 0.1 / total];
        expected.sort_by(f64::total_cmp);
        let mut got = w.lambdas.clone();
        got.sort_by(f64::total_cmp);
        for (g, e) in got.iter().zip(expected) {
            assert!((g - e).abs() < 1e-14);
        }
    }

    #[test]
    fn wishart_rejects_zero_matrix() {
        let z = Mat::<Complex64>::zeros(3, 3);
        assert!(matches!(
            wishart_normalize(&z, false),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn entropy_of_uniform_spectrum_is_zero() {
        let w = wishart_from_sv2(vec![2.0; 8], false).unwrap();
        assert!(shannon_entropy_rel(&w).unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_of_pure_spectrum_is_minus_log_n() {
        let w = wishart_from_sv2(vec![1.0, 0.0, 0.0, 0.0], false).unwrap();
        let s = shannon_entropy_rel(&w).unwrap();
        assert!((s + 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative_eigenvalue() {
        let w = WishartSpectrum {
            lambdas: vec![1.1, -0.1],
            rescaled: vec![2.2, -0.2],
        };
        assert!(matches!(
            shannon_entropy_rel(&w),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn real_count_trivial_cases() {
        let spec = eigenvalues(&diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(count_real_eigenvalues(&spec, 1e-8).unwrap(), 3);
        let rot = SpectrumSample {
            values: SpectrumValues::Eigen(vec![c(0.0, 1.0), c(0.0, -1.0)]),
            meta: SpectrumMeta::default(),
        };
        assert_eq!(count_real_eigenvalues(&rot, 1e-8).unwrap(), 0);
    }

    #[test]
    fn real_count_rejects_singular_kind_and_bad_eps() {
        let spec = SpectrumSample {
            values: SpectrumValues::SingularSquared(vec![1.0]),
            meta: SpectrumMeta::default(),
        };
        assert!(count_real_eigenvalues(&spec, 1e-8).is_err());
        let eig = SpectrumSample {
            values: SpectrumValues::Eigen(vec![c(1.0, 0.0)]),
            meta: SpectrumMeta::default(),
        };
        assert!(count_real_eigenvalues(&eig, 0.0).is_err());
    }
}
