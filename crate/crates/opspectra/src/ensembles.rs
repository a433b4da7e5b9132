//! Random matrix ensembles: Ginibre matrices, Haar unitaries, and the
//! phased Fourier matrices used by the baker map.

use faer::Mat;
use num_complex::Complex64;

use crate::linalg::CMat;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Which Ginibre ensemble to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GinibreKind {
    Complex,
    Real,
}

/// Parameters of a Ginibre draw. `scale` is the ensemble scale xi: entries
/// satisfy E|G_ij|^2 = scale^2 / dim, so the spectrum fills a disk of radius
/// about `scale` for large dim.
#[derive(Debug, Clone, Copy)]
pub struct GinibreParams {
    pub dim: usize,
    pub scale: f64,
    pub kind: GinibreKind,
}

impl GinibreParams {
    pub fn new(dim: usize, scale: f64, kind: GinibreKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("ginibre dim must be >= 1".into()));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ginibre scale must be positive and finite, got {scale}"
            )));
        }
        Ok(GinibreParams { dim, scale, kind })
    }
}

/// One Ginibre matrix. Complex kind: independent entries with re and im each
/// N(0, scale^2 / (2 dim)). Real kind: real entries N(0, scale^2 / dim) with
/// zero imaginary part, stored in the same complex type.
pub fn sample_ginibre(params: &GinibreParams, stream: &mut RngStream) -> CMat {
    let n = params.dim;
    match params.kind {
        GinibreKind::Complex => {
            let sigma = params.scale / (2.0 * n as f64).sqrt();
            // Column-major fill keeps the draw order independent of faer's
            // internal layout choices.
            let mut m = Mat::<Complex64>::zeros(n, n);
            for j in 0..n {
                for i in 0..n {
                    let (re, im) = stream.next_normal_pair();
                    m[(i, j)] = Complex64::new(sigma * re, sigma * im);
                }
            }
            m
        }
        GinibreKind::Real => {
            let sigma = params.scale / (n as f64).sqrt();
            let mut m = Mat::<Complex64>::zeros(n, n);
            let mut spare: Option<f64> = None;
            for j in 0..n {
                for i in 0..n {
                    let g = match spare.take() {
                        Some(v) => v,
                        None => {
                            let (a, b) = stream.next_normal_pair();
                            spare = Some(b);
                            a
                        }
                    };
                    m[(i, j)] = Complex64::new(sigma * g, 0.0);
                }
            }
            m
        }
    }
}

/// Real view of a real-kind Ginibre draw, for the real eigensolver path.
pub fn sample_ginibre_real(dim: usize, scale: f64, stream: &mut RngStream) -> Result<Mat<f64>> {
    let params = GinibreParams::new(dim, scale, GinibreKind::Real)?;
    let sigma = params.scale / (dim as f64).sqrt();
    let mut m = Mat::<f64>::zeros(dim, dim);
    let mut spare: Option<f64> = None;
    for j in 0..dim {
        for i in 0..dim {
            let g = match spare.take() {
                Some(v) => v,
                None => {
                    let (a, b) = stream.next_normal_pair();
                    spare = Some(b);
                    a
                }
            };
            m[(i, j)] = sigma * g;
        }
    }
    Ok(m)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix. The raw Q of
/// a QR factorization is not Haar; multiplying column j by r_jj / |r_jj|
/// removes the phase convention the factorization imposes and restores
/// invariance.
pub fn sample_haar_unitary(dim: usize, stream: &mut RngStream) -> Result<CMat> {
    if dim == 0 {
        return Err(Error::InvalidParameter("unitary dim must be >= 1".into()));
    }
    crate::linalg::init_linalg();
    let params = GinibreParams::new(dim, 1.0, GinibreKind::Complex)?;
    let g = sample_ginibre(&params, stream);
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let mut u = Mat::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        if norm == 0.0 {
            return Err(Error::Numerical(
                "QR produced a zero diagonal entry; degenerate Ginibre draw".into(),
            ));
        }
        let phase = rjj / norm;
        for i in 0..dim {
            u[(i, j)] = q[(i, j)] * phase;
        }
    }
    Ok(u)
}

/// Phased discrete Fourier matrix: F[j, k] = exp(2 pi i (j + phi1)(k + phi2)
/// / dim) / sqrt(dim) with phases in [0, 1). Zero phases give the plain
/// unitary DFT.
pub fn fourier_matrix(dim: usize, phi1: f64, phi2: f64) -> Result<CMat> {
    if dim == 0 {
        return Err(Error::InvalidParameter("fourier dim must be >= 1".into()));
    }
    for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
        if !(0.0..1.0).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1), got {phi}"
            )));
        }
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let w = std::f64::consts::TAU / dim as f64;
    Ok(Mat::from_fn(dim, dim, |j, k| {
        let angle = w * (j as f64 + phi1) * (k as f64 + phi2);
        Complex64::from_polar(scale, angle)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff, unitarity_defect};
    use crate::stats::ks_distance_cdf;

    #[test]
    fn params_reject_bad_input() {
        assert!(GinibreParams::new(0, 1.0, GinibreKind::Complex).is_err());
        assert!(GinibreParams::new(4, 0.0, GinibreKind::Complex).is_err());
        assert!(GinibreParams::new(4, f64::NAN, GinibreKind::Real).is_err());
        assert!(GinibreParams::new(4, f64::INFINITY, GinibreKind::Real).is_err());
    }

    #[test]
    fn scalar_entry_second_moment() {
        // dim = 1, scale = 1: E|G|^2 = 1.
        let params = GinibreParams::new(1, 1.0, GinibreKind::Complex).unwrap();
        let mut stream = RngStream::new(2024, 0);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let g = sample_ginibre(&params, &mut stream);
            acc += g[(0, 0)].norm_sqr();
        }
        let mean = acc / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "E|G|^2 = {mean}");
    }

    #[test]
    fn scaled_entry_second_moment() {
        // dim = 2, scale = 0.5: E|G_ij|^2 = 0.25 / 2 = 0.125.
        let params = GinibreParams::new(2, 0.5, GinibreKind::Complex).unwrap();
        let mut stream = RngStream::new(5, 0);
        let n = 20_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let g = sample_ginibre(&params, &mut stream);
            for j in 0..2 {
                for i in 0..2 {
                    acc += g[(i, j)].norm_sqr();
                }
            }
        }
        let mean = acc / (4 * n) as f64;
        assert!((mean - 0.125).abs() < 0.005, "E|G_ij|^2 = {mean}");
    }

    #[test]
    fn real_kind_has_no_imaginary_part() {
        let params = GinibreParams::new(8, 1.0, GinibreKind::Real).unwrap();
        let mut stream = RngStream::new(7, 0);
        let g = sample_ginibre(&params, &mut stream);
        for j in 0..8 {
            for i in 0..8 {
                assert_eq!(g[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn real_view_matches_complex_storage() {
        let mut s1 = RngStream::new(31, 4);
        let mut s2 = RngStream::new(31, 4);
        let params = GinibreParams::new(6, 2.0, GinibreKind::Real).unwrap();
        let a = sample_ginibre(&params, &mut s1);
        let b = sample_ginibre_real(6, 2.0, &mut s2).unwrap();
        for j in 0..6 {
            for i in 0..6 {
                assert_eq!(a[(i, j)].re, b[(i, j)]);
            }
        }
    }

    #[test]
    fn fixed_stream_reproduces_matrix() {
        let params = GinibreParams::new(16, 1.0, GinibreKind::Complex).unwrap();
        let a = sample_ginibre(&params, &mut RngStream::new(99, 3));
        let b = sample_ginibre(&params, &mut RngStream::new(99, 3));
        assert_eq!(max_abs_diff(&a, &b), 0.0);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut stream = RngStream::new(11, 0);
        let u = sample_haar_unitary(32, &mut stream).unwrap();
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn haar_eigenphases_are_uniform() {
        // Pooled eigenphases of Haar unitaries are marginally uniform on the
        // circle; KS of (arg/2pi + 1/2) against the uniform CDF stays small.
        crate::linalg::init_linalg();
        let mut phases = Vec::new();
        for sample in 0..200 {
            let mut stream = RngStream::new(606, sample);
            let u = sample_haar_unitary(64, &mut stream).unwrap();
            let ev = u.eigenvalues().unwrap();
            for z in ev {
                phases.push(z.arg() / std::f64::consts::TAU + 0.5);
            }
        }
        let ks = ks_distance_cdf(&phases, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(ks <= 0.05, "eigenphase KS = {ks}");
    }

    #[test]
    fn fourier_dim_two_matches_hadamard() {
        let f = fourier_matrix(2, 0.0, 0.0).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        let expected = Mat::from_fn(2, 2, |j, k| {
            Complex64::new(if (j, k) == (1, 1) { -s } else { s }, 0.0)
        });
        assert!(max_abs_diff(&f, &expected) < 1e-15);
    }

    #[test]
    fn fourier_first_column_is_flat() {
        let f = fourier_matrix(3, 0.0, 0.0).unwrap();
        let s = 1.0 / 3.0f64.sqrt();
        for j in 0..3 {
            assert!((f[(j, 0)] - Complex64::new(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fourier_is_unitary_with_phases() {
        let f = fourier_matrix(16, 0.25, 0.6).unwrap();
        assert!(unitarity_defect(&f) < 1e-13);
        let g = &f * f.adjoint();
        assert!(max_abs_diff(&g, &identity(16)) < 1e-13);
    }

    #[test]
    fn fourier_rejects_out_of_range_phase() {
        assert!(fourier_matrix(4, 1.0, 0.0).is_err());
        assert!(fourier_matrix(4, 0.0, -0.1).is_err());
        assert!(fourier_matrix(0, 0.0, 0.0).is_err());
    }
}
