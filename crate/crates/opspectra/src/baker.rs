//! Generalized quantum baker map, its stochastic version with projective
//! environment coupling, s-step propagators, and the projector identities
//! that make their singular spectra computable at a fraction of the
//! superoperator dimension.

use faer::Mat;
use num_complex::Complex64;

use crate::channels::Superoperator;
use crate::ensembles::fourier_matrix;
use crate::linalg::{conj_mat, kron, unitary_power_guarded, CMat};
use crate::spectral::{matrix_power, singular_values_squared, wishart_from_sv2, WishartSpectrum};
use crate::{Error, Result};

/// Parameters of the stochastic baker family: even system dimension d,
/// environment dimension M dividing d, L unitary iterations per measurement,
/// Fourier phases, and the number of map applications s.
#[derive(Debug, Clone, Copy)]
pub struct BakerSpec {
    pub d: usize,
    pub m: usize,
    pub l: usize,
    pub phi1: f64,
    pub phi2: f64,
    pub s: usize,
}

impl BakerSpec {
    pub fn new(d: usize, m: usize, l: usize, phi1: f64, phi2: f64, s: usize) -> Result<Self> {
        if d < 2 || d % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "baker dimension must be even and >= 2, got {d}"
            )));
        }
        if m == 0 || d % m != 0 {
            return Err(Error::InvalidParameter(format!(
                "environment dimension must divide d = {d}, got {m}"
            )));
        }
        if l == 0 {
            return Err(Error::InvalidParameter("L must be >= 1".into()));
        }
        if s == 0 {
            return Err(Error::InvalidParameter("s must be >= 1".into()));
        }
        for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
            if !(0.0..1.0).contains(&phi) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1), got {phi}"
                )));
            }
        }
        Ok(BakerSpec {
            d,
            m,
            l,
            phi1,
            phi2,
            s,
        })
    }

    /// Block size K = d / M of each measurement projector.
    pub fn block_size(&self) -> usize {
        self.d / self.m
    }

    /// Rank of Phi Phi-dagger: N' = d^2 / M.
    pub fn n_prime(&self) -> usize {
        self.d * self.d / self.m
    }
}

/// One-step baker unitary B = F_d^H blockdiag(F_{d/2}, F_{d/2}) built from
/// the phased Fourier matrices.
pub fn baker_unitary(spec: &BakerSpec) -> Result<CMat> {
    let d = spec.d;
    let full = fourier_matrix(d, spec.phi1, spec.phi2)?;
    let half = fourier_matrix(d / 2, spec.phi1, spec.phi2)?;
    let mut block = Mat::<Complex64>::zeros(d, d);
    let h = d / 2;
    for j in 0..h {
        for i in 0..h {
            block[(i, j)] = half[(i, j)];
            block[(h + i, h + j)] = half[(i, j)];
        }
    }
    Ok(full.adjoint() * block)
}

/// Stochastic baker map: Kraus operators X_j = P_j B^L where P_j projects
/// onto the j-th block of K consecutive basis vectors; the superoperator is
/// sum_j X_j (x) conj(X_j). The projectors resolve the identity, so the map
/// is trace preserving by construction.
pub fn stochastic_baker(spec: &BakerSpec) -> Result<Superoperator> {
    let d = spec.d;
    let k = spec.block_size();
    let b = baker_unitary(spec)?;
    let v = unitary_power_guarded(&b, spec.l, 1e-10)?;
    let mut kraus = Vec::with_capacity(spec.m);
    for j in 0..spec.m {
        kraus.push(Mat::from_fn(d, d, |row, col| {
            if row >= j * k && row < (j + 1) * k {
                v[(row, col)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
    }
    let dd = d * d;
    let mut matrix = Mat::<Complex64>::zeros(dd, dd);
    for x in &kraus {
        matrix += kron(x, &conj_mat(x));
    }
    Ok(Superoperator {
        matrix,
        kraus: Some(kraus),
        d,
    })
}

/// s-fold matrix power of a superoperator.
pub fn propagator_power(sop: &Superoperator, s: usize) -> Result<Superoperator> {
    if s == 0 {
        return Err(Error::InvalidParameter("propagator power needs s >= 1".into()));
    }
    Ok(Superoperator {
        matrix: matrix_power(&sop.matrix, s)?,
        kraus: if s == 1 { sop.kraus.clone() } else { None },
        d: sop.d,
    })
}

/// Phi Phi-dagger through the Kraus form when available: with
/// Phi = sum_j X_j (x) conj(X_j) the Gram matrix is
/// sum_jk (X_j X_k^H) (x) conj(X_j X_k^H), assembled from d x d products
/// instead of one d^2 x d^2 product.
fn gram_matrix(sop: &Superoperator) -> CMat {
    let d = sop.d;
    let dd = d * d;
    match &sop.kraus {
        Some(kraus) => {
            let mut g = Mat::<Complex64>::zeros(dd, dd);
            for xj in kraus {
                for xk in kraus {
                    let a = xj * xk.adjoint();
                    for r in 0..d {
                        for t in 0..d {
                            let col = r * d + t;
                            for p in 0..d {
                                let arp = a[(p, r)];
                                if arp.re == 0.0 && arp.im == 0.0 {
                                    continue;
                                }
                                for q in 0..d {
                                    g[(p * d + q, col)] += arp * a[(q, t)].conj();
                                }
                            }
                        }
                    }
                }
            }
            g
        }
        None => &sop.matrix * sop.matrix.adjoint(),
    }
}

/// Checks that Phi Phi-dagger is a projector: every eigenvalue within
/// tolerance of 0 or 1. Returns (rank, largest deviation); a deviation above
/// 1e-6 is a structure violation.
pub fn phi_phidagger_projector_check(sop: &Superoperator) -> Result<(usize, f64)> {
    crate::linalg::init_linalg();
    let g = gram_matrix(sop);
    let eigs: Vec<f64> = g
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigendecomposition failed: {e:?}")))?;
    let mut rank = 0usize;
    let mut max_dev = 0.0f64;
    for lambda in eigs {
        let dev = lambda.abs().min((lambda - 1.0).abs());
        max_dev = max_dev.max(dev);
        if lambda > 0.5 {
            rank += 1;
        }
    }
    if max_dev > 1e-6 {
        return Err(Error::StructureViolation(format!(
            "Phi Phi-dagger is not a projector: eigenvalue deviation {max_dev:.3e}"
        )));
    }
    Ok((rank, max_dev))
}

/// Indices (i, j) with i and j in the same projector block; the composite
/// index i d + j enumerates the support of Phi Phi-dagger.
fn block_diagonal_mask(d: usize, k: usize) -> Vec<(usize, usize)> {
    let mut mask = Vec::with_capacity(d * k);
    for i in 0..d {
        for j in 0..d {
            if i / k == j / k {
                mask.push((i, j));
            }
        }
    }
    mask
}

/// Normalized nonzero squared singular values of Phi^s.
///
/// Phi = P V with V = B^L (x) conj(B^L) unitary and P the rank-N' diagonal
/// projector onto the block-diagonal index set, so the nonzero singular
/// values of Phi^s = P (VP)^{s-1} V equal those of T^{s-1}, where
/// T = (P V P) restricted to the mask is an N' x N' matrix. This replaces a
/// d^2-dimensional SVD with an N'-dimensional one. The d^2 (1 - 1/M)
/// structural zeros are never materialized; the retained values are put
/// through the leading-value-deferred normalization, giving N' - 1 entries
/// with x_i = (N' - 1) lambda_i of unit mean.
pub fn sstep_singular_spectrum(spec: &BakerSpec) -> Result<WishartSpectrum> {
    let n_prime = spec.n_prime();
    if spec.s == 1 {
        // Phi Phi-dagger = P exactly: N' unit singular values.
        return wishart_from_sv2(vec![1.0; n_prime], true);
    }
    let b = baker_unitary(spec)?;
    let v = unitary_power_guarded(&b, spec.l, 1e-10)?;
    let mask = block_diagonal_mask(spec.d, spec.block_size());
    debug_assert_eq!(mask.len(), n_prime);
    let t = Mat::from_fn(n_prime, n_prime, |a, c| {
        let (ia, ja) = mask[a];
        let (kc, lc) = mask[c];
        v[(ia, kc)] * v[(ja, lc)].conj()
    });
    let w = matrix_power(&t, spec.s - 1)?;
    let sv2 = singular_values_squared(&w)?;
    let values = sv2.singular_squared()?.to_vec();
    wishart_from_sv2(values, true)
}
