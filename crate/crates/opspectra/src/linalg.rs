//! Small dense linear-algebra helpers shared across modules.
//!
//! All decompositions run through faer with global parallelism pinned to
//! sequential mode, so results are bit-identical regardless of how many
//! worker threads the harness uses for sampling.

use faer::{Mat, Par};
use num_complex::Complex64;
use std::sync::Once;

use crate::{Error, Result};

pub type CMat = Mat<Complex64>;

static FAER_INIT: Once = Once::new();

/// Pins faer to sequential execution. Called before every decomposition;
/// cheap after the first call.
pub fn init_linalg() {
    FAER_INIT.call_once(|| {
        faer::set_global_parallelism(Par::Seq);
    });
}

/// Kronecker product a (x) b with row-major block layout: the (i,j) block of
/// the result is a[(i,j)] * b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Entrywise complex conjugate (no transpose).
pub fn conj_mat(a: &CMat) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].conj())
}

pub fn identity(dim: usize) -> CMat {
    Mat::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Largest entrywise absolute difference between two matrices of equal shape.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

/// Deviation of u from unitarity, max_ij |(u^H u - I)_ij|.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let gram = u.adjoint() * u;
    max_abs_diff(&gram, &identity(u.ncols()))
}

/// a^power by repeated multiplication. power = 0 gives the identity.
#[cfg(test)]
pub(crate) fn mat_power(a: &CMat, power: usize) -> CMat {
    let mut acc = identity(a.nrows());
    for _ in 0..power {
        acc = a * &acc;
    }
    acc
}

/// a^power for unitary a, checking the accumulated product for drift away
/// from unitarity every 8 multiplications. Exceeding `tol` (1e-10) means the
/// power is too ill-conditioned to trust and yields a numerical error.
pub fn unitary_power_guarded(a: &CMat, power: usize, tol: f64) -> Result<CMat> {
    let mut acc = identity(a.nrows());
    for step in 1..=power {
        acc = a * &acc;
        if step % 8 == 0 || step == power {
            let defect = unitarity_defect(&acc);
            if defect > tol {
                return Err(Error::Numerical(format!(
                    "unitarity drift {defect:.3e} after {step} multiplications exceeds {tol:.1e}"
                )));
            }
        }
    }
    Ok(acc)
}
