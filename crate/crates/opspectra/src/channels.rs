//! Random quantum operations: Kraus construction from a Haar unitary on the
//! system-environment space, superoperator matrices, compositions, and the
//! real affine (Bloch) representation.

use faer::Mat;
use num_complex::Complex64;

use crate::ensembles::sample_haar_unitary;
use crate::linalg::{conj_mat, identity, kron, CMat};
use crate::rng::RngStream;
use crate::spectral::{eigenvalues_real, SpectrumSample};
use crate::{Error, Result};

/// Parameters of a random quantum operation: system dimension d, environment
/// dimension M, master seed.
#[derive(Debug, Clone, Copy)]
pub struct ChannelSpec {
    pub d: usize,
    pub m: usize,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn new(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!(
                "system dimension must be >= 2, got {d}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("environment dimension must be >= 1".into()));
        }
        Ok(ChannelSpec { d, m, seed })
    }
}

/// A quantum operation as a d^2 x d^2 matrix acting on row-major vectorized
/// density matrices, with its Kraus operators when known.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub matrix: CMat,
    pub kraus: Option<Vec<CMat>>,
    pub d: usize,
}

/// Real affine action on the Bloch vector: tau -> C tau + kappa.
#[derive(Debug, Clone)]
pub struct AffineForm {
    pub c: Mat<f64>,
    pub kappa: Vec<f64>,
    /// Largest deviation of the first row of the Bloch-basis matrix from
    /// (1, 0, ..., 0); a trace-preservation health figure.
    pub first_row_deviation: f64,
}

/// The identity operation on a d-dimensional system.
pub fn identity_superoperator(d: usize) -> Superoperator {
    Superoperator {
        matrix: identity(d * d),
        kraus: Some(vec![identity(d)]),
        d,
    }
}

/// Random quantum operation drawn from the given stream: Haar unitary U on
/// the dM-dimensional system-environment space with the environment started
/// in its first basis state, then a partial trace. Kraus operators are the
/// environment blocks X_j[m, n] = U[mM + j, nM] under the composite index
/// (system, environment) = m M + j; the superoperator is
/// sum_j X_j (x) conj(X_j).
pub fn random_map_with_stream(d: usize, m: usize, stream: &mut RngStream) -> Result<Superoperator> {
    ChannelSpec::new(d, m, 0)?;
    let u = sample_haar_unitary(d * m, stream)?;
    let mut kraus = Vec::with_capacity(m);
    for j in 0..m {
        kraus.push(Mat::from_fn(d, d, |row, col| u[(row * m + j, col * m)]));
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

/// Random quantum operation for a spec, using its seed's stream 0.
pub fn random_map(spec: &ChannelSpec) -> Result<Superoperator> {
    let mut stream = RngStream::new(spec.seed, 0);
    random_map_with_stream(spec.d, spec.m, &mut stream)
}

/// Largest entry of |sum_j X_j^H X_j - I|; zero means exact trace
/// preservation. None when the Kraus form is unknown.
pub fn kraus_completeness_defect(sop: &Superoperator) -> Option<f64> {
    let kraus = sop.kraus.as_ref()?;
    let mut acc = Mat::<Complex64>::zeros(sop.d, sop.d);
    for x in kraus {
        acc += x.adjoint() * x;
    }
    Some(crate::linalg::max_abs_diff(&acc, &identity(sop.d)))
}

/// Composition of maps in application order: maps[0] acts first, so the
/// matrix is maps[n-1] ... maps[1] maps[0].
pub fn compose(maps: &[Superoperator]) -> Result<Superoperator> {
    let first = maps
        .first()
        .ok_or_else(|| Error::InvalidInput("compose needs at least one map".into()))?;
    let d = first.d;
    let mut matrix = first.matrix.clone();
    for m in &maps[1..] {
        if m.d != d {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose maps on dimensions {d} and {}",
                m.d
            )));
        }
        matrix = &m.matrix * &matrix;
    }
    Ok(Superoperator {
        matrix,
        kraus: None,
        d,
    })
}

/// Sparse form of one Hermitian basis matrix: (row, col, value) triplets.
type Triplets = Vec<(usize, usize, Complex64)>;

/// Orthonormal Hermitian basis {gamma^0 = I/sqrt(d), gamma^i} with
/// Tr gamma^a gamma^b = delta_ab, as sparse triplets. Ordering: identity,
/// symmetric pairs, antisymmetric pairs, diagonal traceless generators;
/// pairs ordered lexicographically.
fn gell_mann_triplets(d: usize) -> Vec<Triplets> {
    let mut basis = Vec::with_capacity(d * d);
    let inv_sqrt_d = 1.0 / (d as f64).sqrt();
    basis.push((0..d).map(|i| (i, i, Complex64::new(inv_sqrt_d, 0.0))).collect());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            basis.push(vec![
                (j, k, Complex64::new(s, 0.0)),
                (k, j, Complex64::new(s, 0.0)),
            ]);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            basis.push(vec![
                (j, k, Complex64::new(0.0, -s)),
                (k, j, Complex64::new(0.0, s)),
            ]);
        }
    }
    for l in 1..d {
        let coeff = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut trip: Triplets = (0..l).map(|i| (i, i, Complex64::new(coeff, 0.0))).collect();
        trip.push((l, l, Complex64::new(-(l as f64) * coeff, 0.0)));
        basis.push(trip);
    }
    basis
}

/// Dense generalized Gell-Mann basis including gamma^0 = I/sqrt(d).
pub fn gell_mann_basis(d: usize) -> Vec<CMat> {
    gell_mann_triplets(d)
        .into_iter()
        .map(|trip| {
            let mut m = Mat::<Complex64>::zeros(d, d);
            for (i, j, v) in trip {
                m[(i, j)] = v;
            }
            m
        })
        .collect()
}

/// Change of basis to the Bloch frame: B = G^H Phi G with G columns the
/// vectorized basis matrices. Exploits basis sparsity (every gamma has at
/// most d nonzeros), costing O(d^4) instead of two dense d^2 x d^2 products.
/// B must come out real with first row (1, 0, ..., 0); the C block and kappa
/// are its trailing rows.
pub fn to_affine(sop: &Superoperator) -> Result<AffineForm> {
    let d = sop.d;
    let dd = d * d;
    if sop.matrix.nrows() != dd || sop.matrix.ncols() != dd {
        return Err(Error::ShapeMismatch(format!(
            "superoperator matrix is {}x{}, expected {dd}x{dd}",
            sop.matrix.nrows(),
            sop.matrix.ncols()
        )));
    }
    let basis = gell_mann_triplets(d);
    // W = Phi G, one sparse column combination per basis element.
    let mut w = Mat::<Complex64>::zeros(dd, dd);
    for (b, trip) in basis.iter().enumerate() {
        for &(m, n, v) in trip {
            let col = m * d + n;
            for r in 0..dd {
                w[(r, b)] += v * sop.matrix[(r, col)];
            }
        }
    }
    // B = G^H W, one sparse row combination per basis element.
    let mut bloch = Mat::<Complex64>::zeros(dd, dd);
    for (a, trip) in basis.iter().enumerate() {
        for &(m, n, v) in trip {
            let row = m * d + n;
            let vc = v.conj();
            for c in 0..dd {
                bloch[(a, c)] += vc * w[(row, c)];
            }
        }
    }
    let mut imag_residue = 0.0f64;
    for c in 0..dd {
        for r in 0..dd {
            imag_residue = imag_residue.max(bloch[(r, c)].im.abs());
        }
    }
    if imag_residue > 1e-10 {
        return Err(Error::StructureViolation(format!(
            "Bloch-basis matrix has imaginary residue {imag_residue:.3e}; \
             basis inconsistency or non-Hermiticity-preserving input"
        )));
    }
    let mut first_row_deviation = (bloch[(0, 0)].re - 1.0).abs();
    for c in 1..dd {
        first_row_deviation = first_row_deviation.max(bloch[(0, c)].re.abs());
    }
    if first_row_deviation > 1e-8 {
        return Err(Error::StructureViolation(format!(
            "first Bloch row deviates from (1, 0, ...) by {first_row_deviation:.3e}; \
             input is not trace preserving"
        )));
    }
    let c_block = Mat::from_fn(dd - 1, dd - 1, |i, j| bloch[(i + 1, j + 1)].re);
    let kappa: Vec<f64> = (1..dd).map(|i| bloch[(i, 0)].re).collect();
    Ok(AffineForm {
        c: c_block,
        kappa,
        first_row_deviation,
    })
}

/// Bulk spectrum of a map: the d^2 - 1 eigenvalues of the real C block,
/// which equal the full superoperator spectrum with the structural leading
/// unit eigenvalue removed.
pub fn spectrum_bulk(sop: &Superoperator) -> Result<SpectrumSample> {
    let affine = to_affine(sop)?;
    let mut spec = eigenvalues_real(&affine.c)?;
    spec.meta.dim = sop.d * sop.d - 1;
    Ok(spec)
}
