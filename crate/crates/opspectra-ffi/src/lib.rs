//! C ABI over the opspectra library: array-in/array-out wrappers around the
//! sampling and law-fitting routines, plus an opaque handle for quantum
//! operations. Every fallible call returns an `OpsStatus`; the message behind
//! the most recent failure on the calling thread is available through
//! `ops_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use opspectra::baker::{sstep_singular_spectrum, stochastic_baker, BakerSpec};
use opspectra::channels::{compose, random_map_with_stream, spectrum_bulk, Superoperator};
use opspectra::ensembles::{sample_ginibre, GinibreKind, GinibreParams};
use opspectra::error::{Error, Result};
use opspectra::laws::{fc_density, fc_mean_entropy, EdgeVariant, FcOrder, RadialLawParams};
use opspectra::rng::RngStream;
use opspectra::spectral::{eigenvalues, shannon_entropy_rel, wishart_normalize};
use opspectra::stats::{fit_q, histogram_from_radii};

/// Result class of an FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsStatus {
    /// The call succeeded.
    Ok = 0,
    /// A parameter or pointer was outside the documented domain.
    InvalidArgument = 1,
    /// A numerical contract failed (non-convergence, accuracy loss).
    Numerical = 2,
    /// An internal invariant was violated; report as a bug.
    Internal = 3,
}

/// Edge roll-off used by the finite-size radial fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpsEdgeVariant {
    /// Complementary error function, value 1 at the support edge.
    StandardErfc = 0,
    /// Gaussian tail, value 1/2 at the support edge.
    GaussianQ = 1,
}

impl From<OpsEdgeVariant> for EdgeVariant {
    fn from(v: OpsEdgeVariant) -> Self {
        match v {
            OpsEdgeVariant::StandardErfc => EdgeVariant::StandardErfc,
            OpsEdgeVariant::GaussianQ => EdgeVariant::GaussianQ,
        }
    }
}

/// A quantum operation on a d-dimensional system, held behind an opaque
/// pointer. Created by `ops_random_map_new`, `ops_baker_map_new` or
/// `ops_map_compose`; released with `ops_map_free`.
pub struct OpsMap {
    inner: Superoperator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn classify(e: &Error) -> OpsStatus {
    match e.exit_code() {
        2 => OpsStatus::InvalidArgument,
        _ => OpsStatus::Numerical,
    }
}

/// Run a fallible body, translating errors and panics to a status code.
fn guarded(body: impl FnOnce() -> Result<()>) -> OpsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => OpsStatus::Ok,
        Ok(Err(e)) => {
            let status = classify(&e);
            set_error(e.to_string());
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OpsStatus::Internal
        }
    }
}

fn null_check<T>(ptr: *const T, name: &str) -> Result<()> {
    if ptr.is_null() {
        return Err(Error::InvalidInput(format!("{name} is a null pointer")));
    }
    Ok(())
}

unsafe fn write_complex(
    values: &[num_complex::Complex64],
    out_re: *mut f64,
    out_im: *mut f64,
) {
    let re = std::slice::from_raw_parts_mut(out_re, values.len());
    let im = std::slice::from_raw_parts_mut(out_im, values.len());
    for (k, z) in values.iter().enumerate() {
        re[k] = z.re;
        im[k] = z.im;
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ops_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message of the most recent failure on the calling thread, or null if no
/// call has failed yet. The pointer stays valid until the next failing call
/// on the same thread.
#[no_mangle]
pub extern "C" fn ops_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Eigenvalues of one complex Ginibre matrix with entry standard deviation
/// scale/sqrt(dim), drawn from the (seed, stream) generator. Writes `dim`
/// values into each of `out_re` and `out_im`.
///
/// # Safety
/// `out_re` and `out_im` must point to writable arrays of `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn ops_ginibre_spectrum(
    dim: usize,
    scale: f64,
    seed: u64,
    stream: u64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(out_re, "out_re")?;
        null_check(out_im, "out_im")?;
        let params = GinibreParams::new(dim, scale, GinibreKind::Complex)?;
        let mut rng = RngStream::new(seed, stream);
        let g = sample_ginibre(&params, &mut rng);
        let spec = eigenvalues(&g)?;
        write_complex(spec.eigen()?, out_re, out_im);
        Ok(())
    })
}

/// New random quantum operation on a d-dimensional system coupled to an
/// env-dimensional environment, drawn from the (seed, stream) generator.
/// On success `*out` owns the map.
///
/// # Safety
/// `out` must point to a writable `OpsMap*` slot.
#[no_mangle]
pub unsafe extern "C" fn ops_random_map_new(
    d: usize,
    env: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut OpsMap,
) -> OpsStatus {
    guarded(|| {
        null_check(out, "out")?;
        let mut rng = RngStream::new(seed, stream);
        let inner = random_map_with_stream(d, env, &mut rng)?;
        *out = Box::into_raw(Box::new(OpsMap { inner }));
        Ok(())
    })
}

/// New stochastic baker operation: `steps` applications of the generalized
/// baker unitary with phases (phi1, phi2), coupled to an env-dimensional
/// environment by a rank d/env projective measurement. On success `*out`
/// owns the map.
///
/// # Safety
/// `out` must point to a writable `OpsMap*` slot.
#[no_mangle]
pub unsafe extern "C" fn ops_baker_map_new(
    d: usize,
    env: usize,
    steps: usize,
    phi1: f64,
    phi2: f64,
    out: *mut *mut OpsMap,
) -> OpsStatus {
    guarded(|| {
        null_check(out, "out")?;
        let spec = BakerSpec::new(d, env, steps, phi1, phi2, 1)?;
        let inner = stochastic_baker(&spec)?;
        *out = Box::into_raw(Box::new(OpsMap { inner }));
        Ok(())
    })
}

/// Composition of `count` maps, applied left to right: maps[0] acts first.
/// All maps must share one system dimension. On success `*out` owns the
/// composite; the inputs remain owned by the caller.
///
/// # Safety
/// `maps` must point to `count` valid `OpsMap*` handles and `out` to a
/// writable `OpsMap*` slot.
#[no_mangle]
pub unsafe extern "C" fn ops_map_compose(
    maps: *const *const OpsMap,
    count: usize,
    out: *mut *mut OpsMap,
) -> OpsStatus {
    guarded(|| {
        null_check(maps, "maps")?;
        null_check(out, "out")?;
        let handles = std::slice::from_raw_parts(maps, count);
        let mut owned = Vec::with_capacity(count);
        for (k, &h) in handles.iter().enumerate() {
            null_check(h, &format!("maps[{k}]"))?;
            owned.push((*h).inner.clone());
        }
        let inner = compose(&owned)?;
        *out = Box::into_raw(Box::new(OpsMap { inner }));
        Ok(())
    })
}

/// System dimension d of a map, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn ops_map_dim(map: *const OpsMap) -> usize {
    unsafe { map.as_ref() }.map_or(0, |m| m.inner.d)
}

/// Bulk spectrum of a map: the d^2 - 1 superoperator eigenvalues away from
/// the fixed leading eigenvalue 1. Writes d^2 - 1 values into each of
/// `out_re` and `out_im`.
///
/// # Safety
/// `out_re` and `out_im` must point to writable arrays of d^2 - 1 doubles.
#[no_mangle]
pub unsafe extern "C" fn ops_map_bulk_spectrum(
    map: *const OpsMap,
    out_re: *mut f64,
    out_im: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(map, "map")?;
        null_check(out_re, "out_re")?;
        null_check(out_im, "out_im")?;
        let spec = spectrum_bulk(&(*map).inner)?;
        write_complex(spec.eigen()?, out_re, out_im);
        Ok(())
    })
}

/// Rescaled squared singular values of a map's superoperator under the
/// drop-leading protocol: the largest value is removed, the rest are
/// renormalized to mean 1. Writes d^2 - 1 values into `out`.
///
/// # Safety
/// `out` must point to a writable array of d^2 - 1 doubles.
#[no_mangle]
pub unsafe extern "C" fn ops_map_singular_values(
    map: *const OpsMap,
    out: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(map, "map")?;
        null_check(out, "out")?;
        let w = wishart_normalize(&(*map).inner.matrix, true)?;
        let dst = std::slice::from_raw_parts_mut(out, w.rescaled.len());
        dst.copy_from_slice(&w.rescaled);
        Ok(())
    })
}

/// Shannon entropy of the map's normalized squared singular values, relative
/// to the uniform distribution: S - ln(d^2 - 1), written to `*out`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn ops_map_entropy(map: *const OpsMap, out: *mut f64) -> OpsStatus {
    guarded(|| {
        null_check(map, "map")?;
        null_check(out, "out")?;
        let w = wishart_normalize(&(*map).inner.matrix, true)?;
        *out = shannon_entropy_rel(&w)?;
        Ok(())
    })
}

/// Release a map handle. Null is ignored.
///
/// # Safety
/// `map` must be a handle returned by this library, released at most once.
#[no_mangle]
pub unsafe extern "C" fn ops_map_free(map: *mut OpsMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Nonzero rescaled squared singular values of the s-th power of a
/// stochastic baker operation, computed through its rank-(d^2/env)
/// truncation. Writes d^2/env - 1 values into `out`.
///
/// # Safety
/// `out` must point to a writable array of d^2/env - 1 doubles.
#[no_mangle]
pub unsafe extern "C" fn ops_baker_sstep_singular(
    d: usize,
    env: usize,
    steps: usize,
    phi1: f64,
    phi2: f64,
    s: usize,
    out: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(out, "out")?;
        let spec = BakerSpec::new(d, env, steps, phi1, phi2, s)?;
        let w = sstep_singular_spectrum(&spec)?;
        let dst = std::slice::from_raw_parts_mut(out, w.rescaled.len());
        dst.copy_from_slice(&w.rescaled);
        Ok(())
    })
}

/// Fuss-Catalan density of the given order (1, 2 or 3) evaluated at `len`
/// points `xs`, written to `out`.
///
/// # Safety
/// `xs` and `out` must point to arrays of `len` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ops_fc_density(
    order: usize,
    xs: *const f64,
    len: usize,
    out: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(xs, "xs")?;
        null_check(out, "out")?;
        let order = FcOrder::new(order)?;
        let src = std::slice::from_raw_parts(xs, len);
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (y, &x) in dst.iter_mut().zip(src) {
            *y = fc_density(x, order);
        }
        Ok(())
    })
}

/// Mean of -x ln x under the Fuss-Catalan density of the given order,
/// written to `*out`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn ops_fc_mean_entropy(order: usize, out: *mut f64) -> OpsStatus {
    guarded(|| {
        null_check(out, "out")?;
        *out = fc_mean_entropy(FcOrder::new(order)?)?;
        Ok(())
    })
}

/// Fit the finite-size edge parameter q to `len` pooled eigenvalue radii:
/// the radii are binned into a `bins`-cell histogram and matched against the
/// order-s radial law with support radius `xi` at matrix dimension `n`. The
/// fitted q is written to `*out_q`.
///
/// # Safety
/// `radii` must point to `len` doubles and `out_q` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn ops_fit_q(
    radii: *const f64,
    len: usize,
    s: usize,
    xi: f64,
    n: usize,
    bins: usize,
    variant: OpsEdgeVariant,
    out_q: *mut f64,
) -> OpsStatus {
    guarded(|| {
        null_check(radii, "radii")?;
        null_check(out_q, "out_q")?;
        let sample = std::slice::from_raw_parts(radii, len);
        let hist = histogram_from_radii(sample, bins)?;
        let law = RadialLawParams::new(s, xi, n, 1.0)?;
        let fit = fit_q(&hist, &law, variant.into())?;
        *out_q = fit.q;
        Ok(())
    })
}
