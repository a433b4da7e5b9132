//! CSV persistence. Every file starts with a comment line recording the
//! experiment, its parameters, and the seed, followed by a column-name row.
//! Floats are written in shortest round-trip form, '.' radix, newline
//! terminated, so reruns with the same seed are byte identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::stats::RadialHistogram;
use crate::{Error, Result};

fn io_err(path: &Path, action: &str, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("cannot {action} {}: {e}", path.display()),
    ))
}

fn open(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| io_err(path, "create", e))?;
    Ok(BufWriter::new(file))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| io_err(path, "write", e))
}

macro_rules! put {
    ($w:expr, $path:expr, $($arg:tt)*) => {
        writeln!($w, $($arg)*).map_err(|e| io_err($path, "write", e))?
    };
}

/// Eigenvalue rows: sample_id, re, im.
pub fn write_eigen_csv(path: &Path, comment: &str, rows: &[(usize, Complex64)]) -> Result<()> {
    let mut w = open(path)?;
    put!(w, path, "{comment}");
    put!(w, path, "sample_id,re,im");
    for (id, z) in rows {
        put!(w, path, "{id},{:?},{:?}", z.re, z.im);
    }
    finish(w, path)
}

/// One scalar per row: sample_id, x. Used for singular values, entropies,
/// and pooled radii.
pub fn write_scalar_csv(path: &Path, comment: &str, rows: &[(usize, f64)]) -> Result<()> {
    let mut w = open(path)?;
    put!(w, path, "{comment}");
    put!(w, path, "sample_id,x");
    for (id, x) in rows {
        put!(w, path, "{id},{x:?}");
    }
    finish(w, path)
}

/// Histogram rows: bin_left, bin_right, density.
pub fn write_histogram_csv(path: &Path, comment: &str, hist: &RadialHistogram) -> Result<()> {
    let mut w = open(path)?;
    put!(w, path, "{comment}");
    put!(w, path, "bin_left,bin_right,density");
    for i in 0..hist.density.len() {
        put!(
            w,
            path,
            "{:?},{:?},{:?}",
            hist.edges[i],
            hist.edges[i + 1],
            hist.density[i]
        );
    }
    finish(w, path)
}

/// Law curve rows: x, density.
pub fn write_curve_csv(path: &Path, comment: &str, points: &[(f64, f64)]) -> Result<()> {
    let mut w = open(path)?;
    put!(w, path, "{comment}");
    put!(w, path, "x,density");
    for (x, y) in points {
        put!(w, path, "{x:?},{y:?}");
    }
    finish(w, path)
}
