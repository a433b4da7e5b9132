//! Law curve emission: uniform-grid (x, density) tables for plot overlays,
//! and a graded, renormalized Fuss-Catalan table whose trapezoid integral is
//! exactly 1.

use std::path::Path;

use num_complex::Complex64;

use crate::laws::{
    fc_density, fc_support, ginibre_density, product_radial_density, FcOrder, RadialLawParams,
};
use crate::{Error, Result};

use super::csv::write_curve_csv;

/// Shape parameters consumed by the law curves: s and xi for the product
/// radial law, N for the finite Ginibre density.
#[derive(Debug, Clone, Copy)]
pub struct CurveParams {
    pub s: usize,
    pub xi: f64,
    pub n: usize,
}

impl Default for CurveParams {
    fn default() -> Self {
        CurveParams {
            s: 1,
            xi: 1.0,
            n: 1,
        }
    }
}

fn law_edge(law: &str, params: &CurveParams) -> Result<f64> {
    match law {
        "fc1" => Ok(fc_support(FcOrder::One).1),
        "fc2" => Ok(fc_support(FcOrder::Two).1),
        "fc3" => Ok(fc_support(FcOrder::Three).1),
        "radial" => Ok(params.xi),
        // Density decays like the gamma tail; by 1 + 8/sqrt(N) it is below
        // machine noise, which stands in for the support edge.
        "ginibre-finite" => Ok(1.0 + 8.0 / (params.n as f64).sqrt()),
        other => Err(Error::Config(format!("unknown law {other:?}"))),
    }
}

/// Density table on the uniform grid x_k = k edge / grid, k = 1..grid.
/// Starting at the first positive grid point keeps integrable divergences at
/// x = 0 out of the files.
pub fn density_curve(law: &str, params: &CurveParams, grid: usize) -> Result<Vec<(f64, f64)>> {
    if grid < 1 {
        return Err(Error::Config("grid must be >= 1".into()));
    }
    let edge = law_edge(law, params)?;
    let mut rows = Vec::with_capacity(grid);
    for k in 1..=grid {
        let x = edge * k as f64 / grid as f64;
        let y = match law {
            "fc1" => fc_density(x, FcOrder::One),
            "fc2" => fc_density(x, FcOrder::Two),
            "fc3" => fc_density(x, FcOrder::Three),
            "radial" => {
                let p = RadialLawParams::new(params.s, params.xi, 1, 1.0)?;
                product_radial_density(x, &p)
            }
            "ginibre-finite" => ginibre_density(Complex64::new(x, 0.0), params.n)?,
            _ => unreachable!("validated by law_edge"),
        };
        rows.push((x, y));
    }
    Ok(rows)
}

/// Writes a uniform-grid law curve as CSV.
pub fn emit_density_curve(
    path: &Path,
    law: &str,
    params: &CurveParams,
    grid: usize,
    comment: &str,
) -> Result<()> {
    let rows = density_curve(law, params, grid)?;
    write_curve_csv(path, comment, &rows)
}

/// Trapezoid mass of a curve table.
pub fn trapezoid_mass(points: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for w in points.windows(2) {
        let (x0, y0) = w[0];
        let (x1, y1) = w[1];
        total += 0.5 * (y0 + y1) * (x1 - x0);
    }
    total
}

/// Fuss-Catalan density on a graded grid, renormalized so the table's own
/// trapezoid integral is exactly 1.
///
/// The grid x(t) = edge t^g ((g+1) - g t), t = i/points, g = 4(s+1),
/// clusters points at both the x^{-s/(s+1)} divergence and the soft edge;
/// the raw trapezoid mass is then within ~3e-4 of 1 and the renormalization
/// distorts densities by at most that factor. Returns the rows and the raw
/// mass before renormalization.
pub fn fc_graded_curve(order: FcOrder, points: usize) -> Result<(Vec<(f64, f64)>, f64)> {
    if points < 2 {
        return Err(Error::Config("points must be >= 2".into()));
    }
    let edge = fc_support(order).1;
    let g = 4.0 * (order.s() as f64 + 1.0);
    let mut rows = Vec::with_capacity(points);
    for i in 1..=points {
        let t = i as f64 / points as f64;
        let x = edge * t.powf(g) * ((g + 1.0) - g * t);
        rows.push((x, fc_density(x, order)));
    }
    let mass = trapezoid_mass(&rows);
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Numerical(format!(
            "degenerate Fuss-Catalan curve mass {mass}"
        )));
    }
    for row in &mut rows {
        row.1 /= mass;
    }
    Ok((rows, mass))
}
