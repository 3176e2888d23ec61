use crate::diagnostics::{check_magnitudes, shifted_samples, Directions};
use crate::fit::loglog_fit;
use crate::spectral::SpectralField;
use crate::{Error, Result};

use super::norm::lp_norm;

/// Direction-averaged `‖u(·+ξ) − u‖_{L^p}` per separation length.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureCurve {
    pub p: f64,
    pub xi: Vec<f64>,
    pub values: Vec<f64>,
}

/// Fitted exponent `r` of `S_p(|ξ|) ≈ C|ξ|^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityFit {
    pub exponent: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Separations are applied as exact spectral shifts; for fields with jumps,
/// grid multiples `mh` keep the increments free of interpolation ringing.
pub fn structure_function(u: &SpectralField, p: f64, xi: &[f64], directions: Directions) -> Result<StructureCurve> {
    check_magnitudes(xi)?;
    let grid = *u.grid();
    let dirs = directions.unit_vectors(grid.dim())?;
    let base = u.inverse();
    let mut values = Vec::with_capacity(xi.len());
    for &r in xi {
        let mut acc = 0.0;
        for e in &dirs {
            let mut d = shifted_samples(u, [r * e[0], r * e[1], r * e[2]]);
            for (a, b) in d.data_mut().iter_mut().zip(base.data()) {
                *a -= b;
            }
            acc += lp_norm(&d, p)?;
        }
        values.push(acc / dirs.len() as f64);
    }
    Ok(StructureCurve {
        p,
        xi: xi.to_vec(),
        values,
    })
}

/// Least-squares slope of `log S_p` against `log |ξ|` over `window`
/// (inclusive). Needs at least four points spanning a decade.
pub fn regularity_fit(curve: &StructureCurve, window: Option<(f64, f64)>) -> Result<RegularityFit> {
    let (lo, hi) = window.unwrap_or((0.0, f64::INFINITY));
    let (x, y): (Vec<f64>, Vec<f64>) = curve
        .xi
        .iter()
        .zip(&curve.values)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(a, b)| (*a, *b))
        .unzip();
    if x.len() < 4 {
        return Err(Error::param("xi", format!("fit needs at least 4 magnitudes, got {}", x.len())));
    }
    let span = x.iter().copied().fold(0.0, f64::max) / x.iter().copied().fold(f64::INFINITY, f64::min);
    if span < 10.0 {
        return Err(Error::param("xi", format!("fit window spans a factor {span:.3}, need at least 10")));
    }
    if y.iter().all(|v| *v == 0.0) {
        return Err(Error::Degenerate("structure function vanishes identically".into()));
    }
    let fit = loglog_fit(&x, &y)?;
    Ok(RegularityFit {
        exponent: fit.slope,
        stderr: fit.stderr,
        points: fit.points,
    })
}
