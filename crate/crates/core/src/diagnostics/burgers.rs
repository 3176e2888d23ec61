use crate::spectral::{Mollifier, PhysicalField};
use crate::{Error, Result};

/// Smallest grid for which the shock quadrature is trusted.
pub const MIN_SHOCK_POINTS: usize = 1024;

/// `∫ D_ε dx` for a 1D field with `D_ε(x) = (1/12)∫χ'_ε(ξ) δu(ξ;x)³ dξ`.
///
/// Separations are grid multiples `mh`, so increments are exact sample
/// differences even across discontinuities.
pub fn shock_defect(u: &PhysicalField, eps: f64) -> Result<f64> {
    let grid = *u.grid();
    if grid.dim() != 1 || u.components() != 1 {
        return Err(Error::InvalidGrid("shock defect needs a 1D scalar field".into()));
    }
    let moll = Mollifier::new(eps, 1)?;
    let n = grid.n();
    let h = grid.spacing();
    let reach = (eps / h).ceil() as usize;
    if reach < 2 {
        return Err(Error::Resolution(format!("ε = {eps} spans fewer than two grid cells")));
    }
    let s = u.data();
    let mut total = 0.0;
    for m in 1..reach.min(n / 2) {
        let xi = m as f64 * h;
        let w = moll.gradient(&[xi, 0.0, 0.0])[0];
        if w == 0.0 {
            continue;
        }
        // χ' is odd: the −ξ node contributes −w·(u(x−ξ) − u(x))³.
        let mut acc = 0.0;
        for x in 0..n {
            let fwd = s[(x + m) % n] - s[x];
            let bwd = s[(x + n - m) % n] - s[x];
            acc += fwd * fwd * fwd - bwd * bwd * bwd;
        }
        total += w * acc;
    }
    Ok(total * h * h / 12.0)
}

/// Richardson extrapolation `ε → 0` over a geometric ladder with the
/// convergence order measured from the last three entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub order: f64,
}

pub fn richardson(eps: &[f64], values: &[f64]) -> Result<Extrapolation> {
    let m = eps.len();
    if m != values.len() || m < 3 {
        return Err(Error::param("eps_ladder", "need at least three (ε, value) pairs"));
    }
    let ratio = eps[m - 2] / eps[m - 1];
    if !(ratio > 1.0) || ((eps[m - 3] / eps[m - 2]) - ratio).abs() > 1e-9 * ratio {
        return Err(Error::param("eps_ladder", "must be a decreasing geometric sequence"));
    }
    let (a, b, c) = (values[m - 3], values[m - 2], values[m - 1]);
    let q = (a - b) / (b - c);
    let order = if q.is_finite() && q > 1.0 { q.ln() / ratio.ln() } else { 1.0 };
    let value = c + (c - b) / (ratio.powf(order) - 1.0);
    Ok(Extrapolation { value, order })
}

/// Dissipation ladder and its extrapolated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ShockReport {
    pub eps: Vec<f64>,
    pub defects: Vec<f64>,
    pub extrapolation: Extrapolation,
}

impl ShockReport {
    /// `|∫D|`; the sign only records the jump direction.
    pub fn dissipation(&self) -> f64 {
        self.extrapolation.value.abs()
    }
}

pub fn shock_dissipation(u: &PhysicalField, eps: &[f64]) -> Result<ShockReport> {
    if u.grid().n() < MIN_SHOCK_POINTS {
        return Err(Error::Resolution(format!(
            "shock analysis needs n >= {MIN_SHOCK_POINTS}, got {}",
            u.grid().n()
        )));
    }
    let defects: Vec<f64> = eps.iter().map(|&e| shock_defect(u, e)).collect::<Result<_>>()?;
    let extrapolation = richardson(eps, &defects)?;
    Ok(ShockReport {
        eps: eps.to_vec(),
        defects,
        extrapolation,
    })
}
