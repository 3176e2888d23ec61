use crate::model::{EnergySample, ModelState};
use crate::{Error, Result};

/// Relative-difference floor for a vanishing energy.
const ENERGY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energy {
    pub e_u: f64,
    pub e_z: f64,
    pub total: f64,
}

/// `‖u‖²_{L²}` and `‖Z‖²_{L²}` by grid quadrature (no factor ½).
pub fn total_energy(state: &ModelState) -> Energy {
    let e_u = state.u().inverse().l2_norm_sq();
    let e_z = state.z().inverse().l2_norm_sq();
    Energy {
        e_u,
        e_z,
        total: e_u + e_z,
    }
}

fn interpolate(series: &[EnergySample], t: f64) -> Result<f64> {
    let first = series.first().ok_or_else(|| Error::param("series", "empty"))?;
    let last = series.last().expect("nonempty");
    let tol = 1e-12 * last.t.abs().max(1.0);
    if t < first.t - tol || t > last.t + tol {
        return Err(Error::param(
            "t",
            format!("{t} outside the series range [{}, {}]", first.t, last.t),
        ));
    }
    if series.len() == 1 {
        return Ok(first.e_total);
    }
    let idx = series.partition_point(|s| s.t <= t).clamp(1, series.len() - 1);
    let (a, b) = (&series[idx - 1], &series[idx]);
    let w = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
    Ok(a.e_total + w * (b.e_total - a.e_total))
}

/// `|E(t₁) − E(t₂)| / max(E(t₁), floor)` with linear interpolation in time.
pub fn energy_equality_check(series: &[EnergySample], t1: f64, t2: f64) -> Result<f64> {
    let e1 = interpolate(series, t1)?;
    let e2 = interpolate(series, t2)?;
    Ok((e1 - e2).abs() / e1.max(ENERGY_FLOOR))
}
