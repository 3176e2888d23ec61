use super::{Model, ModelState};
use crate::diagnostics::total_energy;
use crate::{Error, Result};

/// One row of the energy trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub e_u: f64,
    pub e_z: f64,
    pub e_total: f64,
    pub max_div: f64,
    /// Spatial mean of `Z`, conserved when the reaction term is off.
    pub z_mean: f64,
}

impl EnergySample {
    pub fn of(state: &ModelState) -> Self {
        let e = total_energy(state);
        EnergySample {
            t: state.t,
            e_u: e.e_u,
            e_z: e.e_z,
            e_total: e.total,
            max_div: state.max_divergence(),
            z_mean: state.z().component(0)[0].re,
        }
    }
}

pub const SERIES_HEADER: &str = "t,E_u,E_Z,E_total,max_div,Z_mean";

/// Energy series as CSV with the fixed header.
pub fn series_csv(series: &[EnergySample]) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for s in series {
        out.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?},{:?}\n",
            s.t, s.e_u, s.e_z, s.e_total, s.max_div, s.z_mean
        ));
    }
    out
}

/// Output cadence of a run, in steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cadence {
    pub series_every: usize,
    /// Zero disables snapshots.
    pub snapshot_every: usize,
}

impl Default for Cadence {
    fn default() -> Self {
        Cadence {
            series_every: 1,
            snapshot_every: 0,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub snapshots: Vec<ModelState>,
    pub series: Vec<EnergySample>,
}

impl Trajectory {
    pub fn last_state(&self) -> Option<&ModelState> {
        self.snapshots.last()
    }
}

/// Number of fixed steps of size `dt` that reach `t_end`.
pub fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    if !(t_end >= 0.0) {
        return Err(Error::param("t_end", "must be nonnegative"));
    }
    let steps = (t_end / dt).round();
    if ((steps * dt) - t_end).abs() > 1e-9 * t_end.max(1.0) {
        return Err(Error::param("t_end", format!("{t_end} is not a multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

/// Advance `initial` with fixed RK4 steps up to `t_end`. The initial and final
/// states always enter both the series and (when enabled) the snapshots.
/// Times are `t₀ + i·dt` exactly, so no rounding accumulates.
pub fn integrate(
    model: &Model,
    initial: &ModelState,
    dt: f64,
    t_end: f64,
    cadence: Cadence,
) -> Result<Trajectory> {
    let steps = step_count(dt, t_end)?;
    let t0 = initial.t;
    let mut traj = Trajectory::default();
    traj.series.push(EnergySample::of(initial));
    if cadence.snapshot_every > 0 {
        traj.snapshots.push(initial.clone());
    }
    let mut state = initial.clone();
    for i in 1..=steps {
        let mut next = model.step_rk4(&state, dt)?;
        next.t = t0 + i as f64 * dt;
        state = next;
        let last = i == steps;
        if last || (cadence.series_every > 0 && i % cadence.series_every == 0) {
            traj.series.push(EnergySample::of(&state));
        }
        if cadence.snapshot_every > 0 && (last || i % cadence.snapshot_every == 0) {
            traj.snapshots.push(state.clone());
        }
    }
    if cadence.snapshot_every == 0 {
        traj.snapshots.push(state);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_condition, InitialKind, InitialSpec, ModelParams, Variant};
    use crate::spectral::Grid;

    #[test]
    fn series_tracks_a_conserved_reactant_mean() {
        let spec = InitialSpec {
            seed: 4,
            kmax: 4.0,
            z_mean: 0.3,
            ..InitialSpec::default()
        };
        let s0 = initial_condition(InitialKind::RandomDivFree, Grid::new(3, 12).unwrap(), 0.2, &spec).unwrap();
        let model = Model::new(ModelParams { alpha: 0.2, ..ModelParams::default() }, Variant::Inviscid).unwrap();
        let cadence = Cadence {
            series_every: 1,
            snapshot_every: 0,
        };
        let run = integrate(&model, &s0, 0.01, 0.05, cadence).unwrap();
        assert_eq!(run.series.len(), 6);
        for s in &run.series {
            assert!((s.z_mean - 0.3).abs() < 1e-14, "{}", s.z_mean);
        }
        let csv = series_csv(&run.series);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv.lines().nth(1).unwrap().ends_with(",0.3"));
    }
}
