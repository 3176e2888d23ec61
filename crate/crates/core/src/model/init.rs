use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ModelState;
use crate::spectral::ops;
use crate::spectral::{Grid, PhysicalField, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    TaylorGreen,
    SingleMode,
    RandomDivFree,
    BurgersShock,
}

/// Shape parameters shared by every initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSpec {
    /// Velocity scale: `U₀` for Taylor-Green and single-mode, rms speed for
    /// random fields, jump `σ` for the Burgers sawtooth.
    pub amplitude: f64,
    pub seed: u64,
    /// Energy-spectrum exponent of random fields, `E(k) ~ k^{−slope}`.
    pub slope: f64,
    /// Largest wavenumber modulus of random fields; zero means the dealiasing limit.
    pub kmax: f64,
    pub z_amplitude: f64,
    pub z_mean: f64,
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec {
            amplitude: 1.0,
            seed: 0,
            slope: 5.0 / 3.0,
            kmax: 0.0,
            z_amplitude: 0.5,
            z_mean: 0.0,
        }
    }
}

pub fn initial_condition(kind: InitialKind, grid: Grid, alpha: f64, spec: &InitialSpec) -> Result<ModelState> {
    match (kind, grid.dim()) {
        (InitialKind::BurgersShock, 1) => burgers_shock(grid, spec.amplitude, alpha),
        (InitialKind::BurgersShock, d) => Err(Error::InvalidGrid(format!(
            "burgers_shock needs a 1-dimensional grid, got dimension {d}"
        ))),
        (_, 1) => Err(Error::InvalidGrid(format!("{kind:?} needs a 3-dimensional grid"))),
        (InitialKind::TaylorGreen, _) => taylor_green(grid, alpha, spec),
        (InitialKind::SingleMode, _) => single_mode(grid, alpha, spec),
        (InitialKind::RandomDivFree, _) => random_div_free(grid, alpha, spec),
    }
}

fn reactant(grid: Grid, spec: &InitialSpec) -> Result<SpectralField> {
    let (a, m) = (spec.z_amplitude, spec.z_mean);
    PhysicalField::scalar_fn(grid, |x| m + a * x[0].cos() * x[1].cos() * x[2].cos()).transform()
}

/// `u = U₀(sin x cos y cos z, −cos x sin y cos z, 0)`.
fn taylor_green(grid: Grid, alpha: f64, spec: &InitialSpec) -> Result<ModelState> {
    let a = spec.amplitude;
    let u = PhysicalField::from_fn(grid, 3, |x| {
        vec![
            a * x[0].sin() * x[1].cos() * x[2].cos(),
            -a * x[0].cos() * x[1].sin() * x[2].cos(),
            0.0,
        ]
    })
    .transform()?;
    ModelState::new(ops::leray_project(&u)?, reactant(grid, spec)?, alpha, 0.0)
}

/// `u = U₀ sin(x₁) e₂`, a steady shear for which self-advection vanishes.
fn single_mode(grid: Grid, alpha: f64, spec: &InitialSpec) -> Result<ModelState> {
    let a = spec.amplitude;
    let u = PhysicalField::from_fn(grid, 3, |x| vec![0.0, a * x[0].sin(), 0.0]).transform()?;
    ModelState::new(u, reactant(grid, spec)?, alpha, 0.0)
}

/// Gaussian random field with per-mode amplitude `|k|^{−(slope+dim−1)/2}` on
/// `1 ≤ |k| ≤ kmax`, restricted to the dealiased band, Hermitian, and scaled
/// to the requested rms value. The seed fully determines the output.
pub fn random_spectral_field(
    grid: Grid,
    components: usize,
    slope: f64,
    kmax: f64,
    rms: f64,
    rng: &mut ChaCha8Rng,
) -> Result<SpectralField> {
    let dim = grid.dim() as f64;
    let exponent = 0.5 * (slope + dim - 1.0);
    let mut f = SpectralField::zeros(grid, components);
    let kmax2 = if kmax > 0.0 { kmax * kmax } else { f64::INFINITY };
    for c in 0..components {
        for (i, z) in f.component_mut(c).iter_mut().enumerate() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let k2 = grid.k_squared(i);
            if k2 == 0.0 || k2 > kmax2 || !grid.retained(i) {
                continue;
            }
            *z = Complex64::new(re, im) * k2.sqrt().powf(-exponent);
        }
    }
    f.symmetrize();
    let energy = f.parseval_energy();
    if energy > 0.0 {
        let target = rms * rms * grid.volume();
        f.scale((target / energy).sqrt());
    }
    Ok(f)
}

fn random_div_free(grid: Grid, alpha: f64, spec: &InitialSpec) -> Result<ModelState> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let raw = random_spectral_field(grid, 3, spec.slope, spec.kmax, 1.0, &mut rng)?;
    let mut u = ops::leray_project(&raw)?;
    let e = u.parseval_energy();
    if e > 0.0 {
        u.scale(spec.amplitude * (grid.volume() / e).sqrt());
    }
    let mut z = random_spectral_field(grid, 1, spec.slope, spec.kmax, spec.z_amplitude, &mut rng)?;
    z.component_mut(0)[0] = Complex64::new(spec.z_mean, 0.0);
    ModelState::new(u, z, alpha, 0.0)
}

/// Periodic sawtooth `u(x) = σ(π − x)/(2π)` on `[0, 2π)`: a single upward
/// jump of size `σ` at `x = 0`, sampled with the right-hand limit there.
pub fn sawtooth(grid: Grid, sigma: f64) -> PhysicalField {
    PhysicalField::scalar_fn(grid, |x| sigma * (PI - x[0]) / (2.0 * PI))
}

fn burgers_shock(grid: Grid, sigma: f64, alpha: f64) -> Result<ModelState> {
    if !(sigma > 0.0) {
        return Err(Error::param("amplitude", "shock size must be positive"));
    }
    let u = sawtooth(grid, sigma).transform()?;
    ModelState::new(u, SpectralField::zeros(grid, 1), alpha, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_green_energy_closed_form() {
        let g = Grid::new(3, 16).unwrap();
        let s = initial_condition(InitialKind::TaylorGreen, g, 0.25, &InitialSpec::default()).unwrap();
        let e = s.u().inverse().l2_norm_sq();
        assert!((e - 2.0 * PI.powi(3)).abs() < 1e-12 * e);
    }

    #[test]
    fn every_3d_kind_is_divergence_free() {
        let g = Grid::new(3, 16).unwrap();
        for kind in [InitialKind::TaylorGreen, InitialKind::SingleMode, InitialKind::RandomDivFree] {
            let s = initial_condition(kind, g, 0.1, &InitialSpec::default()).unwrap();
            assert!(s.max_divergence() <= 1e-10, "{kind:?}");
        }
    }

    #[test]
    fn random_fields_are_reproducible() {
        let g = Grid::new(3, 16).unwrap();
        let spec = InitialSpec {
            seed: 42,
            ..InitialSpec::default()
        };
        let a = initial_condition(InitialKind::RandomDivFree, g, 0.1, &spec).unwrap();
        let b = initial_condition(InitialKind::RandomDivFree, g, 0.1, &spec).unwrap();
        let bits = |s: &ModelState| -> Vec<u64> { s.u().inverse().data().iter().map(|v| v.to_bits()).collect() };
        assert_eq!(bits(&a), bits(&b));
        let other = initial_condition(InitialKind::RandomDivFree, g, 0.1, &InitialSpec { seed: 43, ..spec }).unwrap();
        assert_ne!(bits(&a), bits(&other));
        let e = a.u().parseval_energy() / g.volume();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(a.u().hermitian_defect() < 1e-15);
    }

    #[test]
    fn dimension_compatibility() {
        let g1 = Grid::new(1, 64).unwrap();
        let g3 = Grid::new(3, 8).unwrap();
        let spec = InitialSpec::default();
        assert!(initial_condition(InitialKind::BurgersShock, g3, 0.0, &spec).is_err());
        assert!(initial_condition(InitialKind::TaylorGreen, g1, 0.0, &spec).is_err());
        let s = initial_condition(InitialKind::BurgersShock, g1, 0.0, &spec).unwrap();
        let u = s.u().inverse();
        assert!((u.component(0)[0] - 0.5).abs() < 1e-12);
        assert!((u.component(0)[63] + 0.5).abs() < 0.05);
    }
}
