use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModelParams, ModelState};
use crate::spectral::ops;
use crate::spectral::{PhysicalField, SpectralField};
use crate::{Error, Result};

/// Velocity floor for the CFL estimate of a fluid at rest.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// No viscosity, no species diffusion.
    Inviscid,
    /// Adds `νΔu` and `dΔZ`.
    Viscous,
}

/// Time derivatives of the evolved fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub du: SpectralField,
    pub dz: SpectralField,
}

/// Right-hand side and time stepper of the filtered reactive flow.
#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub params: ModelParams,
    pub variant: Variant,
    /// Transport terms on/off; switching them off isolates the linear part.
    pub advection: bool,
}

impl Model {
    pub fn new(params: ModelParams, variant: Variant) -> Result<Self> {
        params.validate()?;
        Ok(Model {
            params,
            variant,
            advection: true,
        })
    }

    fn viscosity(&self) -> (f64, f64) {
        match self.variant {
            Variant::Inviscid => (0.0, 0.0),
            Variant::Viscous => (self.params.nu, self.params.diff_d),
        }
    }

    /// `du/dt = −P[(v·∇)u] + νΔu`, `dZ/dt = −∇·(Zu) − Kφ(θ̄)Z + dΔZ`.
    ///
    /// Quadratic products are formed on the grid from two-thirds-dealiased
    /// fields and dealiased again, which makes them exact Galerkin products.
    pub fn rhs(&self, state: &ModelState) -> Result<Tendency> {
        let grid = *state.grid();
        let dim = grid.dim();
        let u = ops::dealias(state.u());
        let v = ops::dealias(state.v());
        let z = ops::dealias(state.z());
        let (nu, diff) = self.viscosity();

        let mut du = SpectralField::zeros(grid, dim);
        let mut dz = SpectralField::zeros(grid, 1);

        if self.advection {
            let v_phys = v.inverse();
            let grad_u = ops::jacobian(&u)?.inverse();
            let len = grid.len();
            let mut adv = PhysicalField::zeros(grid, dim);
            for i in 0..dim {
                let out = adv.component_mut(i);
                for j in 0..dim {
                    let vj = v_phys.component(j);
                    let dj_ui = grad_u.component(i * dim + j);
                    for x in 0..len {
                        out[x] += vj[x] * dj_ui[x];
                    }
                }
            }
            let adv = ops::dealias(&adv.transform()?);
            du = ops::leray_project(&adv)?;
            du.scale(-1.0);

            let u_phys = u.inverse();
            let z_phys = z.inverse();
            let zc = z_phys.component(0);
            let mut flux = PhysicalField::zeros(grid, dim);
            for j in 0..dim {
                let uj = u_phys.component(j);
                for (f, (a, b)) in flux.component_mut(j).iter_mut().zip(zc.iter().zip(uj)) {
                    *f = a * b;
                }
            }
            dz = ops::dealias(&ops::divergence(&flux.transform()?)?);
            dz.scale(-1.0);
        }

        if nu > 0.0 {
            du = du.axpy(nu, &ops::laplacian(&u));
        }
        let rate = self.params.reaction_rate();
        if rate > 0.0 {
            dz = dz.axpy(-rate, &z);
        }
        if diff > 0.0 {
            dz = dz.axpy(diff, &ops::laplacian(&z));
        }
        Ok(Tendency { du, dz })
    }

    /// Largest stable step for the given safety factor: `safety·Δx / max|v|`.
    pub fn cfl_dt(state: &ModelState, safety: f64) -> Result<f64> {
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(Error::param("cfl_safety", format!("must lie in (0, 1], got {safety}")));
        }
        let vmax = state
            .v()
            .inverse()
            .magnitude()
            .into_iter()
            .fold(0.0f64, f64::max);
        Ok(safety * state.grid().spacing() / vmax.max(CFL_VELOCITY_FLOOR))
    }

    /// One classical fourth-order Runge–Kutta step; `v` is re-derived from `u`
    /// at every stage.
    pub fn step_rk4(&self, state: &ModelState, dt: f64) -> Result<ModelState> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let limit = Model::cfl_dt(state, 1.0)?;
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        let t0 = state.t;
        let stage = |base: &ModelState, k: &Tendency, h: f64, t: f64| -> Result<ModelState> {
            base.with_fields(base.u().axpy(h, &k.du), base.z().axpy(h, &k.dz), t)
        };
        let k1 = self.rhs(state)?;
        let s2 = stage(state, &k1, 0.5 * dt, t0 + 0.5 * dt)?;
        let k2 = self.rhs(&s2)?;
        let s3 = stage(state, &k2, 0.5 * dt, t0 + 0.5 * dt)?;
        let k3 = self.rhs(&s3)?;
        let s4 = stage(state, &k3, dt, t0 + dt)?;
        let k4 = self.rhs(&s4)?;

        let combine = |x: &SpectralField, a: &SpectralField, b: &SpectralField, c: &SpectralField, d: &SpectralField| {
            let mut out = x.clone();
            let w = dt / 6.0;
            for (((( o, ka), kb), kc), kd) in out
                .data_mut()
                .iter_mut()
                .zip(a.data())
                .zip(b.data())
                .zip(c.data())
                .zip(d.data())
            {
                *o += (ka + kb * 2.0 + kc * 2.0 + kd) * Complex64::new(w, 0.0);
            }
            out
        };
        let u = combine(state.u(), &k1.du, &k2.du, &k3.du, &k4.du);
        let z = combine(state.z(), &k1.dz, &k2.dz, &k3.dz, &k4.dz);
        state.with_fields(u, z, t0 + dt)
    }
}

/// Zero-mean solution of `−Δp = ∂_i∂_j(v_i u_j)`.
///
/// Products are formed on a twice-refined grid and the pressure keeps every
/// mode representable on the input grid.
pub fn pressure_solve(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let grid = *u.grid();
    let dim = grid.dim();
    if *v.grid() != grid {
        return Err(Error::GridMismatch("u and v live on different grids".into()));
    }
    if u.components() != dim || v.components() != dim {
        return Err(Error::ComponentMismatch {
            expected: format!("vector fields with {dim} components"),
            found: u.components().min(v.components()),
        });
    }
    let uf = ops::fine_samples(u, 2)?;
    let vf = ops::fine_samples(v, 2)?;
    let fine = *uf.grid();
    let mut source = SpectralField::zeros(grid, 1);
    for i in 0..dim {
        for j in 0..dim {
            let prod: Vec<f64> = vf
                .component(i)
                .iter()
                .zip(uf.component(j))
                .map(|(a, b)| a * b)
                .collect();
            let prod = PhysicalField::from_vec(fine, 1, prod)?.transform()?;
            let prod = ops::coarsen(&prod, grid)?;
            let dij = ops::partial(&ops::partial(&prod, i), j);
            source = source.axpy(1.0, &dij);
        }
    }
    let mut p = source;
    for (idx, z) in p.component_mut(0).iter_mut().enumerate() {
        let k2 = grid.k_squared(idx);
        *z = if k2 == 0.0 { Complex64::default() } else { *z / k2 };
    }
    Ok(p)
}
