use crate::spectral::ops::{self, HelmholtzDirection};
use crate::spectral::{Grid, PhysicalField, Snapshot, SpectralField};
use crate::{Error, Result};

/// Filtered velocity `u`, advecting velocity `v = (1 − α²Δ)⁻¹u`, reactant
/// fraction `Z`, and time. `u` and `Z` are the evolved variables; `v` is
/// always recomputed from `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    u: SpectralField,
    v: SpectralField,
    z: SpectralField,
    alpha: f64,
    pub t: f64,
}

impl ModelState {
    pub fn new(u: SpectralField, z: SpectralField, alpha: f64, t: f64) -> Result<Self> {
        let grid = *u.grid();
        if u.components() != grid.dim() {
            return Err(Error::ComponentMismatch {
                expected: format!("velocity with {} components", grid.dim()),
                found: u.components(),
            });
        }
        if z.components() != 1 {
            return Err(Error::ComponentMismatch {
                expected: "scalar reactant".into(),
                found: z.components(),
            });
        }
        if *z.grid() != grid {
            return Err(Error::GridMismatch("u and Z live on different grids".into()));
        }
        let v = ops::helmholtz(&u, alpha, HelmholtzDirection::Invert)?;
        Ok(ModelState { u, v, z, alpha, t })
    }

    pub fn zeros(grid: Grid, alpha: f64) -> Self {
        ModelState::new(
            SpectralField::zeros(grid, grid.dim()),
            SpectralField::zeros(grid, 1),
            alpha,
            0.0,
        )
        .expect("zero state is valid")
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    pub fn u(&self) -> &SpectralField {
        &self.u
    }

    pub fn v(&self) -> &SpectralField {
        &self.v
    }

    pub fn z(&self) -> &SpectralField {
        &self.z
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Max of `|∇·u|` over the grid.
    pub fn max_divergence(&self) -> f64 {
        ops::divergence(&self.u)
            .map(|d| d.inverse().max_abs())
            .unwrap_or(0.0)
    }

    /// Snapshot with components `u, v, Z` stacked in that order.
    pub fn to_snapshot(&self) -> Snapshot {
        let u = self.u.inverse();
        let v = self.v.inverse();
        let z = self.z.inverse();
        let field = PhysicalField::stack(&[&u, &v, &z]).expect("state fields share a grid");
        Snapshot::new(field, self.t)
            .with_param("alpha", format!("{:?}", self.alpha))
            .with_param("fields", "u,v,Z")
    }

    /// Rebuild a state from a `u, v, Z` snapshot (or a `u, Z` one with α given).
    pub fn from_snapshot(snap: &Snapshot) -> Result<Self> {
        let grid = *snap.field.grid();
        let dim = grid.dim();
        let alpha = snap.param_f64("alpha").unwrap_or(0.0);
        let comps = snap.field.components();
        let (u, z) = if comps == 2 * dim + 1 {
            let u: Vec<PhysicalField> = (0..dim).map(|c| snap.field.extract(c)).collect();
            let u = PhysicalField::stack(&u.iter().collect::<Vec<_>>())?;
            (u, snap.field.extract(2 * dim))
        } else if comps == dim + 1 {
            let u: Vec<PhysicalField> = (0..dim).map(|c| snap.field.extract(c)).collect();
            let u = PhysicalField::stack(&u.iter().collect::<Vec<_>>())?;
            (u, snap.field.extract(dim))
        } else if comps == dim {
            (snap.field.clone(), PhysicalField::zeros(grid, 1))
        } else {
            return Err(Error::ComponentMismatch {
                expected: format!("{} (u,v,Z), {} (u,Z) or {} (u) components", 2 * dim + 1, dim + 1, dim),
                found: comps,
            });
        };
        ModelState::new(u.transform()?, z.transform()?, alpha, snap.time)
    }

    /// Replace the evolved fields, keeping α.
    pub fn with_fields(&self, u: SpectralField, z: SpectralField, t: f64) -> Result<Self> {
        ModelState::new(u, z, self.alpha, t)
    }
}
