use num_complex::Complex64;

use super::{fft, Grid};
use crate::{Error, Result};

/// Real samples of a scalar or vector field, component-major, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    components: usize,
    data: Vec<f64>,
}

/// Fourier-series coefficients of a scalar or vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    data: Vec<Complex64>,
}

impl PhysicalField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        PhysicalField {
            grid,
            components,
            data: vec![0.0; components * grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, components: usize, data: Vec<f64>) -> Result<Self> {
        if components == 0 || data.len() != components * grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} samples for {} components on {} points",
                data.len(),
                components,
                grid.len()
            )));
        }
        Ok(PhysicalField { grid, components, data })
    }

    /// Samples `f(x)` for each component at every grid point.
    pub fn from_fn(grid: Grid, components: usize, f: impl Fn([f64; 3]) -> Vec<f64>) -> Self {
        let len = grid.len();
        let mut data = vec![0.0; components * len];
        for i in 0..len {
            let vals = f(grid.point(i));
            for (c, v) in vals.into_iter().take(components).enumerate() {
                data[c * len + i] = v;
            }
        }
        PhysicalField { grid, components, data }
    }

    pub fn scalar_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        Self::from_fn(grid, 1, |x| vec![f(x)])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let len = self.grid.len();
        &mut self.data[c * len..(c + 1) * len]
    }

    /// Single component as a scalar field.
    pub fn extract(&self, c: usize) -> PhysicalField {
        PhysicalField {
            grid: self.grid,
            components: 1,
            data: self.component(c).to_vec(),
        }
    }

    /// Stack fields on one grid into a multi-component field.
    pub fn stack(parts: &[&PhysicalField]) -> Result<PhysicalField> {
        let grid = *parts
            .first()
            .ok_or_else(|| Error::GridMismatch("nothing to stack".into()))?
            .grid();
        let mut data = Vec::new();
        let mut components = 0;
        for p in parts {
            if *p.grid() != grid {
                return Err(Error::GridMismatch("stacked fields differ in grid".into()));
            }
            data.extend_from_slice(&p.data);
            components += p.components;
        }
        Ok(PhysicalField { grid, components, data })
    }

    /// `∫ Σ_c f_c² dx` by the trapezoidal rule.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.cell_volume() * self.data.iter().map(|v| v * v).sum::<f64>()
    }

    /// Domain integral of each component.
    pub fn integral(&self, c: usize) -> f64 {
        self.grid.cell_volume() * self.component(c).iter().sum::<f64>()
    }

    pub fn mean(&self, c: usize) -> f64 {
        self.component(c).iter().sum::<f64>() / self.grid.len() as f64
    }

    /// Pointwise Euclidean magnitude across components.
    pub fn magnitude(&self) -> Vec<f64> {
        let len = self.grid.len();
        (0..len)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.data[c * len + i].powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Scale every sample in place.
    pub fn scale(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    /// Forward transform to Fourier-series coefficients.
    pub fn transform(&self) -> Result<SpectralField> {
        self.check_finite()?;
        let len = self.grid.len();
        let mut data = Vec::with_capacity(self.data.len());
        let mut c = 0;
        while c < self.components {
            if c + 1 < self.components {
                let (a, b) = fft::forward_real_pair(&self.grid, self.component(c), self.component(c + 1));
                data.extend(a);
                data.extend(b);
                c += 2;
            } else {
                data.extend(fft::forward_real(&self.grid, self.component(c)));
                c += 1;
            }
        }
        debug_assert_eq!(data.len(), self.components * len);
        Ok(SpectralField {
            grid: self.grid,
            components: self.components,
            data,
        })
    }
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        SpectralField {
            grid,
            components,
            data: vec![Complex64::default(); components * grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, components: usize, data: Vec<Complex64>) -> Result<Self> {
        if components == 0 || data.len() != components * grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for {} components on {} modes",
                data.len(),
                components,
                grid.len()
            )));
        }
        Ok(SpectralField { grid, components, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.len();
        &self.data[c * len..(c + 1) * len]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let len = self.grid.len();
        &mut self.data[c * len..(c + 1) * len]
    }

    pub fn extract(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: 1,
            data: self.component(c).to_vec(),
        }
    }

    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let grid = *parts
            .first()
            .ok_or_else(|| Error::GridMismatch("nothing to stack".into()))?
            .grid();
        let mut data = Vec::new();
        let mut components = 0;
        for p in parts {
            if *p.grid() != grid {
                return Err(Error::GridMismatch("stacked fields differ in grid".into()));
            }
            data.extend_from_slice(&p.data);
            components += p.components;
        }
        Ok(SpectralField { grid, components, data })
    }

    /// Coefficient at integer mode `k` of component `c` (zero off-lattice).
    pub fn coefficient(&self, c: usize, k: [i64; 3]) -> Complex64 {
        self.grid
            .mode_index(k)
            .map(|i| self.component(c)[i])
            .unwrap_or_default()
    }

    /// Inverse transform. Input is assumed Hermitian; components are
    /// synthesized in pairs, so any anti-Hermitian residue is not preserved.
    pub fn inverse(&self) -> PhysicalField {
        let mut data = Vec::with_capacity(self.data.len());
        let mut c = 0;
        while c < self.components {
            if c + 1 < self.components {
                let (a, b) = fft::inverse_real_pair(&self.grid, self.component(c), self.component(c + 1));
                data.extend(a);
                data.extend(b);
                c += 2;
            } else {
                data.extend(fft::inverse_real(&self.grid, self.component(c)));
                c += 1;
            }
        }
        PhysicalField {
            grid: self.grid,
            components: self.components,
            data,
        }
    }

    /// `(2π)^dim Σ_k |f̂_k|²` summed over components.
    pub fn parseval_energy(&self) -> f64 {
        self.grid.volume() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Discrete L² inner product `∫ f·g dx` of real fields via Parseval.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        self.grid.volume()
            * self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
    }

    /// Largest deviation from `f̂_{−k} = conj(f̂_k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let len = self.grid.len();
        let sym = self.grid.symbols();
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let comp = &self.data[c * len..(c + 1) * len];
            for (i, z) in comp.iter().enumerate() {
                let j = sym.conj[i];
                worst = worst.max((z - comp[j].conj()).norm());
            }
        }
        worst
    }

    /// Replace the coefficients by their Hermitian-symmetric part.
    pub fn symmetrize(&mut self) {
        let len = self.grid.len();
        let sym = self.grid.symbols();
        for c in 0..self.components {
            let comp = &mut self.data[c * len..(c + 1) * len];
            let orig = comp.to_vec();
            for (i, z) in comp.iter_mut().enumerate() {
                let j = sym.conj[i];
                *z = 0.5 * (orig[i] + orig[j].conj());
            }
        }
    }

    /// Multiply every component coefficient-wise by a real symbol of the mode index.
    pub fn map_symbol(&self, symbol: impl Fn(usize) -> f64) -> SpectralField {
        let len = self.grid.len();
        let sym: Vec<f64> = (0..len).map(symbol).collect();
        let mut out = self.clone();
        for c in 0..self.components {
            for (z, s) in out.component_mut(c).iter_mut().zip(&sym) {
                *z *= *s;
            }
        }
        out
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, comps: usize, seed: u64) -> PhysicalField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..comps * grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        PhysicalField::from_vec(grid, comps, data).unwrap()
    }

    #[test]
    fn cosine_has_two_half_coefficients() {
        let g = Grid::new(3, 8).unwrap();
        let f = PhysicalField::scalar_fn(g, |x| x[0].cos()).transform().unwrap();
        for i in 0..g.len() {
            let k = g.mode(i);
            let z = f.component(0)[i];
            if k == [1, 0, 0] || k == [-1, 0, 0] {
                assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
            } else {
                assert!(z.norm() < 1e-15, "mode {k:?} = {z}");
            }
        }
    }

    #[test]
    fn constant_maps_to_mean_mode() {
        let g = Grid::new(3, 8).unwrap();
        let f = PhysicalField::scalar_fn(g, |_| 1.0).transform().unwrap();
        assert!((f.component(0)[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(f.component(0)[1..].iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn round_trip_is_identity() {
        let g = Grid::new(3, 8).unwrap();
        let f = random_field(g, 3, 7);
        let back = f.transform().unwrap().inverse();
        let scale = f.max_abs();
        for (a, b) in f.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval_matches_quadrature() {
        for dim in [1, 3] {
            let g = Grid::new(dim, 16).unwrap();
            let f = random_field(g, 2, 11);
            let s = f.transform().unwrap();
            assert!(s.hermitian_defect() < 1e-14);
            let q = f.l2_norm_sq();
            assert!((s.parseval_energy() - q).abs() <= 1e-12 * q);
        }
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = Grid::new(1, 8).unwrap();
        let mut f = PhysicalField::zeros(g, 1);
        f.data_mut()[3] = f64::NAN;
        assert!(matches!(f.transform(), Err(Error::NonFinite { index: 3 })));
    }
}
