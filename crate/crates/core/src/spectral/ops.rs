//! Fourier multipliers and resampling on the periodic torus.

use std::collections::HashMap;

use num_complex::Complex64;

use super::{Grid, Mollifier, PhysicalField, SpectralField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivative {
    Gradient,
    Divergence,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HelmholtzDirection {
    /// Multiply by `1 + α²|k|²`, i.e. apply `1 − α²Δ`.
    Apply,
    /// Divide by `1 + α²|k|²`.
    Invert,
}

fn require_vector(f: &SpectralField) -> Result<()> {
    let dim = f.grid().dim();
    if f.components() != dim {
        return Err(Error::ComponentMismatch {
            expected: format!("vector field with {dim} components"),
            found: f.components(),
        });
    }
    Ok(())
}

fn require_scalar(f: &SpectralField) -> Result<()> {
    if f.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: "scalar field".into(),
            found: f.components(),
        });
    }
    Ok(())
}

pub fn derivative(f: &SpectralField, kind: Derivative) -> Result<SpectralField> {
    match kind {
        Derivative::Gradient => gradient(f),
        Derivative::Divergence => divergence(f),
        Derivative::Laplacian => Ok(laplacian(f)),
    }
}

/// `∂_axis` of every component.
pub fn partial(f: &SpectralField, axis: usize) -> SpectralField {
    let sym = f.grid().symbols();
    let kd = &sym.kd[axis];
    let mut out = f.clone();
    for c in 0..f.components() {
        for (z, &k) in out.component_mut(c).iter_mut().zip(kd) {
            *z = Complex64::new(-k * z.im, k * z.re);
        }
    }
    out
}

/// Gradient of a scalar field.
pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    require_scalar(f)?;
    let parts: Vec<SpectralField> = (0..f.grid().dim()).map(|a| partial(f, a)).collect();
    SpectralField::stack(&parts.iter().collect::<Vec<_>>())
}

/// Jacobian of a vector field, components ordered `∂_j f_i` at index `i·dim + j`.
pub fn jacobian(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f)?;
    let dim = f.grid().dim();
    let mut parts = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        let fi = f.extract(i);
        for j in 0..dim {
            parts.push(partial(&fi, j));
        }
    }
    SpectralField::stack(&parts.iter().collect::<Vec<_>>())
}

pub fn divergence(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f)?;
    let grid = *f.grid();
    let sym = grid.symbols();
    let mut out = SpectralField::zeros(grid, 1);
    for a in 0..grid.dim() {
        let comp = f.component(a);
        for ((z, w), &k) in out.component_mut(0).iter_mut().zip(comp).zip(&sym.kd[a]) {
            *z += Complex64::new(-k * w.im, k * w.re);
        }
    }
    Ok(out)
}

pub fn laplacian(f: &SpectralField) -> SpectralField {
    let sym = f.grid().symbols();
    f.map_symbol(|i| -sym.k2[i])
}

/// Projection onto divergence-free fields, `(I − kk/|k|²)` per mode.
///
/// Uses the same wavenumbers as the first-derivative multipliers, so the
/// spectral divergence of the result vanishes identically.
pub fn leray_project(f: &SpectralField) -> Result<SpectralField> {
    require_vector(f)?;
    let grid = *f.grid();
    let dim = grid.dim();
    let mut out = f.clone();
    let len = grid.len();
    let sym = grid.symbols();
    for i in 0..len {
        let k = [sym.kd[0][i], sym.kd[1][i], sym.kd[2][i]];
        let k2: f64 = k.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::default();
        for a in 0..dim {
            dot += f.component(a)[i] * k[a];
        }
        for a in 0..dim {
            out.component_mut(a)[i] -= dot * (k[a] / k2);
        }
    }
    Ok(out)
}

/// Helmholtz filter `1 − α²Δ` or its inverse.
pub fn helmholtz(f: &SpectralField, alpha: f64, direction: HelmholtzDirection) -> Result<SpectralField> {
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", format!("must be nonnegative, got {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(f.clone());
    }
    let sym = f.grid().symbols();
    let a2 = alpha * alpha;
    Ok(match direction {
        HelmholtzDirection::Apply => f.map_symbol(|i| 1.0 + a2 * sym.k2[i]),
        HelmholtzDirection::Invert => f.map_symbol(|i| 1.0 / (1.0 + a2 * sym.k2[i])),
    })
}

/// Sharp truncation keeping modes with `|k| ≤ κ`.
pub fn lowpass_sharp(f: &SpectralField, kappa: f64) -> Result<SpectralField> {
    if !(kappa > 0.0) {
        return Err(Error::param("kappa", format!("must be positive, got {kappa}")));
    }
    let sym = f.grid().symbols();
    let k2max = kappa * kappa;
    Ok(f.map_symbol(|i| if sym.k2[i] <= k2max { 1.0 } else { 0.0 }))
}

/// Convolution with the mollifier: multiplies each mode by the kernel transform.
pub fn mollify(f: &SpectralField, moll: &Mollifier) -> Result<SpectralField> {
    let grid = *f.grid();
    if moll.dim() != grid.dim() {
        return Err(Error::GridMismatch(format!(
            "mollifier is {}-dimensional, field is {}-dimensional",
            moll.dim(),
            grid.dim()
        )));
    }
    let sym = grid.symbols();
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let symbol: Vec<f64> = (0..grid.len())
        .map(|i| {
            let k2 = sym.k2[i];
            *cache
                .entry(k2 as u64)
                .or_insert_with(|| moll.transform(k2.sqrt()))
        })
        .collect();
    Ok(f.map_symbol(|i| symbol[i]))
}

/// Per-axis phase factors `e^{i k ξ}`; Nyquist slots use `cos(n/2·ξ)` so the
/// shifted field of real data stays real.
fn shift_phases(grid: &Grid, xi: f64) -> Vec<Complex64> {
    let n = grid.n();
    (0..n)
        .map(|i| {
            let k = grid.wavenumber(i) as f64;
            if grid.is_nyquist(i) {
                Complex64::new((k * xi).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, k * xi)
            }
        })
        .collect()
}

/// Translation `f(· + ξ)`, exact for band-limited fields.
pub fn shift(f: &SpectralField, xi: &[f64]) -> SpectralField {
    let grid = *f.grid();
    let dim = grid.dim();
    let phases: Vec<Vec<Complex64>> = (0..dim).map(|a| shift_phases(&grid, xi.get(a).copied().unwrap_or(0.0))).collect();
    let len = grid.len();
    let mut factor = vec![Complex64::new(1.0, 0.0); len];
    for (i, fac) in factor.iter_mut().enumerate() {
        let c = grid.coords(i);
        for a in 0..dim {
            *fac *= phases[a][c[a]];
        }
    }
    let mut out = f.clone();
    for comp in 0..f.components() {
        for (z, s) in out.component_mut(comp).iter_mut().zip(&factor) {
            *z *= s;
        }
    }
    out
}

/// Two-thirds rule: zero every mode with `3|k_i| ≥ n` on some axis.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let sym = f.grid().symbols();
    let mut out = f.clone();
    for c in 0..f.components() {
        for (z, &keep) in out.component_mut(c).iter_mut().zip(&sym.keep) {
            if !keep {
                *z = Complex64::default();
            }
        }
    }
    out
}

/// Embed coefficients into a grid refined by `factor`. A Nyquist coefficient
/// is split evenly between `±n/2` so real fields keep their samples.
pub fn refine(f: &SpectralField, factor: usize) -> Result<SpectralField> {
    let grid = *f.grid();
    if factor == 1 {
        return Ok(f.clone());
    }
    let fine = grid.refined(factor)?;
    let dim = grid.dim();
    let half = (grid.n() / 2) as i64;
    let mut out = SpectralField::zeros(fine, f.components());
    for i in 0..grid.len() {
        let k = grid.mode(i);
        let nyq: Vec<usize> = (0..dim).filter(|&a| k[a] == half).collect();
        let copies = 1usize << nyq.len();
        let w = 1.0 / copies as f64;
        for mask in 0..copies {
            let mut kk = k;
            for (bit, &a) in nyq.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    kk[a] = -half;
                }
            }
            let j = fine.mode_index(kk).expect("refined lattice contains the coarse one");
            for c in 0..f.components() {
                out.component_mut(c)[j] += f.component(c)[i] * w;
            }
        }
    }
    Ok(out)
}

/// Keep only modes representable on `coarse`, folding `−n/2` into the Nyquist slot.
pub fn coarsen(f: &SpectralField, coarse: Grid) -> Result<SpectralField> {
    let fine = *f.grid();
    if fine.dim() != coarse.dim() || !fine.n().is_multiple_of(coarse.n()) {
        return Err(Error::GridMismatch("target grid does not divide the source grid".into()));
    }
    let half = (coarse.n() / 2) as i64;
    let mut out = SpectralField::zeros(coarse, f.components());
    for i in 0..fine.len() {
        let mut k = fine.mode(i);
        if k.iter().any(|&ka| ka.abs() > half) {
            continue;
        }
        for ka in k.iter_mut() {
            if *ka == -half {
                *ka = half;
            }
        }
        let j = coarse.mode_index(k).expect("mode inside coarse lattice");
        for c in 0..f.components() {
            out.component_mut(c)[j] += f.component(c)[i];
        }
    }
    Ok(out)
}

/// Samples of `f` on the grid refined by `factor`.
pub fn fine_samples(f: &SpectralField, factor: usize) -> Result<PhysicalField> {
    Ok(refine(f, factor)?.inverse())
}

/// Restrict fine-grid samples to the coarse points they contain.
pub fn subsample(f: &PhysicalField, factor: usize) -> Result<PhysicalField> {
    let fine = *f.grid();
    if !fine.n().is_multiple_of(factor) {
        return Err(Error::GridMismatch("factor does not divide the grid".into()));
    }
    let coarse = Grid::new(fine.dim(), fine.n() / factor)?;
    let mut out = PhysicalField::zeros(coarse, f.components());
    for c in 0..f.components() {
        let src = f.component(c);
        for (i, v) in out.component_mut(c).iter_mut().enumerate() {
            let cc = coarse.coords(i);
            let mut fc = [0usize; 3];
            for a in 0..coarse.dim() {
                fc[a] = cc[a] * factor;
            }
            *v = src[fine.flat(fc)];
        }
    }
    Ok(out)
}
