use rayon::prelude::*;

use crate::fit::{loglog_fit, LogLogFit};
use crate::spectral::ops;
use crate::spectral::{PhysicalField, SpectralField};
use crate::{Error, Result};

/// Zero padding used for the cubic flux contraction.
pub const FLUX_PADDING: usize = 2;

/// `π_κ = (P(u⊗u) − Pu⊗Pu) : ∇Pu` with `P` the sharp cutoff at `κ`, sampled on
/// the grid refined by [`FLUX_PADDING`].
pub fn flux_density(u: &SpectralField, kappa: f64) -> Result<PhysicalField> {
    flux_density_padded(u, kappa, FLUX_PADDING)
}

/// [`flux_density`] with an explicit padding factor (at least 2).
pub fn flux_density_padded(u: &SpectralField, kappa: f64, padding: usize) -> Result<PhysicalField> {
    let grid = *u.grid();
    let dim = grid.dim();
    if u.components() != dim {
        return Err(Error::ComponentMismatch {
            expected: format!("a vector field with {dim} components"),
            found: u.components(),
        });
    }
    if padding < 2 {
        return Err(Error::param("padding", "must be at least 2"));
    }
    let pu = ops::lowpass_sharp(u, kappa)?;
    let uf = ops::fine_samples(u, padding)?;
    let puf = ops::fine_samples(&pu, padding)?;
    let grad = ops::fine_samples(&ops::jacobian(&pu)?, padding)?;
    let fine = *uf.grid();

    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let mut products = PhysicalField::zeros(fine, pairs.len());
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let (a, b) = (uf.component(i), uf.component(j));
        for (o, (x, y)) in products.component_mut(c).iter_mut().zip(a.iter().zip(b)) {
            *o = x * y;
        }
    }
    let filtered = ops::lowpass_sharp(&products.transform()?, kappa)?.inverse();

    let mut pi = PhysicalField::zeros(fine, 1);
    let out = pi.component_mut(0);
    for (c, &(i, j)) in pairs.iter().enumerate() {
        let tau = filtered.component(c);
        let (pi_, pj) = (puf.component(i), puf.component(j));
        // Symmetric stress contracts with the symmetric part of the gradient.
        let gij = grad.component(i * dim + j);
        let gji = grad.component(j * dim + i);
        let w = if i == j { 1.0 } else { 2.0 };
        for x in 0..out.len() {
            let s = tau[x] - pi_[x] * pj[x];
            out[x] += w * s * 0.5 * (gij[x] + gji[x]);
        }
    }
    Ok(pi)
}

/// Spectral flux across each cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxReport {
    pub kappas: Vec<f64>,
    /// `Π_κ = ∫π_κ dx`.
    pub pi: Vec<f64>,
    /// Densities, kept only on request.
    pub pi_fields: Vec<PhysicalField>,
    /// Slope of `log|Π_κ|` against `log κ` over the requested window.
    pub fit: Option<LogLogFit>,
}

impl FluxReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,Pi\n");
        for (k, p) in self.kappas.iter().zip(&self.pi) {
            out.push_str(&format!("{k:?},{p:?}\n"));
        }
        out
    }
}

/// `Π_κ` for an increasing list of cutoffs. With `fit_window = Some((lo, hi))`
/// the log-log slope is fitted over `lo ≤ κ ≤ hi`.
pub fn flux_spectrum(
    u: &SpectralField,
    kappas: &[f64],
    fit_window: Option<(f64, f64)>,
    keep_fields: bool,
) -> Result<FluxReport> {
    if kappas.is_empty() {
        return Err(Error::param("kappas", "list is empty"));
    }
    if kappas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("kappas", "must be strictly increasing"));
    }
    let densities: Vec<PhysicalField> = kappas
        .par_iter()
        .map(|&k| flux_density(u, k))
        .collect::<Result<_>>()?;
    let pi: Vec<f64> = densities.iter().map(|d| d.integral(0)).collect();
    let fit = match fit_window {
        Some((lo, hi)) => {
            let (x, y): (Vec<f64>, Vec<f64>) = kappas
                .iter()
                .zip(&pi)
                .filter(|(k, _)| **k >= lo && **k <= hi)
                .map(|(k, p)| (*k, p.abs()))
                .unzip();
            Some(loglog_fit(&x, &y)?)
        }
        None => None,
    };
    Ok(FluxReport {
        kappas: kappas.to_vec(),
        pi,
        pi_fields: if keep_fields { densities } else { Vec::new() },
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn constant_and_single_mode_fields_carry_no_flux() {
        let g = Grid::new(3, 16).unwrap();
        let c = PhysicalField::from_fn(g, 3, |_| vec![1.0, -2.0, 0.5]).transform().unwrap();
        assert!(flux_density(&c, 1.5).unwrap().max_abs() < 1e-14);
        let s = PhysicalField::from_fn(g, 3, |x| vec![0.0, x[0].sin(), 0.0]).transform().unwrap();
        let r = flux_spectrum(&s, &[0.5, 1.0, 2.0, 5.0], None, false).unwrap();
        assert!(r.pi.iter().all(|p| p.abs() < 1e-13), "{:?}", r.pi);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid::new(3, 8).unwrap();
        let s = SpectralField::zeros(g, 1);
        assert!(flux_density(&s, 1.0).is_err());
        let v = SpectralField::zeros(g, 3);
        assert!(flux_spectrum(&v, &[], None, false).is_err());
        assert!(flux_spectrum(&v, &[2.0, 1.0], None, false).is_err());
    }
}
