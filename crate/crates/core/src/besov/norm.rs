use crate::fit::{loglog_fit, LogLogFit};
use crate::spectral::{PhysicalField, SpectralField};
use crate::{Error, Result};

use super::partition::{lp_block, DyadicPartition};
use super::structure::{RegularityFit, StructureCurve};

/// `‖f‖_{L^p}` by equal-weight quadrature, with `|f|` the pointwise Euclidean
/// norm over components. `p = ∞` gives the maximum.
pub fn lp_norm(f: &PhysicalField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param("p", format!("must lie in [1, ∞], got {p}")));
    }
    let mags = f.magnitude();
    if p.is_infinite() {
        return Ok(mags.iter().copied().fold(0.0, f64::max));
    }
    let h = f.grid().cell_volume();
    Ok((h * mags.iter().map(|m| m.powf(p)).sum::<f64>()).powf(1.0 / p))
}

/// Block norms, Besov norm and optional regularity fits of one field.
#[derive(Debug, Clone, PartialEq)]
pub struct BesovReport {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    /// `(j, ‖Δ_j u‖_{L^p})` for `j = −1, …, j_max`.
    pub block_norms: Vec<(i32, f64)>,
    pub norm: f64,
    pub structure: Option<StructureCurve>,
    pub regularity: Option<RegularityFit>,
}

/// `(Σ_j (2^{js}‖Δ_j u‖_p)^q)^{1/q}`, or `sup_j 2^{js}‖Δ_j u‖_p` for `q = ∞`.
pub fn besov_formula(block_norms: &[(i32, f64)], s: f64, q: f64) -> f64 {
    let weighted = block_norms.iter().map(|&(j, b)| 2f64.powf(j as f64 * s) * b);
    if q.is_infinite() {
        weighted.fold(0.0, f64::max)
    } else {
        weighted.map(|w| w.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

impl BesovReport {
    pub fn recompute_norm(&self) -> f64 {
        besov_formula(&self.block_norms, self.s, self.q)
    }

    /// Decay exponent `s*` of `‖Δ_j u‖_p ~ 2^{−j s*}` fitted over `j_lo ≤ j ≤ j_hi`.
    pub fn block_exponent(&self, j_lo: i32, j_hi: i32) -> Result<LogLogFit> {
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .block_norms
            .iter()
            .filter(|(j, _)| *j >= j_lo.max(0) && *j <= j_hi)
            .map(|&(j, b)| (2f64.powi(j), b))
            .unzip();
        let mut fit = loglog_fit(&x, &y)?;
        fit.slope = -fit.slope;
        Ok(fit)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("j,block_norm\n");
        for (j, b) in &self.block_norms {
            out.push_str(&format!("{j},{b:?}\n"));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let (e, se) = self
            .regularity
            .map(|r| (format!("{:?}", r.exponent), format!("{:?}", r.stderr)))
            .unwrap_or_default();
        format!(
            "s,p,q,norm,exponent,stderr\n{:?},{},{},{:?},{e},{se}\n",
            self.s,
            fmt_index(self.p),
            fmt_index(self.q),
            self.norm
        )
    }
}

fn fmt_index(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v:?}")
    }
}

/// Inhomogeneous Besov norm `‖u‖_{B^s_{p,q}}` over the blocks of `partition`.
pub fn besov_norm(u: &SpectralField, s: f64, p: f64, q: f64, partition: &DyadicPartition) -> Result<BesovReport> {
    if !(q >= 1.0) {
        return Err(Error::param("q", format!("must lie in [1, ∞], got {q}")));
    }
    if !s.is_finite() {
        return Err(Error::param("s", "must be finite"));
    }
    let block_norms = partition
        .indices()
        .map(|j| Ok((j, lp_norm(&lp_block(u, j, partition)?.inverse(), p)?)))
        .collect::<Result<Vec<_>>>()?;
    let norm = besov_formula(&block_norms, s, q);
    Ok(BesovReport {
        s,
        p,
        q,
        block_norms,
        norm,
        structure: None,
        regularity: None,
    })
}
