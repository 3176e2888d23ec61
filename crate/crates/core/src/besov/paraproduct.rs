use crate::spectral::ops;
use crate::spectral::{PhysicalField, SpectralField};
use crate::{Error, Result};

use super::partition::{lp_blocks, DyadicPartition};

/// Bony decomposition `uv = T_u v + T_v u + R(u, v)`, sampled on the twice
/// refined grid where the products are alias-free.
#[derive(Debug, Clone, PartialEq)]
pub struct Paraproduct {
    /// `Σ_j S_{j−1}u Δ_j v`.
    pub t_uv: PhysicalField,
    /// `Σ_j S_{j−1}v Δ_j u`.
    pub t_vu: PhysicalField,
    /// `Σ_{|j−j'|≤1} Δ_j u Δ_{j'} v`.
    pub remainder: PhysicalField,
    /// Pointwise `uv` on the same grid.
    pub product: PhysicalField,
}

impl Paraproduct {
    /// `max |T_u v + T_v u + R − uv|`.
    pub fn reconstruction_error(&self) -> f64 {
        let (a, b, r, p) = (
            self.t_uv.data(),
            self.t_vu.data(),
            self.remainder.data(),
            self.product.data(),
        );
        (0..p.len()).map(|x| (a[x] + b[x] + r[x] - p[x]).abs()).fold(0.0, f64::max)
    }
}

fn block_samples(f: &SpectralField, partition: &DyadicPartition) -> Result<Vec<Vec<f64>>> {
    lp_blocks(f, partition)?
        .iter()
        .map(|b| Ok(ops::fine_samples(b, 2)?.into_data()))
        .collect()
}

/// `Σ_j S_{j−1}a Δ_j b` with `S_{j−1} = Σ_{k ≤ j−2} Δ_k`; blocks are indexed from −1.
fn low_high(a: &[Vec<f64>], b: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let mut low = vec![0.0; len];
    // Block index j sits at position j + 1; S_{j−1} collects positions ≤ j − 1.
    for pos in 0..b.len() {
        if pos >= 2 {
            for (l, v) in low.iter_mut().zip(&a[pos - 2]) {
                *l += v;
            }
        }
        for x in 0..len {
            out[x] += low[x] * b[pos][x];
        }
    }
    out
}

pub fn paraproduct(u: &SpectralField, v: &SpectralField, partition: &DyadicPartition) -> Result<Paraproduct> {
    if u.components() != 1 || v.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: "scalar fields (apply componentwise)".into(),
            found: u.components().max(v.components()),
        });
    }
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch("paraproduct factors live on different grids".into()));
    }
    let bu = block_samples(u, partition)?;
    let bv = block_samples(v, partition)?;
    let fine = u.grid().refined(2)?;
    let len = fine.len();
    let t_uv = low_high(&bu, &bv, len);
    let t_vu = low_high(&bv, &bu, len);
    let mut rem = vec![0.0; len];
    let m = bu.len();
    for pos in 0..m {
        for other in pos.saturating_sub(1)..(pos + 2).min(m) {
            for x in 0..len {
                rem[x] += bu[pos][x] * bv[other][x];
            }
        }
    }
    let uf = ops::fine_samples(u, 2)?;
    let vf = ops::fine_samples(v, 2)?;
    let prod: Vec<f64> = uf.data().iter().zip(vf.data()).map(|(a, b)| a * b).collect();
    Ok(Paraproduct {
        t_uv: PhysicalField::from_vec(fine, 1, t_uv)?,
        t_vu: PhysicalField::from_vec(fine, 1, t_vu)?,
        remainder: PhysicalField::from_vec(fine, 1, rem)?,
        product: PhysicalField::from_vec(fine, 1, prod)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn constant_factor_has_no_low_high_part() {
        let g = Grid::new(3, 16).unwrap();
        let p = DyadicPartition::new(g);
        let u = PhysicalField::scalar_fn(g, |x| x[0].sin() * (3.0 * x[2]).cos()).transform().unwrap();
        let c = PhysicalField::scalar_fn(g, |_| 2.5).transform().unwrap();
        let d = paraproduct(&u, &c, &p).unwrap();
        assert!(d.t_uv.max_abs() < 1e-14);
        assert!(d.reconstruction_error() < 1e-13);
        let single = PhysicalField::scalar_fn(g, |x| (2.0 * x[1]).cos()).transform().unwrap();
        assert!(paraproduct(&single, &single, &p).unwrap().reconstruction_error() <= 1e-12);
        assert!(paraproduct(&SpectralField::zeros(g, 3), &c, &p).is_err());
    }
}
