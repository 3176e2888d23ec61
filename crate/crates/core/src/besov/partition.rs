use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Inner radius of the low-pass template: `χ = 1` on `|ξ| ≤ 3/4`.
pub const INNER: f64 = 0.75;
/// Outer radius of the low-pass template: `χ = 0` on `|ξ| ≥ 4/3`.
pub const OUTER: f64 = 4.0 / 3.0;

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth radial step from 1 (at `INNER`) to 0 (at `OUTER`).
pub fn low_pass_profile(r: f64) -> f64 {
    let s = (r - INNER) / (OUTER - INNER);
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let (a, b) = (psi(1.0 - s), psi(s));
    a / (a + b)
}

/// Profile of block `j` at modulus `r`: `χ(r)` for `j = −1`, otherwise
/// `φ(2^{−j}r)` with `φ(ξ) = χ(ξ/2) − χ(ξ)`.
pub fn block_profile(j: i32, r: f64) -> f64 {
    if j < 0 {
        return low_pass_profile(r);
    }
    let x = r / 2f64.powi(j);
    low_pass_profile(x / 2.0) - low_pass_profile(x)
}

/// Littlewood–Paley blocks `j = −1, …, j_max` covering a grid's lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicPartition {
    grid: Grid,
    j_max: i32,
}

impl DyadicPartition {
    /// `j_max` is the smallest block index whose low-pass sum covers every lattice mode.
    pub fn new(grid: Grid) -> Self {
        let kmax = grid.max_modulus();
        let mut j = 0;
        while INNER * 2f64.powi(j + 1) < kmax {
            j += 1;
        }
        DyadicPartition { grid, j_max: j }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_max
    }

    /// Largest `|χ + Σ_j φ_j − 1|` over the lattice.
    pub fn unity_residual(&self) -> f64 {
        let sym = self.grid.symbols();
        sym.k2
            .iter()
            .map(|k2| {
                let r = k2.sqrt();
                let total: f64 = self.indices().map(|j| block_profile(j, r)).sum();
                (total - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `Δ_j u`, with `j = −1` the low-frequency part `S₀u`.
pub fn lp_block(u: &SpectralField, j: i32, partition: &DyadicPartition) -> Result<SpectralField> {
    if j < -1 {
        return Err(Error::param("j", format!("block index must be >= -1, got {j}")));
    }
    if u.grid() != partition.grid() {
        return Err(Error::GridMismatch("partition built for a different grid".into()));
    }
    let sym = u.grid().symbols();
    Ok(u.map_symbol(|i| block_profile(j, sym.k2[i].sqrt())))
}

/// Every block of `u`, indexed from `j = −1`.
pub fn lp_blocks(u: &SpectralField, partition: &DyadicPartition) -> Result<Vec<SpectralField>> {
    partition.indices().map(|j| lp_block(u, j, partition)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_is_a_smooth_step() {
        assert_eq!(low_pass_profile(0.0), 1.0);
        assert_eq!(low_pass_profile(0.75), 1.0);
        assert_eq!(low_pass_profile(4.0 / 3.0), 0.0);
        let mid = 0.5 * (INNER + OUTER);
        assert!((low_pass_profile(mid) - 0.5).abs() < 1e-15);
        let mut last = 1.0;
        for i in 0..200 {
            let v = low_pass_profile(0.7 + i as f64 * 0.004);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn blocks_live_in_dyadic_annuli_and_overlap_only_neighbours() {
        for j in 0..6 {
            let s = 2f64.powi(j);
            assert_eq!(block_profile(j, 0.74 * s), 0.0);
            assert_eq!(block_profile(j, 2.67 * s), 0.0);
            for r in [0.5, 1.0, 2.0, 3.0, 5.0, 9.0, 17.0, 40.0] {
                assert_eq!(block_profile(j, r) * block_profile(j + 2, r), 0.0);
            }
        }
    }

    #[test]
    fn partition_sums_to_one_on_the_lattice() {
        for (dim, n) in [(1, 64), (3, 16), (3, 32)] {
            let p = DyadicPartition::new(Grid::new(dim, n).unwrap());
            assert!(p.unity_residual() <= 1e-12);
        }
        let p = DyadicPartition::new(Grid::new(1, 4096).unwrap());
        assert_eq!(p.j_max(), 11);
    }

    #[test]
    fn cosine_four_sits_in_blocks_one_and_two() {
        let g = Grid::new(3, 16).unwrap();
        let p = DyadicPartition::new(g);
        assert_eq!(p.j_max(), 4);
        let w: Vec<f64> = p.indices().map(|j| block_profile(j, 4.0)).collect();
        for (idx, j) in p.indices().enumerate() {
            assert_eq!(w[idx] != 0.0, j == 1 || j == 2, "block {j}");
        }
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(lp_block(&SpectralField::zeros(g, 1), -2, &p).is_err());
    }
}
