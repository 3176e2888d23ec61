use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{Error, Result};

/// Uniform discretization of the torus `[0, 2π)^dim` with `n` points per axis.
///
/// Samples and coefficients are stored x-fastest: the flat index of the
/// point `(i0, i1, i2)` is `i0 + n·i1 + n²·i2`. Coefficient slot `i` along an
/// axis holds wavenumber `i` for `i ≤ n/2` and `i − n` otherwise, so the
/// lattice is `{−n/2+1, …, n/2}` with the single Nyquist mode `n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    dim: usize,
    n: usize,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 3, got {dim}")));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        Ok(Grid { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of lattice points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Volume of the torus, `(2π)^dim`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Signed wavenumber stored in slot `i` of an axis.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Slot holding wavenumber `k`, if `k` is on the lattice.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k > half || k <= -half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Per-axis coordinates of a flat index; unused axes are zero.
    pub fn coords(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            1 => [flat, 0, 0],
            _ => [flat % n, (flat / n) % n, flat / (n * n)],
        }
    }

    pub fn flat(&self, c: [usize; 3]) -> usize {
        match self.dim {
            1 => c[0],
            _ => c[0] + self.n * (c[1] + self.n * c[2]),
        }
    }

    /// Integer wavenumber vector of a flat coefficient index.
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let c = self.coords(flat);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(c[a]);
        }
        k
    }

    /// Flat index of the mode `k`, if every component lies on the lattice.
    pub fn mode_index(&self, k: [i64; 3]) -> Option<usize> {
        let mut c = [0usize; 3];
        for a in 0..self.dim {
            c[a] = self.slot(k[a])?;
        }
        for &ka in &k[self.dim..] {
            if ka != 0 {
                return None;
            }
        }
        Some(self.flat(c))
    }

    /// Flat index of the mode `−k` for the mode stored at `flat`.
    /// Nyquist slots map onto themselves.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let c = self.coords(flat);
        let mut m = [0usize; 3];
        for a in 0..self.dim {
            m[a] = (self.n - c[a]) % self.n;
        }
        self.flat(m)
    }

    /// Physical coordinates of a flat sample index.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let c = self.coords(flat);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = c[a] as f64 * h;
        }
        x
    }

    /// Squared Euclidean modulus of the integer mode at `flat`.
    pub fn k_squared(&self, flat: usize) -> f64 {
        let k = self.mode(flat);
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
    }

    /// Wavenumber used by first-derivative multipliers: the Nyquist slot is
    /// treated as zero so odd derivatives of real data stay real.
    pub fn derivative_wavenumbers(&self, flat: usize) -> [f64; 3] {
        let c = self.coords(flat);
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            if !self.is_nyquist(c[a]) {
                k[a] = self.wavenumber(c[a]) as f64;
            }
        }
        k
    }

    /// Largest Euclidean lattice modulus, attained at the all-Nyquist corner.
    pub fn max_modulus(&self) -> f64 {
        (self.n as f64 / 2.0) * (self.dim as f64).sqrt()
    }

    /// Grid refined by an integer factor, used for alias-free products.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        if factor == 0 {
            return Err(Error::param("factor", "must be positive"));
        }
        Grid::new(self.dim, self.n * factor)
    }

    /// True when the slot survives two-thirds dealiasing: `3|k| < n` on every axis.
    pub fn retained(&self, flat: usize) -> bool {
        let k = self.mode(flat);
        k.iter().all(|&ka| 3 * ka.unsigned_abs() < self.n as u64)
    }
}

/// Per-mode tables of a grid, computed once and shared.
#[derive(Debug)]
pub struct Symbols {
    /// First-derivative wavenumbers per axis (Nyquist → 0); unused axes are zero.
    pub kd: [Vec<f64>; 3],
    /// `|k|²` of the integer mode.
    pub k2: Vec<f64>,
    /// Two-thirds dealiasing mask.
    pub keep: Vec<bool>,
    /// Flat index of `−k`.
    pub conj: Vec<usize>,
}

impl Grid {
    pub fn symbols(&self) -> Arc<Symbols> {
        static CACHE: OnceLock<Mutex<HashMap<Grid, Arc<Symbols>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut cache = cache.lock().expect("symbol cache poisoned");
        cache
            .entry(*self)
            .or_insert_with(|| {
                let len = self.len();
                let mut kd = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
                for i in 0..len {
                    let k = self.derivative_wavenumbers(i);
                    for a in 0..3 {
                        kd[a][i] = k[a];
                    }
                }
                Arc::new(Symbols {
                    kd,
                    k2: (0..len).map(|i| self.k_squared(i)).collect(),
                    keep: (0..len).map(|i| self.retained(i)).collect(),
                    conj: (0..len).map(|i| self.conjugate_index(i)).collect(),
                })
            })
            .clone()
    }
}
