use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Grid, SpectralField};
use crate::{Error, Result};

/// Random-phase scalar field with per-mode amplitude `|k|^{−(h + dim/2)}`,
/// hence shell spectrum `E(k) ~ k^{−(2h+1)}` and Hölder exponent `h` in every
/// dimension. Nyquist and mean modes are zero; the rms value is one.
pub fn synthetic_field(grid: Grid, h: f64, seed: u64) -> Result<SpectralField> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::param("h", format!("must lie in (0, 1), got {h}")));
    }
    let exponent = h + 0.5 * grid.dim() as f64;
    let sym = grid.symbols();
    let half = (grid.n() / 2) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, 1);
    let data = f.component_mut(0);
    for i in 0..grid.len() {
        let j = sym.conj[i];
        if j < i {
            continue;
        }
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let k = grid.mode(i);
        if sym.k2[i] == 0.0 || k.contains(&half) {
            continue;
        }
        let z = Complex64::from_polar(sym.k2[i].powf(-0.5 * exponent), phase);
        data[i] = z;
        data[j] = z.conj();
    }
    let e = f.parseval_energy();
    f.scale((grid.volume() / e).sqrt());
    Ok(f)
}
