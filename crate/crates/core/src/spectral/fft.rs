//! Multi-dimensional complex FFTs over x-fastest buffers.

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid;

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut planner = planner.lock().expect("fft planner poisoned");
    planner.plan_fft(n, direction)
}

fn transform_axes(grid: &Grid, data: &mut [Complex64], direction: FftDirection) {
    let n = grid.n();
    debug_assert_eq!(data.len(), grid.len());
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Axis 0 is contiguous.
    fft.process_with_scratch(data, &mut scratch);
    if grid.dim() == 1 {
        return;
    }

    let nn = n * n;
    let mut slab = vec![Complex64::default(); nn];
    // Axis 1: each z-plane is an n×n matrix indexed [i1][i0]; transpose so
    // lines along i1 become rows.
    for plane in data.chunks_exact_mut(nn) {
        for i1 in 0..n {
            for i0 in 0..n {
                slab[i0 * n + i1] = plane[i1 * n + i0];
            }
        }
        fft.process_with_scratch(&mut slab, &mut scratch);
        for i0 in 0..n {
            for i1 in 0..n {
                plane[i1 * n + i0] = slab[i0 * n + i1];
            }
        }
    }
    // Axis 2: for each i1, the matrix [i2][i0] has contiguous rows.
    for i1 in 0..n {
        for i2 in 0..n {
            let row = &data[i2 * nn + i1 * n..i2 * nn + i1 * n + n];
            for (i0, v) in row.iter().enumerate() {
                slab[i0 * n + i2] = *v;
            }
        }
        fft.process_with_scratch(&mut slab, &mut scratch);
        for i2 in 0..n {
            let row = &mut data[i2 * nn + i1 * n..i2 * nn + i1 * n + n];
            for (i0, v) in row.iter_mut().enumerate() {
                *v = slab[i0 * n + i2];
            }
        }
    }
}

/// Samples to Fourier-series coefficients (scaled by `1/n^dim`).
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, FftDirection::Forward);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Fourier-series coefficients to samples (unscaled synthesis).
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform_axes(grid, data, FftDirection::Inverse);
}

/// Coefficients of two real sample arrays with one complex transform.
/// Outputs are exactly Hermitian.
pub fn forward_real_pair(grid: &Grid, a: &[f64], b: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    forward(grid, &mut buf);
    let sym = grid.symbols();
    let conj = &sym.conj;
    let len = buf.len();
    let mut fa = vec![Complex64::default(); len];
    let mut fb = vec![Complex64::default(); len];
    for i in 0..len {
        let p = buf[i];
        let q = buf[conj[i]].conj();
        fa[i] = 0.5 * (p + q);
        // (p − q) / 2i
        let d = 0.5 * (p - q);
        fb[i] = Complex64::new(d.im, -d.re);
    }
    (fa, fb)
}

/// Samples of two Hermitian coefficient arrays with one complex transform.
pub fn inverse_real_pair(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let mut buf: Vec<Complex64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x + Complex64::new(-y.im, y.re))
        .collect();
    inverse(grid, &mut buf);
    (buf.iter().map(|z| z.re).collect(), buf.iter().map(|z| z.im).collect())
}

/// Samples of one coefficient array (real part).
pub fn inverse_real(grid: &Grid, a: &[Complex64]) -> Vec<f64> {
    let mut buf = a.to_vec();
    inverse(grid, &mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// Coefficients of one real sample array, symmetrized to be exactly Hermitian.
pub fn forward_real(grid: &Grid, a: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    forward(grid, &mut buf);
    let sym = grid.symbols();
    let conj = &sym.conj;
    let orig = buf.clone();
    for (i, z) in buf.iter_mut().enumerate() {
        *z = 0.5 * (orig[i] + orig[conj[i]].conj());
    }
    buf
}
