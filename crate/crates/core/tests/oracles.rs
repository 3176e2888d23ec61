//! Reference computations done the slow way: explicit Fourier convolutions,
//! per-mode algebra and direct quadrature, compared with the FFT paths.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lerayflux::diagnostics::{flux_density_padded, flux_spectrum};
use lerayflux::model::{pressure_solve, random_spectral_field};
use lerayflux::spectral::{ops, Grid, Mollifier, PhysicalField, SpectralField};

type Modes = HashMap<[i64; 3], Vec<Complex64>>;

fn modes_of(f: &SpectralField) -> Modes {
    let g = f.grid();
    let mut out = Modes::new();
    for i in 0..g.len() {
        let k = g.mode(i);
        let c: Vec<Complex64> = (0..f.components()).map(|c| f.component(c)[i]).collect();
        if c.iter().any(|z| z.norm() > 0.0) {
            out.insert(k, c);
        }
    }
    out
}

fn add(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn neg(a: [i64; 3]) -> [i64; 3] {
    [-a[0], -a[1], -a[2]]
}

fn norm2(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

/// Full (unaliased) convolution of components `i` of `a` and `j` of `b`.
fn convolve(a: &Modes, i: usize, b: &Modes, j: usize) -> HashMap<[i64; 3], Complex64> {
    let mut out = HashMap::new();
    for (p, ca) in a {
        for (q, cb) in b {
            *out.entry(add(*p, *q)).or_insert_with(Complex64::default) += ca[i] * cb[j];
        }
    }
    out
}

fn band_limited(n: usize, comps: usize, kmax: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_spectral_field(Grid::new(3, n).unwrap(), comps, 5.0 / 3.0, kmax, 1.0, &mut rng).unwrap()
}

/// `Π_κ = Σ_ij ∫ (P(u_i u_j) − Pu_i Pu_j) ∂_j Pu_i` with every product an
/// explicit convolution and `∫fgh = (2π)³ Σ_{a+b+c=0} f̂_a ĝ_b ĥ_c`.
fn direct_flux(u: &SpectralField, kappa: f64) -> f64 {
    let all = modes_of(u);
    let low: Modes = all
        .iter()
        .filter(|(k, _)| norm2(**k) <= kappa * kappa)
        .map(|(k, v)| (*k, v.clone()))
        .collect();
    let grad = |i: usize, j: usize, k: [i64; 3]| -> Complex64 {
        low.get(&k)
            .map(|c| c[i] * Complex64::new(0.0, k[j] as f64))
            .unwrap_or_default()
    };
    let mut total = Complex64::default();
    for i in 0..3 {
        for j in 0..3 {
            let full = convolve(&all, i, &all, j);
            let trunc = convolve(&low, i, &low, j);
            for (k, v) in &full {
                if norm2(*k) <= kappa * kappa {
                    total += v * grad(i, j, neg(*k));
                }
            }
            for (k, v) in &trunc {
                total -= v * grad(i, j, neg(*k));
            }
        }
    }
    assert!(total.im.abs() < 1e-12 * total.re.abs().max(1.0));
    (2.0 * PI).powi(3) * total.re
}

#[test]
fn flux_matches_direct_convolution_on_8_cubed() {
    let u = band_limited(8, 3, 0.0, 11);
    let kappas = [1.0, 1.5, 2.0, 2.5, 3.0];
    let report = flux_spectrum(&u, &kappas, None, false).unwrap();
    let mut nontrivial = 0;
    for (k, pi) in kappas.iter().zip(&report.pi) {
        let oracle = direct_flux(&u, *k);
        assert!((pi - oracle).abs() < 1e-10, "κ = {k}: {pi} vs {oracle}");
        if oracle.abs() > 1e-3 {
            nontrivial += 1;
        }
    }
    assert!(nontrivial >= 2, "oracle values too small to be informative");
}

#[test]
fn flux_vanishes_beyond_the_band() {
    let u = band_limited(16, 3, 4.0, 5);
    let report = flux_spectrum(&u, &[4.0, 5.0, 8.0, 12.0], None, false).unwrap();
    for pi in &report.pi {
        assert!(pi.abs() < 1e-12, "{pi}");
    }
}

#[test]
fn flux_integral_does_not_depend_on_padding() {
    let u = band_limited(16, 3, 5.0, 9);
    for kappa in [2.0, 3.0] {
        let a = flux_density_padded(&u, kappa, 2).unwrap().integral(0);
        let b = flux_density_padded(&u, kappa, 3).unwrap().integral(0);
        let c = flux_density_padded(&u, kappa, 4).unwrap().integral(0);
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
        assert!((a - c).abs() < 1e-12 * a.abs().max(1.0), "{a} {c}");
    }
}

#[test]
fn leray_projection_per_mode() {
    let f = band_limited(8, 3, 0.0, 2);
    let p = ops::leray_project(&f).unwrap();
    let g = *f.grid();
    for i in 0..g.len() {
        let k = g.mode(i);
        // Nyquist wavenumbers carry no derivative, so they drop out of k.
        let kd: Vec<f64> = k
            .iter()
            .map(|&x| if x.unsigned_abs() as usize * 2 == g.n() { 0.0 } else { x as f64 })
            .collect();
        let k2: f64 = kd.iter().map(|x| x * x).sum();
        for a in 0..3 {
            let mut expect = f.component(a)[i];
            if k2 > 0.0 {
                for b in 0..3 {
                    expect -= f.component(b)[i] * (kd[a] * kd[b] / k2);
                }
            }
            assert!((p.component(a)[i] - expect).norm() < 1e-14, "mode {k:?} component {a}");
        }
    }
}

#[test]
fn taylor_green_pressure() {
    let g = Grid::new(3, 16).unwrap();
    let u = PhysicalField::from_fn(g, 3, |x| {
        vec![
            x[0].sin() * x[1].cos() * x[2].cos(),
            -x[0].cos() * x[1].sin() * x[2].cos(),
            0.0,
        ]
    })
    .transform()
    .unwrap();
    let p = pressure_solve(&u, &u).unwrap().inverse();
    let mut worst = 0.0f64;
    for (i, got) in p.component(0).iter().enumerate() {
        let x = g.point(i);
        let expect = ((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) * ((2.0 * x[2]).cos() + 2.0) / 16.0;
        worst = worst.max((got - expect).abs());
    }
    assert!(worst < 1e-13, "{worst}");
}

#[test]
fn mollification_matches_direct_convolution_1d() {
    let g = Grid::new(1, 64).unwrap();
    let f = PhysicalField::scalar_fn(g, |x| (3.0 * x[0]).sin() + 0.5 * (7.0 * x[0] + 0.3).cos());
    for eps in [0.2, 0.5, 1.0] {
        let m = Mollifier::new(eps, 1).unwrap();
        let smooth = ops::mollify(&f.transform().unwrap(), &m).unwrap().inverse();
        // Trapezoid rule over the kernel support; the bump is flat at the edge.
        let q = 4000;
        let h = 2.0 * eps / q as f64;
        for i in (0..64).step_by(7) {
            let x = g.point(i)[0];
            let mut acc = 0.0;
            for s in 0..=q {
                let y = -eps + s as f64 * h;
                let fx = (3.0 * (x - y)).sin() + 0.5 * (7.0 * (x - y) + 0.3).cos();
                acc += m.value(&[y, 0.0, 0.0]) * fx;
            }
            acc *= h;
            assert!((smooth.component(0)[i] - acc).abs() < 1e-10, "ε = {eps}, x = {x}");
        }
    }
}

#[test]
fn mollifier_transform_matches_cartesian_quadrature_3d() {
    let eps = 0.6;
    let m = Mollifier::new(eps, 3).unwrap();
    let k = [1.0, 2.0, 2.0];
    let p = 121;
    let h = 2.0 * eps / (p - 1) as f64;
    let mut acc = 0.0;
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let x = [-eps + a as f64 * h, -eps + b as f64 * h, -eps + c as f64 * h];
                let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
                acc += m.value(&x) * phase.cos();
            }
        }
    }
    acc *= h * h * h;
    assert!((m.transform(3.0) - acc).abs() < 1e-10, "{} vs {acc}", m.transform(3.0));
}

#[test]
fn dealiased_product_is_the_truncated_convolution() {
    for n in [8usize, 12, 16] {
        let a = ops::dealias(&band_limited(n, 1, 0.0, 21));
        let b = ops::dealias(&band_limited(n, 1, 0.0, 22));
        let (pa, pb) = (a.inverse(), b.inverse());
        let prod: Vec<f64> = pa.data().iter().zip(pb.data()).map(|(x, y)| x * y).collect();
        let prod = PhysicalField::from_vec(*a.grid(), 1, prod).unwrap().transform().unwrap();
        let grid_product = ops::dealias(&prod);
        let exact = convolve(&modes_of(&a), 0, &modes_of(&b), 0);
        let g = *a.grid();
        let kept = ops::dealias(&SpectralField::from_vec(g, 1, vec![Complex64::new(1.0, 0.0); g.len()]).unwrap());
        for i in 0..g.len() {
            let k = g.mode(i);
            let expect = if kept.component(0)[i].re == 1.0 {
                exact.get(&k).copied().unwrap_or_default()
            } else {
                Complex64::default()
            };
            assert!((grid_product.component(0)[i] - expect).norm() < 1e-13, "n = {n}, mode {k:?}");
        }
    }
}
