//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lerayflux::besov::{
    besov_norm, lp_blocks, paraproduct, regularity_fit, structure_function, synthetic_field, DyadicPartition,
};
use lerayflux::cli::commands::grid_multiples;
use lerayflux::cli::manifest::Manifest;
use lerayflux::diagnostics::{
    balance_residual, bump_test_function, defect_pair, defect_report, flux_spectrum, shock_dissipation, DefectForm,
    DefectInputs, Directions, DEFAULT_QUADRATURE_POINTS,
};
use lerayflux::model::{
    initial_condition, integrate, random_spectral_field, sawtooth, step_count, Cadence, InitialKind, InitialSpec, Model,
    ModelParams, ModelState, Variant,
};
use lerayflux::spectral::{ops, Grid, Mollifier, PhysicalField, SpectralField};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn taylor_green(n: usize, alpha: f64) -> ModelState {
    initial_condition(InitialKind::TaylorGreen, Grid::new(3, n).unwrap(), alpha, &InitialSpec::default()).unwrap()
}

fn energy_conservation() -> Outcome {
    let alpha = 0.25;
    let s0 = taylor_green(32, alpha);
    let inviscid = Model::new(ModelParams { alpha, ..ModelParams::default() }, Variant::Inviscid).unwrap();
    let cadence = Cadence {
        series_every: 1,
        snapshot_every: 0,
    };
    let run = integrate(&inviscid, &s0, 2e-3, 2.0, cadence).unwrap();
    let e0 = run.series[0].e_total;
    let drift = run
        .series
        .iter()
        .map(|s| (s.e_total - e0).abs() / e0)
        .fold(0.0, f64::max);

    let params = ModelParams {
        alpha,
        nu: 0.01,
        ..ModelParams::default()
    };
    let viscous = Model::new(params, Variant::Viscous).unwrap();
    let run = integrate(&viscous, &s0, 2e-3, 2.0, cadence).unwrap();
    let nonincreasing = run.series.windows(2).all(|w| w[1].e_total <= w[0].e_total);
    let strict = run.series.windows(2).all(|w| w[1].e_total < w[0].e_total);
    let lost = 1.0 - run.series.last().unwrap().e_total / e0;
    outcome(
        drift <= 1e-7 && nonincreasing,
        format!(
            "max inviscid drift {drift:.2e} over t in [0,2]; nu=0.01 nonincreasing: {nonincreasing}, \
             strictly decreasing: {strict} (lost {lost:.3e})"
        ),
    )
}

fn band_limited_state() -> ModelState {
    let g = Grid::new(3, 32).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = ops::leray_project(&random_spectral_field(g, 3, 5.0 / 3.0, 4.0, 1.0, &mut rng).unwrap()).unwrap();
    let z = random_spectral_field(g, 1, 5.0 / 3.0, 4.0, 1.0, &mut rng).unwrap();
    ModelState::new(u, z, 0.25, 0.0).unwrap()
}

fn defect_vanishing() -> Outcome {
    let s = band_limited_state();
    let inputs = DefectInputs {
        v: s.v(),
        u: s.u(),
        z: s.z(),
    };
    let ladder = [0.4, 0.2, 0.1, 0.05];
    let report = defect_report(inputs, &ladder, DefectForm::Both, DEFAULT_QUADRATURE_POINTS).unwrap();
    let s1 = report.slope_d1.map(|f| f.slope).unwrap_or(f64::NAN);
    let s2 = report.slope_d2.map(|f| f.slope).unwrap_or(f64::NAN);
    let monotone = |e: &[lerayflux::diagnostics::DefectEntry]| e.windows(2).all(|w| w[1].primary().abs < w[0].primary().abs);
    let decreasing = monotone(&report.d1) && monotone(&report.d2);
    let coarse = report.max_discrepancy().unwrap_or(f64::INFINITY);

    let moll = Mollifier::new(0.2, 3).unwrap();
    let disc = |points: usize| {
        let (a, b) = defect_pair(inputs, &moll, DefectForm::Both, points).unwrap();
        a.discrepancy.unwrap().max(b.discrepancy.unwrap())
    };
    let refined: Vec<f64> = [DEFAULT_QUADRATURE_POINTS, 33].iter().map(|&p| disc(p)).collect();
    let shrinking = refined.windows(2).all(|w| w[1] < w[0]);
    outcome(
        s1 >= 1.5 && s2 >= 1.5 && decreasing && coarse <= 1e-2 && shrinking,
        format!(
            "slopes D1 {s1:.3}, D2 {s2:.3}; max form discrepancy {coarse:.2e} at {DEFAULT_QUADRATURE_POINTS} points; \
             eps=0.2 at 17/33 points: {:.2e} -> {:.2e}",
            refined[0], refined[1]
        ),
    )
}

/// `Π_κ` by explicit Fourier convolution over the occupied modes.
fn direct_flux(u: &SpectralField, kappa: f64) -> f64 {
    use num_complex::Complex64;
    use std::collections::HashMap;
    let g = u.grid();
    let mut all: Vec<([i64; 3], [Complex64; 3])> = Vec::new();
    for i in 0..g.len() {
        let c = [u.component(0)[i], u.component(1)[i], u.component(2)[i]];
        if c.iter().any(|z| z.norm() > 0.0) {
            all.push((g.mode(i), c));
        }
    }
    let inside = |k: [i64; 3]| ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64) <= kappa * kappa;
    let low: HashMap<[i64; 3], [Complex64; 3]> = all.iter().filter(|(k, _)| inside(*k)).copied().collect();
    let mut total = Complex64::default();
    for (p, cp) in &all {
        for (q, cq) in &all {
            let k = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            let both_low = low.contains_key(p) && low.contains_key(q);
            let weight = if inside(k) { 1.0 } else { 0.0 } - if both_low { 1.0 } else { 0.0 };
            if weight == 0.0 {
                continue;
            }
            if let Some(cr) = low.get(&[-k[0], -k[1], -k[2]]) {
                for i in 0..3 {
                    for j in 0..3 {
                        let grad = cr[i] * Complex64::new(0.0, -k[j] as f64);
                        total += cp[i] * cq[j] * grad * weight;
                    }
                }
            }
        }
    }
    (2.0 * std::f64::consts::PI).powi(3) * total.re
}

fn flux_machinery() -> Outcome {
    let g = Grid::new(3, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_spectral_field(g, 3, 5.0 / 3.0, 0.0, 1.0, &mut rng).unwrap();
    let kappas = [1.0, 1.5, 2.0, 2.5, 3.0];
    let report = flux_spectrum(&u, &kappas, None, false).unwrap();
    let oracle_err = kappas
        .iter()
        .zip(&report.pi)
        .map(|(k, p)| (p - direct_flux(&u, *k)).abs())
        .fold(0.0, f64::max);

    let g16 = Grid::new(3, 16).unwrap();
    let banded = random_spectral_field(g16, 3, 5.0 / 3.0, 4.0, 1.0, &mut rng).unwrap();
    let beyond = flux_spectrum(&banded, &[4.0, 6.0, 8.0, 12.0], None, false)
        .unwrap()
        .pi
        .iter()
        .map(|p| p.abs())
        .fold(0.0, f64::max);

    let single = PhysicalField::from_fn(g16, 3, |x| vec![0.0, 0.0, (3.0 * x[0] + 2.0 * x[1] + 0.4).cos()])
        .transform()
        .unwrap();
    let cutoffs: Vec<f64> = (1..=16).map(|k| 0.5 * k as f64).collect();
    let single_pi = flux_spectrum(&single, &cutoffs, None, false)
        .unwrap()
        .pi
        .iter()
        .map(|p| p.abs())
        .fold(0.0, f64::max);
    outcome(
        oracle_err <= 1e-10 && beyond <= 1e-12 && single_pi <= 1e-12,
        format!("8^3 oracle error {oracle_err:.2e}; beyond band {beyond:.2e}; single-mode max |pi| {single_pi:.2e}"),
    )
}

fn burgers_sharpness() -> Outcome {
    let ladder = [0.4, 0.2, 0.1, 0.05];
    let mut third = Vec::new();
    let mut half = Vec::new();
    let mut dissipation = 0.0;
    let mut exponent = 0.0;
    for n in [2048usize, 4096] {
        let g = Grid::new(1, n).unwrap();
        let u = sawtooth(g, 1.0);
        let us = u.transform().unwrap();
        let part = DyadicPartition::new(g);
        third.push(besov_norm(&us, 1.0 / 3.0, 3.0, f64::INFINITY, &part).unwrap().norm);
        half.push(besov_norm(&us, 0.5, 3.0, f64::INFINITY, &part).unwrap().norm);
        if n == 4096 {
            dissipation = shock_dissipation(&u, &ladder).unwrap().dissipation();
            let curve = structure_function(&us, 3.0, &grid_multiples(&g, 0.25), Directions::Axes).unwrap();
            exponent = regularity_fit(&curve, None).unwrap().exponent;
        }
    }
    let rel = (dissipation * 12.0 - 1.0).abs();
    let stable = (third[1] - third[0]).abs() / third[0];
    let grows = half[1] > half[0];
    outcome(
        rel <= 0.02 && stable <= 0.02 && grows && (exponent - 1.0 / 3.0).abs() <= 0.05,
        format!(
            "dissipation {dissipation:.6} (1/12 rel err {rel:.1e}); B^(1/3) {:.6} -> {:.6} ({stable:.1e}); \
             B^(1/2) {:.4} -> {:.4}; p=3 exponent {exponent:.4}",
            third[0], third[1], half[0], half[1]
        ),
    )
}

fn littlewood_paley() -> Outcome {
    let g = Grid::new(3, 32).unwrap();
    let part = DyadicPartition::new(g);
    let unity = part.unity_residual();
    let mut recon = 0.0f64;
    let mut para = 0.0f64;
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let u = random_spectral_field(g, 1, 1.0, 0.0, 1.0, &mut rng).unwrap();
        let v = random_spectral_field(g, 1, 1.0, 0.0, 1.0, &mut rng).unwrap();
        let mut sum = SpectralField::zeros(g, 1);
        for b in lp_blocks(&u, &part).unwrap() {
            sum = sum.axpy(1.0, &b);
        }
        recon = recon.max(sum.axpy(-1.0, &u).inverse().max_abs());
        para = para.max(paraproduct(&u, &v, &part).unwrap().reconstruction_error());
    }
    outcome(
        unity <= 1e-12 && recon <= 1e-12 && para <= 1e-12,
        format!("unity residual {unity:.1e}; LP reconstruction {recon:.1e}; paraproduct {para:.1e} (32^3, 3 pairs)"),
    )
}

fn balance_residual_table() -> Outcome {
    let alpha = 0.25;
    let s0 = taylor_green(32, alpha);
    let model = Model::new(ModelParams { alpha, ..ModelParams::default() }, Variant::Inviscid).unwrap();
    let chi = bump_test_function(*s0.grid(), [1.0, 2.0, 0.5], 1.5).unwrap();
    let t_center = 0.1;
    let dts = [2e-3, 1e-3];
    let epss = [0.2, 0.1];
    let mut table = [[0.0; 2]; 2];
    for (a, &dt) in dts.iter().enumerate() {
        let steps = step_count(dt, t_center).unwrap();
        let mut s = s0.clone();
        for i in 1..steps {
            s = model.step_rk4(&s, dt).unwrap();
            s.t = i as f64 * dt;
        }
        let mut mid = model.step_rk4(&s, dt).unwrap();
        mid.t = steps as f64 * dt;
        let mut next = model.step_rk4(&mid, dt).unwrap();
        next.t = (steps + 1) as f64 * dt;
        for (b, &eps) in epss.iter().enumerate() {
            let m = Mollifier::new(eps, 3).unwrap();
            table[a][b] = balance_residual([&s, &mid, &next], &m, &chi, 0.0).unwrap().abs();
        }
    }
    let dt_halving = (0..2).all(|b| table[1][b] < table[0][b]);
    let eps_halving = (0..2).all(|a| table[a][1] < table[a][0]);
    outcome(
        dt_halving && eps_halving,
        format!(
            "|<R,chi>| dt=2e-3: {:.3e} {:.3e}; dt=1e-3: {:.3e} {:.3e} (eps=0.2, 0.1)",
            table[0][0], table[0][1], table[1][0], table[1][1]
        ),
    )
}

fn regularity_estimation() -> Outcome {
    let g = Grid::new(1, 65536).unwrap();
    let f = synthetic_field(g, 0.5, 1).unwrap();
    let xi: Vec<f64> = (0..12).map(|i| 2f64.powi(-10 + i)).filter(|x| *x < 1.0).collect();
    let rough = regularity_fit(&structure_function(&f, 2.0, &xi, Directions::Axes).unwrap(), Some((1e-3, 0.1)))
        .unwrap()
        .exponent;

    // Triangle wave: Lipschitz with corners, not smooth.
    let tri = PhysicalField::scalar_fn(g, |x| (x[0] - std::f64::consts::PI).abs())
        .transform()
        .unwrap();
    let lip = regularity_fit(
        &structure_function(&tri, 2.0, &grid_multiples(&g, 0.25), Directions::Axes).unwrap(),
        None,
    )
    .unwrap()
    .exponent;
    outcome(
        (rough - 0.5).abs() <= 0.1 && lip >= 0.95,
        format!("synthetic h=0.5 exponent {rough:.4}; Lipschitz triangle wave {lip:.4}"),
    )
}

fn run_cli(dir: &std::path::Path, out: &str, args: &[&str]) -> Manifest {
    let status = Command::new(env!("CARGO_BIN_EXE_lerayflux"))
        .current_dir(dir)
        .args(["--config", "run.toml", "--out", out])
        .args(args)
        .output()
        .expect("binary runs");
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    serde_json::from_str(&fs::read_to_string(dir.join(out).join("manifest.json")).unwrap()).unwrap()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[grid]\nn = 16\n[ic]\nkind = \"random_div_free\"\nseed = 7\nkmax = 5\n[time]\ndt = 0.01\nt_end = 0.2\n\
         [output]\nsnapshot_every = 10\n[defect]\neps_list = [0.4, 0.2]\nform = \"algebraic\"\n",
    )
    .unwrap();
    let mut same = true;
    let mut files = 0;
    for (cmd, snap) in [("simulate", None), ("flux", Some("a_sim/snapshot_0002.lfs")), ("defect", Some("a_sim/snapshot_0002.lfs"))] {
        let mut manifests = Vec::new();
        for tag in ["a", "b"] {
            let out = format!("{tag}_{}", if cmd == "simulate" { "sim" } else { cmd });
            let mut args = vec![cmd];
            if let Some(s) = snap {
                args.push(s);
            }
            manifests.push(run_cli(dir.path(), &out, &args));
        }
        files += manifests[0].files.len();
        same &= manifests[0].files == manifests[1].files && manifests[0].run_id == manifests[1].run_id;
    }
    outcome(same, format!("{files} CSV/snapshot files, checksums identical across repeated runs: {same}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("energy conservation", energy_conservation),
        ("defect vanishing", defect_vanishing),
        ("flux machinery", flux_machinery),
        ("Burgers sharpness", burgers_sharpness),
        ("Littlewood-Paley/Bony", littlewood_paley),
        ("balance residual", balance_residual_table),
        ("regularity estimation", regularity_estimation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} {name}: {verdict} ({}) [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
