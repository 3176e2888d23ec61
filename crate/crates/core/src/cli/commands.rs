use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{LoadedConfig, RunConfig};
use super::manifest::{input_entry, FileEntry, Manifest, Outputs};
use crate::besov::{besov_norm, regularity_fit, structure_function, DyadicPartition, StructureCurve};
use crate::diagnostics::{
    balance_csv, balance_residual, bump_test_function, defect_report, flux_spectrum, increment_curve,
    shock_dissipation, BalanceRow, DefectInputs, Directions,
};
use crate::fit::loglog_fit;
use crate::model::{
    initial_condition, integrate, sawtooth, series_csv, step_count, Cadence, InitialKind, Model, ModelState,
    Trajectory,
};
use crate::spectral::{ops, Grid, Mollifier, Snapshot, SpectralField};
use crate::{Error, Result};

/// Shared inputs of every subcommand.
pub struct Context<'a> {
    pub loaded: &'a LoadedConfig,
    pub out_dir: PathBuf,
}

impl Context<'_> {
    fn config(&self) -> &RunConfig {
        &self.loaded.config
    }

    fn finish(
        &self,
        outputs: Outputs,
        command: &str,
        inputs: Vec<FileEntry>,
        summary: &[(&str, String)],
    ) -> Result<Manifest> {
        let summary: BTreeMap<String, String> = summary.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        outputs.finish(command, &self.loaded.canonical, &self.loaded.overrides, inputs, summary)
    }
}

fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

/// Echo a summary as a header line and a value line.
fn echo(summary: &[(&str, String)]) {
    let keys: Vec<&str> = summary.iter().map(|(k, _)| *k).collect();
    let values: Vec<&str> = summary.iter().map(|(_, v)| v.as_str()).collect();
    println!("{}", keys.join(","));
    println!("{}", values.join(","));
}

fn load_snapshot(path: &Path) -> Result<(Snapshot, FileEntry)> {
    let bytes = std::fs::read(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    let snap = Snapshot::read_from(bytes.as_slice())?;
    Ok((snap, input_entry(path, &bytes)))
}

fn require_directions(directions: Directions, dim: usize) -> Result<()> {
    if directions == Directions::Icosahedral && dim != 3 {
        return Err(Error::InvalidGrid(format!(
            "icosahedral directions need a 3-dimensional snapshot, got dimension {dim}"
        )));
    }
    Ok(())
}

/// Separations `2^m h` for `m ≥ 1` below `xi_max`: exact grid shifts.
pub fn grid_multiples(grid: &Grid, xi_max: f64) -> Vec<f64> {
    let h = grid.spacing();
    (1..64)
        .map(|m| 2f64.powi(m) * h)
        .take_while(|x| *x < xi_max)
        .collect()
}

/// `‖∇v‖²_{L²}`.
pub fn gradient_energy(v: &SpectralField) -> Result<f64> {
    Ok(ops::jacobian(v)?.parseval_energy())
}

fn model_of(cfg: &RunConfig, alpha: f64) -> Result<Model> {
    let mut params = cfg.model.params();
    params.alpha = alpha;
    Model::new(params, cfg.model.variant)
}

fn initial_state(cfg: &RunConfig, alpha: f64) -> Result<ModelState> {
    if cfg.ic.kind == InitialKind::BurgersShock {
        return Err(Error::param(
            "ic.kind",
            "burgers_shock is analyzed by the `burgers` subcommand, not simulated",
        ));
    }
    let grid = Grid::new(cfg.grid.dim, cfg.grid.n)?;
    initial_condition(cfg.ic.kind, grid, alpha, &cfg.ic.spec())
}

/// Fixed step for a run: the configured one (checked against the CFL bound)
/// or the largest step under the bound that divides `t_end`.
pub fn resolve_dt(state: &ModelState, dt: f64, t_end: f64, safety: f64) -> Result<f64> {
    let limit = Model::cfl_dt(state, safety)?;
    if dt > 0.0 {
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        return Ok(dt);
    }
    if t_end == 0.0 {
        return Ok(limit);
    }
    let steps = (t_end / limit).ceil().max(1.0);
    Ok(t_end / steps)
}

struct RunOutcome {
    dt: f64,
    trajectory: Trajectory,
    drift: f64,
}

fn run_model(cfg: &RunConfig, alpha: f64, cadence: Cadence) -> Result<RunOutcome> {
    let model = model_of(cfg, alpha)?;
    let state = initial_state(cfg, alpha)?;
    let dt = resolve_dt(&state, cfg.time.dt, cfg.time.t_end, cfg.time.cfl_safety)?;
    let trajectory = integrate(&model, &state, dt, cfg.time.t_end, cadence)?;
    let e0 = trajectory.series.first().map(|s| s.e_total).unwrap_or(0.0);
    let e1 = trajectory.series.last().map(|s| s.e_total).unwrap_or(0.0);
    let drift = if e0 > 0.0 { (e1 - e0).abs() / e0 } else { (e1 - e0).abs() };
    Ok(RunOutcome { dt, trajectory, drift })
}

pub fn simulate(ctx: &Context<'_>) -> Result<Manifest> {
    let cfg = ctx.config();
    let cadence = Cadence {
        series_every: cfg.output.series_every,
        snapshot_every: cfg.output.snapshot_every,
    };
    let run = run_model(cfg, cfg.model.alpha, cadence)?;
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("series.csv", series_csv(&run.trajectory.series).as_bytes())?;
    for (i, s) in run.trajectory.snapshots.iter().enumerate() {
        out.write(&format!("snapshot_{i:04}.lfs"), &s.to_snapshot().to_bytes())?;
    }
    let last = run.trajectory.series.last().expect("series holds the initial state");
    let max_div = run.trajectory.series.iter().map(|s| s.max_div).fold(0.0, f64::max);
    let summary = [
        ("steps", step_count(run.dt, cfg.time.t_end)?.to_string()),
        ("dt", fmt(run.dt)),
        ("t_end", fmt(last.t)),
        ("E_initial", fmt(run.trajectory.series[0].e_total)),
        ("E_final", fmt(last.e_total)),
        ("energy_drift", fmt(run.drift)),
        ("max_div", fmt(max_div)),
    ];
    echo(&summary);
    ctx.finish(out, "simulate", Vec::new(), &summary)
}

pub fn flux(ctx: &Context<'_>, snapshot: &Path) -> Result<Manifest> {
    let cfg = &ctx.config().flux;
    let (snap, input) = load_snapshot(snapshot)?;
    let state = ModelState::from_snapshot(&snap)?;
    let window = (cfg.fit_max > 0.0).then_some((cfg.fit_min, cfg.fit_max));
    let report = flux_spectrum(state.u(), &cfg.kappas, window, false)?;
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("flux.csv", report.to_csv().as_bytes())?;
    let max_abs = report.pi.iter().map(|p| p.abs()).fold(0.0, f64::max);
    let summary = [
        ("kappas", report.kappas.len().to_string()),
        ("Pi_max_abs", fmt(max_abs)),
        ("slope", fmt_opt(report.fit.map(|f| f.slope))),
    ];
    echo(&summary);
    ctx.finish(out, "flux", vec![input], &summary)
}

pub fn defect(ctx: &Context<'_>, snapshot: &Path) -> Result<Manifest> {
    let cfg = &ctx.config().defect;
    let (snap, input) = load_snapshot(snapshot)?;
    let state = ModelState::from_snapshot(&snap)?;
    let inputs = DefectInputs {
        v: state.v(),
        u: state.u(),
        z: state.z(),
    };
    let report = defect_report(inputs, &cfg.eps_list, cfg.form, cfg.quadrature_points)?;
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("defect.csv", report.to_csv().as_bytes())?;
    let disc = report.max_discrepancy();
    if let Some(d) = disc {
        if d > cfg.tolerance {
            eprintln!(
                "warning: form discrepancy {d:e} exceeds the tolerance {:e}; refine quadrature_points",
                cfg.tolerance
            );
        }
    }
    let last = report.d1.len() - 1;
    let summary = [
        ("eps_min", fmt(report.eps_list[last])),
        ("D1_abs", fmt(report.d1[last].primary().abs)),
        ("D2_abs", fmt(report.d2[last].primary().abs)),
        ("slope_D1", fmt_opt(report.slope_d1.map(|f| f.slope))),
        ("slope_D2", fmt_opt(report.slope_d2.map(|f| f.slope))),
        ("max_discrepancy", fmt_opt(disc)),
        ("within_tolerance", disc.map(|d| (d <= cfg.tolerance).to_string()).unwrap_or_default()),
    ];
    echo(&summary);
    ctx.finish(out, "defect", vec![input], &summary)
}

fn curve_csv(curve: &StructureCurve) -> String {
    let mut out = String::from("xi,S\n");
    for (x, v) in curve.xi.iter().zip(&curve.values) {
        out.push_str(&format!("{x:?},{v:?}\n"));
    }
    out
}

pub fn besov(ctx: &Context<'_>, snapshot: &Path) -> Result<Manifest> {
    let cfg = &ctx.config().besov;
    let (snap, input) = load_snapshot(snapshot)?;
    let state = ModelState::from_snapshot(&snap)?;
    let grid = *state.grid();
    require_directions(cfg.directions, grid.dim())?;
    let field = match cfg.field.as_str() {
        "v" => state.v(),
        "Z" => state.z(),
        _ => state.u(),
    };
    let (p, q) = (cfg.p.value(), cfg.q.value());
    let partition = DyadicPartition::new(grid);
    let mut report = besov_norm(field, cfg.s, p, q, &partition)?;
    let xi = if cfg.xi_list.is_empty() {
        grid_multiples(&grid, cfg.xi_max)
    } else {
        cfg.xi_list.clone()
    };
    if xi.is_empty() {
        eprintln!("note: no grid separation below xi_max = {}; structure function skipped", cfg.xi_max);
    } else {
        let curve = structure_function(field, p, &xi, cfg.directions)?;
        match regularity_fit(&curve, None) {
            Ok(fit) => report.regularity = Some(fit),
            Err(e) => eprintln!("note: no regularity fit: {e}"),
        }
        report.structure = Some(curve);
    }
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("besov_blocks.csv", report.csv().as_bytes())?;
    out.write("besov.csv", report.summary_csv().as_bytes())?;
    if let Some(curve) = &report.structure {
        out.write("structure.csv", curve_csv(curve).as_bytes())?;
    }
    let summary = [
        ("field", cfg.field.clone()),
        ("norm", fmt(report.norm)),
        ("exponent", fmt_opt(report.regularity.map(|r| r.exponent))),
        ("stderr", fmt_opt(report.regularity.map(|r| r.stderr))),
    ];
    echo(&summary);
    ctx.finish(out, "besov", vec![input], &summary)
}

pub fn increments(ctx: &Context<'_>, snapshot: &Path) -> Result<Manifest> {
    let cfg = &ctx.config().increments;
    let (snap, input) = load_snapshot(snapshot)?;
    let state = ModelState::from_snapshot(&snap)?;
    require_directions(cfg.directions, state.grid().dim())?;
    let curve = increment_curve(state.v(), state.u(), state.z(), &cfg.xi_list, cfg.directions)?;
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("increments.csv", curve.to_csv().as_bytes())?;
    let slope = |y: &[f64]| loglog_fit(&curve.xi, y).ok().map(|f| f.slope);
    let summary = [
        ("xi_count", curve.xi.len().to_string()),
        ("slope_I1", fmt_opt(slope(&curve.i1))),
        ("slope_I2", fmt_opt(slope(&curve.i2))),
    ];
    echo(&summary);
    ctx.finish(out, "increments", vec![input], &summary)
}

pub fn burgers(ctx: &Context<'_>) -> Result<Manifest> {
    let cfg = &ctx.config().burgers;
    let grid = Grid::new(1, cfg.n)?;
    let u = sawtooth(grid, cfg.sigma);
    let shock = shock_dissipation(&u, &cfg.eps_list)?;
    let us = u.transform()?;
    let partition = DyadicPartition::new(grid);
    let third = besov_norm(&us, 1.0 / 3.0, 3.0, f64::INFINITY, &partition)?;
    let half = besov_norm(&us, 0.5, 3.0, f64::INFINITY, &partition)?;
    let curve = structure_function(&us, 3.0, &grid_multiples(&grid, 0.25), Directions::Axes)?;
    let fit = regularity_fit(&curve, None)?;

    let mut ladder = String::from("eps,defect\n");
    for (e, d) in shock.eps.iter().zip(&shock.defects) {
        ladder.push_str(&format!("{e:?},{d:?}\n"));
    }
    let summary = [
        ("sigma", fmt(cfg.sigma)),
        ("n", cfg.n.to_string()),
        ("dissipation", fmt(shock.dissipation())),
        ("order", fmt(shock.extrapolation.order)),
        ("besov_1_3", fmt(third.norm)),
        ("besov_1_2", fmt(half.norm)),
        ("structure_exponent", fmt(fit.exponent)),
        ("stderr", fmt(fit.stderr)),
    ];
    let (keys, values): (Vec<&str>, Vec<&str>) = summary.iter().map(|(k, v)| (*k, v.as_str())).unzip();
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("burgers_defects.csv", ladder.as_bytes())?;
    out.write("burgers.csv", format!("{}\n{}\n", keys.join(","), values.join(",")).as_bytes())?;
    out.write("structure.csv", curve_csv(&curve).as_bytes())?;
    let snap = Snapshot::new(u, 0.0).with_param("fields", "u");
    out.write("sawtooth.lfs", &snap.to_bytes())?;
    echo(&summary);
    ctx.finish(out, "burgers", Vec::new(), &summary)
}

pub const SWEEP_HEADER: &str = "alpha,quantity,parameter,value,energy_drift,v_enstrophy";

struct SweepEntry {
    alpha: f64,
    drift: f64,
    enstrophy: f64,
    flux: Vec<(f64, f64)>,
    d1: Vec<(f64, f64)>,
    d2: Vec<(f64, f64)>,
}

fn sweep_one(cfg: &RunConfig, alpha: f64) -> Result<SweepEntry> {
    let cadence = Cadence {
        series_every: cfg.output.series_every,
        snapshot_every: 0,
    };
    let run = run_model(cfg, alpha, cadence)?;
    let state = run.trajectory.last_state().expect("final state is kept");
    let flux = flux_spectrum(state.u(), &cfg.flux.kappas, None, false)?;
    let inputs = DefectInputs {
        v: state.v(),
        u: state.u(),
        z: state.z(),
    };
    let defects = defect_report(inputs, &cfg.defect.eps_list, cfg.defect.form, cfg.defect.quadrature_points)?;
    let pairs = |entries: &[crate::diagnostics::DefectEntry]| -> Vec<(f64, f64)> {
        entries.iter().map(|e| (e.eps, e.primary().abs)).collect()
    };
    Ok(SweepEntry {
        alpha,
        drift: run.drift,
        enstrophy: gradient_energy(state.v())?,
        flux: flux.kappas.iter().copied().zip(flux.pi.iter().copied()).collect(),
        d1: pairs(&defects.d1),
        d2: pairs(&defects.d2),
    })
}

pub fn sweep_alpha(ctx: &Context<'_>) -> Result<Manifest> {
    let cfg = ctx.config();
    let alphas = &cfg.sweep.alpha_list;
    if alphas.len() < 2 {
        return Err(Error::param("sweep.alpha_list", "needs at least two values"));
    }
    let entries: Vec<SweepEntry> = alphas
        .par_iter()
        .map(|&a| sweep_one(cfg, a))
        .collect::<Result<_>>()?;
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for e in &entries {
        let groups = [("Pi", &e.flux), ("D1", &e.d1), ("D2", &e.d2)];
        for (name, rows) in groups {
            for (param, value) in rows.iter() {
                csv.push_str(&format!(
                    "{:?},{name},{param:?},{value:?},{:?},{:?}\n",
                    e.alpha, e.drift, e.enstrophy
                ));
            }
        }
    }
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("sweep.csv", csv.as_bytes())?;
    let max_drift = entries.iter().map(|e| e.drift).fold(0.0, f64::max);
    let list = |f: &dyn Fn(&SweepEntry) -> f64| entries.iter().map(|e| fmt(f(e))).collect::<Vec<_>>().join(";");
    let summary = [
        ("alphas", list(&|e| e.alpha)),
        ("max_energy_drift", fmt(max_drift)),
        ("v_enstrophy", list(&|e| e.enstrophy)),
    ];
    echo(&summary);
    ctx.finish(out, "sweep-alpha", Vec::new(), &summary)
}

/// States at `t_center − dt`, `t_center`, `t_center + dt` of the configured run.
fn balance_window(cfg: &RunConfig, dt: f64) -> Result<[ModelState; 3]> {
    let model = model_of(cfg, cfg.model.alpha)?;
    let mut state = initial_state(cfg, cfg.model.alpha)?;
    let steps = step_count(dt, cfg.balance.t_center)?;
    if steps == 0 {
        return Err(Error::param("balance.t_center", "must be at least one step past t = 0"));
    }
    let t0 = state.t;
    for i in 1..steps {
        state = model.step_rk4(&state, dt)?;
        state.t = t0 + i as f64 * dt;
    }
    let mut mid = model.step_rk4(&state, dt)?;
    mid.t = t0 + steps as f64 * dt;
    let mut next = model.step_rk4(&mid, dt)?;
    next.t = t0 + (steps + 1) as f64 * dt;
    Ok([state, mid, next])
}

pub fn balance(ctx: &Context<'_>) -> Result<Manifest> {
    let cfg = ctx.config();
    let b = &cfg.balance;
    let grid = Grid::new(cfg.grid.dim, cfg.grid.n)?;
    let chi = bump_test_function(grid, b.chi_center, b.chi_radius)?;
    let rate = cfg.model.params().reaction_rate();
    let windows: Vec<[ModelState; 3]> = b.dt_list.iter().map(|&dt| balance_window(cfg, dt)).collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &eps in &b.eps_list {
        let moll = Mollifier::new(eps, grid.dim())?;
        for (w, &dt) in windows.iter().zip(&b.dt_list) {
            let residual = balance_residual([&w[0], &w[1], &w[2]], &moll, &chi, rate)?;
            rows.push(BalanceRow { eps, dt, residual });
        }
    }
    let mut out = Outputs::create(&ctx.out_dir)?;
    out.write("balance.csv", balance_csv(&rows).as_bytes())?;
    let max_abs = rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    let summary = [
        ("t_center", fmt(b.t_center)),
        ("rows", rows.len().to_string()),
        ("max_abs_residual", fmt(max_abs)),
    ];
    print!("{}", balance_csv(&rows));
    echo(&summary);
    ctx.finish(out, "balance", Vec::new(), &summary)
}
