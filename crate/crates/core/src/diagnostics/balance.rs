use crate::model::{pressure_solve, ModelState};
use crate::spectral::ops;
use crate::spectral::{unit_bump, Grid, Mollifier, PhysicalField, SpectralField};
use crate::{Error, Result};

use super::defect::algebraic_density;

/// Smooth bump `exp(−1/(1−r²/R²))` around `center`, with periodic distance.
pub fn bump_test_function(grid: Grid, center: [f64; 3], radius: f64) -> Result<PhysicalField> {
    if !(radius > 0.0 && radius < std::f64::consts::PI) {
        return Err(Error::param("radius", format!("must lie in (0, π), got {radius}")));
    }
    let period = 2.0 * std::f64::consts::PI;
    let dim = grid.dim();
    Ok(PhysicalField::scalar_fn(grid, |x| {
        let mut r2 = 0.0;
        for a in 0..dim {
            let d = (x[a] - center[a]).rem_euclid(period);
            let d = d.min(period - d);
            r2 += d * d;
        }
        unit_bump(r2.sqrt() / radius)
    }))
}

fn samples(f: &SpectralField) -> PhysicalField {
    f.inverse()
}

fn dot_mollified(s: &ModelState, moll: &Mollifier) -> Result<Vec<f64>> {
    let u = samples(s.u());
    let ue = samples(&ops::mollify(s.u(), moll)?);
    let z = samples(s.z());
    let ze = samples(&ops::mollify(s.z(), moll)?);
    let mut out: Vec<f64> = z.component(0).iter().zip(ze.component(0)).map(|(a, b)| a * b).collect();
    for c in 0..s.grid().dim() {
        for ((o, a), b) in out.iter_mut().zip(u.component(c)).zip(ue.component(c)) {
            *o += a * b;
        }
    }
    Ok(out)
}

fn mollified_product(fine: Grid, parts: Vec<Vec<f64>>, moll: &Mollifier) -> Result<PhysicalField> {
    let mut f = PhysicalField::zeros(fine, parts.len());
    for (c, p) in parts.into_iter().enumerate() {
        f.component_mut(c).copy_from_slice(&p);
    }
    Ok(ops::mollify(&f.transform()?, moll)?.inverse())
}

/// Local energy balance residual `R_ε` at the base grid points of the middle
/// state of a uniformly spaced window:
///
/// `R_ε = ∂t(u·u^ε + ZZ^ε) + ∇·(p^ε u + p u^ε) + D₁ + ½∇·((|u|²v)^ε − (|u|²)^ε v)
///       + ∇·((u·u^ε)v) + D₂ + ½∇·((Z²u)^ε − (Z²)^ε u) + ∇·(ZZ^ε u) + 2rZZ^ε`
///
/// with `r` the linear reaction rate. `∂t` is the centered difference and the
/// defects use the algebraic form. Cubic products are formed on a twice
/// refined grid, exact for fields inside the dealiased band.
pub fn balance_density(window: [&ModelState; 3], moll: &Mollifier, reaction_rate: f64) -> Result<PhysicalField> {
    let [s0, s1, s2] = window;
    let grid = *s1.grid();
    if *s0.grid() != grid || *s2.grid() != grid {
        return Err(Error::GridMismatch("window states live on different grids".into()));
    }
    if moll.dim() != grid.dim() {
        return Err(Error::GridMismatch("mollifier and fields differ in dimension".into()));
    }
    let dt = s1.t - s0.t;
    if !(dt > 0.0) || ((s2.t - s1.t) - dt).abs() > 1e-9 * dt {
        return Err(Error::param(
            "window",
            format!("snapshots must be uniformly spaced in time, got {}, {}, {}", s0.t, s1.t, s2.t),
        ));
    }
    let dim = grid.dim();

    let e0 = dot_mollified(s0, moll)?;
    let e2 = dot_mollified(s2, moll)?;
    let mut r: Vec<f64> = e2.iter().zip(&e0).map(|(b, a)| (b - a) / (2.0 * dt)).collect();

    let (u, v, z) = (s1.u(), s1.v(), s1.z());
    let p = ops::dealias(&pressure_solve(u, v)?);
    let uf = ops::fine_samples(u, 2)?;
    let vf = ops::fine_samples(v, 2)?;
    let zf = ops::fine_samples(z, 2)?;
    let ue = ops::fine_samples(&ops::mollify(u, moll)?, 2)?;
    let ze = ops::fine_samples(&ops::mollify(z, moll)?, 2)?;
    let pf = ops::fine_samples(&p, 2)?;
    let pe = ops::fine_samples(&ops::mollify(&p, moll)?, 2)?;
    let fine = *uf.grid();
    let len = fine.len();

    let zc = zf.component(0);
    let zec = ze.component(0);
    let (pc, pec) = (pf.component(0), pe.component(0));
    let mut u2 = vec![0.0; len];
    let mut uue = vec![0.0; len];
    for c in 0..dim {
        let (a, b) = (uf.component(c), ue.component(c));
        for x in 0..len {
            u2[x] += a[x] * a[x];
            uue[x] += a[x] * b[x];
        }
    }
    let z2: Vec<f64> = zc.iter().map(|a| a * a).collect();

    // (|u|² v)^ε, (Z² u)^ε, (|u|²)^ε, (Z²)^ε
    let mut cubic = Vec::with_capacity(2 * dim + 2);
    for c in 0..dim {
        cubic.push(u2.iter().zip(vf.component(c)).map(|(a, b)| a * b).collect());
    }
    for c in 0..dim {
        cubic.push(z2.iter().zip(uf.component(c)).map(|(a, b)| a * b).collect());
    }
    cubic.push(u2.clone());
    cubic.push(z2.clone());
    let m = mollified_product(fine, cubic, moll)?;
    let (u2e, z2e) = (m.component(2 * dim), m.component(2 * dim + 1));

    let mut q = PhysicalField::zeros(fine, dim);
    for i in 0..dim {
        let (ui, vi, uei) = (uf.component(i), vf.component(i), ue.component(i));
        let (m1, m3) = (m.component(i), m.component(dim + i));
        let out = q.component_mut(i);
        for x in 0..len {
            out[x] = pec[x] * ui[x]
                + pc[x] * uei[x]
                + 0.5 * (m1[x] - u2e[x] * vi[x])
                + uue[x] * vi[x]
                + 0.5 * (m3[x] - z2e[x] * ui[x])
                + zc[x] * zec[x] * ui[x];
        }
    }
    let div = ops::subsample(&ops::divergence(&q.transform()?)?.inverse(), 2)?;
    let d1 = algebraic_density(v, u, moll)?;
    let d2 = algebraic_density(u, z, moll)?;
    for (x, o) in r.iter_mut().enumerate() {
        *o += div.component(0)[x] + d1.component(0)[x] + d2.component(0)[x];
    }
    if reaction_rate != 0.0 {
        let zs = samples(z);
        let zes = samples(&ops::mollify(z, moll)?);
        for (x, o) in r.iter_mut().enumerate() {
            *o += 2.0 * reaction_rate * zs.component(0)[x] * zes.component(0)[x];
        }
    }
    PhysicalField::from_vec(grid, 1, r)
}

/// `⟨R_ε, χ⟩` by grid quadrature.
pub fn balance_residual(
    window: [&ModelState; 3],
    moll: &Mollifier,
    chi: &PhysicalField,
    reaction_rate: f64,
) -> Result<f64> {
    let r = balance_density(window, moll, reaction_rate)?;
    if chi.grid() != r.grid() || chi.components() != 1 {
        return Err(Error::GridMismatch("test function must be a scalar on the state grid".into()));
    }
    let h = r.grid().cell_volume();
    Ok(h * r.data().iter().zip(chi.data()).map(|(a, b)| a * b).sum::<f64>())
}

/// One row of the balance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceRow {
    pub eps: f64,
    pub dt: f64,
    pub residual: f64,
}

pub const BALANCE_HEADER: &str = "eps,dt,residual";

pub fn balance_csv(rows: &[BalanceRow]) -> String {
    let mut out = String::from(BALANCE_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:?},{:?},{:?}\n", r.eps, r.dt, r.residual));
    }
    out
}
