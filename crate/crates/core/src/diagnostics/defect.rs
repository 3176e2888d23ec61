use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{loglog_fit, LogLogFit};
use crate::spectral::ops;
use crate::spectral::{Grid, Mollifier, PhysicalField, SpectralField};
use crate::{Error, Result};

/// Default number of ξ-quadrature points per axis over `[−ε, ε]`.
pub const DEFAULT_QUADRATURE_POINTS: usize = 17;

/// Fixed number of quadrature chunks; partial sums are added in chunk order,
/// so results do not depend on the thread count.
const QUADRATURE_CHUNKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefectKind {
    /// Velocity defect, advecting `v`, advected `u`.
    D1,
    /// Reactant defect, advecting `u`, advected `Z`.
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectForm {
    Increment,
    Algebraic,
    Both,
}

impl DefectForm {
    fn increment(self) -> bool {
        matches!(self, DefectForm::Increment | DefectForm::Both)
    }

    fn algebraic(self) -> bool {
        matches!(self, DefectForm::Algebraic | DefectForm::Both)
    }
}

/// Fields entering the defects of one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct DefectInputs<'a> {
    pub v: &'a SpectralField,
    pub u: &'a SpectralField,
    pub z: &'a SpectralField,
}

impl<'a> DefectInputs<'a> {
    fn validate(&self) -> Result<Grid> {
        let grid = *self.u.grid();
        if *self.v.grid() != grid || *self.z.grid() != grid {
            return Err(Error::GridMismatch("defect inputs live on different grids".into()));
        }
        let dim = grid.dim();
        if self.u.components() != dim || self.v.components() != dim {
            return Err(Error::ComponentMismatch {
                expected: format!("u and v with {dim} components"),
                found: self.u.components().min(self.v.components()),
            });
        }
        if self.z.components() != 1 {
            return Err(Error::ComponentMismatch {
                expected: "scalar Z".into(),
                found: self.z.components(),
            });
        }
        Ok(grid)
    }

    /// `(advecting, advected)` pair of a defect.
    fn pair(&self, kind: DefectKind) -> (&'a SpectralField, &'a SpectralField) {
        match kind {
            DefectKind::D1 => (self.v, self.u),
            DefectKind::D2 => (self.u, self.z),
        }
    }
}

/// Tensor-product nodes on `[−ε, ε]^dim` strictly inside the support ball,
/// excluding the origin where the increments vanish. Returns the nodes and
/// the common cell weight.
fn quadrature_nodes(dim: usize, eps: f64, points: usize) -> (Vec<[f64; 3]>, f64) {
    let h = 2.0 * eps / (points - 1) as f64;
    let axis: Vec<f64> = (0..points).map(|i| -eps + i as f64 * h).collect();
    let mut nodes = Vec::new();
    let zero = [0.0];
    let (ys, zs): (&[f64], &[f64]) = if dim == 3 { (&axis, &axis) } else { (&zero, &zero) };
    for &z in zs {
        for &y in ys {
            for &x in &axis {
                let r2 = x * x + y * y + z * z;
                if r2 < eps * eps && r2 > 0.0 {
                    nodes.push([x, y, z]);
                }
            }
        }
    }
    (nodes, h.powi(dim as i32))
}

/// Phase factors `e^{ik·ξ}` with Nyquist slots using `cos(n/2·ξ)`.
fn phase_factors(grid: &Grid, xi: &[f64; 3]) -> Vec<Complex64> {
    let n = grid.n();
    let per_axis: Vec<Vec<Complex64>> = (0..grid.dim())
        .map(|a| {
            (0..n)
                .map(|i| {
                    let k = grid.wavenumber(i) as f64;
                    if grid.is_nyquist(i) {
                        Complex64::new((k * xi[a]).cos(), 0.0)
                    } else {
                        Complex64::from_polar(1.0, k * xi[a])
                    }
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(grid.len());
    match grid.dim() {
        1 => out.extend_from_slice(&per_axis[0]),
        _ => {
            for i2 in 0..n {
                for i1 in 0..n {
                    let f12 = per_axis[1][i1] * per_axis[2][i2];
                    out.extend(per_axis[0].iter().map(|p| p * f12));
                }
            }
        }
    }
    out
}

/// Increment-form densities `½∫∇χ_ε(ξ)·δa |δb|² dξ` for several `(a, b)`
/// pairs drawn from `fields`. Each field is shifted once per node.
fn increment_densities(
    fields: &[&SpectralField],
    pairs: &[(usize, usize)],
    moll: &Mollifier,
    points: usize,
) -> Result<Vec<PhysicalField>> {
    if points < 3 {
        return Err(Error::param("quadrature_points", "need at least 3 points per axis"));
    }
    let grid = *fields[0].grid();
    let dim = grid.dim();
    let base = SpectralField::stack(fields)?;
    let offsets: Vec<usize> = fields
        .iter()
        .scan(0, |acc, f| {
            let o = *acc;
            *acc += f.components();
            Some(o)
        })
        .collect();
    let samples = base.inverse();
    let len = grid.len();
    let (nodes, weight) = quadrature_nodes(dim, moll.epsilon(), points);

    let chunk = nodes.len().div_ceil(QUADRATURE_CHUNKS).max(1);
    let partials: Vec<Vec<Vec<f64>>> = nodes
        .par_chunks(chunk)
        .map(|chunk_nodes| {
            let mut acc = vec![vec![0.0; len]; pairs.len()];
            let mut shifted = base.clone();
            let mut db2 = vec![0.0; len];
            for xi in chunk_nodes {
                let g = moll.gradient(xi);
                let phase = phase_factors(&grid, xi);
                for c in 0..base.components() {
                    let src = base.component(c);
                    for ((o, s), p) in shifted.component_mut(c).iter_mut().zip(src).zip(&phase) {
                        *o = s * p;
                    }
                }
                let moved = shifted.inverse();
                for (slot, &(ia, ib)) in pairs.iter().enumerate() {
                    let (oa, ob) = (offsets[ia], offsets[ib]);
                    db2.iter_mut().for_each(|v| *v = 0.0);
                    for c in 0..fields[ib].components() {
                        let (m, s) = (moved.component(ob + c), samples.component(ob + c));
                        for x in 0..len {
                            let d = m[x] - s[x];
                            db2[x] += d * d;
                        }
                    }
                    let out = &mut acc[slot];
                    for a in 0..dim {
                        let (m, s) = (moved.component(oa + a), samples.component(oa + a));
                        let ga = 0.5 * weight * g[a];
                        for x in 0..len {
                            out[x] += ga * (m[x] - s[x]) * db2[x];
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut totals = vec![vec![0.0; len]; pairs.len()];
    for part in partials {
        for (t, p) in totals.iter_mut().zip(part) {
            for (a, b) in t.iter_mut().zip(p) {
                *a += b;
            }
        }
    }
    totals
        .into_iter()
        .map(|d| PhysicalField::from_vec(grid, 1, d))
        .collect()
}

fn products(fine: Grid, parts: &[Vec<f64>]) -> Result<SpectralField> {
    let comps = parts.len();
    let mut f = PhysicalField::zeros(fine, comps);
    for (c, p) in parts.iter().enumerate() {
        f.component_mut(c).copy_from_slice(p);
    }
    f.transform()
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Algebraic-form density
/// `−½∂_i(a_i|b|²)^ε + ½a_i∂_i(|b|²)^ε + b_j∂_i(b_j a_i)^ε − a_i b_j ∂_i b_j^ε`
/// at the base grid points. Products are formed on a twice-refined grid,
/// exact for inputs inside the dealiased band.
pub(crate) fn algebraic_density(a: &SpectralField, b: &SpectralField, moll: &Mollifier) -> Result<PhysicalField> {
    let grid = *a.grid();
    let dim = grid.dim();
    let af = ops::fine_samples(a, 2)?;
    let bf = ops::fine_samples(b, 2)?;
    let fine = *af.grid();
    let len = fine.len();
    let mb = b.components();

    let mut b2 = vec![0.0; len];
    for j in 0..mb {
        for (o, v) in b2.iter_mut().zip(bf.component(j)) {
            *o += v * v;
        }
    }
    let mut total = vec![0.0; len];

    // −½ ∂_i (a_i |b|²)^ε
    let flux: Vec<Vec<f64>> = (0..dim).map(|i| mul(af.component(i), &b2)).collect();
    let t1 = ops::divergence(&ops::mollify(&products(fine, &flux)?, moll)?)?.inverse();
    for (o, v) in total.iter_mut().zip(t1.component(0)) {
        *o -= 0.5 * v;
    }

    // ½ a_i ∂_i (|b|²)^ε
    let b2m = ops::mollify(&products(fine, &[b2])?, moll)?;
    let t2 = ops::gradient(&b2m)?.inverse();
    for i in 0..dim {
        for ((o, g), ai) in total.iter_mut().zip(t2.component(i)).zip(af.component(i)) {
            *o += 0.5 * ai * g;
        }
    }

    // b_j ∂_i (b_j a_i)^ε
    for j in 0..mb {
        let bj = bf.component(j);
        let flux: Vec<Vec<f64>> = (0..dim).map(|i| mul(bj, af.component(i))).collect();
        let t3 = ops::divergence(&ops::mollify(&products(fine, &flux)?, moll)?)?.inverse();
        for ((o, d), bv) in total.iter_mut().zip(t3.component(0)).zip(bj) {
            *o += bv * d;
        }
    }

    // −a_i b_j ∂_i b_j^ε; the mollified derivative is exact on the base grid.
    let jac = if mb == 1 {
        ops::gradient(&ops::mollify(b, moll)?)?
    } else {
        ops::jacobian(&ops::mollify(b, moll)?)?
    };
    let jac = ops::fine_samples(&jac, 2)?;
    for j in 0..mb {
        let bj = bf.component(j);
        for i in 0..dim {
            let g = jac.component(j * dim + i);
            let ai = af.component(i);
            for x in 0..len {
                total[x] -= ai[x] * bj[x] * g[x];
            }
        }
    }
    ops::subsample(&PhysicalField::from_vec(fine, 1, total)?, 2)
}

/// Space integrals of one defect density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectValue {
    /// `∫|D_ε| dx`.
    pub abs: f64,
    /// `∫D_ε dx`.
    pub signed: f64,
}

impl DefectValue {
    fn of(d: &PhysicalField) -> Self {
        let h = d.grid().cell_volume();
        DefectValue {
            abs: h * d.data().iter().map(|v| v.abs()).sum::<f64>(),
            signed: d.integral(0),
        }
    }
}

/// One defect at one `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectEntry {
    pub kind: DefectKind,
    pub eps: f64,
    pub increment: Option<DefectValue>,
    pub algebraic: Option<DefectValue>,
    /// `∫|D_inc − D_alg| / ∫|D_alg|` when both forms were computed.
    pub discrepancy: Option<f64>,
    /// Densities at the base grid points, in the order increment, algebraic.
    pub fields: Vec<PhysicalField>,
}

impl DefectEntry {
    /// The increment value when present, the algebraic one otherwise.
    pub fn primary(&self) -> DefectValue {
        self.increment.or(self.algebraic).expect("at least one form is computed")
    }
}

fn relative_l1(a: &PhysicalField, b: &PhysicalField) -> f64 {
    let diff: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs()).sum();
    let scale: f64 = b.data().iter().map(|v| v.abs()).sum();
    if scale > 0.0 {
        diff / scale
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn assemble(
    kind: DefectKind,
    eps: f64,
    inc: Option<PhysicalField>,
    alg: Option<PhysicalField>,
) -> DefectEntry {
    let discrepancy = match (&inc, &alg) {
        (Some(i), Some(a)) => Some(relative_l1(i, a)),
        _ => None,
    };
    DefectEntry {
        kind,
        eps,
        increment: inc.as_ref().map(DefectValue::of),
        algebraic: alg.as_ref().map(DefectValue::of),
        discrepancy,
        fields: inc.into_iter().chain(alg).collect(),
    }
}

/// `D_{1,ε}` or `D_{2,ε}` of one snapshot in the requested form(s).
pub fn defect(
    inputs: DefectInputs<'_>,
    moll: &Mollifier,
    kind: DefectKind,
    form: DefectForm,
    points: usize,
) -> Result<DefectEntry> {
    let grid = inputs.validate()?;
    if moll.dim() != grid.dim() {
        return Err(Error::GridMismatch("mollifier and fields differ in dimension".into()));
    }
    let (a, b) = inputs.pair(kind);
    let inc = if form.increment() {
        Some(increment_densities(&[a, b], &[(0, 1)], moll, points)?.remove(0))
    } else {
        None
    };
    let alg = if form.algebraic() {
        Some(algebraic_density(a, b, moll)?)
    } else {
        None
    };
    Ok(assemble(kind, moll.epsilon(), inc, alg))
}

/// Both defects at one `ε`, sharing the shifted fields between them.
pub fn defect_pair(
    inputs: DefectInputs<'_>,
    moll: &Mollifier,
    form: DefectForm,
    points: usize,
) -> Result<(DefectEntry, DefectEntry)> {
    let grid = inputs.validate()?;
    if moll.dim() != grid.dim() {
        return Err(Error::GridMismatch("mollifier and fields differ in dimension".into()));
    }
    let (mut inc1, mut inc2) = (None, None);
    if form.increment() {
        let mut d = increment_densities(&[inputs.v, inputs.u, inputs.z], &[(0, 1), (1, 2)], moll, points)?;
        inc2 = d.pop();
        inc1 = d.pop();
    }
    let (mut alg1, mut alg2) = (None, None);
    if form.algebraic() {
        alg1 = Some(algebraic_density(inputs.v, inputs.u, moll)?);
        alg2 = Some(algebraic_density(inputs.u, inputs.z, moll)?);
    }
    let eps = moll.epsilon();
    Ok((
        assemble(DefectKind::D1, eps, inc1, alg1),
        assemble(DefectKind::D2, eps, inc2, alg2),
    ))
}

/// Defects over a ladder of mollification scales.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub eps_list: Vec<f64>,
    pub form: DefectForm,
    pub d1: Vec<DefectEntry>,
    pub d2: Vec<DefectEntry>,
    /// Log-log slope of `∫|D_{1,ε}|` against `ε`.
    pub slope_d1: Option<LogLogFit>,
    pub slope_d2: Option<LogLogFit>,
}

pub const DEFECT_HEADER: &str = "eps,form,D1_abs,D1_signed,D2_abs,D2_signed,discrepancy";

impl DefectReport {
    /// Largest form discrepancy over the ladder and both defects.
    pub fn max_discrepancy(&self) -> Option<f64> {
        self.d1
            .iter()
            .chain(&self.d2)
            .filter_map(|e| e.discrepancy)
            .reduce(f64::max)
    }

    /// One row per `ε` and computed form; the discrepancy column holds the
    /// larger of the two defects' values and is empty for single-form runs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DEFECT_HEADER);
        out.push('\n');
        for (e1, e2) in self.d1.iter().zip(&self.d2) {
            let disc = match (e1.discrepancy, e2.discrepancy) {
                (Some(a), Some(b)) => format!("{:?}", a.max(b)),
                _ => String::new(),
            };
            let rows = [
                ("increment", e1.increment, e2.increment),
                ("algebraic", e1.algebraic, e2.algebraic),
            ];
            for (name, a, b) in rows {
                if let (Some(a), Some(b)) = (a, b) {
                    out.push_str(&format!(
                        "{:?},{name},{:?},{:?},{:?},{:?},{disc}\n",
                        e1.eps, a.abs, a.signed, b.abs, b.signed
                    ));
                }
            }
        }
        out
    }
}

/// Both defects for every `ε` in `eps_list` (each below π).
pub fn defect_report(
    inputs: DefectInputs<'_>,
    eps_list: &[f64],
    form: DefectForm,
    points: usize,
) -> Result<DefectReport> {
    if eps_list.is_empty() {
        return Err(Error::param("eps_list", "list is empty"));
    }
    let dim = inputs.validate()?.dim();
    let mut d1 = Vec::with_capacity(eps_list.len());
    let mut d2 = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let moll = Mollifier::new(eps, dim)?;
        let (a, b) = defect_pair(inputs, &moll, form, points)?;
        d1.push(a);
        d2.push(b);
    }
    let slope = |entries: &[DefectEntry]| -> Option<LogLogFit> {
        if entries.len() < 2 {
            return None;
        }
        let y: Vec<f64> = entries.iter().map(|e| e.primary().abs).collect();
        loglog_fit(eps_list, &y).ok()
    };
    Ok(DefectReport {
        eps_list: eps_list.to_vec(),
        form,
        slope_d1: slope(&d1),
        slope_d2: slope(&d2),
        d1,
        d2,
    })
}
