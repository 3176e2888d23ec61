use serde::{Deserialize, Serialize};

use crate::spectral::ops;
use crate::spectral::{PhysicalField, SpectralField};
use crate::{Error, Result};

/// Direction sets for averaging increments over separations of fixed length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directions {
    /// `±e_i` for every axis.
    Axes,
    /// The 12 vertices of a regular icosahedron (3D only).
    Icosahedral,
}

impl Directions {
    pub fn unit_vectors(self, dim: usize) -> Result<Vec<[f64; 3]>> {
        match (self, dim) {
            (Directions::Axes, _) => Ok((0..dim)
                .flat_map(|a| {
                    [1.0, -1.0].into_iter().map(move |s| {
                        let mut e = [0.0; 3];
                        e[a] = s;
                        e
                    })
                })
                .collect()),
            (Directions::Icosahedral, 3) => {
                let phi = 0.5 * (1.0 + 5f64.sqrt());
                let norm = (1.0 + phi * phi).sqrt();
                let mut out = Vec::with_capacity(12);
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        let (a, b) = (s1 / norm, s2 * phi / norm);
                        out.push([0.0, a, b]);
                        out.push([a, b, 0.0]);
                        out.push([b, 0.0, a]);
                    }
                }
                Ok(out)
            }
            (Directions::Icosahedral, d) => Err(Error::param(
                "directions",
                format!("icosahedral directions need a 3-dimensional grid, got dimension {d}"),
            )),
        }
    }
}

pub(crate) fn check_magnitudes(xi: &[f64]) -> Result<()> {
    if xi.is_empty() {
        return Err(Error::param("xi", "list is empty"));
    }
    if let Some(bad) = xi.iter().find(|x| !(**x > 0.0 && **x < std::f64::consts::PI)) {
        return Err(Error::param("xi", format!("magnitudes must lie in (0, π), got {bad}")));
    }
    Ok(())
}

/// Samples of every component of `f` displaced by `ξ`, i.e. `f(x + ξ)`.
pub(crate) fn shifted_samples(f: &SpectralField, xi: [f64; 3]) -> PhysicalField {
    ops::shift(f, &xi[..f.grid().dim()]).inverse()
}

/// Direction-averaged increment integrals per separation length.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementCurve {
    pub xi: Vec<f64>,
    /// `∫|δv||δu|² dx`.
    pub i1: Vec<f64>,
    /// `∫|δu||δZ|² dx`.
    pub i2: Vec<f64>,
    /// `I₁/|ξ|`, normalized by its value at the largest `|ξ|`.
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
}

pub const INCREMENT_HEADER: &str = "xi,I1,I2,sigma1,sigma2";

impl IncrementCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(INCREMENT_HEADER);
        out.push('\n');
        for i in 0..self.xi.len() {
            out.push_str(&format!(
                "{:?},{:?},{:?},{:?},{:?}\n",
                self.xi[i], self.i1[i], self.i2[i], self.sigma1[i], self.sigma2[i]
            ));
        }
        out
    }
}

fn sigma_profile(xi: &[f64], values: &[f64]) -> Vec<f64> {
    let ratio: Vec<f64> = xi.iter().zip(values).map(|(x, v)| v / x).collect();
    let last = xi
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| ratio[i])
        .unwrap_or(0.0);
    if last > 0.0 {
        ratio.iter().map(|r| r / last).collect()
    } else {
        vec![0.0; ratio.len()]
    }
}

fn pointwise_norm(f: &PhysicalField, base: &PhysicalField, offset: usize, comps: usize) -> Vec<f64> {
    let len = f.grid().len();
    let mut out = vec![0.0; len];
    for c in offset..offset + comps {
        let (a, b) = (f.component(c), base.component(c));
        for x in 0..len {
            let d = a[x] - b[x];
            out[x] += d * d;
        }
    }
    out.iter_mut().for_each(|v| *v = v.sqrt());
    out
}

/// Direction-averaged `∫|δv||δu|²` and `∫|δu||δZ|²` for each `|ξ|`.
pub fn increment_curve(
    v: &SpectralField,
    u: &SpectralField,
    z: &SpectralField,
    xi: &[f64],
    directions: Directions,
) -> Result<IncrementCurve> {
    check_magnitudes(xi)?;
    let grid = *u.grid();
    if *v.grid() != grid || *z.grid() != grid {
        return Err(Error::GridMismatch("increment inputs live on different grids".into()));
    }
    let dim = grid.dim();
    if u.components() != dim || v.components() != dim || z.components() != 1 {
        return Err(Error::ComponentMismatch {
            expected: format!("u, v with {dim} components and scalar Z"),
            found: u.components(),
        });
    }
    let dirs = directions.unit_vectors(dim)?;
    let stacked = SpectralField::stack(&[v, u, z])?;
    let base = stacked.inverse();
    let h = grid.cell_volume();
    let mut i1 = Vec::with_capacity(xi.len());
    let mut i2 = Vec::with_capacity(xi.len());
    for &r in xi {
        let (mut s1, mut s2) = (0.0, 0.0);
        for e in &dirs {
            let moved = shifted_samples(&stacked, [r * e[0], r * e[1], r * e[2]]);
            let dv = pointwise_norm(&moved, &base, 0, dim);
            let du = pointwise_norm(&moved, &base, dim, dim);
            let dz = pointwise_norm(&moved, &base, 2 * dim, 1);
            s1 += h * dv.iter().zip(&du).map(|(a, b)| a * b * b).sum::<f64>();
            s2 += h * du.iter().zip(&dz).map(|(a, b)| a * b * b).sum::<f64>();
        }
        let m = dirs.len() as f64;
        i1.push(s1 / m);
        i2.push(s2 / m);
    }
    Ok(IncrementCurve {
        xi: xi.to_vec(),
        sigma1: sigma_profile(xi, &i1),
        sigma2: sigma_profile(xi, &i2),
        i1,
        i2,
    })
}
