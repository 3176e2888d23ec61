use std::f64::consts::PI;

use crate::{Error, Result};

/// Number of radial trapezoid nodes on `[0, 1]` for mass and transform integrals.
/// The bump is flat to all orders at the edge, so the rule is spectrally accurate.
const RADIAL_NODES: usize = 2048;

/// Unit bump `exp(−1/(1−t²))` on `|t| < 1`.
pub fn unit_bump(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// `d/dt` of [`unit_bump`] divided by `t`; radial gradients are `x·bump_slope(|x|)`.
fn bump_slope(t: f64) -> f64 {
    let s = 1.0 - t * t;
    if s <= 0.0 {
        0.0
    } else {
        -2.0 * (-1.0 / s).exp() / (s * s)
    }
}

/// Radial C^∞ mollifier `χ_ε(x) = c ε^{−d} exp(−1/(1−|x/ε|²))` of unit mass.
///
/// The constant `c` comes from the same radial quadrature that evaluates the
/// Fourier transform, so the transform at `k = 0` is one to rounding.
#[derive(Debug, Clone)]
pub struct Mollifier {
    epsilon: f64,
    dim: usize,
    norm: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Mollifier {
    pub fn new(epsilon: f64, dim: usize) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::param("epsilon", format!("must be positive, got {epsilon}")));
        }
        if epsilon >= PI {
            return Err(Error::param("epsilon", format!("support must fit the torus, got {epsilon}")));
        }
        if dim != 1 && dim != 3 {
            return Err(Error::param("dim", format!("must be 1 or 3, got {dim}")));
        }
        let h = 1.0 / RADIAL_NODES as f64;
        let mut nodes = Vec::with_capacity(RADIAL_NODES);
        let mut weights = Vec::with_capacity(RADIAL_NODES);
        // Even extension of the radial integrand to [-1, 1]: the t = 0 node
        // carries half weight.
        for i in 0..RADIAL_NODES {
            let t = i as f64 * h;
            let w = if i == 0 { 0.5 * h } else { h };
            let radial = match dim {
                1 => 2.0,
                _ => 4.0 * PI * t * t,
            };
            nodes.push(t);
            weights.push(w * radial * unit_bump(t));
        }
        let mass: f64 = weights.iter().sum();
        Ok(Mollifier {
            epsilon,
            dim,
            norm: 1.0 / mass,
            nodes,
            weights,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mass of the kernel under its own radial quadrature.
    pub fn mass(&self) -> f64 {
        self.norm * self.weights.iter().sum::<f64>()
    }

    fn scale(&self) -> f64 {
        self.norm / self.epsilon.powi(self.dim as i32)
    }

    /// Kernel value at displacement `x` (only the first `dim` entries are read).
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        let r = self.radius(x) / self.epsilon;
        self.scale() * unit_bump(r)
    }

    /// Analytic gradient `∇χ_ε(x)`.
    pub fn gradient(&self, x: &[f64; 3]) -> [f64; 3] {
        let r = self.radius(x) / self.epsilon;
        let s = self.scale() * bump_slope(r) / (self.epsilon * self.epsilon);
        let mut g = [0.0; 3];
        for a in 0..self.dim {
            g[a] = s * x[a];
        }
        g
    }

    fn radius(&self, x: &[f64; 3]) -> f64 {
        x[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Continuum Fourier transform `∫ χ_ε(x) e^{−ik·x} dx` at `|k| = k`.
    pub fn transform(&self, k: f64) -> f64 {
        let ke = k * self.epsilon;
        if ke == 0.0 {
            return 1.0;
        }
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| {
                let a = ke * t;
                let kernel = match self.dim {
                    1 => a.cos(),
                    _ => {
                        if a == 0.0 {
                            1.0
                        } else {
                            a.sin() / a
                        }
                    }
                };
                w * kernel
            })
            .sum();
        self.norm * sum
    }
}
