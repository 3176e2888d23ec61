use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants of the filtered reactive flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Helmholtz filter length.
    pub alpha: f64,
    pub nu: f64,
    /// Species diffusion coefficient (Fick's law).
    pub diff_d: f64,
    /// Reaction rate `K`.
    #[serde(rename = "K")]
    pub k_rate: f64,
    /// Arrhenius activation `A`.
    #[serde(rename = "A")]
    pub activation: f64,
    pub theta_i: f64,
    pub theta_bar: f64,
}

impl Default for ModelParams {
    /// Reaction-off scenario: `θ̄ ≤ θ_i`.
    fn default() -> Self {
        ModelParams {
            alpha: 0.25,
            nu: 0.0,
            diff_d: 0.0,
            k_rate: 1.0,
            activation: 1.0,
            theta_i: 1.0,
            theta_bar: 0.5,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("alpha", self.alpha),
            ("nu", self.nu),
            ("diff_d", self.diff_d),
            ("K", self.k_rate),
            ("theta_bar", self.theta_bar),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("A", self.activation), ("theta_i", self.theta_i)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Effective linear decay rate `Kφ(θ̄)` of the reactant.
    pub fn reaction_rate(&self) -> f64 {
        self.k_rate * arrhenius_phi(self.theta_bar, self).unwrap_or(0.0)
    }
}

/// Arrhenius ignition law: zero up to the ignition temperature, `e^{−A/θ}` above it.
pub fn arrhenius_phi(theta: f64, params: &ModelParams) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::param("theta", format!("temperature must be >= 0, got {theta}")));
    }
    if theta <= params.theta_i {
        Ok(0.0)
    } else {
        Ok((-params.activation / theta).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_up_to_ignition() {
        let p = ModelParams::default();
        assert_eq!(arrhenius_phi(p.theta_i, &p).unwrap(), 0.0);
        assert_eq!(arrhenius_phi(0.0, &p).unwrap(), 0.0);
        assert!(arrhenius_phi(-0.1, &p).is_err());
    }

    #[test]
    fn evaluates_exponential_above_ignition() {
        let p = ModelParams {
            activation: 3.0,
            theta_i: 1.0,
            ..ModelParams::default()
        };
        let v = arrhenius_phi(3.0, &p).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn monotone_above_ignition() {
        let p = ModelParams {
            activation: 2.0,
            theta_i: 0.5,
            ..ModelParams::default()
        };
        let mut last = 0.0;
        for i in 1..200 {
            let v = arrhenius_phi(0.5 + 0.05 * i as f64, &p).unwrap();
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn default_is_reaction_free() {
        let p = ModelParams::default();
        p.validate().unwrap();
        assert_eq!(p.reaction_rate(), 0.0);
        let bad = ModelParams { nu: -1.0, ..p };
        assert!(bad.validate().is_err());
    }
}
