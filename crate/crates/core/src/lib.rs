//! Pseudo-spectral simulation of the inviscid and viscous Leray-α reactive
//! flow model on the periodic torus, together with the diagnostics used to
//! study its energy balance: spectral energy flux, Duchon–Robert defect
//! terms, increment integrals, Littlewood–Paley blocks and Besov norms.
//!
//! Fourier coefficients follow the series normalization
//! `f(x) = Σ_k f̂_k e^{ik·x}` on `[0, 2π)^dim`, so `∫|f|² dx = (2π)^dim Σ|f̂_k|²`.
//! Energies carry no factor ½: `E = ‖u‖²_{L²} + ‖Z‖²_{L²}`.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod besov;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fit;
pub mod model;
pub mod spectral;

pub use error::{Error, Result};
