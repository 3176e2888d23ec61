//! Periodic-torus spectral infrastructure.

mod fft;
mod field;
mod grid;
mod mollifier;
pub mod ops;
pub mod snapshot;

pub use field::{PhysicalField, SpectralField};
pub use grid::Grid;
pub use mollifier::{unit_bump, Mollifier};
pub use ops::{Derivative, HelmholtzDirection};
pub use snapshot::Snapshot;
