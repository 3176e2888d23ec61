//! Dynamics of the filtered reactive flow: parameters, state, right-hand
//! side, pressure reconstruction, RK4 stepping and initial conditions.

mod dynamics;
mod init;
mod params;
mod run;
mod state;

pub use dynamics::{pressure_solve, Model, Tendency, Variant, CFL_VELOCITY_FLOOR};
pub use init::{initial_condition, random_spectral_field, sawtooth, InitialKind, InitialSpec};
pub use params::{arrhenius_phi, ModelParams};
pub use run::{integrate, series_csv, step_count, Cadence, EnergySample, Trajectory, SERIES_HEADER};
pub use state::ModelState;
