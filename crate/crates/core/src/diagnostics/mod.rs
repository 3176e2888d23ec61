//! Energy diagnostics: total energy, spectral flux, Duchon–Robert defects,
//! increment integrals, the local balance residual and shock dissipation.

mod balance;
mod burgers;
mod defect;
mod energy;
mod flux;
mod increments;

pub use balance::{balance_csv, balance_density, balance_residual, bump_test_function, BalanceRow, BALANCE_HEADER};
pub use burgers::{richardson, shock_defect, shock_dissipation, Extrapolation, ShockReport, MIN_SHOCK_POINTS};
pub use defect::{
    defect, defect_pair, defect_report, DefectEntry, DefectForm, DefectInputs, DefectKind, DefectReport, DefectValue,
    DEFAULT_QUADRATURE_POINTS, DEFECT_HEADER,
};
pub use energy::{energy_equality_check, total_energy, Energy};
pub use flux::{flux_density, flux_density_padded, flux_spectrum, FluxReport, FLUX_PADDING};
pub use increments::{increment_curve, Directions, IncrementCurve, INCREMENT_HEADER};
pub(crate) use increments::{check_magnitudes, shifted_samples};
