//! Littlewood–Paley blocks, inhomogeneous Besov norms, Bony paraproducts and
//! structure-function regularity estimates.

mod norm;
mod paraproduct;
mod partition;
mod structure;
mod synthetic;

pub use norm::{besov_formula, besov_norm, lp_norm, BesovReport};
pub use paraproduct::{paraproduct, Paraproduct};
pub use partition::{block_profile, low_pass_profile, lp_block, lp_blocks, DyadicPartition, INNER, OUTER};
pub use structure::{regularity_fit, structure_function, RegularityFit, StructureCurve};
pub use synthetic::synthetic_field;
