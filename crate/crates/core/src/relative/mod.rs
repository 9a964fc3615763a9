//! The sparse extension: a G(n,p) host graph and its weight ν, the linear
//! forms check, dual functions and dual factors, the structure theorem
//! fν = f₁ + f₂ + f₃, and relative triangle removal.

mod dual;
mod experiment;
mod forms;
mod structure;
mod weight;

pub use dual::{build_dual_factor, dual_function, DualFactor};
pub use experiment::{relative_removal_experiment, RelativeRemovalConfig, RelativeRemovalReport};
pub use forms::{relative_gvn_check, RelativeGvn};
pub use structure::{structure_decompose, StructureConfig, StructureDecomposition, StructureInvariants};
pub use weight::{
    linear_forms_check, sample_gnp_weight, sample_gnp_weight_unchecked, Correlation, LinearFormsReport, SparseWeight,
    DEFAULT_OCTAHEDRAL_GUARD,
};
