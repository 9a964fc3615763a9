//! The constructive regularity pipeline: correlation with structure, energy
//! increments, Koopman–von Neumann and Szemerédi decompositions (single and
//! simultaneous), strong triangle removal with an exhaustively checked
//! certificate, and the Roth tripartite encoding.

mod factor;
mod increment;
mod removal;
mod roth;
mod srl;

pub use factor::{atom_table, cond_exp_product, energy, AtomTable, ProductFactor};
pub use increment::{
    correlate_with_structure, correlate_with_structure3, energy_increment_step, kvn_decompose, Correlation, Correlation3,
    IncrementStep, KvnOutcome,
};
pub use removal::{
    find_surviving_triple, graph_triangle_removal, keeps_edge, strong_triangle_removal, GraphRemoval, RemovalCertificate,
    RemovalConfig, TauSchedule,
};
pub(crate) use removal::removal_certificate;
pub use roth::{roth_pipeline, RothReport};
pub use srl::{regularity_decompose, simultaneous_regularity, Decomposition, Growth, SimultaneousDecomposition};
