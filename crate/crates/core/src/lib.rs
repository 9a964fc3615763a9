//! Finite laboratory for Szemerédi-type combinatorics: progression counting,
//! extremal constructions, colouring witnesses, finite dynamical systems,
//! box norms, the constructive regularity / triangle-removal pipeline, and
//! its relative version over sparse random graphs.
//!
//! Numerical kernels are generic over [`Scalar`]; [`Rational`] gives exact
//! oracle-grade runs and `f64` the performance runs.

pub mod boxnorms;
pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod partition;
pub mod progressions;
pub mod ramsey;
pub mod regularity;
pub mod relative;
pub mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use partition::Factor;
pub use progressions::{count_progressions, APCount, ResidueSet};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;
