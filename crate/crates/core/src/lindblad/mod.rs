//! Brute-force master-equation oracle on a truncated Fock space.

mod liouvillian;
mod operators;
mod validate;

pub use liouvillian::{
    build_liouvillian, moments_from_density, spectrum_from_liouvillian, steady_density, unvectorize, vectorize, Liouvillian,
    SparseMatrix,
};
pub use operators::{
    is_positive_semidefinite, DensityMatrix, FockConfig, OperatorMatrix, Operators, HERMITICITY_TOLERANCE, POSITIVITY_TOLERANCE,
    TRACE_TOLERANCE,
};
pub use validate::{validate_effective, validate_effective_with, DiscrepancyReport, MIN_STEPS_PER_PERIOD};
