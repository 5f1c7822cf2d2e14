//! Dense complex linear algebra and quadrature shared by the physics modules.
//!
//! Everything here is deterministic: identical inputs produce bit-identical
//! outputs (no threading, fixed summation order).

mod expm;
mod hessenberg;
mod lu;
mod matrix;
mod quadrature;

pub use expm::{expm, expm_action};
pub use hessenberg::ShiftedSolver;
pub use lu::{constrained_nullvector, lu_solve, LuFactorization, Solution, SINGULAR_RCOND};
pub use matrix::{vec_norm, vec_norm_one, ComplexMatrix};
pub use quadrature::{integrate_line, richardson, trapezoid, uniform_grid, LineIntegral};

pub(crate) use lu::factor_checked;
