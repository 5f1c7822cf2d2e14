use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("undriven emitter: generalized Rabi frequency is zero, dressed frame undefined")]
    UndrivenEmitter,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular to working precision (reciprocal condition {rcond:.3e})")]
    Singular { rcond: f64 },

    #[error("nullspace is not one-dimensional: {0}")]
    Nullspace(String),

    #[error("moment system is unstable or singular for this parameter set: {0}")]
    Unstable(String),

    #[error("closed form is stated only for a resonant cavity (delta_c = 0), got delta_c = {0}")]
    CavityNotResonant(f64),

    #[error("closed form undefined: {0}")]
    ClosedFormUndefined(&'static str),

    #[error("moments are not conjugate-consistent: quadrature variance has imaginary part {0:.3e}")]
    NotConjugateConsistent(f64),

    #[error("central-line rate gamma0 = {0} is negative: generator is not of Lindblad form")]
    NegativeRate(f64),

    #[error("density matrix invalid: {0}")]
    InvalidDensity(String),

    #[error("integrator misconfigured: {0}")]
    Integrator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
