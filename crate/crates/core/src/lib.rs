//! Driven two-level emitter in a cavity with a band-gap reservoir: steady
//! field moments, quadrature squeezing and cavity spectra, with and without
//! the non-secular dressed-state couplings, plus a Lindblad oracle.

pub mod error;
pub mod lindblad;
pub mod model;
pub mod moments;
pub mod numerics;
pub mod quadrature;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{band_edge_profile, derive_dressed, CouplingMode, DressedParams, ReservoirProfile, SystemParams};
pub use moments::{assemble, closed_form_steady, reduced_steady, Moment, MomentSystem, MomentVector};
pub use quadrature::{variance_closed_form, variance_from_moments, variance_minus, VarianceResult};
pub use spectrum::{
    elastic_weight, incoherent_closed_form, incoherent_regression, squeezing_spectrum, RegressionSubsystem, SpectrumKind,
    SpectrumSamples,
};
