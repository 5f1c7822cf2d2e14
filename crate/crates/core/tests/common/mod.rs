#![allow(dead_code)]

use sqlaser::{derive_dressed, CouplingMode, DressedParams, ReservoirProfile, SystemParams};

/// Small-photon-number set reachable by the truncated oracle.
pub fn weak_params() -> SystemParams {
    let (omega, delta_a) = (50.0, 1.0);
    SystemParams {
        gamma: 1.0,
        gamma_p: 0.1,
        kappa: 1.0,
        g: 0.5,
        epsilon: (omega * omega - delta_a * delta_a as f64).sqrt() / 2.0,
        delta_a,
        delta_c: 0.3,
    }
}

pub fn weak(mode: CouplingMode) -> DressedParams {
    derive_dressed(&weak_params(), &ReservoirProfile::transparent(), mode).unwrap().with_sideband_rates(2.0, 0.2).unwrap()
}

/// Resonant drive `delta_a = 0` at Rabi frequency `omega` with explicit
/// sideband rates.
pub fn resonant_params(g: f64, omega: f64, kappa: f64) -> SystemParams {
    SystemParams { g, kappa, epsilon: omega / 2.0, ..SystemParams::default() }
}

pub fn resonant(g: f64, omega: f64, gp: f64, gm: f64, kappa: f64, mode: CouplingMode) -> DressedParams {
    derive_dressed(&resonant_params(g, omega, kappa), &ReservoirProfile::transparent(), mode)
        .unwrap()
        .with_sideband_rates(gp, gm)
        .unwrap()
}

/// g = 10, Omega = 100, gamma_+ = 10, gamma_- = 0, kappa = 1.
pub fn full_gap(mode: CouplingMode) -> DressedParams {
    resonant(10.0, 100.0, 10.0, 0.0, 1.0, mode)
}

/// As `full_gap` with a small lower-sideband leak `gamma_- / gamma_+ = 1e-4`.
pub fn leaky_gap(mode: CouplingMode) -> DressedParams {
    resonant(10.0, 100.0, 10.0, 1e-3, 1.0, mode)
}

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqlaser::lindblad::{DensityMatrix, FockConfig};
use sqlaser::numerics::ComplexMatrix;

/// Random full-rank density matrix on Fock levels `0..=cutoff` of both
/// dressed states.
pub fn random_density(fock: FockConfig, cutoff: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = fock.dim();
    let inside = |i: usize| i % fock.levels() <= cutoff;
    let g = ComplexMatrix::from_fn(d, d, |i, j| {
        if inside(i) && inside(j) {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DensityMatrix::from_factor(&g).unwrap()
}
