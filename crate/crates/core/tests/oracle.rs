mod common;

use common::{weak, weak_params};
use sqlaser::lindblad::{build_liouvillian, spectrum_from_liouvillian, steady_density, FockConfig};
use sqlaser::numerics::uniform_grid;
use sqlaser::{assemble, incoherent_regression, CouplingMode};

#[test]
fn weak_set_oracle_agrees_with_moment_solve() {
    let d = weak(CouplingMode::NonSecular);
    let dc = weak_params().delta_c;
    let l = build_liouvillian(&d, dc, FockConfig::new(25).unwrap()).unwrap();
    let rho = steady_density(&l).unwrap();
    let exact = assemble(&d, dc).steady_state().unwrap();
    let dev = l.moments(&rho).max_relative_difference(&exact);
    assert!(dev < 1e-6);
    let grid = uniform_grid(-3.0, 3.0, 201);
    let s = spectrum_from_liouvillian(&l, &rho, &grid).unwrap();
    let r = incoherent_regression(&d, dc, &exact, &grid).unwrap();
    let peak = r.values.iter().cloned().fold(0.0, f64::max);
    let err = s.values.iter().zip(&r.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-4 * peak);
}

#[test]
fn closure_exact_for_random_states() {
    let fock = FockConfig::new(25).unwrap();
    let d = weak(CouplingMode::NonSecular);
    let dc = weak_params().delta_c;
    let l = build_liouvillian(&d, dc, fock).unwrap();
    let sys = assemble(&d, dc);
    for seed in 0..20 {
        let rho = common::random_density(fock, 12, seed);
        let r = l.closure_residual(&sys, &rho);
        assert!(r < 1e-10, "seed {seed}: {r:e}");
    }
}

#[test]
fn truncation_converged() {
    let d = weak(CouplingMode::NonSecular);
    let dc = weak_params().delta_c;
    let m = |n| {
        let l = build_liouvillian(&d, dc, FockConfig::new(n).unwrap()).unwrap();
        l.moments(&steady_density(&l).unwrap())
    };
    assert!(m(12).max_relative_difference(&m(24)) < 1e-6);
}

#[test]
fn effective_equation_second_order() {
    let fock = FockConfig::new(10).unwrap();
    let run = |omega: f64, mode| {
        let p = common::resonant_params(1.0, omega, 1.0);
        let mut d = sqlaser::derive_dressed(&p, &sqlaser::ReservoirProfile::transparent(), mode)
            .unwrap()
            .with_sideband_rates(2.0, 0.2)
            .unwrap();
        d.gamma0 = 0.25;
            let r = sqlaser::lindblad::validate_effective(&d, &p, fock, 3.0).unwrap();
        r.max_discrepancy
    };
    let ratio = run(50.0, CouplingMode::NonSecular) / run(100.0, CouplingMode::NonSecular);
    assert!((ratio - 4.0).abs() <= 1.0);
    let sec = run(50.0, CouplingMode::Secular) / run(100.0, CouplingMode::Secular);
    assert!(sec < 3.0);
}

#[test]
fn effective_validator_trivial_and_rejections() {
    let fock = FockConfig::new(4).unwrap();
    let p = common::resonant_params(0.0, 40.0, 1.0);
    let d = sqlaser::derive_dressed(&p, &sqlaser::ReservoirProfile::transparent(), CouplingMode::NonSecular)
        .unwrap()
        .with_sideband_rates(1.0, 0.5)
        .unwrap();
    let r = sqlaser::lindblad::validate_effective(&d, &p, fock, 1.0).unwrap();
    assert_eq!(r.max_discrepancy, 0.0);
    assert!(sqlaser::lindblad::validate_effective_with(&d, &p, fock, 1.0, 10).is_err());
    assert!(sqlaser::lindblad::validate_effective(&d, &p, fock, -1.0).is_err());
    let strong = common::resonant_params(30.0, 40.0, 1.0);
    let d = sqlaser::derive_dressed(&strong, &sqlaser::ReservoirProfile::transparent(), CouplingMode::NonSecular).unwrap();
    assert!(matches!(sqlaser::lindblad::validate_effective(&d, &strong, fock, 1.0), Err(sqlaser::Error::Integrator(_))));
}
