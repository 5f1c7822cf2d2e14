//! Effective equation versus the explicitly time-dependent one it was
//! derived from.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::liouvillian::{
    build_liouvillian, builder, check_rates, finish, hamiltonian_term, rk4_step, vectorize, MomentFunctionals, SparseMatrix,
};
use super::operators::{DensityMatrix, FockConfig, Operators};
use crate::error::{Error, Result};
use crate::model::{CouplingMode, DressedParams, SystemParams};
use crate::moments::Moment;

/// Minimum integrator steps per period of the `e^{2 i Omega t}` factors.
pub const MIN_STEPS_PER_PERIOD: usize = 40;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscrepancyReport {
    pub omega: f64,
    pub g: f64,
    pub t_final: f64,
    pub steps: usize,
    /// Largest `|m_td(t) - m_eff(t)|` over the eleven moments and all steps.
    pub max_discrepancy: f64,
    /// The moment where the maximum occurred.
    pub worst_moment: Moment,
    /// `<a^dag a>` at `t_final` under the effective equation.
    pub final_photon_number: f64,
}

pub fn validate_effective(dressed: &DressedParams, params: &SystemParams, fock: FockConfig, t_final: f64) -> Result<DiscrepancyReport> {
    validate_effective_with(dressed, params, fock, t_final, MIN_STEPS_PER_PERIOD)
}

/// Integrates both equations from `|1~> (x) |0>`.
pub fn validate_effective_with(
    dressed: &DressedParams,
    params: &SystemParams,
    fock: FockConfig,
    t_final: f64,
    steps_per_period: usize,
) -> Result<DiscrepancyReport> {
    check_rates(dressed)?;
    if !(t_final > 0.0) || !t_final.is_finite() {
        return Err(Error::Integrator(format!("t_final must be finite and > 0, got {t_final}")));
    }
    if steps_per_period < MIN_STEPS_PER_PERIOD {
        return Err(Error::Integrator(format!(
            "{steps_per_period} steps per period cannot resolve the 2 Omega oscillation (need >= {MIN_STEPS_PER_PERIOD})"
        )));
    }
    if dressed.g.abs() >= 0.5 * dressed.omega {
        return Err(Error::Integrator(format!(
            "g / Omega = {:.3} is not small; the effective equation is a second-order expansion",
            dressed.g / dressed.omega
        )));
    }
    let delta_c = params.delta_c;
    let effective = build_liouvillian(dressed, delta_c, fock)?;
    let secular = build_liouvillian(&dressed.with_mode(CouplingMode::Secular), delta_c, fock)?;

    let ops = Operators::new(fock);
    let (s2, c2) = (dressed.s * dressed.s, dressed.c * dressed.c);
    let b = (&ops.adag.scale(Complex64::new(c2, 0.0)) + &ops.a.scale(Complex64::new(s2, 0.0))).matmul(&ops.r12);
    let h = b.scale(Complex64::new(0.0, dressed.g));
    let id = SparseMatrix::from_dense(&ops.identity);
    let rotating = |op| {
        let mut sb = builder(ops.dim());
        hamiltonian_term(&mut sb, op, &id);
        finish(sb)
    };
    let lh = rotating(&h);
    let lhd = rotating(&h.adjoint());

    let period = 2.0 * PI / dressed.omega;
    let steps = ((t_final / period) * steps_per_period as f64).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let freq = 2.0 * dressed.omega;

    let functionals = MomentFunctionals::new(&ops);
    let rho0 = DensityMatrix::pure(&{
        let mut psi = vec![Complex64::new(0.0, 0.0); fock.dim()];
        psi[fock.index(0, 0)] = Complex64::new(1.0, 0.0);
        psi
    })?;
    let mut v_td = vectorize(rho0.matrix());
    let mut v_eff = v_td.clone();
    let mut worst = (0.0, Moment::R3);
    let mut t = 0.0;
    for _ in 0..steps {
        let td = |x: &[Complex64], tau: f64| {
            let mut out = secular.matrix().mul_vec(x);
            lh.mul_add(Complex64::from_polar(1.0, -freq * tau), x, &mut out);
            lhd.mul_add(Complex64::from_polar(1.0, freq * tau), x, &mut out);
            out
        };
        v_td = rk4_step(&v_td, t, dt, td);
        v_eff = rk4_step(&v_eff, t, dt, |x, _| effective.apply_vec(x));
        t += dt;
        let (m_td, m_eff) = (functionals.evaluate(&v_td), functionals.evaluate(&v_eff));
        for moment in Moment::ALL {
            let diff = (m_td[moment] - m_eff[moment]).norm();
            if diff > worst.0 {
                worst = (diff, moment);
            }
        }
    }
    let final_photon_number = functionals.evaluate(&v_eff)[Moment::AdagA].re;
    Ok(DiscrepancyReport {
        omega: dressed.omega,
        g: dressed.g,
        t_final,
        steps,
        max_discrepancy: worst.0,
        worst_moment: worst.1,
        final_photon_number,
    })
}
