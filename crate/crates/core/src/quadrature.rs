//! Normally ordered quadrature variances.
//!
//! With `X_+ = a e^{i theta} + a^dag e^{-i theta}` the normally ordered
//! variance is zero for coherent light and negative when squeezed.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DressedParams;
use crate::moments::{Moment, MomentVector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarianceResult {
    pub theta: f64,
    pub value: f64,
    /// Linear-interaction part, closed-form path only.
    pub s1: Option<f64>,
    /// Non-secular part, closed-form path only.
    pub s2: Option<f64>,
}

/// Phase and value of a variance extremum over `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub theta: f64,
    pub value: f64,
}

const IMAG_TOLERANCE: f64 = 1e-9;

pub fn variance_from_moments(m: &MomentVector, theta: f64) -> Result<VarianceResult> {
    let (a, ad) = (m[Moment::A], m[Moment::Adag]);
    let phase = Complex64::from_polar(1.0, 2.0 * theta);
    let v = phase * (m[Moment::A2] - a * a) + phase.conj() * (m[Moment::Adag2] - ad * ad) + 2.0 * (m[Moment::AdagA] - ad * a);
    let scale = m.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    if v.im.abs() > IMAG_TOLERANCE * scale {
        return Err(Error::NotConjugateConsistent(v.im));
    }
    Ok(VarianceResult { theta, value: v.re, s1: None, s2: None })
}

/// Variance of the conjugate quadrature `X_-`.
pub fn variance_minus(m: &MomentVector, theta: f64) -> Result<VarianceResult> {
    let mut r = variance_from_moments(m, theta + FRAC_PI_2)?;
    r.theta = theta;
    Ok(r)
}

/// `S1 + S2` for a resonant cavity at `delta_a = 0`.
pub fn variance_closed_form(dressed: &DressedParams, theta: f64) -> Result<VarianceResult> {
    let (g1, gam1, gam2, k) = (dressed.g1, dressed.gamma1, dressed.gamma2, dressed.kappa);
    if gam1 <= 0.0 {
        return Err(Error::ClosedFormUndefined("gamma1 = 0"));
    }
    let w = dressed.non_secular_weight();
    let d = gam1 * gam1 - gam2 * gam2;
    let gg = g1 * g1;
    let (sin2, cos2) = (2.0 * theta).sin_cos();

    let s1 = 8.0 * gg * d / (k * gam1 * gam1 * (k + 2.0 * gam1)) * (1.0 + cos2);
    let s2 = -2.0 * gg * gam2 * sin2 * w / (k * gam1)
        * (1.0 + 32.0 * gg * d * (3.0 * gam1 + 2.0 * k) / (k * gam1 * (k + gam1) * (k + 2.0 * gam1).powi(2)))
        + 4.0 * gg * gg * (1.0 - cos2) * w * w / (k * k)
            * (1.0 - d / (gam1 * (k + gam1))
                + 32.0 * gg * d * (k * gam1 * (k + gam1) + (5.0 * gam1 + 4.0 * k) * gam2 * gam2)
                    / (k * gam1 * gam1 * (k + gam1).powi(2) * (k + 2.0 * gam1).powi(2)));
    Ok(VarianceResult { theta, value: s1 + s2, s1: Some(s1), s2: Some(s2) })
}

/// Minimum over `theta` of `v(theta) = c0 + c1 cos 2 theta + c2 sin 2 theta`,
/// recovered from three samples. The returned phase lies in `[0, pi)`.
fn sinusoid_minimum(v: impl Fn(f64) -> Result<f64>) -> Result<Extremum> {
    let (v0, v45, v90) = (v(0.0)?, v(FRAC_PI_4)?, v(FRAC_PI_2)?);
    let c0 = 0.5 * (v0 + v90);
    let c1 = 0.5 * (v0 - v90);
    let c2 = v45 - c0;
    let amplitude = c1.hypot(c2);
    let theta = if amplitude == 0.0 { 0.0 } else { ((-c2).atan2(-c1) / 2.0).rem_euclid(PI) };
    Ok(Extremum { theta, value: c0 - amplitude })
}

/// Most negative variance and its phase.
pub fn minimum_variance(m: &MomentVector) -> Result<Extremum> {
    sinusoid_minimum(|t| variance_from_moments(m, t).map(|r| r.value))
}

pub fn minimum_variance_closed_form(dressed: &DressedParams) -> Result<Extremum> {
    sinusoid_minimum(|t| variance_closed_form(dressed, t).map(|r| r.value))
}
