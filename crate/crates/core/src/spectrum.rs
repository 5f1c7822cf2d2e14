//! Cavity-field spectra from the quantum regression theorem.
//!
//! Frequencies are offsets `delta = omega - omega_L`. One-sided transforms use
//! the Laplace variable `p = i delta`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DressedParams;
use crate::moments::{assemble, Moment, MomentVector};
use crate::numerics::{integrate_line, lu_solve, ComplexMatrix, LineIntegral};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumKind {
    Incoherent,
    SqueezePlus,
    SqueezeMinus,
}

impl SpectrumKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumKind::Incoherent => "incoherent",
            SpectrumKind::SqueezePlus => "squeeze_plus",
            SpectrumKind::SqueezeMinus => "squeeze_minus",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSamples {
    pub delta: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
}

impl SpectrumSamples {
    /// Grid point and value of the largest sample.
    pub fn peak(&self) -> Option<(f64, f64)> {
        self.delta
            .iter()
            .zip(&self.values)
            .fold(None, |best: Option<(f64, f64)>, (&d, &v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((d, v)),
            })
    }
}

/// The five moments `{R3, a, a^dag, R3 a, R3 a^dag}` evolve in a closed
/// homogeneous block once steady means are subtracted; two-time correlations
/// with a fixed right operator follow the same block.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionSubsystem {
    generator5: ComplexMatrix,
    init_a: [Complex64; 5],
    init_adag: [Complex64; 5],
}

const BLOCK: [usize; 5] = [0, 1, 2, 3, 4];
const ROW_A: usize = 1;
const ROW_ADAG: usize = 2;

impl RegressionSubsystem {
    pub fn new(dressed: &DressedParams, delta_c: f64, m: &MomentVector) -> Self {
        use Moment::*;
        let generator5 = assemble(dressed, delta_c).generator().select(&BLOCK, &BLOCK);
        let (r3, a, ad) = (m[R3], m[A], m[Adag]);
        let (r3a, r3ad) = (m[R3A], m[R3Adag]);
        let one = Complex64::new(1.0, 0.0);
        // <O B> - <O><B> for right operator B = a, then B = a^dag
        let init_a = [r3a - r3 * a, m[A2] - a * a, m[AdagA] - ad * a, m[R3A2] - r3a * a, m[R3AdagA] - r3ad * a];
        let init_adag = [
            r3ad - r3 * ad,
            m[AdagA] + one - a * ad,
            m[Adag2] - ad * ad,
            m[R3AdagA] + r3 - r3a * ad,
            m[R3Adag2] - r3ad * ad,
        ];
        Self { generator5, init_a, init_adag }
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator5
    }

    pub fn init_a(&self) -> &[Complex64; 5] {
        &self.init_a
    }

    pub fn init_adag(&self) -> &[Complex64; 5] {
        &self.init_adag
    }

    fn resolvent(&self, p: Complex64, rhs: &[Complex64; 5]) -> Result<Vec<Complex64>> {
        let shifted = &ComplexMatrix::identity(5).scale(p) - &self.generator5;
        lu_solve(&shifted, rhs).map(|s| s.x).map_err(|e| match e {
            Error::Singular { .. } => Error::Unstable(format!("regression resolvent singular at p = {p}")),
            other => other,
        })
    }

    /// One-sided transforms `C_{O,a}(p)` for `O` in the block.
    pub fn transform_a(&self, p: Complex64) -> Result<Vec<Complex64>> {
        self.resolvent(p, &self.init_a)
    }

    /// One-sided transforms `C_{O,a^dag}(p)` for `O` in the block.
    pub fn transform_adag(&self, p: Complex64) -> Result<Vec<Complex64>> {
        self.resolvent(p, &self.init_adag)
    }

    /// `S_in(delta) = 2 Re C_{a^dag, a}(i delta)`.
    pub fn incoherent(&self, delta: f64) -> Result<f64> {
        Ok(2.0 * self.transform_a(I * delta)?[ROW_ADAG].re)
    }

    /// `(X_+, X_-)` at one frequency offset.
    pub fn squeezing(&self, theta: f64, delta: f64) -> Result<(f64, f64)> {
        let p = I * delta;
        let with_a = self.transform_a(p)?;
        let with_adag = self.transform_adag(p)?;
        let mirrored = self.transform_a(-p)?;
        let s_in = 2.0 * with_a[ROW_ADAG].re + 2.0 * mirrored[ROW_ADAG].re;
        let phase = Complex64::from_polar(1.0, 2.0 * theta);
        let anomalous = 2.0 * (phase * with_a[ROW_A]).re + 2.0 * (phase.conj() * with_adag[ROW_ADAG]).re;
        Ok((anomalous + s_in, -anomalous + s_in))
    }
}

/// Coefficient of the coherent `2 pi delta(omega - omega_L)` line.
pub fn elastic_weight(m: &MomentVector) -> f64 {
    m[Moment::A].norm_sqr()
}

pub fn incoherent_regression(
    dressed: &DressedParams,
    delta_c: f64,
    m: &MomentVector,
    grid: &[f64],
) -> Result<SpectrumSamples> {
    let sub = RegressionSubsystem::new(dressed, delta_c, m);
    let values = grid.iter().map(|&d| sub.incoherent(d)).collect::<Result<Vec<_>>>()?;
    Ok(SpectrumSamples { delta: grid.to_vec(), values, kind: SpectrumKind::Incoherent })
}

/// The rational resonant-cavity transform `<a^dag(p), a>` with numerator
/// coefficients m0..m4 built from the steady moments.
pub fn closed_form_correlation(dressed: &DressedParams, m: &MomentVector, p: Complex64) -> Complex64 {
    let c = |x: f64| Complex64::new(x, 0.0);
    let (al, alp) = (dressed.alpha, dressed.alpha_prime);
    let (k, g1, g2, gc) = (c(dressed.kappa), c(dressed.gamma1), c(dressed.gamma2), c(dressed.g1));
    let aa = al * alp;
    let (am, ap) = (al - alp, al + alp);
    let (a, r3a, n, a2) = (m[Moment::A], m[Moment::R3A], m[Moment::AdagA], m[Moment::A2]);
    let (r3a2, r3n) = (m[Moment::R3A2], m[Moment::R3AdagA]);
    let aad = a * m[Moment::Adag];
    let half_k = k / 2.0;
    let nonsec = am * r3a2 + ap * r3n;
    let pump = -k * (g1 + half_k) / 2.0 + aa;

    let m0 = (2.0 * (gc * r3a + g1 * n) * (g1 + half_k) + nonsec * g1) * pump
        + 2.0 * g1 * (k * (g1 + half_k) - 2.0 * aa) * (g1 + k) * aad
        + g2 * (g1 + half_k) * (g1 * (ap * n + am * a2) + 2.0 * gc * al * r3a)
        + 2.0 * g1 * g2 * aa * r3n
        + 2.0 * gc * (g1 * (g2 - al) * (g1 + k) + g2 * k * (g1 * g1 - k * k / 4.0 + g1 * half_k + g2 * al + aa) / (2.0 * g1)) * a;

    let m1 = (2.0 * gc * r3a + (4.0 * g1 + k) * n + nonsec) * pump
        - (g1 + k) * (2.0 * (gc * r3a + g1 * n) * (g1 + half_k) + g1 * nonsec)
        + 2.0 * (g1 * ((g1 + k).powi(2) + k * (g1 + half_k) - 2.0 * aa) + (k * (g1 + half_k) - 2.0 * aa) * (g1 + k)) * aad
        + ((2.0 * g1 + half_k) * (ap * n + am * a2) + 2.0 * gc * al * r3a + 2.0 * aa * r3n) * g2
        + 2.0 * gc * ((g2 - al) * (2.0 * g1 + k) + g2 * half_k) * a;

    let m2 = -nonsec * (k + 2.0 * g1) - gc * (4.0 * g1 + 3.0 * k) * r3a
        + (-g1 * (4.0 * g1 + 3.0 * k) - (3.0 * half_k + g1) * (k + 2.0 * g1) + g2 * ap + 2.0 * aa) * n
        + g2 * am * a2
        + 2.0 * ((g1 + k).powi(2) + 2.0 * g1 * (g1 + k) + k * (g1 + half_k) - 2.0 * aa) * aad
        + 2.0 * gc * (g2 - al) * a;

    let m3 = -nonsec - 2.0 * gc * r3a - 3.0 * (2.0 * g1 + k) * n + 2.0 * (3.0 * g1 + 2.0 * k) * aad;
    let m4 = 2.0 * (aad - n);

    let denominator = aa * g2 * g2 - ((p + half_k) * (p + half_k + g1) - aa).powi(2);
    let numerator = (((m4 * p + m3) * p + m2) * p + m1) * p + m0;
    numerator / (2.0 * (p + g1) * denominator)
}

pub fn incoherent_closed_form(
    dressed: &DressedParams,
    delta_c: f64,
    m: &MomentVector,
    grid: &[f64],
) -> Result<SpectrumSamples> {
    if delta_c != 0.0 {
        return Err(Error::CavityNotResonant(delta_c));
    }
    if dressed.gamma1 == 0.0 {
        return Err(Error::ClosedFormUndefined("gamma1 = 0"));
    }
    let values = grid.iter().map(|&d| 2.0 * closed_form_correlation(dressed, m, I * d).re).collect();
    Ok(SpectrumSamples { delta: grid.to_vec(), values, kind: SpectrumKind::Incoherent })
}

pub fn squeezing_spectrum(
    dressed: &DressedParams,
    delta_c: f64,
    m: &MomentVector,
    theta: f64,
    grid: &[f64],
) -> Result<(SpectrumSamples, SpectrumSamples)> {
    let sub = RegressionSubsystem::new(dressed, delta_c, m);
    let pairs = grid.iter().map(|&d| sub.squeezing(theta, d)).collect::<Result<Vec<_>>>()?;
    let (plus, minus) = pairs.into_iter().unzip();
    Ok((
        SpectrumSamples { delta: grid.to_vec(), values: plus, kind: SpectrumKind::SqueezePlus },
        SpectrumSamples { delta: grid.to_vec(), values: minus, kind: SpectrumKind::SqueezeMinus },
    ))
}

/// `16 kappa g1^4 / (Omega^2 (kappa^2 + 4 delta^2)^2)`, the resonant
/// full-gap limit of the incoherent spectrum.
pub fn squared_lorentzian(dressed: &DressedParams, delta: f64) -> f64 {
    let k = dressed.kappa;
    16.0 * k * dressed.g1.powi(4) / (dressed.omega.powi(2) * (k * k + 4.0 * delta * delta).powi(2))
}

/// Half width at half maximum of a single line centred at `center`,
/// located by bisection on the right flank up to `reach` away.
pub fn half_width(f: impl Fn(f64) -> f64, center: f64, reach: f64) -> Option<f64> {
    let half = f(center) / 2.0;
    let (mut lo, mut hi) = (0.0, reach);
    if !(f(center + hi) < half) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(center + mid) >= half {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * reach {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

fn integrate_fallible(f: impl Fn(f64) -> Result<f64>, width: f64, intervals: usize) -> Result<LineIntegral> {
    let failure = std::cell::RefCell::new(None);
    let r = integrate_line(
        |x| {
            f(x).unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            })
        },
        width,
        intervals,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Integrals of `S_in / 2 pi` over all frequencies.
pub fn incoherent_sum_rule(sub: &RegressionSubsystem, width: f64, intervals: usize) -> Result<LineIntegral> {
    let r = integrate_fallible(|d| sub.incoherent(d), width, intervals)?;
    Ok(scale_integral(r, 1.0 / (2.0 * std::f64::consts::PI)))
}

/// Integrals of `X_+ / 2 pi` and `X_- / 2 pi` over all frequencies.
pub fn squeezing_sum_rule(
    sub: &RegressionSubsystem,
    theta: f64,
    width: f64,
    intervals: usize,
) -> Result<(LineIntegral, LineIntegral)> {
    let plus = integrate_fallible(|d| sub.squeezing(theta, d).map(|x| x.0), width, intervals)?;
    let minus = integrate_fallible(|d| sub.squeezing(theta, d).map(|x| x.1), width, intervals)?;
    let s = 1.0 / (2.0 * std::f64::consts::PI);
    Ok((scale_integral(plus, s), scale_integral(minus, s)))
}

fn scale_integral(r: LineIntegral, s: f64) -> LineIntegral {
    LineIntegral { coarse: r.coarse * s, fine: r.fine * s, extrapolated: r.extrapolated * s }
}
