//! The closed eleven-dimensional system of first- and second-order moments,
//! its exact steady state and transient, and the resonant-cavity closed forms.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DressedParams;
use crate::numerics::{expm, factor_checked, ComplexMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub const MOMENT_COUNT: usize = 11;

/// One entry of the moment vector. The discriminant is the vector index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Moment {
    R3 = 0,
    A = 1,
    Adag = 2,
    R3A = 3,
    R3Adag = 4,
    A2 = 5,
    Adag2 = 6,
    AdagA = 7,
    R3A2 = 8,
    R3Adag2 = 9,
    R3AdagA = 10,
}

impl Moment {
    pub const ALL: [Moment; MOMENT_COUNT] = [
        Moment::R3,
        Moment::A,
        Moment::Adag,
        Moment::R3A,
        Moment::R3Adag,
        Moment::A2,
        Moment::Adag2,
        Moment::AdagA,
        Moment::R3A2,
        Moment::R3Adag2,
        Moment::R3AdagA,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column-friendly identifier, e.g. `r3_adag_a`.
    pub fn name(self) -> &'static str {
        match self {
            Moment::R3 => "r3",
            Moment::A => "a",
            Moment::Adag => "adag",
            Moment::R3A => "r3_a",
            Moment::R3Adag => "r3_adag",
            Moment::A2 => "a2",
            Moment::Adag2 => "adag2",
            Moment::AdagA => "adag_a",
            Moment::R3A2 => "r3_a2",
            Moment::R3Adag2 => "r3_adag2",
            Moment::R3AdagA => "r3_adag_a",
        }
    }

    /// The moment whose expectation is the complex conjugate of this one.
    pub fn partner(self) -> Moment {
        match self {
            Moment::A => Moment::Adag,
            Moment::Adag => Moment::A,
            Moment::R3A => Moment::R3Adag,
            Moment::R3Adag => Moment::R3A,
            Moment::A2 => Moment::Adag2,
            Moment::Adag2 => Moment::A2,
            Moment::R3A2 => Moment::R3Adag2,
            Moment::R3Adag2 => Moment::R3A2,
            m => m,
        }
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Expectation values in [`Moment`] order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentVector {
    entries: [Complex64; MOMENT_COUNT],
}

impl MomentVector {
    pub fn new(entries: [Complex64; MOMENT_COUNT]) -> Self {
        Self { entries }
    }

    pub fn zeros() -> Self {
        Self { entries: [ZERO; MOMENT_COUNT] }
    }

    pub fn from_slice(values: &[Complex64]) -> Result<Self> {
        let entries: [Complex64; MOMENT_COUNT] = values
            .try_into()
            .map_err(|_| Error::Dimension(format!("moment vector needs {MOMENT_COUNT} entries, got {}", values.len())))?;
        Ok(Self { entries })
    }

    /// Lower dressed state and empty cavity.
    pub fn ground() -> Self {
        let mut m = Self::zeros();
        m[Moment::R3] = re(-1.0);
        m
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (Moment, Complex64)> + '_ {
        Moment::ALL.iter().map(move |&m| (m, self.entries[m.index()]))
    }

    /// Largest violation of conjugate pairing and of reality of the
    /// self-adjoint moments.
    pub fn conjugation_error(&self) -> f64 {
        Moment::ALL
            .iter()
            .map(|&m| (self[m] - self[m.partner()].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Mean photon number `<a^dag a>`.
    pub fn photon_number(&self) -> f64 {
        self[Moment::AdagA].re
    }

    /// `<a^dag a> - |<a>|^2`, the incoherent photon number.
    pub fn incoherent_photon_number(&self) -> f64 {
        (self[Moment::AdagA] - self[Moment::Adag] * self[Moment::A]).re
    }

    /// Largest entrywise difference, relative to the largest entry of `other`.
    pub fn max_relative_difference(&self, other: &MomentVector) -> f64 {
        let scale = other.entries.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale
    }
}

impl Index<Moment> for MomentVector {
    type Output = Complex64;
    fn index(&self, m: Moment) -> &Complex64 {
        &self.entries[m.index()]
    }
}

impl IndexMut<Moment> for MomentVector {
    fn index_mut(&mut self, m: Moment) -> &mut Complex64 {
        &mut self.entries[m.index()]
    }
}

/// `dx/dt = A x + b` over the moment vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSystem {
    generator: ComplexMatrix,
    drive: Vec<Complex64>,
}

/// Builds the moment generator for cavity detuning `delta_c`.
pub fn assemble(dressed: &DressedParams, delta_c: f64) -> MomentSystem {
    use Moment::*;
    let g1 = re(dressed.g1);
    let k = dressed.kappa;
    let (gam1, gam2) = (dressed.gamma1, dressed.gamma2);
    // R3-dependent cavity shift and two-photon coupling
    let sh = dressed.cavity_shift();
    let tp = dressed.two_photon();
    let dc = I * delta_c;

    let mut a = ComplexMatrix::zeros(MOMENT_COUNT, MOMENT_COUNT);
    let mut b = vec![ZERO; MOMENT_COUNT];
    let mut set = |row: Moment, col: Moment, v: Complex64| a[(row.index(), col.index())] = v;

    b[R3.index()] = re(-gam2);
    set(R3, R3, re(-gam1));

    set(A, A, -(re(k / 2.0) - dc));
    set(A, R3, g1);
    set(A, R3A, -I * sh);
    set(A, R3Adag, -I * tp);

    set(Adag, Adag, -(re(k / 2.0) + dc));
    set(Adag, R3, g1);
    set(Adag, R3Adag, I * sh);
    set(Adag, R3A, I * tp);

    b[R3A.index()] = g1;
    set(R3A, R3A, -(re(gam1 + k / 2.0) - dc));
    set(R3A, A, -re(gam2) - I * sh);
    set(R3A, Adag, -I * tp);

    b[R3Adag.index()] = g1;
    set(R3Adag, R3Adag, -(re(gam1 + k / 2.0) + dc));
    set(R3Adag, Adag, -re(gam2) + I * sh);
    set(R3Adag, A, I * tp);

    set(A2, A2, -(re(k) - 2.0 * dc));
    set(A2, R3, -I * tp);
    set(A2, R3A, 2.0 * g1);
    set(A2, R3A2, -2.0 * I * sh);
    set(A2, R3AdagA, -2.0 * I * tp);

    set(Adag2, Adag2, -(re(k) + 2.0 * dc));
    set(Adag2, R3, I * tp);
    set(Adag2, R3Adag, 2.0 * g1);
    set(Adag2, R3Adag2, 2.0 * I * sh);
    set(Adag2, R3AdagA, 2.0 * I * tp);

    set(AdagA, AdagA, re(-k));
    set(AdagA, R3A, g1);
    set(AdagA, R3Adag, g1);
    set(AdagA, R3A2, I * tp);
    set(AdagA, R3Adag2, -I * tp);

    b[R3A2.index()] = -I * tp;
    set(R3A2, R3A2, -(re(gam1 + k) - 2.0 * dc));
    set(R3A2, A, 2.0 * g1);
    set(R3A2, A2, -re(gam2) - 2.0 * I * sh);
    set(R3A2, AdagA, -2.0 * I * tp);

    b[R3Adag2.index()] = I * tp;
    set(R3Adag2, R3Adag2, -(re(gam1 + k) + 2.0 * dc));
    set(R3Adag2, Adag, 2.0 * g1);
    set(R3Adag2, Adag2, -re(gam2) + 2.0 * I * sh);
    set(R3Adag2, AdagA, 2.0 * I * tp);

    set(R3AdagA, R3AdagA, re(-(gam1 + k)));
    set(R3AdagA, A, g1);
    set(R3AdagA, Adag, g1);
    set(R3AdagA, AdagA, re(-gam2));
    set(R3AdagA, A2, I * tp);
    set(R3AdagA, Adag2, -I * tp);

    MomentSystem { generator: a, drive: b }
}

impl MomentSystem {
    pub fn new(generator: ComplexMatrix, drive: Vec<Complex64>) -> Result<Self> {
        if generator.rows() != MOMENT_COUNT || generator.cols() != MOMENT_COUNT || drive.len() != MOMENT_COUNT {
            return Err(Error::Dimension(format!("moment system must be {MOMENT_COUNT}-dimensional")));
        }
        Ok(Self { generator, drive })
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn drive(&self) -> &[Complex64] {
        &self.drive
    }

    /// Time derivative `A x + b`.
    pub fn derivative(&self, x: &MomentVector) -> MomentVector {
        let mut out = self.generator.mul_vec(x.as_slice());
        for (o, b) in out.iter_mut().zip(&self.drive) {
            *o += b;
        }
        MomentVector::from_slice(&out).expect("dimension fixed")
    }

    /// Exact steady state `A x = -b`.
    pub fn steady_state(&self) -> Result<MomentVector> {
        let (lu, _) = factor_checked(self.generator.clone())
            .map_err(|e| Error::Unstable(format!("moment generator is singular ({e})")))?;
        let rhs: Vec<Complex64> = self.drive.iter().map(|b| -b).collect();
        MomentVector::from_slice(&lu.solve(&rhs))
    }

    /// `x(t)` from `x0` under the exact propagator of the affine system.
    pub fn evolve(&self, x0: &MomentVector, t: f64) -> Result<MomentVector> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Integrator(format!("evolution time must be finite and >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(*x0);
        }
        // exp([[A, b], [0, 0]] t) [x0; 1] = [x(t); 1]
        let n = MOMENT_COUNT;
        let augmented = ComplexMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => self.generator[(i, j)] * t,
            (true, false) => self.drive[i] * t,
            _ => ZERO,
        });
        let mut start = x0.as_slice().to_vec();
        start.push(re(1.0));
        let end = expm(&augmented).mul_vec(&start);
        if end.iter().any(|z| !z.is_finite()) {
            return Err(Error::Integrator("propagator overflowed".into()));
        }
        MomentVector::from_slice(&end[..n])
    }

    /// The system with every moment swapped for its conjugate partner and all
    /// coefficients conjugated; a physical system is invariant under this.
    pub fn conjugated(&self) -> MomentSystem {
        let p = |i: usize| Moment::ALL[i].partner().index();
        let generator = ComplexMatrix::from_fn(MOMENT_COUNT, MOMENT_COUNT, |i, j| self.generator[(p(i), p(j))].conj());
        let drive = (0..MOMENT_COUNT).map(|i| self.drive[p(i)].conj()).collect();
        MomentSystem { generator, drive }
    }
}

/// Intermediate coefficients of the resonant-cavity steady state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyCoefficients {
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
    pub f4: Complex64,
    pub f5: Complex64,
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
    pub x0: Complex64,
    pub x1: Complex64,
    pub x2: Complex64,
    pub x3: Complex64,
}

fn require_resonant(delta_c: f64) -> Result<()> {
    if delta_c != 0.0 {
        return Err(Error::CavityNotResonant(delta_c));
    }
    Ok(())
}

fn nonzero(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.norm() == 0.0 || !z.is_finite() {
        return Err(Error::ClosedFormUndefined(what));
    }
    Ok(z)
}

/// Evaluates the F, K and x coefficients.
pub fn steady_coefficients(dressed: &DressedParams) -> Result<SteadyCoefficients> {
    let (al, alp) = (dressed.alpha, dressed.alpha_prime);
    let k = re(dressed.kappa);
    let g1 = re(dressed.gamma1);
    let g2 = re(dressed.gamma2);
    let gc = re(dressed.g1);
    if dressed.gamma2 == 0.0 {
        return Err(Error::ClosedFormUndefined("gamma2 = 0"));
    }
    if dressed.gamma1 == 0.0 {
        return Err(Error::ClosedFormUndefined("gamma1 = 0"));
    }
    let aa = al * alp;
    let g2s = g2 * g2;

    let f1 = -4.0 * aa * g1 - 2.0 * g2 * k * alp + (2.0 * g1 + k) * (k * g1 + 2.0 * g2s);

    let f2 = 16.0 * aa.powi(3) * g1
        - 4.0 * (3.0 * g1 * (k + g1).powi(2) + 2.0 * g1.powi(3) + (g2s - g1 * g1) * (k + 5.0 * g1)) * aa.powi(2)
        + (g1 * k * k * (2.0 * g1 + k).powi(2)
            + 2.0 * (k + g1) * (k * g1 + g2s) * ((k + g1).powi(2) + 2.0 * g2s - g1 * g1))
            * aa
        - k * k * (k + g1) * (k * g1 + g2s) * (2.0 * g1 + k).powi(2) / 4.0;

    let f3 = 32.0 * aa.powi(2) * g1
        - 8.0 * ((k * g1 + 2.0 * g2s) * (2.0 * g1 + k) + (k + g1) * (k * g1 + g2s)) * aa
        + (2.0 * g1 + k) * (g1 * k + 2.0 * g2s) * (2.0 * k * k + 2.0 * k * g1 + g2s)
        + g2s * (2.0 * g1 + k).powi(2) * (g1 + 2.0 * k)
        - 4.0 * g2s * (g1 + k) * (g1 * g1 - g2s);

    let f4 = (k * (k + g1) - 4.0 * aa) / g2 + al + alp;

    let f5 = -64.0 * aa.powi(3) * g1
        + 16.0 * ((3.0 * k * g1 + 2.0 * g2s) * (k + g1) + g1 * (3.0 * g2s + k * g1)) * aa.powi(2)
        - 4.0
            * ((k * g1 + 2.0 * g2s) * (2.0 * g1 + k) * (2.0 * k * g1 + 2.0 * k * k + g2s)
                + g1 * k * k * (k + g1).powi(2))
            * aa
        + k * k * (2.0 * g1 + k) * (k * g1 + 2.0 * g2s) * (k + g1).powi(2);

    let k1 = ((4.0 * aa - k * (2.0 * g1 + k)).powi(2) - 16.0 * g2s * aa) * g1;

    let k2 = (256.0 * aa.powi(4) - 64.0 * (4.0 * k * k + 6.0 * k * g1 + 5.0 * g2s) * aa.powi(3)
        + 16.0
            * (2.0 * (k * k + 2.0 * k * g1 + 2.0 * g2s) * (2.0 * k * k + 2.0 * k * g1 + g2s)
                + k * k * ((2.0 * g1 + k).powi(2) + (k + g1).powi(2)))
            * aa.powi(2)
        - 4.0
            * k
            * k
            * (2.0 * (k * k + 2.0 * k * g1 + 2.0 * g2s) * (g1 + k).powi(2)
                + (2.0 * k * k + 2.0 * k * g1 + g2s) * (k + 2.0 * g1).powi(2))
            * aa
        + k.powi(4) * (k + g1).powi(2) * (k + 2.0 * g1).powi(2))
        * g1;

    let k3 = (4.0 * aa - k * (g1 + k)).powi(2) - 4.0 * g2s * aa;

    let x0 = g2s + k * (k + g1) - 4.0 * aa;
    let x1 = x0 * (al + alp) / g2 + k * (k + g1);
    let x2 = -g2 + 4.0 * al * (al + alp) / g2;
    let x3 = (al * al - alp * alp) / g2
        - 8.0 * gc * gc * k * g2 * ((k + 2.0 * g1).powi(2) - 4.0 * aa) * k3 / nonzero(k2, "K2 = 0")?;

    Ok(SteadyCoefficients { f1, f2, f3, f4, f5, k1, k2, k3, x0, x1, x2, x3 })
}

/// Closed-form steady moments for a resonant cavity (`delta_c = 0`).
pub fn closed_form_steady(dressed: &DressedParams, delta_c: f64) -> Result<MomentVector> {
    require_resonant(delta_c)?;
    let c = steady_coefficients(dressed)?;
    let (al, alp) = (dressed.alpha, dressed.alpha_prime);
    let k = re(dressed.kappa);
    let g1 = re(dressed.gamma1);
    let g2 = re(dressed.gamma2);
    let gc = re(dressed.g1);
    let gc2 = gc * gc;
    let aa = al * alp;
    let dm = al - alp;
    let k1 = nonzero(c.k1, "K1 = 0")?;
    let k2 = nonzero(c.k2, "K2 = 0")?;

    let a = -2.0 * gc * (2.0 * al * c.f1 + g2 * k * (2.0 * g1 + k).powi(2)) / k1;

    let a2 = ((-2.0 * dm * c.f2 + 8.0 * gc2 * al * c.f3) * c.f4 + 4.0 * gc2 * (1.0 - 4.0 * al / g2) * c.f5) / k2
        - dm / (2.0 * g2);

    let n = 2.0 * (dm * dm * c.f2 - 4.0 * gc2 * al * dm * c.f3 + 2.0 * gc2 * c.f5) / k2;

    let r3n = (-2.0 * dm * dm * c.x0 * c.f2 + 8.0 * gc2 * al * dm * c.x0 * c.f3
        - 4.0 * gc2 * (g2 * g2 + 4.0 * al * dm) * c.f5
        - 4.0 * gc2 * k * g2 * g2 * ((k + 2.0 * g1).powi(2) - 4.0 * aa) * c.k3
        - dm * dm * k2 / 2.0)
        / ((k + g1) * k2 * g2);

    let r3a = 2.0 * gc / k1
        * (-4.0 * (k * g1 + 2.0 * g2 * al) * aa
            + 2.0 * g2 * (k * k + 4.0 * g2 * g2 + 4.0 * k * g1) * al
            + k * (k * g1 + 2.0 * g2 * g2) * (2.0 * g1 + k));

    let r3a2 = 2.0 / (k + g1) * ((dm * c.x1 * c.f2 - 4.0 * gc2 * al * c.x1 * c.f3 + 2.0 * gc2 * c.x2 * c.f5) / k2 + c.x3 / 4.0);

    let mut m = MomentVector::zeros();
    m[Moment::R3] = re(dressed.inversion());
    m[Moment::A] = a;
    m[Moment::Adag] = a.conj();
    m[Moment::R3A] = r3a;
    m[Moment::R3Adag] = r3a.conj();
    m[Moment::A2] = a2;
    m[Moment::Adag2] = a2.conj();
    m[Moment::AdagA] = re(n.re);
    m[Moment::R3A2] = r3a2;
    m[Moment::R3Adag2] = r3a2.conj();
    m[Moment::R3AdagA] = re(r3n.re);
    Ok(m)
}

/// Field moments of the resonant closed form specialized to `delta_a = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedMoments {
    pub a: Complex64,
    pub a2: Complex64,
    pub photon_number: f64,
}

/// Reduced expressions for `<a>`, `<a^2>` and `<a^dag a>` at
/// `delta_a = delta_c = 0`. Secular mode drops every `1/Omega` term.
pub fn reduced_steady(dressed: &DressedParams, delta_c: f64) -> Result<ReducedMoments> {
    require_resonant(delta_c)?;
    if (dressed.s * dressed.s - dressed.c * dressed.c).abs() > 1e-12 {
        return Err(Error::ClosedFormUndefined("reduced forms need delta_a = 0"));
    }
    let (g1, gam1, gam2, k) = (dressed.g1, dressed.gamma1, dressed.gamma2, dressed.kappa);
    if gam1 == 0.0 || gam2 == 0.0 {
        return Err(Error::ClosedFormUndefined("reduced forms need gamma1, gamma2 != 0"));
    }
    let w = dressed.non_secular_weight();
    let d = gam1 * gam1 - gam2 * gam2;
    let gg = g1 * g1;
    let u = (gam1 + k) * (2.0 * gam1 + k) * (2.0 * gam1 + 3.0 * k) + (4.0 * gam1 + 3.0 * k) * gam2 * gam2;

    let a = -2.0 * g1 * gam2 / (gam1 * k)
        * Complex64::new(
            1.0,
            4.0 * gg * gam1 * w / (k * gam2) - 8.0 * gg * d * w / (k * gam2 * (2.0 * gam1 + k)),
        );
    let bracket = 1.0 - d / (gam1 * (gam1 + k))
        + 32.0 * gg / (k * k) * (1.0 - u * d / (gam1 * (gam1 + k).powi(2) * (2.0 * gam1 + k).powi(2)));
    let a2_re = 4.0 * gg / (k * k) * (1.0 - 2.0 * d / (gam1 * (2.0 * gam1 + k))) - 2.0 * gg * gg * w * w / (k * k) * bracket;
    let a2_im = gg * gam2 * w / (k * gam1)
        * (1.0 + 32.0 * gg / (k * k) * (1.0 - (3.0 * k + 4.0 * gam1) * d / ((k + gam1) * (k + 2.0 * gam1).powi(2))));
    let n = 4.0 * gg / (k * k) * (1.0 - 2.0 * d / (gam1 * (2.0 * gam1 + k)) + gg * w * w / 2.0 * bracket);
    Ok(ReducedMoments { a, a2: Complex64::new(a2_re, a2_im), photon_number: n })
}
