use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Photon-number truncation: Fock states `0..=n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockConfig {
    pub n_max: usize,
}

impl FockConfig {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParameter { name: "n_max", reason: "must be >= 1".into() });
        }
        Ok(Self { n_max })
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    /// Dimension of dressed qubit times Fock space.
    pub fn dim(&self) -> usize {
        2 * self.levels()
    }

    /// Basis index of `|q> (x) |k>`; `q = 0` is the lower dressed state.
    pub fn index(&self, q: usize, k: usize) -> usize {
        q * self.levels() + k
    }
}

/// A matrix on the product space.
pub type OperatorMatrix = ComplexMatrix;

/// The elementary operators on `dressed qubit (x) Fock`.
#[derive(Clone, Debug)]
pub struct Operators {
    pub fock: FockConfig,
    pub a: OperatorMatrix,
    pub adag: OperatorMatrix,
    /// `R22 - R11`.
    pub r3: OperatorMatrix,
    /// `|1><2|`, lowering between dressed states.
    pub r12: OperatorMatrix,
    /// `|2><1|`.
    pub r21: OperatorMatrix,
    pub identity: OperatorMatrix,
}

impl Operators {
    pub fn new(fock: FockConfig) -> Self {
        let n = fock.levels();
        let d = fock.dim();
        let mut a = ComplexMatrix::zeros(d, d);
        let mut r3 = ComplexMatrix::zeros(d, d);
        let mut r12 = ComplexMatrix::zeros(d, d);
        for q in 0..2 {
            for k in 0..n {
                let i = fock.index(q, k);
                r3[(i, i)] = Complex64::new(if q == 0 { -1.0 } else { 1.0 }, 0.0);
                if k + 1 < n {
                    a[(i, fock.index(q, k + 1))] = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
                }
            }
        }
        for k in 0..n {
            r12[(fock.index(0, k), fock.index(1, k))] = Complex64::new(1.0, 0.0);
        }
        Self { fock, adag: a.adjoint(), a, r3, r21: r12.adjoint(), r12, identity: ComplexMatrix::identity(d) }
    }

    pub fn dim(&self) -> usize {
        self.fock.dim()
    }

    pub fn number(&self) -> OperatorMatrix {
        self.adag.matmul(&self.a)
    }
}

/// A density matrix on the product space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        let herm = rho.hermiticity_error();
        if herm > HERMITICITY_TOLERANCE {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = rho.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        if !is_positive_semidefinite(&rho, POSITIVITY_TOLERANCE) {
            return Err(Error::InvalidDensity(format!("eigenvalue below -{POSITIVITY_TOLERANCE:e}")));
        }
        Ok(Self { rho })
    }

    /// `G G^dag / Tr(G G^dag)`, positive by construction.
    pub fn from_factor(g: &ComplexMatrix) -> Result<Self> {
        let m = g.matmul(&g.adjoint());
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidDensity("zero factor".into()));
        }
        let mut m = m.scale(Complex64::new(1.0 / tr, 0.0));
        hermitize(&mut m);
        Self::new(m)
    }

    pub fn pure(state: &[Complex64]) -> Result<Self> {
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let psi: Vec<Complex64> = state.iter().map(|z| z / norm).collect();
        let n = psi.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj()))
    }

    /// `|q> (x) |beta>` with the coherent amplitudes truncated at `n_max`
    /// (not renormalized, so the trace deficit is the truncation leakage).
    pub fn coherent(fock: FockConfig, q: usize, beta: Complex64) -> Result<Self> {
        let mut psi = vec![ZERO; fock.dim()];
        let mut amp = Complex64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
        for k in 0..fock.levels() {
            psi[fock.index(q, k)] = amp;
            amp = amp * beta / ((k + 1) as f64).sqrt();
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (1.0 - norm2).abs() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("coherent state leaks {:.3e} past n_max", 1.0 - norm2)));
        }
        Self::pure(&psi)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// `Tr(O rho)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Complex64 {
        let d = self.dim();
        let mut s = ZERO;
        for i in 0..d {
            for (j, &o) in op.row(i).iter().enumerate() {
                if o != ZERO {
                    s += o * self.rho[(j, i)];
                }
            }
        }
        s
    }
}

pub(crate) fn hermitize(m: &mut ComplexMatrix) {
    let n = m.rows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in i + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
}

/// Cholesky of the Hermitian part shifted by `tol`: succeeds iff every
/// eigenvalue exceeds `-tol` (up to rounding).
pub fn is_positive_semidefinite(m: &ComplexMatrix, tol: f64) -> bool {
    let n = m.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = m[(j, j)].re + tol;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > 0.0) {
            return false;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_algebra() {
        let ops = Operators::new(FockConfig::new(6).unwrap());
        assert_eq!(ops.a.adjoint(), ops.adag);
        let comm = ops.a.commutator(&ops.adag);
        let n = ops.fock.levels();
        for q in 0..2 {
            for k in 0..n {
                let i = ops.fock.index(q, k);
                let want = if k == n - 1 { -(n as f64 - 1.0) } else { 1.0 };
                assert!((comm[(i, i)].re - want).abs() < 1e-14);
            }
        }
        let anti = &ops.r12.matmul(&ops.r21) + &ops.r21.matmul(&ops.r12);
        assert_eq!(anti, ops.identity);
        let r22 = ops.r21.matmul(&ops.r12);
        let r11 = ops.r12.matmul(&ops.r21);
        assert_eq!(&r22 - &r11, ops.r3);
    }

    #[test]
    fn density_validation() {
        let fock = FockConfig::new(3).unwrap();
        let mut m = ComplexMatrix::zeros(fock.dim(), fock.dim());
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(1, 1)] = Complex64::new(-0.1, 0.0);
        m[(0, 0)] = Complex64::new(1.1, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 1)] = ZERO;
        m[(0, 0)] = Complex64::new(0.9, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(FockConfig::new(0).is_err());
    }

    #[test]
    fn positivity_check() {
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5), Complex64::new(0.5, 0.0)],
        );
        assert!(is_positive_semidefinite(&m, 1e-12));
        let bad = ComplexMatrix::from_row_major(2, 2, vec![Complex64::new(0.5, 0.0), Complex64::new(0.6, 0.0), Complex64::new(0.6, 0.0), Complex64::new(0.5, 0.0)]);
        assert!(!is_positive_semidefinite(&bad, 1e-8));
    }

    #[test]
    fn coherent_state_moments() {
        let fock = FockConfig::new(20).unwrap();
        let ops = Operators::new(fock);
        let rho = DensityMatrix::coherent(fock, 0, Complex64::new(0.5, 0.0)).unwrap();
        assert!((rho.expectation(&ops.a) - Complex64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((rho.expectation(&ops.number()).re - 0.25).abs() < 1e-12);
        assert!((rho.expectation(&ops.r3).re + 1.0).abs() < 1e-14);
        assert!(DensityMatrix::coherent(FockConfig::new(3).unwrap(), 0, Complex64::new(3.0, 0.0)).is_err());
    }
}
