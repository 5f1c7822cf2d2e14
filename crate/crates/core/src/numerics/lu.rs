use num_complex::Complex64;

use super::matrix::{vec_norm_one, ComplexMatrix};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Solution of a dense linear system together with an estimate of the
/// 1-norm condition number of the matrix that produced it.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<Complex64>,
    pub condition: f64,
}

/// LU factorization with partial (row) pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

impl LuFactorization {
    pub fn new(mut a: ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::Dimension("matrix has non-finite entries".into()));
        }
        let n = a.rows();
        let norm_one = a.norm_one();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in k + 1..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular { rcond: 0.0 });
            }
            a.swap_rows(k, p);
            perm.swap(k, p);

            let inv_pivot = ONE / a[(k, k)];
            let (top, bottom) = a.data_mut().split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n + k + 1..(k + 1) * n];
            for row in bottom.chunks_exact_mut(n) {
                let l = row[k] * inv_pivot;
                row[k] = l;
                if l == ZERO {
                    continue;
                }
                for (x, &y) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= l * y;
                }
            }
        }
        Ok(Self { lu: a, perm, norm_one })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: Complex64 = row[..i].iter().zip(&x[..i]).map(|(&l, &y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(&u, &y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        // A^H = U^H L^H P, so solve U^H z = b, L^H w = z, x = P^T w.
        let mut z = b.to_vec();
        for i in 0..n {
            let zi = z[i] / self.lu[(i, i)].conj();
            z[i] = zi;
            for (j, &u) in self.lu.row(i).iter().enumerate().skip(i + 1) {
                z[j] -= u.conj() * zi;
            }
        }
        for i in (0..n).rev() {
            let zi = z[i];
            for (j, &l) in self.lu.row(i).iter().enumerate().take(i) {
                z[j] -= l.conj() * zi;
            }
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let cols: Vec<Vec<Complex64>> = (0..b.cols()).map(|j| self.solve(&b.column(j))).collect();
        ComplexMatrix::from_fn(b.rows(), b.cols(), |i, j| cols[j][i])
    }

    /// Hager-Higham estimate of `||A^-1||_1`.
    pub fn inverse_norm_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            estimate = vec_norm_one(&y);
            let xi: Vec<Complex64> = y
                .iter()
                .map(|v| if v.norm() > 0.0 { v / v.norm() } else { ONE })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(j, v)| (j, v.norm()))
                .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            x = vec![ZERO; n];
            x[j] = ONE;
            last_j = j;
        }
        // Alternating probe guards against the classic counterexamples.
        let probe: Vec<Complex64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let ramp = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
                Complex64::new(sign * (1.0 + ramp), 0.0)
            })
            .collect();
        let alt = 2.0 * vec_norm_one(&self.solve(&probe)) / (3.0 * n as f64);
        estimate.max(alt)
    }

    /// Estimated 1-norm condition number `||A||_1 ||A^-1||_1`.
    pub fn condition(&self) -> f64 {
        self.norm_one * self.inverse_norm_estimate()
    }

    pub fn rcond(&self) -> f64 {
        let c = self.condition();
        if c.is_finite() && c > 0.0 {
            1.0 / c
        } else {
            0.0
        }
    }
}

/// Reciprocal conditions below this are treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-14;

pub(crate) fn factor_checked(a: ComplexMatrix) -> Result<(LuFactorization, f64)> {
    let lu = LuFactorization::new(a)?;
    let rcond = lu.rcond();
    if rcond < SINGULAR_RCOND {
        return Err(Error::Singular { rcond });
    }
    Ok((lu, 1.0 / rcond))
}

/// Dense solve of `A x = b` with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[Complex64]) -> Result<Solution> {
    if a.rows() != b.len() {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let (lu, condition) = factor_checked(a.clone())?;
    Ok(Solution { x: lu.solve(b), condition })
}

/// Finds `x` with `A x = 0` and `constraint . x = value`, assuming the
/// nullspace of `A` is one-dimensional.
///
/// One equation of `A` is replaced by the constraint. Candidate rows are taken
/// from the support of the constraint; a candidate is accepted when the
/// bordered system is nonsingular and the dropped equation is still satisfied.
pub fn constrained_nullvector(
    a: &ComplexMatrix,
    constraint: &[Complex64],
    value: Complex64,
) -> Result<Solution> {
    let n = a.rows();
    if !a.is_square() || constraint.len() != n {
        return Err(Error::Dimension(format!(
            "constrained nullvector: matrix {}x{}, constraint length {}",
            a.rows(),
            a.cols(),
            constraint.len()
        )));
    }
    let scale = a.norm_one().max(f64::MIN_POSITIVE);
    let candidates: Vec<usize> = constraint
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, _)| i)
        .take(4)
        .collect();
    if candidates.is_empty() {
        return Err(Error::Nullspace("constraint row is identically zero".into()));
    }

    let mut rhs = vec![ZERO; n];
    let mut last_failure = String::new();
    for &r in &candidates {
        let mut bordered = a.clone();
        bordered.row_mut(r).copy_from_slice(constraint);
        rhs.iter_mut().for_each(|v| *v = ZERO);
        rhs[r] = value;
        match factor_checked(bordered) {
            Ok((lu, condition)) => {
                let x = lu.solve(&rhs);
                let dropped: Complex64 = a.row(r).iter().zip(&x).map(|(&p, &q)| p * q).sum();
                let tolerance = 1e-8 * scale * vec_norm_one(&x);
                if dropped.norm() <= tolerance {
                    return Ok(Solution { x, condition });
                }
                last_failure = format!(
                    "dropped equation {r} violated by {:.3e} (A likely nonsingular)",
                    dropped.norm()
                );
            }
            Err(Error::Singular { rcond }) => {
                last_failure = format!("bordered system singular after replacing row {r} (rcond {rcond:.3e})");
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Nullspace(last_failure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::vec_norm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random entries in [-1, 1).
    fn lcg_matrix(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn identity_returns_rhs() {
        let b = vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.0, 0.0)];
        let sol = lu_solve(&ComplexMatrix::identity(3), &b).unwrap();
        assert_eq!(sol.x, b);
        assert!((sol.condition - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_known_inverse() {
        // [[2, i], [0, 1]]^-1 = [[1/2, -i/2], [0, 1]]
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let sol = lu_solve(&a, &[c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((sol.x[0] - c(0.5, -1.0)).norm() < 1e-15);
        assert!((sol.x[1] - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn random_fifty_residual() {
        let a = lcg_matrix(50, 7);
        let b: Vec<Complex64> = (0..50).map(|i| c(i as f64, -(i as f64) / 3.0)).collect();
        let sol = lu_solve(&a, &b).unwrap();
        let r: Vec<Complex64> = a.mul_vec(&sol.x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(vec_norm(&r) <= 1e-12 * sol.condition * vec_norm(&b));
    }

    #[test]
    fn adjoint_solve_matches_explicit_adjoint() {
        let a = lcg_matrix(12, 3);
        let b: Vec<Complex64> = (0..12).map(|i| c(1.0, i as f64)).collect();
        let lu = LuFactorization::new(a.clone()).unwrap();
        let x = lu.solve_adjoint(&b);
        let y = lu_solve(&a.adjoint(), &b).unwrap().x;
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-11);
        }
    }

    #[test]
    fn condition_estimate_brackets_diagonal_case() {
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(1e-6, 0.0), c(2.0, 0.0)]);
        let lu = LuFactorization::new(a).unwrap();
        assert!((lu.condition() - 2e6).abs() / 2e6 < 1e-12);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!(matches!(lu_solve(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::Singular { .. })));
    }

    #[test]
    fn nullvector_of_diag_zero_minus_one() {
        let a = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(-1.0, 0.0)]);
        let sol = constrained_nullvector(&a, &[c(1.0, 0.0), c(1.0, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((sol.x[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(sol.x[1].norm() < 1e-15);
    }

    #[test]
    fn stationary_vector_of_rate_generator_matches_power_iteration() {
        // Continuous-time generator acting on column probability vectors.
        let rates = [[0.0, 2.0, 0.5], [1.0, 0.0, 3.0], [0.25, 1.5, 0.0]]; // rates[i][j]: j -> i
        let g = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(-(0..3).map(|k| rates[k][j]).sum::<f64>(), 0.0)
            } else {
                c(rates[i][j], 0.0)
            }
        });
        let ones = [c(1.0, 0.0); 3];
        let sol = constrained_nullvector(&g, &ones, c(1.0, 0.0)).unwrap();

        // Oracle: power iteration on the uniformized chain P = I + G / q.
        let q = 10.0;
        let mut p = [1.0 / 3.0; 3];
        for _ in 0..5000 {
            let mut next = [0.0; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let pij = if i == j { 1.0 + g[(i, j)].re / q } else { g[(i, j)].re / q };
                    next[i] += pij * p[j];
                }
            }
            p = next;
        }
        for i in 0..3 {
            assert!((sol.x[i].re - p[i]).abs() < 1e-12, "{} vs {}", sol.x[i].re, p[i]);
            assert!(sol.x[i].im.abs() < 1e-15);
        }
    }

    #[test]
    fn nullvector_rejects_two_dimensional_nullspace() {
        let a = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let r = constrained_nullvector(&a, &[c(1.0, 0.0); 3], c(1.0, 0.0));
        assert!(matches!(r, Err(Error::Nullspace(_))));
    }

    #[test]
    fn nullvector_rejects_nonsingular_matrix() {
        let a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = constrained_nullvector(&a, &[c(1.0, 0.0), c(1.0, 0.0)], c(1.0, 0.0));
        assert!(matches!(r, Err(Error::Nullspace(_))));
    }

    #[test]
    fn factorization_is_deterministic() {
        let a = lcg_matrix(20, 11);
        let b: Vec<Complex64> = (0..20).map(|i| c(i as f64, 1.0)).collect();
        let x1 = lu_solve(&a, &b).unwrap().x;
        let x2 = lu_solve(&a, &b).unwrap().x;
        assert!(x1.iter().zip(&x2).all(|(p, q)| p.re.to_bits() == q.re.to_bits() && p.im.to_bits() == q.im.to_bits()));
    }
}
