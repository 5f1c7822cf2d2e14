//! Shifted solves `(z I - A) x = b` for many shifts `z` sharing one matrix.
//!
//! `A` is reduced once to upper Hessenberg form `A = Q H Q^H` with Householder
//! reflections; each shift then costs a Hessenberg LU of `O(n^2)`.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct ShiftedSolver {
    q: ComplexMatrix,
    h: ComplexMatrix,
    scale: f64,
}

impl ShiftedSolver {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("shifted solver needs a square matrix".into()));
        }
        let n = a.rows();
        let mut h = a.clone();
        let mut q = ComplexMatrix::identity(n);
        let mut v = vec![ZERO; n];
        let mut w = vec![ZERO; n];

        for k in 0..n.saturating_sub(2) {
            let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = h[(k + 1, k)];
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
            // v = x + phase * ||x|| e1 maps x onto -phase * ||x|| e1.
            for i in k + 1..n {
                v[i] = h[(i, k)];
            }
            v[k + 1] += phase * norm;
            let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
            let tau = 2.0 / vnorm2;

            // H <- P H, rows k+1.. ; w_j = sum_i conj(v_i) H_ij
            w[k..n].iter_mut().for_each(|x| *x = ZERO);
            for i in k + 1..n {
                let vi = v[i].conj();
                for (wj, &hij) in w[k..n].iter_mut().zip(&h.row(i)[k..n]) {
                    *wj += vi * hij;
                }
            }
            for i in k + 1..n {
                let vi = v[i] * tau;
                for (hij, &wj) in h.row_mut(i)[k..n].iter_mut().zip(&w[k..n]) {
                    *hij -= vi * wj;
                }
            }
            // H <- H P and Q <- Q P, columns k+1..
            for m in [&mut h, &mut q] {
                for i in 0..n {
                    let row = &mut m.row_mut(i)[k + 1..n];
                    let s: Complex64 = row.iter().zip(&v[k + 1..n]).map(|(&x, &y)| x * y).sum::<Complex64>() * tau;
                    for (x, &y) in row.iter_mut().zip(&v[k + 1..n]) {
                        *x -= s * y.conj();
                    }
                }
            }
            for i in k + 2..n {
                h[(i, k)] = ZERO;
            }
        }
        let scale = a.norm_one().max(1.0);
        Ok(Self { q, h, scale })
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    pub fn hessenberg(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.q
    }

    /// Solves `(shift I - A) x = b`.
    pub fn solve(&self, shift: Complex64, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension(format!("rhs length {} for dimension {n}", b.len())));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        // y = Q^H b
        let mut y = vec![ZERO; n];
        for i in 0..n {
            let bi = b[i];
            if bi == ZERO {
                continue;
            }
            for (yj, &qij) in y.iter_mut().zip(self.q.row(i)) {
                *yj += qij.conj() * bi;
            }
        }

        // Gaussian elimination on M = shift I - H with adjacent-row pivoting;
        // the upper factor is kept densely in `m`.
        let mut m = ComplexMatrix::from_fn(n, n, |i, j| {
            if i > j + 1 {
                ZERO
            } else if i == j {
                shift - self.h[(i, j)]
            } else {
                -self.h[(i, j)]
            }
        });
        for k in 0..n - 1 {
            if m[(k + 1, k)].norm() > m[(k, k)].norm() {
                m.swap_rows(k, k + 1);
                y.swap(k, k + 1);
            }
            let pivot = m[(k, k)];
            if pivot.norm() <= f64::EPSILON * 1e-4 * self.scale {
                return Err(Error::Singular { rcond: 0.0 });
            }
            let l = m[(k + 1, k)] / pivot;
            if l != ZERO {
                let (top, bottom) = m.data_mut().split_at_mut((k + 1) * n);
                let pivot_row = &top[k * n + k..(k + 1) * n];
                for (x, &p) in bottom[k..n].iter_mut().zip(pivot_row) {
                    *x -= l * p;
                }
                let yk = y[k];
                y[k + 1] -= l * yk;
            }
        }
        for i in (0..n).rev() {
            let row = m.row(i);
            let s: Complex64 = row[i + 1..].iter().zip(&y[i + 1..]).map(|(&a, &b)| a * b).sum();
            if row[i].norm() <= f64::EPSILON * 1e-4 * self.scale {
                return Err(Error::Singular { rcond: 0.0 });
            }
            y[i] = (y[i] - s) / row[i];
        }
        Ok(self.q.mul_vec(&y))
    }
}
