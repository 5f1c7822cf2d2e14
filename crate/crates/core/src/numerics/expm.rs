//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use num_complex::Complex64;

use super::lu::LuFactorization;
use super::matrix::ComplexMatrix;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `exp(A)`.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    if n == 0 {
        return a.clone();
    }
    let norm = a.norm_one();
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(re(0.5_f64.powi(squarings)));

    let b = &PADE13;
    let ident = ComplexMatrix::identity(n);
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let mut inner_u = a6.scale(re(b[13]));
    inner_u.add_scaled(re(b[11]), &a4);
    inner_u.add_scaled(re(b[9]), &a2);
    let mut u = a6.matmul(&inner_u);
    u.add_scaled(re(b[7]), &a6);
    u.add_scaled(re(b[5]), &a4);
    u.add_scaled(re(b[3]), &a2);
    u.add_scaled(re(b[1]), &ident);
    let u = scaled.matmul(&u);

    let mut inner_v = a6.scale(re(b[12]));
    inner_v.add_scaled(re(b[10]), &a4);
    inner_v.add_scaled(re(b[8]), &a2);
    let mut v = a6.matmul(&inner_v);
    v.add_scaled(re(b[6]), &a6);
    v.add_scaled(re(b[4]), &a4);
    v.add_scaled(re(b[2]), &a2);
    v.add_scaled(re(b[0]), &ident);

    let denominator = &v - &u;
    let numerator = &v + &u;
    // V - U is well conditioned for ||A|| <= theta13.
    let lu = LuFactorization::new(denominator).expect("Padé denominator is nonsingular after scaling");
    let mut result = lu.solve_matrix(&numerator);
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}

/// `exp(A t) x`.
pub fn expm_action(a: &ComplexMatrix, x: &[Complex64], t: f64) -> Vec<Complex64> {
    if t == 0.0 {
        return x.to_vec();
    }
    expm(&a.scale(re(t))).mul_vec(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::lu::lu_solve;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_generator_is_identity() {
        let x = vec![c(1.0, -2.0), c(0.5, 0.5)];
        assert_eq!(expm_action(&ComplexMatrix::zeros(2, 2), &x, 3.0), x);
    }

    #[test]
    fn diagonal_is_entrywise_exponential() {
        let d = [c(-1.0, 2.0), c(0.3, 0.0), c(-40.0, -7.0)];
        let e = expm(&ComplexMatrix::from_diagonal(&d));
        for (i, z) in d.iter().enumerate() {
            assert!((e[(i, i)] - z.exp()).norm() <= 1e-13 * z.exp().norm().max(1e-300));
        }
    }

    #[test]
    fn nilpotent_is_polynomial() {
        // exp([[0, a], [0, 0]] t) = [[1, a t], [0, 1]]
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let y = expm_action(&a, &[c(0.0, 0.0), c(1.0, 0.0)], 1.5);
        assert!((y[0] - c(3.0, 1.5)).norm() < 1e-14);
        assert!((y[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn similarity_transform_oracle_large_norm() {
        // A = S D S^-1 with known spectrum; exp(A) = S exp(D) S^-1.
        let n = 8;
        let s = ComplexMatrix::from_fn(n, n, |i, j| {
            let base = if i == j { 2.0 } else { 0.0 };
            c(base + ((i * 3 + j * 5) % 7) as f64 / 10.0, ((i + 2 * j) % 5) as f64 / 20.0)
        });
        let d: Vec<Complex64> = (0..n).map(|k| c(-(k as f64) * 3.0, 5.0 * (k as f64).sin())).collect();
        let s_inv_cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let mut e = vec![c(0.0, 0.0); n];
                e[j] = c(1.0, 0.0);
                lu_solve(&s, &e).unwrap().x
            })
            .collect();
        let s_inv = ComplexMatrix::from_fn(n, n, |i, j| s_inv_cols[j][i]);
        let a = s.matmul(&ComplexMatrix::from_diagonal(&d)).matmul(&s_inv);
        let exp_d: Vec<Complex64> = d.iter().map(|z| z.exp()).collect();
        let reference = s.matmul(&ComplexMatrix::from_diagonal(&exp_d)).matmul(&s_inv);
        let got = expm(&a);
        let err = (&got - &reference).max_abs() / reference.max_abs();
        assert!(err < 1e-10, "relative error {err:e}");
    }
}
