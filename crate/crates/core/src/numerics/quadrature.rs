use std::f64::consts::FRAC_PI_2;

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => spacing * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

/// One Richardson step for an `O(h^2)` rule evaluated at `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Trapezoid integrals of a line shape over the whole real axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineIntegral {
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
}

impl LineIntegral {
    /// `|fine - coarse|`, a bound on the error of `coarse` and a loose one on
    /// the extrapolated value.
    pub fn refinement_change(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

/// Integrates `f` over `(-inf, inf)` with the substitution `x = width tan u`.
///
/// A line shape decaying like `x^-2` becomes a bounded integrand on
/// `[-pi/2, pi/2]`; its endpoint values are the limits `x^2 f(x) / width`,
/// evaluated at `|x| = 1e7 width`. `intervals` is the coarse interval count;
/// the fine pass doubles it and reuses the coarse nodes.
pub fn integrate_line(f: impl Fn(f64) -> f64, width: f64, intervals: usize) -> LineIntegral {
    assert!(width > 0.0 && intervals >= 2);
    let n_fine = 2 * intervals;
    let h = 2.0 * FRAC_PI_2 / n_fine as f64;
    let far = 1e7 * width;
    let values: Vec<f64> = (0..=n_fine)
        .map(|k| {
            if k == 0 || k == n_fine {
                let x = if k == 0 { -far } else { far };
                f(x) * (width * width + x * x) / width
            } else {
                let u = -FRAC_PI_2 + k as f64 * h;
                let x = width * u.tan();
                f(x) * width / (u.cos() * u.cos())
            }
        })
        .collect();
    let fine = trapezoid(&values, h);
    let coarse_values: Vec<f64> = values.iter().step_by(2).copied().collect();
    let coarse = trapezoid(&coarse_values, 2.0 * h);
    LineIntegral { coarse, fine, extrapolated: richardson(coarse, fine) }
}

/// `n` uniformly spaced points on `[min, max]`.
pub fn uniform_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (n - 1) as f64;
            (0..n).map(|k| if k == n - 1 { max } else { min + k as f64 * step }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrates_to_length_times_value() {
        assert!((trapezoid(&[2.5; 11], 0.1) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn linear_is_exact() {
        let xs = uniform_grid(-1.0, 3.0, 9);
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        // integral of 2x+1 over [-1,3] = 8 + 4 = 12
        assert!((trapezoid(&ys, 0.5) - 12.0).abs() < 1e-14);
    }

    #[test]
    fn lorentzian_on_wide_grid_within_tail_bound() {
        // integral of w / (pi (x^2 + w^2)) over [-L, L] = (2/pi) atan(L/w)
        let w = 0.5;
        let l = 200.0;
        let n = 40001;
        let xs = uniform_grid(-l, l, n);
        let ys: Vec<f64> = xs.iter().map(|x| w / (PI * (x * x + w * w))).collect();
        let got = trapezoid(&ys, 2.0 * l / (n - 1) as f64);
        let exact = 2.0 / PI * (l / w).atan();
        // Trapezoid error bound h^2 (b-a) max|f''| / 12 with max|f''| = 2/(pi w^3).
        let h = 2.0 * l / (n - 1) as f64;
        let bound = h * h * 2.0 * l * 2.0 / (PI * w.powi(3)) / 12.0;
        assert!((got - exact).abs() <= bound, "{got} vs {exact}, bound {bound}");
        // Tail mass 1 - exact is the truncation error against the full line.
        assert!((1.0 - exact - 2.0 / PI * (w / l).atan()).abs() < 1e-12);
    }

    #[test]
    fn mapped_line_integral_of_lorentzian_and_squared_lorentzian() {
        let k = 1.0;
        let lor = integrate_line(|x| k / (k * k / 4.0 + x * x), k, 64);
        assert!((lor.extrapolated - 2.0 * PI).abs() < 1e-9, "{lor:?}");
        // integral of 1/(k^2 + 4x^2)^2 dx = pi / (4 k^3)
        let sq = integrate_line(|x| 1.0 / (k * k + 4.0 * x * x).powi(2), k, 64);
        assert!((sq.extrapolated - PI / 4.0).abs() < 1e-9, "{sq:?}");
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = uniform_grid(-1.0, 1.0, 2001);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[2000], 1.0);
        assert!((g[1000]).abs() < 1e-15);
    }
}
