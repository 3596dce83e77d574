//! Derivatives of analytic functions: complex step on the real axis and
//! Ridders–Richardson extrapolated central differences elsewhere.

use num_complex::Complex64;

/// `f'(x)` for real `x`, with `f` analytic and real on the real axis.
/// Free of subtractive cancellation, so the step can be tiny.
pub fn complex_step<F: Fn(Complex64) -> Complex64>(f: F, x: f64) -> f64 {
    const H: f64 = 1e-30;
    f(Complex64::new(x, H)).im / H
}

/// Central difference along the real direction, extrapolated with Ridders'
/// tableau. Returns the derivative and an error estimate.
pub fn richardson<F: Fn(Complex64) -> Complex64>(f: F, z: Complex64, h0: f64) -> (Complex64, f64) {
    const N: usize = 10;
    const SHRINK: f64 = 1.4;
    const SHRINK2: f64 = SHRINK * SHRINK;
    let mut table = [[Complex64::default(); N]; N];
    let mut h = h0;
    table[0][0] = (f(z + h) - f(z - h)) / (2.0 * h);
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        h /= SHRINK;
        table[0][i] = (f(z + h) - f(z - h)) / (2.0 * h);
        let mut fac = SHRINK2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK2;
            let e = (table[j][i] - table[j - 1][i])
                .norm()
                .max((table[j][i] - table[j - 1][i - 1]).norm());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).norm() >= 2.0 * err {
            break;
        }
    }
    (best, err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_step_of_exp_sin() {
        let d = complex_step(|z| z.exp() * z.sin(), 0.7);
        let exact = 0.7f64.exp() * (0.7f64.sin() + 0.7f64.cos());
        assert!((d - exact).abs() < 1e-15);
    }

    #[test]
    fn richardson_matches_analytic_derivative() {
        let z = Complex64::new(0.3, 0.4);
        let (d, err) = richardson(|w| (w * w).sin(), z, 0.1);
        let exact = (z * z).cos() * 2.0 * z;
        assert!((d - exact).norm() < 1e-11, "{d} vs {exact}, est {err}");
    }
}
