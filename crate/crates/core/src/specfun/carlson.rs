use num_complex::Complex64;

use crate::error::{domain, Result};

// Relative truncation target of the duplication iteration.
const R: f64 = 1e-16;

fn count_zeros(args: &[Complex64]) -> usize {
    args.iter().filter(|z| z.norm() == 0.0).count()
}

/// Carlson's symmetric integral of the first kind,
/// `R_F(x,y,z) = ½∫₀^∞ dt / √((t+x)(t+y)(t+z))`.
///
/// Arguments must lie off the negative real axis; at most one may vanish.
pub fn carlson_rf(x: Complex64, y: Complex64, z: Complex64) -> Result<Complex64> {
    if count_zeros(&[x, y, z]) > 1 {
        return Err(domain("carlson_rf: at most one argument may be zero"));
    }
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + z) / 3.0;
    let q = (3.0 * R).powf(-1.0 / 6.0) * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut a = a0;
    let mut scale = 1.0;
    for _ in 0..100 {
        if q * scale < a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        x = (x + lambda) * 0.25;
        y = (y + lambda) * 0.25;
        z = (z + lambda) * 0.25;
        a = (a + lambda) * 0.25;
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy);
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    let series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0;
    Ok(series / a.sqrt())
}

/// Carlson's degenerate integral of the second kind,
/// `R_D(x,y,z) = (3/2)∫₀^∞ dt / ((t+z)√((t+x)(t+y)(t+z)))`.
///
/// `z` must be nonzero and at most one of `x`, `y` may vanish.
pub fn carlson_rd(x: Complex64, y: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 || count_zeros(&[x, y]) > 1 {
        return Err(domain("carlson_rd: z must be nonzero and x, y not both zero"));
    }
    let (x0, y0) = (x, y);
    let (mut x, mut y, mut z) = (x, y, z);
    let a0 = (x + y + 3.0 * z) / 5.0;
    let q = (R / 4.0).powf(-1.0 / 6.0) * (a0 - x).norm().max((a0 - y).norm()).max((a0 - z).norm());
    let mut a = a0;
    let mut scale = 1.0;
    let mut sum = Complex64::default();
    for _ in 0..100 {
        if q * scale < a.norm() {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sx * sz + sy * sz;
        sum += scale / (sz * (z + lambda));
        x = (x + lambda) * 0.25;
        y = (y + lambda) * 0.25;
        z = (z + lambda) * 0.25;
        a = (a + lambda) * 0.25;
        scale *= 0.25;
    }
    let xx = (a0 - x0) * scale / a;
    let yy = (a0 - y0) * scale / a;
    let zz = -(xx + yy) / 3.0;
    let xy = xx * yy;
    let z2 = zz * zz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0 - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    Ok(series * scale / (a * a.sqrt()) + 3.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    // Complete K(k) by the arithmetic-geometric mean, independent of Carlson.
    fn agm_k(k: f64) -> f64 {
        let (mut a, mut b) = (1.0, (1.0 - k * k).sqrt());
        while (a - b).abs() > 1e-16 * a {
            let an = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = an;
        }
        PI / (2.0 * a)
    }

    #[test]
    fn rf_special_values() {
        assert!((carlson_rf(c(1.0), c(1.0), c(1.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((carlson_rf(c(0.0), c(1.0), c(1.0)).unwrap() - PI / 2.0).norm() < 1e-15);
        let k = agm_k(0.5);
        assert!((k - 1.685_750_354_812_596).abs() < 1e-15);
        let rf = carlson_rf(c(0.0), c(0.75), c(1.0)).unwrap();
        assert!((rf.re - k).abs() < 1e-14 * k && rf.im == 0.0);
    }

    #[test]
    fn rf_is_symmetric() {
        let (x, y, z) = (Complex64::new(0.3, 0.2), c(1.7), Complex64::new(2.0, -0.5));
        let a = carlson_rf(x, y, z).unwrap();
        for (p, q, r) in [(y, x, z), (z, y, x), (x, z, y), (y, z, x)] {
            assert!((carlson_rf(p, q, r).unwrap() - a).norm() < 1e-15);
        }
    }

    #[test]
    fn rf_rejects_two_zeros() {
        assert!(carlson_rf(c(0.0), c(0.0), c(1.0)).is_err());
    }

    #[test]
    fn rd_closed_forms() {
        // R_D(x,x,x) = x^{-3/2}
        let v = carlson_rd(c(2.0), c(2.0), c(2.0)).unwrap();
        assert!((v.re - 2f64.powf(-1.5)).abs() < 1e-15);
        // R_D(0,2,1) = 1.7972103521033884 (DLMF 19.36 test value)
        let v = carlson_rd(c(0.0), c(2.0), c(1.0)).unwrap();
        assert!((v.re - 1.797_210_352_103_388_3).abs() < 1e-14);
    }
}
