use num_complex::Complex64;

use super::EllipticModulus;
use crate::error::{domain, Result};

/// The three basic Jacobi elliptic functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: Complex64,
    pub cn: Complex64,
    pub dn: Complex64,
}

impl Jacobi {
    pub fn cd(&self) -> Complex64 {
        self.cn / self.dn
    }
}

// Landen chain stops once m is below this; the O(m) base formulas then carry
// an O(m²) error below 1e-17.
const M_SMALL: f64 = 3e-9;
const MAX_LEVELS: usize = 40;

/// `sn`, `cn`, `dn` of complex argument and complex modulus.
///
/// Moduli with `|k²| > 1` go through the reciprocal-modulus transformation;
/// the rest through the descending Landen transformation down to a nearly
/// circular modulus. `k = 1` is rejected.
pub fn jacobi(u: Complex64, k: EllipticModulus) -> Result<Jacobi> {
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(domain("jacobi: argument must be finite"));
    }
    if k.mc().norm() == 0.0 {
        return Err(domain("jacobi: k = 1 is not supported"));
    }
    let m = k.m();
    if m.norm() > 1.0 {
        // sn(u|m) = sn(√m u | 1/m)/√m, cn ↔ dn. Even/odd structure makes the
        // choice of √m irrelevant.
        let root = m.sqrt();
        let inv = EllipticModulus::with_complement(1.0 / m, -k.mc() / m);
        let j = landen(u * root, inv);
        return Ok(Jacobi {
            sn: j.sn / root,
            cn: j.dn,
            dn: j.cn,
        });
    }
    Ok(landen(u, k))
}

fn landen(u: Complex64, k: EllipticModulus) -> Jacobi {
    let mut ks = [Complex64::default(); MAX_LEVELS];
    let mut m = k.m();
    let mut kp = k.mc().sqrt();
    let mut v = u;
    let mut levels = 0;
    while m.norm() > M_SMALL && levels < MAX_LEVELS {
        let onep = 1.0 + kp;
        // (1 − k')/(1 + k') without cancellation.
        let k1 = m / (onep * onep);
        kp = 2.0 * kp.sqrt() / onep;
        ks[levels] = k1;
        v /= 1.0 + k1;
        m = k1 * k1;
        levels += 1;
    }
    let (s, c) = (v.sin(), v.cos());
    let corr = m / 4.0 * (v - s * c);
    let mut sn = s - corr * c;
    let mut cn = c + corr * s;
    let mut dn = 1.0 - m / 2.0 * s * s;
    for &k1 in ks[..levels].iter().rev() {
        let sn2 = k1 * sn * sn;
        let denom = 1.0 + sn2;
        let sn_next = (1.0 + k1) * sn / denom;
        cn = cn * dn / denom;
        dn = (1.0 - sn2) / denom;
        sn = sn_next;
    }
    Jacobi { sn, cn, dn }
}

pub fn jacobi_sn(u: Complex64, k: EllipticModulus) -> Result<Complex64> {
    Ok(jacobi(u, k)?.sn)
}

pub fn jacobi_cn(u: Complex64, k: EllipticModulus) -> Result<Complex64> {
    Ok(jacobi(u, k)?.cn)
}

pub fn jacobi_dn(u: Complex64, k: EllipticModulus) -> Result<Complex64> {
    Ok(jacobi(u, k)?.dn)
}

/// `cd = cn/dn`.
pub fn jacobi_cd(u: Complex64, k: EllipticModulus) -> Result<Complex64> {
    Ok(jacobi(u, k)?.cd())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::legendre_k;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn values_at_origin() {
        for k in [0.0, 0.3, 0.9, 0.999] {
            let j = jacobi(c(0.0), EllipticModulus::real(k)).unwrap();
            assert_eq!(j.sn, c(0.0));
            assert!((j.cd() - 1.0).norm() < 1e-16);
        }
    }

    #[test]
    fn zero_modulus_is_circular() {
        for u in [0.1, 1.3, 4.0, -7.5] {
            let cn = jacobi_cn(c(u), EllipticModulus::real(0.0)).unwrap();
            assert!((cn.re - u.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn reference_values() {
        // sn(0.5 | m = 0.3), cn, dn (50-digit mpmath reference).
        let j = jacobi(c(0.5), EllipticModulus::from_m(c(0.3))).unwrap();
        assert!((j.sn.re - 0.474_215_622_711_820_63).abs() < 1e-14, "{}", j.sn);
        assert!((j.cn.re - 0.880_408_736_426_462_4).abs() < 1e-14, "{}", j.cn);
        assert!((j.dn.re - 0.965_678_964_745_951_2).abs() < 1e-14, "{}", j.dn);
    }

    #[test]
    fn imaginary_modulus_identity() {
        // cd(u, ik) = cn(u√(1+k²), k/√(1+k²))
        let k = 0.4;
        let s = (1.0f64 + k * k).sqrt();
        for u in [0.2, 1.0, 2.7] {
            let lhs = jacobi_cd(c(u), EllipticModulus::from_k(Complex64::new(0.0, k))).unwrap();
            let rhs = jacobi_cn(c(u * s), EllipticModulus::real(k / s)).unwrap();
            assert!((lhs - rhs).norm() < 1e-14, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn half_period_antisymmetry() {
        let k = EllipticModulus::real(0.8);
        let kk = legendre_k(k).unwrap();
        assert!((jacobi_cd(2.0 * kk, k).unwrap() + 1.0).norm() < 1e-13);
        for u in [0.3, 1.1, 2.9] {
            let a = jacobi_cd(c(u) + 2.0 * kk, k).unwrap();
            let b = jacobi_cd(c(u), k).unwrap();
            assert!((a + b).norm() < 1e-13);
        }
    }

    #[test]
    fn reciprocal_modulus_branch() {
        let k = EllipticModulus::from_m(Complex64::new(2.5, 0.7));
        let u = Complex64::new(0.4, 0.1);
        let j = jacobi(u, k).unwrap();
        assert!((j.sn * j.sn + j.cn * j.cn - 1.0).norm() < 1e-12);
        assert!((j.dn * j.dn + k.m() * j.sn * j.sn - 1.0).norm() < 1e-12);
    }

    #[test]
    fn rejects_unit_modulus() {
        assert!(jacobi(c(0.3), EllipticModulus::real(1.0)).is_err());
    }
}
