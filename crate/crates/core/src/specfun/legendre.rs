use std::f64::consts::PI;

use num_complex::Complex64;

use super::{carlson_rd, carlson_rf, EllipticModulus};
use crate::error::{domain, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_complete(k: EllipticModulus) -> Result<()> {
    if k.on_cut() {
        return Err(domain(format!(
            "complete elliptic integral undefined for k² = {} on [1, ∞)",
            k.m().re
        )));
    }
    Ok(())
}

/// Complete integral of the first kind `K(k) = R_F(0, 1−k², 1)`.
pub fn legendre_k(k: EllipticModulus) -> Result<Complex64> {
    check_complete(k)?;
    carlson_rf(ZERO, k.mc(), ONE)
}

/// Complete integral of the second kind.
pub fn legendre_e(k: EllipticModulus) -> Result<Complex64> {
    let m = k.m();
    if k.mc() == ZERO {
        return Ok(ONE);
    }
    check_complete(k)?;
    let y = k.mc();
    Ok(carlson_rf(ZERO, y, ONE)? - m / 3.0 * carlson_rd(ZERO, y, ONE)?)
}

/// Splits `φ = φ₀ + jπ` with `|Re φ₀| <= π/2`.
fn reduce(phi: Complex64) -> Result<(Complex64, f64)> {
    if !phi.re.is_finite() || !phi.im.is_finite() || phi.re.abs() > 1e6 {
        return Err(domain("elliptic amplitude must be finite and moderate"));
    }
    let j = (phi.re / PI).round();
    Ok((phi - j * PI, j))
}

/// Incomplete integral of the first kind `F(φ, k) = ∫₀^φ dθ / √(1 − k² sin²θ)`.
pub fn legendre_f(phi: Complex64, k: EllipticModulus) -> Result<Complex64> {
    let (phi0, j) = reduce(phi)?;
    let m = k.m();
    let (s, c) = (phi0.sin(), phi0.cos());
    let base = if s.norm() == 0.0 {
        ZERO
    } else {
        s * carlson_rf(c * c, ONE - m * s * s, ONE)?
    };
    if j == 0.0 {
        Ok(base)
    } else {
        Ok(base + 2.0 * j * legendre_k(k)?)
    }
}

/// Incomplete integral of the second kind `E(φ, k) = ∫₀^φ √(1 − k² sin²θ) dθ`.
pub fn legendre_e_inc(phi: Complex64, k: EllipticModulus) -> Result<Complex64> {
    let (phi0, j) = reduce(phi)?;
    let m = k.m();
    let (s, c) = (phi0.sin(), phi0.cos());
    let base = if s.norm() == 0.0 {
        ZERO
    } else {
        let (x, y) = (c * c, ONE - m * s * s);
        s * carlson_rf(x, y, ONE)? - m / 3.0 * s * s * s * carlson_rd(x, y, ONE)?
    };
    if j == 0.0 {
        Ok(base)
    } else {
        Ok(base + 2.0 * j * legendre_e(k)?)
    }
}
