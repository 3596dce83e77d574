//! The turning-point map `q₀ = q_t·cd(u, k)` with `u = (Θ/2)√(1 − q_t²/2)`
//! and `k² = q_t²/(2 − q_t²)`.

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::numeric::diff::{complex_step, richardson};
use crate::specfun::{jacobi, legendre_k, EllipticModulus};

/// `U(q) = (q² − 1)²/4`.
pub fn potential(q: Complex64) -> Complex64 {
    let s = q * q - 1.0;
    s * s * 0.25
}

/// `U'(q) = q(q² − 1)`.
pub fn potential_slope(q: Complex64) -> Complex64 {
    q * (q * q - 1.0)
}

/// Modulus of the trajectory with turning point `q_t`; the complement is
/// formed as `2(1 − q_t)(1 + q_t)/(2 − q_t²)` to stay accurate near `|q_t| = 1`.
pub fn modulus(q_t: Complex64) -> EllipticModulus {
    let q2 = q_t * q_t;
    let denom = 2.0 - q2;
    EllipticModulus::with_complement(q2 / denom, 2.0 * (1.0 - q_t) * (1.0 + q_t) / denom)
}

/// Angular rate `√(1 − q_t²/2)` of the trajectory in the inverted potential.
pub fn rate(q_t: Complex64) -> Complex64 {
    (1.0 - q_t * q_t * 0.5).sqrt()
}

fn check(q_t: Complex64, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("Θ must be positive and finite, got {theta}")));
    }
    if (q_t * q_t - 1.0).norm() < 1e-300 {
        return Err(domain("turning point on the separatrix q_t = ±1"));
    }
    if (q_t * q_t - 2.0).norm() < 1e-14 {
        return Err(domain("turning point at q_t² = 2 where the modulus is infinite"));
    }
    Ok(())
}

/// `cd(u, k)` for the trajectory; `q₀/q_t` without the division.
pub(crate) fn cd_ratio(q_t: Complex64, theta: f64) -> Complex64 {
    let u = 0.5 * theta * rate(q_t);
    match jacobi(u, modulus(q_t)) {
        Ok(j) => j.cd(),
        Err(_) => Complex64::new(f64::NAN, f64::NAN),
    }
}

/// Unchecked map; NaN on failure. Used inside derivative and root loops.
pub(crate) fn q0_raw(q_t: Complex64, theta: f64) -> Complex64 {
    q_t * cd_ratio(q_t, theta)
}

/// Endpoint `q₀` reached by the classical path whose turning point is `q_t`
/// after Euclidean time `Θ/2`.
pub fn q0_of_qt(q_t: Complex64, theta: f64) -> Result<Complex64> {
    check(q_t, theta)?;
    Ok(q0_raw(q_t, theta))
}

pub fn q0_of_qt_real(q_t: f64, theta: f64) -> Result<f64> {
    Ok(q0_of_qt(Complex64::new(q_t, 0.0), theta)?.re)
}

pub(crate) fn dq0_real_raw(q_t: f64, theta: f64) -> f64 {
    complex_step(|z| q0_raw(z, theta), q_t)
}

/// `(∂q₀/∂q_t)_Θ`: complex step on the real axis, Richardson-extrapolated
/// central differences elsewhere.
pub fn dq0_dqt(q_t: Complex64, theta: f64) -> Result<Complex64> {
    check(q_t, theta)?;
    if q_t.im == 0.0 {
        return Ok(Complex64::new(dq0_real_raw(q_t.re, theta), 0.0));
    }
    let h = 1e-3 * (1.0 + q_t.norm());
    Ok(richardson(|z| q0_raw(z, theta), q_t, h).0)
}

/// Second derivative on the real axis (difference of complex-step slopes).
pub(crate) fn d2q0_real(q_t: f64, theta: f64) -> f64 {
    let h = 1e-5;
    (dq0_real_raw(q_t + h, theta) - dq0_real_raw(q_t - h, theta)) / (2.0 * h)
}

/// Number of quarter periods traversed between the endpoint and the turning
/// point, measured in units of `K(k)`: `u/K(k)`. Equal to `Θ/π` at `q_t = 0`
/// and decreasing to 0 as `|q_t| → 1`.
pub fn phase(q_t: f64, theta: f64) -> Result<f64> {
    let z = Complex64::new(q_t, 0.0);
    check(z, theta)?;
    let k = legendre_k(modulus(z))?;
    Ok((0.5 * theta * rate(z)).re / k.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad::{integrate, QuadTol};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn origin_maps_to_origin() {
        for th in [0.5, 2.0, 7.0] {
            assert_eq!(q0_of_qt(c(0.0), th).unwrap(), c(0.0));
        }
    }

    #[test]
    fn small_amplitude_slope_is_cos_half_theta() {
        let th = 2.0;
        let ratio = q0_of_qt_real(1e-7, th).unwrap() / 1e-7;
        assert!((ratio - 1f64.cos()).abs() < 1e-12);
        for th in [1.0, 2.5, 4.0, 9.0] {
            let d = dq0_dqt(c(0.0), th).unwrap().re;
            assert!((d - (th / 2.0).cos()).abs() < 1e-15);
        }
        assert!(dq0_dqt(c(0.0), std::f64::consts::PI).unwrap().re.abs() < 1e-15);
    }

    #[test]
    fn odd_in_turning_point() {
        for qt in [0.1, 0.45, 0.93] {
            for th in [1.0, 4.5, 8.0] {
                assert_eq!(q0_of_qt_real(-qt, th).unwrap(), -q0_of_qt_real(qt, th).unwrap());
            }
        }
    }

    #[test]
    fn separatrix_is_rejected() {
        assert!(q0_of_qt(c(1.0), 2.0).is_err());
        assert!(q0_of_qt(c(-1.0), 2.0).is_err());
        assert!(q0_of_qt(c(0.3), -1.0).is_err());
    }

    #[test]
    fn time_of_flight_inverts_the_map() {
        // Θ/2 = ∫_{q0}^{q_t} dq / √(2[U(q) − U(q_t)]), principal region.
        let (qt, th) = (0.5f64, 2.0f64);
        let q0 = q0_of_qt_real(qt, th).unwrap();
        assert!(q0 > 0.0 && q0 < qt);
        // q = q_t − (q_t − q0) t² removes the endpoint square root:
        // 2[U(q) − U(q_t)] = ½(q_t − q0) t² (q + q_t)(2 − q² − q_t²)
        let tof: f64 = integrate(
            |t: f64| {
                let q = qt - (qt - q0) * t * t;
                2.0 * (qt - q0).sqrt() / (0.5 * (q + qt) * (2.0 - q * q - qt * qt)).sqrt()
            },
            0.0,
            1.0,
            QuadTol::rel(1e-14),
        )
        .unwrap();
        assert!((tof - th / 2.0).abs() < 1e-11, "{tof}");
    }

    #[test]
    fn imaginary_turning_point_form() {
        // q_t = iξ: q₀ = iξ cn((Θ/2)√(1+ξ²), ξ/√(2(1+ξ²))).
        let (xi, th) = (0.8f64, 2.5f64);
        let lhs = q0_of_qt(Complex64::new(0.0, xi), th).unwrap();
        let s = (1.0 + xi * xi).sqrt();
        let cn = crate::specfun::jacobi_cn(c(0.5 * th * s), EllipticModulus::real(xi / (2f64.sqrt() * s))).unwrap();
        let rhs = Complex64::new(0.0, xi) * cn;
        assert!((lhs - rhs).norm() < 1e-14, "{lhs} vs {rhs}");
    }

    #[test]
    fn derivative_routes_agree() {
        let (qt, th) = (0.3, 4.0);
        let cs = dq0_dqt(c(qt), th).unwrap().re;
        let (rich, _) = richardson(|z| q0_raw(z, th), c(qt), 1e-2);
        assert!((cs - rich.re).abs() < 1e-8 * cs.abs().max(1.0), "{cs} vs {rich}");
        // complex turning point: compare against the real-direction and imaginary-direction
        // Cauchy–Riemann consistent estimate.
        let z = Complex64::new(0.2, 0.3);
        let d = dq0_dqt(z, th).unwrap();
        let (di, _) = richardson(|w| q0_raw(z + (w - z) * Complex64::i(), th), z, 1e-2);
        assert!((d - di / Complex64::i()).norm() < 1e-8, "{d} vs {}", di / Complex64::i());
    }

    #[test]
    fn phase_limits() {
        assert!((phase(0.0, 5.0).unwrap() - 5.0 / std::f64::consts::PI).abs() < 1e-14);
        assert!(phase(0.999_999, 5.0).unwrap() < 0.5);
    }
}
