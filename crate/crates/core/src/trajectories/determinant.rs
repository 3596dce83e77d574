//! Fluctuation determinant `Δ` of a real classical path.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::map::{dq0_real_raw, modulus, potential, q0_raw, rate};
use crate::error::{domain, Error, Result};
use crate::specfun::jacobi;

/// Below this magnitude `Δ` is treated as zero (a caustic).
pub const CAUSTIC_TOL: f64 = 1e-8;

/// `Δ` written through the initial velocity `q̇(0) = q_t ω k'² sn(u)/dn²(u)`:
///
/// `Δ = 4πg · 2ω sn(u) / ((2 − q_t²) dn²(u)) · ∂q₀/∂q_t`.
///
/// Regular at `q_t = 0` (where it equals `2πg sin Θ`) and signed correctly on
/// every branch, including paths that pass a turning point more than once.
pub fn fluct_det_signed(q_t: f64, theta: f64, g: f64) -> f64 {
    let z = Complex64::new(q_t, 0.0);
    let w = rate(z).re;
    let u = Complex64::new(0.5 * theta * w, 0.0);
    let j = match jacobi(u, modulus(z)) {
        Ok(j) => j,
        Err(_) => return f64::NAN,
    };
    let sn = j.sn.re;
    let dn = j.dn.re;
    4.0 * PI * g * 2.0 * w * sn / ((2.0 - q_t * q_t) * dn * dn) * dq0_real_raw(q_t, theta)
}

/// The textbook form `4πg·sgn(q₀ − q_t)·√(2[U(q₀) − U(q_t)])/U'(q_t)·∂q₀/∂q_t`.
/// Agrees with [`fluct_det_signed`] on direct paths away from `q_t = 0`.
pub fn fluct_det_literal(q_t: f64, q0: f64, theta: f64, g: f64) -> f64 {
    let zt = Complex64::new(q_t, 0.0);
    let z0 = Complex64::new(q0, 0.0);
    let v = (2.0 * (potential(z0).re - potential(zt).re)).max(0.0).sqrt();
    let slope = q_t * (q_t * q_t - 1.0);
    4.0 * PI * g * (q0 - q_t).signum() * v / slope * dq0_real_raw(q_t, theta)
}

/// `Δ` for the real path from `q₀` with turning point `q_t`; errors with
/// [`Error::Caustic`] when `|Δ| < CAUSTIC_TOL`.
pub fn fluct_det(q_t: f64, q0: f64, theta: f64, g: f64) -> Result<f64> {
    if !(g > 0.0) {
        return Err(domain(format!("g must be positive, got {g}")));
    }
    if q_t.abs() >= 1.0 {
        return Err(domain("real turning point must satisfy |q_t| < 1"));
    }
    let reached = q0_raw(Complex64::new(q_t, 0.0), theta).re;
    if !((reached - q0).abs() <= 1e-9 * (1.0 + q0.abs())) {
        return Err(domain(format!("turning point {q_t} reaches q0 = {reached}, not {q0}")));
    }
    let d = fluct_det_signed(q_t, theta, g);
    if !d.is_finite() {
        return Err(domain("non-finite fluctuation determinant"));
    }
    if d.abs() < CAUSTIC_TOL {
        return Err(Error::Caustic(d));
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectories::map::q0_of_qt_real;

    #[test]
    fn harmonic_limit() {
        for th in [0.5, 1.5, 2.5, 3.0, 4.0] {
            let d = fluct_det_signed(0.0, th, 0.3);
            assert!((d - 2.0 * PI * 0.3 * th.sin()).abs() < 1e-14, "{th}");
        }
        let d = fluct_det_signed(1e-6, 2.0, 0.3);
        assert!((d / (2.0 * PI * 0.3 * 2f64.sin()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn literal_form_agrees_on_direct_paths() {
        for (qt, th) in [(0.5, 2.0), (0.8, 3.0), (0.95, 5.0), (-0.7, 2.5), (-0.9, 5.0)] {
            let q0 = q0_of_qt_real(qt, th).unwrap();
            let a = fluct_det_signed(qt, th, 0.2);
            let b = fluct_det_literal(qt, q0, th, 0.2);
            assert!((a - b).abs() < 1e-10 * a.abs().max(1e-3), "{qt} {th}: {a} vs {b}");
        }
    }

    #[test]
    fn vanishes_on_periodic_orbit() {
        // q_t = A with q₀ = −A: sn(2K) = 0
        let th = 7.0;
        let a = crate::trajectories::periodic_amplitude(th, 1).unwrap();
        assert!(fluct_det_signed(a, th, 1.0).abs() < 1e-9);
    }

    #[test]
    fn caustic_is_flagged() {
        let th = 5.0;
        let map = crate::trajectories::BranchMap::new(th).unwrap();
        let z = *map.zeros().last().unwrap();
        let q0 = q0_of_qt_real(z, th).unwrap();
        assert!(matches!(fluct_det(z, q0, th, 0.3), Err(Error::Caustic(_))));
    }
}
