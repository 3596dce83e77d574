//! Dimensionless action `I[q_c] = ∫₀^Θ [q̇²/2 + U(q)] dθ` of a classical path.

use num_complex::Complex64;

use super::map::{cd_ratio, modulus, phase, potential, q0_raw, rate};
use crate::error::{domain, Error, Result};
use crate::numeric::quad::{integrate, QuadTol};
use crate::numeric::quad_tol;
use crate::specfun::{jacobi, legendre_e, legendre_e_inc, legendre_f, legendre_k};

const BRANCH_TOL: f64 = 1e-7;
const CONSISTENCY_TOL: f64 = 1e-9;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Elliptic-integral form of the action for a real turning point, valid while
/// the path runs directly from `q₀` to `q_t` (phase `u/K ≤ 2`).
///
/// `φ = arcsin(q₀/q_t)`; the sign of the algebraic term follows `q₀/q_t`, which
/// covers the case `−1 < q_t < −q₀ < 0`.
pub fn action_closed_form(q_t: f64, theta: f64) -> Result<f64> {
    if q_t == 0.0 {
        return Ok(theta / 4.0);
    }
    let z = c(q_t);
    let k = modulus(z);
    let ratio = cd_ratio(z, theta).re.clamp(-1.0, 1.0);
    let q2 = q_t * q_t;
    let phi = ratio.asin();
    let alg = -q2 * ratio * (2.0 * (1.0 - ratio * ratio) * (2.0 - q2 * (1.0 + ratio * ratio))).max(0.0).sqrt()
        / 3.0;
    let kk = legendre_k(k)?.re;
    let ee = legendre_e(k)?.re;
    let ff = legendre_f(c(phi), k)?.re;
    let ep = legendre_e_inc(c(phi), k)?.re;
    let ell = -(2.0 / 3.0) * (2.0 * (2.0 - q2)).sqrt() * ((1.0 - q2) * (kk - ff) - ee + ep);
    Ok(theta * potential(z).re + alg + ell)
}

/// `ΘU(q_t) + 4∫₀^{Θ/2}[U(q(s)) − U(q_t)] ds` along `q(s) = q_t·cd(ωs, k)`.
/// Unambiguous for complex `q_t` and for paths that pass through a turning point
/// more than once.
pub fn action_along_trajectory(q_t: Complex64, theta: f64) -> Result<Complex64> {
    let k = modulus(q_t);
    let w = rate(q_t);
    let ut = potential(q_t);
    let integrand = |s: f64| -> Complex64 {
        match jacobi(w * s, k) {
            Ok(j) => 4.0 * (potential(q_t * j.cd()) - ut),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    // split at quarter periods of the real part so each panel is smooth
    let period = (4.0 * legendre_k(k)?.norm() / w.norm()).max(1e-3);
    let half = 0.5 * theta;
    let panels = ((half / (0.25 * period)).ceil() as usize).clamp(1, 400);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let a = half * i as f64 / panels as f64;
        let b = half * (i + 1) as f64 / panels as f64;
        total += integrate(integrand, a, b, QuadTol { abs: 1e-16, rel: quad_tol(), max_intervals: 2000 })?;
    }
    Ok(theta * ut + total)
}

/// `ΘU(q_t) + 2∫_{q₀}^{q_t} √(2[U(q) − U(q_t)]) dq` along the straight segment
/// from `q₀` to `q_t`, with the square root continued along the path.
///
/// Only meaningful when the classical path itself is homotopic to that segment,
/// i.e. on the direct branch; serves as an independent check of the closed form.
pub fn action_segment(q_t: Complex64, q0: Complex64, theta: f64) -> Result<Complex64> {
    let d = q_t - q0;
    if d.norm() == 0.0 {
        return Ok(theta * potential(q_t));
    }
    // 2[U(q) − U(q_t)] = (q − q_t)(q + q_t)(q² + q_t² − 2)/2. With q = q_t − d t²
    // the velocity near the turning point is −U'(q_t)·t·√(−2d/U'(q_t)); the
    // remaining factors are each 1 at t = 0 and are continued along the segment.
    let b = (2.0 - q_t * q_t).sqrt();
    let slope = q_t * (q_t * q_t - 1.0);
    if slope.norm() < 1e-300 {
        return Err(domain("segment action needs U'(q_t) != 0"));
    }
    let lead = -slope * (-2.0 * d / slope).sqrt();
    let tail = |t: f64| -> Complex64 {
        let q = q_t - d * t * t;
        let r1 = (q + q_t) / (2.0 * q_t);
        let r2a = (q - b) / (q_t - b);
        let r2b = (q + b) / (q_t + b);
        lead * r1.sqrt() * r2a.sqrt() * r2b.sqrt() * t * t
    };
    let inner: Complex64 = integrate(tail, 0.0, 1.0, QuadTol::rel(1e-14))?;
    // dq = −2d t dt, orientation q₀ → q_t is t: 1 → 0
    Ok(theta * potential(q_t) + 2.0 * 2.0 * d * inner)
}

/// Action of the classical path with turning point `q_t` ending at `q₀`.
///
/// Real turning points on the direct branch use the elliptic-integral form,
/// cross-checked against the trajectory quadrature; everything else uses the
/// quadrature alone.
pub fn action(q_t: Complex64, q0: f64, theta: f64) -> Result<Complex64> {
    let reached = q0_raw(q_t, theta);
    if !((reached - q0).norm() <= CONSISTENCY_TOL * (1.0 + q0.abs())) {
        return Err(domain(format!(
            "turning point {q_t} reaches q0 = {reached}, not {q0}"
        )));
    }
    let quad = action_along_trajectory(q_t, theta)?;
    if q_t.im != 0.0 {
        return Ok(quad);
    }
    let x = q_t.re;
    if phase(x, theta)? > 2.0 {
        return Ok(c(quad.re));
    }
    let closed = action_closed_form(x, theta)?;
    if (closed - quad.re).abs() > BRANCH_TOL * (1.0 + closed.abs()) {
        return Err(Error::BranchInconsistency { closed, quadrature: quad.re });
    }
    Ok(c(closed))
}
