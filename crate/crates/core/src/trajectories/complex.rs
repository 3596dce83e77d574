//! The complex-conjugate pair of turning points that exists outside the first
//! caustic, found by continuation in `q₀`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::action::action;
use super::branches::BranchMap;
use super::map::{d2q0_real, q0_raw};
use super::{SolutionKind, TrajectorySolution};
use crate::error::{domain, Error, Result};
use crate::numeric::roots::brent;
use crate::numeric::root_tol;
use crate::specfun::{legendre_k, EllipticModulus};

const RESIDUAL: f64 = 1e-12;
/// Below π by less than this, the linear slope `cos(Θ/2)` is too small for the
/// continuation from `iξ₁` and the cubic start is used instead.
const CUBIC_BAND: f64 = 1e-3;
const H0: f64 = 1e-3;
const H_MAX: f64 = 0.05;
const H_MIN: f64 = 1e-12;

fn slope(z: Complex64, theta: f64) -> Complex64 {
    let h = 1e-7 * (1.0 + z.norm());
    (q0_raw(z + h, theta) - q0_raw(z - h, theta)) / (2.0 * h)
}

/// Newton on `q₀(z) = target`; `None` when it fails to settle within `max_iter`.
fn newton(theta: f64, target: f64, mut z: Complex64, max_iter: usize) -> Option<(Complex64, usize)> {
    for it in 1..=max_iter {
        let r = q0_raw(z, theta) - target;
        let d = slope(z, theta);
        if !(r.norm().is_finite() && d.norm() > 0.0) {
            return None;
        }
        let step = r / d;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            let res = (q0_raw(z, theta) - target).norm();
            return (res < RESIDUAL).then_some((z, it));
        }
    }
    let res = (q0_raw(z, theta) - target).norm();
    (res < RESIDUAL).then_some((z, max_iter))
}

/// First positive `ξ` with `(Θ/2)√(1+ξ²) = K(ξ/√(2(1+ξ²)))`: the imaginary turning
/// point `iξ` of the path returning to the origin, for `Θ < π`.
pub fn imaginary_turning_point(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::Region { what: "imaginary turning point", q0: 0.0, theta });
    }
    let g = |xi: f64| {
        let s = (1.0 + xi * xi).sqrt();
        let k = legendre_k(EllipticModulus::real(xi / (2f64.sqrt() * s))).map(|k| k.re).unwrap_or(f64::NAN);
        0.5 * theta * s - k
    };
    let mut hi = 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(domain("imaginary turning point not bracketed"));
        }
    }
    brent(g, 0.0, hi, root_tol().max(1e-15))
}

/// Root of `a₃z³ + a₁z − q = 0` with the largest imaginary part.
fn cubic_complex_root(a3: f64, a1: f64, q: f64) -> Complex64 {
    // depressed cubic z³ + pz + r = 0 via Cardano with complex arithmetic
    let p = Complex64::new(a1 / a3, 0.0);
    let r = Complex64::new(-q / a3, 0.0);
    let disc = (r * r / 4.0 + p * p * p / 27.0).sqrt();
    let mut u = (-r / 2.0 + disc).powf(1.0 / 3.0);
    if u.norm() < 1e-300 {
        u = (-r / 2.0 - disc).powf(1.0 / 3.0);
    }
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut best = Complex64::new(0.0, f64::NEG_INFINITY);
    for k in 0..3 {
        let uk = u * w.powu(k);
        let z = if uk.norm() == 0.0 { uk } else { uk - p / (3.0 * uk) };
        if z.im > best.im {
            best = z;
        }
    }
    best
}

/// Start from the cubic model of `q₀(q_t)` about the origin, for `Θ` close to π.
fn cubic_start(theta: f64, target: f64) -> Result<(f64, Complex64)> {
    let a1 = (theta / 2.0).cos();
    let a3 = {
        let h: f64 = 0.02;
        let f = |x: f64| q0_raw(Complex64::new(x, 0.0), theta).re;
        (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h) / 6.0
    };
    let q_s = target.min(1e-3);
    let z = cubic_complex_root(a3, a1, q_s);
    let z = newton(theta, q_s, z, 60).map(|r| r.0).ok_or(Error::Continuation {
        last_q0: q_s,
        last_qt: format!("{z}"),
    })?;
    Ok((q_s, z))
}

/// Starting point `(q₀, z)` on the continuation path for `Θ ≥ π` and a target `q₀ ≥ 0`.
fn caustic_start(theta: f64, target: f64) -> Result<(f64, Complex64)> {
    let map = BranchMap::new(theta)?;
    if (theta - PI).abs() < 1e-6 || map.zeros().is_empty() {
        return cubic_start(theta, target);
    }
    let x = *map.zeros().last().unwrap();
    let xc = -x;
    let fc = q0_raw(Complex64::new(xc, 0.0), theta).re;
    let curv = d2q0_real(xc, theta);
    if target <= fc {
        return Err(Error::Region { what: "complex pair", q0: target, theta });
    }
    let delta = (target - fc).min(1e-8).min(1e-3 * curv.abs() * x * x).max(1e-14);
    let guess = Complex64::new(xc, (2.0 * delta / curv.abs()).sqrt());
    let z = newton(theta, fc + delta, guess, 60).map(|r| r.0).ok_or(Error::Continuation {
        last_q0: fc + delta,
        last_qt: format!("{guess}"),
    })?;
    if z.im.abs() < 1e-14 {
        return Err(Error::Continuation { last_q0: fc + delta, last_qt: format!("{z}") });
    }
    Ok((fc + delta, z))
}

/// Predictor–corrector continuation from `(q_start, z)` to `q_end`.
fn continue_to(theta: f64, q_start: f64, z: Complex64, q_end: f64) -> Result<Complex64> {
    let mut q = q_start;
    let mut z = z;
    let mut h = H0.copysign(q_end - q_start);
    while q != q_end {
        if (q_end - q).abs() <= h.abs() {
            h = q_end - q;
        }
        let dz = 1.0 / slope(z, theta);
        // keep each move small against the distance to the real axis, where
        // the pair coalesces
        let reach = 0.25 * z.im.abs().max(1e-12);
        if (dz * h).norm() > reach {
            h = (reach / dz.norm()).copysign(h);
        }
        let pred = z + dz * h;
        match newton(theta, q + h, pred, 8) {
            Some((zn, it)) if (zn - pred).norm() <= 0.1 * (pred - z).norm() + 1e-13 => {
                if zn.im.abs() < 1e-300 {
                    return Err(Error::Continuation { last_q0: q, last_qt: format!("{z}") });
                }
                q += h;
                z = zn;
                if it <= 3 {
                    h = (2.0 * h).clamp(-H_MAX, H_MAX);
                }
            }
            _ => {
                h *= 0.5;
                if h.abs() < H_MIN {
                    return Err(Error::Continuation { last_q0: q, last_qt: format!("{z}") });
                }
            }
        }
        if (q - q_end) * (q_start - q_end) < 0.0 {
            q = q_end;
        }
    }
    Ok(z)
}

fn pair_at(q0: f64, theta: f64) -> Result<Complex64> {
    if theta < PI - CUBIC_BAND {
        let xi = imaginary_turning_point(theta)?;
        let z = Complex64::new(0.0, xi);
        if q0 == 0.0 {
            return Ok(z);
        }
        return continue_to(theta, 0.0, z, q0);
    }
    let (qs, z) = if theta < PI { cubic_start(theta, q0)? } else { caustic_start(theta, q0)? };
    if qs == q0 {
        return Ok(z);
    }
    continue_to(theta, qs, z, q0)
}

/// The conjugate pair `(q_t, q_t*)` for `(q₀, Θ)` outside the first caustic,
/// ordered so the first member has `Im I ≥ 0`.
pub fn find_complex_pair(q0: f64, theta: f64) -> Result<(TrajectorySolution, TrajectorySolution)> {
    if !(q0.abs() < 1.0) {
        return Err(domain(format!("need |q0| < 1, got {q0}")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("Θ must be positive and finite, got {theta}")));
    }
    let mut z = pair_at(q0.abs(), theta)?;
    if q0 < 0.0 {
        z = -z;
    }
    let mut act = action(z, q0, theta)?;
    if act.im < 0.0 || (act.im == 0.0 && z.im < 0.0) {
        z = z.conj();
        act = act.conj();
    }
    let a = TrajectorySolution { q_t: z, q0, action: act, det_delta: None, kind: SolutionKind::ComplexPair, branch: None };
    let b = TrajectorySolution { q_t: z.conj(), action: act.conj(), ..a.clone() };
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::jacobi_cn;

    #[test]
    fn imaginary_axis_root() {
        let xi = imaginary_turning_point(2.0).unwrap();
        assert!((xi - 1.41681).abs() < 1e-5);
        let s = (1.0 + xi * xi).sqrt();
        let cn = jacobi_cn(Complex64::new(s, 0.0), EllipticModulus::real(xi / (2f64.sqrt() * s))).unwrap();
        assert!(cn.norm() < 1e-13);
        assert!((imaginary_turning_point(3.0).unwrap() - 0.35959).abs() < 1e-5);
        assert!(imaginary_turning_point(PI - 1e-6).unwrap() < 1e-2);
    }

    #[test]
    fn pair_at_origin() {
        let (a, b) = find_complex_pair(0.0, 2.0).unwrap();
        assert_eq!(a.q_t.re, 0.0);
        assert_eq!(b.q_t, a.q_t.conj());
        assert!(a.action.im.abs() < 1e-12);
        assert!(a.action.re < 0.5);
    }

    #[test]
    fn pair_beyond_caustic() {
        let (a, _) = find_complex_pair(0.5, 5.0).unwrap();
        assert!(a.q_t.re.abs() > 1e-3 && a.q_t.im.abs() > 1e-3, "{}", a.q_t);
        assert!((q0_raw(a.q_t, 5.0) - 0.5).norm() < 1e-10);
    }

    #[test]
    fn continuation_reaches_far_endpoints() {
        for (q0, th) in [(0.9, 0.5), (0.9, 2.0), (0.6, 3.0), (0.3, PI), (0.95, 4.0)] {
            let (a, _) = find_complex_pair(q0, th).unwrap();
            assert!((q0_raw(a.q_t, th) - q0).norm() < 1e-10, "{q0} {th}");
        }
    }

    #[test]
    fn parity_and_conjugation() {
        let (a, b) = find_complex_pair(0.4, 2.5).unwrap();
        let (c, _) = find_complex_pair(-0.4, 2.5).unwrap();
        assert!((a.action - c.action).norm() < 1e-12);
        assert!((c.q_t + a.q_t.conj()).norm() < 1e-12 || (c.q_t + a.q_t).norm() < 1e-12);
        assert!((a.action - b.action.conj()).norm() < 1e-14);
    }
}
