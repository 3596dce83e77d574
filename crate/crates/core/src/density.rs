//! Diagonal thermal density in the usual and the improved semiclassical
//! approximations.
//!
//! Exponents are dimensionless: `S/ħ = I/g`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::caustics::{Region, RegionSide};
use crate::error::{domain, Error, Result};
use crate::numeric::quad::{integrate, QuadTol};
use crate::numeric::quad_tol;
use crate::numeric::roots::brent;
use crate::trajectories::{
    action, find_complex_pair, periodic_amplitude, periodic_saddle, q0_of_qt_real, real_solutions, BranchMap,
    SolutionKind, TrajectorySolution, CAUSTIC_TOL,
};

/// Quartic action restricted to the softest fluctuation mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EffectivePotential {
    /// `𝒱₃(z) = μ[ξz²/2 − (1+ξ)z³/3 + z⁴/4]`, extrema at `0, 1, ξ`.
    ThreeExtrema { xi: f64, mu: f64 },
    /// `𝒱₁(z) = χ[z²/2 − (2cos φ/3)z³ + z⁴/4]`, one real extremum.
    ComplexPair { chi: f64, phi: f64 },
}

impl EffectivePotential {
    pub fn value(&self, z: f64) -> f64 {
        let z2 = z * z;
        match *self {
            Self::ThreeExtrema { xi, mu } => mu * z2 * (xi / 2.0 - (1.0 + xi) * z / 3.0 + z2 / 4.0),
            Self::ComplexPair { chi, phi } => chi * z2 * (0.5 - 2.0 * phi.cos() * z / 3.0 + z2 / 4.0),
        }
    }

    pub fn curvature(&self, z: f64) -> f64 {
        match *self {
            Self::ThreeExtrema { xi, mu } => mu * (xi - 2.0 * (1.0 + xi) * z + 3.0 * z * z),
            Self::ComplexPair { chi, phi } => chi * (1.0 - 4.0 * phi.cos() * z + 3.0 * z * z),
        }
    }

    /// Real stationary points; the first is the origin.
    pub fn extrema(&self) -> Vec<f64> {
        match *self {
            Self::ThreeExtrema { xi, .. } => vec![0.0, 1.0, xi],
            Self::ComplexPair { .. } => vec![0.0],
        }
    }

    /// `(ξ or φ, μ or χ)` for tabular output.
    pub fn parameters(&self) -> (f64, f64) {
        match *self {
            Self::ThreeExtrema { xi, mu } => (xi, mu),
            Self::ComplexPair { chi, phi } => (phi, chi),
        }
    }
}

fn xi_ratio(xi: f64) -> f64 {
    xi.powi(3) * (2.0 - xi) / (2.0 * xi - 1.0)
}

/// Root `ξ ∈ [1, 2]` of `ξ³(2 − ξ)/(2ξ − 1) = ratio`.
pub fn solve_xi(ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(domain(format!("ξ ratio must lie in [0, 1], got {ratio}")));
    }
    solve_xi_split(ratio, 1.0 - ratio)
}

/// Same root given both `ratio` and `1 − ratio`; near `ξ = 1` the complement is
/// used through `1 − r(ξ) = (ξ − 1)³(ξ + 1)/(2ξ − 1)`.
fn solve_xi_split(ratio: f64, complement: f64) -> Result<f64> {
    if ratio == 0.0 {
        return Ok(2.0);
    }
    if complement == 0.0 {
        return Ok(1.0);
    }
    if ratio > 0.5 {
        let g = |e: f64| e.powi(3) * (e + 2.0) / (2.0 * e + 1.0) - complement;
        return Ok(1.0 + brent(g, 0.0, 1.0, 1e-17)?);
    }
    brent(|x| xi_ratio(x) - ratio, 1.0, 2.0, 1e-16)
}

fn order_check(gm: f64, lm: f64, sp: f64) -> Result<()> {
    let slack = 1e-12 * (1.0 + gm.abs());
    if lm < gm - slack || sp < lm - slack {
        return Err(Error::Ordering { gm, lm, sp });
    }
    Ok(())
}

/// `(ξ, μ)` from the actions of the global minimum, local minimum and lowest saddle.
pub fn build_effpot_three(i_gm: f64, i_lm: f64, i_sp: f64, g: f64) -> Result<EffectivePotential> {
    order_check(i_gm, i_lm, i_sp)?;
    let top = (i_sp - i_gm).max(0.0);
    if !(top > 0.0) {
        return Err(Error::Ordering { gm: i_gm, lm: i_lm, sp: i_sp });
    }
    let lower = (i_lm - i_gm).clamp(0.0, top);
    let upper = (i_sp - i_lm).clamp(0.0, top);
    let xi = if i_lm == i_gm { 2.0 } else { solve_xi_split(lower / top, upper / top)? };
    let mu = 12.0 * top / (g * (2.0 * xi - 1.0));
    Ok(EffectivePotential::ThreeExtrema { xi, mu })
}

fn arg_h(phi: f64) -> f64 {
    let t = 2.0 * phi;
    t - t.sin().atan2(2.0 - t.cos())
}

/// `(χ, φ)` from `(I_ct − I_gm)/g = (χ/12)(2e^{2iφ} − e^{4iφ})`, `φ ∈ [0, π/2]`.
///
/// The member of the conjugate pair with `Im I_ct ≥ 0` must be supplied.
pub fn build_effpot_complex(i_gm: f64, i_ct: Complex64, g: f64) -> Result<EffectivePotential> {
    let d = (i_ct - i_gm) / g;
    if !(d.norm() > 0.0 && d.norm().is_finite()) {
        return Err(Error::NoSolution(format!("{d}")));
    }
    if d.im < -1e-12 * d.norm() {
        return Err(Error::NoSolution(format!("Im(I_ct − I_gm) < 0: {d}")));
    }
    let target = d.im.max(0.0).atan2(d.re);
    let phi = if target <= 0.0 {
        0.0
    } else if target >= PI {
        PI / 2.0
    } else {
        brent(|p| arg_h(p) - target, 0.0, PI / 2.0, 1e-16)?
    };
    let h = 2.0 * Complex64::from_polar(1.0, 2.0 * phi) - Complex64::from_polar(1.0, 4.0 * phi);
    let chi = 12.0 * d.norm() / h.norm();
    Ok(EffectivePotential::ComplexPair { chi, phi })
}

fn bound(v: &EffectivePotential, from: f64, dir: f64, scale: f64) -> f64 {
    let mut s = scale;
    loop {
        let z = from + dir * s;
        if v.value(z) > 40.0 || s > 1e6 {
            return z;
        }
        s *= 2.0;
    }
}

/// `ℱ = √(𝒱''(0)/2π)·∫exp(−𝒱(z))dz`.
pub fn fluctuation_factor(v: &EffectivePotential) -> Result<f64> {
    let c0 = v.curvature(0.0);
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(domain(format!("effective potential needs positive curvature, got {c0}")));
    }
    let width = 1.0 / c0.sqrt();
    let ext = v.extrema();
    let right_most = ext.iter().copied().fold(1.0, f64::max);
    let lo = bound(v, 0.0, -1.0, width.min(1.0));
    let hi = bound(v, right_most, 1.0, width.min(1.0));
    // geometric cuts around every extremum so narrow peaks are never skipped
    let mut cuts = vec![lo, hi, 1.0];
    for &e in &ext {
        let w = 1.0 / v.curvature(e).abs().sqrt().max(1e-300);
        let w = w.min(1.0);
        cuts.push(e);
        let mut s = w;
        while s < hi - lo {
            cuts.push(e - s);
            cuts.push(e + s);
            s *= 2.0;
        }
    }
    cuts.retain(|c| (lo..=hi).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let tol = QuadTol { abs: 1e-300, rel: quad_tol(), max_intervals: 4000 };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let part: f64 = integrate(|z| (-v.value(z)).exp(), w[0], w[1], tol)?;
            total += part;
        }
    }
    Ok((c0 / (2.0 * PI)).sqrt() * total)
}

/// Steepest-descent value of ℱ: `Σ_j √(𝒱''(0)/𝒱''(a_j))·exp(−𝒱(a_j))` over real minima.
pub fn steepest_descent_factor(v: &EffectivePotential) -> f64 {
    let c0 = v.curvature(0.0);
    v.extrema()
        .into_iter()
        .filter(|&a| v.curvature(a) > 0.0)
        .map(|a| (c0 / v.curvature(a)).sqrt() * (-v.value(a)).exp())
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contribution {
    pub kind: SolutionKind,
    pub q_t: Complex64,
    pub action: Complex64,
    /// `Δ` at the point's `g`.
    pub det_delta: Option<f64>,
    /// `exp(−I/g)·Δ^{−1/2}` for minima; absent otherwise.
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPoint {
    pub q0: f64,
    pub theta: f64,
    pub g: f64,
    pub region: Region,
    /// `+∞` on a caustic.
    pub rho_usual: f64,
    pub rho_improved: f64,
    pub f_factor: f64,
    pub contributions: Vec<Contribution>,
    pub effpot: EffectivePotential,
}

fn check_args(q0: f64, theta: f64, g: f64) -> Result<()> {
    if !(q0.abs() < 1.0) {
        return Err(domain(format!("need |q0| < 1, got {q0}")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(domain(format!("Θ must be positive, got {theta}")));
    }
    if !(g > 0.0 && g.is_finite()) {
        return Err(domain(format!("g must be positive, got {g}")));
    }
    Ok(())
}

fn weight(s: &TrajectorySolution, g: f64) -> Option<f64> {
    let d = s.det_at(g)?;
    if d.abs() < CAUSTIC_TOL {
        return Some(f64::INFINITY);
    }
    Some((-s.action.re / g).exp() / d.sqrt())
}

fn contribution(s: &TrajectorySolution, g: f64) -> Contribution {
    Contribution {
        kind: s.kind,
        q_t: s.q_t,
        action: s.action,
        det_delta: s.det_at(g),
        weight: if s.is_minimum() { weight(s, g) } else { None },
    }
}

/// Usual approximation: `Σ exp(−I_j/g)·Δ_j^{−1/2}` over the minima; `+∞` on a caustic.
pub fn rho_usual(q0: f64, theta: f64, g: f64) -> Result<f64> {
    check_args(q0, theta, g)?;
    let map = BranchMap::new(theta)?;
    let sols = real_solutions(&map, q0.abs())?;
    Ok(sols.iter().filter(|s| s.is_minimum()).filter_map(|s| weight(s, g)).sum())
}

/// Improved approximation `exp(−I_gm/g)·Δ_gm^{−1/2}·ℱ`.
pub fn rho_improved(q0: f64, theta: f64, g: f64) -> Result<f64> {
    density_point(q0, theta, g).map(|p| p.rho_improved)
}

// Around the first cusp the action differences that fix ℱ cancel to a few
// digits; the density is smooth there and is interpolated in Θ instead.
const CUSP_THETA: f64 = 1e-3;
const CUSP_Q0: f64 = 1e-2;
const CUSP_NODES: [f64; 4] = [-3e-3, -1.5e-3, 1.5e-3, 3e-3];

fn near_cusp(q0: f64, theta: f64) -> bool {
    (theta - PI).abs() < CUSP_THETA && q0.abs() < CUSP_Q0
}

/// Full evaluation at one point: both approximations, ℱ and the paths used.
pub fn density_point(q0: f64, theta: f64, g: f64) -> Result<DensityPoint> {
    check_args(q0, theta, g)?;
    let q = q0.abs();
    let mut p = if near_cusp(q, theta) { cusp_point(q, theta, g)? } else { direct_point(q, theta, g)? };
    p.q0 = q0;
    Ok(p)
}

fn cusp_point(q: f64, theta: f64, g: f64) -> Result<DensityPoint> {
    let nodes: Vec<(f64, DensityPoint)> = CUSP_NODES
        .iter()
        .map(|d| direct_point(q, PI + d, g).map(|p| (PI + d, p)))
        .collect::<Result<_>>()?;
    let lagrange = |f: &dyn Fn(&DensityPoint) -> f64| -> f64 {
        let mut acc = 0.0;
        for (i, (ti, pi)) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (j, (tj, _)) in nodes.iter().enumerate() {
                if i != j {
                    w *= (theta - tj) / (ti - tj);
                }
            }
            acc += w * f(pi);
        }
        acc
    };
    let mut p = direct_point_or_partial(q, theta, g);
    p.rho_improved = lagrange(&|p| p.rho_improved);
    p.f_factor = lagrange(&|p| p.f_factor);
    if p.f_factor.is_nan() || p.effpot.parameters().0.is_nan() {
        let nearest = if theta < PI { &nodes[1].1 } else { &nodes[2].1 };
        p.effpot = nearest.effpot;
        p.region = nearest.region;
    }
    Ok(p)
}

/// The usual density and solution list without the improved assembly, for cusp
/// points where only the interpolated improved value is trusted.
fn direct_point_or_partial(q: f64, theta: f64, g: f64) -> DensityPoint {
    if let Ok(p) = direct_point(q, theta, g) {
        return p;
    }
    let map = BranchMap::new(theta).ok();
    let sols = map.as_ref().and_then(|m| real_solutions(m, q).ok()).unwrap_or_default();
    let rho_usual = sols.iter().filter(|s| s.is_minimum()).filter_map(|s| weight(s, g)).sum();
    DensityPoint {
        q0: q,
        theta,
        g,
        region: Region { n_solutions: sols.len(), side: RegionSide::Outside },
        rho_usual,
        rho_improved: f64::NAN,
        f_factor: f64::NAN,
        contributions: sols.iter().map(|s| contribution(s, g)).collect(),
        effpot: EffectivePotential::ComplexPair { chi: f64::NAN, phi: f64::NAN },
    }
}

fn direct_point(q: f64, theta: f64, g: f64) -> Result<DensityPoint> {
    let map = BranchMap::new(theta)?;
    let sols = real_solutions(&map, q)?;
    let gm = sols
        .iter()
        .find(|s| s.kind == SolutionKind::GlobalMin)
        .ok_or_else(|| domain("no global minimum found"))?
        .clone();
    let folds = map.fold_values();
    let mut contributions: Vec<Contribution> = sols.iter().map(|s| contribution(s, g)).collect();
    let rho_usual = contributions.iter().filter_map(|c| c.weight).sum();

    let amp = periodic_amplitude(theta, 1).ok();
    let mut n_solutions = 1 + 2 * folds.iter().filter(|f| f.0 > q).count();
    let mut m = 1;
    while let Ok(a) = periodic_amplitude(theta, m) {
        n_solutions += 2 * usize::from(a > q);
        m += 1;
    }

    let lower = folds.first().copied();
    let effpot = match lower {
        Some((qt0, zt)) if q <= qt0 => {
            let lm = sols.iter().find(|s| s.branch == Some(0));
            let sp = sols.iter().find(|s| s.branch == Some(1));
            let (i_lm, i_sp_sym) = match (lm, sp) {
                (Some(l), Some(s)) => (l.action.re, s.action.re),
                _ => {
                    let x = -zt;
                    let a = action(Complex64::new(x, 0.0), q0_of_qt_real(x, theta)?, theta)?.re;
                    (a, a)
                }
            };
            let i_sp = match amp {
                Some(a) if q <= a => {
                    let p = periodic_saddle(q, theta)?;
                    contributions.push(contribution(&p, g));
                    p.action.re.min(i_sp_sym)
                }
                _ => i_sp_sym,
            };
            let i_lm = if q == 0.0 { gm.action.re } else { i_lm };
            build_effpot_three(gm.action.re, i_lm.max(gm.action.re), i_sp.max(i_lm), g)?
        }
        _ => {
            let (ct, conj) = find_complex_pair(q, theta)?;
            let v = build_effpot_complex(gm.action.re, ct.action, g)?;
            contributions.push(contribution(&ct, g));
            contributions.push(contribution(&conj, g));
            v
        }
    };
    let side = match lower {
        Some((v, _)) if (v - q).abs() <= crate::caustics::BAND => RegionSide::OnCaustic(1),
        Some((v, _)) if q < v => match amp {
            Some(a) if (a - q).abs() <= crate::caustics::BAND => RegionSide::OnCaustic(2),
            Some(a) if q < a => RegionSide::InsidePeriodic,
            _ => RegionSide::InsideFold,
        },
        _ => RegionSide::Outside,
    };

    let f_factor = fluctuation_factor(&effpot)?;
    let d_gm = gm.det_at(g).unwrap_or(f64::NAN);
    if !(d_gm > 0.0) {
        return Err(Error::Caustic(d_gm));
    }
    let rho_improved = (-gm.action.re / g).exp() / d_gm.sqrt() * f_factor;
    Ok(DensityPoint {
        q0: q,
        theta,
        g,
        region: Region { n_solutions, side },
        rho_usual,
        rho_improved,
        f_factor,
        contributions,
        effpot,
    })
}

/// `exp(−I_gm/g)·Δ_gm^{−1/2}·ℱ_sd`, the improved formula with ℱ replaced by its
/// steepest-descent value.
pub fn rho_steepest_descent(q0: f64, theta: f64, g: f64) -> Result<f64> {
    let p = density_point(q0, theta, g)?;
    let gm = p
        .contributions
        .iter()
        .find(|c| c.kind == SolutionKind::GlobalMin)
        .ok_or_else(|| domain("no global minimum"))?;
    Ok(gm.weight.unwrap_or(f64::NAN) * steepest_descent_factor(&p.effpot))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xi_endpoints_and_bisection_oracle() {
        assert_eq!(solve_xi(1.0).unwrap(), 1.0);
        assert_eq!(solve_xi(0.0).unwrap(), 2.0);
        let (mut a, mut b) = (1.0f64, 2.0f64);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if xi_ratio(m) > 0.5 {
                a = m
            } else {
                b = m
            }
        }
        assert!((solve_xi(0.5).unwrap() - 0.5 * (a + b)).abs() < 1e-12);
        assert!(solve_xi(1.5).is_err());
        assert!(solve_xi(-0.1).is_err());
    }

    #[test]
    fn xi_complement_identity() {
        for x in [1.0001, 1.1, 1.5, 1.9] {
            let lhs = 1.0 - xi_ratio(x);
            let rhs = (x - 1.0f64).powi(3) * (x + 1.0) / (2.0 * x - 1.0);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn three_extrema_limits() {
        let EffectivePotential::ThreeExtrema { xi, mu } = build_effpot_three(1.0, 1.0, 1.3, 0.3).unwrap() else {
            panic!()
        };
        assert_eq!(xi, 2.0);
        assert!((mu - 4.0 * 0.3 / 0.3).abs() < 1e-12);
        let EffectivePotential::ThreeExtrema { xi, mu } = build_effpot_three(1.0, 1.3, 1.3, 0.3).unwrap() else {
            panic!()
        };
        assert_eq!(xi, 1.0);
        assert!((mu - 12.0).abs() < 1e-12);
        assert!(build_effpot_three(1.0, 0.5, 1.3, 0.3).is_err());
    }

    #[test]
    fn three_extrema_reproduces_inputs() {
        let (gm, lm, sp, g) = (1.0, 1.2, 1.3, 0.3);
        let v = build_effpot_three(gm, lm, sp, g).unwrap();
        let EffectivePotential::ThreeExtrema { xi, .. } = v else { panic!() };
        assert!((xi_ratio(xi) - 2.0 / 3.0).abs() < 1e-12);
        assert!((v.value(1.0) - (sp - gm) / g).abs() < 1e-12);
        assert!((v.value(xi) - (lm - gm) / g).abs() < 1e-12);
        for z in [0.0, 1.0, xi] {
            let h = 1e-6;
            assert!(((v.value(z + h) - v.value(z - h)) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn complex_pair_forced_angle() {
        let chi = 7.0;
        let i_ct = Complex64::new(1.0, 0.0) + Complex64::new(1.0, 2.0) * chi * 0.3 / 12.0;
        let EffectivePotential::ComplexPair { chi: c, phi } = build_effpot_complex(1.0, i_ct, 0.3).unwrap() else {
            panic!()
        };
        assert!((phi - PI / 4.0).abs() < 1e-12);
        assert!((c - chi).abs() < 1e-12);
        assert!(build_effpot_complex(1.0, Complex64::new(1.0, -0.5), 0.3).is_err());
    }

    #[test]
    fn complex_matches_three_at_coalescence() {
        let a = build_effpot_three(1.0, 1.3, 1.3, 0.3).unwrap();
        let b = build_effpot_complex(1.0, Complex64::new(1.3, 0.0), 0.3).unwrap();
        for z in [-0.5, 0.3, 1.0, 1.7] {
            assert!((a.value(z) - b.value(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn factor_limits() {
        // nearly Gaussian: large curvature, cubic and quartic terms negligible
        let v = EffectivePotential::ComplexPair { chi: 1e8, phi: 1.0 };
        assert!((fluctuation_factor(&v).unwrap() - 1.0).abs() < 1e-3);
        let v = EffectivePotential::ThreeExtrema { xi: 2.0, mu: 2000.0 };
        assert!((fluctuation_factor(&v).unwrap() - 2.0).abs() < 1e-2);
        assert!((steepest_descent_factor(&v) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn factor_at_coalescence_against_trapezoid() {
        let v = EffectivePotential::ThreeExtrema { xi: 1.0, mu: 10.0 };
        let f = fluctuation_factor(&v).unwrap();
        let (a, b, n) = (-4.0, 5.0, 1_000_000);
        let h = (b - a) / n as f64;
        let mut s = 0.5 * ((-v.value(a)).exp() + (-v.value(b)).exp());
        for i in 1..n {
            s += (-v.value(a + i as f64 * h)).exp();
        }
        let trap = (10.0f64 / (2.0 * PI)).sqrt() * s * h;
        assert!(f.is_finite() && f > 0.0);
        assert!((f / trap - 1.0).abs() < 1e-8, "{f} vs {trap}");
    }

    #[test]
    fn usual_closed_form_below_cusp() {
        let r = rho_usual(0.0, 2.0, 0.3).unwrap();
        let exact = (2.0 * PI * 0.3 * 2f64.sin()).powf(-0.5) * (-2.0f64 / 1.2).exp();
        assert!((r / exact - 1.0).abs() < 1e-12);
        assert!((r - 0.1443).abs() < 1e-4);
    }

    #[test]
    fn parity_exact() {
        for (q0, th) in [(0.3, 2.0), (0.2, 5.0), (0.1, 7.0), (0.5, 5.0)] {
            let a = density_point(q0, th, 0.3).unwrap();
            let b = density_point(-q0, th, 0.3).unwrap();
            assert_eq!(a.rho_improved, b.rho_improved);
            assert_eq!(a.rho_usual, b.rho_usual);
        }
    }

    #[test]
    fn improved_finite_through_cusp() {
        let mut prev = None;
        for i in 0..41 {
            let th = PI - 0.02 + 0.001 * i as f64;
            let r = rho_improved(0.0, th, 0.3).unwrap();
            assert!(r.is_finite() && r > 0.0, "{th}");
            if let Some(p) = prev {
                assert!(((r / p) as f64 - 1.0).abs() < 0.01, "{th}: {r} vs {p}");
            }
            prev = Some(r);
        }
        assert!(rho_improved(0.0, PI, 0.3).unwrap().is_finite());
        assert!(rho_usual(0.0, PI, 0.3).unwrap().is_infinite());
    }
}
