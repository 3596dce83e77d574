//! Catastrophe curves in the `(q₀, Θ)` plane and region classification.
//!
//! Curve `c` has its cusp at `(0, cπ)`. Odd `c` are folds of `q₀(q_t)` (a pair of
//! symmetric paths is created); even `c = 2m` bound the region where periodic
//! orbits of period `Θ/m` pass through `q₀`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::roots::bisect;
use crate::trajectories::{periodic_amplitude, q0_of_qt_real, BranchMap};

/// Half-width of the band around a curve reported as [`RegionSide::OnCaustic`].
pub const BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    /// Fold where two symmetric paths appear; `n`-th fold counted from `Θ = π`.
    PairCreation(u32),
    /// Boundary of the periodic orbits of period `Θ/n`.
    PeriodicSplit(u32),
}

impl CurveKind {
    /// Curve index `c`, equal to the cusp position in units of `π`.
    pub fn index(&self) -> u32 {
        match *self {
            Self::PairCreation(n) => 2 * n - 1,
            Self::PeriodicSplit(n) => 2 * n,
        }
    }

    pub fn from_index(c: u32) -> Self {
        if c % 2 == 1 {
            Self::PairCreation(c.div_ceil(2))
        } else {
            Self::PeriodicSplit(c / 2)
        }
    }

    /// `|q₀|` on this curve at `Θ`, `None` before the cusp.
    pub fn value(&self, theta: f64) -> Option<f64> {
        match *self {
            Self::PairCreation(n) => {
                let map = BranchMap::new(theta).ok()?;
                map.fold_values().get(n as usize - 1).map(|v| v.0)
            }
            Self::PeriodicSplit(n) => periodic_amplitude(theta, n).ok(),
        }
    }
}

impl std::fmt::Display for CurveKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PairCreation(n) => write!(f, "pair_creation_{n}"),
            Self::PeriodicSplit(n) => write!(f, "periodic_split_{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausticCurve {
    pub kind: CurveKind,
    /// `(q₀, Θ)` from the `q₀ < 0` arm through the cusp to the `q₀ > 0` arm.
    pub points: Vec<(f64, f64)>,
    pub cusp: (f64, f64),
}

impl CausticCurve {
    pub fn id(&self) -> u32 {
        self.kind.index()
    }
}

/// Where a point sits relative to the first two curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionSide {
    /// Outside the first fold: one real minimum plus a complex pair.
    Outside,
    /// Inside the first fold, outside the periodic region: the lowest saddle is symmetric.
    InsideFold,
    /// Inside the first periodic curve: the lowest saddle is periodic.
    InsidePeriodic,
    /// Within [`BAND`] of the curve with index `c`.
    OnCaustic(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Region {
    pub n_solutions: usize,
    pub side: RegionSide,
}

/// `q̃₀(Θ)`: `|q₀|` at the outermost fold of `q₀(q_t)`, `Θ > π`.
pub fn caustic_lower(theta: f64) -> Result<f64> {
    caustic_lower_point(theta).map(|p| p.0)
}

/// `(q̃₀, q̃_t)` with `q̃_t > 0`.
pub fn caustic_lower_point(theta: f64) -> Result<(f64, f64)> {
    let err = Error::Region { what: "lower caustic", q0: 0.0, theta };
    if !(theta > PI) {
        return Err(err);
    }
    let map = BranchMap::new(theta)?;
    match map.fold_values().first() {
        Some(&(v, z)) => Ok((v, z)),
        // just above the cusp the fold sits below the scan resolution
        None => Ok((0.0, 0.0)),
    }
}

/// `A(Θ)`, amplitude of the periodic orbits, `Θ ≥ 2π`.
pub fn amplitude_a(theta: f64) -> Result<f64> {
    periodic_amplitude(theta, 1).map_err(|e| match e {
        Error::Region { .. } => Error::Region { what: "periodic amplitude", q0: 0.0, theta },
        e => e,
    })
}

/// Curve values `(c, |q₀|)` present at `Θ`, ascending in `c`.
pub fn curve_values(theta: f64) -> Result<Vec<(u32, f64)>> {
    let map = BranchMap::new(theta)?;
    let mut out: Vec<(u32, f64)> = map
        .fold_values()
        .into_iter()
        .enumerate()
        .map(|(i, (v, _))| (2 * i as u32 + 1, v))
        .collect();
    let mut m = 1;
    while theta >= 2.0 * m as f64 * PI {
        out.push((2 * m, periodic_amplitude(theta, m)?));
        m += 1;
    }
    out.sort_by_key(|p| p.0);
    Ok(out)
}

/// Number of classical paths through `(q₀, Θ)` and the position relative to
/// the curves.
pub fn classify_region(q0: f64, theta: f64) -> Result<Region> {
    if !(q0.abs() < 1.0) {
        return Err(crate::error::domain(format!("need |q0| < 1, got {q0}")));
    }
    let q = q0.abs();
    let values = curve_values(theta)?;
    let n_solutions = 1 + 2 * values.iter().filter(|v| v.1 > q).count();
    if let Some(&(c, _)) = values.iter().find(|v| (v.1 - q).abs() <= BAND) {
        return Ok(Region { n_solutions, side: RegionSide::OnCaustic(c) });
    }
    let inside = |c: u32| values.iter().any(|v| v.0 == c && v.1 > q);
    let side = if inside(2) {
        RegionSide::InsidePeriodic
    } else if inside(1) {
        RegionSide::InsideFold
    } else {
        RegionSide::Outside
    };
    Ok(Region { n_solutions, side })
}

fn exists(kind: CurveKind, theta: f64) -> bool {
    match kind {
        CurveKind::PairCreation(n) => {
            BranchMap::new(theta).map(|m| m.zeros().len() >= n as usize).unwrap_or(false)
        }
        CurveKind::PeriodicSplit(n) => theta >= 2.0 * n as f64 * PI,
    }
}

/// `Θ` of the cusp of `kind`, located by bisection on the existence of the curve
/// between `lo` (absent) and `hi` (present).
pub fn locate_cusp(kind: CurveKind, lo: f64, hi: f64) -> Result<f64> {
    if exists(kind, lo) || !exists(kind, hi) {
        return Err(Error::Region { what: "cusp bracket", q0: 0.0, theta: lo });
    }
    bisect(|t| if exists(kind, t) { 1.0 } else { -1.0 }, lo, hi, 1e-12)
}

fn trace_one(kind: CurveKind, theta_max: f64, step: f64) -> Result<CausticCurve> {
    // walk down from theta_max until the curve disappears, then bisect the cusp
    let mut samples = Vec::new();
    let mut t = theta_max;
    let mut last_good = None;
    loop {
        match kind.value(t) {
            Some(v) if exists(kind, t) => {
                samples.push((v, t));
                last_good = Some(t);
            }
            _ => break,
        }
        t -= step;
        if t <= 0.0 {
            return Err(Error::Continuation { last_q0: samples.last().map_or(0.0, |s| s.0), last_qt: format!("Θ = {t}") });
        }
    }
    let hi = last_good.ok_or(Error::Region { what: "caustic curve", q0: 0.0, theta: theta_max })?;
    let cusp = locate_cusp(kind, t, hi)?;
    // geometric refinement towards the cusp, where the curve is steep or flat
    let mut d = (hi - cusp).min(step);
    while d > 1e-9 {
        d *= 0.5;
        let th = cusp + d;
        if let Some(v) = kind.value(th) {
            samples.push((v, th));
        }
    }
    samples.push((0.0, cusp));
    samples.sort_by(|a, b| a.1.total_cmp(&b.1));
    samples.dedup_by(|a, b| a.1 == b.1);
    let mut points: Vec<(f64, f64)> = samples.iter().rev().map(|&(v, t)| (-v, t)).collect();
    points.pop();
    points.extend(samples.iter().copied());
    Ok(CausticCurve { kind, points, cusp: (0.0, cusp) })
}

/// All curves whose cusp lies below `theta_max`, sampled every `step` in `Θ`.
/// Curves are traced on separate threads.
pub fn trace_curves(theta_max: f64, step: f64) -> Result<Vec<CausticCurve>> {
    if !(theta_max > PI) || !(step > 0.0) {
        return Err(Error::Region { what: "curve tracing", q0: 0.0, theta: theta_max });
    }
    let n_folds = BranchMap::new(theta_max)?.zeros().len() as u32;
    let n_periodic = (theta_max / (2.0 * PI)).floor() as u32;
    let mut kinds: Vec<CurveKind> = (1..=n_folds).map(CurveKind::PairCreation).collect();
    kinds.extend((1..=n_periodic).map(CurveKind::PeriodicSplit));
    kinds.sort_by_key(|k| k.index());
    let results: Vec<Result<CausticCurve>> = std::thread::scope(|s| {
        let handles: Vec<_> = kinds.iter().map(|&k| s.spawn(move || trace_one(k, theta_max, step))).collect();
        handles.into_iter().map(|h| h.join().expect("tracing thread panicked")).collect()
    });
    results.into_iter().collect()
}

/// Residual of the fold condition at the lower caustic: `|q₀(q̃_t) − q̃₀|` and
/// `|∂q₀/∂q_t|` there.
pub fn lower_caustic_residual(theta: f64) -> Result<(f64, f64)> {
    let (v, z) = caustic_lower_point(theta)?;
    let f = q0_of_qt_real(z, theta)?;
    let d = crate::trajectories::dq0_dqt(num_complex::Complex64::new(z, 0.0), theta)?.re;
    Ok(((f.abs() - v).abs(), d.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectories::{find_real_turning_points, fluct_det_signed};

    #[test]
    fn fig7_value() {
        let q = caustic_lower(5.0).unwrap();
        assert!((q - 0.3332).abs() < 5e-4, "{q}");
        assert!((q - 0.333186).abs() < 1e-5);
    }

    #[test]
    fn lower_caustic_near_cusp_and_between() {
        assert!(caustic_lower(PI + 1e-4).unwrap() < 1e-2);
        assert!(caustic_lower(PI).is_err());
        let q4 = caustic_lower(4.0).unwrap();
        assert!(q4 > 0.0 && q4 < 0.3332);
        // brute-force minimisation of |∂q₀/∂q_t| on a grid
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..20000 {
            let q = i as f64 / 20000.0;
            let d = crate::trajectories::dq0_dqt(num_complex::Complex64::new(q, 0.0), 4.0).unwrap().re.abs();
            if d < best.0 {
                best = (d, q);
            }
        }
        let v = q0_of_qt_real(best.1, 4.0).unwrap().abs();
        assert!((v - q4).abs() < 1e-6, "{v} vs {q4}");
    }

    #[test]
    fn amplitude_values() {
        assert!(amplitude_a(2.0 * PI).unwrap() < 1e-8);
        assert!(amplitude_a(6.0).is_err());
        let a7 = amplitude_a(7.0).unwrap();
        assert!((q0_of_qt_real(a7, 7.0).unwrap() + a7).abs() < 1e-10);
        assert!(amplitude_a(9.0).unwrap() > a7);
    }

    #[test]
    fn region_examples() {
        assert_eq!(classify_region(0.0, 2.0).unwrap().n_solutions, 1);
        assert_eq!(classify_region(0.0, 4.5).unwrap().n_solutions, 3);
        let r = classify_region(0.1, 7.0).unwrap();
        assert_eq!(r.n_solutions, 5);
        assert_eq!(r.side, RegionSide::InsidePeriodic);
        let q = caustic_lower(5.0).unwrap();
        assert_eq!(classify_region(q, 5.0).unwrap().side, RegionSide::OnCaustic(1));
        assert_eq!(classify_region(q + 1e-6, 5.0).unwrap().side, RegionSide::Outside);
        assert_eq!(classify_region(q - 1e-6, 5.0).unwrap().side, RegionSide::InsideFold);
    }

    #[test]
    fn region_count_matches_enumeration() {
        for i in 0..25 {
            for j in 0..25 {
                let q0 = -0.95 + 1.9 * i as f64 / 24.0;
                let th = 0.3 + 9.7 * j as f64 / 24.0;
                let r = classify_region(q0, th).unwrap();
                if matches!(r.side, RegionSide::OnCaustic(_)) {
                    continue;
                }
                let sym = find_real_turning_points(q0, th).unwrap().len();
                let periodic = (1..)
                    .take_while(|m| th >= 2.0 * *m as f64 * PI)
                    .filter(|&m| periodic_amplitude(th, m).unwrap() > q0.abs())
                    .count();
                assert_eq!(r.n_solutions, sym + 2 * periodic, "({q0}, {th})");
                assert_eq!(r.n_solutions % 2, 1);
            }
        }
    }

    #[test]
    fn traced_curves() {
        let c = trace_curves(4.0, 0.05).unwrap();
        assert_eq!(c.len(), 1);
        let c = trace_curves(10.0, 0.05).unwrap();
        assert_eq!(c.len(), 3);
        for (curve, n) in c.iter().zip([1.0, 2.0, 3.0]) {
            assert!((curve.cusp.1 - n * PI).abs() < 1e-3, "{:?}", curve.cusp);
            let pts = &curve.points;
            for (a, b) in pts.iter().zip(pts.iter().rev()) {
                assert_eq!(a.0, -b.0);
                assert_eq!(a.1, b.1);
            }
        }
        assert_eq!(c[0].kind, CurveKind::PairCreation(1));
        assert_eq!(c[1].kind, CurveKind::PeriodicSplit(1));
        assert_eq!(c[2].kind, CurveKind::PairCreation(2));
    }

    #[test]
    fn lower_curve_monotone_and_determinant_vanishes() {
        let mut prev = 0.0;
        for i in 1..60 {
            let th = PI + (3.0 * PI) * i as f64 / 60.0;
            let (v, z) = caustic_lower_point(th).unwrap();
            assert!(v > prev, "{th}");
            prev = v;
            assert!(fluct_det_signed(z, th, 1.0).abs() < 1e-6);
            let (r, d) = lower_caustic_residual(th).unwrap();
            assert!(r < 1e-10 && d < 1e-8);
        }
    }
}
