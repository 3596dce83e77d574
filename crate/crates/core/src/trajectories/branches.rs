//! Monotonic branches of `q₀(q_t)` at fixed `Θ`, real turning points and the
//! periodic orbits that appear for `Θ ≥ 2π`.

use num_complex::Complex64;

use super::action::action;
use super::determinant::fluct_det_signed;
use super::map::{dq0_real_raw, phase, q0_raw};
use super::{SolutionKind, TrajectorySolution};
use crate::error::{domain, Error, Result};
use crate::numeric::roots::brent;
use crate::numeric::root_tol;

const EDGE: f64 = 1.0 - 1e-15;

fn f(q: f64, theta: f64) -> f64 {
    if q >= 1.0 {
        return 1.0;
    }
    if q <= -1.0 {
        return -1.0;
    }
    q0_raw(Complex64::new(q, 0.0), theta).re
}

/// Sample points on `[0, 1)`: uniform to 0.99, then geometric towards 1.
fn scan_grid() -> Vec<f64> {
    let mut v: Vec<f64> = (0..=600).map(|i| 0.99 * i as f64 / 600.0).collect();
    v.extend((1..=220).map(|j| 1.0 - 10f64.powf(-2.0 - 0.05 * j as f64)));
    v
}

/// Partition of `(−1, 1)` into intervals on which `q₀(·, Θ)` is monotonic.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchMap {
    theta: f64,
    zeros: Vec<f64>,
}

impl BranchMap {
    /// Locates the positive zeros of `∂q₀/∂q_t`; the negative ones are their mirror.
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain(format!("Θ must be positive and finite, got {theta}")));
        }
        let slope = |q: f64| dq0_real_raw(q, theta);
        let grid = scan_grid();
        let mut zeros = Vec::new();
        let mut prev = (grid[0], slope(grid[0]));
        if prev.1 == 0.0 {
            // cusp exactly at Θ = (2n+1)π: the double zero at the origin is not a branch point
            prev.1 = -slope(1e-8).signum() * f64::MIN_POSITIVE;
        }
        for &q in &grid[1..] {
            let s = slope(q);
            if s == 0.0 {
                zeros.push(q);
                prev = (q, -prev.1.signum() * f64::MIN_POSITIVE);
                continue;
            }
            if s.signum() != prev.1.signum() {
                zeros.push(brent(slope, prev.0, q, 1e-15)?);
            }
            prev = (q, s);
        }
        Ok(Self { theta, zeros })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Positive zeros of `∂q₀/∂q_t`, ascending.
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    /// Branch boundaries `−1 < −z_n < … < −z_1 < z_1 < … < z_n < 1`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![-1.0];
        b.extend(self.zeros.iter().rev().map(|z| -z));
        b.extend(self.zeros.iter().copied());
        b.push(1.0);
        b
    }

    pub fn n_branches(&self) -> usize {
        2 * self.zeros.len() + 1
    }

    /// `|q₀|` at each fold, ordered from the outermost zero inwards.
    pub fn fold_values(&self) -> Vec<(f64, f64)> {
        self.zeros.iter().rev().map(|&z| (f(z, self.theta).abs(), z)).collect()
    }

    /// Real roots of `q₀(q_t, Θ) = q0` as `(q_t, branch)` pairs, ascending in `q_t`.
    pub fn real_roots(&self, q0: f64) -> Result<Vec<(f64, usize)>> {
        if !(q0.abs() < 1.0) {
            return Err(domain(format!("need |q0| < 1, got {q0}")));
        }
        if q0 < 0.0 {
            let last = self.n_branches() - 1;
            let mut r: Vec<_> = self.real_roots(-q0)?.into_iter().map(|(q, b)| (-q, last - b)).collect();
            r.reverse();
            return Ok(r);
        }
        let bp = self.breakpoints();
        let nb = self.n_branches();
        let mut roots = Vec::new();
        for j in 0..nb {
            let (lo, hi) = (bp[j], bp[j + 1]);
            if q0 == 0.0 && hi <= 0.0 && lo < 0.0 {
                // mirrored below from the positive side so the set is exactly symmetric
                continue;
            }
            if lo < 0.0 && hi > 0.0 && q0 == 0.0 {
                roots.push((0.0, j));
                continue;
            }
            if let Some(q) = self.root_on(lo, hi, q0)? {
                roots.push((q, j));
            }
        }
        if q0 == 0.0 {
            let mirrored: Vec<_> = roots.iter().filter(|r| r.0 > 0.0).map(|&(q, j)| (-q, nb - 1 - j)).collect();
            roots.extend(mirrored);
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(roots)
    }

    fn root_on(&self, lo: f64, hi: f64, q0: f64) -> Result<Option<f64>> {
        let th = self.theta;
        let (a, b) = (lo.max(-EDGE), hi.min(EDGE));
        let (fa, fb) = (f(lo, th) - q0, f(hi, th) - q0);
        if fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0 {
            return Ok(None);
        }
        if fa == 0.0 {
            return Ok(Some(a));
        }
        if fb == 0.0 {
            return Ok(Some(b));
        }
        let (ga, gb) = (f(a, th) - q0, f(b, th) - q0);
        if ga.signum() == gb.signum() {
            // root squeezed between the last representable point and ±1
            return Ok(Some(if ga.abs() < gb.abs() { a } else { b }));
        }
        brent(|q| f(q, th) - q0, a, b, root_tol()).map(Some)
    }
}

/// Amplitude of the orbit of period `Θ/m`: the `q_t ∈ [0, 1)` at which the
/// phase `u/K` equals `2m`. Zero at `Θ = 2mπ`.
pub fn periodic_amplitude(theta: f64, m: u32) -> Result<f64> {
    let target = 2.0 * m as f64;
    let s0 = theta / std::f64::consts::PI;
    if m == 0 || s0 < target {
        return Err(Error::Region { what: "periodic orbit", q0: 0.0, theta });
    }
    if s0 == target {
        return Ok(0.0);
    }
    let g = |q: f64| phase(q, theta).unwrap_or(0.0) - target;
    let mut hi = 0.999;
    while g(hi) > 0.0 {
        hi = 1.0 - (1.0 - hi) * 0.1;
        if hi >= EDGE {
            return Err(domain("periodic amplitude too close to the separatrix"));
        }
    }
    brent(g, 0.0, hi, root_tol())
}

fn saddle_index(branch: usize, n_branches: usize, det: f64) -> u32 {
    let mut n = branch.min(n_branches - 1 - branch) as u32;
    let odd = n % 2 == 1;
    if (det > 0.0 && odd) || (det < 0.0 && !odd) {
        n += 1;
    }
    n
}

/// All real classical paths ending at `q₀`, with kinds assigned by branch.
///
/// `det_delta` is stored at `g = 1`; see [`TrajectorySolution::det_at`].
pub fn find_real_turning_points(q0: f64, theta: f64) -> Result<Vec<TrajectorySolution>> {
    real_solutions(&BranchMap::new(theta)?, q0)
}

pub(crate) fn real_solutions(map: &BranchMap, q0: f64) -> Result<Vec<TrajectorySolution>> {
    let theta = map.theta();
    if q0 < 0.0 {
        let nb = map.n_branches();
        let mut sols: Vec<_> = real_solutions(map, -q0)?
            .into_iter()
            .map(|s| TrajectorySolution { q_t: -s.q_t, q0, branch: s.branch.map(|b| nb - 1 - b), ..s })
            .collect();
        sols.reverse();
        return Ok(sols);
    }
    let roots = map.real_roots(q0)?;
    let nb = map.n_branches();
    let mut out = Vec::with_capacity(roots.len());
    for &(q, j) in &roots {
        let z = Complex64::new(q, 0.0);
        let reached = q0_raw(z, theta).re;
        let act = action(z, reached, theta)?;
        let det = fluct_det_signed(q, theta, 1.0);
        let kind = if j == nb - 1 {
            SolutionKind::GlobalMin
        } else if j == 0 {
            SolutionKind::LocalMin
        } else {
            SolutionKind::Saddle(saddle_index(j, nb, det))
        };
        out.push(TrajectorySolution { q_t: z, q0, action: act, det_delta: Some(det), kind, branch: Some(j) });
    }
    // the minimum with the lower action is the global one
    let gm = out.iter().position(|s| s.kind == SolutionKind::GlobalMin);
    let lm = out.iter().position(|s| s.kind == SolutionKind::LocalMin);
    if let (Some(g), Some(l)) = (gm, lm) {
        if out[l].action.re < out[g].action.re {
            out[g].kind = SolutionKind::LocalMin;
            out[l].kind = SolutionKind::GlobalMin;
        }
    }
    Ok(out)
}

/// The periodic one-saddle through `q₀` for `Θ ≥ 2π`, `|q₀| ≤ A(Θ)`.
///
/// Its turning points are `±A(Θ)`; the stored `q_t` is the one opposite in sign
/// to `q₀` (the limit of the symmetric saddle at `|q₀| = A`). The action does not
/// depend on `q₀` and is that of the half-period path from `−A` to `A`. The
/// time-reversed partner has the same action.
pub fn periodic_saddle(q0: f64, theta: f64) -> Result<TrajectorySolution> {
    let amp = periodic_amplitude(theta, 1).map_err(|_| Error::Region { what: "periodic saddle", q0, theta })?;
    if !(q0.abs() <= amp) {
        return Err(Error::Region { what: "periodic saddle", q0, theta });
    }
    let z = Complex64::new(amp, 0.0);
    let act = if amp == 0.0 { Complex64::new(theta / 4.0, 0.0) } else { action(z, q0_raw(z, theta).re, theta)? };
    let q_t = if q0 > 0.0 { -amp } else { amp };
    Ok(TrajectorySolution {
        q_t: Complex64::new(q_t, 0.0),
        q0,
        action: act,
        det_delta: None,
        kind: SolutionKind::Saddle(1),
        branch: None,
    })
}
