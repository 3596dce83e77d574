//! Exact diagonal thermal density from the spectrum of
//! `h = −(g/2)d²/dq² + U(q)/g` on a finite grid with Dirichlet walls.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::trajectories::PhysParams;

/// Uniform grid including both wall points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { q_min: -4.0, q_max: 4.0, n_points: 2048 }
    }
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.q_min + self.spacing() * i as f64
    }

    /// The grid with every interval halved; shares all points with `self`.
    pub fn refined(&self) -> Self {
        Self { n_points: 2 * self.n_points - 1, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Stencil {
    /// Three-point Laplacian, error `O(h²)`.
    SecondOrder,
    /// Three-point results on `h` and `h/2` combined as `(4ρ_{h/2} − ρ_h)/3`, error `O(h⁴)`.
    #[default]
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum Well {
    #[default]
    DoubleWell,
    /// `U = q²/2`, for checking the solver against the Mehler kernel.
    Harmonic,
}

impl Well {
    fn potential(&self, q: f64) -> f64 {
        match self {
            Self::DoubleWell => {
                let s = q * q - 1.0;
                0.25 * s * s
            }
            Self::Harmonic => 0.5 * q * q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleOptions {
    pub stencil: Stencil,
    pub well: Well,
    /// States with `Θ(ε − U(0)/g) > max_exponent` are dropped; the barrier
    /// offset keeps the levels that dominate the density under the barrier.
    pub max_exponent: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { stencil: Stencil::Richardson, well: Well::DoubleWell, max_exponent: 40.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSolution {
    /// Retained levels `ε_n`, ascending.
    pub energies: Vec<f64>,
    pub grid: Grid,
    /// `ρ̃(q_i) = Σ_n |ψ_n(q_i)|² e^{−Θε_n}` on the grid points.
    pub densities: Vec<f64>,
    /// `Σ_n e^{−Θε_n}`.
    pub partition: f64,
}

impl SpectralSolution {
    pub fn q(&self) -> Vec<f64> {
        (0..self.grid.n_points).map(|i| self.grid.point(i)).collect()
    }

    /// Four-point Lagrange interpolation of the grid density.
    pub fn density_at(&self, q: f64) -> f64 {
        let g = &self.grid;
        let h = g.spacing();
        let x = (q - g.q_min) / h;
        let n = g.n_points;
        let i0 = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let mut acc = 0.0;
        for i in i0..i0 + 4 {
            let mut w = 1.0;
            for j in i0..i0 + 4 {
                if i != j {
                    w *= (x - j as f64) / (i as f64 - j as f64);
                }
            }
            acc += w * self.densities[i];
        }
        acc
    }

    /// Trapezoid integral of the density over the grid.
    pub fn integrated_density(&self) -> f64 {
        let h = self.grid.spacing();
        self.densities.iter().sum::<f64>() * h
    }
}

/// Eigenpairs of the discretised Hamiltonian below `e_max`; vectors are
/// normalised as `Σ ψ_i² h = 1` and include the zero wall values.
pub(crate) struct Spectrum {
    pub energies: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let prev = if i == 0 { 0.0 } else { off2[i - 1] / d };
        d = diag[i] - x - prev;
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn kth_eigenvalue(diag: &[f64], off2: &[f64], k: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off2, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

struct TriLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    l: Vec<f64>,
    swap: Vec<bool>,
}

/// LU with partial pivoting of the symmetric tridiagonal `T − λI`.
fn tri_lu(diag: &[f64], off: &[f64], lambda: f64) -> TriLu {
    let n = diag.len();
    let norm = diag.iter().map(|d| (d - lambda).abs()).fold(0.0, f64::max) + 2.0 * off.iter().map(|o| o.abs()).fold(0.0, f64::max);
    let tiny = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    let mut u0: Vec<f64> = diag.iter().map(|d| d - lambda).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut l = vec![0.0; n];
    let mut swap = vec![false; n];
    for i in 0..n.saturating_sub(1) {
        let c = off[i];
        if u0[i].abs() >= c.abs() {
            if u0[i] == 0.0 {
                u0[i] = tiny;
            }
            l[i] = c / u0[i];
            u0[i + 1] -= l[i] * u1[i];
        } else {
            swap[i] = true;
            l[i] = u0[i] / c;
            let t = u0[i + 1];
            u0[i] = c;
            u0[i + 1] = u1[i] - l[i] * t;
            u1[i] = t;
            if i + 1 < n - 1 {
                u2[i] = u1[i + 1];
                u1[i + 1] = -l[i] * u2[i];
            }
        }
    }
    for u in u0.iter_mut() {
        if u.abs() < tiny {
            *u = tiny;
        }
    }
    TriLu { u0, u1, u2, l, swap }
}

impl TriLu {
    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * b[i + 2];
            }
            b[i] = s / self.u0[i];
        }
    }
}

fn normalise(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

pub(crate) fn spectrum(params: PhysParams, grid: Grid, well: Well, e_max: f64) -> Result<Spectrum> {
    if grid.n_points < 8 || !(grid.q_max > grid.q_min) {
        return Err(domain("grid needs at least 8 points and q_max > q_min"));
    }
    let g = params.g;
    let h = grid.spacing();
    let m = grid.n_points - 2;
    let kin = g / (2.0 * h * h);
    let diag: Vec<f64> = (1..=m).map(|i| 2.0 * kin + well.potential(grid.point(i)) / g).collect();
    let off = vec![-kin; m - 1];
    let off2: Vec<f64> = off.iter().map(|o| o * o).collect();
    let lo = diag.iter().fold(f64::INFINITY, |a, &d| a.min(d)) - 2.0 * kin;
    let hi_all = diag.iter().fold(f64::NEG_INFINITY, |a, &d| a.max(d)) + 2.0 * kin;
    let count = sturm_count(&diag, &off2, e_max.min(hi_all));
    let energies: Vec<f64> = (0..count).map(|k| kth_eigenvalue(&diag, &off2, k, lo, hi_all)).collect();

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    for (k, &e) in energies.iter().enumerate() {
        let lu = tri_lu(&diag, &off, e);
        let cluster: Vec<usize> =
            (0..k).filter(|&j| (energies[j] - e).abs() <= 1e-3 * e.abs().max(1.0)).collect();
        let mut v: Vec<f64> = (0..m).map(|i| ((i as f64 + 1.0) * (0.618_033_988_7 + k as f64 * 0.1)).sin() + 0.5).collect();
        normalise(&mut v);
        for _ in 0..4 {
            lu.solve(&mut v);
            for &j in &cluster {
                let dot: f64 = v.iter().zip(&vectors[j]).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(&vectors[j]).for_each(|(a, b)| *a -= dot * b);
            }
            normalise(&mut v);
        }
        vectors.push(v);
    }
    // grid normalisation Σψ²h = 1, wall zeros restored
    let scale = 1.0 / h.sqrt();
    let vectors = vectors
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(m + 2);
            full.push(0.0);
            full.extend(v.iter().map(|x| x * scale));
            full.push(0.0);
            full
        })
        .collect();
    Ok(Spectrum { energies, vectors })
}

fn single_grid(params: PhysParams, grid: Grid, options: OracleOptions) -> Result<SpectralSolution> {
    let e_max = options.max_exponent / params.theta + options.well.potential(0.0) / params.g;
    let spec = spectrum(params, grid, options.well, e_max)?;
    let mut densities = vec![0.0; grid.n_points];
    let mut partition = 0.0;
    for (e, v) in spec.energies.iter().zip(&spec.vectors) {
        let w = (-params.theta * e).exp();
        partition += w;
        densities.iter_mut().zip(v).for_each(|(d, x)| *d += w * x * x);
    }
    Ok(SpectralSolution { energies: spec.energies, grid, densities, partition })
}

fn check_walls(s: &SpectralSolution) -> Result<()> {
    let max = s.densities.iter().fold(0.0f64, |a, &b| a.max(b));
    let n = s.densities.len();
    let edge = s.densities[1].max(s.densities[n - 2]) / max;
    if edge > 1e-12 {
        return Err(Error::GridTooSmall(edge));
    }
    Ok(())
}

/// Exact `ρ̃(q) = Σ|ψ_n(q)|² e^{−Θε_n}` with default options.
pub fn exact_rho_diag(params: PhysParams, grid: Grid) -> Result<SpectralSolution> {
    exact_rho_diag_with(params, grid, OracleOptions::default())
}

pub fn exact_rho_diag_with(params: PhysParams, grid: Grid, options: OracleOptions) -> Result<SpectralSolution> {
    let coarse = single_grid(params, grid, options)?;
    check_walls(&coarse)?;
    if options.stencil == Stencil::SecondOrder {
        return Ok(coarse);
    }
    let fine = single_grid(params, grid.refined(), options)?;
    let densities = coarse
        .densities
        .iter()
        .enumerate()
        .map(|(i, c)| (4.0 * fine.densities[2 * i] - c) / 3.0)
        .collect();
    let n = coarse.energies.len().min(fine.energies.len());
    let energies = (0..n).map(|k| (4.0 * fine.energies[k] - coarse.energies[k]) / 3.0).collect();
    let partition = (4.0 * fine.partition - coarse.partition) / 3.0;
    Ok(SpectralSolution { energies, grid, densities, partition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(g: f64, theta: f64) -> PhysParams {
        PhysParams::new(g, theta).unwrap()
    }

    #[test]
    fn harmonic_matches_mehler() {
        let opts = OracleOptions { well: Well::Harmonic, ..Default::default() };
        for (g, th) in [(0.3, 1.0), (0.1, 2.5)] {
            let s = exact_rho_diag_with(params(g, th), Grid::default(), opts).unwrap();
            for q in [0.0, 0.3, -0.7] {
                let exact = (2.0 * PI * g * th.sinh()).powf(-0.5) * (-q * q * (th / 2.0).tanh() / g).exp();
                assert!((s.density_at(q) / exact - 1.0).abs() < 1e-7, "{g} {th} {q} {:e}", s.density_at(q) / exact - 1.0);
            }
            for (n, e) in s.energies.iter().take(5).enumerate() {
                assert!((e - (n as f64 + 0.5)).abs() < 1e-8, "{n} {e}");
            }
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let p = params(0.05, 1.0);
        let grid = Grid { n_points: 1024, ..Grid::default() };
        let s = spectrum(p, grid, Well::DoubleWell, 12.0).unwrap();
        let h = grid.spacing();
        assert!(s.energies.len() > 8);
        for i in 0..s.vectors.len() {
            for j in 0..=i {
                let dot: f64 = s.vectors[i].iter().zip(&s.vectors[j]).map(|(a, b)| a * b).sum::<f64>() * h;
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10, "{i} {j} {dot}");
            }
        }
        assert!(s.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_identity() {
        let opts = OracleOptions { stencil: Stencil::SecondOrder, ..Default::default() };
        let s = exact_rho_diag_with(params(0.3, 2.0), Grid::default(), opts).unwrap();
        assert!((s.integrated_density() / s.partition - 1.0).abs() < 1e-8);
        let r = exact_rho_diag(params(0.3, 2.0), Grid::default()).unwrap();
        assert!((r.integrated_density() / r.partition - 1.0).abs() < 1e-8);
    }

    #[test]
    fn high_temperature_limit() {
        let s = exact_rho_diag(params(0.3, 0.2), Grid::default()).unwrap();
        let classical = (2.0 * PI * 0.3 * 0.2f64).powf(-0.5) * (-0.2f64 / 1.2).exp();
        assert!((s.density_at(0.0) / classical - 1.0).abs() < 0.02);
    }

    #[test]
    fn tunnel_splitting_shrinks_with_g() {
        let mut prev = f64::INFINITY;
        for g in [0.3, 0.2, 0.1] {
            let s = exact_rho_diag(params(g, 1.0), Grid::default()).unwrap();
            let split = s.energies[1] - s.energies[0];
            assert!(split > 0.0 && split < prev, "{g}: {split}");
            prev = split;
        }
    }

    #[test]
    fn refinement_converges() {
        let p = params(0.3, 2.0);
        let a = exact_rho_diag(p, Grid::default()).unwrap();
        let b = exact_rho_diag(p, Grid { n_points: 4095, ..Grid::default() }).unwrap();
        for q in [-0.9, -0.3, 0.0, 0.5, 0.9] {
            assert!((a.density_at(q) - b.density_at(q)).abs() < 1e-8, "{q}");
        }
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = Grid { q_min: -1.2, q_max: 1.2, n_points: 512 };
        assert!(matches!(exact_rho_diag(params(0.3, 1.0), g), Err(Error::GridTooSmall(_))));
    }
}
