//! Classical paths of the Euclidean double-well problem.
//!
//! A path from `q₀` back to `q₀` in time `Θ` is labelled by its turning point
//! `q_t`; everything else (endpoint, action, determinant) follows in closed form
//! or by one-dimensional quadrature.

mod action;
mod branches;
mod complex;
mod determinant;
mod map;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Result};

pub use action::{action, action_along_trajectory, action_closed_form, action_segment};
pub use branches::{find_real_turning_points, periodic_amplitude, periodic_saddle, BranchMap};
pub(crate) use branches::real_solutions;
pub use complex::{find_complex_pair, imaginary_turning_point};
pub use determinant::{fluct_det, fluct_det_literal, fluct_det_signed, CAUSTIC_TOL};
pub use map::{dq0_dqt, modulus, phase, potential, potential_slope, q0_of_qt, q0_of_qt_real, rate};

/// Coupling `g` and inverse temperature `Θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysParams {
    pub g: f64,
    pub theta: f64,
}

impl PhysParams {
    pub fn new(g: f64, theta: f64) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(domain(format!("g must be positive, got {g}")));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain(format!("Θ must be positive, got {theta}")));
        }
        Ok(Self { g, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SolutionKind {
    GlobalMin,
    LocalMin,
    /// Saddle with the given number of unstable directions.
    Saddle(u32),
    ComplexPair,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::GlobalMin => write!(f, "global_min"),
            Self::LocalMin => write!(f, "local_min"),
            Self::Saddle(n) => write!(f, "saddle{n}"),
            Self::ComplexPair => write!(f, "complex"),
        }
    }
}

/// One extremum of the action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySolution {
    pub q_t: Complex64,
    pub q0: f64,
    pub action: Complex64,
    /// `Δ` at `g = 1`; absent for complex and periodic paths.
    pub det_delta: Option<f64>,
    pub kind: SolutionKind,
    /// Index of the monotonic branch of `q₀(q_t)`, counted from `q_t = −1`.
    pub branch: Option<usize>,
}

impl TrajectorySolution {
    /// `Δ` at coupling `g` (it is linear in `g`).
    pub fn det_at(&self, g: f64) -> Option<f64> {
        self.det_delta.map(|d| d * g)
    }

    pub fn is_minimum(&self) -> bool {
        matches!(self.kind, SolutionKind::GlobalMin | SolutionKind::LocalMin)
    }
}
