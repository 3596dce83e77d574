//! Small numerical toolkit shared by the physics modules: adaptive quadrature,
//! bracketed root finding and derivative estimates, plus the two tolerances
//! a caller may override.

pub mod diff;
pub mod quad;
pub mod roots;

use std::sync::atomic::{AtomicU64, Ordering};

static ROOT_TOL: AtomicU64 = AtomicU64::new(0);
static QUAD_TOL: AtomicU64 = AtomicU64::new(0);

const DEFAULT_ROOT_TOL: f64 = 1e-16;
const DEFAULT_QUAD_TOL: f64 = 1e-13;

/// Absolute tolerance for turning-point root solves.
pub fn root_tol() -> f64 {
    let v = f64::from_bits(ROOT_TOL.load(Ordering::Relaxed));
    if v > 0.0 { v } else { DEFAULT_ROOT_TOL }
}

/// Relative tolerance for action and fluctuation-factor quadratures.
pub fn quad_tol() -> f64 {
    let v = f64::from_bits(QUAD_TOL.load(Ordering::Relaxed));
    if v > 0.0 { v } else { DEFAULT_QUAD_TOL }
}

/// Overrides the process-wide tolerances; `None` restores the default.
pub fn set_tolerances(root: Option<f64>, quad: Option<f64>) {
    ROOT_TOL.store(root.unwrap_or(0.0).to_bits(), Ordering::Relaxed);
    QUAD_TOL.store(quad.unwrap_or(0.0).to_bits(), Ordering::Relaxed);
}
