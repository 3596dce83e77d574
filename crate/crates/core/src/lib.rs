//! Semiclassical diagonal thermal density of a particle in the quartic
//! double well `U(q) = (q² − 1)²/4`, in the usual Gaussian approximation and
//! in the improved approximation that stays finite on caustics.
//!
//! Module map:
//! - [`specfun`]: complex Carlson, Legendre and Jacobi elliptic functions;
//! - [`trajectories`]: turning points, actions and fluctuation determinants;
//! - [`caustics`]: catastrophe curves and region classification;
//! - [`density`]: usual and improved density assembly;
//! - [`oracle`]: exact spectral density for validation;
//! - [`validation`]: the acceptance checks shared by tests and the CLI.

pub mod caustics;
pub mod density;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod specfun;
pub mod trajectories;
pub mod validation;

pub use caustics::{CausticCurve, CurveKind, Region, RegionSide};
pub use density::{DensityPoint, EffectivePotential};
pub use error::{Error, Result};
pub use oracle::{Grid, SpectralSolution};
pub use trajectories::{PhysParams, SolutionKind, TrajectorySolution};
