//! Complex-capable elliptic special functions.
//!
//! Carlson's symmetric integrals are the primitive; the Legendre integrals are
//! expressed through them, and the Jacobi functions come from the descending
//! Landen transformation. Everything works on complex arguments with the
//! principal branch, and is pure: identical inputs give identical bits.

mod carlson;
mod jacobi;
mod legendre;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use carlson::{carlson_rd, carlson_rf};
pub use jacobi::{jacobi, jacobi_cd, jacobi_cn, jacobi_dn, jacobi_sn, Jacobi};
pub use legendre::{legendre_e, legendre_e_inc, legendre_f, legendre_k};

/// Jacobi modulus `k`, stored through its square (the parameter `m = k²`),
/// which is all the functions depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticModulus {
    m: Complex64,
    mc: Complex64,
}

impl EllipticModulus {
    pub fn from_k(k: Complex64) -> Self {
        Self::from_m(k * k)
    }

    pub fn from_m(m: Complex64) -> Self {
        Self { m, mc: 1.0 - m }
    }

    /// Builds the modulus from `m` and its complement `1 − m` computed by the
    /// caller without cancellation (matters as `k → 1`).
    pub fn with_complement(m: Complex64, mc: Complex64) -> Self {
        Self { m, mc }
    }

    pub fn real(k: f64) -> Self {
        Self::from_k(Complex64::new(k, 0.0))
    }

    /// The parameter `m = k²`.
    pub fn m(&self) -> Complex64 {
        self.m
    }

    /// The complementary parameter `1 − k²`.
    pub fn mc(&self) -> Complex64 {
        self.mc
    }

    /// Principal square root of `m`.
    pub fn k(&self) -> Complex64 {
        self.m.sqrt()
    }

    /// `k² ∈ [1, ∞)`: the cut of the complete integrals.
    pub fn on_cut(&self) -> bool {
        self.m.im == 0.0 && self.mc.im == 0.0 && self.mc.re <= 0.0
    }
}

impl From<f64> for EllipticModulus {
    fn from(k: f64) -> Self {
        Self::real(k)
    }
}

impl From<Complex64> for EllipticModulus {
    fn from(k: Complex64) -> Self {
        Self::from_k(k)
    }
}
