//! Globally adaptive Gauss–Kronrod (7/15) quadrature for real and complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex.
pub trait QuadValue: Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-13,
            max_intervals: 4000,
        }
    }
}

impl QuadTol {
    pub fn rel(rel: f64) -> Self {
        Self { rel, ..Self::default() }
    }
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let s = f(center - dx) + f(center + dx);
        kron = kron + s * w;
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).magnitude();
    (value, error)
}

/// Integrates `f` over `[a, b]`, bisecting the worst segment until the summed
/// error estimate meets `tol`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, tol: QuadTol) -> Result<T>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if a == b {
        return Ok(T::default());
    }
    let (value, error) = kronrod(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let total = segments.iter().fold(T::default(), |acc, s| acc + s.value);
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if err <= tol.abs.max(tol.rel * total.magnitude()) {
            return Ok(total);
        }
        if segments.len() >= tol.max_intervals {
            return Err(Error::NoConvergence {
                what: "adaptive quadrature",
                iterations: segments.len(),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval cannot be split further in floating point.
            return Ok(total);
        }
        let (lv, le) = kronrod(&mut f, s.a, mid);
        let (rv, re) = kronrod(&mut f, mid, s.b);
        segments.push(Segment { a: s.a, b: mid, value: lv, error: le });
        segments.push(Segment { a: mid, b: s.b, value: rv, error: re });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v: f64 = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, QuadTol::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 1.0 / 6.0 - 9.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        // ∫₀¹ x^{-1/2} dx = 2
        let v: f64 = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadTol::rel(1e-10)).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn complex_exponential() {
        let v: Complex64 = integrate(
            |t| Complex64::new(0.0, t).exp(),
            0.0,
            std::f64::consts::PI,
            QuadTol::default(),
        )
        .unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }
}
