//! Modified Bessel functions of order zero and one, the smooth cutoff `φ`,
//! the singular profile `φ₀` and the remainder `R` of the Green function.
//!
//! `K₀` is evaluated in three regimes:
//!
//! * `|z| ≤ 2`: the ascending series
//!   `K₀(z) = −I₀(z)·log(z/2) + Σ (z/2)^{2m} ψ(m+1)/(m!)²`;
//! * `2 < |z| ≤ 25`: Steed's continued fraction (Thompson–Barnett form,
//!   valid for complex `z` in the right half-plane);
//! * `|z| > 25`: the large-argument expansion
//!   `K_ν(z) ~ (π/2z)^{1/2} e^{−z} Σ a_k(ν) z^{−k}`.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::{Complex64, ComplexFloat};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `|z|` handled by the ascending series.
pub const SERIES_RADIUS: f64 = 2.0;

/// `|z|` above which the large-argument expansion is used.
pub const ASYMPTOTIC_RADIUS: f64 = 25.0;

const SERIES_MAX_TERMS: usize = 60;
const CF_MAX_ITER: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselRegime {
    Series,
    ContinuedFraction,
    Asymptotic,
}

impl BesselRegime {
    pub fn for_modulus(modulus: f64) -> Self {
        if modulus <= SERIES_RADIUS {
            BesselRegime::Series
        } else if modulus <= ASYMPTOTIC_RADIUS {
            BesselRegime::ContinuedFraction
        } else {
            BesselRegime::Asymptotic
        }
    }
}

/// `K₀(z)` together with `K₀′(z) = −K₁(z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselEval {
    pub value: Complex64,
    pub derivative: Complex64,
    pub regime: BesselRegime,
}

/// Scalar types the Bessel kernels run on: `f64` for the hot radial loops,
/// `Complex64` for the general case.
trait Scalar:
    ComplexFloat<Real = f64> + Mul<f64, Output = Self> + Add<f64, Output = Self> + From<f64>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

fn lift<T: Scalar>(x: f64) -> T {
    <T as From<f64>>::from(x)
}

fn modulus<T: Scalar>(x: T) -> f64 {
    ComplexFloat::abs(x)
}

/// `K₀(z)` and `K₀′(z)` for `Re z > 0`.
pub fn bessel_k0(z: Complex64) -> Result<BesselEval> {
    if !(z.re > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            what: "bessel_k0",
            value: z.to_string(),
        });
    }
    let regime = BesselRegime::for_modulus(z.norm());
    let (k0, k1) = k0_k1(z, regime);
    Ok(BesselEval {
        value: k0,
        derivative: -k1,
        regime,
    })
}

/// `K₁(z)` for `Re z > 0`.
pub fn bessel_k1(z: Complex64) -> Result<Complex64> {
    bessel_k0(z).map(|e| -e.derivative)
}

/// `K₀(x)` for real `x > 0`, without the complex detour. Returns `NaN` for
/// `x ≤ 0`; callers inside the crate guarantee positivity.
pub(crate) fn k0_real(x: f64) -> f64 {
    if x > 740.0 {
        return 0.0;
    }
    k0_k1(x, BesselRegime::for_modulus(x)).0
}

fn k0_k1<T: Scalar>(z: T, regime: BesselRegime) -> (T, T) {
    match regime {
        BesselRegime::Series => series(z),
        BesselRegime::ContinuedFraction => steed(z),
        BesselRegime::Asymptotic => (asymptotic(z, 0.0), asymptotic(z, 1.0)),
    }
}

fn series<T: Scalar>(z: T) -> (T, T) {
    let half = z * 0.5;
    let y = half * half;
    let log_term = half.ln() + EULER_GAMMA;

    // term_m = y^m / (m!)^2, harmonic = H_m
    let mut term = lift::<T>(1.0);
    let mut harmonic = 0.0;
    let mut i0 = lift::<T>(1.0);
    let mut m_term_sum = lift::<T>(0.0); // Σ m·term_m
    let mut h_sum = lift::<T>(0.0); // Σ term_m·H_m
    let mut mh_sum = lift::<T>(0.0); // Σ m·term_m·H_m
    for m in 1..SERIES_MAX_TERMS {
        let mf = m as f64;
        term = term * y * (1.0 / (mf * mf));
        harmonic += 1.0 / mf;
        i0 = i0 + term;
        m_term_sum = m_term_sum + term * mf;
        h_sum = h_sum + term * harmonic;
        mh_sum = mh_sum + term * (mf * harmonic);
        let size = modulus(term) * mf * harmonic.max(1.0);
        if size < 1e-17 * (modulus(i0) + modulus(h_sum)) {
            break;
        }
    }
    let two_over_z = lift::<T>(2.0) / z;
    let i1 = two_over_z * m_term_sum;
    let k0 = h_sum - log_term * i0;
    let k1 = log_term * i1 + i0 / z - two_over_z * mh_sum;
    (k0, k1)
}

/// Steed's continued fraction for `K₀` and `K₁` (order `μ = 0`).
fn steed<T: Scalar>(z: T) -> (T, T) {
    let a1 = 0.25;
    let mut b = (z + 1.0) * 2.0;
    let mut d = lift::<T>(1.0) / b;
    let mut delh = d;
    let mut h = delh;
    let mut q1 = lift::<T>(0.0);
    let mut q2 = lift::<T>(1.0);
    let mut q = lift::<T>(a1);
    let mut c = a1;
    let mut a = -a1;
    let mut s = q * delh + 1.0;
    for i in 1..CF_MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) * (1.0 / a);
        q1 = q2;
        q2 = qnew;
        q = q + qnew * c;
        b = b + 2.0;
        d = lift::<T>(1.0) / (b + d * a);
        delh = (b * d - lift::<T>(1.0)) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if modulus(dels) < 1e-17 * modulus(s) {
            break;
        }
    }
    let h = h * a1;
    let k0 = (lift::<T>(PI) / (z * 2.0)).sqrt() * (-z).exp() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

fn asymptotic<T: Scalar>(z: T, nu: f64) -> T {
    let mu = 4.0 * nu * nu;
    let inv8z = lift::<T>(1.0) / (z * 8.0);
    let mut term = lift::<T>(1.0);
    let mut sum = lift::<T>(1.0);
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term = term * inv8z * ((mu - odd * odd) / k as f64);
        let size = modulus(term);
        if size > last {
            break;
        }
        sum = sum + term;
        if size < 1e-17 * modulus(sum) {
            break;
        }
        last = size;
    }
    (lift::<T>(PI) / (z * 2.0)).sqrt() * (-z).exp() * sum
}

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth partition with value 1 below `lo` and 0 above 2.
fn smooth_step(r: f64, lo: f64) -> f64 {
    let a = bump(2.0 - r);
    let b = bump(r - lo);
    a / (a + b)
}

/// The cutoff `φ`: identically 1 on `[0, 1]`, 0 on `[2, ∞)`, `C^∞`, and
/// non-increasing in between, built as `f(2−r)/(f(2−r)+f(r−1))` with
/// `f(s) = e^{−1/s}`.
pub fn cutoff_phi(r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    smooth_step(r, 1.0)
}

/// The splitting cutoff `χ`: 1 on `[0, 1/√2]`, 0 on `[2, ∞)`.
pub fn cutoff_chi(r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    smooth_step(r, std::f64::consts::FRAC_1_SQRT_2)
}

/// `φ₀(r) = −(2π)^{−1}(log(r/2) + γ)·φ(r)`.
pub fn phi0(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            what: "phi0",
            value: r.to_string(),
        });
    }
    Ok(phi0_unchecked(r))
}

pub(crate) fn phi0_unchecked(r: f64) -> f64 {
    if r >= 2.0 {
        return 0.0;
    }
    -((0.5 * r).ln() + EULER_GAMMA) / (2.0 * PI) * cutoff_phi(r)
}

/// `R(r) = (2π)^{−1}K₀(r) − φ₀(r)`, the part of the Green function left
/// after removing the singular profile.
pub fn remainder_r(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            what: "remainder_r",
            value: r.to_string(),
        });
    }
    Ok(remainder_unchecked(r))
}

pub(crate) fn remainder_unchecked(r: f64) -> f64 {
    k0_real(r) / (2.0 * PI) - phi0_unchecked(r)
}

/// Splits `R = R_small + R_large` with `R_small = χ·R`, so that
/// `R_small` is supported in `r ≤ 2` and `R_large` in `r ≥ 1/√2`.
pub fn split_r(r: f64) -> Result<(f64, f64)> {
    let total = remainder_r(r)?;
    let small = cutoff_chi(r) * total;
    Ok((small, total - small))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k0_at_one() {
        let e = bessel_k0(c(1.0, 0.0)).unwrap();
        assert_relative_eq!(e.value.re, 0.421_024_438_240_708_3, max_relative = 1e-14);
        assert_relative_eq!(-e.derivative.re, 0.601_907_230_197_234_6, max_relative = 1e-14);
        assert_eq!(e.regime, BesselRegime::Series);
    }

    #[test]
    fn regimes_agree_at_their_boundaries() {
        for &x in &[SERIES_RADIUS, ASYMPTOTIC_RADIUS] {
            for &theta in &[0.0, 0.7, 1.4] {
                let z = Complex64::from_polar(x, theta);
                let below = k0_k1(z, BesselRegime::for_modulus(x - 1e-9));
                let above = k0_k1(z, BesselRegime::for_modulus(x + 1e-9));
                assert!((below.0 - above.0).norm() <= 1e-12 * below.0.norm(), "K0 at {z}");
                assert!((below.1 - above.1).norm() <= 1e-12 * below.1.norm(), "K1 at {z}");
            }
        }
    }

    #[test]
    fn tiny_argument_matches_logarithm() {
        let z = 1e-8;
        let v = bessel_k0(c(z, 0.0)).unwrap().value.re;
        assert!((v + (z / 2.0).ln() + EULER_GAMMA).abs() < 1e-12);
    }

    #[test]
    fn large_argument_leading_order() {
        let z = 50.0;
        let v = bessel_k0(c(z, 0.0)).unwrap().value.re;
        let lead = (PI / (2.0 * z)).sqrt() * (-z).exp();
        assert!((v / lead - 1.0).abs() < 0.01);
        assert_eq!(bessel_k0(c(z, 0.0)).unwrap().regime, BesselRegime::Asymptotic);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k0(c(0.0, 0.0)).is_err());
        assert!(bessel_k0(c(-1.0, 0.5)).is_err());
        assert!(bessel_k0(c(0.0, 3.0)).is_err());
        assert!(phi0(0.0).is_err());
        assert!(remainder_r(-1.0).is_err());
        assert!(split_r(0.0).is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        let z = c(3.0, 4.0);
        let a = bessel_k0(z).unwrap().value;
        let b = bessel_k0(z.conj()).unwrap().value;
        assert_relative_eq!(a.re, b.re, max_relative = 1e-15);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-15);
    }

    #[test]
    fn cutoff_values() {
        assert_eq!(cutoff_phi(0.5), 1.0);
        assert_eq!(cutoff_phi(1.0), 1.0);
        assert_eq!(cutoff_phi(3.0), 0.0);
        assert_eq!(cutoff_phi(2.0), 0.0);
        assert_eq!(cutoff_phi(1.5), 0.5);
        let mut last = 1.0;
        for i in 0..=1000 {
            let v = cutoff_phi(1.0 + i as f64 / 1000.0);
            assert!(v <= last && (0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn phi0_values() {
        assert_eq!(phi0(2.5).unwrap(), 0.0);
        let expected = -((0.5f64).ln() + EULER_GAMMA) / (2.0 * PI);
        assert_relative_eq!(phi0(1.0).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(phi0(1.0).unwrap(), 0.018_451_073_777, max_relative = 1e-10);
        let zero = 2.0 * (-EULER_GAMMA).exp();
        assert!(phi0(zero).unwrap().abs() < 1e-16);
    }

    #[test]
    fn remainder_values() {
        let k10 = bessel_k0(c(10.0, 0.0)).unwrap().value.re;
        assert_eq!(remainder_r(10.0).unwrap(), k10 / (2.0 * PI));
        let r = 1e-4;
        assert!(remainder_r(r).unwrap().abs() <= 1e-8 * (2.0 / r).ln());
        let k1 = bessel_k0(c(1.0, 0.0)).unwrap().value.re;
        let want = k1 / (2.0 * PI) - phi0(1.0).unwrap();
        assert_relative_eq!(remainder_r(1.0).unwrap(), want, max_relative = 1e-15);
        assert_relative_eq!(remainder_r(1.0).unwrap(), 0.048_557_046_7, max_relative = 1e-8);
    }

    #[test]
    fn split_supports() {
        assert_eq!(split_r(0.5).unwrap().1, 0.0);
        assert_eq!(split_r(3.0).unwrap().0, 0.0);
        let (s, l) = split_r(1.0).unwrap();
        assert_eq!(s + l, remainder_r(1.0).unwrap());
    }
}
