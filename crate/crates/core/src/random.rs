//! Seeded random fields.
//!
//! Every random quantity in the crate is drawn from a SplitMix64 stream
//! seeded with one `u64`. A band-limited field has independent complex
//! normal coefficients (`E|z|² = 1`) on the integer frequencies with
//! `|ξ| ≤ πn₀/(4L)` and zero elsewhere, and is normalized in `L²`. The draw
//! depends on the base resolution `n₀` but not on the grid it is sampled on,
//! so the same seed gives the same function on every refinement of the
//! base grid.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D, Spectrum};

/// The generator behind every seeded draw.
pub fn stream(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// A complex normal with independent components of variance `1/2`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// One band-limited field with unit `L²` norm, drawn for base resolution
/// `base_n` and sampled on `grid` (which must be at least as fine).
pub fn band_limited_field<R: Rng + ?Sized>(
    rng: &mut R,
    grid: Grid2D,
    base_n: usize,
) -> Result<Field2D> {
    let n = grid.n();
    if base_n > n || base_n < 8 {
        return Err(Error::InvalidParameter(format!(
            "base resolution {base_n} must lie in [8, {n}]"
        )));
    }
    let dk = grid.dk();
    let band = std::f64::consts::PI * base_n as f64 / (4.0 * grid.box_size());
    let m = (band / dk).floor() as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let wrap = |k: i64| k.rem_euclid(n as i64) as usize;
    for k1 in -m..=m {
        for k2 in -m..=m {
            let xi2 = dk * dk * (k1 * k1 + k2 * k2) as f64;
            if xi2 <= band * band {
                coeffs[wrap(k1) * n + wrap(k2)] = complex_normal(rng);
            }
        }
    }
    let f = Spectrum::from_coeffs(grid, coeffs).to_field();
    let norm = f.lp_norm(2.0);
    if norm == 0.0 {
        return Err(Error::InvalidParameter("empty frequency band".into()));
    }
    Ok(f.scale_real(1.0 / norm))
}

/// `count` consecutive band-limited draws from the stream seeded by `seed`.
pub fn ensemble(seed: u64, count: usize, grid: Grid2D, base_n: usize) -> Result<Vec<Field2D>> {
    let mut rng = stream(seed);
    (0..count)
        .map(|_| band_limited_field(&mut rng, grid, base_n))
        .collect()
}
