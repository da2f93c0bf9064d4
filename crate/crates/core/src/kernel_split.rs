//! Kernel-split form of `(1 − Δ_α)^{−1/2}`.
//!
//! Writing `𝔾_{1+t}(x) = φ₀(√(1+t)|x|) + R(√(1+t)|x|)` splits the rank-one
//! part of the inverse square root into three radial integral operators,
//!
//! ```text
//! Γ f(x)  = ∫ t^{−1/2} R(√(1+t)|x|)                 B(f, 𝔾_{1+t}) dt
//! Γ₀ f(x) = ∫ t^{−1/2} [φ₀(√(1+t)|x|) − φ₀(|x|)]    B(f, 𝔾_{1+t}) dt
//! Γ₁ f(x) = ∫ t^{−1/2} φ₀(√(1+t)|x|)                B(f, 𝔾_{1+t}) dt
//! ```
//!
//! which are the objects of the norm estimates. The standalone operators are
//! the estimate versions: no `1/(π β)` weight, continuum profiles `R` and
//! `φ₀` sampled with the half-cell rule, and the pairing taken against the
//! lattice Green function.
//!
//! [`lambda_decompose`] uses the same split with the `1/(π β_h)` weight and
//! with the lattice Green function in place of the continuum one
//! (`R_h = G_{1+t} − φ₀`), so that `g + C(f)·G₁` reproduces
//! [`PointLaplacian::inv_sqrt`] and `g(0) = β_h(1)·C(f)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::point_laplacian::{lattice_green, Decomposition, PointLaplacian};
use crate::quadrature::QuadratureRule;
use crate::special_fn::{phi0_unchecked, remainder_unchecked};

/// Past this argument `R = K₀/(2π)` is below `10⁻²⁷` and is dropped.
const R_NEGLIGIBLE: f64 = 60.0;

const OMEGA: f64 = 1.0;
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Γf`, `Γ₀f`, `Γ₁f` for one input, in the estimate normalization.
#[derive(Clone, Debug)]
pub struct GammaFields {
    pub gamma: Field2D,
    pub gamma0: Field2D,
    pub gamma1: Field2D,
}

/// Evaluates `Γ`, `Γ₀`, `Γ₁` for a batch of inputs on one grid, sharing the
/// kernel evaluations between them.
pub fn gamma_batch(
    lap: &PointLaplacian,
    fields: &[Field2D],
    rule: &QuadratureRule,
) -> Result<Vec<GammaFields>> {
    let grid = *lap.grid();
    for f in fields {
        if *f.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let eff = rule.effective_weights();
    let coeffs: Vec<Vec<Complex64>> = fields
        .iter()
        .map(|f| {
            lap.green_pairings(OMEGA, &f.spectrum(), rule)
                .into_iter()
                .zip(&eff)
                .map(|(p, e)| p * *e)
                .collect()
        })
        .collect();
    let scales: Vec<f64> = rule.nodes().iter().map(|t| (1.0 + t).sqrt()).collect();
    let radii = grid.slot_radii();
    let nf = fields.len();
    let mut gam = vec![vec![ZERO; radii.len()]; nf];
    let mut gam1 = vec![vec![ZERO; radii.len()]; nf];
    let mut acc_r = vec![ZERO; nf];
    let mut acc_p = vec![ZERO; nf];
    for (slot, &r) in radii.iter().enumerate() {
        acc_r.iter_mut().for_each(|a| *a = ZERO);
        acc_p.iter_mut().for_each(|a| *a = ZERO);
        for (i, &sc) in scales.iter().enumerate() {
            let s = sc * r;
            if s > R_NEGLIGIBLE {
                continue;
            }
            let kr = remainder_unchecked(s);
            let kp = if s < 2.0 { phi0_unchecked(s) } else { 0.0 };
            for (k, c) in coeffs.iter().enumerate() {
                acc_r[k] += c[i] * kr;
                acc_p[k] += c[i] * kp;
            }
        }
        for k in 0..nf {
            gam[k][slot] = acc_r[k];
            gam1[k][slot] = acc_p[k];
        }
    }
    Ok((0..nf)
        .map(|k| {
            let total: Complex64 = coeffs[k].iter().sum();
            let g0: Vec<Complex64> = radii
                .iter()
                .zip(&gam1[k])
                .map(|(&r, &v)| v - total * phi0_unchecked(r))
                .collect();
            GammaFields {
                gamma: Field2D::from_slot_values(grid, &gam[k]),
                gamma0: Field2D::from_slot_values(grid, &g0),
                gamma1: Field2D::from_slot_values(grid, &gam1[k]),
            }
        })
        .collect())
}

fn single(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<GammaFields> {
    Ok(gamma_batch(lap, std::slice::from_ref(f), rule)?.remove(0))
}

/// `Γf` at `ω = 1`.
pub fn gamma_op(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<Field2D> {
    Ok(single(lap, f, rule)?.gamma)
}

/// `Γ₀f` at `ω = 1`.
pub fn gamma0_op(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<Field2D> {
    Ok(single(lap, f, rule)?.gamma0)
}

/// `Γ₁f` at `ω = 1`.
pub fn gamma1_op(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<Field2D> {
    Ok(single(lap, f, rule)?.gamma1)
}

/// The pieces of `(1 − Δ_α)^{−1/2}f = (1 − Δ)^{−1/2}f + Γf + Γ₀f − C(f)R + C(f)G₁`
/// with the `1/(π β_h)` weight included.
#[derive(Clone, Debug)]
pub struct KernelSplit {
    pub free: Field2D,
    pub gamma: Field2D,
    pub gamma0: Field2D,
    /// `R_h = G₁ − φ₀`, the lattice remainder at `ω = 1`.
    pub remainder: Field2D,
    pub coeff: Complex64,
}

impl KernelSplit {
    /// `g = (1 − Δ)^{−1/2}f + Γf + Γ₀f − C(f)·R_h`.
    pub fn regular(&self) -> Field2D {
        let partial = self
            .free
            .add(&self.gamma)
            .and_then(|a| a.add(&self.gamma0))
            .expect("split parts share one grid");
        partial
            .lincomb(ONE, &self.remainder, -self.coeff)
            .expect("split parts share one grid")
    }

    pub fn decomposition(&self) -> Decomposition {
        Decomposition {
            regular: self.regular(),
            coeff: self.coeff,
            omega: OMEGA,
        }
    }
}

/// Splits `(1 − Δ_α)^{−1/2}f` into its kernel-split pieces.
pub fn kernel_split(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<KernelSplit> {
    let grid = *lap.grid();
    if *f.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let spec = f.spectrum();
    let weights = lap.rank_one_weights(OMEGA, &spec, rule)?;
    let coeff: Complex64 = weights.iter().sum();

    let radii = grid.slot_radii();
    let scales: Vec<f64> = rule.nodes().iter().map(|t| (1.0 + t).sqrt()).collect();
    let phi_sum: Vec<Complex64> = radii
        .iter()
        .map(|&r| {
            weights.iter().zip(&scales).fold(ZERO, |acc, (a, &sc)| {
                let s = sc * r;
                if s < 2.0 {
                    acc + a * phi0_unchecked(s)
                } else {
                    acc
                }
            })
        })
        .collect();
    let phi_here: Vec<f64> = radii.iter().map(|&r| phi0_unchecked(r)).collect();

    let free = spec
        .radial_multiply(|x| Complex64::new((OMEGA + x).sqrt().recip(), 0.0))
        .to_field();
    let green_sum = lap.rank_one_spectrum(OMEGA, &weights, rule).to_field();
    let phi_part = Field2D::from_slot_values(grid, &phi_sum);
    let gamma = green_sum.sub(&phi_part)?;
    let g0_slots: Vec<Complex64> = phi_sum
        .iter()
        .zip(&phi_here)
        .map(|(&p, &q)| p - coeff * q)
        .collect();
    let gamma0 = Field2D::from_slot_values(grid, &g0_slots);

    let green_one = lattice_green(Complex64::new(OMEGA, 0.0), grid)?;
    let phi_field = Field2D::from_slot_values(
        grid,
        &phi_here.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
    );
    let remainder = green_one.sub(&phi_field)?;
    Ok(KernelSplit {
        free,
        gamma,
        gamma0,
        remainder,
        coeff,
    })
}

/// `Λ f`: the decomposition `(1 − Δ_α)^{−1/2}f = g + C(f)·G₁`.
pub fn lambda_decompose(lap: &PointLaplacian, f: &Field2D, rule: &QuadratureRule) -> Result<Decomposition> {
    Ok(kernel_split(lap, f, rule)?.decomposition())
}
