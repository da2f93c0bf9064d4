//! Measurement building blocks shared by the batch driver and the
//! acceptance suite: algebraic residuals of the resolvent, the norm ratios of
//! the kernel-split operators over an ensemble, and refinement statistics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D};
use crate::kernel_split::gamma_batch;
use crate::point_laplacian::{green_field, PointLaplacian};
use crate::quadrature::QuadratureRule;
use crate::special_fn::phi0_unchecked;

/// `‖a − b‖₂ / ‖b‖₂`, or `‖a‖₂` when `b = 0`.
pub fn relative_l2(a: &Field2D, b: &Field2D) -> Result<f64> {
    let diff = a.sub(b)?.lp_norm(2.0);
    let den = b.lp_norm(2.0);
    Ok(if den == 0.0 { diff } else { diff / den })
}

/// `|new − old| / |old|`.
pub fn relative_change(old: f64, new: f64) -> f64 {
    (new - old).abs() / old.abs()
}

/// Relative residual of `R(z₁) − R(z₂) = (z₂ − z₁)R(z₁)R(z₂)` on `f`.
pub fn first_resolvent_identity(lap: &PointLaplacian, z1: Complex64, z2: Complex64, f: &Field2D) -> Result<f64> {
    let lhs = lap.resolvent(z1, f)?.sub(&lap.resolvent(z2, f)?)?;
    let rhs = lap.resolvent(z1, &lap.resolvent(z2, f)?)?.scale(z2 - z1);
    relative_l2(&lhs, &rhs)
}

/// `|⟨d, G⟩| / (‖d‖ ‖G‖)` for `d = R(ω)f − R₀(ω)f` and the lattice Green
/// function `G = G_ω`; equals one when the difference is rank one along `G`.
pub fn rank_one_alignment(lap: &PointLaplacian, omega: Complex64, f: &Field2D) -> Result<f64> {
    let d = lap.resolvent(omega, f)?.sub(&lap.free_resolvent(omega, f)?)?;
    let g = crate::point_laplacian::lattice_green(omega, *lap.grid())?;
    Ok(d.pairing(&g)?.norm() / (d.lp_norm(2.0) * g.lp_norm(2.0)))
}

/// Per-ensemble maxima of the kernel-split norm ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaRatios {
    /// `(p, max ‖Γf‖_{H^{1,p}} / ‖f‖_{L^p})`.
    pub gamma: Vec<(f64, f64)>,
    /// `(q, max ‖Γ₀f‖_{L^q} / ‖f‖_{L^q})`.
    pub gamma0: Vec<(f64, f64)>,
    /// `(p, max ‖Γ₁f‖_{H^{1,p}} / ‖f‖_{L^p})`.
    pub gamma1: Vec<(f64, f64)>,
    /// `(p, max |C(f)| / ‖f‖_{L^p})`.
    pub coeff: Vec<(f64, f64)>,
}

impl GammaRatios {
    /// Every ratio as a `(label, value)` list in a fixed order.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (tag, list) in [
            ("gamma_h1p", &self.gamma),
            ("gamma0_lq", &self.gamma0),
            ("gamma1_h1p", &self.gamma1),
            ("c_lp", &self.coeff),
        ] {
            for &(p, v) in list {
                out.push((format!("{tag}_p{p}"), v));
            }
        }
        out
    }
}

/// Norm ratios of `Γ`, `Γ₀`, `Γ₁` and `C` over `fields`, each reduced to its
/// ensemble maximum.
pub fn gamma_ratios(
    lap: &PointLaplacian,
    fields: &[Field2D],
    rule: &QuadratureRule,
    gamma_ps: &[f64],
    gamma0_qs: &[f64],
    gamma1_ps: &[f64],
) -> Result<GammaRatios> {
    if fields.is_empty() {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let outs = gamma_batch(lap, fields, rule)?;
    let coeffs = fields
        .iter()
        .map(|f| lap.c_functional(1.0, f, rule))
        .collect::<Result<Vec<_>>>()?;
    let max_over = |ps: &[f64], ratio: &dyn Fn(usize, f64) -> f64| -> Vec<(f64, f64)> {
        ps.iter()
            .map(|&p| (p, (0..fields.len()).map(|k| ratio(k, p)).fold(0.0, f64::max)))
            .collect()
    };
    Ok(GammaRatios {
        gamma: max_over(gamma_ps, &|k, p| outs[k].gamma.sobolev_norm_1p(p) / fields[k].lp_norm(p)),
        gamma0: max_over(gamma0_qs, &|k, q| outs[k].gamma0.lp_norm(q) / fields[k].lp_norm(q)),
        gamma1: max_over(gamma1_ps, &|k, p| outs[k].gamma1.sobolev_norm_1p(p) / fields[k].lp_norm(p)),
        coeff: max_over(gamma_ps, &|k, p| coeffs[k].norm() / fields[k].lp_norm(p)),
    })
}

/// `‖𝔾_ω‖_{H^{1,p}}` of the sampled continuum Green function.
pub fn green_witness(grid: Grid2D, omega: f64, p: f64) -> Result<f64> {
    Ok(green_field(Complex64::new(omega, 0.0), grid)?.sobolev_norm_1p(p))
}

/// `‖φ₀‖_{H^{1,p}}` of the sampled singular profile.
pub fn phi0_witness(grid: Grid2D, p: f64) -> Result<f64> {
    Ok(Field2D::from_radial(grid, phi0_unchecked)?.sobolev_norm_1p(p))
}

/// Error reduction under one refinement step, `e_coarse / e_fine`.
pub fn convergence_factor(coarse_error: f64, fine_error: f64) -> f64 {
    coarse_error / fine_error
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_laplacian::PointInteraction;

    #[test]
    fn identity_and_alignment_on_small_grid() {
        let g = Grid2D::new(32, 10.0).unwrap();
        let lap = PointLaplacian::new(PointInteraction::new(0.2).unwrap(), g).unwrap();
        let f = Field2D::from_fn(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), x * 0.1)).unwrap();
        let z1 = Complex64::new(2.0, 0.0);
        let z2 = Complex64::new(1.0, 3.0);
        assert!(first_resolvent_identity(&lap, z1, z2, &f).unwrap() < 1e-12);
        assert!(rank_one_alignment(&lap, z2, &f).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn relative_helpers() {
        assert_eq!(relative_change(2.0, 3.0), 0.5);
        assert_eq!(convergence_factor(4.0, 1.0), 4.0);
        let g = Grid2D::new(16, 4.0).unwrap();
        let z = Field2D::zeros(g);
        assert_eq!(relative_l2(&z, &z).unwrap(), 0.0);
    }
}
