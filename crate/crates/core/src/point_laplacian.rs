//! The point-interaction Laplacian `Δ_α`: the scalar `β_α(ω)`, Green
//! functions, the rank-one resolvent, the inverse square root and the
//! regular/singular decomposition of domain elements.
//!
//! # Discrete model
//!
//! On the grid the free Laplacian `Δ_h` is the spectral one, and its Green
//! function is the lattice field
//! `G_ω(x) = L^{−2} Σ_ξ e^{iξ·x}/(ω + |ξ|²)`, so that `(ω − Δ_h)G_ω = h^{−2}δ₀`.
//! The perturbed operator is
//!
//! ```text
//! H u = Δ_h u + h^{−2} δ₀ u(0) / κ,
//! ```
//!
//! whose resolvent is exactly `(ω − H)^{−1}f = (ω − Δ_h)^{−1}f + G_ω·B(f, G_ω)/β_h(ω)`
//! with `β_h(ω) = κ − G_ω(0)` and `B` the unconjugated pairing. The constant
//! `κ` is fixed so that `β_h` agrees with the continuum `β_α` at a reference
//! frequency `ω_ref`. Whenever the grid resolves the bound state, `ω_ref = ω₀`
//! and the discrete eigenvalue is exactly `ω₀`; otherwise `ω₀` is clamped into
//! the window `[(20/L)², (π/h)²/100]` where both box and lattice effects on
//! `G_ω(0)` are negligible.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D, Spectrum};
use crate::quadrature::QuadratureRule;
use crate::special_fn::{bessel_k0, k0_real, EULER_GAMMA};
use crate::sum::pairwise_map;

/// `|β| below this is treated as a pole of the resolvent.
pub const POLE_THRESHOLD: f64 = 1e-10;

/// Relative tolerance of the domain-membership check `c = g(0)/β(ω)`.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-6;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The coupling `α` together with the bound-state frequency
/// `ω₀ = 4·exp(−4πα − 2γ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointInteraction {
    alpha: f64,
    omega0: f64,
}

/// `ω₀(α) = 4·exp(−4πα − 2γ)`.
pub fn bound_state_omega(alpha: f64) -> f64 {
    4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp()
}

fn check_cut(omega: Complex64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("spectral parameter"));
    }
    if omega.im == 0.0 && omega.re <= 0.0 {
        return Err(Error::BranchCut(omega.to_string()));
    }
    Ok(())
}

impl PointInteraction {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
        }
        Ok(PointInteraction {
            alpha,
            omega0: bound_state_omega(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// `β_α(ω) = α + γ/(2π) + (2π)^{−1} log(√ω/2)` on the principal branch.
    pub fn beta(&self, omega: Complex64) -> Result<Complex64> {
        check_cut(omega)?;
        let log_sqrt = 0.5 * omega.ln();
        Ok(self.alpha + EULER_GAMMA / (2.0 * PI) + (log_sqrt - 2f64.ln()) / (2.0 * PI))
    }

    pub fn beta_real(&self, omega: f64) -> Result<f64> {
        self.beta(Complex64::new(omega, 0.0)).map(|b| b.re)
    }

    /// `dβ/dω = (4πω)^{−1}`.
    pub fn beta_derivative(&self, omega: f64) -> f64 {
        1.0 / (4.0 * PI * omega)
    }
}

/// The continuum Green function `(2π)^{−1}K₀(√ω·r)` sampled at
/// `r = max(|x|, h/2)`.
pub fn green_field(omega: Complex64, grid: Grid2D) -> Result<Field2D> {
    check_cut(omega)?;
    let root = omega.sqrt();
    let radii = grid.slot_radii();
    let mut per_slot = Vec::with_capacity(radii.len());
    for r in radii {
        let v = if root.im == 0.0 {
            Complex64::new(k0_real(root.re * r), 0.0)
        } else {
            bessel_k0(root * r)?.value
        };
        per_slot.push(v / (2.0 * PI));
    }
    Ok(Field2D::from_slot_values(grid, &per_slot))
}

/// Spectrum of the lattice Green function `G_ω`.
fn lattice_green_spectrum(omega: Complex64, grid: Grid2D) -> Spectrum {
    let t = grid.tables();
    let h_inv2 = 1.0 / grid.cell();
    let per_slot: Vec<Complex64> = grid
        .slot_xi2()
        .into_iter()
        .map(|x| h_inv2 / (omega + x))
        .collect();
    let coeffs = (0..grid.len())
        .map(|i| per_slot[t.slot_freq[i] as usize] * t.parity(i))
        .collect();
    Spectrum::from_coeffs(grid, coeffs)
}

/// The lattice Green function `G_ω` of the spectral Laplacian, solving
/// `(ω − Δ_h)G_ω = h^{−2}δ₀` on the periodic grid.
pub fn lattice_green(omega: Complex64, grid: Grid2D) -> Result<Field2D> {
    check_cut(omega)?;
    Ok(lattice_green_spectrum(omega, grid).to_field())
}

/// `G_ω(0) = L^{−2} Σ_ξ (ω + |ξ|²)^{−1}`.
pub fn lattice_green_origin(omega: Complex64, grid: Grid2D) -> Complex64 {
    let t = grid.tables();
    let xi2 = grid.slot_xi2();
    let s = pairwise_map(xi2.len(), |i| t.counts[i] as f64 / (omega + xi2[i]));
    s / grid.box_size().powi(2)
}

/// `B(f, G_s)` for every shift `s`, from the slot sums of `f`'s spectrum.
fn green_pairing(slot_sums: &[Complex64], xi2: &[f64], n2: f64, s: Complex64) -> Complex64 {
    pairwise_map(xi2.len(), |i| slot_sums[i] / (s + xi2[i])) / n2
}

/// A field represented as `g + c·G_ω` with `g` regular.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub regular: Field2D,
    pub coeff: Complex64,
    pub omega: f64,
}

impl Decomposition {
    pub fn new(regular: Field2D, coeff: Complex64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "decomposition frequency must be positive, got {omega}"
            )));
        }
        if !coeff.is_finite() {
            return Err(Error::NonFinite("decomposition coefficient"));
        }
        Ok(Decomposition {
            regular,
            coeff,
            omega,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        self.regular.grid()
    }

    /// `g + c·G_ω`.
    pub fn assemble(&self) -> Field2D {
        let grid = *self.grid();
        if self.coeff == Complex64::new(0.0, 0.0) {
            return self.regular.clone();
        }
        let g = lattice_green_spectrum(Complex64::new(self.omega, 0.0), grid).to_field();
        self.regular
            .lincomb(ONE, &g, self.coeff)
            .expect("decomposition parts share one grid")
    }

    /// `(‖g‖²_{H¹} + |c|²)^{1/2}` with the `p = 2` Sobolev norm of `g`.
    pub fn h1_alpha_norm(&self) -> f64 {
        self.regular.sobolev_norm_1p(2.0).hypot(self.coeff.norm())
    }
}

/// `Δ_α` on a grid.
#[derive(Clone, Debug)]
pub struct PointLaplacian {
    interaction: PointInteraction,
    grid: Grid2D,
    omega_ref: f64,
    kappa: f64,
}

impl PointLaplacian {
    pub fn new(interaction: PointInteraction, grid: Grid2D) -> Result<Self> {
        let lo = (20.0 / grid.box_size()).powi(2);
        let hi = (grid.band_limit().powi(2) / 100.0).max(lo);
        let omega_ref = interaction.omega0().max(lo).min(hi);
        let kappa = interaction.beta_real(omega_ref)?
            + lattice_green_origin(Complex64::new(omega_ref, 0.0), grid).re;
        if !kappa.is_finite() || kappa.abs() < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "degenerate lattice coupling kappa = {kappa}"
            )));
        }
        Ok(PointLaplacian {
            interaction,
            grid,
            omega_ref,
            kappa,
        })
    }

    pub fn interaction(&self) -> &PointInteraction {
        &self.interaction
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Frequency at which `β_h` equals the continuum `β_α`.
    pub fn reference_omega(&self) -> f64 {
        self.omega_ref
    }

    /// Lattice coupling `κ` in `β_h(ω) = κ − G_ω(0)`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `β_h(ω) = κ − G_ω(0)`.
    pub fn beta_h(&self, omega: Complex64) -> Result<Complex64> {
        check_cut(omega)?;
        Ok(self.kappa - lattice_green_origin(omega, self.grid))
    }

    fn nonsingular_beta(&self, omega: Complex64) -> Result<Complex64> {
        let b = self.beta_h(omega)?;
        if b.norm() < POLE_THRESHOLD {
            return Err(Error::Pole {
                omega: omega.to_string(),
                magnitude: b.norm(),
            });
        }
        Ok(b)
    }

    fn check_grid(&self, f: &Field2D) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// The bound state `G_{ω₀}` of the discrete operator.
    pub fn bound_state(&self) -> Result<Field2D> {
        lattice_green(Complex64::new(self.interaction.omega0(), 0.0), self.grid)
    }

    /// `(ω − Δ_h)^{−1}f`.
    pub fn free_resolvent(&self, omega: Complex64, f: &Field2D) -> Result<Field2D> {
        check_cut(omega)?;
        self.check_grid(f)?;
        Ok(f.spectrum()
            .radial_multiply(|x| ONE / (omega + x))
            .to_field())
    }

    /// `(ω − H)^{−1}` applied to a spectrum.
    pub(crate) fn resolvent_spectrum(&self, omega: Complex64, f: &Spectrum) -> Result<Spectrum> {
        let beta = self.nonsingular_beta(omega)?;
        let t = self.grid.tables();
        let xi2 = self.grid.slot_xi2();
        let n2 = self.grid.len() as f64;
        let pair = green_pairing(&f.slot_sums(), &xi2, n2, omega);
        let c = pair / beta / self.grid.cell();
        let inv: Vec<Complex64> = xi2.iter().map(|&x| ONE / (omega + x)).collect();
        let coeffs = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &fk)| inv[t.slot_freq[i] as usize] * (fk + c * t.parity(i)))
            .collect();
        Ok(Spectrum::from_coeffs(self.grid, coeffs))
    }

    /// `(ω − Δ_α)^{−1}f = (ω − Δ)^{−1}f + G_ω·B(f, G_ω)/β(ω)`.
    pub fn resolvent(&self, omega: Complex64, f: &Field2D) -> Result<Field2D> {
        check_cut(omega)?;
        self.check_grid(f)?;
        Ok(self.resolvent_spectrum(omega, &f.spectrum())?.to_field())
    }

    fn check_fractional(&self, omega: f64) -> Result<Complex64> {
        if !(omega > self.interaction.omega0()) {
            return Err(Error::Domain {
                what: "fractional power needs omega > omega0",
                value: omega.to_string(),
            });
        }
        let b = self.nonsingular_beta(Complex64::new(omega, 0.0))?;
        if b.re <= 0.0 {
            return Err(Error::Domain {
                what: "omega lies below the discrete bound state",
                value: omega.to_string(),
            });
        }
        Ok(b)
    }

    /// `β_h(ω + t_i)` at every quadrature node.
    pub(crate) fn node_betas(&self, omega: f64, rule: &QuadratureRule) -> Result<Vec<f64>> {
        self.check_fractional(omega)?;
        let xi2 = self.grid.slot_xi2();
        let t = self.grid.tables();
        let area = self.grid.box_size().powi(2);
        rule.nodes()
            .iter()
            .map(|&ti| {
                let s = omega + ti;
                let g0 = pairwise_map(xi2.len(), |i| t.counts[i] as f64 / (s + xi2[i])) / area;
                let beta = self.kappa - g0;
                if beta.abs() < POLE_THRESHOLD {
                    return Err(Error::Pole {
                        omega: s.to_string(),
                        magnitude: beta.abs(),
                    });
                }
                Ok(beta)
            })
            .collect()
    }

    /// `B(f, G_{ω+t_i})` at every quadrature node.
    pub(crate) fn green_pairings(&self, omega: f64, f: &Spectrum, rule: &QuadratureRule) -> Vec<Complex64> {
        let slot_sums = f.slot_sums();
        let xi2 = self.grid.slot_xi2();
        let n2 = self.grid.len() as f64;
        rule.nodes()
            .iter()
            .map(|&ti| green_pairing(&slot_sums, &xi2, n2, Complex64::new(omega + ti, 0.0)))
            .collect()
    }

    /// Coefficients `a_i = w_i t_i^{−1/2} B(f, G_{ω+t_i}) / (π β_h(ω+t_i))`
    /// of the rank-one part of `(ω − Δ_α)^{−1/2}f`.
    pub(crate) fn rank_one_weights(
        &self,
        omega: f64,
        f: &Spectrum,
        rule: &QuadratureRule,
    ) -> Result<Vec<Complex64>> {
        let betas = self.node_betas(omega, rule)?;
        Ok(self
            .green_pairings(omega, f, rule)
            .into_iter()
            .zip(rule.effective_weights())
            .zip(betas)
            .map(|((pair, e), beta)| pair * (e / (PI * beta)))
            .collect())
    }

    /// Per-slot symbol `Σ_i a_i/(ω + t_i + |ξ|²)`.
    pub(crate) fn rank_one_symbol(
        &self,
        omega: f64,
        weights: &[Complex64],
        rule: &QuadratureRule,
    ) -> Vec<Complex64> {
        self.grid
            .slot_xi2()
            .into_iter()
            .map(|x| {
                weights
                    .iter()
                    .zip(rule.nodes())
                    .fold(Complex64::new(0.0, 0.0), |acc, (a, t)| acc + a / (omega + t + x))
            })
            .collect()
    }

    /// Spectrum of `Σ_i a_i G_{ω+t_i}`.
    pub(crate) fn rank_one_spectrum(&self, omega: f64, weights: &[Complex64], rule: &QuadratureRule) -> Spectrum {
        let t = self.grid.tables();
        let h_inv2 = 1.0 / self.grid.cell();
        let symbol = self.rank_one_symbol(omega, weights, rule);
        let coeffs = (0..self.grid.len())
            .map(|i| symbol[t.slot_freq[i] as usize] * (h_inv2 * t.parity(i)))
            .collect();
        Spectrum::from_coeffs(self.grid, coeffs)
    }

    /// `(ω − Δ_α)^{−1/2}f`: the exact free multiplier `(ω + |ξ|²)^{−1/2}` plus
    /// the rank-one part `π^{−1}∫ t^{−1/2} G_{ω+t} B(f, G_{ω+t})/β(ω+t) dt`
    /// integrated with `rule`.
    pub fn inv_sqrt(&self, omega: f64, f: &Field2D, rule: &QuadratureRule) -> Result<Field2D> {
        self.check_grid(f)?;
        let spec = f.spectrum();
        let weights = self.rank_one_weights(omega, &spec, rule)?;
        let free = spec.radial_multiply(|x| Complex64::new((omega + x).sqrt().recip(), 0.0));
        let rank_one = self.rank_one_spectrum(omega, &weights, rule);
        Ok(free.lincomb(ONE, &rank_one, ONE).to_field())
    }

    /// `C(f) = π^{−1}∫ t^{−1/2} B(f, G_{ω+t})/β(ω+t) dt`, the multiple of
    /// `G_ω` carried by `(ω − Δ_α)^{−1/2}f`.
    pub fn c_functional(&self, omega: f64, f: &Field2D, rule: &QuadratureRule) -> Result<Complex64> {
        self.check_grid(f)?;
        let weights = self.rank_one_weights(omega, &f.spectrum(), rule)?;
        Ok(weights.iter().sum())
    }

    /// The domain element `g + g(0)/β(ω)·G_ω` built on a regular `g`.
    pub fn domain_element(&self, regular: Field2D, omega: f64) -> Result<Decomposition> {
        self.check_grid(&regular)?;
        let beta = self.nonsingular_beta(Complex64::new(omega, 0.0))?;
        let coeff = regular.at_origin() / beta;
        Decomposition::new(regular, coeff, omega)
    }

    /// `(ω − Δ_α)φ = (ω − Δ)g` for `φ = g + c·G_ω` in the operator domain.
    pub fn apply_forward(&self, omega: f64, d: &Decomposition) -> Result<Field2D> {
        self.check_grid(&d.regular)?;
        if d.omega != omega {
            return Err(Error::InvalidParameter(format!(
                "decomposition is relative to G_{}, not G_{omega}",
                d.omega
            )));
        }
        let beta = self.nonsingular_beta(Complex64::new(omega, 0.0))?;
        let expected = d.regular.at_origin() / beta;
        let gap = (d.coeff - expected).norm();
        if gap > MEMBERSHIP_TOLERANCE * d.coeff.norm().max(expected.norm()) || (gap > 0.0 && expected == Complex64::new(0.0, 0.0)) {
            return Err(Error::DomainMembership {
                coeff: d.coeff.to_string(),
                expected: expected.to_string(),
            });
        }
        Ok(d.regular
            .spectrum()
            .radial_multiply(|x| Complex64::new(omega + x, 0.0))
            .to_field())
    }

    /// `H u = Δ_h u + h^{−2}δ₀ u(0)/κ`.
    pub fn apply(&self, u: &Field2D) -> Result<Field2D> {
        self.check_grid(u)?;
        let lap = u
            .spectrum()
            .radial_multiply(|x| Complex64::new(-x, 0.0))
            .to_field();
        let mut values = lap.into_values();
        values[self.grid.origin_index()] += u.at_origin() / (self.kappa * self.grid.cell());
        Field2D::new(self.grid, values)
    }

    /// `⟨−H u, u⟩ = h²Σ|∇u|² − |u(0)|²/κ`.
    pub fn quadratic_form(&self, u: &Field2D) -> Result<f64> {
        self.check_grid(u)?;
        Ok(u.spectrum().dirichlet_form() - u.at_origin().norm_sqr() / self.kappa)
    }
}
