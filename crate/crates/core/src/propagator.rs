//! The Schrödinger group `e^{itΔ_α}` by Cayley (Crank–Nicolson) steps, and
//! discrete space-time norms.
//!
//! One step is `(1 + iτΔ_α/2)(1 − iτΔ_α/2)^{−1}`. With `ω_c = 2/(iτ)` this is
//! `2v − u` for `v = (ω_c − Δ_α)^{−1}(ω_c u)`, one rank-one resolvent solve at
//! a purely imaginary spectral parameter. Because the discrete operator is
//! self-adjoint the step is unitary up to rounding.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field2D, NormKind, NormReport, Spectrum};
use crate::point_laplacian::PointLaplacian;
use crate::sum::pairwise_map;

/// A uniform time mesh `0, τ, …, n_steps·τ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    n_steps: usize,
    tau: f64,
}

impl TimeGrid {
    pub fn new(t_final: f64, n_steps: usize) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_final must be positive, got {t_final}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::InvalidParameter("n_steps must be ≥ 1".into()));
        }
        let tau = t_final / n_steps as f64;
        Ok(TimeGrid {
            t_final: tau * n_steps as f64,
            n_steps,
            tau,
        })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| k as f64 * self.tau).collect()
    }
}

/// A precomputed Cayley step of fixed size.
#[derive(Clone, Debug)]
pub struct CayleyStep {
    symbol: Vec<Complex64>,
    shift: Complex64,
    coupling: Complex64,
    xi2_len: usize,
    grid: crate::field::Grid2D,
}

impl CayleyStep {
    /// Prepares `e^{iτΔ_α}` for one step of size `tau` (negative steps run
    /// backwards in time).
    pub fn new(lap: &PointLaplacian, tau: f64) -> Result<Self> {
        if tau == 0.0 || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "time step must be finite and non-zero, got {tau}"
            )));
        }
        let grid = *lap.grid();
        let shift = Complex64::new(0.0, -2.0 / tau);
        let beta = lap.beta_h(shift)?;
        let symbol: Vec<Complex64> = grid
            .slot_xi2()
            .into_iter()
            .map(|x| (shift + x).inv())
            .collect();
        Ok(CayleyStep {
            xi2_len: symbol.len(),
            symbol,
            shift,
            coupling: 1.0 / (beta * grid.cell()),
            grid,
        })
    }

    /// One step applied to a spectrum.
    pub fn apply_spectrum(&self, u: &Spectrum) -> Spectrum {
        let t = self.grid.tables();
        let sums = u.slot_sums();
        let n2 = self.grid.len() as f64;
        let pair = pairwise_map(self.xi2_len, |i| sums[i] * self.symbol[i]) * self.shift / n2;
        let c = pair * self.coupling;
        let coeffs = u
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let m = self.symbol[t.slot_freq[i] as usize];
                2.0 * m * (self.shift * f + c * t.parity(i)) - f
            })
            .collect();
        Spectrum::from_coeffs(self.grid, coeffs)
    }

    pub fn apply(&self, u: &Field2D) -> Result<Field2D> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.apply_spectrum(&u.spectrum()).to_field())
    }
}

/// One Cayley step `(1 + iτΔ_α/2)(1 − iτΔ_α/2)^{−1}u`.
pub fn cn_step(lap: &PointLaplacian, u: &Field2D, tau: f64) -> Result<Field2D> {
    CayleyStep::new(lap, tau)?.apply(u)
}

/// `[u₀, S u₀, S² u₀, …]` with `steps + 1` entries.
pub fn propagate_steps(lap: &PointLaplacian, u0: &Field2D, tau: f64, steps: usize) -> Result<Vec<Field2D>> {
    let mut frames = vec![u0.clone()];
    if steps == 0 {
        return Ok(frames);
    }
    let step = CayleyStep::new(lap, tau)?;
    let mut spec = u0.spectrum();
    for _ in 0..steps {
        spec = step.apply_spectrum(&spec);
        frames.push(spec.to_field());
    }
    Ok(frames)
}

/// The whole trajectory on `tg`. Memory grows with `n_steps`; use
/// [`propagate_final`] or [`CayleyStep`] directly for long runs.
pub fn propagate(lap: &PointLaplacian, u0: &Field2D, tg: &TimeGrid) -> Result<Vec<Field2D>> {
    propagate_steps(lap, u0, tg.tau(), tg.n_steps())
}

/// The terminal state on `tg`, calling `visit(k, frame)` on every frame.
pub fn propagate_visit<F: FnMut(usize, &Field2D)>(
    lap: &PointLaplacian,
    u0: &Field2D,
    tg: &TimeGrid,
    mut visit: F,
) -> Result<Field2D> {
    let step = CayleyStep::new(lap, tg.tau())?;
    visit(0, u0);
    let mut spec = u0.spectrum();
    let mut frame = u0.clone();
    for k in 1..=tg.n_steps() {
        spec = step.apply_spectrum(&spec);
        frame = spec.to_field();
        visit(k, &frame);
    }
    Ok(frame)
}

pub fn propagate_final(lap: &PointLaplacian, u0: &Field2D, tg: &TimeGrid) -> Result<Field2D> {
    propagate_visit(lap, u0, tg, |_, _| {})
}

/// A space-time norm `‖u‖_{L^q_t L^r_x}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeNorm {
    pub q: f64,
    pub r: f64,
    pub value: f64,
    pub admissible: bool,
}

impl SpaceTimeNorm {
    pub fn report(&self) -> Result<NormReport> {
        NormReport::new(NormKind::Strichartz, self.r, self.value)
    }
}

/// `1/q + 1/r = 1/2` with `q ∈ (2, ∞]`.
pub fn is_admissible(q: f64, r: f64) -> bool {
    q > 2.0 && r >= 2.0 && (1.0 / q + 1.0 / r - 0.5).abs() < 1e-12
}

/// Left-endpoint rectangle rule `(τ Σ_{k<n} a_k^q)^{1/q}` over per-frame
/// spatial norms `a_k` (`n + 1` of them), or `max a_k` for `q = ∞`.
pub fn strichartz_from_norms(norms: &[f64], tau: f64, q: f64, r: f64) -> SpaceTimeNorm {
    let value = if q.is_infinite() {
        norms.iter().copied().fold(0.0, f64::max)
    } else {
        let body = &norms[..norms.len().saturating_sub(1)];
        (tau * body.iter().map(|a| a.powf(q)).sum::<f64>()).powf(1.0 / q)
    };
    SpaceTimeNorm {
        q,
        r,
        value,
        admissible: is_admissible(q, r),
    }
}

/// `‖u‖_{L^q_t L^r_x}` of a frame list on `tg`.
pub fn strichartz_norm(frames: &[Field2D], tg: &TimeGrid, q: f64, r: f64) -> Result<SpaceTimeNorm> {
    if frames.len() != tg.n_steps() + 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} frames, got {}",
            tg.n_steps() + 1,
            frames.len()
        )));
    }
    let norms: Vec<f64> = frames.iter().map(|f| f.lp_norm(r)).collect();
    Ok(strichartz_from_norms(&norms, tg.tau(), q, r))
}
