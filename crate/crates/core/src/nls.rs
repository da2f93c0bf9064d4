//! The nonlinear Schrödinger equation `i∂_t u = −Δ_α u + μ|u|^{p−1}u`.
//!
//! Two discretizations are provided. [`strang_step`] splits the linear
//! Cayley step and the exact pointwise phase rotation. [`picard_solve`]
//! iterates the Duhamel map
//!
//! ```text
//! 𝔎(u)(t) = e^{itΔ_α}u₀ − i∫₀ᵗ e^{i(t−s)Δ_α} μ|u|^{p−1}u(s) ds
//! ```
//!
//! on a uniform mesh, with the time integral done by the trapezoid rule.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Field2D, Grid2D};
use crate::point_laplacian::{Decomposition, PointLaplacian};
use crate::propagator::{CayleyStep, TimeGrid};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Residual ratios above this count as a failure to contract.
pub const NON_CONTRACTION_RATIO: f64 = 0.95;
/// This many consecutive non-contracting ratios abort the iteration.
pub const NON_CONTRACTION_STREAK: usize = 3;

/// An initial-value problem for the NLS with a point interaction.
#[derive(Clone, Debug)]
pub struct NlsProblem {
    lap: PointLaplacian,
    p: f64,
    mu: i32,
    /// Multiplies the nonlinearity; `1` is the equation proper, `0` the
    /// linear flow.
    pub strength: f64,
    u0: Field2D,
}

impl NlsProblem {
    pub fn new(lap: PointLaplacian, p: f64, mu: i32, u0: Field2D) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("power p must exceed 1, got {p}")));
        }
        if mu * mu != 1 {
            return Err(Error::InvalidParameter(format!("sign mu must be ±1, got {mu}")));
        }
        if u0.grid() != lap.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(NlsProblem {
            lap,
            p,
            mu,
            strength: 1.0,
            u0,
        })
    }

    /// Same as [`NlsProblem::new`] with initial data `g + c·G_ω`.
    pub fn from_decomposition(lap: PointLaplacian, p: f64, mu: i32, d: &Decomposition) -> Result<Self> {
        Self::new(lap, p, mu, d.assemble())
    }

    pub fn with_strength(mut self, strength: f64) -> Self {
        self.strength = strength;
        self
    }

    pub fn laplacian(&self) -> &PointLaplacian {
        &self.lap
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> i32 {
        self.mu
    }

    pub fn initial(&self) -> &Field2D {
        &self.u0
    }

    /// The effective coefficient `strength·μ` in front of `|u|^{p−1}u`.
    pub fn coupling(&self) -> f64 {
        self.strength * self.mu as f64
    }

    fn nonlinearity(&self, u: &Field2D) -> Field2D {
        let (c, e) = (self.coupling(), self.p - 1.0);
        u.map(|z| {
            let m = z.norm();
            if m == 0.0 {
                z
            } else {
                z * (c * m.powf(e))
            }
        })
    }
}

/// Per-time-node diagnostics of a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverTrace {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub linf: Vec<f64>,
    /// `‖u^{(k+1)} − u^{(k)}‖_{L^∞_t L²_x}` per Picard iteration; empty for
    /// splitting runs.
    pub picard_residuals: Vec<f64>,
}

impl SolverTrace {
    fn record(&mut self, prob: &NlsProblem, t: f64, u: &Field2D) -> Result<()> {
        self.times.push(t);
        self.mass.push(mass(u));
        self.energy.push(field_energy(prob, u)?);
        self.linf.push(u.lp_norm(f64::INFINITY));
        Ok(())
    }

    /// Largest `|m(t) − m(0)|/m(0)`.
    pub fn max_mass_drift(&self) -> f64 {
        relative_drift(&self.mass)
    }

    /// Largest `|E(t) − E(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    /// Successive Picard residual ratios.
    pub fn residual_ratios(&self) -> Vec<f64> {
        self.picard_residuals
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// Largest residual ratio among iterations whose residuals both exceed
    /// `floor`; ratios taken at the rounding floor carry no information.
    pub fn contraction_ratio(&self, floor: f64) -> Option<f64> {
        self.picard_residuals
            .windows(2)
            .filter(|w| w[0] > floor && w[1] > floor)
            .map(|w| w[1] / w[0])
            .reduce(f64::max)
    }
}

fn relative_drift(values: &[f64]) -> f64 {
    let Some(&v0) = values.first() else { return 0.0 };
    if v0 == 0.0 {
        return values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    }
    values.iter().map(|v| (v - v0).abs() / v0.abs()).fold(0.0, f64::max)
}

/// Exact flow of `i∂_t u = μ|u|^{p−1}u`: `u ↦ u·exp(−iμ|u|^{p−1}τ)`.
pub fn nonlinear_phase(u: &Field2D, tau: f64, p: f64, mu: f64) -> Field2D {
    let e = p - 1.0;
    u.map(|z| {
        let m = z.norm();
        if m == 0.0 {
            return z;
        }
        z * Complex64::from_polar(1.0, -mu * m.powf(e) * tau)
    })
}

/// A Strang step of fixed size, reusable along a trajectory.
#[derive(Clone, Debug)]
pub struct StrangStepper<'a> {
    prob: &'a NlsProblem,
    linear: CayleyStep,
    tau: f64,
}

impl<'a> StrangStepper<'a> {
    pub fn new(prob: &'a NlsProblem, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {tau}")));
        }
        Ok(StrangStepper {
            prob,
            linear: CayleyStep::new(&prob.lap, tau)?,
            tau,
        })
    }

    pub fn step(&self, u: &Field2D) -> Result<Field2D> {
        let (p, c) = (self.prob.p, self.prob.coupling());
        let half = nonlinear_phase(u, self.tau / 2.0, p, c);
        let lin = self.linear.apply(&half)?;
        Ok(nonlinear_phase(&lin, self.tau / 2.0, p, c))
    }
}

/// `nonlinear_phase(τ/2) ∘ cn_step(τ) ∘ nonlinear_phase(τ/2)`.
pub fn strang_step(prob: &NlsProblem, u: &Field2D, tau: f64) -> Result<Field2D> {
    StrangStepper::new(prob, tau)?.step(u)
}

/// Runs Strang splitting over `tg`, recording every `record_every`-th node
/// (and the last one). Returns the terminal state and the trace.
pub fn strang_solve(prob: &NlsProblem, tg: &TimeGrid, record_every: usize) -> Result<(Field2D, SolverTrace)> {
    let stepper = StrangStepper::new(prob, tg.tau())?;
    let every = record_every.max(1);
    let mut trace = SolverTrace::default();
    let mut u = prob.u0.clone();
    trace.record(prob, 0.0, &u)?;
    for k in 1..=tg.n_steps() {
        u = stepper.step(&u)?;
        if k % every == 0 || k == tg.n_steps() {
            trace.record(prob, k as f64 * tg.tau(), &u)?;
        }
    }
    Ok((u, trace))
}

/// `‖u‖²_{L²}`.
pub fn mass(u: &Field2D) -> f64 {
    u.lp_norm(2.0).powi(2)
}

fn potential_energy(prob: &NlsProblem, u: &Field2D) -> f64 {
    let q = prob.p + 1.0;
    prob.coupling() / q * u.lp_norm(q).powf(q)
}

/// `E = ½‖(ω − Δ_α)^{1/2}u‖² − (ω/2)‖u‖² + μ/(p+1)‖u‖^{p+1}_{p+1}` for
/// `u = g + c·G_ω`, with the quadratic form taken as `⟨(ω − Δ_α)u, u⟩`.
pub fn energy(prob: &NlsProblem, d: &Decomposition, omega: f64) -> Result<f64> {
    let forward = prob.lap.apply_forward(omega, d)?;
    let u = d.assemble();
    let quad = forward.pairing(&u)?.re;
    Ok(0.5 * quad - 0.5 * omega * mass(&u) + potential_energy(prob, &u))
}

/// The energy of a plain grid function, `½⟨−Δ_α u, u⟩ + μ/(p+1)‖u‖^{p+1}_{p+1}`.
/// On the lattice every grid function lies in the form domain, so the
/// quadratic form is evaluated directly.
pub fn field_energy(prob: &NlsProblem, u: &Field2D) -> Result<f64> {
    Ok(0.5 * prob.lap.quadratic_form(u)? + potential_energy(prob, u))
}

/// Fixed-point iteration of the Duhamel map on `n_time_nodes` equispaced
/// nodes of `[0, T]`. Returns the trajectory at every node and the trace.
pub fn picard_solve(
    prob: &NlsProblem,
    t_final: f64,
    n_time_nodes: usize,
    max_iter: usize,
    tol: f64,
) -> Result<(Vec<Field2D>, SolverTrace)> {
    if n_time_nodes < 2 {
        return Err(Error::InvalidParameter("Picard needs at least two time nodes".into()));
    }
    if max_iter == 0 || !(tol > 0.0) {
        return Err(Error::InvalidParameter("max_iter ≥ 1 and tol > 0 are required".into()));
    }
    let tg = TimeGrid::new(t_final, n_time_nodes - 1)?;
    let tau = tg.tau();
    let step = CayleyStep::new(&prob.lap, tau)?;
    let mut linear = Vec::with_capacity(n_time_nodes);
    let mut spec = prob.u0.spectrum();
    linear.push(prob.u0.clone());
    for _ in 1..n_time_nodes {
        spec = step.apply_spectrum(&spec);
        linear.push(spec.to_field());
    }
    let scale = linear[0].lp_norm(2.0).max(f64::MIN_POSITIVE);
    let half = Complex64::new(tau / 2.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);

    let mut current = linear.clone();
    let mut residuals = Vec::new();
    let mut streak = 0;
    for _ in 0..max_iter {
        let mut next = Vec::with_capacity(n_time_nodes);
        next.push(linear[0].clone());
        let mut prev_n = prob.nonlinearity(&current[0]);
        let mut integral = Field2D::zeros(*prob.u0.grid());
        for k in 1..n_time_nodes {
            let n_k = prob.nonlinearity(&current[k]);
            let carried = step.apply(&integral.lincomb(ONE, &prev_n, half)?)?;
            integral = carried.lincomb(ONE, &n_k, half)?;
            next.push(linear[k].lincomb(ONE, &integral, minus_i)?);
            prev_n = n_k;
        }
        let res = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.sub(b).map(|d| d.lp_norm(2.0)))
            .try_fold(0.0, |m: f64, d| d.map(|d| m.max(d)))?;
        if let Some(&last) = residuals.last() {
            let ratio = if last > 0.0 { res / last } else { 0.0 };
            streak = if ratio > NON_CONTRACTION_RATIO { streak + 1 } else { 0 };
        }
        residuals.push(res);
        current = next;
        if res <= tol * scale {
            let mut trace = SolverTrace::default();
            for (k, u) in current.iter().enumerate() {
                trace.record(prob, k as f64 * tau, u)?;
            }
            trace.picard_residuals = residuals;
            return Ok((current, trace));
        }
        if streak >= NON_CONTRACTION_STREAK {
            let ratios = residuals.windows(2).map(|w| w[1] / w[0]).collect();
            return Err(Error::NonContraction { ratios });
        }
    }
    Err(Error::ToleranceNotMet {
        tol,
        iterations: max_iter,
        residual: residuals.last().copied().unwrap_or(f64::NAN) / scale,
    })
}

/// `S_λu(x) = λ^{−1}u(x/λ)`, living on the box of side `λL` with the same
/// number of nodes, so no interpolation is needed.
pub fn rescale_field(u: &Field2D, lambda: f64) -> Result<Field2D> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let g = u.grid();
    let grid = Grid2D::new(g.n(), lambda * g.box_size())?;
    Field2D::new(grid, u.scale_real(1.0 / lambda).into_values())
}

/// `α̃ = α + ln(ω)/(4π)`, for which `β_α(ω) = β_α̃(1)`.
pub fn rescale_alpha(alpha: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    Ok(alpha + omega.ln() / (4.0 * std::f64::consts::PI))
}

/// Exponents of `λ` picked up under `S_λ` by the kinetic and the nonlinear
/// energy terms relative to the mass: `(−2, 1 − p)`.
pub fn scaling_exponents(p: f64) -> (f64, f64) {
    (-2.0, 1.0 - p)
}

/// Whether the two scaling exponents coincide (`p = 3` in two dimensions).
pub fn is_mass_critical(p: f64) -> bool {
    let (kinetic, nonlinear) = scaling_exponents(p);
    kinetic == nonlinear
}

/// `‖g + c·G_ω‖_{L^q} / ‖(g, c)‖_{H¹_α}`.
pub fn sobolev_embedding_check(d: &Decomposition, q: f64) -> Result<f64> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("embedding exponent must lie in (2, ∞), got {q}")));
    }
    let den = d.h1_alpha_norm();
    if den == 0.0 {
        return Err(Error::Domain {
            what: "embedding ratio of the zero element",
            value: "0".into(),
        });
    }
    Ok(d.assemble().lp_norm(q) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_laplacian::PointInteraction;
    use crate::propagator::cn_step;

    fn lap(n: usize, l: f64) -> PointLaplacian {
        PointLaplacian::new(PointInteraction::new(0.0).unwrap(), Grid2D::new(n, l).unwrap()).unwrap()
    }

    fn gaussian(g: Grid2D) -> Field2D {
        let a = (2.0 / std::f64::consts::PI).sqrt();
        Field2D::from_fn(g, |x, y| Complex64::new(a * (-(x * x + y * y)).exp(), 0.0)).unwrap()
    }

    #[test]
    fn phase_examples() {
        let g = Grid2D::new(16, 10.0).unwrap();
        assert!(nonlinear_phase(&Field2D::zeros(g), 1.0, 3.0, 1.0).is_zero());
        let one = Field2D::constant(g, ONE);
        let out = nonlinear_phase(&one, std::f64::consts::PI, 3.0, 1.0);
        assert!(out.values().iter().all(|z| (z + 1.0).norm() < 1e-15));
        let u = gaussian(g).map(|z| z * Complex64::new(0.3, -1.2));
        let v = nonlinear_phase(&u, 0.7, 2.5, -1.0);
        for (a, b) in u.values().iter().zip(v.values()) {
            assert!((a.norm() - b.norm()).abs() <= 2.0 * f64::EPSILON * a.norm());
        }
    }

    #[test]
    fn mass_examples() {
        let g = Grid2D::new(16, 10.0).unwrap();
        assert_eq!(mass(&Field2D::zeros(g)), 0.0);
        assert!((mass(&Field2D::constant(g, ONE)) - 100.0).abs() < 1e-12);
        let m = mass(&gaussian(Grid2D::new(128, 20.0).unwrap()));
        assert!((m - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strang_small_data_is_linear() {
        let l = lap(64, 16.0);
        let u = gaussian(*l.grid()).scale_real(1e-6);
        let prob = NlsProblem::new(l.clone(), 3.0, 1, u.clone()).unwrap();
        let a = strang_step(&prob, &u, 0.01).unwrap();
        let b = cn_step(&l, &u, 0.01).unwrap();
        assert!(a.sub(&b).unwrap().lp_norm(2.0) / b.lp_norm(2.0) < 1e-8);
        let z = Field2D::zeros(*l.grid());
        assert!(strang_step(&prob, &z, 0.01).unwrap().is_zero());
        assert!((mass(&a) / mass(&u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_of_decomposition_matches_field_energy() {
        let l = lap(64, 16.0);
        let g = *l.grid();
        let d = l.domain_element(gaussian(g), 1.0).unwrap();
        let prob = NlsProblem::from_decomposition(l.clone(), 3.0, -1, &d).unwrap();
        let a = energy(&prob, &d, 1.0).unwrap();
        let b = field_energy(&prob, &d.assemble()).unwrap();
        assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{a} {b}");
        let zero = Decomposition::new(Field2D::zeros(g), Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert_eq!(energy(&prob, &zero, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn picard_linear_limit_converges_at_once() {
        let l = lap(64, 16.0);
        let u = gaussian(*l.grid());
        let prob = NlsProblem::new(l.clone(), 3.0, 1, u.clone()).unwrap().with_strength(0.0);
        let (traj, trace) = picard_solve(&prob, 0.1, 11, 5, 1e-12).unwrap();
        assert_eq!(trace.picard_residuals, vec![0.0]);
        let lin = crate::propagator::propagate_steps(&l, &u, 0.01, 10).unwrap();
        assert!(traj[10].sub(&lin[10]).unwrap().lp_norm(2.0) < 1e-12);
    }

    #[test]
    fn picard_contracts_and_agrees_with_strang() {
        let l = lap(64, 16.0);
        let u = gaussian(*l.grid());
        let prob = NlsProblem::new(l, 2.0, 1, u).unwrap();
        let (traj, trace) = picard_solve(&prob, 0.05, 21, 40, 1e-12).unwrap();
        assert!(trace.contraction_ratio(1e-13).unwrap() <= 0.5);
        let (end, _) = strang_solve(&prob, &TimeGrid::new(0.05, 20).unwrap(), 1).unwrap();
        let err = end.sub(&traj[20]).unwrap().lp_norm(2.0) / end.lp_norm(2.0);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn rescaling() {
        let u = gaussian(Grid2D::new(64, 16.0).unwrap());
        assert_eq!(rescale_field(&u, 1.0).unwrap(), u);
        let v = rescale_field(&u, 2.0).unwrap();
        assert!((mass(&v) / mass(&u) - 1.0).abs() < 1e-14);
        assert_eq!(rescale_alpha(0.3, 1.0).unwrap(), 0.3);
        let e = (4.0 * std::f64::consts::PI).exp();
        assert!((rescale_alpha(0.3, e).unwrap() - 1.3).abs() < 1e-15);
        assert!(is_mass_critical(3.0));
        assert!(!is_mass_critical(2.0));
    }

    #[test]
    fn embedding_ratio() {
        let g = Grid2D::new(64, 16.0).unwrap();
        let zero = Decomposition::new(Field2D::zeros(g), Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!(sobolev_embedding_check(&zero, 4.0).is_err());
        let pure = Decomposition::new(Field2D::zeros(g), ONE, 1.0).unwrap();
        let r = sobolev_embedding_check(&pure, 4.0).unwrap();
        assert!((r - pure.assemble().lp_norm(4.0)).abs() < 1e-14);
    }
}
