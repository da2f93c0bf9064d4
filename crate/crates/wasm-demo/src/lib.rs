//! Browser bindings for three interactive views of the point-interaction
//! Laplacian: the radial profiles of the Green function split, the curve
//! `ω ↦ β_α(ω)` with its zero, and a cubic Schrödinger evolution on a
//! small periodic grid.
//!
//! Build with `wasm-pack build crates/wasm-demo --target web` and serve
//! `crates/wasm-demo/www`.

use deltalap::nls::{mass, nonlinear_phase, NlsProblem};
use deltalap::point_laplacian::bound_state_omega;
use deltalap::propagator::CayleyStep;
use deltalap::special_fn::{bessel_k0, phi0, remainder_r};
use deltalap::{Complex64, Field2D, Grid2D, PointInteraction, PointLaplacian};
use wasm_bindgen::prelude::*;

fn js_err(e: deltalap::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Rows `[r, K₀(r)/2π, φ₀(r), R(r)]` on `samples` equispaced radii in
/// `(0, r_max]`, flattened.
#[wasm_bindgen]
pub fn radial_profiles(r_max: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    if !(r_max > 0.0) || samples == 0 {
        return Err(JsValue::from_str("r_max must be positive and samples nonzero"));
    }
    let mut out = Vec::with_capacity(4 * samples);
    for k in 1..=samples {
        let r = r_max * k as f64 / samples as f64;
        let green = bessel_k0(Complex64::new(r, 0.0)).map_err(js_err)?.value.re / (2.0 * std::f64::consts::PI);
        out.extend([r, green, phi0(r).map_err(js_err)?, remainder_r(r).map_err(js_err)?]);
    }
    Ok(out)
}

/// Rows `[ω, β_α(ω)]` on a logarithmic grid of `samples` frequencies in
/// `[omega_min, omega_max]`, flattened.
#[wasm_bindgen]
pub fn beta_curve(alpha: f64, omega_min: f64, omega_max: f64, samples: usize) -> Result<Vec<f64>, JsValue> {
    if !(omega_min > 0.0 && omega_max > omega_min) || samples < 2 {
        return Err(JsValue::from_str("need 0 < omega_min < omega_max and at least two samples"));
    }
    let pi = PointInteraction::new(alpha).map_err(js_err)?;
    let (a, b) = (omega_min.ln(), omega_max.ln());
    let mut out = Vec::with_capacity(2 * samples);
    for k in 0..samples {
        let omega = (a + (b - a) * k as f64 / (samples - 1) as f64).exp();
        out.extend([omega, pi.beta_real(omega).map_err(js_err)?]);
    }
    Ok(out)
}

/// The frequency `ω₀` at which `β_α` vanishes.
#[wasm_bindgen]
pub fn bound_state_frequency(alpha: f64) -> f64 {
    bound_state_omega(alpha)
}

/// A Strang-split cubic evolution started from an off-centre Gaussian.
#[wasm_bindgen]
pub struct Evolution {
    linear: CayleyStep,
    u: Field2D,
    tau: f64,
    coupling: f64,
    time: f64,
}

#[wasm_bindgen]
impl Evolution {
    /// `mu` is `+1` (defocusing) or `-1` (focusing); `offset` shifts the
    /// initial Gaussian away from the interaction point along `x`.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, box_size: f64, alpha: f64, mu: i32, amplitude: f64, offset: f64, tau: f64) -> Result<Evolution, JsValue> {
        let grid = Grid2D::new(n, box_size).map_err(js_err)?;
        let lap = PointLaplacian::new(PointInteraction::new(alpha).map_err(js_err)?, grid).map_err(js_err)?;
        let u0 = Field2D::from_fn(grid, |x, y| {
            let dx = x - offset;
            Complex64::new(amplitude * (-(dx * dx + y * y)).exp(), 0.0)
        })
        .map_err(js_err)?;
        let prob = NlsProblem::new(lap, 3.0, mu, u0).map_err(js_err)?;
        let linear = CayleyStep::new(prob.laplacian(), tau).map_err(js_err)?;
        Ok(Evolution {
            linear,
            coupling: prob.coupling(),
            u: prob.initial().clone(),
            tau,
            time: 0.0,
        })
    }

    /// Advances `steps` Strang steps.
    pub fn advance(&mut self, steps: usize) -> Result<(), JsValue> {
        for _ in 0..steps {
            let half = nonlinear_phase(&self.u, self.tau / 2.0, 3.0, self.coupling);
            let lin = self.linear.apply(&half).map_err(js_err)?;
            self.u = nonlinear_phase(&lin, self.tau / 2.0, 3.0, self.coupling);
        }
        self.time += steps as f64 * self.tau;
        Ok(())
    }

    /// `|u|²` at every node, row-major.
    pub fn density(&self) -> Vec<f64> {
        self.u.values().iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn mass(&self) -> f64 {
        mass(&self.u)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn n(&self) -> usize {
        self.u.grid().n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_add_up() {
        let rows = radial_profiles(3.0, 30).unwrap();
        for row in rows.chunks(4) {
            assert!((row[1] - row[2] - row[3]).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_changes_sign_at_the_bound_state() {
        let w0 = bound_state_frequency(0.1);
        let rows = beta_curve(0.1, w0 / 4.0, w0 * 4.0, 9).unwrap();
        assert!(rows[1] * rows[17] < 0.0);
    }

    #[test]
    fn evolution_keeps_mass() {
        let mut e = Evolution::new(32, 12.0, 0.0, 1, 1.0, 1.5, 0.01).unwrap();
        let m0 = e.mass();
        e.advance(20).unwrap();
        assert!((e.mass() / m0 - 1.0).abs() < 1e-10);
        assert!((e.time() - 0.2).abs() < 1e-12);
        assert_eq!(e.density().len(), 32 * 32);
    }
}
