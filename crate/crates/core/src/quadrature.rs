//! Quadrature for half-line integrals `∫₀^∞ t^{−1/2} F(t) dt`.
//!
//! With `t = τ²` the integral becomes `2∫₀^∞ F(τ²) dτ`, which has no endpoint
//! singularity. The `τ` half-line is cut into `[0, a]`, then the doubling
//! panels `[a·2^{k−1}, a·2^k]` up to `τ_max = a·2^K`, and finally the tail
//! `[τ_max, ∞)` mapped onto `(0, 1]` by `τ = τ_max/s`. Each panel carries a
//! Gauss–Legendre rule. Here `a = √ω` for the operator shift `ω`, so the
//! panels follow the scale on which resolvent symbols `1/(ω + t + |ξ|²)`
//! vary.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 400;
pub const DEFAULT_T_MAX_FACTOR: f64 = 256.0;

/// Nodes `t_i > 0` and weights `w_i > 0` with
/// `∫₀^∞ t^{−1/2} F(t) dt ≈ Σ w_i t_i^{−1/2} F(t_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    t_max: f64,
    n_panels: usize,
    scale: f64,
}

impl QuadratureRule {
    /// Builds a rule with `n_nodes` nodes for the shift `omega`. The
    /// doubling panels stop at the first `τ_max = 2^K·√ω` with
    /// `2^K ≥ t_max_factor`; everything beyond is covered by the tail panel.
    pub fn new(n_nodes: usize, t_max_factor: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "quadrature scale must be positive, got {omega}"
            )));
        }
        if !(t_max_factor >= 1.0) || !t_max_factor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_max_factor must be ≥ 1, got {t_max_factor}"
            )));
        }
        let doublings = t_max_factor.log2().ceil() as usize;
        let n_panels = doublings + 2;
        if n_nodes < 2 * n_panels {
            return Err(Error::InvalidParameter(format!(
                "{n_nodes} nodes are too few for {n_panels} panels"
            )));
        }
        let a = omega.sqrt();
        let tau_max = a * 2f64.powi(doublings as i32);
        let mut edges = vec![0.0];
        edges.extend((0..=doublings).map(|k| a * 2f64.powi(k as i32)));

        let base = n_nodes / n_panels;
        let extra = n_nodes % n_panels;
        let per_panel = |i: usize| base + usize::from(i < extra);

        let mut nodes = Vec::with_capacity(n_nodes);
        let mut weights = Vec::with_capacity(n_nodes);
        let mut push = |tau: f64, v: f64| {
            nodes.push(tau * tau);
            weights.push(2.0 * v * tau);
        };
        for (i, w) in edges.windows(2).enumerate() {
            let (lo, hi) = (w[0], w[1]);
            for &(x, v) in legendre(per_panel(i)).as_node_weight_pairs() {
                let half = 0.5 * (hi - lo);
                push(lo + half * (x + 1.0), half * v);
            }
        }
        for &(x, v) in legendre(per_panel(n_panels - 1)).as_node_weight_pairs() {
            let s = 0.5 * (x + 1.0);
            push(tau_max / s, 0.5 * v * tau_max / (s * s));
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            t_max: tau_max * tau_max,
            n_panels,
            scale: omega,
        })
    }

    /// The default 400-node rule for the shift `omega`.
    pub fn standard(omega: f64) -> Result<Self> {
        Self::new(DEFAULT_NODES, DEFAULT_T_MAX_FACTOR, omega)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// End of the last finite panel in `t`; the tail panel covers the rest.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_panels(&self) -> usize {
        self.n_panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The shift `ω` the panels were graded for.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `w_i·t_i^{−1/2}` for every node.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w / t.sqrt())
            .collect()
    }

    /// `Σ w_i t_i^{−1/2} F(t_i)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w / t.sqrt() * f(t))
            .sum()
    }

    /// Relative error of the rule on `∫₀^∞ t^{−1/2}(ω + t)^{−1} dt = π/√ω`.
    pub fn self_test_error(&self) -> f64 {
        let s = self.scale;
        let exact = PI / s.sqrt();
        (self.integrate(|t| 1.0 / (s + t)) - exact).abs() / exact
    }
}

fn legendre(n: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(n).expect("panel node count is positive"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rule_shape() {
        let r = QuadratureRule::standard(1.0).unwrap();
        assert_eq!(r.len(), 400);
        assert_eq!(r.n_panels(), 10);
        assert_eq!(r.t_max(), 65536.0);
        assert!(r.weights().iter().all(|&w| w > 0.0));
        assert!(r.nodes().iter().all(|&t| t > 0.0));
    }

    #[test]
    fn self_test_meets_tolerance() {
        for &om in &[1.0, 0.37, 4.0, 250.0] {
            let r = QuadratureRule::standard(om).unwrap();
            assert!(r.self_test_error() < 1e-10, "omega {om}: {}", r.self_test_error());
        }
    }

    #[test]
    fn shifted_scale_is_still_accurate() {
        // A rule graded for ω = 1 applied to a symbol with shift 30.
        let r = QuadratureRule::standard(1.0).unwrap();
        let exact = PI / 30f64.sqrt();
        assert!((r.integrate(|t| 1.0 / (30.0 + t)) - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn uneven_node_counts() {
        let r = QuadratureRule::new(203, 256.0, 1.0).unwrap();
        assert_eq!(r.len(), 203);
        assert!(r.self_test_error() < 1e-8);
        assert!(QuadratureRule::new(10, 256.0, 1.0).is_err());
        assert!(QuadratureRule::new(400, 0.5, 1.0).is_err());
        assert!(QuadratureRule::new(400, 256.0, -1.0).is_err());
    }
}
