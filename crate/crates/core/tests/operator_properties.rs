//! Structural properties of the discrete operators on small grids.

use deltalap::nls::{mass, nonlinear_phase, rescale_alpha, strang_step, NlsProblem};
use deltalap::point_laplacian::lattice_green;
use deltalap::propagator::cn_step;
use deltalap::random::{band_limited_field, stream};
use deltalap::{Complex64, Field2D, Grid2D, PointInteraction, PointLaplacian};
use proptest::prelude::*;

fn grid() -> Grid2D {
    Grid2D::new(32, 12.0).unwrap()
}

fn lap(alpha: f64) -> PointLaplacian {
    PointLaplacian::new(PointInteraction::new(alpha).unwrap(), grid()).unwrap()
}

fn random_field(seed: u64) -> Field2D {
    band_limited_field(&mut stream(seed), grid(), 32).unwrap()
}

fn rel(a: &Field2D, b: &Field2D) -> f64 {
    a.sub(b).unwrap().lp_norm(2.0) / b.lp_norm(2.0).max(f64::MIN_POSITIVE)
}

/// Spectral points away from the real half-line and from the bound state.
fn spectral_point() -> impl Strategy<Value = Complex64> {
    (0.5f64..5.0, -4.0f64..4.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resolvent_is_linear(seed in 0u64..1000, z in spectral_point(), a in -2.0f64..2.0) {
        let l = lap(0.3);
        let (f, g) = (random_field(seed), random_field(seed + 1));
        let ca = Complex64::new(a, 0.5);
        let lhs = l.resolvent(z, &f.lincomb(ca, &g, Complex64::new(1.0, 0.0)).unwrap()).unwrap();
        let rhs = l.resolvent(z, &f).unwrap().lincomb(ca, &l.resolvent(z, &g).unwrap(), Complex64::new(1.0, 0.0)).unwrap();
        prop_assert!(rel(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn resolvent_adjoint(seed in 0u64..1000, z in spectral_point()) {
        let l = lap(-0.1);
        let (f, g) = (random_field(seed), random_field(seed + 7));
        let left = l.resolvent(z, &f).unwrap().pairing(&g).unwrap();
        let right = f.pairing(&l.resolvent(z.conj(), &g).unwrap()).unwrap();
        prop_assert!((left - right).norm() <= 1e-12 * left.norm().max(1e-12));
    }

    #[test]
    fn resolvent_inverts_shifted_operator(seed in 0u64..1000, z in spectral_point()) {
        let l = lap(0.2);
        let f = random_field(seed);
        let u = l.resolvent(z, &f).unwrap();
        let back = u.scale(z).sub(&l.apply(&u).unwrap()).unwrap();
        prop_assert!(rel(&back, &f) < 1e-10);
    }

    #[test]
    fn green_function_is_radial_and_positive(omega in 0.2f64..20.0) {
        let g = lattice_green(Complex64::new(omega, 0.0), grid()).unwrap();
        let o = g.at_origin();
        prop_assert!(o.re > 0.0 && o.im.abs() < 1e-12 * o.re);
        let v = g.values();
        let n = grid().n();
        // The value at (i, j) and at its mirror (j, i) agree.
        for (i, j) in [(3usize, 17usize), (0, 9), (20, 31)] {
            prop_assert!((v[i * n + j] - v[j * n + i]).norm() <= 1e-12 * o.re);
        }
    }

    #[test]
    fn cayley_step_is_unitary_and_reversible(seed in 0u64..1000, tau in 1e-3f64..0.5, alpha in -0.3f64..1.0) {
        let l = lap(alpha);
        let f = random_field(seed);
        let out = cn_step(&l, &f, tau).unwrap();
        prop_assert!((mass(&out) / mass(&f) - 1.0).abs() < 1e-12);
        let back = cn_step(&l, &out, -tau).unwrap();
        prop_assert!(rel(&back, &f) < 1e-10);
    }

    #[test]
    fn phase_rotation_keeps_moduli(seed in 0u64..1000, tau in -1.0f64..1.0, p in 1.1f64..5.0) {
        let f = random_field(seed).scale_real(3.0);
        let out = nonlinear_phase(&f, tau, p, 1.0);
        for (a, b) in f.values().iter().zip(out.values()) {
            prop_assert!((a.norm() - b.norm()).abs() <= 4.0 * f64::EPSILON * a.norm());
        }
    }

    #[test]
    fn strang_is_gauge_covariant(seed in 0u64..1000, theta in 0.0f64..6.28) {
        let l = lap(0.0);
        let f = random_field(seed).scale_real(2.0);
        let prob = NlsProblem::new(l, 3.0, -1, f.clone()).unwrap();
        let rot = Complex64::from_polar(1.0, theta);
        let a = strang_step(&prob, &f, 0.05).unwrap().scale(rot);
        let b = strang_step(&prob, &f.scale(rot), 0.05).unwrap();
        prop_assert!(rel(&b, &a) < 1e-12);
    }

    #[test]
    fn beta_rescales(alpha in -1.0f64..2.0, log_omega in -3.0f64..3.0) {
        let omega = log_omega.exp();
        let a = PointInteraction::new(alpha).unwrap().beta_real(omega).unwrap();
        let b = PointInteraction::new(rescale_alpha(alpha, omega).unwrap()).unwrap().beta_real(1.0).unwrap();
        prop_assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn quadratic_form_is_pairing_with_operator(seed in 0u64..1000, alpha in -0.5f64..1.0) {
        let l = lap(alpha);
        let f = random_field(seed);
        let q = l.quadratic_form(&f).unwrap();
        let direct = -l.apply(&f).unwrap().pairing(&f).unwrap().re;
        prop_assert!((q - direct).abs() < 1e-10 * q.abs().max(1.0));
    }
}
