//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Grids default to `n = 512`, `L = 40`.
//!
//! Reference values come from oracles written here: an integral
//! representation of `K₀`, the closed-form bound-state frequency, scalar
//! Cayley and resolvent recurrences on the eigenvalue, and exact algebraic
//! identities.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use deltalap::harness::{gamma_ratios, green_witness, phi0_witness};
use deltalap::kernel_split::lambda_decompose;
use deltalap::nls::{is_mass_critical, picard_solve, rescale_alpha, scaling_exponents, strang_solve, NlsProblem};
use deltalap::point_laplacian::lattice_green;
use deltalap::propagator::{propagate_final, propagate_visit, TimeGrid};
use deltalap::random::{ensemble, stream};
use deltalap::special_fn::{bessel_k0, EULER_GAMMA};
use deltalap::{Complex64, Decomposition, Field2D, Grid2D, PointInteraction, PointLaplacian, QuadratureRule};
use rand::Rng;

const N: usize = 512;
const L: f64 = 40.0;
const SEED: u64 = 20_240_601;
const ONE: Complex64 = Complex64::new(1.0, 0.0);

type Outcome = Result<Vec<String>, Vec<String>>;

/// Collects named measurements against their bounds.
#[derive(Default)]
struct Tally {
    lines: Vec<String>,
    ok: bool,
}

impl Tally {
    fn new() -> Self {
        Tally { lines: Vec::new(), ok: true }
    }

    fn at_most(&mut self, what: &str, value: f64, bound: f64) {
        let pass = value <= bound;
        self.ok &= pass;
        self.lines.push(format!("{what} = {value:.3e} (<= {bound:.0e}){}", flag(pass)));
    }

    fn below(&mut self, what: &str, value: f64, bound: f64) {
        let pass = value < bound;
        self.ok &= pass;
        self.lines.push(format!("{what} = {value:.3e} (< {bound}){}", flag(pass)));
    }

    fn at_least(&mut self, what: &str, value: f64, bound: f64) {
        let pass = value >= bound;
        self.ok &= pass;
        self.lines.push(format!("{what} = {value:.6} (>= {bound}){}", flag(pass)));
    }

    fn within(&mut self, what: &str, value: f64, lo: f64, hi: f64) {
        let pass = (lo..=hi).contains(&value);
        self.ok &= pass;
        self.lines.push(format!("{what} = {value:.4} (in [{lo}, {hi}]){}", flag(pass)));
    }

    fn holds(&mut self, what: &str, pass: bool) {
        self.ok &= pass;
        self.lines.push(format!("{what}{}", flag(pass)));
    }

    fn finish(self) -> Outcome {
        if self.ok {
            Ok(self.lines)
        } else {
            Err(self.lines)
        }
    }
}

fn flag(pass: bool) -> &'static str {
    if pass {
        ""
    } else {
        "  <-- violated"
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn rel(a: &Field2D, b: &Field2D) -> f64 {
    a.sub(b).unwrap().lp_norm(2.0) / b.lp_norm(2.0)
}

fn lap(alpha: f64, n: usize, box_size: f64) -> PointLaplacian {
    PointLaplacian::new(PointInteraction::new(alpha).unwrap(), Grid2D::new(n, box_size).unwrap()).unwrap()
}

fn unit_gaussian(g: Grid2D) -> Field2D {
    let a = (2.0 / PI).sqrt();
    Field2D::from_fn(g, |x, y| c(a * (-(x * x + y * y)).exp())).unwrap()
}

/// `(1 − Δ_α)^{−3}` of a Gaussian, scaled to `amplitude²` mass.
fn smooth(lap: &PointLaplacian, amplitude: f64) -> Field2D {
    let mut u = unit_gaussian(*lap.grid());
    for _ in 0..3 {
        u = lap.resolvent(ONE, &u).unwrap();
    }
    u.scale_real(amplitude / u.lp_norm(2.0))
}

/// Closed-form zero of `β_α`.
fn omega0_oracle(alpha: f64) -> f64 {
    4.0 * (-4.0 * PI * alpha - 2.0 * EULER_GAMMA).exp()
}

/// `K₀(z) = ∫₀^∞ exp(−z cosh u) du` by the trapezoid rule, halving the step
/// until two levels agree.
fn k0_oracle(z: Complex64) -> Complex64 {
    let upper = (760.0 / z.re).max(2.0).acosh();
    let sum = |h: f64| {
        let steps = (upper / h).ceil() as usize;
        let mut acc = 0.5 * (-z).exp();
        for k in 1..=steps {
            acc += (-z * (k as f64 * h).cosh()).exp();
        }
        acc * h
    };
    let mut h = (0.25 / (1.0 + z.im.abs() * upper.sinh()).sqrt()).min(0.1);
    let mut prev = sum(h);
    loop {
        h *= 0.5;
        let next = sum(h);
        if (next - prev).norm() <= 1e-14 * next.norm() {
            return next;
        }
        prev = next;
    }
}

fn criterion_1() -> Outcome {
    let mut t = Tally::new();
    let worst = |zs: &mut dyn Iterator<Item = Complex64>| {
        zs.map(|z| {
            let want = k0_oracle(z);
            (bessel_k0(z).unwrap().value - want).norm() / want.norm()
        })
        .fold(0.0, f64::max)
    };
    let real = worst(&mut (0..100).map(|i| c(10f64.powf(-6.0 + 8.0 * i as f64 / 99.0))));
    t.at_most("real [1e-6, 1e2] max rel error", real, 1e-10);
    let complex = worst(&mut (0..100).map(|i| {
        let re = 0.1 * 500f64.powf(i as f64 / 99.0);
        Complex64::new(re, 20.0 * (i as f64 * 0.7071).sin())
    }));
    t.at_most("complex Re z in [0.1, 50] max rel error", complex, 1e-10);
    let mut defect_ok = true;
    for i in 0..60 {
        let r = 10f64.powf(-8.0 + 6.0 * i as f64 / 59.0);
        let z = Complex64::from_polar(r, -1.5 + 3.0 * i as f64 / 59.0);
        let d = (bessel_k0(z).unwrap().value + (z * 0.5).ln() + EULER_GAMMA).norm();
        defect_ok &= d <= 2.0 * r * r * (2.0 / r).ln();
    }
    t.holds("small-z defect bound on 60 points with |z| <= 1e-2", defect_ok);
    t.finish()
}

fn criterion_2() -> Outcome {
    let mut t = Tally::new();
    let mut rng = stream(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.gen_range(-1.0..2.0);
        let pi = PointInteraction::new(alpha).unwrap();
        worst = worst.max(pi.beta_real(omega0_oracle(alpha)).unwrap().abs());
    }
    t.at_most("max |beta(omega0)| over 100 alpha in [-1, 2]", worst, 1e-12);
    let l = lap(0.0, N, L);
    let w0 = omega0_oracle(0.0);
    let g = lattice_green(c(w0), *l.grid()).unwrap();
    let omega = w0 + 1.0;
    let got = l.resolvent(c(omega), &g).unwrap();
    let want = g.scale_real(1.0 / (omega - w0));
    t.at_most("resolvent at omega0 + 1 on the bound state", rel(&got, &want), 1e-3);
    t.finish()
}

fn criterion_3() -> Outcome {
    let mut t = Tally::new();
    let l = lap(0.1, N, L);
    let g = *l.grid();
    let points = [(c(1.0), c(2.5)), (Complex64::new(1.0, 1.0), Complex64::new(-1.0, 2.0))];
    let mut identity: f64 = 0.0;
    let mut align: f64 = 1.0;
    for f in ensemble(SEED, 10, g, N).unwrap() {
        for &(z1, z2) in &points {
            let r1 = l.resolvent(z1, &f).unwrap();
            let r2 = l.resolvent(z2, &f).unwrap();
            let lhs = r1.sub(&r2).unwrap();
            let rhs = l.resolvent(z1, &r2).unwrap().scale(z2 - z1);
            identity = identity.max(rel(&lhs, &rhs));
            let d = r1.sub(&l.free_resolvent(z1, &f).unwrap()).unwrap();
            let green = lattice_green(z1, g).unwrap();
            align = align.min(d.pairing(&green).unwrap().norm() / (d.lp_norm(2.0) * green.lp_norm(2.0)));
        }
    }
    t.at_most("first resolvent identity, 10 fields, real and complex points", identity, 1e-10);
    t.at_least("alignment of R - R0 with G", align, 1.0 - 1e-8);
    t.finish()
}

fn criterion_4() -> Outcome {
    let mut t = Tally::new();
    let l = lap(0.1, N, L);
    let rule = QuadratureRule::standard(1.0).unwrap();
    let f = unit_gaussian(*l.grid());
    let twice = l.inv_sqrt(1.0, &l.inv_sqrt(1.0, &f, &rule).unwrap(), &rule).unwrap();
    let res = l.resolvent(ONE, &f).unwrap();
    t.at_most("inv_sqrt o inv_sqrt vs resolvent, 400 nodes", rel(&twice, &res), 1e-6);
    let integral: f64 = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&s, &w)| w / (s.sqrt() * (1.0 + s)))
        .sum();
    t.at_most("quadrature of t^(-1/2)/(1+t) vs pi", (integral - PI).abs() / PI, 1e-8);
    t.finish()
}

fn criterion_5() -> Outcome {
    let mut t = Tally::new();
    let l = lap(0.1, N, L);
    let rule = QuadratureRule::standard(1.0).unwrap();
    let beta = PointInteraction::new(0.1).unwrap().beta_real(1.0).unwrap();
    let (mut assemble, mut coeff): (f64, f64) = (0.0, 0.0);
    for f in ensemble(SEED, 10, *l.grid(), N).unwrap() {
        let d = lambda_decompose(&l, &f, &rule).unwrap();
        assemble = assemble.max(rel(&d.assemble(), &l.inv_sqrt(1.0, &f, &rule).unwrap()));
        coeff = coeff.max((d.coeff - d.regular.at_origin() / beta).norm() / d.coeff.norm());
    }
    t.at_most("assemble vs inv_sqrt, 10 fields", assemble, 1e-4);
    t.at_most("coeff vs regular(0)/beta", coeff, 1e-2);
    t.finish()
}

fn criterion_6() -> Outcome {
    let mut t = Tally::new();
    let ps = [1.5, 2.0, 3.0, 4.0];
    let rule = QuadratureRule::standard(1.0).unwrap();
    let mut levels = Vec::new();
    let mut witnesses = Vec::new();
    for n in [N, 2 * N] {
        let l = lap(0.1, n, L);
        let fields = ensemble(SEED, 10, *l.grid(), N).unwrap();
        levels.push(gamma_ratios(&l, &fields, &rule, &ps, &ps, &[1.5]).unwrap().entries());
        witnesses.push((green_witness(*l.grid(), 1.0, 8.0).unwrap(), phi0_witness(*l.grid(), 8.0).unwrap()));
    }
    let mut worst: (f64, String) = (0.0, String::new());
    let mut finite = true;
    for ((name, a), (_, b)) in levels[0].iter().zip(&levels[1]) {
        finite &= a.is_finite() && b.is_finite() && *a > 0.0;
        let change = (b - a).abs() / a;
        if change >= worst.0 {
            worst = (change, name.clone());
        }
    }
    t.holds("all 13 ratios finite and positive", finite);
    t.at_most(&format!("largest refinement change ({})", worst.1), worst.0, 0.2);
    t.at_least("green witness growth (p = 8)", witnesses[1].0 / witnesses[0].0 - 1.0, 0.5);
    t.at_least("phi0 witness growth (p = 8)", witnesses[1].1 / witnesses[0].1 - 1.0, 0.5);
    t.finish()
}

fn criterion_7() -> Outcome {
    let mut t = Tally::new();
    let l = lap(0.0, N, L);
    let w0 = omega0_oracle(0.0);
    let bound = lattice_green(c(w0), *l.grid()).unwrap();
    let tg = TimeGrid::new(1.0, 256).unwrap();
    let mut prev = bound.lp_norm(2.0).powi(2);
    let mut step_drift: f64 = 0.0;
    let end = propagate_visit(&l, &bound, &tg, |_, u| {
        let m = u.lp_norm(2.0).powi(2);
        step_drift = step_drift.max((m - prev).abs() / prev);
        prev = m;
    })
    .unwrap();
    t.at_most("per-step mass drift over 256 steps", step_drift, 1e-8);
    let overlap = end.pairing(&bound).unwrap() / bound.pairing(&bound).unwrap();
    let phase = (overlap * Complex64::from_polar(1.0, -w0)).arg().abs();
    t.at_most("bound-state phase error at t = 1, tau = 1/256 (rad)", phase, 1e-4);
    let u0 = smooth(&l, 1.0);
    let run = |steps| propagate_final(&l, &u0, &TimeGrid::new(1.0, steps).unwrap()).unwrap();
    let reference = run(128);
    let factor = rel(&run(16), &reference) / rel(&run(32), &reference);
    t.within("self-convergence factor tau = 1/16 -> 1/32", factor, 3.0, 5.0);
    t.finish()
}

fn criterion_8() -> Outcome {
    let mut t = Tally::new();
    let l = lap(0.0, N, L);
    let prob = NlsProblem::new(l.clone(), 3.0, 1, smooth(&l, 0.5)).unwrap();
    let (_, trace) = strang_solve(&prob, &TimeGrid::new(0.5, 1000).unwrap(), 10).unwrap();
    let m0 = trace.mass[0];
    let drift = trace.mass.iter().map(|m| (m - m0).abs() / m0).fold(0.0, f64::max);
    t.at_most("Strang mass drift over 1000 steps", drift, 1e-8);
    let energy_drift = |steps| {
        let (_, tr) = strang_solve(&prob, &TimeGrid::new(0.5, steps).unwrap(), 1).unwrap();
        tr.energy.iter().map(|e| (e - tr.energy[0]).abs()).fold(0.0, f64::max)
    };
    let factor = energy_drift(50) / energy_drift(100);
    t.within("energy drift factor 50 -> 100 steps (p = 3, T = 0.5)", factor, 2.8, 5.2);

    let gaussian = unit_gaussian(*l.grid());
    let subcritical = NlsProblem::new(l.clone(), 2.0, 1, gaussian.clone()).unwrap();
    let (traj, tr) = picard_solve(&subcritical, 0.05, 21, 100, 1e-12).unwrap();
    t.at_most("Picard ratio p = 2, T = 0.05", tr.contraction_ratio(1e-11).unwrap_or(0.0), 0.5);
    let (strang, _) = strang_solve(&subcritical, &TimeGrid::new(0.05, 20).unwrap(), 20).unwrap();
    t.at_most("Picard vs Strang at T", rel(traj.last().unwrap(), &strang), 1e-3);
    let critical = NlsProblem::new(l, 3.0, 1, gaussian).unwrap();
    let (_, tr) = picard_solve(&critical, 0.02, 9, 100, 1e-12).unwrap();
    t.below("Picard ratio p = 3, T = 0.02", tr.contraction_ratio(1e-11).unwrap_or(0.0), 0.95);
    t.finish()
}

fn criterion_9() -> Outcome {
    let mut t = Tally::new();
    let mut rng = stream(SEED ^ 9);
    let mut gap: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.gen_range(-1.0..2.0);
        let omega = 10f64.powf(rng.gen_range(-2.0..2.0));
        let tilde = alpha + omega.ln() / (4.0 * PI);
        assert_eq!(rescale_alpha(alpha, omega).unwrap(), tilde);
        let a = PointInteraction::new(alpha).unwrap().beta_real(omega).unwrap();
        let b = PointInteraction::new(tilde).unwrap().beta_real(1.0).unwrap();
        gap = gap.max((a - b).abs());
    }
    t.at_most("beta_alpha(omega) - beta_alpha~(1), 100 draws", gap, 1e-14);

    let omega = 2.5;
    let l = lap(0.1, N, L);
    let g = unit_gaussian(*l.grid());
    let d = l.domain_element(g.clone(), omega).unwrap();
    let lhs = l.apply_forward(omega, &d).unwrap();
    let unit = lap(rescale_alpha(0.1, omega).unwrap(), N, omega.sqrt() * L);
    let g_unit = Field2D::new(*unit.grid(), g.into_values()).unwrap();
    let rhs = unit
        .apply_forward(1.0, &Decomposition::new(g_unit, d.coeff, 1.0).unwrap())
        .unwrap();
    let rhs = Field2D::new(*l.grid(), rhs.scale_real(omega).into_values()).unwrap();
    t.at_most("operator rescaling identity at omega = 2.5", rel(&lhs, &rhs), 1e-3);
    let (kinetic, nonlinear) = scaling_exponents(3.0);
    t.holds("p = 3 criticality: 1 - p == -2", is_mass_critical(3.0) && kinetic == nonlinear && 1.0 - 3.0 == -2.0);
    t.finish()
}

fn criterion_10() -> Outcome {
    let mut t = Tally::new();
    let root = std::env::temp_dir().join(format!("deltalap-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&root).unwrap();
    let config = root.join("config.json");
    std::fs::write(
        &config,
        r#"{"experiment": "resolvent_checks", "grid": {"n": 128, "L": 32}, "operator": {"alpha": 0.0, "omega": 1.0}, "seed": 7, "output_dir": "out"}"#,
    )
    .unwrap();
    let run = |dir: &str| -> (bool, Vec<u8>) {
        let cwd: PathBuf = root.join(dir);
        std::fs::create_dir_all(&cwd).unwrap();
        let status = Command::new(env!("CARGO_BIN_EXE_deltalap"))
            .current_dir(&cwd)
            .args(["run", "--config"])
            .arg(&config)
            .output()
            .unwrap()
            .status;
        (status.success(), std::fs::read(cwd.join("out").join("report.json")).unwrap_or_default())
    };
    let (ok_a, a) = run("a");
    let (ok_b, b) = run("b");
    t.holds("both runs exit 0", ok_a && ok_b);
    t.holds(&format!("report.json byte-identical ({} bytes)", a.len()), !a.is_empty() && a == b);
    let _ = std::fs::remove_dir_all(&root);
    t.finish()
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Bessel certification", criterion_1),
        ("eigenpair", criterion_2),
        ("resolvent algebra", criterion_3),
        ("fractional power", criterion_4),
        ("decomposition oracle", criterion_5),
        ("norm-estimate harness", criterion_6),
        ("propagator", criterion_7),
        ("NLS", criterion_8),
        ("rescaling", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err(vec!["panicked".into()]));
        let secs = start.elapsed().as_secs_f64();
        let (tag, lines) = match outcome {
            Ok(lines) => ("PASS", lines),
            Err(lines) => {
                failed += 1;
                ("FAIL", lines)
            }
        };
        println!("{tag} criterion {:>2} [PRIMARY] {name} ({secs:.1} s)", i + 1);
        for line in lines {
            println!("      {line}");
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
