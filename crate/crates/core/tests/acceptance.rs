//! Acceptance suite. Each test prints a `criterion N: PASS/FAIL` line
//! with its elapsed time; run with `--nocapture` to see them on success.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ccmetric_core::control::{circle_control, mc_lower_bound, twist, ControlPair};
use ccmetric_core::cycle::{loop_integral, random_loop, refine_and_decompose, signed_mass};
use ccmetric_core::metric::MetricContext;
use ccmetric_core::stockyard::{self, Strategy};
use ccmetric_core::ugs;
use ccmetric_core::{BoundaryPoint, Complex64, Orientation, PotentialField, Verdict};

fn c64(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn quad() -> PotentialField {
    PotentialField::quadratic(1.0).unwrap()
}

/// Positive density everywhere except a zero disc of radius 2δ₀ at the
/// origin: kills the lower-density constant, so no UGS verdict.
fn hole_grid(delta0: f64) -> PotentialField {
    let half = 6.0 * delta0;
    let n = 61usize;
    let h = 2.0 * half / (n - 1) as f64;
    let mut data = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x = -half + i as f64 * h;
            let y = -half + j as f64 * h;
            let r = (x * x + y * y).sqrt();
            data.push(if r <= 2.0 * delta0 + h { 0.0 } else { 1.0 });
        }
    }
    PotentialField::density_grid(n, n, h, (-half, -half), data).unwrap()
}

struct Report {
    name: &'static str,
    start: Instant,
}

impl Report {
    fn begin(name: &'static str) -> Self {
        Report { name, start: Instant::now() }
    }

    fn finish(self, ok: bool, detail: &str) {
        let secs = self.start.elapsed().as_secs_f64();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{}: {verdict} ({secs:.2}s) {detail}", self.name);
        assert!(ok, "{}: {detail}", self.name);
    }
}

#[test]
fn criterion_1_quadratic_lambda_optimum() {
    let rep = Report::begin("criterion 1 (quadratic Lambda = delta^2/pi)");
    let field = quad();
    let mut ok = true;
    let mut detail = String::new();
    for z0 in [c64(0.0, 0.0), c64(3.0, 4.0)] {
        for delta in [2.0, 5.0, 10.0, 50.0] {
            let (_, lower) =
                stockyard::optimize(&field, z0, delta, Strategy::Best, 200_000, 0).unwrap();
            let target = delta * delta / PI;
            let ratio = lower / target;
            if !(0.95..=1.001).contains(&ratio) {
                ok = false;
            }
            detail += &format!("[z0={z0}, d={delta}: {ratio:.4}] ");
        }
    }
    rep.finish(ok, &detail);
}

#[test]
fn criterion_2_circle_twist_extremal() {
    let rep = Report::begin("criterion 2 (circle twist 4pi)");
    let field = quad();
    let delta = 2.0 * PI;
    let t256 = twist(&field, c64(0.0, 0.0), delta, &circle_control(256, Orientation::Cw).unwrap())
        .unwrap();
    let t4096 =
        twist(&field, c64(0.0, 0.0), delta, &circle_control(4096, Orientation::Cw).unwrap())
            .unwrap();
    let e256 = (t256 / (4.0 * PI) - 1.0).abs();
    let e4096 = (t4096 / (4.0 * PI) - 1.0).abs();
    rep.finish(
        e256 < 0.01 && e4096 < 1e-4,
        &format!("rel err K=256: {e256:.2e}, K=4096: {e4096:.2e}"),
    );
}

#[test]
fn criterion_3_green_identity_random_loops() {
    let rep = Report::begin("criterion 3 (Green/decomposition identity, 100 loops)");
    let field = quad();
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let poly = random_loop(20, 5.0, seed);
        let total = loop_integral(&field, &poly).unwrap();
        let cycles = refine_and_decompose(&poly).unwrap();
        let sum: f64 = cycles.iter().map(|c| signed_mass(&field, c).unwrap()).sum();
        let rel = (total - sum).abs() / (1.0 + total.abs());
        worst = worst.max(rel);
    }
    rep.finish(worst < 1e-6, &format!("worst rel err {worst:.2e}"));
}

#[test]
fn criterion_4_disc_array_bracket() {
    let rep = Report::begin("criterion 4 (disc-array Lambda bracket)");
    let field = PotentialField::disc_array((-130.0, -130.0), (140.0, 140.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let z0s: Vec<Complex64> =
        (0..5).map(|_| c64(rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
    let mut ok = true;
    let mut detail = String::new();
    for delta in [30.0, 60.0, 120.0, 240.0] {
        for &z0 in &z0s {
            let (lower, upper) =
                stockyard::lambda_estimate(&field, z0, delta, 100_000, 0).unwrap();
            let c2 = stockyard::local_c2(&field, z0, delta).unwrap();
            let floor = (delta - 20.0) / (2.0 * PI) - 1.0;
            let cap = 1.1 * c2 * (delta + delta * delta);
            let good =
                lower >= floor && lower <= upper && upper <= cap && lower <= 1.05 * delta;
            if !good {
                ok = false;
                detail += &format!(
                    "[z0={z0}, d={delta}: lower={lower:.3} floor={floor:.3} upper={upper:.3} cap={cap:.3}] "
                );
            }
        }
    }
    if detail.is_empty() {
        detail = "all 20 brackets hold".into();
    }
    rep.finish(ok, &detail);
}

#[test]
fn criterion_5_ugs_exponents() {
    let rep = Report::begin("criterion 5 (UGS exponents and hole rejection)");
    let quad_rep =
        ugs::fit_ugs(&quad(), c64(-2.0, -2.0), c64(2.0, 2.0), &[2.0, 5.0, 10.0, 20.0], 50_000, 7)
            .unwrap();
    let disc_field = PotentialField::disc_array((-130.0, -130.0), (140.0, 140.0)).unwrap();
    let disc_rep = ugs::fit_ugs(
        &disc_field,
        c64(0.0, 0.0),
        c64(10.0, 10.0),
        &[30.0, 60.0, 120.0, 240.0],
        50_000,
        7,
    )
    .unwrap();
    let hole_rep = ugs::fit_ugs(
        &hole_grid(0.25),
        c64(-0.1, -0.1),
        c64(0.1, 0.1),
        &[0.25, 0.5, 1.0, 2.0],
        20_000,
        1,
    )
    .unwrap();
    let pq = quad_rep.exponent.unwrap_or(f64::NAN);
    let pd = disc_rep.exponent.unwrap_or(f64::NAN);
    let ok = (pq - 2.0).abs() < 0.05
        && (pd - 1.0).abs() < 0.15
        && matches!(quad_rep.verdict, Verdict::UgsQuadratic | Verdict::UgsLinearLike)
        && matches!(disc_rep.verdict, Verdict::UgsQuadratic | Verdict::UgsLinearLike)
        && hole_rep.verdict == Verdict::NoUgsEvidence;
    rep.finish(
        ok,
        &format!(
            "quadratic p={pq:.3} ({:?}), disc-array p={pd:.3} ({:?}), hole {:?}",
            quad_rep.verdict, disc_rep.verdict, hole_rep.verdict
        ),
    );
}

#[test]
fn criterion_6_quadratic_average_constant() {
    let rep = Report::begin("criterion 6 (ball averages constant on quadratic)");
    let (lo, hi) = ugs::check_averages(&quad(), c64(-2.0, -2.0), c64(2.0, 2.0), 1.0, 4).unwrap();
    let ratio = hi / lo;
    rep.finish(ratio < 1.0 + 1e-6, &format!("max/min = {ratio:.12}"));
}

#[test]
fn criterion_7_metric_formula() {
    let rep = Report::begin("criterion 7 (metric formula and reachability)");
    let ctx = MetricContext::new(quad(), 1.0, 4);
    let p0 = BoundaryPoint::new(0.0, 0.0, 0.0);
    let p1 = BoundaryPoint::new(0.0, 0.0, 4.0 * PI);
    let d = ctx.distance(p0, p1).unwrap();
    let dist_ok = (d / (2.0 * PI) - 1.0).abs() < 0.05;
    let reach_hi = ctx.reach_check(p0, p1, 1.1 * 2.0 * PI).unwrap();
    let reach_lo = ctx.reach_check(p0, p1, PI).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut ratio_ok = true;
    let mut worst = (1.0f64, 1.0f64);
    for _ in 0..100 {
        let a = BoundaryPoint::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-50.0..50.0),
        );
        let mut b = BoundaryPoint::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-10.0..10.0),
            rng.gen_range(-50.0..50.0),
        );
        // enforce separation >= 5 in the z-plane by pushing b away
        let dz = b.z() - a.z();
        if dz.norm() < 5.0 {
            let dir = if dz.norm() < 1e-12 { c64(1.0, 0.0) } else { dz / dz.norm() };
            b = BoundaryPoint::from_z(a.z() + dir * 5.0, b.t);
        }
        let dg = ctx.distance(a, b).unwrap();
        let ds = ctx.distance_sqrt(a, b).unwrap();
        let r = ds / dg;
        if !(0.1..=10.0).contains(&r) {
            ratio_ok = false;
        }
        worst = (worst.0.min(r), worst.1.max(r));
    }
    rep.finish(
        dist_ok && reach_hi && !reach_lo && ratio_ok,
        &format!(
            "d={d:.4} (2pi={:.4}), reach@1.1*2pi={reach_hi}, reach@pi={reach_lo}, sqrt/dist in [{:.3},{:.3}]",
            2.0 * PI,
            worst.0,
            worst.1
        ),
    );
}

#[test]
fn criterion_8_cylinder_containment_and_jacobian() {
    let rep = Report::begin("criterion 8 (cylinder containment + Jacobian)");
    let ctx = MetricContext::new(quad(), 1.0, 4);
    let p0 = BoundaryPoint::new(0.0, 0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ok = true;
    let mut detail = String::new();
    for delta in [5.0, 20.0] {
        let half = 0.5 * delta;
        let f_half = ctx.lambda_lower(p0.z(), half).unwrap();
        let mut reached = 0usize;
        for _ in 0..50 {
            let (a, b) = loop {
                let a: f64 = rng.gen_range(-0.95..0.95);
                let b: f64 = rng.gen_range(-0.95..0.95);
                if a * a + b * b < 0.95 * 0.95 {
                    break (a, b);
                }
            };
            let c = rng.gen_range(-0.95..0.95);
            let p = ctx.cylinder_point(p0, half, f_half, a, b, c).unwrap();
            if ctx.reach_check(p0, p, delta).unwrap() {
                reached += 1;
            }
        }
        let f_delta = ctx.lambda_lower(p0.z(), delta).unwrap();
        let jac = ctx.cylinder_jacobian(p0, delta, f_delta).unwrap();
        let jr = jac / (delta * delta * f_delta);
        if reached != 50 || !(0.1..=10.0).contains(&jr) {
            ok = false;
        }
        detail += &format!("[d={delta}: reached {reached}/50, |J|/(d^2 L)={jr:.3}] ");
    }
    rep.finish(ok, &detail);
}

#[test]
fn criterion_9_invariants() {
    let rep = Report::begin("criterion 9 (invariant suites)");
    let field = quad();
    let disc = PotentialField::disc_array((-5.0, -5.0), (15.0, 15.0)).unwrap();

    // Lambda lower bounds monotone non-decreasing in delta
    let mut mono = true;
    for f in [&field, &disc] {
        let mut prev = 0.0f64;
        for delta in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let (_, lower) =
                stockyard::optimize(f, c64(1.0, 1.0), delta, Strategy::Best, 50_000, 0).unwrap();
            if lower < prev * (1.0 - 1e-9) {
                mono = false;
            }
            prev = prev.max(lower);
        }
    }

    // Monte Carlo lower bound never exceeds the density upper bound
    let mut bracket = true;
    for f in [&field, &disc] {
        for delta in [2.0, 8.0, 32.0] {
            let mc = mc_lower_bound(f, c64(1.0, 1.0), delta, 16, 3).unwrap();
            let (_, upper) = stockyard::lambda_estimate(f, c64(1.0, 1.0), delta, 50_000, 3).unwrap();
            if mc > upper * (1.0 + 1e-9) {
                bracket = false;
            }
        }
    }

    // control reversal negates twist
    let mut reversal = true;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let k = rng.gen_range(2..6);
        let coeffs: Vec<(f64, f64)> = (0..k)
            .map(|_| {
                let a = rng.gen_range(-0.6..0.6);
                let b = rng.gen_range(-0.6..0.6);
                (a, b)
            })
            .collect();
        let u = ControlPair::uniform(coeffs, false).unwrap();
        let t_fwd = twist(&field, c64(0.3, -0.2), 3.0, &u).unwrap();
        let t_rev = twist(&field, c64(0.3, -0.2), 3.0, &u.reverse()).unwrap();
        if (t_fwd + t_rev).abs() > 1e-7 * (1.0 + t_fwd.abs()) {
            reversal = false;
        }
    }

    rep.finish(
        mono && bracket && reversal,
        &format!("monotone={mono}, mc<=upper={bracket}, reversal={reversal}"),
    );
}
