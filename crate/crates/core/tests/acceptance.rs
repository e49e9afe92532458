//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion fails.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zkcyl::cli::{self, ScenarioConfig};
use zkcyl::dynamics::data::{line_soliton, line_soliton_profile};
use zkcyl::dynamics::{evolve, nonlinear_rhs, propagate_linear};
use zkcyl::estimates::{
    bilinear_suite, gwp_arithmetic, is_feasible, BandPair, Estimate, SuiteConfig,
};
use zkcyl::functionals::{energy, increment_check, mass};
use zkcyl::spectral::{forward, inverse, GridSpec, PhysicalField, SpectralField};
use zkcyl::symbols::{resonance, resonance_d1, resonance_d2, sigma};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn config(name: &str) -> ScenarioConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    ScenarioConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Runs a shipped config through the CLI driver and returns its summary.
fn run_config(name: &str, dir: &Path) -> serde_json::Value {
    let cfg = config(name);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let status = cli::run(&cfg, dir, jobs);
    assert_eq!(status.exit_code, 0, "{name}: {:?}", status.message);
    status.manifest.expect("manifest").summary
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn c1_spectral() -> Verdict {
    let g = GridSpec::new(4.0, 1.0, 256, 64, 1e-3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vals = Array2::from_shape_fn(g.shape(), |_| rng.random_range(-1.0..1.0));
    let u = PhysicalField::new(g, vals).unwrap();
    let start = Instant::now();
    let uh = forward(&u);
    let back = inverse(&uh).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let scale = u.max_abs();
    let round = (back.values() - u.values())
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
        / scale;
    let v = PhysicalField::new(
        g,
        Array2::from_shape_fn(g.shape(), |_| rng.random_range(-1.0..1.0)),
    )
    .unwrap();
    let vh = forward(&v);
    let phys = u.inner(&v);
    let spec = uh.inner(&vh);
    let pars = ((phys - spec.re).abs() + spec.im.abs()) / (u.l2_norm() * v.l2_norm());
    let norm = (u.l2_norm() - uh.l2_norm()).abs() / u.l2_norm();
    verdict(
        round <= 1e-12 && pars <= 1e-12 && norm <= 1e-12,
        format!(
            "round trip {round:.2e}, Parseval {:.2e}, 256x64 transform pair {secs:.4} s",
            pars.max(norm)
        ),
    )
}

fn c2_propagator() -> Verdict {
    let g = GridSpec::new(4.0, 2.0, 64, 32, 1e-3).unwrap();
    let mut worst: f64 = 0.0;
    for &(k, j) in &[(1i64, 0i64), (3, 2), (-5, 7), (0, 4), (11, -3)] {
        let mut f = SpectralField::zeros(g);
        f.set_mode(k, j, Complex64::new(1.0, 0.0), true).unwrap();
        let (xi, q) = (k as f64 / g.x_scale, j as f64 / g.y_scale);
        for t in [0.01, 0.3, 1.7] {
            let p = propagate_linear(&f, t);
            let got = p.coeff(k, j).unwrap() / f.coeff(k, j).unwrap();
            let want = Complex64::from_polar(1.0, t * sigma(xi, q));
            worst = worst.max((got - want).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u0 = forward(
        &PhysicalField::new(
            g,
            Array2::from_shape_fn(g.shape(), |_| rng.random_range(-1.0..1.0)),
        )
        .unwrap(),
    )
    .without_nyquist();
    let (s, t) = (0.37, 0.91);
    let a = propagate_linear(&propagate_linear(&u0, s), t);
    let b = propagate_linear(&u0, s + t);
    let group = a.sub(&b).unwrap().l2_norm() / u0.l2_norm();
    verdict(
        worst <= 1e-13 && group <= 1e-13,
        format!("single-mode phase error {worst:.2e}, group property {group:.2e}"),
    )
}

fn c3_conservation() -> Verdict {
    let cfg = config("conserve.toml");
    let grid = cfg.grid().unwrap();
    let u0 = cli::scenarios::initial_data(&cfg, &grid).unwrap();
    let start = Instant::now();
    let traj = evolve(&u0, &cfg.integrator().unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (m0, e0) = (mass(&u0), energy(&u0));
    let dm = traj
        .states()
        .iter()
        .map(|s| (mass(s) - m0).abs())
        .fold(0.0, f64::max)
        / m0;
    let de = traj
        .states()
        .iter()
        .map(|s| (energy(s) - e0).abs())
        .fold(0.0, f64::max)
        / e0.abs();
    verdict(
        dm <= 1e-10 && de <= 1e-6 && secs < 600.0,
        format!("512x32 dt=1e-3 T=1: mass drift {dm:.2e}, energy drift {de:.2e}, {secs:.1} s"),
    )
}

/// Sup over a fine x-grid of `−c uₓ + uₓₓₓ + u uₓ` for the periodised
/// `3c sech²(√c z/2)`, with closed-form derivatives of each image.
fn profile_residual(c: f64, x0: f64, period: f64) -> f64 {
    let a = 3.0 * c;
    let k = c.sqrt() / 2.0;
    let mut worst: f64 = 0.0;
    for i in 0..8192 {
        let x = period * i as f64 / 8192.0;
        let (mut u, mut ux, mut uxxx) = (0.0, 0.0, 0.0);
        for m in -3..=3 {
            let z = k * (x + m as f64 * period - x0);
            let (s, t) = (1.0 / z.cosh().powi(2), z.tanh());
            u += a * s;
            ux += -2.0 * a * k * s * t;
            uxxx += -4.0 * a * k.powi(3) * s * t * (2.0 - 6.0 * s);
        }
        let direct = line_soliton_profile(x, 0.0, c, x0, period);
        worst = worst
            .max((-c * ux + uxxx + u * ux).abs())
            .max((direct - u).abs());
    }
    worst
}

fn c4_soliton() -> Verdict {
    let cfg = config("soliton.toml");
    let grid = cfg.grid().unwrap();
    let c = cfg.speed;
    let x0 = grid.x_length() / 2.0 - 12.0;
    let u0 = line_soliton(&grid, c, x0, 0.0).unwrap();
    let residual = profile_residual(c, x0, grid.x_length());
    // the same residual with spectral derivatives, relative to ‖u‖
    let spectral = u0
        .dx()
        .scale(-c)
        .add(&u0.laplacian().dx())
        .unwrap()
        .sub(&nonlinear_rhs(&u0).unwrap())
        .unwrap()
        .l2_norm()
        / u0.l2_norm();
    let traj = evolve(&u0, &cfg.integrator().unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for (s, &t) in traj.states().iter().zip(traj.times()) {
        worst = worst.max(
            s.sub(&line_soliton(&grid, c, x0, t).unwrap())
                .unwrap()
                .l2_norm(),
        );
    }
    verdict(
        residual <= 1e-10 && spectral <= 1e-10 && worst <= 1e-4,
        format!(
            "Mx={} T={}: profile residual {residual:.2e} (spectral, relative {spectral:.2e}), max L2 error {worst:.2e}",
            grid.mx, cfg.tend
        ),
    )
}

fn c5_resonance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut expand: f64 = 0.0;
    for _ in 0..100_000 {
        let (x1, x2, q1, q2) = (
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
        let direct = sigma(x1 + x2, q1 + q2) - sigma(x1, q1) - sigma(x2, q2);
        let scale = 1.0 + sigma(x1 + x2, q1 + q2).abs() + sigma(x1, q1).abs() + sigma(x2, q2).abs();
        expand = expand.max((resonance(x1, x2, q1, q2) - direct).abs() / scale);
    }
    let (mut d1, mut d2): (f64, f64) = (0.0, 0.0);
    for _ in 0..1000 {
        let (x1, x, q1, q) = (
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
            rng.random_range(-3.0..3.0),
        );
        let h = |a: f64| resonance(a, x - a, q1, q - q1);
        let e = 1e-4;
        // both helpers are the negated derivatives
        let fd1 = (h(x1 + e) - h(x1 - e)) / (2.0 * e);
        d1 = d1.max((fd1 + resonance_d1(x1, x, q1, q)).abs() / (1.0 + fd1.abs()));
        let e = 1e-3;
        let fd2 = (h(x1 + e) - 2.0 * h(x1) + h(x1 - e)) / (e * e);
        d2 = d2.max((fd2 + resonance_d2(x)).abs() / (1.0 + fd2.abs()));
    }
    verdict(
        expand <= 1e-12 && d1 <= 1e-5 && d2 <= 1e-5,
        format!("expanded form {expand:.2e} on 1e5 tuples, first derivative {d1:.2e}, second derivative {d2:.2e}"),
    )
}

fn c6_counting(dir: &Path) -> Verdict {
    let s = run_config("counting_suite.toml", dir);
    let get = |k: &str| s[k].as_u64().unwrap();
    let pass = get("parabola_instances") >= 1000
        && get("graph_instances") >= 1000
        && get("parabola_violations") == 0
        && get("graph_violations") == 0
        && get("preimage_violations") == 0;
    verdict(
        pass,
        format!(
            "parabola {}/{} violations, graph {}/{}, preimage {}/{}",
            get("parabola_violations"),
            get("parabola_instances"),
            get("graph_violations"),
            get("graph_instances"),
            get("preimage_violations"),
            get("preimage_instances")
        ),
    )
}

fn c7_increment() -> Verdict {
    let cfg = config("increment.toml");
    let grid = cfg.grid().unwrap();
    let u0 = cli::scenarios::initial_data(&cfg, &grid).unwrap();
    let traj = evolve(&u0, &cfg.integrator().unwrap()).unwrap();
    let ledger = increment_check(&traj, &cfg.imultiplier().unwrap()).unwrap();
    let fine = ledger.final_mismatch().abs();
    let coarse = ledger.coarse_mismatch.unwrap().abs();
    verdict(
        fine <= 1e-6 && coarse >= 4.0 * fine,
        format!(
            "mismatch {fine:.2e} (spacing halved) vs {coarse:.2e}, shrink {:.1}x, EI drift {:.2e}",
            coarse / fine,
            ledger.ei_drift()
        ),
    )
}

fn c8_drift(dir: &Path) -> Verdict {
    let s = run_config("drift_vs_N.toml", dir);
    let dec = s["strictly_decreasing"].as_bool().unwrap();
    let slope = s["loglog_slope"].as_f64().unwrap();
    verdict(
        dec && slope <= 0.0,
        format!(
            "strictly decreasing over N=8..64: {dec}, log-log slope {slope:.3} (envelope -0.1)"
        ),
    )
}

fn c9_bilinear() -> Verdict {
    let b = |n1, l1, n2, l2| BandPair { n1, l1, n2, l2 };
    let cfg = config("bilinear_suite.toml");
    let mut points: Vec<(Estimate, BandPair)> = cfg
        .suite_points()
        .unwrap()
        .into_iter()
        .map(|p| (p.estimate, p.bands))
        .collect();
    let ids: std::collections::BTreeSet<_> = points.iter().map(|p| p.0.id()).collect();
    let mut pass = ids.len() == 4 && points.len() == 8;
    let mut worst_change: f64 = 1.0;
    for (est, bands) in points.drain(..) {
        let mut sc = SuiteConfig::new(est, bands, cfg.seeds, cfg.seed);
        sc.jobs = jobs();
        let r = bilinear_suite(&sc).unwrap();
        let finite =
            r.reports.iter().all(|p| p.ratio.is_finite()) && r.refined_max_ratio.is_finite();
        pass &= finite && r.converged && r.reports.len() == 50;
        if r.max_ratio > 0.0 {
            let c = r.refined_max_ratio / r.max_ratio;
            worst_change = worst_change.max(c.max(1.0 / c));
        }
    }
    // R_K on an x-band far above both inputs annihilates the product
    let mut sc = SuiteConfig::new(
        Estimate::B3 { k: 32.0 },
        b(4.0, 1.0, 4.0, 1.0),
        cfg.seeds,
        cfg.seed,
    );
    sc.jobs = jobs();
    let vanish = bilinear_suite(&sc).unwrap();
    let zero = vanish.reports.iter().all(|p| p.lhs == 0.0);
    pass &= zero;
    verdict(
        pass,
        format!("8 suites x 50 seeds finite, worst refinement change {worst_change:.2}x, vanishing case exact zero: {zero}"),
    )
}

fn c10_commutator(dir: &Path) -> Verdict {
    let s = run_config("commutator_suite.toml", dir);
    let low = s["low_frequency_lhs"].as_f64().unwrap();
    verdict(low == 0.0, format!("lhs on |ζ| ≤ N/4 data: {low:e}"))
}

fn c11_scaling(dir: &Path) -> Verdict {
    let s = run_config("scaling_suite.toml", dir);
    let l2 = s["max_l2_identity_error"].as_f64().unwrap();
    let w = s["max_weighted_l2_identity_error"].as_f64().unwrap();
    let dev = s["nabla_max_deviation"].as_f64().unwrap();
    let stable = s["nabla_stable_20pct"].as_bool().unwrap();
    verdict(
        l2 <= 1e-12 && w <= 1e-12 && stable,
        format!("L2 identity {l2:.2e} (weighted {w:.2e}), nabla constant deviation {dev:.2e} over λ=2,4,8"),
    )
}

fn c12_gwp() -> Verdict {
    let r = |n, d| Ratio::new(n, d);
    let rec = gwp_arithmetic(r(19, 20), 10.0).unwrap();
    let mut pass = rec.growth_exponent == r(10, 9);
    let mut checked = 0;
    for den in 2..=400i64 {
        for num in 1..den {
            let s = r(num, den);
            pass &= is_feasible(s) == (s > r(29, 31));
            if is_feasible(s) {
                let g = gwp_arithmetic(s, 1.0).unwrap().growth_exponent;
                pass &= g == r(10, 1) * (r(1, 1) - s) / (r(31, 1) * s - r(29, 1));
            } else {
                pass &= gwp_arithmetic(s, 1.0).is_err();
            }
            checked += 1;
        }
    }
    pass &= !is_feasible(r(29, 31)) && !is_feasible(r(1, 1));
    verdict(
        pass,
        format!(
            "s=19/20 growth exponent {}, boundary 29/31 exact on {checked} rationals",
            rec.growth_exponent
        ),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

#[test]
fn acceptance() {
    let tmp = tempfile::tempdir().unwrap();
    let sub = |n: &str| -> PathBuf { tmp.path().join(n) };
    let criteria: Vec<(&str, Criterion)> = vec![
        ("spectral exactness", Box::new(c1_spectral)),
        ("linear propagator", Box::new(c2_propagator)),
        ("conservation", Box::new(c3_conservation)),
        ("line soliton", Box::new(c4_soliton)),
        ("resonance identities", Box::new(c5_resonance)),
        (
            "lattice counting",
            Box::new(move || c6_counting(&sub("counting"))),
        ),
        ("increment identity", Box::new(c7_increment)),
        (
            "modified-energy drift",
            Box::new(move || c8_drift(&sub("drift"))),
        ),
        ("bilinear probes", Box::new(c9_bilinear)),
        (
            "commutator vanishing",
            Box::new(move || c10_commutator(&sub("commutator"))),
        ),
        (
            "scaling suite",
            Box::new(move || c11_scaling(&sub("scaling"))),
        ),
        ("GWP arithmetic", Box::new(c12_gwp)),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        // written past the test harness capture so the lines land in the log
        writeln!(
            out,
            "acceptance {:>2} {tag} {name}: {} [{:.1} s]",
            k + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        )
        .unwrap();
        if !v.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
