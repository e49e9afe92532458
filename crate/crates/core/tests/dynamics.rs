use num_complex::Complex64;

use zkcyl::dynamics::data::{gaussian_bump, random_spectrum};
use zkcyl::dynamics::{
    duhamel_picard, evolve, evolve_partial, phi_functions, propagate_linear, IntegratorConfig,
    Scheme, Stepper,
};
use zkcyl::functionals::mass;
use zkcyl::spectral::{GridSpec, SpectralField};
use zkcyl::ZkError;

fn data() -> SpectralField {
    let g = GridSpec::new(1.0, 1.0, 32, 32, 1e-2).unwrap();
    random_spectrum(&g, 3, 3, 1.5, 0.5, 7).unwrap()
}

fn run(u0: &SpectralField, scheme: Scheme, dt: f64, tend: f64) -> SpectralField {
    let cfg = IntegratorConfig::new(scheme, dt, tend)
        .unwrap()
        .with_snapshot_every(usize::MAX);
    evolve(u0, &cfg).unwrap().last().clone()
}

/// Ratios of successive differences under dt halving.
fn convergence_ratios(scheme: Scheme) -> Vec<f64> {
    let u0 = data();
    let mut dt = 0.01;
    let sols: Vec<_> = (0..5)
        .map(|_| {
            let s = run(&u0, scheme, dt, 0.2);
            dt /= 2.0;
            s
        })
        .collect();
    let diffs: Vec<f64> = sols
        .windows(2)
        .map(|w| w[1].sub(&w[0]).unwrap().l2_norm())
        .collect();
    diffs.windows(2).map(|d| d[0] / d[1]).collect()
}

#[test]
fn etdrk4_is_fourth_order() {
    for r in convergence_ratios(Scheme::Etdrk4) {
        assert!(r > 12.0 && r < 20.0, "ratio {r}");
    }
}

#[test]
fn strang_is_second_order() {
    for r in convergence_ratios(Scheme::Strang) {
        assert!(r > 3.5 && r < 4.5, "ratio {r}");
    }
}

#[test]
fn schemes_agree_on_the_same_solution() {
    let u0 = data();
    let a = run(&u0, Scheme::Etdrk4, 1e-3, 0.2);
    let b = run(&u0, Scheme::Strang, 2.5e-4, 0.2);
    assert!(a.sub(&b).unwrap().l2_norm() < 1e-6 * a.l2_norm());
}

#[test]
fn tiny_data_follows_the_linear_flow() {
    let u0 = data().scale(1e-8);
    let a = run(&u0, Scheme::Etdrk4, 1e-2, 0.5);
    let b = propagate_linear(&u0, 0.5);
    // the nonlinear correction is O(|u|²)
    assert!(a.sub(&b).unwrap().l2_norm() < 1e-6 * u0.l2_norm());
}

#[test]
fn mass_drift_by_scheme() {
    // both substeps of the splitting are exact isometries; ETDRK4 is not,
    // its drift shrinks with the step
    let u0 = data();
    let m0 = mass(&u0);
    let drift = |scheme, dt| (mass(&run(&u0, scheme, dt, 0.5)) - m0).abs() / m0;
    assert!(drift(Scheme::Strang, 5e-3) < 1e-13);
    let (coarse, fine) = (drift(Scheme::Etdrk4, 5e-3), drift(Scheme::Etdrk4, 2.5e-3));
    assert!(coarse < 1e-8 && fine < coarse / 8.0, "{coarse:e} {fine:e}");
}

#[test]
fn trajectory_records_requested_snapshots() {
    let u0 = data();
    let cfg = IntegratorConfig::new(Scheme::Etdrk4, 1e-2, 0.1)
        .unwrap()
        .with_snapshot_every(2);
    let t = evolve(&u0, &cfg).unwrap();
    assert_eq!(t.len(), 6);
    assert!((t.times()[5] - 0.1).abs() < 1e-12);
    assert_eq!(t.states()[0], u0);
    // every second snapshot plus the final one
    let thin = t.thinned(2).unwrap();
    assert_eq!(thin.len(), 4);
    assert_eq!(thin.times()[3], t.times()[5]);
}

#[test]
fn stepper_is_deterministic() {
    let u0 = data();
    let s = Stepper::new(u0.grid(), Scheme::Etdrk4, 1e-2, true).unwrap();
    assert_eq!(s.step(&u0), s.step(&u0));
    assert_eq!(
        run(&u0, Scheme::Strang, 1e-2, 0.1),
        run(&u0, Scheme::Strang, 1e-2, 0.1)
    );
}

#[test]
fn blow_up_is_reported_with_partial_trajectory() {
    // large data with a huge step leaves the stable region
    let g = GridSpec::new(1.0, 1.0, 32, 32, 0.5).unwrap();
    let u0 = gaussian_bump(&g, 50.0, 0.5, 0.5).unwrap();
    let cfg = IntegratorConfig::new(Scheme::Strang, 0.5, 200.0)
        .unwrap()
        .with_snapshot_every(1);
    let (traj, err) = evolve_partial(&u0, &cfg).unwrap();
    assert!(matches!(err, Some(ZkError::NonFinite { .. })), "{err:?}");
    assert!(!traj.is_empty());
    assert!(traj.states().iter().all(|s| s.is_finite()));
    assert!(evolve(&u0, &cfg).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(IntegratorConfig::new(Scheme::Etdrk4, 0.0, 1.0).is_err());
    assert!(IntegratorConfig::new(Scheme::Etdrk4, 1e-3, -1.0).is_err());
    assert!(IntegratorConfig::new(Scheme::Etdrk4, f64::NAN, 1.0).is_err());
}

#[test]
fn phi_functions_match_series() {
    for z in [
        Complex64::new(1e-9, 0.0),
        Complex64::new(0.0, 1e-4),
        Complex64::new(-0.3, 0.7),
        Complex64::new(0.0, 25.0),
    ] {
        // Σ zⁿ/(n+k)! for small |z|, the closed forms elsewhere
        let closed = |k: usize| {
            let e = z.exp();
            match k {
                1 => (e - 1.0) / z,
                2 => (e - 1.0 - z) / (z * z),
                _ => (e - 1.0 - z - z * z / 2.0) / (z * z * z),
            }
        };
        let series = |k: usize| {
            let mut term = Complex64::new(1.0, 0.0);
            for m in 1..=k {
                term /= m as f64;
            }
            let mut sum = Complex64::new(0.0, 0.0);
            for n in 0..200 {
                sum += term;
                term *= z / (n + k + 1) as f64;
            }
            sum
        };
        let p = phi_functions(z);
        for (k, got) in p.iter().enumerate() {
            let want = if z.norm() < 1.0 {
                series(k + 1)
            } else {
                closed(k + 1)
            };
            assert!(
                (got - want).norm() < 1e-13 * want.norm().max(1.0),
                "z={z} k={k}: {} vs {want}",
                got
            );
        }
    }
}

#[test]
fn picard_iterates_contract_to_the_flow() {
    let u0 = data();
    let delta = 0.05;
    let r = duhamel_picard(&u0, delta, 8, 200).unwrap();
    assert!(!r.diverging);
    assert!(
        r.differences.windows(2).all(|w| w[1] < w[0]),
        "{:?}",
        r.differences
    );
    assert!(r.differences.last().unwrap() < &(1e-6 * r.differences[0]));
    let flow = run(&u0, Scheme::Etdrk4, 1e-3, delta);
    let last = r.iterates.last().unwrap().last().clone();
    // the quadrature is second order in the step δ/200
    assert!(last.sub(&flow).unwrap().l2_norm() < 1e-5 * flow.l2_norm());
}

#[test]
fn picard_arguments_are_checked() {
    let u0 = data();
    assert!(duhamel_picard(&u0, 0.0, 3, 10).is_err());
    assert!(duhamel_picard(&u0, 0.1, 0, 10).is_err());
}
