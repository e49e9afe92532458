use zkcyl::dynamics::data::random_spectrum;
use zkcyl::dynamics::{evolve, IntegratorConfig, Scheme, Trajectory};
use zkcyl::functionals::{
    cumulative_simpson, energy, energy_ledger, gn_fit, increment_check, increment_integrand, mass,
    modified_energy, xsb_norm, EnergyLedger,
};
use zkcyl::multipliers::IMultiplier;
use zkcyl::spectral::{
    commensurate_tspan, cubic_integral, GridSpec, SpaceTimeField, SpectralField,
};

fn data() -> SpectralField {
    let g = GridSpec::new(1.0, 1.0, 32, 32, 1e-2).unwrap();
    random_spectrum(&g, 4, 4, 1.5, 0.4, 3).unwrap()
}

fn flow(u0: &SpectralField, dt: f64, tend: f64, every: usize) -> Trajectory {
    let cfg = IntegratorConfig::new(Scheme::Etdrk4, dt, tend)
        .unwrap()
        .with_snapshot_every(every);
    evolve(u0, &cfg).unwrap()
}

#[test]
fn increment_matches_time_derivative_of_modified_energy() {
    let imul = IMultiplier::new(2.0, 0.8).unwrap();
    let u0 = data();
    // central difference of EI over ±h along the flow
    let h = 4e-3;
    let t = flow(&u0, 1e-4, 2.0 * h, 40);
    assert_eq!(t.len(), 3);
    let ei: Vec<f64> = t
        .states()
        .iter()
        .map(|s| modified_energy(s, &imul))
        .collect();
    let fd = (ei[2] - ei[0]) / (2.0 * h);
    let exact = increment_integrand(&t.states()[1], &imul);
    assert!(exact.abs() > 1e-6, "increment too small to test: {exact:e}");
    assert!(
        (fd - exact).abs() < 1e-3 * exact.abs(),
        "fd {fd:e} vs {exact:e}"
    );
}

#[test]
fn energy_is_conserved_and_unmodified_above_the_data() {
    let u0 = data();
    let t = flow(&u0, 2e-3, 0.2, 100);
    let (e0, e1) = (energy(&u0), energy(t.last()));
    assert!((e1 - e0).abs() < 1e-8 * (e0.abs() + 1.0), "{e0} {e1}");
    // N above every mode on the grid leaves I the identity
    let imul = IMultiplier::new(1e4, 0.5).unwrap();
    assert_eq!(modified_energy(&u0, &imul), e0);
    assert_eq!(increment_integrand(&u0, &imul), 0.0);
}

#[test]
fn ledger_closes_under_refinement() {
    let imul = IMultiplier::new(2.0, 0.8).unwrap();
    let t = flow(&data(), 1e-3, 0.1, 5);
    let ledger = increment_check(&t, &imul).unwrap();
    assert_eq!(ledger.times.len(), 21);
    assert!(ledger.max_mass_drift() < 1e-9);
    let coarse = ledger.coarse_mismatch.unwrap();
    assert!(ledger.final_mismatch().abs() < coarse.abs());
    assert!(ledger.final_mismatch().abs() < 1e-6 * ledger.ei_drift().max(1e-300) + 1e-12);
}

#[test]
fn ledger_csv_layout() {
    let imul = IMultiplier::new(2.0, 0.8).unwrap();
    let ledger = energy_ledger(&flow(&data(), 1e-2, 0.04, 1), &imul).unwrap();
    let mut buf = Vec::new();
    ledger.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), EnergyLedger::CSV_HEADER.join(","));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.split(',').count() == 8));
    assert!(ledger.coarse_mismatch.is_some());
}

#[test]
fn ledger_rejects_bad_trajectories() {
    let imul = IMultiplier::new(2.0, 0.8).unwrap();
    let u = data();
    let short = Trajectory::new(vec![0.0, 1.0], vec![u.clone(), u.clone()]).unwrap();
    assert!(energy_ledger(&short, &imul).is_err());
    let uneven = Trajectory::new(vec![0.0, 1.0, 3.0], vec![u.clone(), u.clone(), u]).unwrap();
    assert!(energy_ledger(&uneven, &imul).is_err());
}

#[test]
fn simpson_oracles() {
    let h = 0.25;
    // exact for cubics at even nodes, for quadratics everywhere
    let cubic: Vec<f64> = (0..11)
        .map(|k| 1.0 - 2.0 * (k as f64 * h) + (k as f64 * h).powi(3))
        .collect();
    let c = cumulative_simpson(&cubic, h);
    for k in (0..11).step_by(2) {
        let t = k as f64 * h;
        assert!(
            (c[k] - (t - t * t + t.powi(4) / 4.0)).abs() < 1e-13,
            "k={k}"
        );
    }
    let quad: Vec<f64> = (0..8).map(|k| (k as f64 * h).powi(2)).collect();
    for (k, v) in cumulative_simpson(&quad, h).iter().enumerate() {
        assert!((v - (k as f64 * h).powi(3) / 3.0).abs() < 1e-14, "k={k}");
    }
    assert_eq!(cumulative_simpson(&[2.0, 4.0], 0.5), vec![0.0, 1.5]);
    assert_eq!(cumulative_simpson(&[7.0], 1.0), vec![0.0]);
    assert!(cumulative_simpson(&[], 1.0).is_empty());
}

#[test]
fn free_solution_xsb_norm_is_sobolev_norm() {
    // the free flow sits at zero modulation, so b plays no role
    let u = data();
    let tspan = commensurate_tspan(u.grid(), 1).unwrap();
    let free = SpaceTimeField::free_solution(&u, 8, tspan).unwrap();
    for (s, b) in [(0.0, 0.5), (1.0, 0.5), (0.5, -0.3), (-1.0, 1.0)] {
        let want = tspan.sqrt() * u.hs_norm(s);
        let got = xsb_norm(&free, s, b).unwrap();
        assert!(
            (got - want).abs() < 1e-12 * want,
            "s={s} b={b}: {got} vs {want}"
        );
    }
    assert!(
        (xsb_norm(&free, 0.0, 0.0).unwrap().powi(2) - tspan * mass(&u)).abs()
            < 1e-10 * tspan * mass(&u)
    );
    assert!(xsb_norm(&free, 0.0, 2.0).is_err());
}

#[test]
fn gagliardo_nirenberg_fit_covers_the_trajectory() {
    let imul = IMultiplier::new(2.0, 0.8).unwrap();
    // the fit only sees states with ∫(Iu)³ > 0
    let u0 = data();
    let u0 = if cubic_integral(&u0) > 0.0 {
        u0
    } else {
        u0.scale(-1.0)
    };
    let t = flow(&u0, 2e-3, 0.2, 10);
    let fit = gn_fit(t.states(), &imul).unwrap();
    assert!(fit.kappa > 0.0);
    assert_eq!(fit.c2, 4.0);
    assert!((fit.c1 - fit.kappa * fit.kappa / 9.0).abs() < 1e-15 * fit.c1);
    assert!(fit.max_ratio <= 1.0 + 1e-12, "{fit:?}");
    assert!(gn_fit(&[], &imul).is_err());
}
