use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{DataKind, Scenario, ScenarioConfig};
use crate::dynamics::data::{gaussian_bump, line_soliton, random_spectrum, sech_bump};
use crate::dynamics::{evolve_partial, Trajectory};
use crate::error::{Result, ZkError};
use crate::estimates::{
    annulus_field, bilinear_suite, circle_averaged_l2_norm, fit_nabla_constant, gwp_arithmetic,
    loglog_slope, probe_commutator, probe_quartic, random_windowed_field, rescale, write_ratio_csv,
    GwpRecord, SuiteConfig,
};
use crate::functionals::{energy_ledger, modified_energy, EnergyLedger};
use crate::multipliers::IMultiplier;
use crate::spectral::{commensurate_tspan, snapshot, GridSpec, SpectralField};
use crate::symbols::{count_graph_set, count_parabola, preimage_measure};

/// What a scenario produced. `failure` carries a numerical failure found
/// after the diagnostic outputs were written.
pub struct Outcome {
    pub files: Vec<String>,
    pub summary: Value,
    pub failure: Option<ZkError>,
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn create(&mut self, rel: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(rel);
        if let Some(p) = path.parent() {
            std::fs::create_dir_all(p)?;
        }
        self.files.push(rel.to_string());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn csv(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(self.create(rel)?);
        let io = |e: csv::Error| ZkError::Format(e.to_string());
        w.write_record(header).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    fn snapshot(&mut self, rel: &str, f: &SpectralField, t: f64) -> Result<()> {
        let mut w = self.create(rel)?;
        snapshot::write_spectral(&mut w, f, t)?;
        w.flush()?;
        Ok(())
    }
}

fn e(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn run_scenario(cfg: &ScenarioConfig, dir: &Path, jobs: usize) -> Result<Outcome> {
    let scenario = cfg
        .scenario
        .ok_or_else(|| ZkError::InvalidArgument("missing key `scenario`".into()))?;
    let mut out = Outputs {
        dir: dir.to_path_buf(),
        files: Vec::new(),
    };
    let (summary, failure) = match scenario {
        Scenario::Conserve | Scenario::Increment | Scenario::Soliton => {
            evolution(cfg, scenario, &mut out)?
        }
        Scenario::DriftVsN => drift_vs_n(cfg, &mut out)?,
        Scenario::BilinearSuite => (bilinear(cfg, jobs, &mut out)?, None),
        Scenario::CommutatorSuite => (commutator(cfg, &mut out)?, None),
        Scenario::CountingSuite => (counting(cfg, &mut out)?, None),
        Scenario::ScalingSuite => (scaling(cfg, &mut out)?, None),
        Scenario::GwpTable => (gwp_table(cfg, &mut out)?, None),
    };
    Ok(Outcome {
        files: out.files,
        summary,
        failure,
    })
}

fn soliton_x0(cfg: &ScenarioConfig, grid: &GridSpec) -> f64 {
    cfg.x0.unwrap_or(grid.x_length() / 2.0 - 12.0)
}

pub fn initial_data(cfg: &ScenarioConfig, grid: &GridSpec) -> Result<SpectralField> {
    match cfg.data {
        DataKind::Gaussian => gaussian_bump(grid, cfg.amplitude, cfg.width, cfg.ymod),
        DataKind::Sech => sech_bump(grid, cfg.amplitude, cfg.ymod),
        DataKind::Soliton => line_soliton(grid, cfg.speed, soliton_x0(cfg, grid), 0.0),
        DataKind::Spectrum => {
            random_spectrum(grid, cfg.kmax, cfg.jmax, cfg.decay, cfg.amplitude, cfg.seed)
        }
    }
}

fn write_trajectory(cfg: &ScenarioConfig, traj: &Trajectory, out: &mut Outputs) -> Result<()> {
    let states = traj.states();
    let times = traj.times();
    out.snapshot("snapshots/initial.zkf", &states[0], times[0])?;
    out.snapshot("snapshots/final.zkf", traj.last(), times[times.len() - 1])?;
    if cfg.write_snapshots {
        for (k, (s, t)) in states.iter().zip(times).enumerate() {
            out.snapshot(&format!("snapshots/u_{k:05}.zkf"), s, *t)?;
        }
    }
    Ok(())
}

fn write_ledger(ledger: &EnergyLedger, out: &mut Outputs) -> Result<()> {
    let mut w = out.create("ledger.csv")?;
    ledger.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn ledger_summary(l: &EnergyLedger) -> Value {
    json!({
        "max_mass_drift": l.max_mass_drift(),
        "max_energy_drift": l.max_energy_drift(),
        "ei_drift": l.ei_drift(),
        "final_mismatch": l.final_mismatch(),
        "coarse_mismatch": l.coarse_mismatch,
    })
}

fn evolution(
    cfg: &ScenarioConfig,
    scenario: Scenario,
    out: &mut Outputs,
) -> Result<(Value, Option<ZkError>)> {
    let grid = cfg.grid()?;
    let integ = cfg.integrator()?;
    let imul = cfg.imultiplier()?;
    let x0 = soliton_x0(cfg, &grid);
    let u0 = if scenario == Scenario::Soliton {
        line_soliton(&grid, cfg.speed, x0, 0.0)?
    } else {
        initial_data(cfg, &grid)?
    };
    let (traj, mut failure) = evolve_partial(&u0, &integ)?;
    write_trajectory(cfg, &traj, out)?;
    let mut summary = json!({ "snapshots": traj.len(), "t_reached": traj.times()[traj.len() - 1] });
    if traj.len() >= 3 {
        let ledger = energy_ledger(&traj, &imul)?;
        write_ledger(&ledger, out)?;
        summary["ledger"] = ledger_summary(&ledger);
        if scenario == Scenario::Increment && failure.is_none() {
            failure = ledger.check_refinement().err();
        }
    }
    if scenario == Scenario::Soliton {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for (s, &t) in traj.states().iter().zip(traj.times()) {
            let exact = line_soliton(&grid, cfg.speed, x0, t)?;
            let err = s.sub(&exact)?.l2_norm();
            worst = worst.max(err);
            rows.push(vec![e(t), e(err), e(err / exact.l2_norm())]);
        }
        out.csv(
            "soliton_error.csv",
            &["t", "l2_error", "relative_error"],
            &rows,
        )?;
        summary["max_l2_error"] = json!(worst);
    }
    Ok((summary, failure))
}

fn drift_vs_n(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<(Value, Option<ZkError>)> {
    let grid = cfg.grid()?;
    let integ = cfg.integrator()?;
    let u0 = initial_data(cfg, &grid)?;
    let (traj, failure) = evolve_partial(&u0, &integ)?;
    write_trajectory(cfg, &traj, out)?;
    let mut rows = Vec::new();
    let mut drifts = Vec::new();
    for &n in &cfg.n_list {
        let imul = IMultiplier::new(n, cfg.s)?;
        let e0 = modified_energy(&u0, &imul);
        let d = traj
            .states()
            .iter()
            .map(|s| (modified_energy(s, &imul) - e0).abs())
            .fold(0.0, f64::max);
        drifts.push(d);
        rows.push(vec![format!("{n}"), format!("{}", cfg.s), e(e0), e(d)]);
    }
    out.csv("drift_vs_N.csv", &["N", "s", "EI0", "drift"], &rows)?;
    let decreasing = drifts.windows(2).all(|w| w[1] < w[0]);
    let slope = (drifts.len() >= 2 && drifts.iter().all(|d| *d > 0.0))
        .then(|| loglog_slope(&cfg.n_list, &drifts));
    Ok((
        json!({
            "t_reached": traj.times()[traj.len() - 1],
            "strictly_decreasing": decreasing,
            "loglog_slope": slope,
            "envelope_slope": -0.1,
        }),
        failure,
    ))
}

fn bilinear(cfg: &ScenarioConfig, jobs: usize, out: &mut Outputs) -> Result<Value> {
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut all_converged = true;
    for p in cfg.suite_points()? {
        let mut sc = SuiteConfig::new(p.estimate, p.bands, cfg.seeds, cfg.seed);
        sc.periods = cfg.periods;
        sc.jobs = jobs;
        sc.eps = cfg.eps;
        let r = bilinear_suite(&sc)?;
        all_converged &= r.converged;
        let b = p.bands;
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        rows.push(vec![
            p.estimate.id().to_string(),
            format!("{}", b.n1),
            format!("{}", b.n2),
            format!("{}", b.l1),
            format!("{}", b.l2),
            opt(p.estimate.k()),
            opt(p.estimate.theta()),
            e(r.max_ratio),
            e(r.refined_max_ratio),
            r.converged.to_string(),
        ]);
        reports.extend(r.reports);
    }
    let mut w = out.create("ratios.csv")?;
    write_ratio_csv(&mut w, &reports)?;
    w.flush()?;
    out.csv(
        "suites.csv",
        &[
            "estimate_id",
            "N1",
            "N2",
            "L1",
            "L2",
            "K",
            "theta",
            "max_ratio",
            "refined_max_ratio",
            "converged",
        ],
        &rows,
    )?;
    Ok(json!({ "suites": rows.len(), "probes": reports.len(), "all_converged": all_converged }))
}

fn commutator(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Value> {
    let grid = cfg.grid()?;
    let tspan = commensurate_tspan(&grid, 1)?;
    let u = random_windowed_field(&grid, cfg.zmax, 2 * cfg.seed, cfg.mt, tspan)?;
    let v = random_windowed_field(&grid, cfg.zmax, 2 * cfg.seed + 1, cfg.mt, tspan)?;
    let mut rows = Vec::new();
    let mut ns = Vec::new();
    let mut normalized = Vec::new();
    for &n in &cfg.n_list {
        let imul = IMultiplier::new(n, cfg.s)?;
        let c = probe_commutator(&u, &v, &imul, cfg.eps)?;
        let q = probe_quartic(&u, &imul, cfg.eps)?;
        if c.normalized > 0.0 {
            ns.push(n);
            normalized.push(c.normalized);
        }
        rows.push(vec![
            format!("{n}"),
            e(c.report.lhs),
            e(c.report.rhs),
            e(c.report.ratio),
            e(c.normalized),
            e(c.baseline),
            e(q.report.lhs),
            e(q.report.ratio),
            e(q.normalized),
            e(q.imag_residue),
        ]);
    }
    out.csv(
        "commutator.csv",
        &[
            "N",
            "lhs",
            "rhs",
            "ratio",
            "normalized",
            "baseline",
            "quartic_lhs",
            "quartic_ratio",
            "quartic_normalized",
            "quartic_imag_residue",
        ],
        &rows,
    )?;
    // data on |ζ| ≤ N/4 for the smallest N must give an exactly zero commutator
    let nmin = cfg.n_list.iter().copied().fold(f64::INFINITY, f64::min);
    let low_u = random_windowed_field(&grid, nmin / 4.0, 2 * cfg.seed, cfg.mt, tspan)?;
    let low_v = random_windowed_field(&grid, nmin / 4.0, 2 * cfg.seed + 1, cfg.mt, tspan)?;
    let low = probe_commutator(&low_u, &low_v, &IMultiplier::new(nmin, cfg.s)?, cfg.eps)?;
    let decreasing = normalized.windows(2).all(|w| w[1] < w[0]);
    let slope = (normalized.len() >= 2).then(|| loglog_slope(&ns, &normalized));
    Ok(json!({
        "normalized_decreasing": decreasing,
        "loglog_slope": slope,
        "envelope_slope": -0.1,
        "low_frequency_lhs": low.report.lhs,
    }))
}

fn counting(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lambdas = [1.0f64, 2.0, 4.0, 8.0, 16.0];
    let mut rows = Vec::new();
    let mut parabola_violations = 0;
    for _ in 0..cfg.instances {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let a: f64 = sign * rng.random_range(0.05..5.0);
        let b: f64 = rng.random_range(-5.0..5.0);
        let c: f64 = rng.random_range(-5.0..5.0);
        let lo: f64 = rng.random_range(-20.0..20.0);
        let hi: f64 = lo + rng.random_range(0.0..10.0);
        let lambda = lambdas[rng.random_range(0..lambdas.len())];
        // window wide enough to hold every solution
        let v: f64 = -b / (2.0 * a);
        let d: f64 = c - b * b / (4.0 * a);
        let qmax = v.abs() + ((lo.abs().max(hi.abs()) + d.abs()) / a.abs()).sqrt() + 2.0;
        let r = count_parabola(a, b, c, (lo, hi), lambda, qmax)?;
        if !r.holds() {
            parabola_violations += 1;
        }
        rows.push(vec![
            "parabola".into(),
            e(a),
            e(b),
            e(c),
            e(lo),
            e(hi),
            format!("{lambda}"),
            r.count.to_string(),
            e(r.bound),
        ]);
    }
    let mut graph_violations = 0;
    for _ in 0..cfg.instances {
        // points of (ℤ/Λ) × (ℤ/λ) within half a lattice step of ξ = αq² + βq + γ
        let big = lambdas[rng.random_range(0..lambdas.len())];
        let lambda = lambdas[rng.random_range(0..lambdas.len())].min(big);
        let (al, be, ga) = (
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let lo: f64 = rng.random_range(-5.0..5.0);
        let hi: f64 = lo + rng.random_range(0.0..5.0);
        let g = move |q: f64| al * q * q + be * q + ga;
        let qm = lo.abs().max(hi.abs());
        let reach = al.abs() * qm * qm + be.abs() * qm + ga.abs() + 1.0;
        let kmax = (reach * big).ceil() as i64;
        let xs: Vec<f64> = (-kmax..=kmax).map(|k| k as f64 / big).collect();
        let half = 0.5 / big;
        let r = count_graph_set(|x, q| (x - g(q)).abs() < half, &xs, (lo, hi), lambda, 1)?;
        if !r.holds() {
            graph_violations += 1;
        }
        rows.push(vec![
            "graph".into(),
            e(al),
            e(be),
            e(ga),
            e(lo),
            e(hi),
            format!("{lambda}"),
            r.count.to_string(),
            e(r.bound),
        ]);
    }
    let mut preimage_violations = 0;
    let preimages = (cfg.instances / 20).max(1);
    for _ in 0..preimages {
        // f(x) = a x³ + b x, increasing on J with inf f' = 3a·min(x²) + b
        let a: f64 = rng.random_range(0.1..2.0);
        let b: f64 = rng.random_range(0.1..2.0);
        let j0: f64 = rng.random_range(0.0..2.0);
        let j1: f64 = j0 + rng.random_range(0.5..2.0);
        let f = move |x: f64| a * x * x * x + b * x;
        let lo: f64 = rng.random_range(f(j0)..f(j1));
        let hi: f64 = lo + rng.random_range(0.0..2.0);
        let dmin = 3.0 * a * j0 * j0 + b;
        let r = preimage_measure(f, (j0, j1), (lo, hi), dmin)?;
        if !r.holds() {
            preimage_violations += 1;
        }
        rows.push(vec![
            "preimage".into(),
            e(a),
            e(b),
            e(dmin),
            e(lo),
            e(hi),
            String::new(),
            e(r.measure),
            e(r.bound),
        ]);
    }
    out.csv(
        "counting.csv",
        &[
            "kind", "p1", "p2", "p3", "lo", "hi", "lambda", "count", "bound",
        ],
        &rows,
    )?;
    Ok(json!({
        "parabola_instances": cfg.instances,
        "parabola_violations": parabola_violations,
        "graph_instances": cfg.instances,
        "graph_violations": graph_violations,
        "preimage_instances": preimages,
        "preimage_violations": preimage_violations,
    }))
}

fn scaling(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Value> {
    let grid = cfg.grid()?;
    let imul = cfg.imultiplier()?;
    let smooth = gaussian_bump(&grid, cfg.amplitude, cfg.width, cfg.ymod)?;
    let hf = annulus_field(&grid, cfg.zlo, cfg.zhi, cfg.seed)?;
    let fit = fit_nabla_constant(&hf, &imul, &cfg.lambda_list)?;
    let mut rows = Vec::new();
    let (mut worst, mut worst_weighted) = (0.0f64, 0.0f64);
    for (k, &lam) in cfg.lambda_list.iter().enumerate() {
        let v = rescale(&smooth, lam)?;
        let err = (v.l2_norm() * lam / smooth.l2_norm() - 1.0).abs();
        let perr = (circle_averaged_l2_norm(&v) * lam.powf(1.5) / circle_averaged_l2_norm(&smooth)
            - 1.0)
            .abs();
        worst = worst.max(err);
        worst_weighted = worst_weighted.max(perr);
        rows.push(vec![format!("{lam}"), e(err), e(perr), e(fit.constants[k])]);
    }
    out.csv(
        "scaling.csv",
        &[
            "lambda",
            "l2_identity_error",
            "weighted_l2_identity_error",
            "nabla_constant",
        ],
        &rows,
    )?;
    Ok(json!({
        "max_l2_identity_error": worst,
        "max_weighted_l2_identity_error": worst_weighted,
        "nabla_mean": fit.mean,
        "nabla_max_deviation": fit.max_deviation,
        "nabla_stable_20pct": fit.stable(0.2),
    }))
}

fn gwp_table(cfg: &ScenarioConfig, out: &mut Outputs) -> Result<Value> {
    let mut rows = Vec::new();
    for s in &cfg.s_list {
        let q = s.to_ratio()?;
        for &t in &cfg.t_list {
            let r: GwpRecord = gwp_arithmetic(q, t)?;
            rows.push(r.csv_row());
        }
    }
    out.csv("gwp.csv", &GwpRecord::CSV_HEADER, &rows)?;
    Ok(json!({ "rows": rows.len() }))
}
