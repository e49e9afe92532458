use serde::Serialize;

use super::dyadic::{band_grid, make_dyadic, DyadicSample};
use super::{RatioReport, DEFAULT_EPS};
use crate::error::{Result, ZkError};
use crate::multipliers::phi;
use crate::spectral::{bilinear_modes, norm, GridSpec, PairSymbol, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Estimate {
    /// `‖uv‖ ≲ (N₁∧N₂)(L₁∧L₂)^{1/2}`
    B1,
    /// `‖uv‖ ≲ (N₁∧N₂)^{1/2}/(N₁∨N₂) · (L₁∧L₂)^{1/2}(L₁∨L₂)^{1/2}`
    B2,
    /// `‖R_K(uv)‖ ≲ (N₁∧N₂)^{1/2}/K^{1/4} · (L₁∧L₂)^{1/2}(L₁∨L₂)^{1/4}`
    B3 { k: f64 },
    /// `‖uv‖ ≲ (N₁∧N₂)^{(1+θ)/2}/(N₁∨N₂)^{1−θ} · (L₁∧L₂)^{1/2}(L₁∨L₂)^{θ/2}`
    B4 { theta: f64 },
}

impl Estimate {
    pub fn id(&self) -> &'static str {
        match self {
            Estimate::B1 => "b1",
            Estimate::B2 => "b2",
            Estimate::B3 { .. } => "b3",
            Estimate::B4 { .. } => "b4",
        }
    }

    pub fn k(&self) -> Option<f64> {
        match self {
            Estimate::B3 { k } => Some(*k),
            _ => None,
        }
    }

    pub fn theta(&self) -> Option<f64> {
        match self {
            Estimate::B4 { theta } => Some(*theta),
            _ => None,
        }
    }
}

/// The right-hand factor of the estimate for unit-norm inputs.
pub fn envelope(est: Estimate, n1: f64, n2: f64, l1: f64, l2: f64) -> f64 {
    let (nlo, nhi) = (n1.min(n2), n1.max(n2));
    let (llo, lhi) = (l1.min(l2), l1.max(l2));
    match est {
        Estimate::B1 => nlo * llo.sqrt(),
        Estimate::B2 => nlo.sqrt() / nhi * (llo * lhi).sqrt(),
        Estimate::B3 { k } => nlo.sqrt() / k.powf(0.25) * llo.sqrt() * lhi.powf(0.25),
        Estimate::B4 { theta } => {
            nlo.powf(0.5 * (1.0 + theta)) / nhi.powf(1.0 - theta)
                * llo.sqrt()
                * lhi.powf(0.5 * theta)
        }
    }
}

/// Space-time `L²` norm of `uv`, or of `R_K(uv)` when `k` is given.
pub fn product_l2(u: &SpaceTimeField, v: &SpaceTimeField, k: Option<f64>) -> Result<f64> {
    let one: PairSymbol = &|_, _, _, _| 1.0;
    let mut sum = 0.0;
    bilinear_modes(u, v, &[one], |m| {
        let w = k.map_or(1.0, |k| phi(m.xi / k));
        if w == 0.0 {
            return;
        }
        let s: f64 = m.columns[0].iter().map(|(_, c)| c.norm_sqr()).sum();
        sum += w * w * s;
    })?;
    Ok((sum * norm::spacetime_parseval_weight(u.grid(), u.tspan())).sqrt())
}

pub fn probe_bilinear(
    u: &DyadicSample,
    v: &DyadicSample,
    est: Estimate,
    eps: f64,
) -> Result<RatioReport> {
    let (nlo, nhi) = (u.n.min(v.n), u.n.max(v.n));
    match est {
        Estimate::B2 | Estimate::B4 { .. } if nhi < 4.0 * nlo => {
            return Err(ZkError::InvalidArgument(format!(
                "{} needs separated bands (N₁∨N₂ >= 4·N₁∧N₂), got {} and {}",
                est.id(),
                u.n,
                v.n
            )));
        }
        Estimate::B4 { theta } if !(theta > 0.0 && theta < 1.0) => {
            return Err(ZkError::InvalidArgument(format!(
                "θ={theta} must lie in (0, 1)"
            )));
        }
        Estimate::B3 { k } if !(k.is_finite() && k >= 1.0) => {
            return Err(ZkError::InvalidArgument(format!("K={k} must be >= 1")));
        }
        _ => {}
    }
    let lhs = product_l2(&u.field, &v.field, est.k())?;
    let rhs = envelope(est, u.n, v.n, u.l, v.l) * u.field.l2_norm() * v.field.l2_norm();
    Ok(RatioReport {
        estimate_id: est.id().into(),
        n1: u.n,
        n2: v.n,
        l1: u.l,
        l2: v.l,
        k: est.k(),
        theta: est.theta(),
        eps,
        seed: u.seed,
        lhs,
        rhs,
        ratio: lhs / rhs,
        converged: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPair {
    pub n1: f64,
    pub l1: f64,
    pub n2: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub estimate: Estimate,
    pub bands: BandPair,
    pub seeds: u64,
    pub base_seed: u64,
    /// `Tspan = 2π·periods` on the base lattice.
    pub periods: u32,
    pub jobs: usize,
    pub eps: f64,
}

impl SuiteConfig {
    pub fn new(estimate: Estimate, bands: BandPair, seeds: u64, base_seed: u64) -> Self {
        Self {
            estimate,
            bands,
            seeds,
            base_seed,
            periods: 1,
            jobs: 1,
            eps: DEFAULT_EPS,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    /// Reports on the base lattice, sorted by seed.
    pub reports: Vec<RatioReport>,
    pub max_ratio: f64,
    pub refined_max_ratio: f64,
    /// `max_ratio` and `refined_max_ratio` agree within a factor 2.
    pub converged: bool,
}

fn run_seeds(
    cfg: &SuiteConfig,
    grid: &GridSpec,
    mt: usize,
    tspan: f64,
) -> Result<Vec<RatioReport>> {
    let b = cfg.bands;
    let one = |s: u64| -> Result<RatioReport> {
        let seed = cfg.base_seed + s;
        let u = make_dyadic(grid, mt, tspan, b.n1, b.l1, None, 2 * seed)?;
        let v = make_dyadic(grid, mt, tspan, b.n2, b.l2, None, 2 * seed + 1)?;
        let mut r = probe_bilinear(&u, &v, cfg.estimate, cfg.eps)?;
        r.seed = seed;
        Ok(r)
    };
    let jobs = cfg.jobs.max(1).min(cfg.seeds.max(1) as usize);
    let mut out: Vec<RatioReport> = if jobs == 1 {
        (0..cfg.seeds).map(one).collect::<Result<_>>()?
    } else {
        let chunks: Vec<Vec<u64>> = (0..jobs)
            .map(|w| (0..cfg.seeds).filter(|s| *s as usize % jobs == w).collect())
            .collect();
        let parts: Vec<Result<Vec<RatioReport>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|c| scope.spawn(|| c.iter().map(|&s| one(s)).collect::<Result<Vec<_>>>()))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        let mut all = Vec::new();
        for p in parts {
            all.extend(p?);
        }
        all
    };
    out.sort_by_key(|r| r.seed);
    Ok(out)
}

/// Runs `seeds` probes on the base lattice and again with `Mx`, `My`, `Mt`
/// and `Tspan` doubled; the suite is converged when the maximal ratios
/// differ by less than a factor 2.
pub fn bilinear_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    if cfg.seeds == 0 {
        return Err(ZkError::InvalidArgument(
            "suite needs at least one seed".into(),
        ));
    }
    let b = cfg.bands;
    let (grid, mt, tspan) = band_grid(b.n1.max(b.n2), b.l1.max(b.l2), cfg.periods)?;
    let fine = GridSpec::new(1.0, 1.0, 2 * grid.mx, 2 * grid.my, grid.dt)?;
    let base = run_seeds(cfg, &grid, mt, tspan)?;
    let refined = run_seeds(cfg, &fine, 2 * mt, 2.0 * tspan)?;
    let max = |rs: &[RatioReport]| rs.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let (m0, m1) = (max(&base), max(&refined));
    let converged = if m0 == 0.0 && m1 == 0.0 {
        true
    } else {
        m0 > 0.0 && m1 > 0.0 && (m0 / m1).max(m1 / m0) < 2.0
    };
    let reports = base
        .into_iter()
        .map(|mut r| {
            r.converged = converged;
            r
        })
        .collect();
    Ok(SuiteResult {
        reports,
        max_ratio: m0,
        refined_max_ratio: m1,
        converged,
    })
}
