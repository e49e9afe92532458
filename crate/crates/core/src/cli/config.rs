//! Flat key-value scenario configuration.
//!
//! Every key is top level; unknown keys are rejected. Missing keys take the
//! defaults of [`ScenarioConfig::default`], except `scenario`, which is
//! required.

use std::fmt;
use std::path::Path;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, Scheme};
use crate::error::{Result, ZkError};
use crate::estimates::{band_grid, is_feasible, rational_from_f64, BandPair, Estimate};
use crate::multipliers::IMultiplier;
use crate::spectral::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Conserve,
    Soliton,
    Increment,
    #[serde(rename = "drift_vs_N")]
    DriftVsN,
    BilinearSuite,
    CommutatorSuite,
    CountingSuite,
    ScalingSuite,
    GwpTable,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Scenario::Conserve => "conserve",
            Scenario::Soliton => "soliton",
            Scenario::Increment => "increment",
            Scenario::DriftVsN => "drift_vs_N",
            Scenario::BilinearSuite => "bilinear_suite",
            Scenario::CommutatorSuite => "commutator_suite",
            Scenario::CountingSuite => "counting_suite",
            Scenario::ScalingSuite => "scaling_suite",
            Scenario::GwpTable => "gwp_table",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Gaussian,
    Sech,
    Soliton,
    Spectrum,
}

/// A regularity index given as a number or as a fraction string `"p/q"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SValue {
    Number(f64),
    Fraction(String),
}

impl SValue {
    pub fn to_ratio(&self) -> Result<Ratio<i64>> {
        match self {
            SValue::Number(v) => rational_from_f64(*v),
            SValue::Fraction(text) => {
                let bad =
                    || ZkError::InvalidArgument(format!("cannot read {text:?} as a fraction p/q"));
                let (p, q) = text.split_once('/').ok_or_else(bad)?;
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0 {
                    return Err(bad());
                }
                Ok(Ratio::new(p, q))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub out: String,

    pub x_scale: f64,
    pub y_scale: f64,
    pub mx: usize,
    pub my: usize,
    pub dt: f64,
    pub scheme: Scheme,
    pub tend: f64,
    pub snapshot_every: usize,
    pub dealias: bool,
    /// Write a spectral snapshot file for every stored state.
    pub write_snapshots: bool,

    pub data: DataKind,
    pub amplitude: f64,
    pub width: f64,
    pub ymod: f64,
    pub speed: f64,
    /// Soliton centre; defaults to `Lx/2 − 12`.
    pub x0: Option<f64>,
    pub kmax: i64,
    pub jmax: i64,
    pub decay: f64,

    pub n: f64,
    pub s: f64,
    pub n_list: Vec<f64>,

    pub estimates: Vec<String>,
    /// `[N1, L1, N2, L2]` rows; empty means the built-in pair per estimate.
    pub bands: Vec<[f64; 4]>,
    pub k_band: f64,
    pub theta: f64,
    pub seeds: u64,
    pub periods: u32,
    pub eps: f64,

    pub zmax: f64,
    pub mt: usize,

    pub instances: usize,

    pub lambda_list: Vec<f64>,
    pub zlo: f64,
    pub zhi: f64,

    pub s_list: Vec<SValue>,
    pub t_list: Vec<f64>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            seed: 0,
            out: "out".into(),
            x_scale: 8.0,
            y_scale: 1.0,
            mx: 512,
            my: 32,
            dt: 1e-3,
            scheme: Scheme::Etdrk4,
            tend: 1.0,
            snapshot_every: 100,
            dealias: true,
            write_snapshots: false,
            data: DataKind::Gaussian,
            amplitude: 0.3,
            width: 8.0,
            ymod: 0.5,
            speed: 1.0,
            x0: None,
            kmax: 2,
            jmax: 110,
            decay: 1.5,
            n: 8.0,
            s: 0.95,
            n_list: vec![8.0, 16.0, 32.0, 64.0],
            estimates: vec!["b1".into(), "b2".into(), "b3".into(), "b4".into()],
            bands: Vec::new(),
            k_band: 2.0,
            theta: 0.5,
            seeds: 50,
            periods: 1,
            eps: 0.05,
            zmax: 24.0,
            mt: 8,
            instances: 1000,
            lambda_list: vec![2.0, 4.0, 8.0],
            zlo: 16.0,
            zhi: 40.0,
            s_list: vec![SValue::Number(0.95)],
            t_list: vec![10.0],
        }
    }
}

/// One estimate/band combination of a bilinear suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuitePoint {
    pub estimate: Estimate,
    pub bands: BandPair,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ZkError::Format(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Loads a file and applies `key=value` overrides, each value parsed as
    /// a TOML value (bare words fall back to strings).
    pub fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_with_overrides(&text, overrides)
    }

    pub fn from_toml_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ZkError::Format(e.message().to_string()))?;
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| ZkError::Format(format!("override {o:?} is not key=value")))?;
            let v = v.trim();
            let value = format!("x = {v}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("x"))
                .unwrap_or_else(|| toml::Value::String(v.to_string()));
            table.insert(k.trim().to_string(), value);
        }
        toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ZkError::Format(e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.x_scale, self.y_scale, self.mx, self.my, self.dt)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let mut cfg = IntegratorConfig::new(self.scheme, self.dt, self.tend)?
            .with_snapshot_every(self.snapshot_every);
        cfg.dealias = self.dealias;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn imultiplier(&self) -> Result<IMultiplier> {
        IMultiplier::new(self.n, self.s)
    }

    /// Estimate/band points of a bilinear suite.
    pub fn suite_points(&self) -> Result<Vec<SuitePoint>> {
        let mut out = Vec::new();
        for id in &self.estimates {
            let b = |n1, l1, n2, l2| BandPair { n1, l1, n2, l2 };
            let defaults: Vec<(Estimate, BandPair)> = match id.as_str() {
                "b1" => vec![
                    (Estimate::B1, b(4.0, 1.0, 4.0, 1.0)),
                    (Estimate::B1, b(2.0, 4.0, 8.0, 1.0)),
                ],
                "b2" => vec![
                    (Estimate::B2, b(1.0, 1.0, 4.0, 1.0)),
                    (Estimate::B2, b(2.0, 1.0, 8.0, 2.0)),
                ],
                "b3" => vec![
                    (Estimate::B3 { k: 2.0 }, b(4.0, 1.0, 4.0, 1.0)),
                    (Estimate::B3 { k: 4.0 }, b(2.0, 1.0, 8.0, 4.0)),
                ],
                "b4" => vec![
                    (Estimate::B4 { theta: self.theta }, b(1.0, 1.0, 4.0, 1.0)),
                    (Estimate::B4 { theta: self.theta }, b(2.0, 1.0, 8.0, 2.0)),
                ],
                other => {
                    return Err(ZkError::InvalidArgument(format!(
                        "unknown estimate {other:?}"
                    )))
                }
            };
            if self.bands.is_empty() {
                out.extend(
                    defaults
                        .into_iter()
                        .map(|(estimate, bands)| SuitePoint { estimate, bands }),
                );
            } else {
                let estimate = match id.as_str() {
                    "b3" => Estimate::B3 { k: self.k_band },
                    _ => defaults[0].0,
                };
                for r in &self.bands {
                    out.push(SuitePoint {
                        estimate,
                        bands: b(r[0], r[1], r[2], r[3]),
                    });
                }
            }
        }
        Ok(out)
    }
}

/// All representability and consistency checks, as messages.
pub fn validate(cfg: &ScenarioConfig) -> Vec<String> {
    let Some(scenario) = cfg.scenario else {
        return vec!["missing key `scenario`".into()];
    };
    let grid = cfg.grid();
    let mut out = Vec::new();
    if let Err(e) = &grid {
        out.push(e.to_string());
    }
    let mut push = |r: Result<()>| {
        if let Err(e) = r {
            out.push(e.to_string());
        }
    };
    let empty = |name: &str, len: usize| -> Result<()> {
        if len == 0 {
            Err(ZkError::InvalidArgument(format!(
                "sweep list `{name}` is empty"
            )))
        } else {
            Ok(())
        }
    };
    let fits_grid = |n: f64| -> Result<()> {
        if let Ok(g) = &grid {
            // beyond the largest resolved modulus I is the identity on the grid
            let xi = (g.mx / 2 - 1) as f64 / g.x_scale;
            let q = (g.my / 2 - 1) as f64 / g.y_scale;
            let band = (3.0f64.sqrt() * xi).max(q);
            if n >= band {
                return Err(ZkError::InvalidArgument(format!(
                    "N={n} lies beyond the resolved band |ζ|_w < {band:.4} of the {}x{} grid",
                    g.mx, g.my
                )));
            }
        }
        Ok(())
    };
    match scenario {
        Scenario::Conserve | Scenario::Soliton | Scenario::Increment | Scenario::DriftVsN => {
            push(cfg.integrator().map(|_| ()));
            if let Ok(g) = &grid {
                if cfg.data == DataKind::Spectrum
                    && (cfg.kmax < 0
                        || cfg.jmax < 0
                        || cfg.kmax >= (g.mx / 2) as i64
                        || cfg.jmax >= (g.my / 2) as i64)
                {
                    push(Err(ZkError::InvalidArgument(format!(
                        "spectrum modes ({}, {}) do not fit the {}x{} grid",
                        cfg.kmax, cfg.jmax, g.mx, g.my
                    ))));
                }
            }
            if scenario == Scenario::DriftVsN {
                push(empty("n_list", cfg.n_list.len()));
                for &n in &cfg.n_list {
                    push(IMultiplier::new(n, cfg.s).map(|_| ()));
                    push(fits_grid(n));
                }
            } else if scenario != Scenario::Soliton {
                push(cfg.imultiplier().map(|_| ()));
                push(fits_grid(cfg.n));
            }
            if scenario == Scenario::Soliton && (cfg.speed.is_nan() || cfg.speed <= 0.0) {
                push(Err(ZkError::InvalidArgument(format!(
                    "soliton speed {} must be > 0",
                    cfg.speed
                ))));
            }
        }
        Scenario::BilinearSuite => {
            push(empty("estimates", cfg.estimates.len()));
            if cfg.seeds == 0 {
                push(Err(ZkError::InvalidArgument("seeds must be >= 1".into())));
            }
            match cfg.suite_points() {
                Ok(points) => {
                    for p in points {
                        let b = p.bands;
                        if [b.n1, b.l1, b.n2, b.l2]
                            .iter()
                            .any(|v| !(v.is_finite() && *v > 0.0))
                        {
                            push(Err(ZkError::InvalidArgument(format!(
                                "band {b:?} must be positive"
                            ))));
                            continue;
                        }
                        push(band_grid(b.n1.max(b.n2), b.l1.max(b.l2), cfg.periods).map(|_| ()));
                        let sep = b.n1.max(b.n2) >= 4.0 * b.n1.min(b.n2);
                        if matches!(p.estimate, Estimate::B2 | Estimate::B4 { .. }) && !sep {
                            push(Err(ZkError::InvalidArgument(format!(
                                "{} needs N1∨N2 >= 4·N1∧N2, band {b:?}",
                                p.estimate.id()
                            ))));
                        }
                    }
                }
                Err(e) => push(Err(e)),
            }
            if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
                push(Err(ZkError::InvalidArgument(format!(
                    "θ={} must lie in (0, 1)",
                    cfg.theta
                ))));
            }
        }
        Scenario::CommutatorSuite => {
            push(empty("n_list", cfg.n_list.len()));
            for &n in &cfg.n_list {
                push(IMultiplier::new(n, cfg.s).map(|_| ()));
            }
            if let Ok(g) = &grid {
                if cfg.zmax >= g.resolved_modulus() {
                    push(Err(ZkError::InvalidArgument(format!(
                        "zmax={} lies beyond the resolved band |ζ|_w < {:.4}",
                        cfg.zmax,
                        g.resolved_modulus()
                    ))));
                }
                if g.x_scale.fract() != 0.0 || g.y_scale.fract() != 0.0 {
                    push(Err(ZkError::InvalidArgument(
                        "space-time products need integer x_scale and y_scale".into(),
                    )));
                }
            }
            if cfg.mt < 8 || !cfg.mt.is_multiple_of(2) {
                push(Err(ZkError::InvalidArgument(format!(
                    "mt={} must be even and >= 8",
                    cfg.mt
                ))));
            }
            if !(cfg.eps > 0.0 && cfg.eps < 0.25) {
                push(Err(ZkError::InvalidArgument(format!(
                    "ε={} must lie in (0, 1/4)",
                    cfg.eps
                ))));
            }
        }
        Scenario::CountingSuite => {
            if cfg.instances == 0 {
                push(Err(ZkError::InvalidArgument(
                    "instances must be >= 1".into(),
                )));
            }
        }
        Scenario::ScalingSuite => {
            push(empty("lambda_list", cfg.lambda_list.len()));
            for &l in &cfg.lambda_list {
                if !(l >= 1.0 && l.log2().fract() == 0.0) {
                    push(Err(ZkError::InvalidArgument(format!(
                        "λ={l} must be a power of two >= 1"
                    ))));
                }
            }
            push(cfg.imultiplier().map(|_| ()));
            if let Ok(g) = &grid {
                if !(cfg.zlo < cfg.zhi && cfg.zhi < g.resolved_modulus()) {
                    push(Err(ZkError::InvalidArgument(format!(
                        "annulus [{}, {}] must be nonempty and below the resolved band {:.4}",
                        cfg.zlo,
                        cfg.zhi,
                        g.resolved_modulus()
                    ))));
                }
            }
        }
        Scenario::GwpTable => {
            push(empty("s_list", cfg.s_list.len()));
            push(empty("t_list", cfg.t_list.len()));
            for s in &cfg.s_list {
                match s.to_ratio() {
                    Ok(q) if !is_feasible(q) => {
                        push(Err(ZkError::Infeasible(format!(
                            "infeasible s={q}: need 29/31 < s < 1"
                        ))));
                    }
                    Ok(_) => {}
                    Err(e) => push(Err(e)),
                }
            }
            for &t in &cfg.t_list {
                if !(t.is_finite() && t >= 1.0) {
                    push(Err(ZkError::InvalidArgument(format!("T={t} must be >= 1"))));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let c = ScenarioConfig::from_toml("scenario = \"conserve\"").unwrap();
        assert_eq!(c.scenario, Some(Scenario::Conserve));
        assert_eq!(c.mx, 512);
        assert!(validate(&c).is_empty(), "{:?}", validate(&c));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(ScenarioConfig::from_toml("scenario = \"conserve\"\nfoo = 1").is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let c = ScenarioConfig::from_toml_with_overrides(
            "scenario = \"conserve\"\nmx = 64",
            &[
                "mx=128".into(),
                "scheme=strang".into(),
                "n_list=[4, 8]".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.mx, 128);
        assert_eq!(c.scheme, Scheme::Strang);
        assert_eq!(c.n_list, vec![4.0, 8.0]);
    }

    #[test]
    fn threshold_s_is_infeasible() {
        let c = ScenarioConfig::from_toml("scenario = \"gwp_table\"\ns_list = [\"29/31\", 0.95]")
            .unwrap();
        let d = validate(&c);
        assert_eq!(d.len(), 1);
        assert!(d[0].contains("infeasible s"), "{d:?}");
    }

    #[test]
    fn empty_sweep_and_large_n() {
        let c = ScenarioConfig::from_toml("scenario = \"drift_vs_N\"\nn_list = []").unwrap();
        assert!(validate(&c)[0].contains("empty"));
        let c = ScenarioConfig::from_toml("scenario = \"increment\"\nn = 1000.0").unwrap();
        let d = validate(&c);
        assert!(d.iter().any(|m| m.contains("resolved band")), "{d:?}");
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ScenarioConfig::from_toml("scenario = \"drift_vs_N\"").unwrap();
        assert_eq!(ScenarioConfig::from_toml(&c.to_toml()).unwrap(), c);
    }
}
