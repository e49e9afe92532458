//! Randomized probes of the bilinear, commutator and quartic estimates,
//! the rescaling identities and the global-iteration exponents.
//!
//! Probes never assert the implicit constants behind `≲`; they record
//! ratios `lhs / envelope` so that finiteness, refinement stability and the
//! direction of N-dependence can be checked.

mod bilinear;
mod commutator;
mod dyadic;
mod gwp;
mod scaling;

pub use bilinear::{
    bilinear_suite, envelope, probe_bilinear, product_l2, BandPair, Estimate, SuiteConfig,
    SuiteResult,
};
pub use commutator::{
    probe_commutator, probe_quartic, random_windowed_field, CommutatorReport, QuarticReport,
};
pub use dyadic::{band_grid, make_dyadic, DyadicSample};
pub use gwp::{gwp_arithmetic, gwp_arithmetic_f64, is_feasible, rational_from_f64, GwpRecord};
pub use scaling::{annulus_field, circle_averaged_l2_norm, fit_nabla_constant, rescale, NablaFit};

use std::io::Write;

use serde::Serialize;

use crate::error::{Result, ZkError};

/// Default `ε` standing in for every "0+" exponent.
pub const DEFAULT_EPS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub estimate_id: String,
    pub n1: f64,
    pub n2: f64,
    pub l1: f64,
    pub l2: f64,
    pub k: Option<f64>,
    pub theta: Option<f64>,
    pub eps: f64,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub converged: bool,
}

impl RatioReport {
    pub const CSV_HEADER: [&'static str; 13] = [
        "estimate_id",
        "N1",
        "N2",
        "L1",
        "L2",
        "K",
        "theta",
        "eps",
        "seed",
        "lhs",
        "rhs",
        "ratio",
        "converged",
    ];

    fn csv_row(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        vec![
            self.estimate_id.clone(),
            format!("{}", self.n1),
            format!("{}", self.n2),
            format!("{}", self.l1),
            format!("{}", self.l2),
            opt(self.k),
            opt(self.theta),
            format!("{}", self.eps),
            self.seed.to_string(),
            format!("{:.17e}", self.lhs),
            format!("{:.17e}", self.rhs),
            format!("{:.17e}", self.ratio),
            self.converged.to_string(),
        ]
    }
}

pub fn write_ratio_csv<W: Write>(w: W, reports: &[RatioReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| ZkError::Format(e.to_string());
    out.write_record(RatioReport::CSV_HEADER).map_err(io)?;
    for r in reports {
        out.write_record(r.csv_row()).map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
