//! Mass, energy, the modified energy `E[Iu]` and its increment.
//!
//! With `A = ΔIu`, `B = I(u²)`, `C = (Iu)²` the modified energy obeys
//! `dE[Iu]/dt = −½∫A ∂ₓ(C − B) − ¼∫B ∂ₓ(C − B)`; the two integrals are
//! reported separately as `inc3` and `inc4`.

use std::io::Write;

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Result, ZkError};
use crate::multipliers::{apply_i, IMultiplier};
use crate::spectral::{cubic_integral, square, SpaceTimeField, SpectralField};

/// `∫u² dxdy`.
pub fn mass(f: &SpectralField) -> f64 {
    let n = f.l2_norm();
    n * n
}

/// `½∫|∇u|² − ⅙∫u³`, with the Euclidean gradient.
pub fn energy(f: &SpectralField) -> f64 {
    0.5 * gradient_sq(f) - cubic_integral(f) / 6.0
}

/// `∫|∇u|²`.
pub fn gradient_sq(f: &SpectralField) -> f64 {
    let g = f.map_symbol(|xi, q| (xi * xi + q * q).sqrt());
    mass(&g)
}

pub fn modified_energy(f: &SpectralField, imul: &IMultiplier) -> f64 {
    energy(&apply_i(f, imul))
}

/// `(inc3, inc4) = (−½∫A∂ₓ(C−B), −¼∫B∂ₓ(C−B))` at one instant.
pub fn increment_terms(f: &SpectralField, imul: &IMultiplier) -> (f64, f64) {
    let iu = apply_i(f, imul);
    let a = iu.laplacian();
    let b = apply_i(&square(f), imul);
    let c = square(&iu);
    let dcb = c.sub(&b).expect("same grid").dx();
    let inc3 = -0.5 * a.inner(&dcb).re;
    let inc4 = -0.25 * b.inner(&dcb).re;
    (inc3, inc4)
}

/// `dE[Iu]/dt` along the flow at the given state.
pub fn increment_integrand(f: &SpectralField, imul: &IMultiplier) -> f64 {
    let (a, b) = increment_terms(f, imul);
    a + b
}

/// Time series of the conserved and almost-conserved quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub ei: Vec<f64>,
    pub inc3: Vec<f64>,
    pub inc4: Vec<f64>,
    /// Composite-Simpson integral of `inc3 + inc4` from 0 to each time.
    pub cumulative: Vec<f64>,
    /// `EI(t) − EI(0) − cumulative(t)`.
    pub mismatch: Vec<f64>,
    /// Final mismatch with every second snapshot dropped, when available.
    pub coarse_mismatch: Option<f64>,
}

impl EnergyLedger {
    pub const CSV_HEADER: [&'static str; 8] = [
        "t",
        "M",
        "E",
        "EI",
        "inc3",
        "inc4",
        "cumulative_quadrature",
        "mismatch",
    ];

    pub fn final_mismatch(&self) -> f64 {
        *self.mismatch.last().expect("nonempty ledger")
    }

    pub fn max_mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        self.mass.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max) / m0.max(f64::MIN_POSITIVE)
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy
            .iter()
            .map(|e| (e - e0).abs())
            .fold(0.0, f64::max)
            / (e0.abs() + 1.0)
    }

    /// Fails when the final mismatch grew as the snapshot spacing halved.
    pub fn check_refinement(&self) -> Result<()> {
        if let Some(c) = self.coarse_mismatch {
            let fine = self.final_mismatch().abs();
            let floor = 1e-13 * (self.ei[0].abs() + 1.0);
            if fine > c.abs() && fine > floor {
                return Err(ZkError::NotConverged(format!(
                    "increment mismatch grew from {:.3e} to {fine:.3e} under refinement",
                    c.abs()
                )));
            }
        }
        Ok(())
    }

    /// `max_t |EI(t) − EI(0)|`.
    pub fn ei_drift(&self) -> f64 {
        let e0 = self.ei[0];
        self.ei.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| ZkError::Format(e.to_string());
        out.write_record(Self::CSV_HEADER).map_err(io)?;
        for k in 0..self.times.len() {
            let row = [
                self.times[k],
                self.mass[k],
                self.energy[k],
                self.ei[k],
                self.inc3[k],
                self.inc4[k],
                self.cumulative[k],
                self.mismatch[k],
            ];
            out.write_record(row.iter().map(|v| format!("{v:.17e}")))
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Cumulative composite Simpson on a uniform grid. At odd nodes the last
/// panel is closed with the quadratic through the neighbouring nodes.
pub fn cumulative_simpson(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    let mut even = 0.0;
    for k in 1..n {
        if k % 2 == 0 {
            even += h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
            out[k] = even;
        } else if k + 1 < n {
            out[k] = even + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
        } else {
            out[k] = even + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
        }
    }
    out
}

fn uniform_spacing(times: &[f64]) -> Result<f64> {
    let h = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if !uniform {
        return Err(ZkError::InvalidArgument(
            "snapshots must be equally spaced for quadrature".into(),
        ));
    }
    Ok(h)
}

/// Builds the ledger and checks the increment identity by quadrature.
///
/// When the trajectory has at least 5 snapshots and an even number of
/// intervals, the final mismatch is recomputed on every second snapshot; a
/// finer mismatch larger than the coarse one is reported as
/// [`ZkError::NotConverged`].
pub fn increment_check(traj: &Trajectory, imul: &IMultiplier) -> Result<EnergyLedger> {
    let ledger = energy_ledger(traj, imul)?;
    ledger.check_refinement()?;
    Ok(ledger)
}

/// The ledger of [`increment_check`] without the refinement test.
pub fn energy_ledger(traj: &Trajectory, imul: &IMultiplier) -> Result<EnergyLedger> {
    if traj.len() < 3 {
        return Err(ZkError::InvalidArgument(
            "increment check needs >= 3 snapshots".into(),
        ));
    }
    let times = traj.times().to_vec();
    let h = uniform_spacing(&times)?;
    let states = traj.states();
    let mass_s: Vec<f64> = states.iter().map(mass).collect();
    let energy_s: Vec<f64> = states.iter().map(energy).collect();
    let ei: Vec<f64> = states.iter().map(|s| modified_energy(s, imul)).collect();
    let (inc3, inc4): (Vec<f64>, Vec<f64>) =
        states.iter().map(|s| increment_terms(s, imul)).unzip();
    let total: Vec<f64> = inc3.iter().zip(&inc4).map(|(a, b)| a + b).collect();
    let cumulative = cumulative_simpson(&total, h);
    let mismatch: Vec<f64> = ei
        .iter()
        .zip(&cumulative)
        .map(|(e, c)| e - ei[0] - c)
        .collect();
    let n = times.len() - 1;
    let coarse_mismatch = (n >= 4 && n.is_multiple_of(2)).then(|| {
        let coarse: Vec<f64> = total.iter().step_by(2).copied().collect();
        let c = cumulative_simpson(&coarse, 2.0 * h);
        ei[n] - ei[0] - c[c.len() - 1]
    });
    let ledger = EnergyLedger {
        times,
        mass: mass_s,
        energy: energy_s,
        ei,
        inc3,
        inc4,
        cumulative,
        mismatch,
        coarse_mismatch,
    };
    Ok(ledger)
}

/// `X^{s,b}` norm of a space-time field (no restriction to a time slab).
pub fn xsb_norm(u: &SpaceTimeField, s: f64, b: f64) -> Result<f64> {
    if !(-2.0..=3.0).contains(&s) || !(-1.0..=1.0).contains(&b) {
        return Err(ZkError::InvalidArgument(format!(
            "X^(s,b) exponents (s={s}, b={b}) outside s∈[-2,3], b∈[-1,1]"
        )));
    }
    Ok(u.weighted_norm(s, b))
}

/// Constants in `‖∇Iu‖² ≤ C₁‖u₀‖⁴ + C₂E[Iu]`.
///
/// From `∫v³ ≤ κ‖v‖²‖∇v‖` and Young's inequality, `C₂ = 4` and
/// `C₁ = κ²/9` with `κ` the largest ratio `∫v³/(‖v‖²‖∇v‖)` seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnFit {
    pub kappa: f64,
    pub c1: f64,
    pub c2: f64,
    /// Largest `‖∇Iu‖² / (C₁‖u₀‖⁴ + C₂E[Iu])` over the states.
    pub max_ratio: f64,
}

pub fn gn_fit(states: &[SpectralField], imul: &IMultiplier) -> Result<GnFit> {
    if states.is_empty() {
        return Err(ZkError::InvalidArgument("no states to fit".into()));
    }
    let m0 = mass(&states[0]);
    let mut kappa: f64 = 0.0;
    let mut parts = Vec::with_capacity(states.len());
    for s in states {
        let v = apply_i(s, imul);
        let grad2 = gradient_sq(&v);
        let l2 = mass(&v);
        let cube = cubic_integral(&v);
        if grad2 > 0.0 && l2 > 0.0 {
            kappa = kappa.max(cube / (l2 * grad2.sqrt()));
        }
        parts.push((grad2, energy(&v)));
    }
    let c1 = kappa * kappa / 9.0;
    let c2 = 4.0;
    let max_ratio = parts
        .iter()
        .map(|(g2, e)| {
            let rhs = c1 * m0 * m0 + c2 * e;
            if *g2 == 0.0 {
                0.0
            } else {
                g2 / rhs
            }
        })
        .fold(0.0, f64::max);
    Ok(GnFit {
        kappa,
        c1,
        c2,
        max_ratio,
    })
}
