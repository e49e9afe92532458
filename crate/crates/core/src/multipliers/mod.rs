//! Smooth cutoffs, Littlewood-Paley pieces and the I-operator.
//!
//! All operators here are Fourier multipliers, so they commute with each
//! other. Band pieces overlap (`φ` lives on `[1/2, 2]`), so `P_N` is not an
//! orthogonal projection.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Result, ZkError};
use crate::spectral::{SpaceTimeField, SpectralField};
use crate::symbols::weighted_modulus;

/// The cutoff `η`: 1 on `[-1, 1]`, 0 outside `[-2, 2]`, and
/// `cos²(π(|x|-1)/2)` in between (C¹).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BumpProfile;

impl BumpProfile {
    pub const KIND: &'static str = "raised-cosine";

    pub fn eval(&self, x: f64) -> f64 {
        eta(x)
    }
}

pub fn eta(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let c = (0.5 * PI * (a - 1.0)).cos();
        c * c
    }
}

/// `φ(x) = η(x) − η(2x)`, supported in `1/2 ≤ |x| ≤ 2`.
pub fn phi(x: f64) -> f64 {
    eta(x) - eta(2.0 * x)
}

/// Fields that admit spatial Fourier multipliers `a(ξ, q)`.
pub trait SpatialMultiply: Sized {
    fn multiply(&self, symbol: impl Fn(f64, f64) -> f64) -> Self;
}

impl SpatialMultiply for SpectralField {
    fn multiply(&self, symbol: impl Fn(f64, f64) -> f64) -> Self {
        self.map_symbol(symbol)
    }
}

impl SpatialMultiply for SpaceTimeField {
    fn multiply(&self, symbol: impl Fn(f64, f64) -> f64) -> Self {
        self.map_spatial(symbol)
    }
}

fn check_dyadic(name: &str, n: f64) -> Result<()> {
    if !(n.is_finite() && n >= 1.0 && n.log2().fract() == 0.0) {
        return Err(ZkError::InvalidArgument(format!(
            "{name}={n} is not a dyadic number >= 1"
        )));
    }
    Ok(())
}

/// `P_N`: multiplies by `φ(|ζ|_w / N)`.
pub fn project_pn<F: SpatialMultiply>(f: &F, n: f64) -> Result<F> {
    check_dyadic("N", n)?;
    Ok(f.multiply(|xi, q| phi(weighted_modulus(xi, q) / n)))
}

/// The low block `η(2|ζ|_w)` completing the dyadic pieces:
/// `η(2|ζ|) + Σ_{N=1}^{2^J} φ(|ζ|/N) = η(|ζ|/2^J)`.
pub fn project_low<F: SpatialMultiply>(f: &F) -> F {
    f.multiply(|xi, q| eta(2.0 * weighted_modulus(xi, q)))
}

/// `Q_L`: multiplies by `φ((τ − σ)/L)`.
pub fn project_ql(u: &SpaceTimeField, l: f64) -> Result<SpaceTimeField> {
    check_dyadic("L", l)?;
    Ok(u.map_modulation(|mu| phi(mu / l)))
}

/// `R_K`: multiplies by `φ(ξ/K)`.
pub fn restrict_rk<F: SpatialMultiply>(f: &F, k: f64) -> Result<F> {
    check_dyadic("K", k)?;
    Ok(f.multiply(|xi, _| phi(xi / k)))
}

/// The I-operator symbol `m(ζ) = min(1, (|ζ|_w/N)^{s−1})`.
///
/// Continuous and non-increasing, exactly 1 on `|ζ|_w ≤ N` and the pure
/// power law above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IMultiplier {
    pub n: f64,
    pub s: f64,
}

impl IMultiplier {
    pub fn new(n: f64, s: f64) -> Result<Self> {
        if !(n.is_finite() && n >= 2.0) {
            return Err(ZkError::InvalidArgument(format!(
                "I-multiplier N={n} must be >= 2"
            )));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(ZkError::InvalidArgument(format!(
                "I-multiplier s={s} must lie in (0, 1)"
            )));
        }
        Ok(Self { n, s })
    }

    /// `m` as a function of the weighted modulus.
    pub fn m(&self, modulus: f64) -> f64 {
        if modulus <= self.n {
            1.0
        } else {
            (modulus / self.n).powf(self.s - 1.0)
        }
    }

    pub fn m_at(&self, xi: f64, q: f64) -> f64 {
        self.m(weighted_modulus(xi, q))
    }

    /// `(|ζ|, m)` on `points` equispaced moduli in `[0, zmax]`.
    pub fn table(&self, zmax: f64, points: usize) -> Vec<(f64, f64)> {
        let steps = points.max(2) - 1;
        (0..=steps)
            .map(|k| {
                let z = zmax * k as f64 / steps as f64;
                (z, self.m(z))
            })
            .collect()
    }

    pub fn write_table_csv<W: Write>(&self, w: W, zmax: f64, points: usize) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| ZkError::Format(e.to_string());
        out.write_record(["modulus", "m"]).map_err(io)?;
        for (z, m) in self.table(zmax, points) {
            out.write_record([format!("{z:.17e}"), format!("{m:.17e}")])
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn apply_i<F: SpatialMultiply>(f: &F, imul: &IMultiplier) -> F {
    f.multiply(|xi, q| imul.m_at(xi, q))
}
