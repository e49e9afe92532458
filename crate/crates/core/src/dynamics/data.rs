//! Initial data used by the scenarios and tests.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ZkError};
use crate::spectral::{forward, inverse, GridSpec, PhysicalField, SpectralField};

/// `a·exp(−(x−x₀)²/w)·(1 + c·cos y)` centred in the box.
pub fn gaussian_bump(
    grid: &GridSpec,
    amplitude: f64,
    width: f64,
    ymod: f64,
) -> Result<SpectralField> {
    let x0 = grid.x_length() / 2.0;
    let f = PhysicalField::from_fn(*grid, |x, y| {
        amplitude * (-(x - x0).powi(2) / width).exp() * (1.0 + ymod * y.cos())
    })?;
    Ok(forward(&f))
}

/// `3a·sech²((x−x₀)/2)·(1 + c·cos y)` centred in the box.
pub fn sech_bump(grid: &GridSpec, amplitude: f64, ymod: f64) -> Result<SpectralField> {
    let x0 = grid.x_length() / 2.0;
    let f = PhysicalField::from_fn(*grid, |x, y| {
        let z = (x - x0) / 2.0;
        3.0 * amplitude / z.cosh().powi(2) * (1.0 + ymod * y.cos())
    })?;
    Ok(forward(&f))
}

/// The KdV soliton `3c·sech²(√c(x − x₀ − ct)/2)`, summed over enough
/// periodic images to be smooth across the box edge.
pub fn line_soliton_profile(x: f64, t: f64, c: f64, x0: f64, period: f64) -> f64 {
    (-3..=3)
        .map(|k| {
            let z = c.sqrt() * (x + k as f64 * period - x0 - c * t) / 2.0;
            3.0 * c / z.cosh().powi(2)
        })
        .sum()
}

pub fn line_soliton(grid: &GridSpec, c: f64, x0: f64, t: f64) -> Result<SpectralField> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ZkError::InvalidArgument(format!(
            "soliton speed c={c} must be > 0"
        )));
    }
    let l = grid.x_length();
    Ok(forward(&PhysicalField::from_fn(*grid, |x, _| {
        line_soliton_profile(x, t, c, x0, l)
    })?))
}

/// Random phases on `0 ≤ k ≤ kmax`, `|j| ≤ jmax` with amplitudes
/// `(1+|ζ|_w)^{-decay}`, scaled so that `max|u| = umax`.
pub fn random_spectrum(
    grid: &GridSpec,
    kmax: i64,
    jmax: i64,
    decay: f64,
    umax: f64,
    seed: u64,
) -> Result<SpectralField> {
    if kmax >= (grid.mx / 2) as i64 || jmax >= (grid.my / 2) as i64 || kmax < 0 || jmax < 0 {
        return Err(ZkError::InvalidArgument(format!(
            "modes up to ({kmax}, {jmax}) do not fit the {}x{} grid",
            grid.mx, grid.my
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(*grid);
    for k in 0..=kmax {
        for j in -jmax..=jmax {
            if k == 0 && j <= 0 {
                continue;
            }
            let xi = k as f64 / grid.x_scale;
            let q = j as f64 / grid.y_scale;
            let z = (3.0 * xi * xi + q * q).sqrt();
            let amp = (1.0 + z).powf(-decay);
            let ph: f64 = rng.random::<f64>() * TAU;
            f.set_mode(k, j, Complex64::from_polar(amp, ph), true)?;
        }
    }
    let peak = inverse(&f)?.max_abs();
    if peak == 0.0 {
        return Err(ZkError::EmptyBand("random spectrum has no modes".into()));
    }
    Ok(f.scale(umax / peak))
}
