//! The scaling `u^λ(x, y, t) = λ^{-2} u(x/λ, y/λ, t/λ³)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Result, ZkError};
use crate::multipliers::{apply_i, IMultiplier};
use crate::spectral::{GridSpec, SpectralField};
use crate::symbols::weighted_modulus;

/// `u₀^λ` on the `(λΛ, λλ_y)` cylinder, with `dt` scaled by `λ³`.
///
/// Grid samples pick up `λ^{-2}` and the cell area `λ²`, so the
/// coefficient array is unchanged; only the frequencies move to `ζ/λ`.
pub fn rescale(u0: &SpectralField, lambda: f64) -> Result<SpectralField> {
    let pow2 = lambda >= 1.0 && lambda.is_finite() && lambda.log2().fract() == 0.0;
    if !pow2 {
        return Err(ZkError::InvalidArgument(format!(
            "λ={lambda} must be a power of two >= 1"
        )));
    }
    let g = u0.grid();
    let grid = GridSpec::new(
        g.x_scale * lambda,
        g.y_scale * lambda,
        g.mx,
        g.my,
        g.dt * lambda.powi(3),
    )?;
    SpectralField::new(grid, u0.coeffs().clone())
}

/// `L²` norm with the `1/(2πλ)` weighting of the transverse circle.
pub fn circle_averaged_l2_norm(f: &SpectralField) -> f64 {
    f.l2_norm() / (2.0 * PI * f.grid().y_scale).sqrt()
}

/// Gaussian data on the annulus `zlo ≤ |ζ|_w ≤ zhi`, unit `L²` norm.
pub fn annulus_field(grid: &GridSpec, zlo: f64, zhi: f64, seed: u64) -> Result<SpectralField> {
    let mut f = SpectralField::zeros(*grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = (grid.mx / 2 - 1) as i64;
    let jmax = (grid.my / 2 - 1) as i64;
    let mut count = 0;
    for k in 0..=kmax {
        for j in -jmax..=jmax {
            if k == 0 && j <= 0 {
                continue;
            }
            let z = weighted_modulus(k as f64 / grid.x_scale, j as f64 / grid.y_scale);
            if z < zlo || z > zhi {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            f.set_mode(k, j, Complex64::new(re, im), true)?;
            count += 1;
        }
    }
    if count == 0 {
        return Err(ZkError::EmptyBand(format!("annulus [{zlo}, {zhi}]")));
    }
    if zhi >= grid.resolved_modulus() {
        return Err(ZkError::InvalidArgument(format!(
            "annulus radius {zhi} exceeds the resolved modulus {}",
            grid.resolved_modulus()
        )));
    }
    Ok(f.scale(1.0 / f.l2_norm()))
}

/// Fitted constants `C_λ = ‖∇Iu₀^λ‖ / (N^{1−s}λ^{−1−s}‖u₀‖_{H^s})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NablaFit {
    pub lambdas: Vec<f64>,
    pub constants: Vec<f64>,
    pub mean: f64,
    /// `max |C_λ/mean − 1|`.
    pub max_deviation: f64,
}

impl NablaFit {
    /// Every constant within `tol` (relative) of the mean.
    pub fn stable(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

pub fn fit_nabla_constant(
    u0: &SpectralField,
    imul: &IMultiplier,
    lambdas: &[f64],
) -> Result<NablaFit> {
    if lambdas.is_empty() {
        return Err(ZkError::InvalidArgument("no λ values to fit".into()));
    }
    let hs = u0.hs_norm(imul.s);
    if hs == 0.0 {
        return Err(ZkError::InvalidArgument("zero data".into()));
    }
    let mut constants = Vec::with_capacity(lambdas.len());
    for &lam in lambdas {
        let v = apply_i(&rescale(u0, lam)?, imul);
        let grad = v.map_symbol(|xi, q| (xi * xi + q * q).sqrt()).l2_norm();
        let env = imul.n.powf(1.0 - imul.s) / lam.powf(1.0 + imul.s);
        constants.push(grad / (env * hs));
    }
    let mean = constants.iter().sum::<f64>() / constants.len() as f64;
    let max_deviation = constants
        .iter()
        .map(|c| (c / mean - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(NablaFit {
        lambdas: lambdas.to_vec(),
        constants,
        mean,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, PhysicalField};

    fn data() -> SpectralField {
        let g = GridSpec::new(4.0, 1.0, 64, 16, 0.01).unwrap();
        forward(
            &PhysicalField::from_fn(g, |x, y| {
                (-(x - 12.0).powi(2) / 4.0).exp() * (1.0 + 0.5 * y.cos())
            })
            .unwrap(),
        )
    }

    #[test]
    fn unit_lambda_is_identity() {
        let u = data();
        assert_eq!(rescale(&u, 1.0).unwrap(), u);
    }

    #[test]
    fn l2_scales_inversely() {
        let u = data();
        for lam in [2.0, 4.0, 8.0] {
            let v = rescale(&u, lam).unwrap();
            assert!((v.l2_norm() * lam - u.l2_norm()).abs() <= 1e-12 * u.l2_norm());
            let pr = circle_averaged_l2_norm(&v) * lam.powf(1.5) / circle_averaged_l2_norm(&u);
            assert!((pr - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_dyadic_lambda_rejected() {
        assert!(rescale(&data(), 3.0).is_err());
        assert!(rescale(&data(), 0.5).is_err());
    }

    #[test]
    fn high_frequency_fit_is_flat() {
        let g = GridSpec::new(1.0, 1.0, 64, 96, 0.01).unwrap();
        let u = annulus_field(&g, 16.0, 40.0, 5).unwrap();
        let imul = IMultiplier::new(2.0, 0.95).unwrap();
        let fit = fit_nabla_constant(&u, &imul, &[2.0, 4.0, 8.0]).unwrap();
        assert!(fit.stable(1e-12), "{fit:?}");
    }
}
