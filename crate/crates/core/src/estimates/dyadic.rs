use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, ZkError};
use crate::multipliers::phi;
use crate::spectral::{GridSpec, SpaceTimeField};
use crate::symbols::weighted_modulus;

/// A random unit-norm field on the bands `|ζ|_w ~ N`, `|τ−σ| ~ L` and,
/// optionally, `|ξ| ~ K`.
#[derive(Debug, Clone)]
pub struct DyadicSample {
    pub n: f64,
    pub l: f64,
    pub k: Option<f64>,
    pub seed: u64,
    pub field: SpaceTimeField,
}

/// The smallest `Λ = λ = 1` lattice holding bands up to `(nmax, lmax)`,
/// with `Tspan = 2π·periods` (modulation spacing `1/periods`).
pub fn band_grid(nmax: f64, lmax: f64, periods: u32) -> Result<(GridSpec, usize, f64)> {
    if periods == 0 {
        return Err(ZkError::InvalidArgument("periods must be >= 1".into()));
    }
    let even = |m: usize| (m + m % 2).max(8);
    let kmax = (2.0 * nmax / 3f64.sqrt()).floor() as usize;
    let jmax = (2.0 * nmax).floor() as usize;
    let lmax_idx = (2.0 * lmax * periods as f64).floor() as usize;
    let grid = GridSpec::new(1.0, 1.0, even(2 * kmax + 2), even(2 * jmax + 2), 1.0)?;
    Ok((grid, even(2 * lmax_idx + 2), 2.0 * PI * periods as f64))
}

/// Draws a [`DyadicSample`].
///
/// Gaussian coefficients are drawn in a fixed signed order over the band
/// support, so the sample depends only on the band, the lattice spacings
/// and the seed, not on how large the storage grid is. The band profile is
/// `φ(|ζ|_w/N)·φ(μ/L)` (times `φ(ξ/K)`), the result is Hermitian and has
/// unit `L²` norm.
pub fn make_dyadic(
    grid: &GridSpec,
    mt: usize,
    tspan: f64,
    n: f64,
    l: f64,
    k: Option<f64>,
    seed: u64,
) -> Result<DyadicSample> {
    let mut field = SpaceTimeField::zeros(*grid, mt, tspan)?;
    let dmu = field.mu_spacing();
    let kmax = (2.0 * n / 3f64.sqrt() * grid.x_scale).floor() as i64;
    let jmax = (2.0 * n * grid.y_scale).floor() as i64;
    let lmax = (2.0 * l / dmu).floor() as i64;
    if kmax >= (grid.mx / 2) as i64 || jmax >= (grid.my / 2) as i64 || lmax >= (mt / 2) as i64 {
        return Err(ZkError::InvalidArgument(format!(
            "band N={n}, L={l} does not fit the {}x{}x{mt} lattice",
            grid.mx, grid.my
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0usize;
    for kk in -kmax..=kmax {
        for jj in -jmax..=jmax {
            for ll in -lmax..=lmax {
                // (k, j, l) and its mirror share one draw, made at the
                // lexicographically positive member
                if (kk, jj, ll) <= (0, 0, 0) {
                    continue;
                }
                let xi = kk as f64 / grid.x_scale;
                let q = jj as f64 / grid.y_scale;
                let mu = ll as f64 * dmu;
                let mut w = phi(weighted_modulus(xi, q) / n) * phi(mu / l);
                if let Some(kb) = k {
                    w *= phi(xi / kb);
                }
                if w == 0.0 {
                    continue;
                }
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let c = Complex64::new(re, im) * w;
                let at = |a: i64, b: i64, t: i64| {
                    (
                        grid.index_x(a).expect("in band"),
                        grid.index_y(b).expect("in band"),
                        field.index_t(t).expect("in band"),
                    )
                };
                let (i, j, t) = at(kk, jj, ll);
                let (i2, j2, t2) = at(-kk, -jj, -ll);
                field.coeffs_mut()[[i, j, t]] = c;
                field.coeffs_mut()[[i2, j2, t2]] = c.conj();
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(ZkError::EmptyBand(format!("N={n}, L={l}, K={k:?}")));
    }
    let norm = field.l2_norm();
    Ok(DyadicSample {
        n,
        l,
        k,
        seed,
        field: field.scale(1.0 / norm),
    })
}
