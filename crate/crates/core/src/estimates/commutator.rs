use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::RatioReport;
use crate::error::{Result, ZkError};
use crate::functionals::xsb_norm;
use crate::multipliers::{apply_i, IMultiplier};
use crate::spectral::{
    bilinear_modes, norm, GridSpec, PairSymbol, SpaceTimeField, SpectralField, TimeWindow,
};
use crate::symbols::weighted_modulus;

/// A windowed free solution from Gaussian data on `|ζ|_w ≤ zmax`, with unit
/// `L²` norm at time zero before windowing.
pub fn random_windowed_field(
    grid: &GridSpec,
    zmax: f64,
    seed: u64,
    mt: usize,
    tspan: f64,
) -> Result<SpaceTimeField> {
    let kmax = (zmax / 3f64.sqrt() * grid.x_scale).floor() as i64;
    let jmax = (zmax * grid.y_scale).floor() as i64;
    if kmax >= (grid.mx / 2) as i64 || jmax >= (grid.my / 2) as i64 {
        return Err(ZkError::InvalidArgument(format!(
            "|ζ| <= {zmax} does not fit the {}x{} grid",
            grid.mx, grid.my
        )));
    }
    let mut f = SpectralField::zeros(*grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..=kmax {
        for j in -jmax..=jmax {
            if k == 0 && j < 0 {
                continue;
            }
            let (xi, q) = (k as f64 / grid.x_scale, j as f64 / grid.y_scale);
            if weighted_modulus(xi, q) > zmax {
                continue;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let c = if (k, j) == (0, 0) {
                Complex64::new(re, 0.0)
            } else {
                Complex64::new(re, im)
            };
            f.set_mode(k, j, c, true)?;
        }
    }
    let f = f.scale(1.0 / f.l2_norm());
    Ok(SpaceTimeField::free_solution(&f, mt, tspan)?.windowed(&TimeWindow::flat_top()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutatorReport {
    /// `lhs = ‖∂ₓ(IuIv − I(uv))‖_{X^{1,−1/2+ε}}`,
    /// `rhs = N^{−1/10+ε}‖Iu‖_{X^{1,1/2+ε}}‖Iv‖_{X^{1,1/2+ε}}`.
    pub report: RatioReport,
    /// `lhs / (‖Iu‖‖Iv‖)`, the ratio without the `N` factor.
    pub normalized: f64,
    /// `‖∂ₓI(uv)‖_{X^{1,−1/2+ε}} / (‖Iu‖‖Iv‖)`.
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuarticReport {
    /// `lhs = |∫I(u²)∂ₓ((Iu)² − I(u²))|`, `rhs = N^{−1/10+ε}‖Iu‖⁴_{X^{1,1/2+ε}}`.
    pub report: RatioReport,
    pub normalized: f64,
    /// Imaginary part of the space-time quadrature, zero for real fields.
    pub imag_residue: f64,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(ZkError::InvalidArgument(format!(
            "ε={eps} must lie in (0, 1/4)"
        )));
    }
    Ok(())
}

fn ratio_report(id: &str, imul: &IMultiplier, eps: f64, lhs: f64, rhs: f64) -> RatioReport {
    RatioReport {
        estimate_id: id.into(),
        n1: imul.n,
        n2: imul.n,
        l1: 0.0,
        l2: 0.0,
        k: None,
        theta: None,
        eps,
        seed: 0,
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        converged: true,
    }
}

pub fn probe_commutator(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    imul: &IMultiplier,
    eps: f64,
) -> Result<CommutatorReport> {
    check_eps(eps)?;
    let m = |xi: f64, q: f64| imul.m_at(xi, q);
    let comm: PairSymbol = &|x1, q1, x2, q2| m(x1, q1) * m(x2, q2) - m(x1 + x2, q1 + q2);
    let plain: PairSymbol = &|x1, q1, x2, q2| m(x1 + x2, q1 + q2);
    let b = eps - 0.5;
    let dmu = u.mu_spacing();
    let (mut sc, mut sb) = (0.0, 0.0);
    bilinear_modes(u, v, &[comm, plain], |pm| {
        let wz = (1.0 + weighted_modulus(pm.xi, pm.q)).powi(2) * pm.xi * pm.xi;
        if wz == 0.0 {
            return;
        }
        let acc = |col: &[(i64, Complex64)]| -> f64 {
            col.iter()
                .map(|&(l, c)| (1.0 + (l as f64 * dmu).abs()).powf(2.0 * b) * c.norm_sqr())
                .sum()
        };
        sc += wz * acc(&pm.columns[0]);
        sb += wz * acc(&pm.columns[1]);
    })?;
    let w = norm::spacetime_parseval_weight(u.grid(), u.tspan());
    let lhs = (sc * w).sqrt();
    let base = (sb * w).sqrt();
    let den =
        xsb_norm(&apply_i(u, imul), 1.0, 0.5 + eps)? * xsb_norm(&apply_i(v, imul), 1.0, 0.5 + eps)?;
    let rhs = imul.n.powf(-0.1 + eps) * den;
    Ok(CommutatorReport {
        report: ratio_report("commutator", imul, eps, lhs, rhs),
        normalized: lhs / den,
        baseline: base / den,
    })
}

pub fn probe_quartic(u: &SpaceTimeField, imul: &IMultiplier, eps: f64) -> Result<QuarticReport> {
    check_eps(eps)?;
    let m = |xi: f64, q: f64| imul.m_at(xi, q);
    let isq: PairSymbol = &|x1, q1, x2, q2| m(x1 + x2, q1 + q2);
    let comm: PairSymbol = &|x1, q1, x2, q2| m(x1, q1) * m(x2, q2) - m(x1 + x2, q1 + q2);
    let mut acc = Complex64::new(0.0, 0.0);
    bilinear_modes(u, u, &[isq, comm], |pm| {
        let dx = Complex64::new(0.0, pm.xi);
        // both columns are sorted by l; merge on equal modulation
        let (bcol, dcol) = (&pm.columns[0], &pm.columns[1]);
        let (mut a, mut d) = (0, 0);
        while a < bcol.len() && d < dcol.len() {
            match bcol[a].0.cmp(&dcol[d].0) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => d += 1,
                std::cmp::Ordering::Equal => {
                    acc += bcol[a].1 * (dx * dcol[d].1).conj();
                    a += 1;
                    d += 1;
                }
            }
        }
    })?;
    let acc = acc * norm::spacetime_parseval_weight(u.grid(), u.tspan());
    let lhs = acc.re.abs();
    let den = xsb_norm(&apply_i(u, imul), 1.0, 0.5 + eps)?.powi(4);
    let rhs = imul.n.powf(-0.1 + eps) * den;
    Ok(QuarticReport {
        report: ratio_report("quartic", imul, eps, lhs, rhs),
        normalized: lhs / den,
        imag_residue: acc.im.abs(),
    })
}
