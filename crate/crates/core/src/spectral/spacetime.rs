//! Space-time fields for restriction-norm experiments.
//!
//! A [`SpaceTimeField`] stores `Û(ξ, q, τ)` in the co-moving frame of the
//! linear flow: axis 2 indexes the modulation `μ = τ - σ(ξ,q)` on the lattice
//! `μ_l = 2πl/Tspan`. For every spatial mode the τ-frequencies therefore form
//! a uniform lattice of spacing `2π/Tspan`, shifted by `σ(ξ,q)`. Physically
//! the field is `u(t) = e^{-t∂ₓΔ} v(t)` with `v` periodic on `[0, Tspan)`.
//!
//! Products of such fields shift modulations by the resonance function, so
//! they are computed by exact sparse convolution (see [`bilinear_modes`]).
//! This needs `Tspan` to be commensurate with the resonance lattice, which
//! holds when `Λ`, `λ` are integers and `Tspan` is a multiple of `2πΛ³λ²`.

use std::f64::consts::PI;

use ndarray::Array3;
use num_complex::Complex64;

use super::fft::{fft_axis, Direction};
use super::field::SpectralField;
use super::grid::{signed_index, storage_index, GridSpec};
use super::norm;
use crate::error::{Result, ZkError};
use crate::symbols::{resonance, sigma, weighted_modulus};

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: GridSpec,
    mt: usize,
    tspan: f64,
    coeffs: Array3<Complex64>,
}

impl SpaceTimeField {
    pub fn new(grid: GridSpec, mt: usize, tspan: f64, coeffs: Array3<Complex64>) -> Result<Self> {
        check_time_lattice(mt, tspan)?;
        if coeffs.dim() != (grid.mx, grid.my, mt) {
            return Err(ZkError::InvalidArgument(format!(
                "space-time coefficients have shape {:?}, expected {:?}",
                coeffs.dim(),
                (grid.mx, grid.my, mt)
            )));
        }
        Ok(Self {
            grid,
            mt,
            tspan,
            coeffs,
        })
    }

    pub fn zeros(grid: GridSpec, mt: usize, tspan: f64) -> Result<Self> {
        check_time_lattice(mt, tspan)?;
        Ok(Self {
            grid,
            mt,
            tspan,
            coeffs: Array3::zeros((grid.mx, grid.my, mt)),
        })
    }

    /// The free solution `e^{-t∂ₓΔ} f` over one period: all weight at `μ = 0`.
    pub fn free_solution(f: &SpectralField, mt: usize, tspan: f64) -> Result<Self> {
        let mut out = Self::zeros(*f.grid(), mt, tspan)?;
        for ((i, j), c) in f.coeffs().indexed_iter() {
            out.coeffs[[i, j, 0]] = c * tspan;
        }
        Ok(out)
    }

    /// Builds the field from `Mt` equispaced snapshots `u(nTspan/Mt)`.
    pub fn from_samples(states: &[SpectralField], tspan: f64) -> Result<Self> {
        let mt = states.len();
        check_time_lattice(mt, tspan)?;
        let grid = *states[0].grid();
        if states.iter().any(|s| !s.grid().same_as(&grid)) {
            return Err(ZkError::GridMismatch);
        }
        let mut coeffs = Array3::<Complex64>::zeros((grid.mx, grid.my, mt));
        let dt = tspan / mt as f64;
        for (n, state) in states.iter().enumerate() {
            let t = n as f64 * dt;
            for ((i, j), c) in state.coeffs().indexed_iter() {
                let phase = -odd_sigma(&grid, i, j) * t;
                coeffs[[i, j, n]] = c * Complex64::from_polar(dt, phase);
            }
        }
        fft_axis(&mut coeffs, 2, Direction::Forward);
        Self::new(grid, mt, tspan, coeffs)
    }

    /// Spatial coefficients of `u(t)`.
    pub fn slice_at(&self, t: f64) -> SpectralField {
        let g = self.grid;
        let mut out = SpectralField::zeros(g);
        let w = 1.0 / self.tspan;
        for ((i, j), c) in out.coeffs_mut().indexed_iter_mut() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..self.mt {
                let v = self.coeffs[[i, j, l]];
                if v.re != 0.0 || v.im != 0.0 {
                    acc += v * Complex64::from_polar(1.0, self.mu(l) * t);
                }
            }
            *c = acc * Complex64::from_polar(w, odd_sigma(&g, i, j) * t);
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mt(&self) -> usize {
        self.mt
    }

    pub fn tspan(&self) -> f64 {
        self.tspan
    }

    pub fn coeffs(&self) -> &Array3<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array3<Complex64> {
        &mut self.coeffs
    }

    pub fn mu_spacing(&self) -> f64 {
        2.0 * PI / self.tspan
    }

    pub fn lt(&self, l: usize) -> i64 {
        signed_index(l, self.mt)
    }

    /// Modulation `τ - σ(ξ,q)` of storage index `l`.
    pub fn mu(&self, l: usize) -> f64 {
        self.lt(l) as f64 * self.mu_spacing()
    }

    /// Temporal frequency `τ` of the coefficient at `(i, j, l)`.
    pub fn tau(&self, i: usize, j: usize, l: usize) -> f64 {
        sigma(self.grid.xi(i), self.grid.q(j)) + self.mu(l)
    }

    pub fn index_t(&self, l: i64) -> Option<usize> {
        storage_index(l, self.mt)
    }

    /// `((1/(area·Tspan)) Σ ⟨μ⟩^{2b} ⟨|ζ|⟩^{2s} |U|²)^{1/2}`.
    pub fn weighted_norm(&self, s: f64, b: f64) -> f64 {
        let g = self.grid;
        let mut sum = 0.0;
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            let n2 = c.norm_sqr();
            if n2 == 0.0 {
                continue;
            }
            let wz = 1.0 + weighted_modulus(g.xi(i), g.q(j));
            let wm = 1.0 + self.mu(l).abs();
            sum += wm.powf(2.0 * b) * wz.powf(2.0 * s) * n2;
        }
        (sum * norm::spacetime_parseval_weight(&g, self.tspan)).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.weighted_norm(0.0, 0.0)
    }

    pub fn map_spatial(&self, symbol: impl Fn(f64, f64) -> f64) -> SpaceTimeField {
        let g = self.grid;
        let mut out = self.clone();
        for ((i, j, _), c) in out.coeffs.indexed_iter_mut() {
            *c *= symbol(g.xi(i), g.q(j));
        }
        out
    }

    pub fn map_modulation(&self, symbol: impl Fn(f64) -> f64) -> SpaceTimeField {
        let mut out = self.clone();
        let weights: Vec<f64> = (0..self.mt).map(|l| symbol(self.mu(l))).collect();
        for ((_, _, l), c) in out.coeffs.indexed_iter_mut() {
            *c *= weights[l];
        }
        out
    }

    pub fn scale(&self, factor: f64) -> SpaceTimeField {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|c| c * factor);
        out
    }

    /// Multiplies `v(t)` by a trigonometric window; modulations leaving the
    /// lattice range are dropped.
    pub fn windowed(&self, window: &TimeWindow) -> SpaceTimeField {
        let mut out = self.clone();
        out.coeffs.fill(Complex64::new(0.0, 0.0));
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for &(r, w) in &window.coeffs {
                if let Some(t) = self.index_t(self.lt(l) + r) {
                    out.coeffs[[i, j, t]] += c * w;
                }
            }
        }
        out
    }

    pub fn hermitian_defect(&self) -> f64 {
        let (mx, my, mt) = (self.grid.mx, self.grid.my, self.mt);
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut d: f64 = 0.0;
        for ((i, j, l), c) in self.coeffs.indexed_iter() {
            let p = self.coeffs[[(mx - i) % mx, (my - j) % my, (mt - l) % mt]];
            d = d.max((c - p.conj()).norm());
        }
        d / scale
    }

    /// Nonzero coefficients grouped by spatial mode, in signed indices.
    pub fn modes(&self) -> Vec<ModeColumn> {
        let g = self.grid;
        let mut out = Vec::new();
        for i in 0..g.mx {
            for j in 0..g.my {
                let taus: Vec<(i64, Complex64)> = (0..self.mt)
                    .filter_map(|l| {
                        let c = self.coeffs[[i, j, l]];
                        (c.re != 0.0 || c.im != 0.0).then(|| (self.lt(l), c))
                    })
                    .collect();
                if !taus.is_empty() {
                    out.push(ModeColumn {
                        k: g.kx(i),
                        j: g.ky(j),
                        xi: g.xi(i),
                        q: g.q(j),
                        taus,
                    });
                }
            }
        }
        out
    }

    pub fn same_lattice(&self, other: &SpaceTimeField) -> bool {
        self.grid.same_as(&other.grid)
            && self.mt == other.mt
            && (self.tspan - other.tspan).abs() <= 1e-12 * self.tspan
    }
}

fn check_time_lattice(mt: usize, tspan: f64) -> Result<()> {
    if mt < 8 || !mt.is_multiple_of(2) {
        return Err(ZkError::InvalidArgument(format!(
            "Mt={mt} must be even and >= 8"
        )));
    }
    if !(tspan.is_finite() && tspan > 0.0) {
        return Err(ZkError::InvalidArgument(format!(
            "Tspan={tspan} must be > 0"
        )));
    }
    Ok(())
}

fn odd_sigma(g: &GridSpec, i: usize, j: usize) -> f64 {
    sigma(g.xi_odd(i), g.q(j))
}

/// `2πΛ³λ²·periods`: the smallest period on which products of space-time
/// fields stay on the modulation lattice. Requires integer `Λ`, `λ`.
pub fn commensurate_tspan(grid: &GridSpec, periods: u32) -> Result<f64> {
    let is_int = |v: f64| (v - v.round()).abs() < 1e-12;
    if !is_int(grid.x_scale) || !is_int(grid.y_scale) || periods == 0 {
        return Err(ZkError::InvalidArgument(
            "commensurate periods need integer Λ, λ and periods >= 1".into(),
        ));
    }
    Ok(2.0 * PI * grid.x_scale.powi(3) * grid.y_scale.powi(2) * periods as f64)
}

/// A real trigonometric window `χ(t) = Σ_r c_r e^{iμ_r t}` on `[0, Tspan)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWindow {
    pub coeffs: Vec<(i64, f64)>,
}

impl TimeWindow {
    /// `χ = 1/2 - (3/4)cos ωt + (1/4)cos³ ωt`: rises monotonically from 0 at
    /// the period ends to a plateau of 1 at mid-period, flat to second order
    /// at both extremes.
    pub fn flat_top() -> Self {
        Self {
            coeffs: vec![
                (-3, 1.0 / 32.0),
                (-1, -9.0 / 32.0),
                (0, 0.5),
                (1, -9.0 / 32.0),
                (3, 1.0 / 32.0),
            ],
        }
    }

    pub fn eval(&self, t: f64, tspan: f64) -> f64 {
        let w = 2.0 * PI / tspan;
        self.coeffs
            .iter()
            .map(|&(r, c)| c * (r as f64 * w * t).cos())
            .sum()
    }

    /// `(Tspan Σ_r ⟨μ_r⟩^{2b} c_r²)^{1/2}`, the `H^b_t` factor a windowed
    /// free solution carries.
    pub fn hb_factor(&self, b: f64, tspan: f64) -> f64 {
        let w = 2.0 * PI / tspan;
        let s: f64 = self
            .coeffs
            .iter()
            .map(|&(r, c)| (1.0 + (r as f64 * w).abs()).powf(2.0 * b) * c * c)
            .sum();
        (tspan * s).sqrt()
    }
}

/// The nonzero τ-column of one spatial mode.
#[derive(Debug, Clone)]
pub struct ModeColumn {
    pub k: i64,
    pub j: i64,
    pub xi: f64,
    pub q: f64,
    pub taus: Vec<(i64, Complex64)>,
}

/// One output mode of a bilinear product, for each requested symbol.
pub struct ProductMode<'a> {
    pub k: i64,
    pub j: i64,
    pub xi: f64,
    pub q: f64,
    /// `columns[r]`: merged `(l, W)` pairs for symbol `r`, sorted by `l`.
    pub columns: &'a [Vec<(i64, Complex64)>],
}

/// Pair symbol `s(ξ₁, q₁, ξ₂, q₂)` weighting each interaction.
pub type PairSymbol<'a> = &'a dyn Fn(f64, f64, f64, f64) -> f64;

/// Exact sparse evaluation of `F(uv)` with interaction weights.
///
/// For each output spatial mode `ζ` the visitor receives, per symbol `s_r`,
/// the coefficients `W_r(ζ, μ) = (1/(area·Tspan)) Σ s_r(ζ₁,ζ₂) U(ζ₁,μ₁)V(ζ₂,μ₂)`
/// over `ζ₁+ζ₂ = ζ`, `μ = μ₁ + μ₂ - ℋ(ζ₁,ζ₂)`. Output modes are not truncated
/// to the grid.
pub fn bilinear_modes(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    symbols: &[PairSymbol<'_>],
    mut visit: impl FnMut(ProductMode<'_>),
) -> Result<()> {
    if !u.same_lattice(v) {
        return Err(ZkError::GridMismatch);
    }
    let g = u.grid;
    let dmu = u.mu_spacing();
    let weight = norm::spacetime_parseval_weight(&g, u.tspan);
    let um = u.modes();
    let vm = v.modes();
    if um.is_empty() || vm.is_empty() {
        return Ok(());
    }
    let bounds = |m: &[ModeColumn]| {
        let kmin = m.iter().map(|c| c.k).min().unwrap();
        let kmax = m.iter().map(|c| c.k).max().unwrap();
        let jmin = m.iter().map(|c| c.j).min().unwrap();
        let jmax = m.iter().map(|c| c.j).max().unwrap();
        (kmin, kmax, jmin, jmax)
    };
    let (vk0, vk1, vj0, vj1) = bounds(&vm);
    let vw = (vj1 - vj0 + 1) as usize;
    let mut lookup = vec![usize::MAX; (vk1 - vk0 + 1) as usize * vw];
    for (n, c) in vm.iter().enumerate() {
        lookup[(c.k - vk0) as usize * vw + (c.j - vj0) as usize] = n;
    }
    let (uk0, uk1, uj0, uj1) = bounds(&um);

    let mut contrib: Vec<(i64, u32, Complex64)> = Vec::new();
    let mut pair_symbols: Vec<f64> = Vec::new();
    let mut columns: Vec<Vec<(i64, Complex64)>> = vec![Vec::new(); symbols.len()];
    for k in (uk0 + vk0)..=(uk1 + vk1) {
        for j in (uj0 + vj0)..=(uj1 + vj1) {
            contrib.clear();
            pair_symbols.clear();
            for a in &um {
                let (k2, j2) = (k - a.k, j - a.j);
                if k2 < vk0 || k2 > vk1 || j2 < vj0 || j2 > vj1 {
                    continue;
                }
                let n = lookup[(k2 - vk0) as usize * vw + (j2 - vj0) as usize];
                if n == usize::MAX {
                    continue;
                }
                let b = &vm[n];
                let h = resonance(a.xi, b.xi, a.q, b.q) / dmu;
                let shift = h.round();
                if (h - shift).abs() > 1e-6 * (1.0 + h.abs()) {
                    return Err(ZkError::InvalidArgument(format!(
                        "Tspan={} is not commensurate with the resonance lattice",
                        u.tspan
                    )));
                }
                let shift = shift as i64;
                let pid = (pair_symbols.len() / symbols.len().max(1)) as u32;
                for s in symbols {
                    pair_symbols.push(s(a.xi, a.q, b.xi, b.q));
                }
                for &(l1, c1) in &a.taus {
                    for &(l2, c2) in &b.taus {
                        contrib.push((l1 + l2 - shift, pid, c1 * c2));
                    }
                }
            }
            if contrib.is_empty() {
                continue;
            }
            contrib.sort_unstable_by_key(|c| c.0);
            for (r, col) in columns.iter_mut().enumerate() {
                col.clear();
                let mut idx = 0;
                while idx < contrib.len() {
                    let l = contrib[idx].0;
                    let mut acc = Complex64::new(0.0, 0.0);
                    while idx < contrib.len() && contrib[idx].0 == l {
                        let (_, pid, c) = contrib[idx];
                        acc += c * pair_symbols[pid as usize * symbols.len() + r];
                        idx += 1;
                    }
                    col.push((l, acc * weight));
                }
            }
            visit(ProductMode {
                k,
                j,
                xi: k as f64 / g.x_scale,
                q: j as f64 / g.y_scale,
                columns: &columns,
            });
        }
    }
    Ok(())
}
