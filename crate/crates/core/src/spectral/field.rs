use ndarray::Array2;
use num_complex::Complex64;

use super::fft::{fft_all, Direction};
use super::grid::GridSpec;
use super::norm;
use crate::error::{Result, ZkError};
use crate::symbols::weighted_modulus;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative Hermitian defect above which `inverse` refuses the input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real samples on the `Mx × My` collocation lattice, x outer, y inner.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    values: Array2<f64>,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.shape() {
            return Err(ZkError::ShapeMismatch {
                expected: grid.shape(),
                got: values.dim(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ZkError::InvalidArgument("non-finite sample".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn(grid.shape(), |(i, j)| f(grid.x_at(i), grid.y_at(j)));
        Self::new(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: Array2::zeros(grid.shape()),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// `∫ f g dxdy` by the rectangle rule (exact for band-limited products).
    pub fn inner(&self, other: &PhysicalField) -> f64 {
        pairwise_sum(
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a * b),
        ) * self.grid.cell_area()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Fourier coefficients `F(ξ,q)` of a field on the grid, stored in natural
/// FFT order (index `i` ↔ signed wavenumber `grid.kx(i)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != grid.shape() {
            return Err(ZkError::ShapeMismatch {
                expected: grid.shape(),
                got: coeffs.dim(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: Array2::zeros(grid.shape()),
        }
    }

    /// Builds coefficients from signed order: `signed[[k + Mx/2, j + My/2]]`.
    pub fn from_signed(grid: GridSpec, signed: &Array2<Complex64>) -> Result<Self> {
        if signed.dim() != grid.shape() {
            return Err(ZkError::ShapeMismatch {
                expected: grid.shape(),
                got: signed.dim(),
            });
        }
        let (hx, hy) = ((grid.mx / 2) as i64, (grid.my / 2) as i64);
        let coeffs = Array2::from_shape_fn(grid.shape(), |(i, j)| {
            let (k, l) = (grid.kx(i) + hx, grid.ky(j) + hy);
            signed[[k as usize, l as usize]]
        });
        Ok(Self { grid, coeffs })
    }

    /// Coefficients in signed order, the layout used at API boundaries.
    pub fn to_signed(&self) -> Array2<Complex64> {
        let g = &self.grid;
        let (hx, hy) = ((g.mx / 2) as i64, (g.my / 2) as i64);
        let mut out = Array2::zeros(g.shape());
        for ((i, j), c) in self.coeffs.indexed_iter() {
            out[[(g.kx(i) + hx) as usize, (g.ky(j) + hy) as usize]] = *c;
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, k: i64, j: i64) -> Option<Complex64> {
        Some(self.coeffs[[self.grid.index_x(k)?, self.grid.index_y(j)?]])
    }

    /// Sets the coefficient at signed `(k, j)`; with `hermitian` also sets
    /// the partner `(-k, -j)` to the conjugate.
    pub fn set_mode(&mut self, k: i64, j: i64, value: Complex64, hermitian: bool) -> Result<()> {
        let idx = |k: i64, j: i64| -> Result<(usize, usize)> {
            match (self.grid.index_x(k), self.grid.index_y(j)) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(ZkError::InvalidArgument(format!(
                    "mode ({k}, {j}) is not on the grid"
                ))),
            }
        };
        let (a, b) = idx(k, j)?;
        self.coeffs[[a, b]] = value;
        if hermitian {
            let (c, d) = idx(-k, -j)?;
            self.coeffs[[c, d]] = value.conj();
        }
        Ok(())
    }

    /// Applies a Fourier multiplier given as a function of `(ξ, q)`.
    pub fn map_symbol(&self, symbol: impl Fn(f64, f64) -> f64) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c *= symbol(g.xi(i), g.q(j));
        }
        out
    }

    /// Like [`map_symbol`](Self::map_symbol) but with a complex symbol fed
    /// the storage indices, for symbols that need Nyquist-aware handling.
    pub fn map_indexed(&self, symbol: impl Fn(usize, usize) -> Complex64) -> SpectralField {
        let mut out = self.clone();
        for ((i, j), c) in out.coeffs.indexed_iter_mut() {
            *c *= symbol(i, j);
        }
        out
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: &self.coeffs * Complex64::new(factor, 0.0),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_grid(other)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: &self.coeffs + &other.coeffs,
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_grid(other)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: &self.coeffs - &other.coeffs,
        })
    }

    /// `∂_x`, with the x-Nyquist row mapped to zero.
    pub fn dx(&self) -> SpectralField {
        let g = self.grid;
        self.map_indexed(|i, _| Complex64::new(0.0, g.xi_odd(i)))
    }

    /// Euclidean Laplacian `-(ξ² + q²)`.
    pub fn laplacian(&self) -> SpectralField {
        self.map_symbol(|xi, q| -(xi * xi + q * q))
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(ZkError::GridMismatch)
        }
    }

    /// Spectral inner product `(1/area) Σ F conj(G)`, equal to `∫ f ḡ`.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        let w = norm::parseval_weight(&self.grid);
        let re = pairwise_sum(
            self.coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| (a * b.conj()).re),
        );
        let im = pairwise_sum(
            self.coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| (a * b.conj()).im),
        );
        Complex64::new(re, im) * w
    }

    /// `‖f‖_{H^s} = ((1/area) Σ ⟨|ζ|⟩^{2s} |F|²)^{1/2}` with the weighted
    /// modulus `|ζ|² = 3ξ² + q²` and `⟨x⟩ = 1 + |x|`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let g = self.grid;
        let sum = pairwise_sum(self.coeffs.indexed_iter().map(|((i, j), c)| {
            let w = 1.0 + weighted_modulus(g.xi(i), g.q(j));
            w.powf(2.0 * s) * c.norm_sqr()
        }));
        (sum * norm::parseval_weight(&g)).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.hs_norm(0.0)
    }

    /// Largest `|F(ζ) - conj F(-ζ)|` relative to `max |F|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut defect: f64 = 0.0;
        for ((i, j), c) in self.coeffs.indexed_iter() {
            let pi = (g.mx - i) % g.mx;
            let pj = (g.my - j) % g.my;
            defect = defect.max((c - self.coeffs[[pi, pj]].conj()).norm());
        }
        defect / scale
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Projects onto the Hermitian (real-field) subspace.
    pub fn hermitian_part(&self) -> SpectralField {
        let g = self.grid;
        let coeffs = Array2::from_shape_fn(g.shape(), |(i, j)| {
            let partner = self.coeffs[[(g.mx - i) % g.mx, (g.my - j) % g.my]];
            0.5 * (self.coeffs[[i, j]] + partner.conj())
        });
        SpectralField { grid: g, coeffs }
    }

    /// Zeroes the x- and y-Nyquist rows.
    pub fn without_nyquist(&self) -> SpectralField {
        let mut out = self.clone();
        let (nx, ny) = (self.grid.mx / 2, self.grid.my / 2);
        out.coeffs.row_mut(nx).fill(ZERO);
        out.coeffs.column_mut(ny).fill(ZERO);
        out
    }
}

/// Quadrature forward transform `F(ξ,q) ≈ ∫∫ e^{-i(xξ+yq)} f dx dy`.
pub fn forward(f: &PhysicalField) -> SpectralField {
    let g = f.grid;
    let mut coeffs = f.values.mapv(|v| Complex64::new(v, 0.0));
    fft_all(&mut coeffs, Direction::Forward);
    coeffs *= Complex64::new(norm::forward_weight(&g), 0.0);
    SpectralField { grid: g, coeffs }
}

/// Inverse transform without the reality check; returns complex samples.
pub fn inverse_complex(field: &SpectralField) -> Array2<Complex64> {
    let mut values = field.coeffs.clone();
    fft_all(&mut values, Direction::Inverse);
    values *= Complex64::new(norm::inverse_weight(&field.grid), 0.0);
    values
}

/// Inverse transform to real samples. Rejects coefficients whose Hermitian
/// defect exceeds [`HERMITIAN_TOL`].
pub fn inverse(field: &SpectralField) -> Result<PhysicalField> {
    let defect = field.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(ZkError::NonHermitian(defect));
    }
    let values = inverse_complex(field).mapv(|c| c.re);
    Ok(PhysicalField {
        grid: field.grid,
        values,
    })
}

/// Spreads the coefficients onto a larger `(px, py)` grid and returns the
/// complex samples there. Nyquist coefficients are split evenly between
/// `±M/2`, the reading under which they represent real cosines.
pub(crate) fn padded_samples(field: &SpectralField, px: usize, py: usize) -> Array2<Complex64> {
    let g = field.grid;
    let mut big = Array2::<Complex64>::zeros((px, py));
    let hx = (g.mx / 2) as i64;
    let hy = (g.my / 2) as i64;
    let put = |big: &mut Array2<Complex64>, k: i64, l: i64, c: Complex64| {
        let a = k.rem_euclid(px as i64) as usize;
        let b = l.rem_euclid(py as i64) as usize;
        big[[a, b]] += c;
    };
    for ((i, j), c) in field.coeffs.indexed_iter() {
        if *c == ZERO {
            continue;
        }
        let (k, l) = (g.kx(i), g.ky(j));
        let ks: &[i64] = if k == -hx { &[-hx, hx] } else { &[k] };
        let ls: &[i64] = if l == -hy { &[-hy, hy] } else { &[l] };
        let share = 1.0 / (ks.len() * ls.len()) as f64;
        for &kk in ks {
            for &ll in ls {
                put(&mut big, kk, ll, c * share);
            }
        }
    }
    fft_all(&mut big, Direction::Inverse);
    big *= Complex64::new(norm::inverse_weight(&g), 0.0);
    big
}

/// Forward-transforms samples on a `(px, py)` padded grid and keeps the
/// modes `|k| < Mx/2`, `|j| < My/2` of `grid`; Nyquist rows stay zero.
pub(crate) fn truncate_from_padded(
    grid: &GridSpec,
    mut samples: Array2<Complex64>,
) -> SpectralField {
    let (px, py) = samples.dim();
    fft_all(&mut samples, Direction::Forward);
    let w = grid.area() / (px * py) as f64;
    let mut out = SpectralField::zeros(*grid);
    for i in 0..grid.mx {
        if grid.is_nyquist_x(i) {
            continue;
        }
        let a = grid.kx(i).rem_euclid(px as i64) as usize;
        for j in 0..grid.my {
            if grid.is_nyquist_y(j) {
                continue;
            }
            let b = grid.ky(j).rem_euclid(py as i64) as usize;
            out.coeffs[[i, j]] = samples[[a, b]] * w;
        }
    }
    out
}

fn padded_len(m: usize) -> usize {
    let p = 3 * m / 2;
    p + p % 2
}

/// Transform of the pointwise product `fg`, dealiased by 3/2 zero padding.
///
/// Every retained output mode (`|k| < M/2`) is free of aliasing, so this is
/// the exact truncation of `F ∗ G` to the grid.
pub fn convolve(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let g = a.grid;
    let (px, py) = (padded_len(g.mx), padded_len(g.my));
    let fa = padded_samples(a, px, py);
    let prod = if std::ptr::eq(a, b) {
        fa.mapv(|v| v * v)
    } else {
        let fb = padded_samples(b, px, py);
        &fa * &fb
    };
    Ok(truncate_from_padded(&g, prod))
}

/// `F(f²)` with 3/2 padding.
pub fn square(a: &SpectralField) -> SpectralField {
    let g = a.grid;
    let (px, py) = (padded_len(g.mx), padded_len(g.my));
    let fa = padded_samples(a, px, py);
    truncate_from_padded(&g, fa.mapv(|v| v * v))
}

/// Product evaluated on the grid itself (aliased), Nyquist rows zeroed.
pub fn product_aliased(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.check_grid(b)?;
    let g = a.grid;
    let fa = inverse_complex(a);
    let fb = inverse_complex(b);
    Ok(truncate_from_padded(&g, &fa * &fb))
}

/// `∫ f³ dxdy`, exact for the trigonometric polynomial represented by `a`
/// (quadrature on a twice-refined grid).
pub fn cubic_integral(a: &SpectralField) -> f64 {
    let g = a.grid;
    let (px, py) = (2 * g.mx, 2 * g.my);
    let f = padded_samples(a, px, py);
    pairwise_sum(f.iter().map(|v| (v * v * v).re)) * g.area() / (px * py) as f64
}

/// Summation by recursive halving; the result does not depend on how
/// callers partition the work.
pub fn pairwise_sum(iter: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = iter.collect();
    pairwise(&v)
}

fn pairwise(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        v.iter().sum()
    } else {
        let mid = v.len() / 2;
        pairwise(&v[..mid]) + pairwise(&v[mid..])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(2.0, 1.0, 16, 8, 0.01).unwrap()
    }

    #[test]
    fn constant_field_lands_on_the_zero_mode() {
        let g = grid();
        let f = PhysicalField::from_fn(g, |_, _| 1.0).unwrap();
        let spec = forward(&f);
        for ((i, j), c) in spec.coeffs().indexed_iter() {
            if i == 0 && j == 0 {
                assert!((c.re - g.area()).abs() < 1e-12 * g.area());
            } else {
                assert!(c.norm() < 1e-14 * g.area());
            }
        }
    }

    #[test]
    fn cosine_has_two_coefficients() {
        let g = grid();
        let f = PhysicalField::from_fn(g, |x, _| (x / g.x_scale).cos()).unwrap();
        let spec = forward(&f);
        let mut nonzero = vec![];
        for ((i, j), c) in spec.coeffs().indexed_iter() {
            if c.norm() > 1e-12 {
                nonzero.push((g.kx(i), g.ky(j)));
            }
        }
        nonzero.sort();
        assert_eq!(nonzero, vec![(-1, 0), (1, 0)]);
    }

    #[test]
    fn unit_delta_inverts_to_reciprocal_area() {
        let g = grid();
        let mut s = SpectralField::zeros(g);
        s.set_mode(0, 0, Complex64::new(1.0, 0.0), false).unwrap();
        let f = inverse(&s).unwrap();
        // Direct evaluation of (1/area) Σ F e^{i(xξ+yq)} at one point.
        let direct = 1.0 / g.area();
        assert!(f.values().iter().all(|v| (v - direct).abs() < 1e-15));
    }

    #[test]
    fn inverse_flags_non_hermitian_input() {
        let g = grid();
        let mut s = SpectralField::zeros(g);
        s.set_mode(2, 1, Complex64::new(1.0, 0.5), false).unwrap();
        assert!(matches!(inverse(&s), Err(ZkError::NonHermitian(_))));
        s.set_mode(2, 1, Complex64::new(1.0, 0.5), true).unwrap();
        assert!(inverse(&s).is_ok());
    }

    #[test]
    fn single_mode_sobolev_norm() {
        let g = grid();
        let mut s = SpectralField::zeros(g);
        s.set_mode(3, 2, Complex64::new(1.0, 0.0), false).unwrap();
        let (xi, q) = (3.0 / g.x_scale, 2.0 / g.y_scale);
        let expect = (1.0 + (3.0 * xi * xi + q * q).sqrt()).powf(1.5) / g.area().sqrt();
        assert!((s.hs_norm(1.5) - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn single_modes_add_frequencies() {
        let g = grid();
        let mut a = SpectralField::zeros(g);
        let mut b = SpectralField::zeros(g);
        a.set_mode(2, 1, Complex64::new(1.0, 0.0), false).unwrap();
        b.set_mode(-5, 2, Complex64::new(0.0, 2.0), false).unwrap();
        let c = convolve(&a, &b).unwrap();
        let expect = Complex64::new(0.0, 2.0) / g.area();
        for ((i, j), v) in c.coeffs().indexed_iter() {
            if (g.kx(i), g.ky(j)) == (-3, 3) {
                assert!((v - expect).norm() < 1e-15);
            } else {
                assert!(v.norm() < 1e-16);
            }
        }
    }

    #[test]
    fn convolution_with_the_unit_constant_is_identity() {
        let g = grid();
        let f = PhysicalField::from_fn(g, |x, y| (x / 2.0).sin() + 0.3 * (2.0 * y).cos()).unwrap();
        let one = forward(&PhysicalField::from_fn(g, |_, _| 1.0).unwrap());
        let spec = forward(&f).without_nyquist();
        let c = convolve(&spec, &one).unwrap();
        for (a, b) in c.coeffs().iter().zip(spec.coeffs().iter()) {
            assert!((a - b).norm() < 1e-12 * g.area());
        }
    }

    #[test]
    fn cubic_integral_of_a_constant() {
        let g = grid();
        let f = forward(&PhysicalField::from_fn(g, |_, _| 2.0).unwrap());
        assert!((cubic_integral(&f) - 8.0 * g.area()).abs() < 1e-12 * g.area());
    }
}
