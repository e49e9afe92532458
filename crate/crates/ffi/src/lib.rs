//! C interface to the zkcyl solver.
//!
//! Grids and fields are opaque handles created by `*_new`/`*_from_*`
//! functions and released with the matching `*_free`. Every fallible call
//! returns an `int32_t` code (`ZK_OK` on success, negative otherwise) and
//! writes results through out-pointers; `zk_last_error()` describes the
//! last failure on the calling thread.
//!
//! ```c
//! ZkGrid *g = NULL;
//! if (zk_grid_new(8.0, 1.0, 512, 32, 1e-3, &g) != ZK_OK) {
//!     fprintf(stderr, "%s\n", zk_last_error());
//! }
//! ```

mod error;

use std::ffi::c_char;

use ndarray::Array2;
use num_rational::Ratio;
use zkcyl::dynamics::{evolve, IntegratorConfig, Scheme};
use zkcyl::estimates::gwp_arithmetic;
use zkcyl::functionals::{energy, mass, modified_energy};
use zkcyl::multipliers::IMultiplier;
use zkcyl::spectral::{forward, inverse, GridSpec, PhysicalField, SpectralField};
use zkcyl::symbols::count_parabola;

pub use error::*;
use error::{guard, null, Fail};

/// Periodic grid of the cylinder.
pub struct ZkGrid {
    inner: GridSpec,
}

/// A real field stored by its Fourier coefficients.
pub struct ZkField {
    inner: SpectralField,
}

pub const ZK_SCHEME_STRANG: i32 = 0;
pub const ZK_SCHEME_ETDRK4: i32 = 1;

/// Exponents of the global iteration as fractions.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ZkGwpExponents {
    pub lambda_num: i64,
    pub lambda_den: i64,
    pub n_num: i64,
    pub n_den: i64,
    pub growth_num: i64,
    pub growth_den: i64,
}

unsafe fn write<T>(out: *mut T, v: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

unsafe fn field_ref<'a>(f: *const ZkField) -> Result<&'a SpectralField, Fail> {
    f.as_ref().map(|f| &f.inner).ok_or_else(|| null("field"))
}

static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn zk_version() -> *const c_char {
    VERSION.as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn zk_grid_new(
    x_scale: f64,
    y_scale: f64,
    mx: usize,
    my: usize,
    dt: f64,
    out: *mut *mut ZkGrid,
) -> i32 {
    guard(|| {
        let g = GridSpec::new(x_scale, y_scale, mx, my, dt)?;
        write(out, Box::into_raw(Box::new(ZkGrid { inner: g })), "out")
    })
}

/// # Safety
/// `grid` must be null or a handle from [`zk_grid_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zk_grid_free(grid: *mut ZkGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
/// `grid` must be a live grid handle; `mx`, `my` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_grid_shape(grid: *const ZkGrid, mx: *mut usize, my: *mut usize) -> i32 {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?;
        write(mx, g.inner.mx, "mx")?;
        write(my, g.inner.my, "my")
    })
}

/// Builds a field from `Mx·My` samples, row-major with x outer.
///
/// # Safety
/// `grid` must be a live grid handle, `values` must point to `len` readable
/// doubles and `out` to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn zk_field_from_samples(
    grid: *const ZkGrid,
    values: *const f64,
    len: usize,
    out: *mut *mut ZkField,
) -> i32 {
    guard(|| {
        let g = grid.as_ref().ok_or_else(|| null("grid"))?.inner;
        if values.is_null() {
            return Err(null("values"));
        }
        if len != g.mx * g.my {
            return Err(Fail(
                ZK_ERR_INVALID,
                format!("expected {} samples, got {len}", g.mx * g.my),
            ));
        }
        let data = std::slice::from_raw_parts(values, len).to_vec();
        let arr = Array2::from_shape_vec((g.mx, g.my), data)
            .map_err(|e| Fail(ZK_ERR_INVALID, e.to_string()))?;
        let f = forward(&PhysicalField::new(g, arr)?);
        write(out, Box::into_raw(Box::new(ZkField { inner: f })), "out")
    })
}

/// Writes the `Mx·My` grid samples, row-major with x outer.
///
/// # Safety
/// `field` must be a live field handle and `out` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn zk_field_to_samples(
    field: *const ZkField,
    out: *mut f64,
    len: usize,
) -> i32 {
    guard(|| {
        let f = field_ref(field)?;
        let g = f.grid();
        if out.is_null() {
            return Err(null("out"));
        }
        if len != g.mx * g.my {
            return Err(Fail(
                ZK_ERR_INVALID,
                format!("expected room for {} samples, got {len}", g.mx * g.my),
            ));
        }
        let p = inverse(f)?;
        let dst = std::slice::from_raw_parts_mut(out, len);
        for (d, v) in dst.iter_mut().zip(p.values().iter()) {
            *d = *v;
        }
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zk_field_free(field: *mut ZkField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `∫u²`.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_field_mass(field: *const ZkField, out: *mut f64) -> i32 {
    guard(|| write(out, mass(field_ref(field)?), "out"))
}

/// `½∫|∇u|² − ⅙∫u³`.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_field_energy(field: *const ZkField, out: *mut f64) -> i32 {
    guard(|| write(out, energy(field_ref(field)?), "out"))
}

/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_field_hs_norm(field: *const ZkField, s: f64, out: *mut f64) -> i32 {
    guard(|| write(out, field_ref(field)?.hs_norm(s), "out"))
}

/// `E[Iu]` for the multiplier with parameters `n`, `s`.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_field_modified_energy(
    field: *const ZkField,
    n: f64,
    s: f64,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let imul = IMultiplier::new(n, s)?;
        write(out, modified_energy(field_ref(field)?, &imul), "out")
    })
}

/// Evolves `field` to time `tend` and returns the final state as a new
/// handle; `field` is not modified.
///
/// # Safety
/// `field` must be a live field handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zk_evolve(
    field: *const ZkField,
    scheme: i32,
    dt: f64,
    tend: f64,
    out: *mut *mut ZkField,
) -> i32 {
    guard(|| {
        let f = field_ref(field)?;
        let scheme = match scheme {
            ZK_SCHEME_STRANG => Scheme::Strang,
            ZK_SCHEME_ETDRK4 => Scheme::Etdrk4,
            other => return Err(Fail(ZK_ERR_INVALID, format!("unknown scheme {other}"))),
        };
        let cfg = IntegratorConfig::new(scheme, dt, tend)?.with_snapshot_every(usize::MAX);
        let traj = evolve(f, &cfg)?;
        let last = traj.last().clone();
        write(out, Box::into_raw(Box::new(ZkField { inner: last })), "out")
    })
}

/// Exponents for `s = s_num/s_den`; `ZK_ERR_INFEASIBLE` unless
/// `29/31 < s < 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zk_gwp_exponents(s_num: i64, s_den: i64, out: *mut ZkGwpExponents) -> i32 {
    guard(|| {
        if s_den == 0 {
            return Err(Fail(ZK_ERR_INVALID, "zero denominator".into()));
        }
        let r = gwp_arithmetic(Ratio::new(s_num, s_den), 1.0)?;
        let e = ZkGwpExponents {
            lambda_num: *r.lambda_exponent.numer(),
            lambda_den: *r.lambda_exponent.denom(),
            n_num: *r.n_exponent.numer(),
            n_den: *r.n_exponent.denom(),
            growth_num: *r.growth_exponent.numer(),
            growth_den: *r.growth_exponent.denom(),
        };
        write(out, e, "out")
    })
}

/// Counts `q ∈ ℤ/λ`, `|q| ≤ qmax`, with `aq² + bq + c ∈ [lo, hi]`, and the
/// bound `4λ(|I|^{1/2}/|a|^{1/2} + 1)`.
///
/// # Safety
/// `count` and `bound` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zk_count_parabola(
    a: f64,
    b: f64,
    c: f64,
    lo: f64,
    hi: f64,
    lambda: f64,
    qmax: f64,
    count: *mut u64,
    bound: *mut f64,
) -> i32 {
    guard(|| {
        let r = count_parabola(a, b, c, (lo, hi), lambda, qmax)?;
        write(count, r.count, "count")?;
        write(bound, r.bound, "bound")
    })
}
