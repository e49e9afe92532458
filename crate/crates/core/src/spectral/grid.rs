use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZkError};

/// Discretization of the cylinder `[0, 2πΛ) × [0, 2πλ)` plus a time step.
///
/// The unbounded x-direction is truncated to a periodic box of circumference
/// `2πΛ`. Frequencies are `ξ = k/Λ`, `q = j/λ` with `-M/2 <= k, j < M/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Λ: the x-box has circumference `2πΛ`.
    pub x_scale: f64,
    /// λ: the y-circle has circumference `2πλ`.
    pub y_scale: f64,
    pub mx: usize,
    pub my: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_scale: f64, y_scale: f64, mx: usize, my: usize, dt: f64) -> Result<Self> {
        let grid = Self {
            x_scale,
            y_scale,
            mx,
            my,
            dt,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("Mx", self.mx), ("My", self.my)] {
            if m < 8 || m % 2 != 0 {
                return Err(ZkError::InvalidGrid(format!(
                    "{name}={m} must be even and >= 8"
                )));
            }
        }
        if !(self.y_scale.is_finite() && self.y_scale >= 1.0) {
            return Err(ZkError::InvalidGrid(format!(
                "y scale λ={} must be >= 1",
                self.y_scale
            )));
        }
        if !(self.x_scale.is_finite() && self.x_scale >= self.y_scale) {
            return Err(ZkError::InvalidGrid(format!(
                "x scale Λ={} must be >= λ={}",
                self.x_scale, self.y_scale
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ZkError::InvalidGrid(format!("dt={} must be > 0", self.dt)));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.mx, self.my)
    }

    pub fn len(&self) -> usize {
        self.mx * self.my
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_length(&self) -> f64 {
        2.0 * PI * self.x_scale
    }

    pub fn y_length(&self) -> f64 {
        2.0 * PI * self.y_scale
    }

    /// Area `(2π)²Λλ` of the periodic box.
    pub fn area(&self) -> f64 {
        self.x_length() * self.y_length()
    }

    pub fn cell_area(&self) -> f64 {
        self.area() / self.len() as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x_length() * i as f64 / self.mx as f64
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y_length() * j as f64 / self.my as f64
    }

    /// Signed x-wavenumber of storage index `i` (natural FFT order).
    pub fn kx(&self, i: usize) -> i64 {
        signed_index(i, self.mx)
    }

    pub fn ky(&self, j: usize) -> i64 {
        signed_index(j, self.my)
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.kx(i) as f64 / self.x_scale
    }

    pub fn q(&self, j: usize) -> f64 {
        self.ky(j) as f64 / self.y_scale
    }

    /// Storage index of the signed x-wavenumber `k`, if it is on the grid.
    pub fn index_x(&self, k: i64) -> Option<usize> {
        storage_index(k, self.mx)
    }

    pub fn index_y(&self, j: i64) -> Option<usize> {
        storage_index(j, self.my)
    }

    pub fn is_nyquist_x(&self, i: usize) -> bool {
        i == self.mx / 2
    }

    pub fn is_nyquist_y(&self, j: usize) -> bool {
        j == self.my / 2
    }

    /// ξ as seen by odd-in-ξ symbols: zero on the x-Nyquist row, whose
    /// Hermitian partner is itself.
    pub fn xi_odd(&self, i: usize) -> f64 {
        if self.is_nyquist_x(i) {
            0.0
        } else {
            self.xi(i)
        }
    }

    pub fn max_abs_xi(&self) -> f64 {
        (self.mx / 2) as f64 / self.x_scale
    }

    pub fn max_abs_q(&self) -> f64 {
        (self.my / 2) as f64 / self.y_scale
    }

    /// Largest weighted modulus `√(3ξ²+q²)` fully inside the resolved
    /// (non-Nyquist) band in every direction.
    pub fn resolved_modulus(&self) -> f64 {
        let xi = (self.mx / 2 - 1) as f64 / self.x_scale;
        let q = (self.my / 2 - 1) as f64 / self.y_scale;
        (3.0f64.sqrt() * xi).min(q)
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.mx == other.mx
            && self.my == other.my
            && (self.x_scale - other.x_scale).abs() <= 1e-12 * self.x_scale
            && (self.y_scale - other.y_scale).abs() <= 1e-12 * self.y_scale
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }
}

pub(crate) fn signed_index(i: usize, m: usize) -> i64 {
    if i < m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

pub(crate) fn storage_index(k: i64, m: usize) -> Option<usize> {
    let half = (m / 2) as i64;
    if k < -half || k >= half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + m as i64) as usize)
    }
}
