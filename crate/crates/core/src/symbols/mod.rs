//! Dispersion relation, resonance function and lattice counting bounds.

mod counting;

pub use counting::{
    count_graph_set, count_parabola, preimage_measure, CountReport, GraphCount, PreimageReport,
};

use serde::{Deserialize, Serialize};

/// A point `ζ = (ξ, q)` of frequency space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub xi: f64,
    pub q: f64,
}

impl Frequency {
    pub fn new(xi: f64, q: f64) -> Self {
        Self { xi, q }
    }

    pub fn sigma(self) -> f64 {
        sigma(self.xi, self.q)
    }

    pub fn weighted_mod2(self) -> f64 {
        weighted_mod2(self.xi, self.q)
    }

    pub fn weighted_modulus(self) -> f64 {
        weighted_modulus(self.xi, self.q)
    }
}

impl std::ops::Add for Frequency {
    type Output = Frequency;
    fn add(self, o: Frequency) -> Frequency {
        Frequency::new(self.xi + o.xi, self.q + o.q)
    }
}

impl std::ops::Sub for Frequency {
    type Output = Frequency;
    fn sub(self, o: Frequency) -> Frequency {
        Frequency::new(self.xi - o.xi, self.q - o.q)
    }
}

/// `σ(ξ,q) = ξ³ + ξq²`.
pub fn sigma(xi: f64, q: f64) -> f64 {
    xi * (xi * xi + q * q)
}

/// `3ξ² + q²`.
pub fn weighted_mod2(xi: f64, q: f64) -> f64 {
    3.0 * xi * xi + q * q
}

pub fn weighted_modulus(xi: f64, q: f64) -> f64 {
    weighted_mod2(xi, q).sqrt()
}

/// `σ(ζ₁+ζ₂) − σ(ζ₁) − σ(ζ₂)` in expanded form.
pub fn resonance(xi1: f64, xi2: f64, q1: f64, q2: f64) -> f64 {
    3.0 * xi1 * xi2 * (xi1 + xi2) + xi2 * q1 * q1 + xi1 * q2 * q2 + 2.0 * (xi1 + xi2) * q1 * q2
}

/// `|ζ₁|²_w − |ζ−ζ₁|²_w`, the ξ₁-derivative of `ℋ(ξ₁, ξ−ξ₁, q₁, q−q₁)`
/// up to sign: `∂ℋ/∂ξ₁ = −resonance_d1`. Only the magnitude enters the
/// estimates.
pub fn resonance_d1(xi1: f64, xi: f64, q1: f64, q: f64) -> f64 {
    let (a, b) = (xi - xi1, q - q1);
    3.0 * xi1 * xi1 + q1 * q1 - 3.0 * a * a - b * b
}

/// `6ξ`; the second ξ₁-derivative at fixed output `ξ` is `−6ξ`.
pub fn resonance_d2(xi: f64) -> f64 {
    6.0 * xi
}
