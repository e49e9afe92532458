//! The single normalization table for all transforms.
//!
//! The forward transform is the quadrature approximation of
//! `∫∫ e^{-i(xξ+yq)} f dx dy`, i.e. the DFT weighted by the cell area. The
//! inverse is `(1/area) Σ F e^{i(xξ+yq)}`, the periodic-box form of
//! `1/((2π)²Λλ) Σ_q ∫ dξ`. Everything else (Parseval, convolution, Sobolev
//! norms) follows from these two weights:
//!
//! | quantity                 | weight            |
//! |--------------------------|-------------------|
//! | forward                  | `area / (Mx·My)`  |
//! | inverse                  | `1 / area`        |
//! | `∫ f ḡ` from coefficients | `1 / area`        |
//! | `F(fg)` from `F f ∗ F g`  | `1 / area`        |
//!
//! Space-time fields use the same rules with `area` replaced by
//! `area · Tspan`.

use super::grid::GridSpec;

pub fn forward_weight(grid: &GridSpec) -> f64 {
    grid.cell_area()
}

pub fn inverse_weight(grid: &GridSpec) -> f64 {
    1.0 / grid.area()
}

pub fn parseval_weight(grid: &GridSpec) -> f64 {
    1.0 / grid.area()
}

pub fn convolution_weight(grid: &GridSpec) -> f64 {
    1.0 / grid.area()
}

/// Weight of the space-time Parseval sum over a period `tspan`.
pub fn spacetime_parseval_weight(grid: &GridSpec, tspan: f64) -> f64 {
    1.0 / (grid.area() * tspan)
}
