//! Grids, transforms, Sobolev norms and the field file format.

pub mod fft;
pub mod field;
pub mod grid;
pub mod norm;
pub mod snapshot;
pub mod spacetime;

pub use field::{
    convolve, cubic_integral, forward, inverse, inverse_complex, pairwise_sum, product_aliased,
    square, PhysicalField, SpectralField, HERMITIAN_TOL,
};
pub use grid::GridSpec;
pub use spacetime::{
    bilinear_modes, commensurate_tspan, ModeColumn, PairSymbol, ProductMode, SpaceTimeField,
    TimeWindow,
};
