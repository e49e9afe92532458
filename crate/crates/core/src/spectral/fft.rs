//! Thin FFT layer over `rustfft`.
//!
//! Plans are cached per thread, so concurrent callers never share mutable
//! planner state. All transforms here are unnormalized; callers apply the
//! quadrature weights from [`super::norm`].

use std::cell::RefCell;
use std::sync::Arc;

use ndarray::{ArrayBase, Axis, DataMut, Dimension};
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `Σ f e^{-ikx}`
    Forward,
    /// `Σ F e^{+ikx}` (no 1/M factor)
    Inverse,
}

impl From<Direction> for FftDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => FftDirection::Forward,
            Direction::Inverse => FftDirection::Inverse,
        }
    }
}

/// Transforms every lane of `a` along `axis`.
pub fn fft_axis<S, D>(a: &mut ArrayBase<S, D>, axis: usize, direction: Direction)
where
    S: DataMut<Elem = Complex64>,
    D: Dimension,
{
    let len = a.len_of(Axis(axis));
    if len <= 1 {
        return;
    }
    let fft = plan(len, direction.into());
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for mut lane in a.lanes_mut(Axis(axis)) {
        if let Some(slice) = lane.as_slice_mut() {
            fft.process_with_scratch(slice, &mut scratch);
        } else {
            for (b, v) in buf.iter_mut().zip(lane.iter()) {
                *b = *v;
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (v, b) in lane.iter_mut().zip(buf.iter()) {
                *v = *b;
            }
        }
    }
}

/// Transforms `a` along every axis.
pub fn fft_all<S, D>(a: &mut ArrayBase<S, D>, direction: Direction)
where
    S: DataMut<Elem = Complex64>,
    D: Dimension,
{
    for axis in (0..a.ndim()).rev() {
        fft_axis(a, axis, direction);
    }
}
