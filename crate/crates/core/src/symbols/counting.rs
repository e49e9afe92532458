//! Brute-force checks of the lattice counting bounds.

use serde::Serialize;

use crate::error::{Result, ZkError};

/// Constant in the parabola bound `C·λ(|I|^{1/2}/|a|^{1/2} + 1)`.
pub const PARABOLA_C: f64 = 4.0;
/// Constant in the preimage bound `C·|I|/inf|f'|`.
pub const PREIMAGE_C: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub lo: f64,
    pub hi: f64,
    pub lambda: f64,
    pub count: u64,
    pub bound: f64,
}

impl CountReport {
    pub fn holds(&self) -> bool {
        self.count as f64 <= self.bound
    }

    pub const CSV_HEADER: [&'static str; 8] =
        ["a", "b", "c", "lo", "hi", "lambda", "count", "bound"];
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 1.0) {
        return Err(ZkError::InvalidArgument(format!("λ={lambda} must be >= 1")));
    }
    Ok(())
}

/// Counts `q ∈ ℤ/λ` with `|q| ≤ qmax` and `aq² + bq + c ∈ [lo, hi]`.
///
/// The window must contain every solution: `|a|(q−v)² ≤ max(|lo|,|hi|) + |d|`
/// with vertex `v = −b/2a` and `d = c − b²/4a`, otherwise the count could be
/// truncated and [`ZkError::WindowTooSmall`] is returned. An interval with
/// `lo > hi` is empty.
pub fn count_parabola(
    a: f64,
    b: f64,
    c: f64,
    interval: (f64, f64),
    lambda: f64,
    qmax: f64,
) -> Result<CountReport> {
    let (lo, hi) = interval;
    if a == 0.0 || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(ZkError::InvalidArgument("need finite a != 0, b, c".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ZkError::InvalidArgument("interval must be finite".into()));
    }
    check_lambda(lambda)?;
    let len = (hi - lo).max(0.0);
    let bound = PARABOLA_C * lambda * ((len / a.abs()).sqrt() + 1.0);
    let mut report = CountReport {
        a,
        b,
        c,
        lo,
        hi,
        lambda,
        count: 0,
        bound,
    };
    if lo > hi {
        return Ok(report);
    }
    let v = -b / (2.0 * a);
    let d = c - b * b / (4.0 * a);
    let r = ((lo.abs().max(hi.abs()) + d.abs()) / a.abs()).sqrt();
    // one lattice step of slack against rounding at the window edge
    let (q0, q1) = (v - r - 1.0 / lambda, v + r + 1.0 / lambda);
    if q0 < -qmax || q1 > qmax {
        return Err(ZkError::WindowTooSmall(format!(
            "solutions may reach [{q0:.6}, {q1:.6}] outside |q| <= {qmax}"
        )));
    }
    let n0 = (q0 * lambda).floor() as i64;
    let n1 = (q1 * lambda).ceil() as i64;
    report.count = (n0..=n1)
        .filter(|&n| {
            let q = n as f64 / lambda;
            let f = a * q * q + b * q + c;
            lo <= f && f <= hi
        })
        .count() as u64;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphCount {
    pub count: u64,
    pub rows: u64,
    pub row_bound: usize,
    pub bound: f64,
}

impl GraphCount {
    pub fn holds(&self) -> bool {
        self.count as f64 <= self.bound
    }
}

/// Counts points `(ξ, q)` with `ξ` in `xwindow`, `q ∈ ℤ/λ ∩ [lo, hi]` and
/// `predicate(ξ, q)`. Each row `q` may hold at most `row_bound` points;
/// the returned bound is `λ·C(|I| + 1)`.
pub fn count_graph_set(
    predicate: impl Fn(f64, f64) -> bool,
    xwindow: &[f64],
    interval: (f64, f64),
    lambda: f64,
    row_bound: usize,
) -> Result<GraphCount> {
    check_lambda(lambda)?;
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ZkError::InvalidArgument("interval must be finite".into()));
    }
    let len = (hi - lo).max(0.0);
    let mut out = GraphCount {
        count: 0,
        rows: 0,
        row_bound,
        bound: lambda * row_bound as f64 * (len + 1.0),
    };
    if lo > hi {
        return Ok(out);
    }
    let n0 = (lo * lambda).ceil() as i64;
    let n1 = (hi * lambda).floor() as i64;
    for n in n0..=n1 {
        let q = n as f64 / lambda;
        let row = xwindow.iter().filter(|&&x| predicate(x, q)).count();
        if row > row_bound {
            return Err(ZkError::UnboundedRow {
                q,
                count: row,
                bound: row_bound,
            });
        }
        out.rows += 1;
        out.count += row as u64;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreimageReport {
    pub measure: f64,
    pub bound: f64,
    pub samples: usize,
}

impl PreimageReport {
    pub fn holds(&self) -> bool {
        self.measure <= self.bound
    }
}

/// Measure of `{x ∈ J : f(x) ∈ I}` by midpoint sampling, doubling the sample
/// count until two successive estimates agree to `1e-5·|J|`.
pub fn preimage_measure(
    f: impl Fn(f64) -> f64,
    domain: (f64, f64),
    interval: (f64, f64),
    dmin: f64,
) -> Result<PreimageReport> {
    let (j0, j1) = domain;
    let (lo, hi) = interval;
    if !(j0 < j1 && j0.is_finite() && j1.is_finite()) {
        return Err(ZkError::InvalidArgument(
            "domain must be a finite nonempty interval".into(),
        ));
    }
    if !(dmin.is_finite() && dmin > 0.0) {
        return Err(ZkError::InvalidArgument(format!("dmin={dmin} must be > 0")));
    }
    let width = j1 - j0;
    let bound = PREIMAGE_C * (hi - lo).max(0.0) / dmin;
    let estimate = |n: usize| {
        let h = width / n as f64;
        let hits = (0..n)
            .filter(|&k| {
                let y = f(j0 + (k as f64 + 0.5) * h);
                lo <= y && y <= hi
            })
            .count();
        hits as f64 * h
    };
    let mut n = 1 << 12;
    let mut prev = estimate(n);
    while n < 1 << 24 {
        n *= 2;
        let cur = estimate(n);
        if (cur - prev).abs() <= 1e-5 * width {
            return Ok(PreimageReport {
                measure: cur,
                bound,
                samples: n,
            });
        }
        prev = cur;
    }
    Err(ZkError::NotConverged(format!(
        "preimage measure still moving at {n} samples"
    )))
}
