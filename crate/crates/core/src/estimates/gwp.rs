//! Exponent bookkeeping of the global iteration.
//!
//! Choosing `λ ∼ N^{(1−s)/(1+s)}` makes the rescaled modified energy `O(1)`.
//! Each local step costs `N^{−1/10}` of energy increment, so `N^{1/10} ≳ λ³T`,
//! i.e. `N^{1/10 − 3(1−s)/(1+s)} ≳ T`. This is solvable iff
//! `1/10 > 3(1−s)/(1+s)`, that is `s > 29/31`.

use num_rational::Ratio;

use crate::error::{Result, ZkError};

type Q = Ratio<i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct GwpRecord {
    pub s: Q,
    /// `λ ∼ N^{lambda_exponent}`, `(1−s)/(1+s)`.
    pub lambda_exponent: Q,
    /// `N(T) ∼ T^{n_exponent}`, `10(1+s)/(31s−29)`.
    pub n_exponent: Q,
    /// `‖u(T)‖_{H^s} ≲ T^{growth_exponent}`, `10(1−s)/(31s−29)`.
    pub growth_exponent: Q,
    /// `(1+s)·growth_exponent`, the value obtained by chaining through
    /// `N^{1−s}` and `λ^{1+s}` separately; kept for comparison.
    pub chained_exponent: Q,
    pub t: f64,
    pub n_of_t: f64,
    pub lambda_of_t: f64,
    pub growth_of_t: f64,
}

impl GwpRecord {
    pub const CSV_HEADER: [&'static str; 9] = [
        "s",
        "lambda_exponent",
        "n_exponent",
        "growth_exponent",
        "chained_exponent",
        "T",
        "N_of_T",
        "lambda_of_T",
        "growth_of_T",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.s.to_string(),
            self.lambda_exponent.to_string(),
            self.n_exponent.to_string(),
            self.growth_exponent.to_string(),
            self.chained_exponent.to_string(),
            format!("{}", self.t),
            format!("{:.17e}", self.n_of_t),
            format!("{:.17e}", self.lambda_of_t),
            format!("{:.17e}", self.growth_of_t),
        ]
    }
}

fn to_f64(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `true` iff `29/31 < s < 1`.
pub fn is_feasible(s: Q) -> bool {
    s > Q::new(29, 31) && s < Q::from_integer(1)
}

pub fn gwp_arithmetic(s: Q, t: f64) -> Result<GwpRecord> {
    if !is_feasible(s) {
        return Err(ZkError::Infeasible(format!(
            "infeasible s={s}: need 29/31 < s < 1 so that 1/10 > 3(1-s)/(1+s)"
        )));
    }
    if !(t.is_finite() && t >= 1.0) {
        return Err(ZkError::InvalidArgument(format!("T={t} must be >= 1")));
    }
    let one = Q::from_integer(1);
    let ten = Q::from_integer(10);
    let den = Q::from_integer(31) * s - Q::from_integer(29);
    let lambda_exponent = (one - s) / (one + s);
    // N^{1/10 − 3·lambda_exponent} = T
    let n_exponent = one / (Q::new(1, 10) - Q::from_integer(3) * lambda_exponent);
    debug_assert_eq!(n_exponent, ten * (one + s) / den);
    let growth_exponent = ten * (one - s) / den;
    let n_of_t = t.powf(to_f64(n_exponent));
    Ok(GwpRecord {
        s,
        lambda_exponent,
        n_exponent,
        growth_exponent,
        chained_exponent: (one + s) * growth_exponent,
        t,
        n_of_t,
        lambda_of_t: n_of_t.powf(to_f64(lambda_exponent)),
        growth_of_t: t.powf(to_f64(growth_exponent)),
    })
}

/// [`gwp_arithmetic`] for a decimal `s`, taken as the closest fraction with
/// denominator at most `10⁶`.
pub fn gwp_arithmetic_f64(s: f64, t: f64) -> Result<GwpRecord> {
    let q = rational_from_f64(s)?;
    gwp_arithmetic(q, t)
}

pub fn rational_from_f64(s: f64) -> Result<Q> {
    if !s.is_finite() {
        return Err(ZkError::InvalidArgument(format!("s={s} is not finite")));
    }
    let mut best = Q::from_integer(s.round() as i64);
    let mut err = (s - to_f64(best)).abs();
    for d in 1..=1_000_000i64 {
        let n = (s * d as f64).round() as i64;
        let e = (s - n as f64 / d as f64).abs();
        if e < err {
            best = Q::new(n, d);
            err = e;
            if err <= f64::EPSILON * s.abs() {
                break;
            }
        }
    }
    Ok(best)
}
