//! Time evolution of `u_t + ∂ₓΔu + u uₓ = 0` in Fourier space,
//! `û_t = iσû − ½ iξ F(u²)`.

pub mod data;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZkError};
use crate::spectral::{product_aliased, square, GridSpec, SpectralField};
use crate::symbols::sigma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Strang,
    Etdrk4,
}

impl std::str::FromStr for Scheme {
    type Err = ZkError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strang" => Ok(Scheme::Strang),
            "etdrk4" => Ok(Scheme::Etdrk4),
            _ => Err(ZkError::InvalidArgument(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub dealias: bool,
    pub tend: f64,
    /// Store every k-th step (the final state is always stored).
    pub snapshot_every: usize,
}

impl IntegratorConfig {
    pub fn new(scheme: Scheme, dt: f64, tend: f64) -> Result<Self> {
        let cfg = Self {
            scheme,
            dt,
            dealias: true,
            tend,
            snapshot_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_snapshot_every(mut self, k: usize) -> Self {
        self.snapshot_every = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ZkError::InvalidArgument(format!(
                "dt={} must be > 0",
                self.dt
            )));
        }
        if !(self.tend.is_finite() && self.tend > 0.0) {
            return Err(ZkError::InvalidArgument(format!(
                "Tend={} must be > 0",
                self.tend
            )));
        }
        if self.snapshot_every == 0 {
            return Err(ZkError::InvalidArgument(
                "snapshot cadence must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Step count and the step actually used (`Tend / n`).
    pub fn steps(&self) -> (usize, f64) {
        let n = ((self.tend / self.dt).round() as usize).max(1);
        (n, self.tend / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    times: Vec<f64>,
    states: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<SpectralField>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(ZkError::InvalidArgument(format!(
                "trajectory needs matching nonempty series ({} times, {} states)",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ZkError::InvalidArgument(
                "trajectory times must increase".into(),
            ));
        }
        let grid = *states[0].grid();
        if states.iter().any(|s| !s.grid().same_as(&grid)) {
            return Err(ZkError::GridMismatch);
        }
        Ok(Self {
            grid,
            times,
            states,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SpectralField] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("nonempty trajectory")
    }

    /// Every `k`-th snapshot, keeping the first and the last.
    pub fn thinned(&self, k: usize) -> Result<Trajectory> {
        let k = k.max(1);
        let n = self.len() - 1;
        let idx: Vec<usize> = (0..=n).filter(|i| i % k == 0 || *i == n).collect();
        Trajectory::new(
            idx.iter().map(|&i| self.times[i]).collect(),
            idx.iter().map(|&i| self.states[i].clone()).collect(),
        )
    }
}

/// `e^{-t∂ₓΔ}`: multiplies each mode by `e^{itσ(ξ,q)}`.
pub fn propagate_linear(f: &SpectralField, t: f64) -> SpectralField {
    let g = *f.grid();
    f.map_indexed(|i, j| Complex64::from_polar(1.0, t * odd_sigma(&g, i, j)))
}

/// `σ` with the x-Nyquist row treated as `ξ = 0`, keeping odd symbols real.
fn odd_sigma(g: &GridSpec, i: usize, j: usize) -> f64 {
    sigma(g.xi_odd(i), g.q(j))
}

/// `−½ iξ F(u²)`, the transform of `−u uₓ`.
pub fn nonlinear_rhs(f: &SpectralField) -> Result<SpectralField> {
    if !f.is_finite() {
        return Err(ZkError::InvalidArgument(
            "non-finite coefficients in nonlinear term".into(),
        ));
    }
    Ok(nonlinear(f, true))
}

pub(crate) fn nonlinear(f: &SpectralField, dealias: bool) -> SpectralField {
    let sq = if dealias {
        square(f)
    } else {
        product_aliased(f, f).expect("same grid")
    };
    let g = *f.grid();
    sq.map_indexed(|i, _| Complex64::new(0.0, -0.5 * g.xi_odd(i)))
}

/// `φ₁, φ₂, φ₃` at `z`, with `φ_k(z) = Σ_n zⁿ/(n+k)!`.
///
/// Near the origin the closed forms cancel catastrophically; there the value
/// is the mean over 32 points of the unit circle around `z`.
pub fn phi_functions(z: Complex64) -> [Complex64; 3] {
    const M: usize = 32;
    if z.norm() >= 0.5 {
        return phi_direct(z);
    }
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for k in 0..M {
        let theta = std::f64::consts::PI * (k as f64 + 0.5) / M as f64 * 2.0;
        let r = z + Complex64::from_polar(1.0, theta);
        let p = phi_direct(r);
        for (a, v) in acc.iter_mut().zip(p) {
            *a += v;
        }
    }
    acc.map(|a| a / M as f64)
}

fn phi_direct(z: Complex64) -> [Complex64; 3] {
    let e = z.exp();
    let one = Complex64::new(1.0, 0.0);
    let p1 = (e - one) / z;
    let p2 = (e - one - z) / (z * z);
    let p3 = (e - one - z - z * z * 0.5) / (z * z * z);
    [p1, p2, p3]
}

/// A time stepper with its per-mode coefficients precomputed.
pub struct Stepper {
    scheme: Scheme,
    dealias: bool,
    dt: f64,
    e: Array2<Complex64>,
    e2: Array2<Complex64>,
    etd: Option<EtdCoefficients>,
}

struct EtdCoefficients {
    q: Array2<Complex64>,
    f1: Array2<Complex64>,
    f2: Array2<Complex64>,
    f3: Array2<Complex64>,
}

impl Stepper {
    pub fn new(grid: &GridSpec, scheme: Scheme, dt: f64, dealias: bool) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(ZkError::InvalidArgument(format!("dt={dt} must be > 0")));
        }
        let shape = grid.shape();
        let lin = Array2::from_shape_fn(shape, |(i, j)| {
            Complex64::new(0.0, odd_sigma(grid, i, j) * dt)
        });
        let e = lin.mapv(|z| z.exp());
        let e2 = lin.mapv(|z| (z * 0.5).exp());
        let etd = (scheme == Scheme::Etdrk4).then(|| {
            let mut c = EtdCoefficients {
                q: Array2::zeros(shape),
                f1: Array2::zeros(shape),
                f2: Array2::zeros(shape),
                f3: Array2::zeros(shape),
            };
            for ((i, j), z) in lin.indexed_iter() {
                let [p1, p2, p3] = phi_functions(*z);
                let [h1, _, _] = phi_functions(z * 0.5);
                c.q[[i, j]] = h1 * (0.5 * dt);
                c.f1[[i, j]] = (p1 - p2 * 3.0 + p3 * 4.0) * dt;
                c.f2[[i, j]] = (p2 - p3 * 2.0) * dt;
                c.f3[[i, j]] = (p3 * 4.0 - p2) * dt;
            }
            c
        });
        Ok(Self {
            scheme,
            dealias,
            dt,
            e,
            e2,
            etd,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn rhs(&self, f: &SpectralField) -> SpectralField {
        nonlinear(f, self.dealias)
    }

    pub fn step(&self, f: &SpectralField) -> SpectralField {
        match self.scheme {
            Scheme::Strang => self.strang(f),
            Scheme::Etdrk4 => self.etdrk4(f),
        }
    }

    fn strang(&self, f: &SpectralField) -> SpectralField {
        let h = self.dt;
        let v = times(f, &self.e2);
        let k1 = self.rhs(&v);
        let k2 = self.rhs(&axpy(&v, 0.5 * h, &k1));
        let k3 = self.rhs(&axpy(&v, 0.5 * h, &k2));
        let k4 = self.rhs(&axpy(&v, h, &k3));
        let mut w = v;
        Zip::from(w.coeffs_mut())
            .and(k1.coeffs())
            .and(k2.coeffs())
            .and(k3.coeffs())
            .and(k4.coeffs())
            .for_each(|w, a, b, c, d| *w += (a + 2.0 * b + 2.0 * c + d) * (h / 6.0));
        times(&w, &self.e2)
    }

    fn etdrk4(&self, f: &SpectralField) -> SpectralField {
        let c = self.etd.as_ref().expect("ETDRK4 coefficients");
        let nv = self.rhs(f);
        let e2v = times(f, &self.e2);
        let a = combine(&e2v, &[(&c.q, &nv)]);
        let na = self.rhs(&a);
        let b = combine(&e2v, &[(&c.q, &na)]);
        let nb = self.rhs(&b);
        let mut twonb_nv = nb.clone();
        Zip::from(twonb_nv.coeffs_mut())
            .and(nv.coeffs())
            .for_each(|x, v| *x = *x * 2.0 - v);
        let cc = combine(&times(&a, &self.e2), &[(&c.q, &twonb_nv)]);
        let nc = self.rhs(&cc);
        let mut nab = na;
        Zip::from(nab.coeffs_mut())
            .and(nb.coeffs())
            .for_each(|x, y| *x += y);
        let mut out = times(f, &self.e);
        Zip::from(out.coeffs_mut())
            .and(&c.f1)
            .and(&c.f2)
            .and(nv.coeffs())
            .and(nab.coeffs())
            .for_each(|o, f1, f2, nv, nab| *o += f1 * nv + f2 * nab * 2.0);
        Zip::from(out.coeffs_mut())
            .and(&c.f3)
            .and(nc.coeffs())
            .for_each(|o, f3, nc| *o += f3 * nc);
        out
    }
}

fn times(f: &SpectralField, m: &Array2<Complex64>) -> SpectralField {
    let mut out = f.clone();
    Zip::from(out.coeffs_mut()).and(m).for_each(|c, m| *c *= m);
    out
}

fn axpy(x: &SpectralField, a: f64, y: &SpectralField) -> SpectralField {
    let mut out = x.clone();
    Zip::from(out.coeffs_mut())
        .and(y.coeffs())
        .for_each(|o, y| *o += y * a);
    out
}

fn combine(base: &SpectralField, terms: &[(&Array2<Complex64>, &SpectralField)]) -> SpectralField {
    let mut out = base.clone();
    for (m, f) in terms {
        Zip::from(out.coeffs_mut())
            .and(*m)
            .and(f.coeffs())
            .for_each(|o, m, f| *o += m * f);
    }
    out
}

/// One step of length `cfg.dt`.
pub fn step(f: &SpectralField, cfg: &IntegratorConfig) -> Result<SpectralField> {
    cfg.validate()?;
    Ok(Stepper::new(f.grid(), cfg.scheme, cfg.dt, cfg.dealias)?.step(f))
}

/// Integrates to `cfg.tend` with `round(Tend/dt)` equal steps.
pub fn evolve(f0: &SpectralField, cfg: &IntegratorConfig) -> Result<Trajectory> {
    match evolve_partial(f0, cfg)? {
        (traj, None) => Ok(traj),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`evolve`], but on a non-finite state returns the snapshots taken
/// so far together with the [`ZkError::NonFinite`] diagnostic.
pub fn evolve_partial(
    f0: &SpectralField,
    cfg: &IntegratorConfig,
) -> Result<(Trajectory, Option<ZkError>)> {
    cfg.validate()?;
    let (n, dt) = cfg.steps();
    let stepper = Stepper::new(f0.grid(), cfg.scheme, dt, cfg.dealias)?;
    let mut times = vec![0.0];
    let mut states = vec![f0.clone()];
    let mut u = f0.clone();
    let mut failure = None;
    for k in 1..=n {
        u = stepper.step(&u);
        let t = k as f64 * dt;
        if !u.is_finite() {
            failure = Some(ZkError::NonFinite { time: t, step: k });
            break;
        }
        if k % cfg.snapshot_every == 0 || k == n {
            times.push(t);
            states.push(u.clone());
        }
    }
    Ok((Trajectory::new(times, states)?, failure))
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// Iterates `Ψ¹(0), Ψ²(0), …`; the first is the free solution.
    pub iterates: Vec<Trajectory>,
    /// `sup_t ‖u^{k+1}(t) − u^k(t)‖_{H¹}` for consecutive iterates.
    pub differences: Vec<f64>,
    /// Set when the last difference exceeds the one before it.
    pub diverging: bool,
}

/// Picard iteration of the Duhamel map on `[0, δ]` with `steps` quadrature
/// intervals: `u ↦ e^{-t∂ₓΔ}u₀ − ½∫₀ᵗ e^{-(t−t')∂ₓΔ}∂ₓ(u²)(t')dt'`.
///
/// The time integral treats the nonlinear term as piecewise linear in `t'`
/// and integrates the propagator exactly against it.
pub fn duhamel_picard(
    u0: &SpectralField,
    delta: f64,
    iterations: usize,
    steps: usize,
) -> Result<PicardResult> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(ZkError::InvalidArgument(format!("δ={delta} must be > 0")));
    }
    if iterations == 0 || steps == 0 {
        return Err(ZkError::InvalidArgument(
            "need at least one iteration and one step".into(),
        ));
    }
    let g = *u0.grid();
    let h = delta / steps as f64;
    let grid_times: Vec<f64> = (0..=steps).map(|n| n as f64 * h).collect();
    let shape = g.shape();
    let z = Array2::from_shape_fn(shape, |(i, j)| Complex64::new(0.0, odd_sigma(&g, i, j) * h));
    let e = z.mapv(|z| z.exp());
    let mut w0 = Array2::zeros(shape);
    let mut w1 = Array2::zeros(shape);
    for ((i, j), z) in z.indexed_iter() {
        let [p1, p2, _] = phi_functions(*z);
        w0[[i, j]] = (p1 - p2) * h;
        w1[[i, j]] = p2 * h;
    }
    let free: Vec<SpectralField> = grid_times
        .iter()
        .map(|&t| propagate_linear(u0, t))
        .collect();

    let mut iterates: Vec<Trajectory> = Vec::with_capacity(iterations);
    let mut differences = Vec::new();
    let mut prev: Option<Vec<SpectralField>> = None;
    for _ in 0..iterations {
        let next = match &prev {
            None => free.clone(),
            Some(p) => {
                let nl: Vec<SpectralField> = p.iter().map(|u| nonlinear(u, true)).collect();
                let mut d = SpectralField::zeros(g);
                let mut out = vec![free[0].clone()];
                for n in 0..steps {
                    let mut nd = times(&d, &e);
                    Zip::from(nd.coeffs_mut())
                        .and(&w0)
                        .and(&w1)
                        .and(nl[n].coeffs())
                        .and(nl[n + 1].coeffs())
                        .for_each(|o, a, b, x, y| *o += a * x + b * y);
                    d = nd;
                    out.push(free[n + 1].add(&d)?);
                }
                out
            }
        };
        if let Some(p) = &prev {
            let diff = p
                .iter()
                .zip(&next)
                .map(|(a, b)| b.sub(a).map(|d| d.hs_norm(1.0)))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            differences.push(diff);
        }
        iterates.push(Trajectory::new(grid_times.clone(), next.clone())?);
        prev = Some(next);
    }
    let diverging = differences.len() >= 2
        && differences[differences.len() - 1] > differences[differences.len() - 2];
    Ok(PicardResult {
        iterates,
        differences,
        diverging,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, inverse, PhysicalField};

    fn grid() -> GridSpec {
        GridSpec::new(2.0, 1.0, 32, 16, 0.01).unwrap()
    }

    #[test]
    fn phi_functions_match_series() {
        for z in [
            Complex64::new(0.0, 1e-9),
            Complex64::new(0.0, 0.3),
            Complex64::new(0.0, 0.49),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -5.0),
        ] {
            let mut series = [Complex64::new(0.0, 0.0); 3];
            let mut fact = [1.0, 2.0, 6.0];
            let mut zn = Complex64::new(1.0, 0.0);
            for n in 0..60 {
                for k in 0..3 {
                    series[k] += zn / fact[k];
                    fact[k] *= (n + k + 2) as f64;
                }
                zn *= z;
            }
            let got = phi_functions(z);
            for k in 0..3 {
                assert!((got[k] - series[k]).norm() < 1e-13, "{z} φ{}", k + 1);
            }
        }
    }

    #[test]
    fn linear_phase_on_unit_mode() {
        let g = GridSpec::new(1.0, 1.0, 16, 16, 0.01).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_mode(1, 0, Complex64::new(1.0, 0.0), true).unwrap();
        let out = propagate_linear(&f, 1.0);
        assert!((out.coeff(1, 0).unwrap() - Complex64::from_polar(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn nonlinear_of_constant_vanishes() {
        let g = grid();
        let f = forward(&PhysicalField::from_fn(g, |_, _| 2.5).unwrap());
        assert!(nonlinear_rhs(&f).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn nonlinear_of_cosine() {
        // u = cos(x/Λ): −u uₓ = ½ sin(2x/Λ)/Λ
        let g = grid();
        let f = forward(&PhysicalField::from_fn(g, |x, _| (x / 2.0).cos()).unwrap());
        let out = inverse(&nonlinear_rhs(&f).unwrap()).unwrap();
        let expect = PhysicalField::from_fn(g, |x, _| 0.25 * (x).sin()).unwrap();
        for (a, b) in out.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = IntegratorConfig::new(Scheme::Etdrk4, 0.01, 0.1).unwrap();
        let tr = evolve(&SpectralField::zeros(grid()), &cfg).unwrap();
        assert_eq!(tr.len(), 11);
        assert!(tr.states().iter().all(|s| s.max_abs() == 0.0));
    }

    #[test]
    fn step_count_rounds_to_endpoint() {
        let cfg = IntegratorConfig::new(Scheme::Strang, 0.3, 1.0).unwrap();
        let (n, dt) = cfg.steps();
        assert_eq!(n, 3);
        assert!((dt * 3.0 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn snapshot_cadence_keeps_final_state() {
        let g = grid();
        let f =
            forward(&PhysicalField::from_fn(g, |x, y| 0.1 * (x / 2.0).cos() * y.sin()).unwrap());
        let cfg = IntegratorConfig::new(Scheme::Strang, 0.01, 0.05)
            .unwrap()
            .with_snapshot_every(2);
        let tr = evolve(&f, &cfg).unwrap();
        assert_eq!(tr.len(), 4);
        assert!((tr.times()[3] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn first_picard_iterate_is_free_flow() {
        let g = grid();
        let f =
            forward(&PhysicalField::from_fn(g, |x, y| 0.2 * (x / 2.0).sin() * y.cos()).unwrap());
        let p = duhamel_picard(&f, 0.05, 1, 5).unwrap();
        let last = p.iterates[0].last();
        assert_eq!(last, &propagate_linear(&f, 0.05));
    }
}
