//! Single-rate Runge-Kutta-Chebyshev stepping with a fixed-step driver.

use crate::chebyshev::{build_coefficients, select_stage_count, Order, RkcCoefficients};
use crate::error::{Error, Result};

/// A right-hand side `y' = f(t, y)` with a known bound on the spectral
/// radius of its Jacobian.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    /// Writes `f(t, y)` into `out`.
    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]);

    fn spectral_radius(&self, t: f64, y: &[f64]) -> f64;
}

/// [`OdeSystem`] from a pair of closures.
pub struct FnSystem<F, R> {
    dim: usize,
    rhs: F,
    rho: R,
}

impl<F, R> FnSystem<F, R>
where
    F: Fn(f64, &[f64], &mut [f64]),
    R: Fn(f64, &[f64]) -> f64,
{
    pub fn new(dim: usize, rhs: F, rho: R) -> Self {
        FnSystem { dim, rhs, rho }
    }
}

impl<F, R> OdeSystem for FnSystem<F, R>
where
    F: Fn(f64, &[f64], &mut [f64]),
    R: Fn(f64, &[f64]) -> f64,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.rhs)(t, y, out)
    }

    fn spectral_radius(&self, t: f64, y: &[f64]) -> f64 {
        (self.rho)(t, y)
    }
}

/// State at the end of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub y: Vec<f64>,
    pub stages_used: usize,
}

/// Initial state plus one record per completed step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R> {
    pub t0: f64,
    pub y0: Vec<f64>,
    pub steps: Vec<R>,
}

pub trait HasState {
    fn time(&self) -> f64;
    fn state(&self) -> &[f64];
}

impl HasState for StepRecord {
    fn time(&self) -> f64 {
        self.t
    }

    fn state(&self) -> &[f64] {
        &self.y
    }
}

impl<R: HasState> Trajectory<R> {
    pub fn final_time(&self) -> f64 {
        self.steps.last().map_or(self.t0, HasState::time)
    }

    pub fn final_state(&self) -> &[f64] {
        self.steps.last().map_or(&self.y0, HasState::state)
    }

    /// `(t, y)` pairs starting with the initial state.
    pub fn points(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        std::iter::once((self.t0, self.y0.as_slice()))
            .chain(self.steps.iter().map(|r| (r.time(), r.state())))
    }
}

pub(crate) fn check_step_size(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidStepSize(tau))
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_stability(scaled: f64, coeffs: &RkcCoefficients) -> Result<()> {
    if scaled > coeffs.ell() {
        Err(Error::StabilityViolation {
            scaled,
            bound: coeffs.ell(),
            stages: coeffs.stages(),
        })
    } else {
        Ok(())
    }
}

/// One RKC step of size `tau` from `(t, y)`.
///
/// Fails with [`Error::StabilityViolation`] if `tau * rho(t, y)` exceeds the
/// bound of `coeffs`.
pub fn rkc_step<S: OdeSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    coeffs: &RkcCoefficients,
) -> Result<Vec<f64>> {
    check_step_size(tau)?;
    check_dim(system.dim(), y.len())?;
    check_stability(tau * system.spectral_radius(t, y), coeffs)?;
    Ok(rkc_stages(system, t, y, tau, coeffs))
}

pub(crate) fn rkc_stages<S: OdeSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    coeffs: &RkcCoefficients,
) -> Vec<f64> {
    let n = y.len();
    let mut f0 = vec![0.0; n];
    system.rhs(t, y, &mut f0);

    // k_{i-2}, k_{i-1} and the stage being built
    let mut older = y.to_vec();
    let mut prev: Vec<f64> = y.iter().zip(&f0).map(|(&k, &f)| k + tau * coeffs.mu(1) * f).collect();
    let mut next = vec![0.0; n];
    let mut fi = vec![0.0; n];

    for i in 2..=coeffs.stages() {
        system.rhs(t + coeffs.c(i - 1) * tau, &prev, &mut fi);
        let (nu, kappa) = (coeffs.nu(i), coeffs.kappa(i));
        let (mu, gamma) = (tau * coeffs.mu(i), tau * coeffs.gamma(i));
        for r in 0..n {
            next[r] = y[r] + nu * (prev[r] - y[r]) + kappa * (older[r] - y[r]) + mu * fi[r] + gamma * f0[r];
        }
        std::mem::swap(&mut older, &mut prev);
        std::mem::swap(&mut prev, &mut next);
    }
    prev
}

/// Step sizes covering `[t0, t_end]`: uniform when `tau` divides the span,
/// otherwise whole steps followed by one shortened step.
pub(crate) fn step_times(t0: f64, t_end: f64, tau: f64) -> Result<Vec<f64>> {
    check_step_size(tau)?;
    if !(t_end.is_finite() && t0.is_finite() && t_end > t0) {
        return Err(Error::InvalidArgument(format!("need t_end > t0, got t0 = {t0}, t_end = {t_end}")));
    }
    let span = t_end - t0;
    let ratio = span / tau;
    let rounded = ratio.round();
    let tol = 1e-12 * span.max(1.0);
    let mut times = Vec::new();
    if rounded >= 1.0 && (rounded * tau - span).abs() <= tol {
        let n = rounded as usize;
        times.extend((1..n).map(|k| t0 + k as f64 * tau));
    } else {
        let n = ratio.floor() as usize;
        times.extend((1..=n).map(|k| t0 + k as f64 * tau).filter(|&t| t_end - t > tol));
    }
    times.push(t_end);
    Ok(times)
}

pub(crate) fn check_finite(t: f64, y: &[f64]) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(t))
    }
}

/// Fixed-step RKC integration from `(t0, y0)` to `t_end`.
///
/// The stage count is recomputed before every step from `tau * rho(t, y)`.
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tau: f64,
    order: Order,
    damping: f64,
) -> Result<Trajectory<StepRecord>> {
    check_dim(system.dim(), y0.len())?;
    let times = step_times(t0, t_end, tau)?;
    let mut steps = Vec::with_capacity(times.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut cached: Option<RkcCoefficients> = None;
    for t_next in times {
        let h = t_next - t;
        let s = select_stage_count(order, h * system.spectral_radius(t, &y), damping)?;
        let coeffs = match cached.take() {
            Some(c) if c.stages() == s => c,
            _ => build_coefficients(order, s, damping)?,
        };
        y = rkc_step(system, t, &y, h, &coeffs)?;
        check_finite(t_next, &y)?;
        t = t_next;
        steps.push(StepRecord { t, y: y.clone(), stages_used: s });
        cached = Some(coeffs);
    }
    Ok(Trajectory { t0, y0: y0.to_vec(), steps })
}

/// Amplification factor of one step applied to `y' = z y` with unit step.
pub fn scalar_step_factor(coeffs: &RkcCoefficients, z: f64) -> f64 {
    let system = FnSystem::new(1, move |_, y: &[f64], out: &mut [f64]| out[0] = z * y[0], |_, _| 0.0);
    rkc_stages(&system, 0.0, &[1.0], 1.0, coeffs)[0]
}
