//! Additive multirate RKC.
//!
//! The system is split by a diagonal 0/1 mask `D` into a fast part
//! `f_F = D f` and a slow part `f_S = (I - D) f`. Each part is advanced by
//! its own RKC chain (m fast stages `l_j`, s slow stages `k_i`), and each
//! chain sees the other through linear interpolation between stages. The
//! chains are interlaced so that the one lagging in time always moves next.

use crate::chebyshev::{build_coefficients, select_stage_count, Order, RkcCoefficients};
use crate::error::{Error, Result};
use crate::rkc::{check_dim, check_finite, check_stability, check_step_size, step_times, HasState, OdeSystem, Trajectory};

/// A system split into fast and slow right-hand sides.
///
/// `fast_rhs` must vanish on components where the mask is false and
/// `slow_rhs` where it is true.
pub trait SplitSystem {
    fn dim(&self) -> usize;

    /// `true` where `D_ii = 1`.
    fn fast_mask(&self) -> &[bool];

    fn fast_rhs(&self, t: f64, y: &[f64], out: &mut [f64]);

    fn slow_rhs(&self, t: f64, y: &[f64], out: &mut [f64]);

    fn fast_spectral_radius(&self, t: f64, y: &[f64]) -> f64;

    fn slow_spectral_radius(&self, t: f64, y: &[f64]) -> f64;
}

/// Which chain moves next, with the cursor values at the moment of the decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advance {
    /// `l_{j+1}` is computed from the slow ghost value at `d_j`.
    Fast { i: usize, j: usize },
    /// `k_{i+1}` is computed from the fast ghost value at `c_i`.
    Slow { i: usize, j: usize },
}

/// Cursor ledger of one ARKC step.
///
/// Starts after `k_1` and `l_1` are known (`i = j = 1`) and yields the
/// `s + m - 2` remaining stage advances in execution order.
#[derive(Debug, Clone)]
pub struct ArkcStepState<'a> {
    c: &'a [f64],
    d: &'a [f64],
    i: usize,
    j: usize,
}

impl<'a> ArkcStepState<'a> {
    /// `c` and `d` are the slow and fast abscissae, both starting at 0 and ending at 1.
    pub fn new(c: &'a [f64], d: &'a [f64]) -> Self {
        assert!(c.len() >= 2 && d.len() >= 2, "need at least one stage per chain");
        ArkcStepState { c, d, i: 1, j: 1 }
    }

    pub fn slow_stages(&self) -> usize {
        self.c.len() - 1
    }

    pub fn fast_stages(&self) -> usize {
        self.d.len() - 1
    }

    pub fn cursors(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn is_done(&self) -> bool {
        self.i == self.slow_stages() && self.j == self.fast_stages()
    }
}

impl Iterator for ArkcStepState<'_> {
    type Item = Advance;

    fn next(&mut self) -> Option<Advance> {
        let (s, m) = (self.slow_stages(), self.fast_stages());
        if self.i >= s && self.j >= m {
            return None;
        }
        let (i, j) = (self.i, self.j);
        if self.d[j] < self.c[i] {
            debug_assert!(j < m, "fast chain finished before slow abscissa {}", self.c[i]);
            self.j += 1;
            Some(Advance::Fast { i, j })
        } else {
            debug_assert!(i < s, "slow chain finished before fast abscissa {}", self.d[j]);
            self.i += 1;
            Some(Advance::Slow { i, j })
        }
    }
}

fn lerp(lo: (f64, &[f64]), hi: (f64, &[f64]), at: f64, out: &mut [f64]) {
    if at == hi.0 {
        out.copy_from_slice(hi.1);
        return;
    }
    let w = (at - lo.0) / (hi.0 - lo.0);
    for ((o, &a), &b) in out.iter_mut().zip(lo.1).zip(hi.1) {
        *o = a + w * (b - a);
    }
}

/// Fast ghost value `l~_i` at slow abscissa `c_i`, interpolated between
/// `(d_{j-1}, l_{j-1})` and `(d_j, l_j)`. Requires `d_{j-1} < c_i <= d_j`.
pub fn interp_fast(
    lower: (f64, &[f64]),
    upper: (f64, &[f64]),
    c_i: f64,
    out: &mut [f64],
) -> Result<()> {
    if !(lower.0 < c_i && c_i <= upper.0) {
        return Err(Error::Sequencing { lo: lower.0, hi: upper.0, at: c_i });
    }
    lerp(lower, upper, c_i, out);
    Ok(())
}

/// Slow ghost value `k~_j` at fast abscissa `d_j`, interpolated between
/// `(c_{i-1}, k_{i-1})` and `(c_i, k_i)`. Requires `c_{i-1} <= d_j <= c_i`;
/// at `d_j = c_{i-1}` the weight is zero and `k_{i-1}` is returned.
pub fn interp_slow(
    lower: (f64, &[f64]),
    upper: (f64, &[f64]),
    d_j: f64,
    out: &mut [f64],
) -> Result<()> {
    if !(lower.0 <= d_j && d_j <= upper.0 && lower.0 < upper.0) {
        return Err(Error::Sequencing { lo: lower.0, hi: upper.0, at: d_j });
    }
    lerp(lower, upper, d_j, out);
    Ok(())
}

/// Two most recent stages of one chain plus its starting value.
struct Chain {
    start: Vec<f64>,
    older: Vec<f64>,
    prev: Vec<f64>,
    next: Vec<f64>,
}

impl Chain {
    fn new(start: Vec<f64>, first: Vec<f64>) -> Self {
        let n = start.len();
        Chain { older: start.clone(), start, prev: first, next: vec![0.0; n] }
    }

    /// Computes stage `idx` of `coeffs` from the rhs value `f` at the previous stage.
    fn push(&mut self, coeffs: &RkcCoefficients, idx: usize, tau: f64, f: &[f64], f0: &[f64]) {
        let (nu, kappa) = (coeffs.nu(idx), coeffs.kappa(idx));
        let (mu, gamma) = (tau * coeffs.mu(idx), tau * coeffs.gamma(idx));
        for r in 0..self.start.len() {
            let y0 = self.start[r];
            self.next[r] = y0 + nu * (self.prev[r] - y0) + kappa * (self.older[r] - y0) + mu * f[r] + gamma * f0[r];
        }
        std::mem::swap(&mut self.older, &mut self.prev);
        std::mem::swap(&mut self.prev, &mut self.next);
    }
}

/// One ARKC step with the stage counts fixed by the two coefficient sets.
pub fn arkc_step_with<S: SplitSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    slow: &RkcCoefficients,
    fast: &RkcCoefficients,
) -> Result<Vec<f64>> {
    check_step_size(tau)?;
    check_dim(system.dim(), y.len())?;
    check_stability(tau * system.fast_spectral_radius(t, y), fast)?;
    check_stability(tau * system.slow_spectral_radius(t, y), slow)?;
    arkc_stages(system, t, y, tau, slow, fast)
}

pub(crate) fn arkc_stages<S: SplitSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    slow: &RkcCoefficients,
    fast: &RkcCoefficients,
) -> Result<Vec<f64>> {
    let n = y.len();
    let mask = system.fast_mask();
    check_dim(n, mask.len())?;
    let l0: Vec<f64> = y.iter().zip(mask).map(|(&v, &f)| if f { v } else { 0.0 }).collect();
    let k0: Vec<f64> = y.iter().zip(mask).map(|(&v, &f)| if f { 0.0 } else { v }).collect();

    let mut fs0 = vec![0.0; n];
    let mut ff0 = vec![0.0; n];
    system.slow_rhs(t, y, &mut fs0);
    system.fast_rhs(t, y, &mut ff0);

    let k1 = k0.iter().zip(&fs0).map(|(&k, &f)| k + tau * slow.mu(1) * f).collect();
    let l1 = l0.iter().zip(&ff0).map(|(&l, &f)| l + tau * fast.mu(1) * f).collect();
    let mut k = Chain::new(k0, k1);
    let mut l = Chain::new(l0, l1);

    let c = slow.abscissae();
    let d = fast.abscissae();
    let mut ghost = vec![0.0; n];
    let mut arg = vec![0.0; n];
    let mut f = vec![0.0; n];

    for step in ArkcStepState::new(c, d) {
        match step {
            Advance::Fast { i, j } => {
                interp_slow((c[i - 1], &k.older), (c[i], &k.prev), d[j], &mut ghost)?;
                for r in 0..n {
                    arg[r] = l.prev[r] + ghost[r];
                }
                system.fast_rhs(t + d[j] * tau, &arg, &mut f);
                l.push(fast, j + 1, tau, &f, &ff0);
            }
            Advance::Slow { i, j } => {
                interp_fast((d[j - 1], &l.older), (d[j], &l.prev), c[i], &mut ghost)?;
                for r in 0..n {
                    arg[r] = ghost[r] + k.prev[r];
                }
                system.slow_rhs(t + c[i] * tau, &arg, &mut f);
                k.push(slow, i + 1, tau, &f, &fs0);
            }
        }
    }
    Ok(k.prev.iter().zip(&l.prev).map(|(a, b)| a + b).collect())
}

/// Stage counts `(s, m)` for the current state.
pub fn select_stage_counts<S: SplitSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    order: Order,
    damping: f64,
) -> Result<(usize, usize)> {
    let s = select_stage_count(order, tau * system.slow_spectral_radius(t, y), damping)?;
    let m = select_stage_count(order, tau * system.fast_spectral_radius(t, y), damping)?;
    Ok((s, m))
}

/// One ARKC step choosing `s` and `m` from the current spectral radii.
pub fn arkc_step<S: SplitSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    tau: f64,
    order: Order,
    damping: f64,
) -> Result<Vec<f64>> {
    check_step_size(tau)?;
    let (s, m) = select_stage_counts(system, t, y, tau, order, damping)?;
    let slow = build_coefficients(order, s, damping)?;
    let fast = build_coefficients(order, m, damping)?;
    arkc_step_with(system, t, y, tau, &slow, &fast)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArkcStepRecord {
    pub t: f64,
    pub y: Vec<f64>,
    pub slow_stages: usize,
    pub fast_stages: usize,
}

impl HasState for ArkcStepRecord {
    fn time(&self) -> f64 {
        self.t
    }

    fn state(&self) -> &[f64] {
        &self.y
    }
}

fn cached_build(cache: &mut Option<RkcCoefficients>, order: Order, s: usize, damping: f64) -> Result<RkcCoefficients> {
    match cache.take() {
        Some(c) if c.stages() == s => Ok(c),
        _ => build_coefficients(order, s, damping),
    }
}

/// Fixed-step ARKC integration from `(t0, y0)` to `t_end`.
pub fn arkc_integrate<S: SplitSystem + ?Sized>(
    system: &S,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    tau: f64,
    order: Order,
    damping: f64,
) -> Result<Trajectory<ArkcStepRecord>> {
    check_dim(system.dim(), y0.len())?;
    let times = step_times(t0, t_end, tau)?;
    let mut steps = Vec::with_capacity(times.len());
    let (mut slow_cache, mut fast_cache) = (None, None);
    let mut t = t0;
    let mut y = y0.to_vec();
    for t_next in times {
        let h = t_next - t;
        let (s, m) = select_stage_counts(system, t, &y, h, order, damping)?;
        let slow = cached_build(&mut slow_cache, order, s, damping)?;
        let fast = cached_build(&mut fast_cache, order, m, damping)?;
        y = arkc_step_with(system, t, &y, h, &slow, &fast)?;
        check_finite(t_next, &y)?;
        t = t_next;
        steps.push(ArkcStepRecord { t, y: y.clone(), slow_stages: s, fast_stages: m });
        slow_cache = Some(slow);
        fast_cache = Some(fast);
    }
    Ok(Trajectory { t0, y0: y0.to_vec(), steps })
}

/// Dense linear system `y' = M y` split by a component mask.
///
/// The spectral radii handed to stage selection are fixed values supplied
/// by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSplit {
    n: usize,
    matrix: Vec<f64>,
    mask: Vec<bool>,
    rho_fast: f64,
    rho_slow: f64,
}

impl LinearSplit {
    /// `matrix` is row-major `n x n` with `n = mask.len()`.
    pub fn new(matrix: Vec<f64>, mask: Vec<bool>, rho_fast: f64, rho_slow: f64) -> Result<Self> {
        let n = mask.len();
        check_dim(n * n, matrix.len())?;
        Ok(LinearSplit { n, matrix, mask, rho_fast, rho_slow })
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    fn apply_rows(&self, y: &[f64], out: &mut [f64], fast: bool) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = if self.mask[r] == fast {
                self.matrix[r * self.n..(r + 1) * self.n].iter().zip(y).map(|(a, b)| a * b).sum()
            } else {
                0.0
            };
        }
    }
}

impl SplitSystem for LinearSplit {
    fn dim(&self) -> usize {
        self.n
    }

    fn fast_mask(&self) -> &[bool] {
        &self.mask
    }

    fn fast_rhs(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        self.apply_rows(y, out, true)
    }

    fn slow_rhs(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        self.apply_rows(y, out, false)
    }

    fn fast_spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_fast
    }

    fn slow_spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_slow
    }
}

/// The unsplit system `f = f_F + f_S` with spectral radius `max(rho_F, rho_S)`.
impl OdeSystem for LinearSplit {
    fn dim(&self) -> usize {
        self.n
    }

    fn rhs(&self, _t: f64, y: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.matrix[r * self.n..(r + 1) * self.n].iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }

    fn spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_fast.max(self.rho_slow)
    }
}
