//! Heat equation `u_t = u_xx + g` on `[0, e]` with a locally refined
//! finite-difference mesh, used to measure the time-convergence of ARKC.
//!
//! The manufactured solution is `u(x, t) = exp(-t) x (ln x - 1)`, which
//! vanishes at both ends and has `u_xx = exp(-t) / x`, so the mesh is
//! refined near the origin.

use std::f64::consts::E;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::arkc::{arkc_integrate, SplitSystem};
use crate::chebyshev::{Order, DEFAULT_DAMPING};
use crate::error::{Error, Result};
use crate::rkc::{integrate, OdeSystem};

/// Left end of the coarse region as a fraction of the domain length.
pub const INTERFACE_FRACTION: f64 = 0.005;
/// Target coarse spacing `1 / 2^4`.
pub const COARSE_SPACING_TARGET: f64 = 1.0 / 16.0;
/// Target ratio of coarse to fine spacing.
pub const REFINEMENT_RATIO: f64 = 200.0;
/// Step of the same-mesh reference solution.
pub const REFERENCE_STEP: f64 = 1.0 / 16384.0;

pub fn exact_solution(x: f64, t: f64) -> f64 {
    (-t).exp() * x * (x.ln() - 1.0)
}

/// `g = u_t - u_xx` for the manufactured solution.
pub fn source(x: f64, t: f64) -> f64 {
    let decay = (-t).exp();
    -decay * x * (x.ln() - 1.0) - decay / x
}

/// Interior nodes of a piecewise-uniform mesh; the boundary nodes `0` and
/// `length` carry Dirichlet data and are not unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub nodes: Vec<f64>,
    pub length: f64,
    pub interface: f64,
    pub fine_spacing: f64,
    pub coarse_spacing: f64,
    /// Number of nodes in `(0, interface]`.
    pub fine_nodes: usize,
}

impl Mesh1D {
    /// `fine_cells` uniform cells on `[0, interface]`, `coarse_cells` on `[interface, length]`.
    pub fn piecewise_uniform(length: f64, interface: f64, fine_cells: usize, coarse_cells: usize) -> Result<Self> {
        if !(0.0 < interface && interface < length) || fine_cells == 0 || coarse_cells == 0 {
            return Err(Error::InvalidArgument(format!(
                "bad mesh: length {length}, interface {interface}, cells {fine_cells}/{coarse_cells}"
            )));
        }
        let h = interface / fine_cells as f64;
        let big_h = (length - interface) / coarse_cells as f64;
        let mut nodes: Vec<f64> = (1..fine_cells).map(|i| i as f64 * h).collect();
        nodes.push(interface);
        nodes.extend((1..coarse_cells).map(|k| interface + k as f64 * big_h));
        Ok(Mesh1D {
            nodes,
            length,
            interface,
            fine_spacing: h,
            coarse_spacing: big_h,
            fine_nodes: fine_cells,
        })
    }

    /// `H ~ 1/16` on the coarse region and `h ~ H/200` on the fine one.
    pub fn refined_default() -> Self {
        let interface = INTERFACE_FRACTION * E;
        let coarse_cells = ((E - interface) / COARSE_SPACING_TARGET).ceil() as usize;
        let fine_cells = (interface * REFINEMENT_RATIO / COARSE_SPACING_TARGET).ceil() as usize;
        Self::piecewise_uniform(E, interface, fine_cells, coarse_cells).expect("valid default mesh")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Spacing to the left neighbour of node `i` (the boundary for `i = 0`).
    pub fn left_gap(&self, i: usize) -> f64 {
        if i == 0 {
            self.nodes[0]
        } else {
            self.nodes[i] - self.nodes[i - 1]
        }
    }

    pub fn right_gap(&self, i: usize) -> f64 {
        if i + 1 == self.nodes.len() {
            self.length - self.nodes[i]
        } else {
            self.nodes[i + 1] - self.nodes[i]
        }
    }
}

/// Three-point second-difference operator with homogeneous Dirichlet ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn second_difference(mesh: &Mesh1D) -> Self {
        let n = mesh.len();
        let mut t = Tridiagonal { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] };
        for i in 0..n {
            let (hl, hr) = (mesh.left_gap(i), mesh.right_gap(i));
            // the boundary neighbours are eliminated; their value is zero
            if i > 0 {
                t.lower[i] = 2.0 / (hl * (hl + hr));
            }
            t.diag[i] = -2.0 / (hl * hr);
            if i + 1 < n {
                t.upper[i] = 2.0 / (hr * (hl + hr));
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply_row(&self, i: usize, y: &[f64]) -> f64 {
        let mut v = self.diag[i] * y[i];
        if i > 0 {
            v += self.lower[i] * y[i - 1];
        }
        if i + 1 < y.len() {
            v += self.upper[i] * y[i + 1];
        }
        v
    }

    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.apply_row(i, y);
        }
    }

    pub fn gershgorin_row(&self, i: usize) -> f64 {
        self.diag[i].abs() + self.lower[i].abs() + self.upper[i].abs()
    }

    /// Gershgorin bound over the rows where `keep` is true (0 if none).
    pub fn gershgorin_bound(&self, keep: impl Fn(usize) -> bool) -> f64 {
        (0..self.len()).filter(|&i| keep(i)).map(|i| self.gershgorin_row(i)).fold(0.0, f64::max)
    }
}

/// Semidiscrete heat problem `y' = A y + F(t)` with the fast/slow mask.
#[derive(Debug, Clone)]
pub struct HeatProblem {
    pub mesh: Mesh1D,
    pub operator: Tridiagonal,
    /// Source at `t = 0`; the source of the manufactured solution scales as `exp(-t)`.
    source0: Vec<f64>,
    /// True on the nodes of the closed fine region.
    pub mask: Vec<bool>,
    rho_fast: f64,
    rho_slow: f64,
    rho_full: f64,
}

impl HeatProblem {
    pub fn on_mesh(mesh: Mesh1D) -> Self {
        let operator = Tridiagonal::second_difference(&mesh);
        let mask: Vec<bool> = (0..mesh.len()).map(|i| i < mesh.fine_nodes).collect();
        let source0 = mesh.nodes.iter().map(|&x| source(x, 0.0)).collect();
        let rho_fast = operator.gershgorin_bound(|i| mask[i]);
        let rho_slow = operator.gershgorin_bound(|i| !mask[i]);
        let rho_full = operator.gershgorin_bound(|_| true);
        HeatProblem { mesh, operator, source0, mask, rho_fast, rho_slow, rho_full }
    }

    pub fn dim(&self) -> usize {
        self.mesh.len()
    }

    /// Same operator and mask with `g = 0`.
    pub fn homogeneous(&self) -> Self {
        HeatProblem { source0: vec![0.0; self.dim()], ..self.clone() }
    }

    pub fn forcing(&self, t: f64, out: &mut [f64]) {
        let decay = (-t).exp();
        for (o, g) in out.iter_mut().zip(&self.source0) {
            *o = decay * g;
        }
    }

    /// Manufactured solution sampled at the nodes.
    pub fn exact_state(&self, t: f64) -> Vec<f64> {
        self.mesh.nodes.iter().map(|&x| exact_solution(x, t)).collect()
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.exact_state(0.0)
    }

    fn row_rhs(&self, t: f64, i: usize, y: &[f64]) -> f64 {
        self.operator.apply_row(i, y) + (-t).exp() * self.source0[i]
    }
}

/// Gershgorin bounds `(rho_F, rho_S)` of `D A` and `(I - D) A`.
pub fn spectral_radius_bounds(problem: &HeatProblem) -> (f64, f64) {
    (problem.rho_fast, problem.rho_slow)
}

/// Builds the refined default problem.
pub fn build_heat_problem() -> HeatProblem {
    HeatProblem::on_mesh(Mesh1D::refined_default())
}

impl OdeSystem for HeatProblem {
    fn dim(&self) -> usize {
        self.mesh.len()
    }

    fn rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row_rhs(t, i, y);
        }
    }

    fn spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_full
    }
}

impl SplitSystem for HeatProblem {
    fn dim(&self) -> usize {
        self.mesh.len()
    }

    fn fast_mask(&self) -> &[bool] {
        &self.mask
    }

    fn fast_rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = if self.mask[i] { self.row_rhs(t, i, y) } else { 0.0 };
        }
    }

    fn slow_rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = if self.mask[i] { 0.0 } else { self.row_rhs(t, i, y) };
        }
    }

    fn fast_spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_fast
    }

    fn slow_spectral_radius(&self, _t: f64, _y: &[f64]) -> f64 {
        self.rho_slow
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyMethod {
    /// Multirate integration of the split problem.
    Arkc,
    /// Single-rate RKC on the unsplit problem.
    Rkc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub method: StudyMethod,
    pub order: Order,
    pub damping: f64,
    /// Step sizes are `2^-k` for `k` in this range.
    pub ks: RangeInclusive<u32>,
    pub t_end: f64,
    pub reference_step: f64,
}

impl Default for ConvergenceStudy {
    fn default() -> Self {
        ConvergenceStudy {
            method: StudyMethod::Arkc,
            order: Order::Second,
            damping: DEFAULT_DAMPING,
            ks: 1..=11,
            t_end: 1.0,
            reference_step: REFERENCE_STEP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub tau: f64,
    pub err: f64,
}

pub fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Single-rate RKC solution at `t_end` with a small fixed step.
pub fn reference_solution(problem: &HeatProblem, t_end: f64, step: f64, order: Order, damping: f64) -> Result<Vec<f64>> {
    let traj = integrate(problem, 0.0, &problem.initial_state(), t_end, step, order, damping)?;
    Ok(traj.final_state().to_vec())
}

fn solve_with(problem: &HeatProblem, study: &ConvergenceStudy, tau: f64) -> Result<Vec<f64>> {
    let y0 = problem.initial_state();
    Ok(match study.method {
        StudyMethod::Arkc => arkc_integrate(problem, 0.0, &y0, study.t_end, tau, study.order, study.damping)?
            .final_state()
            .to_vec(),
        StudyMethod::Rkc => integrate(problem, 0.0, &y0, study.t_end, tau, study.order, study.damping)?
            .final_state()
            .to_vec(),
    })
}

/// Time-discretization error at `t_end` against `reference` for every ladder step.
pub fn convergence_against(
    problem: &HeatProblem,
    study: &ConvergenceStudy,
    reference: &[f64],
) -> Result<Vec<ConvergencePoint>> {
    let ks: Vec<u32> = study.ks.clone().collect();
    ks.par_iter()
        .map(|&k| {
            let tau = 0.5f64.powi(k as i32);
            let y = solve_with(problem, study, tau)?;
            Ok(ConvergencePoint { tau, err: l2_distance(&y, reference) })
        })
        .collect()
}

/// Runs the ladder against a same-mesh reference computed by single-rate
/// RKC of the study's order at `study.reference_step`.
pub fn convergence_study(problem: &HeatProblem, study: &ConvergenceStudy) -> Result<Vec<ConvergencePoint>> {
    let reference = reference_solution(problem, study.t_end, study.reference_step, study.order, study.damping)?;
    convergence_against(problem, study, &reference)
}

/// Least-squares slope of `log err` against `log tau`.
pub fn fitted_order(points: &[ConvergencePoint]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.tau.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.err.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// CSV with header `dt,err`.
pub fn write_convergence_csv<W: Write>(points: &[ConvergencePoint], mut out: W) -> io::Result<()> {
    writeln!(out, "dt,err")?;
    for p in points {
        writeln!(out, "{:.16e},{:.16e}", p.tau, p.err)?;
    }
    Ok(())
}
