//! Linear stability of RKC and ARKC.
//!
//! For ARKC the model problem is `y' = B y` with
//! `B = [[w, u], [u, z]]`, `u = theta * sqrt(z w)`, the second component
//! fast and the first slow. One unit step maps `y_0` to `R y_0`; the
//! method is stable at `(z, w)` when the spectral radius of `R` is at most one.

use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arkc::{arkc_integrate, arkc_stages, LinearSplit};
use crate::rkc::integrate;
use crate::chebyshev::{build_coefficients, stability_bound, Order};
use crate::error::{Error, Result};

/// Nodes with spectral radius above this are reported unstable.
pub const UNSTABLE_THRESHOLD: f64 = 1.0 + 1e-10;

/// Default raster resolution per axis.
pub const DEFAULT_RESOLUTION: usize = 400;

pub type Matrix2 = [[f64; 2]; 2];

/// Coupled 2x2 test problem in nondimensional form (`z = tau*lambda`, `w = tau*zeta`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelProblem {
    pub z: f64,
    pub w: f64,
    pub theta: f64,
}

impl ModelProblem {
    pub fn new(z: f64, w: f64, theta: f64) -> Result<Self> {
        if !(z <= 0.0 && w <= 0.0) {
            return Err(Error::InvalidArgument(format!("z and w must be nonpositive, got ({z}, {w})")));
        }
        if !(-1.0..=1.0).contains(&theta) {
            return Err(Error::InvalidArgument(format!("coupling theta must lie in [-1, 1], got {theta}")));
        }
        Ok(ModelProblem { z, w, theta })
    }

    pub fn coupling(&self) -> f64 {
        self.theta * (self.z * self.w).sqrt()
    }

    pub fn matrix(&self) -> Matrix2 {
        let u = self.coupling();
        [[self.w, u], [u, self.z]]
    }

    fn split(&self) -> LinearSplit {
        let b = self.matrix();
        LinearSplit::new(
            vec![b[0][0], b[0][1], b[1][0], b[1][1]],
            vec![false, true],
            self.z.abs(),
            self.w.abs(),
        )
        .expect("2x2 shape")
    }
}

/// `R_{s,m}` of the model problem: column `c` is one unit ARKC step from
/// the `c`-th basis vector, with `s` slow and `m` fast stages.
pub fn iteration_matrix(model: &ModelProblem, s: usize, m: usize, order: Order, damping: f64) -> Result<Matrix2> {
    let slow = build_coefficients(order, s, damping)?;
    let fast = build_coefficients(order, m, damping)?;
    iteration_matrix_with(model, &slow, &fast)
}

fn iteration_matrix_with(
    model: &ModelProblem,
    slow: &crate::chebyshev::RkcCoefficients,
    fast: &crate::chebyshev::RkcCoefficients,
) -> Result<Matrix2> {
    let system = model.split();
    let c0 = arkc_stages(&system, 0.0, &[1.0, 0.0], 1.0, slow, fast)?;
    let c1 = arkc_stages(&system, 0.0, &[0.0, 1.0], 1.0, slow, fast)?;
    Ok([[c0[0], c1[0]], [c0[1], c1[1]]])
}

/// Largest eigenvalue modulus of a real 2x2 matrix.
pub fn spectral_radius_2x2(m: &Matrix2) -> f64 {
    let half_trace = 0.5 * (m[0][0] + m[1][1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = half_trace * half_trace - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        (half_trace + r).abs().max((half_trace - r).abs())
    } else {
        // complex pair, |lambda|^2 = det
        det.sqrt()
    }
}

/// Spectral radii of `R_{s,m}` on a uniform grid over `[-ell_m, 0] x [-ell_s, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityGrid {
    pub z_axis: Vec<f64>,
    pub w_axis: Vec<f64>,
    /// Row-major: `rho[iw * z_axis.len() + iz]`.
    pub rho: Vec<f64>,
    pub slow_stages: usize,
    pub fast_stages: usize,
    pub theta: f64,
    pub damping: f64,
    pub order: Order,
}

impl StabilityGrid {
    pub fn at(&self, iz: usize, iw: usize) -> f64 {
        self.rho[iw * self.z_axis.len() + iz]
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().copied().fold(0.0, f64::max)
    }

    pub fn unstable_count(&self) -> usize {
        self.rho.iter().filter(|&&r| r > UNSTABLE_THRESHOLD).count()
    }

    /// CSV with header `z,w,rho`, w-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "z,w,rho")?;
        for (iw, &w) in self.w_axis.iter().enumerate() {
            for (iz, &z) in self.z_axis.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", z, w, self.at(iz, iw))?;
            }
        }
        Ok(())
    }
}

/// `n` equispaced nodes from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k == n - 1 { hi } else { lo + k as f64 * h }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArkcScan {
    pub slow_stages: usize,
    pub fast_stages: usize,
    pub order: Order,
    pub damping: f64,
    pub theta: f64,
    pub nz: usize,
    pub nw: usize,
}

/// Scans the spectral radius of `R_{s,m}` over the decoupled stability box.
pub fn scan_arkc_domain(scan: &ArkcScan) -> Result<StabilityGrid> {
    if scan.nz < 2 || scan.nw < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 nodes per axis".into()));
    }
    if !(-1.0..=1.0).contains(&scan.theta) {
        return Err(Error::InvalidArgument(format!("theta must lie in [-1, 1], got {}", scan.theta)));
    }
    let slow = build_coefficients(scan.order, scan.slow_stages, scan.damping)?;
    let fast = build_coefficients(scan.order, scan.fast_stages, scan.damping)?;
    let z_axis = linspace(-fast.ell(), 0.0, scan.nz);
    let w_axis = linspace(-slow.ell(), 0.0, scan.nw);

    let rows: Vec<Vec<f64>> = w_axis
        .par_iter()
        .map(|&w| {
            z_axis
                .iter()
                .map(|&z| {
                    let model = ModelProblem { z, w, theta: scan.theta };
                    iteration_matrix_with(&model, &slow, &fast).map(|r| spectral_radius_2x2(&r))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    Ok(StabilityGrid {
        z_axis,
        w_axis,
        rho: rows.concat(),
        slow_stages: scan.slow_stages,
        fast_stages: scan.fast_stages,
        theta: scan.theta,
        damping: scan.damping,
        order: scan.order,
    })
}

/// `|R_s(x + iy)|` sampled on a rectangle of the complex plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRaster {
    pub x_axis: Vec<f64>,
    pub y_axis: Vec<f64>,
    /// Row-major: `abs_r[iy * x_axis.len() + ix]`.
    pub abs_r: Vec<f64>,
}

impl ComplexRaster {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.abs_r[iy * self.x_axis.len() + ix]
    }

    /// CSV with header `x,y,absR`, y-major.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,absR")?;
        for (iy, &y) in self.y_axis.iter().enumerate() {
            for (ix, &x) in self.x_axis.iter().enumerate() {
                writeln!(out, "{:.16e},{:.16e},{:.16e}", x, y, self.at(ix, iy))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RkcScan {
    pub order: Order,
    pub stages: usize,
    pub damping: f64,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl RkcScan {
    /// Rectangle around the real stability interval, as in the usual domain plots.
    pub fn around_interval(order: Order, stages: usize, damping: f64, resolution: usize) -> Result<Self> {
        let ell = stability_bound(order, stages, damping)?;
        Ok(RkcScan {
            order,
            stages,
            damping,
            x_range: (-1.05 * ell, 0.05 * ell),
            y_range: (-0.15 * ell, 0.15 * ell),
            nx: resolution,
            ny: resolution,
        })
    }
}

pub fn scan_rkc_domain(scan: &RkcScan) -> Result<ComplexRaster> {
    if scan.nx < 2 || scan.ny < 2 {
        return Err(Error::InvalidArgument("scan needs at least 2 nodes per axis".into()));
    }
    let finite = [scan.x_range.0, scan.x_range.1, scan.y_range.0, scan.y_range.1];
    if finite.iter().any(|v| !v.is_finite()) || scan.x_range.0 >= scan.x_range.1 || scan.y_range.0 >= scan.y_range.1 {
        return Err(Error::InvalidArgument("scan ranges must be finite and nonempty".into()));
    }
    let coeffs = build_coefficients(scan.order, scan.stages, scan.damping)?;
    let x_axis = linspace(scan.x_range.0, scan.x_range.1, scan.nx);
    let y_axis = linspace(scan.y_range.0, scan.y_range.1, scan.ny);
    let abs_r = y_axis
        .par_iter()
        .flat_map_iter(|&y| {
            let coeffs = &coeffs;
            x_axis.iter().map(move |&x| coeffs.stability_polynomial(Complex64::new(x, y)).norm())
        })
        .collect();
    Ok(ComplexRaster { x_axis, y_axis, abs_r })
}

/// Time integration of `y' = A y`, `A = [[zeta, sigma], [sigma, lambda]]`,
/// `sigma = theta * sqrt(lambda zeta)`, from `y0 = (1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelRun {
    pub lambda: f64,
    pub zeta: f64,
    pub theta: f64,
    pub tau: f64,
    pub steps: usize,
    pub order: Order,
    pub damping: f64,
}

impl Default for ModelRun {
    fn default() -> Self {
        ModelRun {
            lambda: -100.0,
            zeta: -28.0,
            theta: 0.2,
            tau: 1.0,
            steps: 50,
            order: Order::First,
            damping: crate::chebyshev::DEFAULT_DAMPING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub t: f64,
    pub norm: f64,
}

/// Euclidean norm histories, including `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelHistory {
    pub arkc: Vec<NormSample>,
    pub rkc: Vec<NormSample>,
    pub slow_stages: usize,
    pub fast_stages: usize,
    pub rkc_stages: usize,
}

impl ModelHistory {
    /// Ratio of the final to the initial norm.
    pub fn arkc_growth(&self) -> f64 {
        growth(&self.arkc)
    }

    pub fn rkc_growth(&self) -> f64 {
        growth(&self.rkc)
    }
}

fn growth(h: &[NormSample]) -> f64 {
    h[h.len() - 1].norm / h[0].norm
}

fn norm2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Runs ARKC (fast component `lambda`) and single-rate RKC side by side.
pub fn run_model_problem(run: &ModelRun) -> Result<ModelHistory> {
    if run.steps == 0 {
        return Err(Error::InvalidArgument("model run needs at least one step".into()));
    }
    let model = ModelProblem::new(run.lambda, run.zeta, run.theta)?;
    let b = model.matrix();
    let system = LinearSplit::new(
        vec![b[0][0], b[0][1], b[1][0], b[1][1]],
        vec![false, true],
        run.lambda.abs(),
        run.zeta.abs(),
    )?;
    let y0 = [1.0, 1.0];
    let t_end = run.tau * run.steps as f64;
    let multirate = arkc_integrate(&system, 0.0, &y0, t_end, run.tau, run.order, run.damping)?;
    let single = integrate(&system, 0.0, &y0, t_end, run.tau, run.order, run.damping)?;
    let initial = NormSample { t: 0.0, norm: norm2(&y0) };
    let history = |pts: Vec<NormSample>| std::iter::once(initial).chain(pts).collect::<Vec<_>>();
    Ok(ModelHistory {
        arkc: history(multirate.steps.iter().map(|r| NormSample { t: r.t, norm: norm2(&r.y) }).collect()),
        rkc: history(single.steps.iter().map(|r| NormSample { t: r.t, norm: norm2(&r.y) }).collect()),
        slow_stages: multirate.steps[0].slow_stages,
        fast_stages: multirate.steps[0].fast_stages,
        rkc_stages: single.steps[0].stages_used,
    })
}

/// Writes `t,l2N` rows.
pub fn write_norm_csv<W: Write>(history: &[NormSample], mut out: W) -> io::Result<()> {
    writeln!(out, "t,l2N")?;
    for p in history {
        writeln!(out, "{:.16e},{:.16e}", p.t, p.norm)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkc::scalar_step_factor;

    #[test]
    fn spectral_radius_examples() {
        assert_eq!(spectral_radius_2x2(&[[1.0, 0.0], [0.0, 1.0]]), 1.0);
        assert!((spectral_radius_2x2(&[[0.0, 1.0], [-1.0, 0.0]]) - 1.0).abs() < 1e-15);
        assert_eq!(spectral_radius_2x2(&[[2.0, 0.0], [0.0, -3.0]]), 3.0);
    }

    #[test]
    fn zero_problem_gives_identity() {
        let model = ModelProblem::new(0.0, 0.0, 0.0).unwrap();
        for order in [Order::First, Order::Second] {
            let r = iteration_matrix(&model, 4, 8, order, 0.05).unwrap();
            let expected = [[1.0, 0.0], [0.0, 1.0]];
            for a in 0..2 {
                for b in 0..2 {
                    assert!((r[a][b] - expected[a][b]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn decoupled_matrix_is_diagonal_of_scalar_factors() {
        let model = ModelProblem::new(-57.0, -11.0, 0.0).unwrap();
        let r = iteration_matrix(&model, 4, 8, Order::First, 0.05).unwrap();
        let rs = scalar_step_factor(&build_coefficients(Order::First, 4, 0.05).unwrap(), -11.0);
        let rm = scalar_step_factor(&build_coefficients(Order::First, 8, 0.05).unwrap(), -57.0);
        assert!((r[0][0] - rs).abs() < 1e-12);
        assert!((r[1][1] - rm).abs() < 1e-12);
        assert_eq!(r[0][1], 0.0);
        assert_eq!(r[1][0], 0.0);
    }

    #[test]
    fn model_point_is_unstable() {
        let model = ModelProblem::new(-100.0, -28.0, 0.2).unwrap();
        let r = iteration_matrix(&model, 4, 8, Order::First, 0.05).unwrap();
        assert!(spectral_radius_2x2(&r) > 1.0);
    }

    #[test]
    fn model_problem_validation() {
        assert!(ModelProblem::new(1.0, -1.0, 0.0).is_err());
        assert!(ModelProblem::new(-1.0, -1.0, 1.5).is_err());
        let b = ModelProblem::new(-4.0, -9.0, -0.5).unwrap().matrix();
        assert_eq!(b[0][1], b[1][0]);
        assert!((b[0][1] + 3.0).abs() < 1e-15);
    }

    #[test]
    fn model_run_stage_counts() {
        let h = run_model_problem(&ModelRun::default()).unwrap();
        assert_eq!((h.fast_stages, h.slow_stages, h.rkc_stages), (8, 4, 8));
        assert_eq!(h.arkc.len(), 51);
        assert!(h.arkc_growth() > 1.0);
        assert!(h.rkc.iter().all(|p| p.norm <= h.rkc[0].norm));
    }

    #[test]
    fn grid_has_endpoints_and_fixed_parameters() {
        let scan = ArkcScan {
            slow_stages: 4,
            fast_stages: 8,
            order: Order::First,
            damping: 0.05,
            theta: 0.0,
            nz: 9,
            nw: 5,
        };
        let grid = scan_arkc_domain(&scan).unwrap();
        assert_eq!(grid.z_axis.len(), 9);
        assert_eq!(*grid.z_axis.last().unwrap(), 0.0);
        let ell_m = stability_bound(Order::First, 8, 0.05).unwrap();
        assert_eq!(grid.z_axis[0], -ell_m);
        assert_eq!((grid.slow_stages, grid.fast_stages), (4, 8));
        assert!(grid.rho.iter().all(|r| r.is_finite() && *r >= 0.0));
        assert!(grid.max_rho() <= UNSTABLE_THRESHOLD);
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("z,w,rho\n"));
        assert_eq!(text.lines().count(), 1 + 45);
    }

    #[test]
    fn euler_domain_is_unit_disk_at_minus_one() {
        let scan = RkcScan {
            order: Order::First,
            stages: 1,
            damping: 0.0,
            x_range: (-2.5, 0.5),
            y_range: (-1.5, 1.5),
            nx: 31,
            ny: 31,
        };
        let raster = scan_rkc_domain(&scan).unwrap();
        for (iy, &y) in raster.y_axis.iter().enumerate() {
            for (ix, &x) in raster.x_axis.iter().enumerate() {
                let expected = Complex64::new(1.0 + x, y).norm();
                assert!((raster.at(ix, iy) - expected).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn scans_reject_degenerate_resolution() {
        let scan = ArkcScan {
            slow_stages: 4,
            fast_stages: 8,
            order: Order::First,
            damping: 0.05,
            theta: 0.0,
            nz: 1,
            nw: 5,
        };
        assert!(scan_arkc_domain(&scan).is_err());
    }
}
