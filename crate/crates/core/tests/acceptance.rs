//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Always exits 0 so the report shows up in a normal test run; set
//! `ARKC_ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails.

mod common;

use std::time::{Duration, Instant};

use arkc_core::arkc::{arkc_integrate, select_stage_counts, LinearSplit};
use arkc_core::chebyshev::{build_coefficients, stability_bound, Order};
use arkc_core::heat::{build_heat_problem, convergence_against, fitted_order, reference_solution, ConvergencePoint, ConvergenceStudy, StudyMethod};
use arkc_core::rkc::{integrate, scalar_step_factor, OdeSystem};
use arkc_core::stability::{
    iteration_matrix, run_model_problem, scan_arkc_domain, spectral_radius_2x2, ArkcScan, ModelProblem, ModelRun,
    DEFAULT_RESOLUTION, UNSTABLE_THRESHOLD,
};
use arkc_core::SplitSystem;
use common::{dissipative_matrix, linear_split, max_abs_diff, rng, ClosedForm};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn polynomial_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for o in [1u8, 2] {
        for s in [3usize, 5, 8, 13] {
            for eps in [0.0, 0.05] {
                let coeffs = build_coefficients(Order::try_from(o).unwrap(), s, eps).unwrap();
                let exact = ClosedForm::new(o, s, eps);
                for k in 0..50 {
                    let z = -exact.ell * (k as f64 + 0.5) / 50.0;
                    let want = exact.eval(z);
                    worst = worst.max((scalar_step_factor(&coeffs, z) - want).abs() / want.abs());
                }
            }
        }
    }
    Outcome { pass: worst <= 1e-10, detail: format!("max relative deviation {worst:.2e}") }
}

fn undamped_bound() -> Outcome {
    let mut ell_err: f64 = 0.0;
    for s in 1..=64usize {
        ell_err = ell_err.max((stability_bound(Order::First, s, 0.0).unwrap() - 2.0 * (s * s) as f64).abs());
    }
    let mut c_err: f64 = 0.0;
    for s in 2..=64usize {
        let c = build_coefficients(Order::Second, s, 0.0).unwrap();
        for j in (0..=s).filter(|&j| j != 1) {
            let want = if j == 0 { 0.0 } else { (j * j - 1) as f64 / (s * s - 1) as f64 };
            c_err = c_err.max((c.c(j) - want).abs());
        }
    }
    let ratios: Vec<f64> = [32usize, 64, 128]
        .iter()
        .map(|&s| stability_bound(Order::Second, s, 0.0).unwrap() / (s * s) as f64)
        .collect();
    let beta_ok = ratios.iter().all(|r| (r / 0.65 - 1.0).abs() <= 0.05);
    Outcome {
        pass: ell_err <= 1e-9 && c_err <= 1e-12 && beta_ok,
        detail: format!(
            "order 1 |ell - 2s^2| {ell_err:.1e}; order 2 abscissae (j != 1) {c_err:.1e}; ell/s^2 at s = 32, 64, 128: {:.4} {:.4} {:.4}",
            ratios[0], ratios[1], ratios[2]
        ),
    }
}

fn model_split() -> LinearSplit {
    let b = ModelProblem::new(-100.0, -28.0, 0.2).unwrap().matrix();
    LinearSplit::new(vec![b[0][0], b[0][1], b[1][0], b[1][1]], vec![false, true], 100.0, 28.0).unwrap()
}

fn stage_counts() -> Outcome {
    let (s, m) = select_stage_counts(&model_split(), 0.0, &[1.0, 1.0], 1.0, Order::First, 0.05).unwrap();
    Outcome { pass: (m, s) == (8, 4), detail: format!("(m, s) = ({m}, {s})") }
}

fn instability() -> Outcome {
    let r = iteration_matrix(&ModelProblem::new(-100.0, -28.0, 0.2).unwrap(), 4, 8, Order::First, 0.05).unwrap();
    let rho = spectral_radius_2x2(&r);
    let h = run_model_problem(&ModelRun::default()).unwrap();
    let growth = h.arkc_growth();
    let control_max = h.rkc.iter().map(|p| p.norm).fold(0.0, f64::max) / h.rkc[0].norm;
    Outcome {
        pass: rho > 1.0 && growth > 1e3 && control_max <= 1.0 && h.rkc_stages == 8,
        detail: format!(
            "rho(R_4,8) = {rho:.4}; ARKC growth over 50 steps {growth:.3e} (needs > 1e3); RKC s = {} max norm ratio {control_max:.3}",
            h.rkc_stages
        ),
    }
}

fn decoupled() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for order in [Order::First, Order::Second] {
        for (s, m) in [(4, 8), (10, 40), (40, 10)] {
            let start = Instant::now();
            let grid = scan_arkc_domain(&ArkcScan { slow_stages: s, fast_stages: m, order, damping: 0.05, theta: 0.0, nz: 200, nw: 200 })
                .unwrap();
            slowest = slowest.max(start.elapsed());
            worst = worst.max(grid.max_rho());
        }
    }
    Outcome {
        pass: worst <= UNSTABLE_THRESHOLD && slowest < Duration::from_secs(30),
        detail: format!("max rho {worst:.12}; slowest scan {:.2?}", slowest),
    }
}

fn damping_persistence() -> Outcome {
    let grid = scan_arkc_domain(&ArkcScan {
        slow_stages: 4,
        fast_stages: 8,
        order: Order::First,
        damping: 0.2,
        theta: 0.2,
        nz: DEFAULT_RESOLUTION,
        nw: DEFAULT_RESOLUTION,
    })
    .unwrap();
    let n = grid.unstable_count();
    Outcome { pass: n > 0, detail: format!("{n} of {} nodes unstable, max rho {:.4}", grid.rho.len(), grid.max_rho()) }
}

fn reduction_limits() -> Outcome {
    let mut r = rng(2024);
    let (mut zero_fast, mut equal) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let y0: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
        let tau = 0.1;
        let t_end = 10.0 * tau;

        let mut a = dissipative_matrix(&mut r, 4, 5.0);
        let mask = vec![false, true, false, true];
        for row in [1, 3] {
            a[row * 4..row * 4 + 4].fill(0.0);
        }
        let split = linear_split(a.clone(), mask);
        let rho = split.slow_spectral_radius(0.0, &y0);
        let slow_only = LinearSplit::new(a, vec![false; 4], 0.0, rho).unwrap();

        let b = dissipative_matrix(&mut r, 4, 5.0);
        let full = linear_split(b.clone(), vec![false; 4]);
        let rho_b = full.slow_spectral_radius(0.0, &y0);
        let same = LinearSplit::new(b, vec![true, false, false, true], rho_b, rho_b).unwrap();

        for order in [Order::First, Order::Second] {
            let p = arkc_integrate(&split, 0.0, &y0, t_end, tau, order, 0.05).unwrap();
            let q = integrate(&slow_only as &dyn OdeSystem, 0.0, &y0, t_end, tau, order, 0.05).unwrap();
            for (x, y) in p.steps.iter().zip(&q.steps) {
                zero_fast = zero_fast.max(max_abs_diff(&x.y, &y.y));
            }
            let p = arkc_integrate(&same, 0.0, &y0, t_end, tau, order, 0.05).unwrap();
            let q = integrate(&same as &dyn OdeSystem, 0.0, &y0, t_end, tau, order, 0.05).unwrap();
            for (x, y) in p.steps.iter().zip(&q.steps) {
                equal = equal.max(max_abs_diff(&x.y, &y.y));
            }
        }
    }
    Outcome {
        pass: zero_fast <= 1e-13 && equal <= 1e-13,
        detail: format!("f_F = 0: {zero_fast:.1e}; rho_F = rho_S: {equal:.1e}"),
    }
}

fn slope(points: &[ConvergencePoint], ks: std::ops::RangeInclusive<u32>) -> f64 {
    let sel: Vec<ConvergencePoint> =
        points.iter().copied().filter(|p| ks.contains(&((-p.tau.log2()).round() as u32))).collect();
    fitted_order(&sel)
}

fn staircase() -> Outcome {
    let problem = build_heat_problem();
    let study = ConvergenceStudy::default();
    let reference = reference_solution(&problem, study.t_end, study.reference_step, study.order, study.damping).unwrap();
    let arkc = convergence_against(&problem, &study, &reference).unwrap();
    let control = ConvergenceStudy { method: StudyMethod::Rkc, ..study.clone() };
    let rkc = convergence_against(&problem, &control, &reference).unwrap();
    let (large, small, single) = (slope(&arkc, 1..=4), slope(&arkc, 9..=11), fitted_order(&rkc));
    Outcome {
        pass: (0.8..=1.25).contains(&large) && (1.75..=2.25).contains(&small) && (1.85..=2.15).contains(&single),
        detail: format!(
            "eps {}: ARKC slope tau 1/2..1/16 {large:.3} (needs [0.8, 1.25]), 1/512..1/2048 {small:.3} (needs [1.75, 2.25]); RKC2 full ladder {single:.3} (needs [1.85, 2.15])",
            study.damping
        ),
    }
}

fn interlacing() -> Outcome {
    use arkc_core::arkc::{interp_fast, interp_slow, Advance, ArkcStepState};
    let mut checked = 0usize;
    let mut failures = Vec::new();
    let (lo, hi, mut out) = ([0.0], [1.0], [0.0]);
    for order in [Order::First, Order::Second] {
        for eps in [0.0, 0.05] {
            let sets: Vec<_> = (order.min_stages()..=64).map(|n| build_coefficients(order, n, eps).unwrap()).collect();
            for slow in &sets {
                for fast in &sets {
                    let (c, d) = (slow.abscissae(), fast.abscissae());
                    let mut state = ArkcStepState::new(c, d);
                    let mut ok = true;
                    let mut count = 0;
                    for adv in state.by_ref() {
                        count += 1;
                        ok &= match adv {
                            Advance::Fast { i, j } => interp_slow((c[i - 1], &lo), (c[i], &hi), d[j], &mut out).is_ok(),
                            Advance::Slow { i, j } => interp_fast((d[j - 1], &lo), (d[j], &hi), c[i], &mut out).is_ok(),
                        };
                    }
                    if !(ok && state.is_done() && count == slow.stages() + fast.stages() - 2) {
                        failures.push(format!("{order} eps {eps} (s, m) = ({}, {})", slow.stages(), fast.stages()));
                    }
                    checked += 1;
                }
            }
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("{checked} schedules, {} failures {:?}", failures.len(), failures) }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        ("stability-polynomial identity", polynomial_identity, Some(Duration::from_secs(1))),
        ("undamped bound", undamped_bound, None),
        ("stage-count reproduction", stage_counts, None),
        ("instability reproduction", instability, Some(Duration::from_secs(1))),
        ("decoupled stability", decoupled, None),
        ("instability persistence under damping", damping_persistence, None),
        ("reduction limits", reduction_limits, None),
        ("order-reduction staircase", staircase, Some(Duration::from_secs(600))),
        ("interlacing totality", interlacing, None),
    ];
    let mut passed = 0;
    for (name, run, budget) in criteria {
        let (outcome, elapsed) = timed(run);
        let in_time = budget.is_none_or(|b| elapsed < b);
        let pass = outcome.pass && in_time;
        passed += pass as usize;
        let budget_note = budget.map_or(String::new(), |b| format!(", budget {:?}", b));
        println!(
            "{} {name}: {} ({:.2?}{budget_note})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed
        );
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    let strict = std::env::var("ARKC_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < criteria.len() {
        std::process::exit(1);
    }
}
