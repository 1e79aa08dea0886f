mod args;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use arkc_core::heat::{build_heat_problem, convergence_study, write_convergence_csv, ConvergenceStudy, StudyMethod};
use arkc_core::stability::{
    run_model_problem, scan_arkc_domain, scan_rkc_domain, write_norm_csv, ArkcScan, ModelRun, RkcScan,
    DEFAULT_RESOLUTION,
};
use arkc_core::Order;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::{ArkcDomainArgs, Cli, Command, ConfigFile, HeatArgs, Method, ModelArgs, RkcDomainArgs};

/// A missing or bad flag value; reported with usage and exit status 2.
struct Usage(ErrorKind, String);

impl Usage {
    fn invalid(msg: String) -> Self {
        Usage(ErrorKind::ValueValidation, msg)
    }
}

fn load_config(path: &Path) -> Result<ConfigFile, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage::invalid(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Usage::invalid(format!("invalid config {}: {e}", path.display())))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Usage> {
    value.ok_or_else(|| {
        Usage(ErrorKind::MissingRequiredArgument, format!("the following required argument was not provided: --{flag}"))
    })
}

fn order(value: Option<u8>, default: u8) -> Result<Order, Usage> {
    let v = value.unwrap_or(default);
    Order::try_from(v).map_err(|_| Usage::invalid(format!("invalid value '{v}' for '--order': expected 1 or 2")))
}

fn check(ok: bool, flag: &str, value: impl std::fmt::Display, expected: &str) -> Result<(), Usage> {
    if ok {
        Ok(())
    } else {
        Err(Usage::invalid(format!("invalid value '{value}' for '--{flag}': {expected}")))
    }
}

fn damping(value: Option<f64>) -> Result<f64, Usage> {
    let eps = value.unwrap_or(arkc_core::chebyshev::DEFAULT_DAMPING);
    check(eps.is_finite() && eps >= 0.0, "eps", eps, "expected a finite value >= 0")?;
    Ok(eps)
}

fn stages(value: Option<usize>, default: Option<usize>, flag: &str, order: Order) -> Result<usize, Usage> {
    let s = match default {
        Some(d) => value.unwrap_or(d),
        None => require(value, flag)?,
    };
    check(s >= order.min_stages(), flag, s, &format!("order {order} needs at least {} stages", order.min_stages()))?;
    Ok(s)
}

fn theta(value: Option<f64>, default: f64) -> Result<f64, Usage> {
    let th = value.unwrap_or(default);
    check((-1.0..=1.0).contains(&th), "theta", th, "expected a value in [-1, 1]")?;
    Ok(th)
}

fn resolution(value: Option<usize>) -> Result<usize, Usage> {
    let n = value.unwrap_or(DEFAULT_RESOLUTION);
    check(n >= 2, "res", n, "expected at least 2 nodes per axis")?;
    Ok(n)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn finish(mut out: BufWriter<File>, path: &Path) -> Result<()> {
    out.flush().with_context(|| format!("cannot write {}", path.display()))
}

type Job = Box<dyn FnOnce() -> Result<()>>;

fn rkc_domain(a: RkcDomainArgs) -> Result<Job, Usage> {
    let order = order(a.order, 1)?;
    let s = stages(a.s, None, "s", order)?;
    let eps = damping(a.eps)?;
    let res = resolution(a.res)?;
    let out = require(a.out, "out")?;
    let mut scan = RkcScan::around_interval(order, s, eps, res).map_err(|e| Usage::invalid(e.to_string()))?;
    scan.x_range = (a.xmin.unwrap_or(scan.x_range.0), a.xmax.unwrap_or(scan.x_range.1));
    scan.y_range = (a.ymin.unwrap_or(scan.y_range.0), a.ymax.unwrap_or(scan.y_range.1));
    let (x, y) = (scan.x_range, scan.y_range);
    check(x.0.is_finite() && x.1.is_finite() && x.0 < x.1, "xmin", x.0, "expected finite xmin < xmax")?;
    check(y.0.is_finite() && y.1.is_finite() && y.0 < y.1, "ymin", y.0, "expected finite ymin < ymax")?;
    Ok(Box::new(move || {
        let mut w = create(&out)?;
        let raster = scan_rkc_domain(&scan)?;
        raster.write_csv(&mut w).with_context(|| format!("cannot write {}", out.display()))?;
        finish(w, &out)?;
        let stable = raster.abs_r.iter().filter(|&&r| r <= 1.0).count();
        println!("wrote {} ({} of {} nodes with |R| <= 1)", out.display(), stable, raster.abs_r.len());
        Ok(())
    }))
}

fn arkc_domain(a: ArkcDomainArgs) -> Result<Job, Usage> {
    let order = order(a.order, 1)?;
    let scan = ArkcScan {
        slow_stages: stages(a.s, Some(4), "s", order)?,
        fast_stages: stages(a.m, Some(8), "m", order)?,
        order,
        damping: damping(a.eps)?,
        theta: theta(a.theta, 0.0)?,
        nz: resolution(a.res)?,
        nw: resolution(a.res)?,
    };
    let out = require(a.out, "out")?;
    Ok(Box::new(move || {
        let mut w = create(&out)?;
        let grid = scan_arkc_domain(&scan)?;
        grid.write_csv(&mut w).with_context(|| format!("cannot write {}", out.display()))?;
        finish(w, &out)?;
        println!(
            "wrote {} (max rho {:.6}, {} of {} nodes unstable)",
            out.display(),
            grid.max_rho(),
            grid.unstable_count(),
            grid.rho.len()
        );
        Ok(())
    }))
}

fn control_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_rkc.csv"))
}

fn model_instability(a: ModelArgs) -> Result<Job, Usage> {
    let d = ModelRun::default();
    let run = ModelRun {
        lambda: a.lambda.unwrap_or(d.lambda),
        zeta: a.zeta.unwrap_or(d.zeta),
        theta: theta(a.theta, d.theta)?,
        tau: a.tau.unwrap_or(d.tau),
        steps: a.steps.unwrap_or(d.steps),
        order: order(a.order, 1)?,
        damping: damping(a.eps)?,
    };
    check(run.lambda.is_finite() && run.lambda <= 0.0, "lambda", run.lambda, "expected a finite value <= 0")?;
    check(run.zeta.is_finite() && run.zeta <= 0.0, "zeta", run.zeta, "expected a finite value <= 0")?;
    check(run.tau.is_finite() && run.tau > 0.0, "tau", run.tau, "expected a finite value > 0")?;
    check(run.steps >= 1, "steps", run.steps, "expected at least 1")?;
    let out = require(a.out, "out")?;
    let control = a.control_out.unwrap_or_else(|| control_path(&out));
    Ok(Box::new(move || {
        let writers = [create(&out)?, create(&control)?];
        let h = run_model_problem(&run)?;
        for ((path, series), mut w) in [(&out, &h.arkc), (&control, &h.rkc)].into_iter().zip(writers) {
            write_norm_csv(series, &mut w).with_context(|| format!("cannot write {}", path.display()))?;
            finish(w, path)?;
        }
        println!(
            "wrote {} (ARKC s = {}, m = {}, growth {:.4e}) and {} (RKC s = {}, growth {:.4e})",
            out.display(),
            h.slow_stages,
            h.fast_stages,
            h.arkc_growth(),
            control.display(),
            h.rkc_stages,
            h.rkc_growth()
        );
        Ok(())
    }))
}

fn heat_convergence(a: HeatArgs) -> Result<Job, Usage> {
    let defaults = ConvergenceStudy::default();
    let (kmin, kmax) = (a.kmin.unwrap_or(1), a.kmax.unwrap_or(11));
    check(kmin <= kmax, "kmin", kmin, "expected kmin <= kmax")?;
    check(kmax <= 24, "kmax", kmax, "expected at most 24")?;
    let reference_step = a.reference_step.unwrap_or(defaults.reference_step);
    check(
        reference_step.is_finite() && reference_step > 0.0,
        "reference-step",
        reference_step,
        "expected a finite value > 0",
    )?;
    let study = ConvergenceStudy {
        method: match a.method.unwrap_or(Method::Arkc) {
            Method::Arkc => StudyMethod::Arkc,
            Method::Rkc => StudyMethod::Rkc,
        },
        order: order(a.order, 2)?,
        damping: damping(a.eps)?,
        ks: kmin..=kmax,
        t_end: defaults.t_end,
        reference_step,
    };
    let out = require(a.out, "out")?;
    Ok(Box::new(move || {
        let mut w = create(&out)?;
        let points = convergence_study(&build_heat_problem(), &study)?;
        write_convergence_csv(&points, &mut w).with_context(|| format!("cannot write {}", out.display()))?;
        finish(w, &out)?;
        println!("wrote {} ({} step sizes)", out.display(), points.len());
        Ok(())
    }))
}

fn prepare(cli: Cli) -> Result<(&'static str, Job), Usage> {
    let config = match &cli.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let name = cli.command.name();
    let job = match cli.command {
        Command::RkcDomain(a) => rkc_domain(a.overlay(config.rkc_domain.unwrap_or_default()))?,
        Command::ArkcDomain(a) => arkc_domain(a.overlay(config.arkc_domain.unwrap_or_default()))?,
        Command::ModelInstability(a) => model_instability(a.overlay(config.model_instability.unwrap_or_default()))?,
        Command::HeatConvergence(a) => heat_convergence(a.overlay(config.heat_convergence.unwrap_or_default()))?,
    };
    Ok((name, job))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, job) = match prepare(cli) {
        Ok(p) => p,
        Err(Usage(kind, msg)) => Cli::command().error(kind, msg).exit(),
    };
    match job() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {name}: {e:#}");
            ExitCode::from(1)
        }
    }
}
