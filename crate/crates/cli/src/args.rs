use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

/// Stability scans, the coupled model problem and the heat convergence study.
#[derive(Debug, Parser)]
#[command(name = "arkc", version, about)]
pub struct Cli {
    /// TOML file with one table per subcommand, e.g. `[arkc-domain]`; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Raster of |R_s(x + iy)| for single-rate RKC (`x,y,absR`).
    RkcDomain(RkcDomainArgs),
    /// Spectral radius of the ARKC iteration matrix over the decoupled box (`z,w,rho`).
    ArkcDomain(ArkcDomainArgs),
    /// Norm histories of ARKC and single-rate RKC on the coupled 2x2 problem (`t,l2N`).
    ModelInstability(ModelArgs),
    /// Time-step convergence ladder on the refined heat problem (`dt,err`).
    HeatConvergence(HeatArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::RkcDomain(_) => "rkc-domain",
            Command::ArkcDomain(_) => "arkc-domain",
            Command::ModelInstability(_) => "model-instability",
            Command::HeatConvergence(_) => "heat-convergence",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RkcDomainArgs {
    /// Method order (1 or 2) [default: 1]
    #[arg(long)]
    pub order: Option<u8>,
    /// Number of stages
    #[arg(long)]
    pub s: Option<usize>,
    /// Damping [default: 0.05]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Real-axis window [default: -1.05 ell .. 0.05 ell]
    #[arg(long, allow_hyphen_values = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xmax: Option<f64>,
    /// Imaginary-axis window [default: -0.15 ell .. 0.15 ell]
    #[arg(long, allow_hyphen_values = true)]
    pub ymin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ymax: Option<f64>,
    /// Nodes per axis [default: 400]
    #[arg(long)]
    pub res: Option<usize>,
    /// Output CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ArkcDomainArgs {
    /// Method order (1 or 2) [default: 1]
    #[arg(long)]
    pub order: Option<u8>,
    /// Slow stages [default: 4]
    #[arg(long)]
    pub s: Option<usize>,
    /// Fast stages [default: 8]
    #[arg(long)]
    pub m: Option<usize>,
    /// Coupling strength in [-1, 1] [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Damping [default: 0.05]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Nodes per axis [default: 400]
    #[arg(long)]
    pub res: Option<usize>,
    /// Output CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ModelArgs {
    /// Fast eigenvalue [default: -100]
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Slow eigenvalue [default: -28]
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<f64>,
    /// Coupling strength in [-1, 1] [default: 0.2]
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Step size [default: 1]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Number of steps [default: 50]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Method order (1 or 2) [default: 1]
    #[arg(long)]
    pub order: Option<u8>,
    /// Damping [default: 0.05]
    #[arg(long)]
    pub eps: Option<f64>,
    /// ARKC norm history CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Single-rate RKC norm history CSV [default: <out stem>_rkc.csv]
    #[arg(long)]
    pub control_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Arkc,
    Rkc,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HeatArgs {
    /// Smallest k of tau = 2^-k [default: 1]
    #[arg(long)]
    pub kmin: Option<u32>,
    /// Largest k of tau = 2^-k [default: 11]
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Damping [default: 0.05]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Method order (1 or 2) [default: 2]
    #[arg(long)]
    pub order: Option<u8>,
    /// Integrator under study [default: arkc]
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Reference step [default: 2^-14]
    #[arg(long)]
    pub reference_step: Option<f64>,
    /// Output CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($ty:ident { $($field:ident),* }) => {
        impl $ty {
            /// Fields set on the command line win over `file`.
            pub fn overlay(self, file: $ty) -> $ty {
                $ty { $($field: self.$field.or(file.$field)),* }
            }
        }
    };
}

overlay!(RkcDomainArgs { order, s, eps, xmin, xmax, ymin, ymax, res, out });
overlay!(ArkcDomainArgs { order, s, m, theta, eps, res, out });
overlay!(ModelArgs { lambda, zeta, theta, tau, steps, order, eps, out, control_out });
overlay!(HeatArgs { kmin, kmax, eps, order, method, reference_step, out });

/// Per-subcommand tables of a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    #[serde(default)]
    pub rkc_domain: Option<RkcDomainArgs>,
    #[serde(default)]
    pub arkc_domain: Option<ArkcDomainArgs>,
    #[serde(default)]
    pub model_instability: Option<ModelArgs>,
    #[serde(default)]
    pub heat_convergence: Option<HeatArgs>,
}
