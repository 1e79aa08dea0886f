//! Chebyshev polynomials of the first kind and the coefficient sets of the
//! first- and second-order Runge-Kutta-Chebyshev methods.
//!
//! Both orders use the damped shift `w0 = 1 + eps / s^2`. The first-order
//! method has stability polynomial `T_s(w0 + w1 z) / T_s(w0)`, the
//! second-order one `a_s + b_s T_s(w0 + w1 z)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Damping used by every experiment unless overridden.
pub const DEFAULT_DAMPING: f64 = 0.05;

/// Upper limit for [`select_stage_count`].
pub const MAX_STAGES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn as_u8(self) -> u8 {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }

    /// Fewest stages the method is defined for.
    pub fn min_stages(self) -> usize {
        match self {
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

impl TryFrom<u8> for Order {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        match value {
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// `T_j(x)` together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebEval {
    pub degree: usize,
    pub argument: f64,
    pub value: f64,
    pub deriv: f64,
    pub deriv2: f64,
}

/// Evaluates `T_j`, `T_j'` and `T_j''` at `x` by the three-term recurrences.
pub fn cheb_eval(j: usize, x: f64) -> ChebEval {
    *cheb_table(j, x).last().expect("table holds degrees 0..=j")
}

/// All of `T_0 .. T_n` (with derivatives) at `x`, indexed by degree.
pub fn cheb_table(n: usize, x: f64) -> Vec<ChebEval> {
    let mut table = Vec::with_capacity(n + 1);
    table.push(ChebEval {
        degree: 0,
        argument: x,
        value: 1.0,
        deriv: 0.0,
        deriv2: 0.0,
    });
    if n == 0 {
        return table;
    }
    table.push(ChebEval {
        degree: 1,
        argument: x,
        value: x,
        deriv: 1.0,
        deriv2: 0.0,
    });
    for j in 2..=n {
        let p1 = table[j - 1];
        let p2 = table[j - 2];
        table.push(ChebEval {
            degree: j,
            argument: x,
            value: 2.0 * x * p1.value - p2.value,
            deriv: 2.0 * p1.value + 2.0 * x * p1.deriv - p2.deriv,
            deriv2: 4.0 * p1.deriv + 2.0 * x * p1.deriv2 - p2.deriv2,
        });
    }
    table
}

/// `T_n(z)` for complex `z`.
pub fn cheb_complex(n: usize, z: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for _ in 2..=n {
        let next = 2.0 * z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of one s-stage RKC method.
///
/// The recurrence arrays are indexed by stage number: `mu[i]` is the
/// coefficient of stage `i` for `i = 1..=s`, while `nu`, `kappa` and `gamma`
/// are meaningful from `i = 2` on (entries 0 and 1 are zero). `c` holds the
/// abscissae `c_0 ..= c_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RkcCoefficients {
    order: Order,
    stages: usize,
    damping: f64,
    omega0: f64,
    omega1: f64,
    mu: Vec<f64>,
    nu: Vec<f64>,
    kappa: Vec<f64>,
    gamma: Vec<f64>,
    c: Vec<f64>,
    ell: f64,
    // a_s, b_s of the second-order stability polynomial; (0, 1 / T_s(w0)) for order 1
    poly_shift: f64,
    poly_scale: f64,
}

impl RkcCoefficients {
    pub fn new(order: Order, stages: usize, damping: f64) -> Result<Self> {
        build_coefficients(order, stages, damping)
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn stages(&self) -> usize {
        self.stages
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    /// Real-axis stability bound: `|R_s(-x)| <= 1` for `x` in `[0, ell]`.
    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn mu(&self, i: usize) -> f64 {
        self.mu[i]
    }

    pub fn nu(&self, i: usize) -> f64 {
        self.nu[i]
    }

    pub fn kappa(&self, i: usize) -> f64 {
        self.kappa[i]
    }

    pub fn gamma(&self, i: usize) -> f64 {
        self.gamma[i]
    }

    pub fn c(&self, i: usize) -> f64 {
        self.c[i]
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.c
    }

    /// Stability polynomial evaluated through its Chebyshev closed form.
    pub fn stability_polynomial(&self, z: Complex64) -> Complex64 {
        let arg = self.omega0 + self.omega1 * z;
        self.poly_shift + self.poly_scale * cheb_complex(self.stages, arg)
    }

    pub fn stability_polynomial_real(&self, z: f64) -> f64 {
        self.poly_shift + self.poly_scale * cheb_eval(self.stages, self.omega0 + self.omega1 * z).value
    }
}

fn check_inputs(order: Order, stages: usize, damping: f64) -> Result<()> {
    if !(damping.is_finite() && damping >= 0.0) {
        return Err(Error::InvalidDamping(damping));
    }
    if stages < order.min_stages() {
        return Err(match order {
            Order::Second => Error::TooFewStages(stages),
            Order::First => Error::InvalidArgument("stage count must be at least 1".into()),
        });
    }
    Ok(())
}

fn shift(stages: usize, damping: f64) -> f64 {
    1.0 + damping / (stages * stages) as f64
}

/// Builds the s-stage coefficient set of the given order and damping.
pub fn build_coefficients(order: Order, stages: usize, damping: f64) -> Result<RkcCoefficients> {
    check_inputs(order, stages, damping)?;
    let s = stages;
    let omega0 = shift(s, damping);
    let t = cheb_table(s, omega0);

    let mut mu = vec![0.0; s + 1];
    let mut nu = vec![0.0; s + 1];
    let mut kappa = vec![0.0; s + 1];
    let mut gamma = vec![0.0; s + 1];
    let mut c = vec![0.0; s + 1];

    let (omega1, poly_shift, poly_scale) = match order {
        Order::First => {
            let omega1 = t[s].value / t[s].deriv;
            let b: Vec<f64> = t.iter().map(|e| 1.0 / e.value).collect();
            mu[1] = omega1 / omega0;
            for j in 2..=s {
                nu[j] = 2.0 * omega0 * b[j] / b[j - 1];
                kappa[j] = -b[j] / b[j - 2];
                mu[j] = 2.0 * omega1 * b[j] / b[j - 1];
            }
            for j in 1..=s {
                c[j] = omega1 * t[j].deriv / t[j].value;
            }
            (omega1, 0.0, b[s])
        }
        Order::Second => {
            let omega1 = t[s].deriv / t[s].deriv2;
            let mut b = vec![0.0; s + 1];
            for j in 2..=s {
                b[j] = t[j].deriv2 / (t[j].deriv * t[j].deriv);
            }
            b[0] = b[2];
            b[1] = b[2];
            let a: Vec<f64> = (0..=s).map(|j| 1.0 - b[j] * t[j].value).collect();
            mu[1] = b[1] * omega1;
            for j in 2..=s {
                nu[j] = 2.0 * omega0 * b[j] / b[j - 1];
                kappa[j] = -b[j] / b[j - 2];
                mu[j] = 2.0 * omega1 * b[j] / b[j - 1];
                gamma[j] = -a[j - 1] * mu[j];
            }
            // stage 1 is the linear polynomial 1 + mu_1 z, so its abscissa is mu_1
            c[1] = mu[1];
            for j in 2..=s {
                c[j] = omega1 * t[j].deriv2 / t[j].deriv;
            }
            (omega1, a[s], b[s])
        }
    };
    c[0] = 0.0;
    c[s] = 1.0;

    Ok(RkcCoefficients {
        order,
        stages: s,
        damping,
        omega0,
        omega1,
        mu,
        nu,
        kappa,
        gamma,
        c,
        ell: (1.0 + omega0) / omega1,
        poly_shift,
        poly_scale,
    })
}

/// `ell(order, s, eps)` without building the full coefficient set.
pub fn stability_bound(order: Order, stages: usize, damping: f64) -> Result<f64> {
    check_inputs(order, stages, damping)?;
    let omega0 = shift(stages, damping);
    let e = cheb_eval(stages, omega0);
    let omega1 = match order {
        Order::First => e.value / e.deriv,
        Order::Second => e.deriv / e.deriv2,
    };
    Ok((1.0 + omega0) / omega1)
}

/// Smallest admissible stage count whose real stability bound covers `scaled_rho = tau * rho`.
pub fn select_stage_count(order: Order, scaled_rho: f64, damping: f64) -> Result<usize> {
    if !(scaled_rho.is_finite() && scaled_rho >= 0.0) {
        return Err(Error::InvalidSpectralRadius(scaled_rho));
    }
    let min = order.min_stages();
    check_inputs(order, min, damping)?;
    let beta = match order {
        Order::First => 2.0,
        Order::Second => 2.0 / 3.0,
    };
    let guess = (scaled_rho / beta).sqrt().ceil();
    if guess > MAX_STAGES as f64 {
        return Err(Error::StageCountTooLarge { scaled: scaled_rho, max: MAX_STAGES });
    }
    let mut s = (guess as usize).max(min);
    while stability_bound(order, s, damping)? < scaled_rho {
        s += 1;
        if s > MAX_STAGES {
            return Err(Error::StageCountTooLarge { scaled: scaled_rho, max: MAX_STAGES });
        }
    }
    while s > min && stability_bound(order, s - 1, damping)? >= scaled_rho {
        s -= 1;
    }
    Ok(s)
}
