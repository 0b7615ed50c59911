//! The seed characteristic function: even, supported on `[-rho, rho]`,
//! strictly positive inside, with a closed-form nonnegative inverse transform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Behaviour the construction needs from a seed kernel.
pub trait SeedKernel {
    fn rho(&self) -> f64;
    fn eval(&self, x: f64) -> f64;
    /// `(1/2π) ∫ e^{itx} φ(x) dx`.
    fn inverse_eval(&self, t: f64) -> f64;
    /// Upper bound on `∫_{|t| > cutoff} inverse_eval(t) dt`.
    fn inverse_tail_bound(&self, cutoff: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelShape {
    /// `max(0, 1 - |x|/rho)`, paired with the Fejér density.
    #[default]
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    rho: f64,
    shape: KernelShape,
}

impl Kernel {
    pub fn new(shape: KernelShape, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::NonPositiveRho(rho));
        }
        Ok(Kernel { rho, shape })
    }

    pub fn make_triangle(rho: f64) -> Result<Self> {
        Self::new(KernelShape::Triangle, rho)
    }

    pub fn shape(&self) -> KernelShape {
        self.shape
    }
}

impl SeedKernel for Kernel {
    fn rho(&self) -> f64 {
        self.rho
    }

    fn eval(&self, x: f64) -> f64 {
        match self.shape {
            KernelShape::Triangle => (1.0 - x.abs() / self.rho).max(0.0),
        }
    }

    /// `(rho/2π)·(sin(rho·t/2)/(rho·t/2))²`, equal to `rho/2π` at `t = 0`.
    fn inverse_eval(&self, t: f64) -> f64 {
        match self.shape {
            KernelShape::Triangle => {
                let u = 0.5 * self.rho * t;
                let s = if u.abs() < 1e-4 {
                    // sin(u)/u = 1 - u²/6 + u⁴/120 - …
                    let u2 = u * u;
                    1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
                } else {
                    u.sin() / u
                };
                self.rho / (2.0 * PI) * s * s
            }
        }
    }

    /// `(rho/2π)·sinc² ≤ 2/(π·rho·t²)`, so the two-sided tail is `4/(π·rho·T)`.
    fn inverse_tail_bound(&self, cutoff: f64) -> f64 {
        match self.shape {
            KernelShape::Triangle => 4.0 / (PI * self.rho * cutoff),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    pub max_asymmetry: f64,
    pub max_outside_support: f64,
    pub min_interior: f64,
    pub value_at_zero: f64,
    pub min_inverse: f64,
    /// `∫_{-D}^{D} φ̌`.
    pub window_mass: f64,
    pub tail_bound: f64,
}

/// Numerical check of the kernel contract on grids of spacing `grid_step`:
/// `x` over `[-2rho, 2rho]` and `t` over `[-domain_halfwidth, domain_halfwidth]`.
pub fn verify_kernel<K: SeedKernel + ?Sized>(
    kernel: &K,
    grid_step: f64,
    domain_halfwidth: f64,
) -> Result<KernelReport> {
    let violation = |property, detail: String| Error::KernelViolation { property, detail };
    if !(grid_step > 0.0) || !(domain_halfwidth > 0.0) {
        return Err(violation(
            "grid",
            format!("step {grid_step} and domain {domain_halfwidth} must be positive"),
        ));
    }
    let rho = kernel.rho();

    let value_at_zero = kernel.eval(0.0);
    if (value_at_zero - 1.0).abs() > 1e-15 {
        return Err(violation(
            "normalization",
            format!("eval(0) = {value_at_zero}"),
        ));
    }

    let nx = (2.0 * rho / grid_step).ceil() as i64;
    let mut max_asymmetry = 0.0_f64;
    let mut max_outside = 0.0_f64;
    let mut min_interior = f64::INFINITY;
    let mut check_x = |x: f64| {
        let v = kernel.eval(x);
        max_asymmetry = max_asymmetry.max((v - kernel.eval(-x)).abs());
        if x.abs() >= rho {
            max_outside = max_outside.max(v.abs());
        } else {
            min_interior = min_interior.min(v);
        }
    };
    for i in -nx..=nx {
        check_x(i as f64 * grid_step);
    }
    check_x(rho);
    check_x(-rho);
    if max_asymmetry > 1e-15 {
        return Err(violation(
            "evenness",
            format!("max |φ(x) - φ(-x)| = {max_asymmetry:e}"),
        ));
    }
    if max_outside > 0.0 {
        return Err(violation(
            "support",
            format!("|φ| reaches {max_outside:e} outside (-{rho}, {rho})"),
        ));
    }
    if !(min_interior > 0.0) {
        return Err(violation(
            "positivity",
            format!("min over interior = {min_interior:e}"),
        ));
    }

    let nt = (domain_halfwidth / grid_step).ceil() as i64;
    let mut min_inverse = f64::INFINITY;
    let mut inverse_asymmetry = 0.0_f64;
    for i in 0..=nt {
        let t = (i as f64 * grid_step).min(domain_halfwidth);
        let v = kernel.inverse_eval(t);
        min_inverse = min_inverse.min(v);
        inverse_asymmetry = inverse_asymmetry.max((v - kernel.inverse_eval(-t)).abs());
    }
    if min_inverse < 0.0 {
        return Err(violation(
            "bochner",
            format!("min inverse = {min_inverse:e}"),
        ));
    }
    if inverse_asymmetry > 1e-15 {
        return Err(violation(
            "evenness",
            format!("inverse asymmetry {inverse_asymmetry:e}"),
        ));
    }

    // Panels of at most a quarter period of the oscillation.
    let gl = GaussLegendre::new(8);
    let panel = (0.5 * PI / rho).min(64.0 * grid_step).min(domain_halfwidth);
    let panels = (domain_halfwidth / panel).ceil() as usize;
    let half = gl.integrate_panels(0.0, domain_halfwidth, panels, |t| kernel.inverse_eval(t));
    let window_mass = 2.0 * half;
    let tail_bound = kernel.inverse_tail_bound(domain_halfwidth);
    // Quadrature is accurate to ~1e-12 here; allow a little slack on top of the tail.
    let slack = 1e-9;
    if !(window_mass <= 1.0 + slack && window_mass >= 1.0 - tail_bound - slack) {
        return Err(violation(
            "mass",
            format!("∫φ̌ over the window = {window_mass}, tail bound {tail_bound:e}"),
        ));
    }

    Ok(KernelReport {
        max_asymmetry,
        max_outside_support: max_outside,
        min_interior,
        value_at_zero,
        min_inverse,
        window_mass,
        tail_bound,
    })
}
