//! Independent numerical checks on flows: Kolmogorov-Chapman residuals on
//! time grids, the forward/backward partial differential equations by finite
//! differences, and a Runge-Kutta integrator for `dY/dt = Q * Y`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flows::FlowFamily;
use crate::mulrules::MulRule;
use crate::tensor::CubicMatrix;

/// Default KCE acceptance tolerance on `‖.‖_1`.
pub const DEFAULT_KCE_TOL: f64 = 1e-8;

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-4;

/// Default PDE residual tolerance.
pub const DEFAULT_PDE_TOL: f64 = 1e-6;

pub type Triple = (f64, f64, f64);

/// `s in {0, 0.3, 0.7}`, `Delta in {0.5, 1, 2}`, `tau = s + Delta/3`, `t = s + Delta`;
/// discrete families use every integer triple `0 <= n < k < l <= 5`.
pub fn standard_grid(discrete: bool) -> Vec<Triple> {
    if discrete {
        let mut out = Vec::new();
        for n in 0..=5u32 {
            for k in n + 1..=5 {
                for l in k + 1..=5 {
                    out.push((n as f64, k as f64, l as f64));
                }
            }
        }
        return out;
    }
    let mut out = Vec::new();
    for s in [0.0, 0.3, 0.7] {
        for delta in [0.5, 1.0, 2.0] {
            out.push((s, s + delta / 3.0, s + delta));
        }
    }
    out
}

/// The standard continuous grid shifted by `+0.1`, so the `s`-stencil of
/// [`check_pde`] stays at nonnegative times for `h <= 0.025`.
pub fn standard_pde_samples() -> Vec<Triple> {
    standard_grid(false).into_iter().map(|(s, tau, t)| (s + 0.1, tau + 0.1, t + 0.1)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct KceReport {
    pub label: String,
    pub grid: Vec<Triple>,
    /// `‖M[s,t] - M[s,tau] * M[tau,t]‖_1` per triple.
    pub residuals: Vec<f64>,
    /// Largest entrywise deviation per triple.
    pub max_entry_residuals: Vec<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluate the Kolmogorov-Chapman residual of `flow` at every grid triple.
pub fn check_kce(flow: &FlowFamily, grid: &[Triple], tol: f64) -> Result<KceReport> {
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let mut residuals = Vec::with_capacity(grid.len());
    let mut entry = Vec::with_capacity(grid.len());
    for &(s, tau, t) in grid {
        if !(s < tau && tau < t) {
            return Err(Error::Grid(format!("triple ({s}, {tau}, {t}) is not strictly ordered")));
        }
        let whole = flow.eval(s, t)?;
        let split = flow.rule().multiply(&flow.eval(s, tau)?, &flow.eval(tau, t)?)?;
        let diff = whole.sub(&split)?;
        residuals.push(diff.norm_l1());
        entry.push(diff.max_abs());
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let nan = residuals.iter().any(|r| r.is_nan());
    Ok(KceReport {
        label: flow.label(),
        grid: grid.to_vec(),
        residuals,
        max_entry_residuals: entry,
        max_residual,
        tolerance: tol,
        pass: !nan && max_residual <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PdeReport {
    pub label: String,
    pub h: f64,
    pub samples: Vec<Triple>,
    /// `‖D_s M[s,t] - (D_s M[s,tau]) * M[tau,t]‖_1` per sample.
    pub forward: Vec<f64>,
    /// `‖D_t M[s,t] - M[s,tau] * (D_t M[tau,t])‖_1` per sample.
    pub backward: Vec<f64>,
    pub max_forward: f64,
    pub max_backward: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Finite-difference residuals of the forward and backward equations.
///
/// The left-hand derivatives use the second-order central difference
/// `(f(x+h) - f(x-h)) / 2h`, the right-hand derivatives the fourth-order
/// stencil `(-f(x+2h) + 8f(x+h) - 8f(x-h) + f(x-2h)) / 12h`. On a flow that
/// satisfies the KCE the residual is therefore the `O(h^2)` truncation error
/// of the central difference; a flow that violates it leaves an `O(1)` residual.
/// Every sample needs `s - 2h >= 0` and `s + 2h < tau < t - 2h`.
pub fn check_pde(flow: &FlowFamily, samples: &[Triple], h: f64, tol: f64) -> Result<PdeReport> {
    if flow.is_discrete() {
        return Err(Error::DiscreteFlow);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Grid(format!("step h must be positive, got {h}")));
    }
    if samples.is_empty() {
        return Err(Error::Grid("empty sample list".into()));
    }
    let rule = flow.rule();
    let mut forward = Vec::with_capacity(samples.len());
    let mut backward = Vec::with_capacity(samples.len());
    for &(s, tau, t) in samples {
        if !(s - 2.0 * h >= 0.0 && s + 2.0 * h < tau && tau < t - 2.0 * h) {
            return Err(Error::Grid(format!(
                "sample ({s}, {tau}, {t}) violates s - 2h >= 0 and s + 2h < tau < t - 2h for h = {h}"
            )));
        }
        let ds_whole = central(|x| flow.eval(x, t), s, h)?;
        let ds_left = five_point(|x| flow.eval(x, tau), s, h)?;
        let fwd = ds_whole.sub(&rule.multiply(&ds_left, &flow.eval(tau, t)?)?)?;
        forward.push(fwd.norm_l1());

        let dt_whole = central(|x| flow.eval(s, x), t, h)?;
        let dt_right = five_point(|x| flow.eval(tau, x), t, h)?;
        let bwd = dt_whole.sub(&rule.multiply(&flow.eval(s, tau)?, &dt_right)?)?;
        backward.push(bwd.norm_l1());
    }
    let max_forward = forward.iter().copied().fold(0.0, f64::max);
    let max_backward = backward.iter().copied().fold(0.0, f64::max);
    let finite = forward.iter().chain(&backward).all(|r| r.is_finite());
    Ok(PdeReport {
        label: flow.label(),
        h,
        samples: samples.to_vec(),
        forward,
        backward,
        max_forward,
        max_backward,
        tolerance: tol,
        pass: finite && max_forward <= tol && max_backward <= tol,
    })
}

fn central(f: impl Fn(f64) -> Result<CubicMatrix>, x: f64, h: f64) -> Result<CubicMatrix> {
    let plus = f(x + h)?;
    let minus = f(x - h)?;
    Ok(plus.sub(&minus)?.scale(1.0 / (2.0 * h)))
}

fn five_point(f: impl Fn(f64) -> Result<CubicMatrix>, x: f64, h: f64) -> Result<CubicMatrix> {
    let outer = f(x - 2.0 * h)?.sub(&f(x + 2.0 * h)?)?;
    let mut acc = f(x + h)?.sub(&f(x - h)?)?.scale(8.0);
    acc.axpy(1.0, &outer)?;
    Ok(acc.scale(1.0 / (12.0 * h)))
}

/// Classical fourth-order Runge-Kutta for `dY/dt = Q * Y`, `Y(0) = I`, with
/// `steps` equal steps on `[0, t_end]`.
pub fn ode_oracle(rule: &MulRule, q: &CubicMatrix, t_end: f64, steps: usize) -> Result<CubicMatrix> {
    if q.dim() != rule.dim() {
        return Err(Error::DimMismatch { expected: rule.dim(), found: q.dim() });
    }
    if steps == 0 {
        return Err(Error::Config("ode_oracle needs at least one step".into()));
    }
    if !t_end.is_finite() {
        return Err(Error::Config(format!("non-finite t_end {t_end}")));
    }
    let unit = rule.unit().ok_or(Error::NotUnital)?;
    let h = t_end / steps as f64;
    let rhs = |y: &CubicMatrix| rule.multiply(q, y);
    let mut y = unit.clone();
    for _ in 0..steps {
        let k1 = rhs(&y)?;
        let mut y2 = y.clone();
        y2.axpy(h / 2.0, &k1)?;
        let k2 = rhs(&y2)?;
        let mut y3 = y.clone();
        y3.axpy(h / 2.0, &k2)?;
        let k3 = rhs(&y3)?;
        let mut y4 = y.clone();
        y4.axpy(h, &k3)?;
        let k4 = rhs(&y4)?;
        y.axpy(h / 6.0, &k1)?;
        y.axpy(h / 3.0, &k2)?;
        y.axpy(h / 3.0, &k3)?;
        y.axpy(h / 6.0, &k4)?;
    }
    Ok(y)
}
