use crate::error::{Error, Result};
use crate::mulrules::{mul_norm_constant, MulRule};
use crate::tensor::CubicMatrix;

/// Hard cap on series terms.
const MAX_TERMS: usize = 10_000;

/// `exp_mu(tQ) = I + sum_{n >= 1} (tQ)^{*n} / n!`, truncated with a guaranteed tail bound.
///
/// With `x = ‖tQ‖_mu = C ‖tQ‖_1` (see [`mul_norm_constant`]) the remainder after
/// the `N`-th term is at most `x^{N+1} / (N+1)! e^x`; summation stops at the
/// first `N` where that bound is `<= tol`. Requires a unital, associative rule.
/// The plain series loses accuracy to cancellation once `x` is large (tens).
pub fn exp_mu(rule: &MulRule, q: &CubicMatrix, t: f64, tol: f64) -> Result<CubicMatrix> {
    Ok(exp_mu_terms(rule, q, t, tol)?.0)
}

/// As [`exp_mu`], also returning the number of terms `N` summed after the unit.
pub fn exp_mu_terms(rule: &MulRule, q: &CubicMatrix, t: f64, tol: f64) -> Result<(CubicMatrix, usize)> {
    if q.dim() != rule.dim() {
        return Err(Error::DimMismatch { expected: rule.dim(), found: q.dim() });
    }
    if !t.is_finite() || tol.is_nan() || tol <= 0.0 {
        return Err(Error::Config(format!("exp_mu needs finite t and tol > 0, got t = {t}, tol = {tol}")));
    }
    let unit = rule.unit().ok_or(Error::NotUnital)?;
    if !rule.is_associative() {
        return Err(Error::NotAssociative);
    }
    let tq = q.scale(t);
    let x = mul_norm_constant(rule) * tq.norm_l1();
    let ex = x.exp();

    let mut sum = unit.clone();
    let mut term = unit.clone();
    // bound = x^{N+1} / (N+1)! * e^x for the current N
    let mut bound = x * ex;
    let mut n = 0;
    while bound > tol {
        if n >= MAX_TERMS {
            return Err(Error::Config(format!("exp_mu did not converge within {MAX_TERMS} terms")));
        }
        n += 1;
        term = rule.multiply(&term, &tq)?.scale(1.0 / n as f64);
        sum.axpy(1.0, &term)?;
        bound *= x / (n as f64 + 1.0);
    }
    if !sum.is_finite() {
        return Err(Error::NonFiniteAt(t));
    }
    Ok((sum, n))
}
