//! Property analyzers for an algebra of cubic matrices: commutativity,
//! associativity, unit, sampled power-associativity, idempotents, the
//! submultiplicative norm constant and two-sided inverses.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::linalg::{least_squares, left_mul_matrix, right_mul_matrix, solve_square};
use super::{MulRule, Structure};
use crate::error::{Error, Result};
use crate::tensor::CubicMatrix;

/// Largest `m` for which [`analyze`] runs its exhaustive loops by default.
pub const DEFAULT_ANALYZE_GUARD: usize = 4;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Tolerance for the exhaustive structure-constant checks and the unit solve.
    pub tol: f64,
    /// Random elements used by the power-associativity test.
    pub samples: usize,
    /// Tolerance for `x^n * x^k = x^{n+k}`.
    pub power_tol: f64,
    /// Largest total power `n + k` tested.
    pub max_power: usize,
    pub guard: usize,
    pub seed: u64,
    pub idempotents: IdempotentOptions,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            samples: 100,
            power_tol: 1e-7,
            max_power: 8,
            guard: DEFAULT_ANALYZE_GUARD,
            seed: 0x5eed,
            idempotents: IdempotentOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IdempotentOptions {
    pub n_starts: usize,
    pub iters: usize,
    pub tol: f64,
    /// Weight of `V(x)` in the damped step `x <- (1 - d) x + d V(x)`.
    pub damping: f64,
    /// Newton refinement steps applied after the damped iteration.
    pub newton_steps: usize,
    pub seed: u64,
}

impl Default for IdempotentOptions {
    fn default() -> Self {
        Self { n_starts: 20, iters: 500, tol: 1e-8, damping: 0.5, newton_steps: 30, seed: 7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PowerAssocVerdict {
    /// No counterexample among `samples` random elements.
    Pass { samples: usize },
    Fail { n: usize, k: usize, residual: f64, witness: CubicMatrix },
}

impl PowerAssocVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PowerAssocVerdict::Pass { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    pub dim: usize,
    pub kind: String,
    pub commutative: bool,
    /// 1-based flat indices `(p, q)` with `E_p * E_q != E_q * E_p`.
    pub commutativity_witness: Option<[usize; 2]>,
    pub associative: bool,
    /// 1-based flat indices `(p, q, r)` with `(E_p E_q) E_r != E_p (E_q E_r)`.
    pub associativity_witness: Option<[usize; 3]>,
    pub unital: bool,
    pub unit: Option<CubicMatrix>,
    pub idempotents: Vec<CubicMatrix>,
    pub power_assoc_sampled: PowerAssocVerdict,
    pub norm_constant: f64,
}

/// Run every analyzer on `rule`.
pub fn analyze(rule: &MulRule, opts: &AnalyzeOptions) -> Result<AlgebraReport> {
    if rule.dim() > opts.guard {
        return Err(Error::DimensionGuard { dim: rule.dim(), guard: opts.guard });
    }
    let s = rule.structure();
    let comm = commutativity_witness(&s, opts.tol);
    let assoc = associativity_witness(&s, opts.tol);
    let unit = solve_unit(rule, opts.tol);
    let power = check_power_associativity(rule, opts)?;
    let idempotents = find_idempotents_with_unit(rule, unit.as_ref(), &opts.idempotents)?;
    Ok(AlgebraReport {
        dim: rule.dim(),
        kind: rule.kind_name().to_string(),
        commutative: comm.is_none(),
        commutativity_witness: comm.map(|(p, q)| [p + 1, q + 1]),
        associative: assoc.is_none(),
        associativity_witness: assoc.map(|(p, q, r)| [p + 1, q + 1, r + 1]),
        unital: unit.is_some(),
        unit,
        idempotents,
        power_assoc_sampled: power,
        norm_constant: mul_norm_constant(rule),
    })
}

/// First `(p, q)` (0-based) with `C^w_{pq} != C^w_{qp}` beyond `tol`.
pub(crate) fn commutativity_witness(s: &Structure, tol: f64) -> Option<(usize, usize)> {
    let n = s.n;
    let mut buf = vec![0.0; n];
    for p in 0..n {
        for q in 0..p {
            for &(w, c) in s.product(p, q) {
                buf[w] += c;
            }
            for &(w, c) in s.product(q, p) {
                buf[w] -= c;
            }
            let bad = buf.iter().any(|x| x.abs() > tol);
            buf.iter_mut().for_each(|x| *x = 0.0);
            if bad {
                return Some((p, q));
            }
        }
    }
    None
}

/// First `(p, q, r)` (0-based) violating
/// `sum_t C^t_{pq} C^l_{tr} = sum_t C^l_{pt} C^t_{qr}` for some `l`.
pub(crate) fn associativity_witness(s: &Structure, tol: f64) -> Option<(usize, usize, usize)> {
    let n = s.n;
    let mut buf = vec![0.0; n];
    for p in 0..n {
        for q in 0..n {
            let pq = s.product(p, q);
            for r in 0..n {
                for &(t, c1) in pq {
                    for &(l, c2) in s.product(t, r) {
                        buf[l] += c1 * c2;
                    }
                }
                for &(t, c1) in s.product(q, r) {
                    for &(l, c2) in s.product(p, t) {
                        buf[l] -= c1 * c2;
                    }
                }
                let bad = buf.iter().any(|x| x.abs() > tol);
                buf.iter_mut().for_each(|x| *x = 0.0);
                if bad {
                    return Some((p, q, r));
                }
            }
        }
    }
    None
}

/// Least-squares solve of `u * E_p = E_p = E_p * u` for all `p`; accepted when
/// every residual is within `tol`.
pub(crate) fn solve_unit(rule: &MulRule, tol: f64) -> Option<CubicMatrix> {
    let s = rule.structure();
    let n = s.n;
    let mut a = DMatrix::zeros(2 * n * n, n);
    let mut b = DVector::zeros(2 * n * n);
    for p in 0..n {
        for q in 0..n {
            // (u * E_p)_w picks up u_q C^w_{qp}; (E_p * u)_w picks up u_q C^w_{pq}
            for &(w, c) in s.product(q, p) {
                a[(p * n + w, q)] += c;
            }
            for &(w, c) in s.product(p, q) {
                a[(n * n + p * n + w, q)] += c;
            }
        }
        b[p * n + p] = 1.0;
        b[n * n + p * n + p] = 1.0;
    }
    let u = least_squares(a, &b)?;
    let unit = CubicMatrix::from_vec(rule.dim(), u.iter().copied().collect()).ok()?;
    for p in 0..n {
        let e = CubicMatrix::basis_offset(rule.dim(), p);
        let left = rule.multiply(&unit, &e).ok()?;
        let right = rule.multiply(&e, &unit).ok()?;
        if left.dist_l1(&e).ok()? > tol || right.dist_l1(&e).ok()? > tol {
            return None;
        }
    }
    Some(unit)
}

/// Sampled test of `x^n * x^k = x^{n+k}` (left-nested powers) on random
/// elements normalized to `‖x‖_mu = 1`. A pass is evidence, not proof.
pub fn check_power_associativity(rule: &MulRule, opts: &AnalyzeOptions) -> Result<PowerAssocVerdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let c = mul_norm_constant(rule);
    let n = rule.dim().pow(3);
    for _ in 0..opts.samples {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = CubicMatrix::from_vec(rule.dim(), raw)?;
        let norm = c * x.norm_l1();
        if norm == 0.0 {
            continue;
        }
        // ‖x‖_mu = 1 keeps every power bounded by 1 in the algebra norm
        let x = x.scale(1.0 / norm);
        let mut powers = vec![x.clone()];
        for _ in 1..opts.max_power {
            let next = rule.multiply(powers.last().expect("nonempty"), &x)?;
            powers.push(next);
        }
        for total in 2..=opts.max_power {
            for k in 1..total {
                let lhs = rule.multiply(&powers[total - k - 1], &powers[k - 1])?;
                let residual = lhs.dist_l1(&powers[total - 1])?;
                if residual > opts.power_tol {
                    return Ok(PowerAssocVerdict::Fail { n: total - k, k, residual, witness: x });
                }
            }
        }
    }
    Ok(PowerAssocVerdict::Pass { samples: opts.samples })
}

/// `C = max_{p,q} ‖E_p * E_q‖_1`, at least 1. `‖A‖_mu = C ‖A‖_1` is then
/// submultiplicative.
pub fn mul_norm_constant(rule: &MulRule) -> f64 {
    let s = rule.structure();
    s.products
        .iter()
        .map(|prod| prod.iter().map(|(_, c)| c.abs()).sum::<f64>())
        .fold(1.0, f64::max)
}

/// Fixed points of `V(x) = x * x`, i.e. idempotents of the algebra.
///
/// Always includes the zero matrix and, for unital rules, the unit. When the
/// structure constants are cubic-stochastic, further candidates come from
/// damped fixed-point iteration out of random points of the simplex (iterates
/// are projected back onto it). Otherwise zero attracts that iteration, so
/// Newton's method starts directly from every basis matrix and from random
/// points. All candidates get Newton refinement; every returned matrix
/// satisfies `‖X * X - X‖_1 <= tol`.
pub fn find_idempotents(rule: &MulRule, opts: &IdempotentOptions) -> Result<Vec<CubicMatrix>> {
    find_idempotents_with_unit(rule, rule.unit(), opts)
}

fn find_idempotents_with_unit(
    rule: &MulRule,
    unit: Option<&CubicMatrix>,
    opts: &IdempotentOptions,
) -> Result<Vec<CubicMatrix>> {
    let m = rule.dim();
    let s = rule.structure();
    let n = s.n;
    let stochastic = is_cubic_stochastic(&s);
    let merge_tol = (opts.tol * 100.0).max(1e-6);
    let mut found: Vec<CubicMatrix> = Vec::new();
    let accept = |x: CubicMatrix, found: &mut Vec<CubicMatrix>| -> Result<()> {
        let residual = rule.multiply(&x, &x)?.dist_l1(&x)?;
        if residual <= opts.tol
            && !found.iter().any(|y| y.dist_l1(&x).map(|d| d <= merge_tol).unwrap_or(false))
        {
            found.push(x);
        }
        Ok(())
    };

    accept(CubicMatrix::zero(m)?, &mut found)?;
    if let Some(u) = unit {
        accept(u.clone(), &mut found)?;
    }

    if !stochastic {
        for p in 0..n {
            let x = CubicMatrix::basis_offset(m, p).into_vec();
            if let Some(x) = newton_refine(rule, &s, x, opts)? {
                accept(x, &mut found)?;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.n_starts {
        let x = if stochastic {
            // uniform on the simplex
            let e: Vec<f64> = (0..n).map(|_| -rng.random_range(f64::EPSILON..1.0).ln()).collect();
            let total: f64 = e.iter().sum();
            match damped_iteration(rule, e.into_iter().map(|v| v / total).collect(), opts)? {
                Some(x) => x,
                None => continue,
            }
        } else {
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        if let Some(x) = newton_refine(rule, &s, x, opts)? {
            accept(x, &mut found)?;
        }
    }
    Ok(found)
}

/// `x <- (1 - d) x + d V(x)` projected onto the simplex; `None` on divergence.
fn damped_iteration(rule: &MulRule, mut x: Vec<f64>, opts: &IdempotentOptions) -> Result<Option<Vec<f64>>> {
    let m = rule.dim();
    for _ in 0..opts.iters {
        let xm = CubicMatrix::from_raw(m, x.clone());
        let v = rule.multiply(&xm, &xm)?;
        let mut step = 0.0;
        for (xi, vi) in x.iter_mut().zip(v.as_slice()) {
            let next = (1.0 - opts.damping) * *xi + opts.damping * vi;
            step += (next - *xi).abs();
            *xi = next;
        }
        project_to_simplex(&mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Ok(None);
        }
        if step < opts.tol * 1e-3 {
            break;
        }
    }
    Ok(Some(x))
}

fn newton_refine(
    rule: &MulRule,
    s: &Structure,
    mut x: Vec<f64>,
    opts: &IdempotentOptions,
) -> Result<Option<CubicMatrix>> {
    let m = rule.dim();
    let n = s.n;
    let residual_of = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let xm = CubicMatrix::from_raw(m, x.to_vec());
        let f = rule.multiply(&xm, &xm)?.sub(&xm)?;
        Ok((f.norm_l1(), f.into_vec()))
    };
    let (mut res, mut f) = residual_of(&x)?;
    for _ in 0..opts.newton_steps {
        if res <= opts.tol * 1e-2 {
            break;
        }
        let mut j = left_mul_matrix(s, &x) + right_mul_matrix(s, &x);
        for d in 0..n {
            j[(d, d)] -= 1.0;
        }
        let rhs = -DVector::from_vec(f.clone());
        let delta = match solve_square(j.clone(), &rhs).or_else(|| least_squares(j, &rhs)) {
            Some(d) => d,
            None => break,
        };
        // backtracking: halve the step until the residual drops
        let mut scale = 1.0;
        let mut improved = None;
        for _ in 0..12 {
            let candidate: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + scale * d).collect();
            if candidate.iter().all(|v| v.is_finite()) {
                let (cres, cf) = residual_of(&candidate)?;
                if cres < res {
                    improved = Some((candidate, cres, cf));
                    break;
                }
            }
            scale *= 0.5;
        }
        match improved {
            Some((c, cres, cf)) => {
                x = c;
                res = cres;
                f = cf;
            }
            None => break,
        }
    }
    if x.iter().all(|v| v.is_finite()) {
        Ok(Some(CubicMatrix::from_raw(m, x)))
    } else {
        Ok(None)
    }
}

fn is_cubic_stochastic(s: &Structure) -> bool {
    s.products.iter().all(|prod| {
        prod.iter().all(|&(_, c)| c >= 0.0)
            && (prod.iter().map(|(_, c)| c).sum::<f64>() - 1.0).abs() <= 1e-12
    })
}

/// Euclidean projection onto `{x >= 0, sum x = 1}`.
fn project_to_simplex(x: &mut [f64]) {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Two-sided inverse of `a` in a unital associative algebra.
///
/// Solves the linear system `A * X = I` and accepts `X` when both `A * X` and
/// `X * A` are within `tol * max(1, ‖A‖_1 ‖X‖_1)` of the unit in `‖.‖_1`.
pub fn inverse(rule: &MulRule, a: &CubicMatrix, tol: f64) -> Result<CubicMatrix> {
    if a.dim() != rule.dim() {
        return Err(Error::DimMismatch { expected: rule.dim(), found: a.dim() });
    }
    let unit = rule.unit().ok_or(Error::NotUnital)?;
    if !rule.is_associative() {
        return Err(Error::NotAssociative);
    }
    let s = rule.structure();
    let l = left_mul_matrix(&s, a.as_slice());
    let rhs = DVector::from_column_slice(unit.as_slice());
    let x = solve_square(l, &rhs).ok_or(Error::NotInvertible)?;
    let x = CubicMatrix::from_vec(rule.dim(), x.iter().copied().collect())
        .map_err(|_| Error::NotInvertible)?;
    let scale = (a.norm_l1() * x.norm_l1()).max(1.0);
    let right = rule.multiply(a, &x)?.dist_l1(unit)?;
    let left = rule.multiply(&x, a)?.dist_l1(unit)?;
    if right > tol * scale || left > tol * scale {
        return Err(Error::NotInvertible);
    }
    Ok(x)
}
