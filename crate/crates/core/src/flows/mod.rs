//! Flows of algebras: time-indexed families `(s, t) -> M[s,t]` of cubic
//! structural-constant matrices satisfying `M[s,t] = M[s,tau] * M[tau,t]`
//! under a fixed multiplication rule.
//!
//! | constructor         | family                                    |
//! |---------------------|-------------------------------------------|
//! | [`flow_power`]      | `M[n,k] = Q^{*(k-n)}`, discrete           |
//! | [`flow_idempotent`] | `M[s,t] = X` with `X * X = X`             |
//! | [`flow_exp`]        | `M[s,t] = exp_mu((t-s) Q)`                |
//! | [`flow_invertible`] | `M[s,t] = A[s] * A[t]^-1`                 |
//! | [`flow_fg`]         | `M_ijk = f_i(s) g_k(t)`, Maksimov rule    |
//! | [`flow_gamma`]      | `M_ijr = gamma_ij(s) / g_r(t)`, `a0` rule |
//! | [`transport`]       | index relabeling by a permutation         |
//! | [`flow_product`]    | pointwise product of flows                |

mod exp;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use exp::{exp_mu, exp_mu_terms};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::mulrules::{
    check_power_associativity, inverse, AnalyzeOptions, BinaryOp, MulRule, Permutation,
    PowerAssocVerdict,
};
use crate::tensor::{CubicMatrix, FlatIndex, DEFAULT_TOL};

/// Default tolerance for the sampled constraint checks of the `f/g` and `gamma/g` families.
pub const DEFAULT_CHECK_TOL: f64 = 1e-9;

/// Default tolerance for the series truncation of `exp_mu`.
pub const DEFAULT_EXP_TOL: f64 = 1e-13;

/// `start, start + step, ..., end` (end included when it lies on the grid).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { start: 0.0, end: 10.0, step: 0.05 }
    }
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self> {
        let g = Self { start, end, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(Error::Grid("non-finite grid bounds".into()));
        }
        if self.step <= 0.0 || self.end < self.start {
            return Err(Error::Grid(format!(
                "need step > 0 and end >= start, got {}:{}:{}",
                self.start, self.end, self.step
            )));
        }
        if (self.end - self.start) / self.step > 1e7 {
            return Err(Error::Grid("grid has more than 10^7 points".into()));
        }
        Ok(())
    }

    /// Grid points `start + i * step`, computed without accumulation.
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// User-supplied scalar functions of time for the `f/g` and `gamma/g` families.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFamily {
    pub f: Vec<Expr>,
    pub g: Vec<Expr>,
    pub gamma: Vec<Vec<Expr>>,
    /// Times at which constraints are checked during construction.
    pub check_grid: TimeGrid,
}

impl ScalarFamily {
    /// Functions `f_i`, `g_i` for [`flow_fg`].
    pub fn fg(f: Vec<Expr>, g: Vec<Expr>) -> Self {
        Self { f, g, gamma: Vec::new(), check_grid: TimeGrid::default() }
    }

    /// Functions `g_i`, `gamma_ij` for [`flow_gamma`].
    pub fn gamma(g: Vec<Expr>, gamma: Vec<Vec<Expr>>) -> Self {
        Self { f: Vec::new(), g, gamma, check_grid: TimeGrid::default() }
    }

    /// Parse every function from source text.
    pub fn parse_fg(f: &[&str], g: &[&str]) -> Result<Self> {
        Ok(Self::fg(parse_all(f)?, parse_all(g)?))
    }

    pub fn parse_gamma(g: &[&str], gamma: &[Vec<&str>]) -> Result<Self> {
        let gamma = gamma.iter().map(|row| parse_all(row)).collect::<Result<Vec<_>>>()?;
        Ok(Self::gamma(parse_all(g)?, gamma))
    }

    pub fn with_check_grid(mut self, grid: TimeGrid) -> Self {
        self.check_grid = grid;
        self
    }
}

fn parse_all(srcs: &[&str]) -> Result<Vec<Expr>> {
    srcs.iter().map(|s| Expr::parse(s)).collect()
}

type MatrixFn = Arc<dyn Fn(f64) -> Result<CubicMatrix> + Send + Sync>;
type FlowFn = Arc<dyn Fn(f64, f64) -> Result<CubicMatrix> + Send + Sync>;

/// A one-parameter family `t -> A[t]` of cubic matrices.
#[derive(Clone)]
pub enum MatrixPath {
    /// `A[t] = sum c(t) E_ijk` over the listed terms.
    Terms { dim: usize, terms: Vec<(FlatIndex, Expr)> },
    Func { dim: usize, f: MatrixFn },
}

impl fmt::Debug for MatrixPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixPath::Terms { dim, terms } => {
                f.debug_struct("Terms").field("dim", dim).field("terms", terms).finish()
            }
            MatrixPath::Func { dim, .. } => f.debug_struct("Func").field("dim", dim).finish(),
        }
    }
}

impl MatrixPath {
    /// Terms `(i, j, k, coefficient expression)` with 1-based indices.
    pub fn terms(dim: usize, terms: &[(usize, usize, usize, &str)]) -> Result<Self> {
        let terms = terms
            .iter()
            .map(|&(i, j, k, src)| Ok((FlatIndex::compose(dim, i, j, k)?, Expr::parse(src)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixPath::Terms { dim, terms })
    }

    pub fn from_fn(dim: usize, f: impl Fn(f64) -> Result<CubicMatrix> + Send + Sync + 'static) -> Self {
        MatrixPath::Func { dim, f: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixPath::Terms { dim, .. } | MatrixPath::Func { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, t: f64) -> Result<CubicMatrix> {
        let out = match self {
            MatrixPath::Terms { dim, terms } => {
                let mut out = vec![0.0; dim * dim * dim];
                for (idx, e) in terms {
                    out[idx.offset()] += e.eval(t);
                }
                CubicMatrix::from_vec(*dim, out).map_err(|_| Error::NonFiniteAt(t))?
            }
            MatrixPath::Func { f, .. } => f(t)?,
        };
        if out.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: out.dim() });
        }
        Ok(out)
    }
}

/// Which construction produced a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    Transport,
    Product,
    Custom,
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyTag::A1 => "a1",
            FamilyTag::A2 => "a2",
            FamilyTag::A3 => "a3",
            FamilyTag::A4 => "a4",
            FamilyTag::A5 => "a5",
            FamilyTag::A6 => "a6",
            FamilyTag::Transport => "transport",
            FamilyTag::Product => "product",
            FamilyTag::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone)]
pub(crate) enum Source {
    Power { q: CubicMatrix },
    Idempotent { x: CubicMatrix, tol: f64 },
    Exp { q: CubicMatrix, tol: f64 },
    Invertible { path: MatrixPath, tol: f64, cache: Arc<Mutex<HashMap<u64, CubicMatrix>>> },
    Fg { fam: ScalarFamily, check_tol: f64 },
    Gamma { fam: ScalarFamily, check_tol: f64 },
    Transport { source: Box<FlowFamily>, perm: Permutation },
    Product { factors: Vec<FlowFamily> },
    Custom { f: FlowFn },
}

/// A family `(s, t) -> M[s,t]`, `0 <= s < t`, over a fixed multiplication rule.
#[derive(Clone)]
pub struct FlowFamily {
    rule: MulRule,
    tag: FamilyTag,
    note: Option<String>,
    homogeneous: bool,
    discrete: bool,
    pub(crate) source: Source,
}

impl fmt::Debug for FlowFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FlowFamily")
            .field("label", &self.label())
            .field("rule", &self.rule.kind_name())
            .field("dim", &self.rule.dim())
            .field("homogeneous", &self.homogeneous)
            .field("discrete", &self.discrete)
            .finish()
    }
}

impl FlowFamily {
    fn new(rule: MulRule, tag: FamilyTag, homogeneous: bool, discrete: bool, source: Source) -> Self {
        Self { rule, tag, note: None, homogeneous, discrete, source }
    }

    /// Wrap an arbitrary evaluator. No KCE property is assumed; use
    /// [`crate::verify::check_kce`] to test it.
    pub fn from_fn(
        rule: MulRule,
        homogeneous: bool,
        discrete: bool,
        f: impl Fn(f64, f64) -> Result<CubicMatrix> + Send + Sync + 'static,
    ) -> Self {
        Self::new(rule, FamilyTag::Custom, homogeneous, discrete, Source::Custom { f: Arc::new(f) })
    }

    pub fn rule(&self) -> &MulRule {
        &self.rule
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    /// Family tag plus any construction caveat, e.g. `a1 (power-associativity sampled)`.
    pub fn label(&self) -> String {
        match &self.note {
            Some(n) => format!("{} ({n})", self.tag),
            None => self.tag.to_string(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }

    pub fn is_discrete(&self) -> bool {
        self.discrete
    }

    pub fn dim(&self) -> usize {
        self.rule.dim()
    }

    /// Check that `(s, t)` lies in the flow's domain.
    pub fn check_domain(&self, s: f64, t: f64) -> Result<()> {
        let fail = |reason: &str| Err(Error::Domain { s, t, reason: reason.to_string() });
        if !(s.is_finite() && t.is_finite()) {
            return fail("non-finite time");
        }
        if s < 0.0 {
            return fail("s must be nonnegative");
        }
        if s >= t {
            return fail("s must be strictly less than t");
        }
        if self.discrete && (s.fract() != 0.0 || t.fract() != 0.0) {
            return fail("discrete family takes integer times");
        }
        Ok(())
    }

    /// `M[s,t]`.
    pub fn eval(&self, s: f64, t: f64) -> Result<CubicMatrix> {
        self.check_domain(s, t)?;
        self.eval_unchecked(s, t)
    }

    fn eval_unchecked(&self, s: f64, t: f64) -> Result<CubicMatrix> {
        let m = self.dim();
        match &self.source {
            Source::Power { q } => self.rule.power(q, (t - s) as usize),
            Source::Idempotent { x, .. } => Ok(x.clone()),
            Source::Exp { q, tol } => exp_mu(&self.rule, q, t - s, *tol),
            Source::Invertible { path, tol, cache } => {
                let a_s = path.eval(s)?;
                let inv_t = cached_inverse(&self.rule, path, *tol, cache, t)?;
                self.rule.multiply(&a_s, &inv_t)
            }
            Source::Fg { fam, .. } => {
                let fs: Vec<f64> = fam.f.iter().map(|e| e.eval(s)).collect();
                let gt: Vec<f64> = fam.g.iter().map(|e| e.eval(t)).collect();
                CubicMatrix::from_fn(m, |i, _, k| fs[i - 1] * gt[k - 1]).map_err(|_| Error::NonFiniteAt(t))
            }
            Source::Gamma { fam, .. } => {
                let gt: Vec<f64> = fam.g.iter().map(|e| e.eval(t)).collect();
                if let Some(r) = gt.iter().position(|v| *v == 0.0) {
                    return Err(Error::VanishingG { i: r + 1, t });
                }
                let gam: Vec<Vec<f64>> =
                    fam.gamma.iter().map(|row| row.iter().map(|e| e.eval(s)).collect()).collect();
                CubicMatrix::from_fn(m, |i, j, r| gam[i - 1][j - 1] / gt[r - 1])
                    .map_err(|_| Error::NonFiniteAt(t))
            }
            Source::Transport { source, perm } => {
                let inner = source.eval_unchecked(s, t)?;
                relabel(&inner, perm)
            }
            Source::Product { factors } => {
                let mut acc = factors[0].eval_unchecked(s, t)?;
                for f in &factors[1..] {
                    acc = self.rule.multiply(&acc, &f.eval_unchecked(s, t)?)?;
                }
                Ok(acc)
            }
            Source::Custom { f } => {
                let out = f(s, t)?;
                if out.dim() != m {
                    return Err(Error::DimMismatch { expected: m, found: out.dim() });
                }
                Ok(out)
            }
        }
    }
}

fn cached_inverse(
    rule: &MulRule,
    path: &MatrixPath,
    tol: f64,
    cache: &Mutex<HashMap<u64, CubicMatrix>>,
    t: f64,
) -> Result<CubicMatrix> {
    let key = t.to_bits();
    if let Some(hit) = cache.lock().expect("inverse cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    // solved outside the lock; concurrent fills store the same value
    let a_t = path.eval(t)?;
    let inv = match inverse(rule, &a_t, tol) {
        Ok(x) => x,
        Err(Error::NotInvertible) => return Err(Error::SingularAt(t)),
        Err(e) => return Err(e),
    };
    cache.lock().expect("inverse cache poisoned").entry(key).or_insert_with(|| inv.clone());
    Ok(inv)
}

/// `N_ijr = M_{pi(i) pi(j) pi(r)}`.
fn relabel(m: &CubicMatrix, perm: &Permutation) -> Result<CubicMatrix> {
    CubicMatrix::from_fn(m.dim(), |i, j, r| m.get(perm.apply(i), perm.apply(j), perm.apply(r)))
}

/// `M[n,k] = Q^{*(k-n)}`, a discrete homogeneous flow.
///
/// The rule must pass the sampled power-associativity test with default
/// [`AnalyzeOptions`]; the verdict is only a falsification test, so the label
/// carries the caveat unless the rule is known associative.
pub fn flow_power(rule: &MulRule, q: &CubicMatrix) -> Result<FlowFamily> {
    flow_power_with(rule, q, &AnalyzeOptions::default())
}

pub fn flow_power_with(rule: &MulRule, q: &CubicMatrix, opts: &AnalyzeOptions) -> Result<FlowFamily> {
    check_dim(rule, q)?;
    let note = if rule.is_associative() {
        None
    } else {
        match check_power_associativity(rule, opts)? {
            PowerAssocVerdict::Pass { .. } => Some("power-associativity sampled".to_string()),
            PowerAssocVerdict::Fail { n, k, residual, .. } => {
                return Err(Error::PowerAssociativity { n, k, residual })
            }
        }
    };
    let mut flow = FlowFamily::new(rule.clone(), FamilyTag::A1, true, true, Source::Power { q: q.clone() });
    flow.note = note;
    Ok(flow)
}

/// `M[s,t] = X` for an idempotent `X`.
pub fn flow_idempotent(rule: &MulRule, x: &CubicMatrix, tol: f64) -> Result<FlowFamily> {
    check_dim(rule, x)?;
    let residual = rule.multiply(x, x)?.dist_l1(x)?;
    if residual > tol {
        return Err(Error::NotIdempotent(residual));
    }
    Ok(FlowFamily::new(rule.clone(), FamilyTag::A2, true, false, Source::Idempotent { x: x.clone(), tol }))
}

/// `M[s,t] = exp_mu((t - s) Q)`; the rule must be unital and associative.
pub fn flow_exp(rule: &MulRule, q: &CubicMatrix, tol: f64) -> Result<FlowFamily> {
    check_dim(rule, q)?;
    if rule.unit().is_none() {
        return Err(Error::NotUnital);
    }
    if !rule.is_associative() {
        return Err(Error::NotAssociative);
    }
    Ok(FlowFamily::new(rule.clone(), FamilyTag::A3, true, false, Source::Exp { q: q.clone(), tol }))
}

/// `M[s,t] = A[s] * A[t]^-1`; invertibility is checked lazily per evaluated `t`
/// and inverses are cached by the exact bit pattern of `t`.
pub fn flow_invertible(rule: &MulRule, path: MatrixPath, tol: f64) -> Result<FlowFamily> {
    if path.dim() != rule.dim() {
        return Err(Error::DimMismatch { expected: rule.dim(), found: path.dim() });
    }
    if rule.unit().is_none() {
        return Err(Error::NotUnital);
    }
    if !rule.is_associative() {
        return Err(Error::NotAssociative);
    }
    let source = Source::Invertible { path, tol, cache: Arc::default() };
    Ok(FlowFamily::new(rule.clone(), FamilyTag::A4, false, false, source))
}

pub fn is_uniformly_distributed(op: &BinaryOp) -> bool {
    op.is_uniformly_distributed()
}

/// `M_ijk[s,t] = f_i(s) g_k(t)` over the Maksimov rule of a uniformly
/// distributed `op`, given `sum_k f_k(t) g_k(t) = 1/m` on the check grid.
pub fn flow_fg(op: &BinaryOp, fam: ScalarFamily, check_tol: f64) -> Result<FlowFamily> {
    let m = op.dim();
    if !op.is_uniformly_distributed() {
        return Err(Error::NotUniformlyDistributed);
    }
    if fam.f.len() != m || fam.g.len() != m {
        return Err(Error::Config(format!(
            "f and g need {m} functions each, got {} and {}",
            fam.f.len(),
            fam.g.len()
        )));
    }
    fam.check_grid.validate()?;
    let target = 1.0 / m as f64;
    for t in fam.check_grid.points() {
        let sum: f64 = fam.f.iter().zip(&fam.g).map(|(f, g)| f.eval(t) * g.eval(t)).sum();
        let residual = (sum - target).abs();
        if !(residual <= check_tol) {
            return Err(Error::FgConstraint { t, residual });
        }
    }
    let rule = MulRule::maksimov(op.clone());
    Ok(FlowFamily::new(rule, FamilyTag::A5, false, false, Source::Fg { fam, check_tol }))
}

/// `M_ijr[s,t] = gamma_ij(s) / g_r(t)` over the `a0` rule, given `g_i != 0` and
/// `m sum_j gamma_ij(s) = g_i(s)` on the check grid.
///
/// The second constraint is checked relative to `max(1, |g_i(s)|)`.
pub fn flow_gamma(fam: ScalarFamily, check_tol: f64) -> Result<FlowFamily> {
    let m = fam.g.len();
    if m == 0 {
        return Err(Error::ZeroDimension);
    }
    if fam.gamma.len() != m || fam.gamma.iter().any(|row| row.len() != m) {
        return Err(Error::Config(format!("gamma must be a {m} x {m} table of functions")));
    }
    fam.check_grid.validate()?;
    for s in fam.check_grid.points() {
        for i in 0..m {
            let gi = fam.g[i].eval(s);
            if gi == 0.0 || !gi.is_finite() {
                return Err(Error::VanishingG { i: i + 1, t: s });
            }
            let sum: f64 = fam.gamma[i].iter().map(|e| e.eval(s)).sum();
            let residual = (m as f64 * sum - gi).abs();
            if !(residual <= check_tol * gi.abs().max(1.0)) {
                return Err(Error::GammaConstraint { i: i + 1, s, residual });
            }
        }
    }
    let rule = MulRule::a0(m)?;
    Ok(FlowFamily::new(rule, FamilyTag::A6, false, false, Source::Gamma { fam, check_tol }))
}

/// Carry a flow over Maksimov(`b`) to Maksimov(`a`) along `pi`.
///
/// Requires `a(j, n) = pi^-1(b(pi(j), pi(n)))` for all `j, n`; the transported
/// matrices are `N_ijr[s,t] = M_{pi(i) pi(j) pi(r)}[s,t]`.
pub fn transport(source: &FlowFamily, perm: &Permutation, a: &BinaryOp) -> Result<FlowFamily> {
    let b = source.rule().maksimov_op().ok_or(Error::NotMaksimov)?;
    let m = b.dim();
    if perm.len() != m {
        return Err(Error::DimMismatch { expected: m, found: perm.len() });
    }
    if a.dim() != m {
        return Err(Error::DimMismatch { expected: m, found: a.dim() });
    }
    for j in 1..=m {
        for n in 1..=m {
            if a.apply(j, n) != perm.inverse_apply(b.apply(perm.apply(j), perm.apply(n))) {
                return Err(Error::PermutationCompatibility { j, n });
            }
        }
    }
    let src = Source::Transport { source: Box::new(source.clone()), perm: perm.clone() };
    Ok(FlowFamily::new(
        MulRule::maksimov(a.clone()),
        FamilyTag::Transport,
        source.is_homogeneous(),
        source.is_discrete(),
        src,
    ))
}

/// Pointwise product `B[s,t] = M_1[s,t] * ... * M_k[s,t]` (left-nested); the
/// rule must be commutative and associative and shared by every factor.
pub fn flow_product(rule: &MulRule, factors: &[FlowFamily]) -> Result<FlowFamily> {
    if factors.is_empty() {
        return Err(Error::EmptyFactors);
    }
    if factors.iter().any(|f| f.rule() != rule) {
        return Err(Error::RuleMismatch);
    }
    if !rule.is_associative() {
        return Err(Error::NotAssociative);
    }
    if !rule.is_commutative() {
        return Err(Error::NotCommutative);
    }
    if factors.len() == 1 {
        return Ok(factors[0].clone());
    }
    let homogeneous = factors.iter().all(|f| f.is_homogeneous());
    let discrete = factors.iter().any(|f| f.is_discrete());
    let src = Source::Product { factors: factors.to_vec() };
    Ok(FlowFamily::new(rule.clone(), FamilyTag::Product, homogeneous, discrete, src))
}

fn check_dim(rule: &MulRule, x: &CubicMatrix) -> Result<()> {
    if x.dim() != rule.dim() {
        return Err(Error::DimMismatch { expected: rule.dim(), found: x.dim() });
    }
    Ok(())
}

/// Default idempotency tolerance for [`flow_idempotent`].
pub const DEFAULT_IDEMPOTENT_TOL: f64 = DEFAULT_TOL;

#[cfg(test)]
mod tests;
