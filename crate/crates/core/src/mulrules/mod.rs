//! Multiplication rules between cubic matrices.
//!
//! A rule fixes a bilinear product on the `m^3`-dimensional space of cubic
//! matrices. Four kinds are supported:
//!
//! * [`RuleKind::GeneralMu`]: an explicit sparse structure tensor
//!   `E_p * E_q = sum_w C^w_{p,q} E_w` over flat basis indices.
//! * [`RuleKind::Maksimov`]: `E_ijk * E_lnr = delta_kl E_{i a(j,n) r}` for an
//!   associative operation `a` on `{1..m}`.
//! * [`RuleKind::A0`]: the Maksimov rule of `a(j, n) = j`, with its own
//!   `O(m^4)` kernel `c_ijr = sum_k a_ijk (sum_n b_knr)`.
//! * [`RuleKind::Group`]: `E_p * E_q = E_{alpha(p,q)}` for a group on the
//!   flat index set.
//!
//! Derived properties (associativity, commutativity, unit) are computed on
//! first use and cached inside the rule.

mod analysis;
mod binop;
mod group;
mod linalg;

use std::sync::{Arc, OnceLock};

pub use analysis::{
    analyze, check_power_associativity, find_idempotents, inverse, mul_norm_constant, AlgebraReport, AnalyzeOptions,
    IdempotentOptions, PowerAssocVerdict, DEFAULT_ANALYZE_GUARD,
};
pub use binop::{BinaryOp, Permutation};
pub use group::GroupTable;

use crate::error::{Error, Result};
use crate::tensor::CubicMatrix;

/// One stored coefficient `C^{out}_{left,right}` of a general structure tensor
/// (0-based flat indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEntry {
    pub left: usize,
    pub right: usize,
    pub out: usize,
    pub coeff: f64,
}

/// Sparse structure tensor, sorted by `(left, right, out)` with unique keys.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    entries: Vec<MuEntry>,
}

impl StructureTensor {
    /// Entries use 0-based flat indices in `0..m^3`.
    pub fn new(dim: usize, mut entries: Vec<MuEntry>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let n = dim * dim * dim;
        for e in &entries {
            if e.left >= n || e.right >= n || e.out >= n {
                return Err(Error::InvalidStructure(format!(
                    "flat index out of range in ({}, {}, {})",
                    e.left + 1,
                    e.right + 1,
                    e.out + 1
                )));
            }
            if !e.coeff.is_finite() {
                return Err(Error::InvalidStructure(format!(
                    "non-finite coefficient at ({}, {}, {})",
                    e.left + 1,
                    e.right + 1,
                    e.out + 1
                )));
            }
        }
        entries.sort_by_key(|e| (e.left, e.right, e.out));
        if let Some(w) = entries.windows(2).find(|w| {
            (w[0].left, w[0].right, w[0].out) == (w[1].left, w[1].right, w[1].out)
        }) {
            return Err(Error::InvalidStructure(format!(
                "duplicate key ({}, {}, {})",
                w[0].left + 1,
                w[0].right + 1,
                w[0].out + 1
            )));
        }
        Ok(Self { dim, entries })
    }

    /// Entries as `(ijk, lnr, uvw, coeff)` with 1-based flat indices.
    pub fn from_flat_1based(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let conv = entries
            .iter()
            .map(|&(l, r, o, c)| {
                if l == 0 || r == 0 || o == 0 {
                    return Err(Error::InvalidStructure("flat indices are 1-based".into()));
                }
                Ok(MuEntry { left: l - 1, right: r - 1, out: o - 1, coeff: c })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, conv)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[MuEntry] {
        &self.entries
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RuleKind {
    GeneralMu(StructureTensor),
    Maksimov(BinaryOp),
    A0,
    Group(GroupTable),
}

/// Structure constants over the flat basis: `products[p * n + q]` lists the
/// nonzero `(w, C^w_{p,q})` of `E_p * E_q`.
#[derive(Debug)]
pub(crate) struct Structure {
    pub n: usize,
    pub products: Vec<Vec<(usize, f64)>>,
}

impl Structure {
    #[inline]
    pub fn product(&self, p: usize, q: usize) -> &[(usize, f64)] {
        &self.products[p * self.n + q]
    }
}

#[derive(Debug, Default)]
struct RuleCache {
    structure: OnceLock<Arc<Structure>>,
    associative: OnceLock<bool>,
    commutative: OnceLock<bool>,
    unit: OnceLock<Option<CubicMatrix>>,
}

/// A multiplication rule on `m x m x m` cubic matrices.
#[derive(Debug, Clone)]
pub struct MulRule {
    dim: usize,
    kind: RuleKind,
    cache: Arc<RuleCache>,
}

impl PartialEq for MulRule {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind
    }
}

/// Tolerance used for the cached unit search.
pub(crate) const UNIT_TOL: f64 = 1e-9;

impl MulRule {
    fn with_kind(dim: usize, kind: RuleKind) -> Self {
        Self { dim, kind, cache: Arc::default() }
    }

    pub fn general(tensor: StructureTensor) -> Self {
        Self::with_kind(tensor.dim(), RuleKind::GeneralMu(tensor))
    }

    pub fn maksimov(op: BinaryOp) -> Self {
        Self::with_kind(op.dim(), RuleKind::Maksimov(op))
    }

    pub fn a0(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self::with_kind(dim, RuleKind::A0))
    }

    /// Group-induced rule; the group order must be `m^3`.
    pub fn group(dim: usize, group: GroupTable) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if group.order() != dim * dim * dim {
            return Err(Error::InvalidGroup(format!(
                "group order {} does not equal m^3 = {}",
                group.order(),
                dim * dim * dim
            )));
        }
        Ok(Self::with_kind(dim, RuleKind::Group(group)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    /// The binary operation behind a Maksimov-type rule (`A0` yields `a(j, n) = j`).
    pub fn maksimov_op(&self) -> Option<BinaryOp> {
        match &self.kind {
            RuleKind::Maksimov(op) => Some(op.clone()),
            RuleKind::A0 => BinaryOp::left_projection(self.dim).ok(),
            _ => None,
        }
    }

    /// Short tag for reports.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            RuleKind::GeneralMu(_) => "general",
            RuleKind::Maksimov(_) => "maksimov",
            RuleKind::A0 => "a0",
            RuleKind::Group(_) => "group",
        }
    }

    /// `A * B` under this rule.
    pub fn multiply(&self, a: &CubicMatrix, b: &CubicMatrix) -> Result<CubicMatrix> {
        for x in [a, b] {
            if x.dim() != self.dim {
                return Err(Error::DimMismatch { expected: self.dim, found: x.dim() });
            }
        }
        let m = self.dim;
        let av = a.as_slice();
        let bv = b.as_slice();
        let mut out = vec![0.0; m * m * m];
        match &self.kind {
            RuleKind::Maksimov(op) => maksimov_kernel(m, op, av, bv, &mut out),
            RuleKind::A0 => a0_kernel(m, av, bv, &mut out),
            RuleKind::Group(g) => {
                let n = g.order();
                for p in 0..n {
                    let ap = av[p];
                    if ap == 0.0 {
                        continue;
                    }
                    for q in 0..n {
                        out[g.apply0(p, q)] += ap * bv[q];
                    }
                }
            }
            RuleKind::GeneralMu(t) => {
                for e in t.entries() {
                    out[e.out] += av[e.left] * bv[e.right] * e.coeff;
                }
            }
        }
        Ok(CubicMatrix::from_raw(m, out))
    }

    /// Structure constants over the flat basis, materialized once.
    pub(crate) fn structure(&self) -> Arc<Structure> {
        self.cache
            .structure
            .get_or_init(|| Arc::new(self.build_structure()))
            .clone()
    }

    fn build_structure(&self) -> Structure {
        let m = self.dim;
        let n = m * m * m;
        let mut products = vec![Vec::new(); n * n];
        match &self.kind {
            RuleKind::GeneralMu(t) => {
                for e in t.entries() {
                    if e.coeff != 0.0 {
                        products[e.left * n + e.right].push((e.out, e.coeff));
                    }
                }
            }
            RuleKind::Maksimov(_) | RuleKind::A0 => {
                let op = self.maksimov_op().expect("maksimov-type rule");
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let p = (i * m + j) * m + k;
                            // only l == k survives the Kronecker delta
                            for nn in 0..m {
                                for r in 0..m {
                                    let q = (k * m + nn) * m + r;
                                    let w = (i * m + op.apply0(j, nn)) * m + r;
                                    products[p * n + q].push((w, 1.0));
                                }
                            }
                        }
                    }
                }
            }
            RuleKind::Group(g) => {
                for p in 0..n {
                    for q in 0..n {
                        products[p * n + q].push((g.apply0(p, q), 1.0));
                    }
                }
            }
        }
        Structure { n, products }
    }

    /// The equivalent [`RuleKind::GeneralMu`] rule.
    pub fn to_general(&self) -> MulRule {
        let s = self.structure();
        let n = s.n;
        let mut entries = Vec::new();
        for p in 0..n {
            for q in 0..n {
                for &(w, c) in s.product(p, q) {
                    entries.push(MuEntry { left: p, right: q, out: w, coeff: c });
                }
            }
        }
        let tensor =
            StructureTensor::new(self.dim, entries).expect("materialized structure is valid");
        MulRule::general(tensor)
    }

    /// Whether the rule is associative.
    ///
    /// Maksimov, `a0` and group rules are associative by construction; a general
    /// structure tensor is checked exhaustively (within `1e-9`) when
    /// `m <= DEFAULT_ANALYZE_GUARD` and reported non-associative otherwise.
    pub fn is_associative(&self) -> bool {
        *self.cache.associative.get_or_init(|| match &self.kind {
            RuleKind::Maksimov(_) | RuleKind::A0 | RuleKind::Group(_) => true,
            RuleKind::GeneralMu(_) => {
                self.dim <= DEFAULT_ANALYZE_GUARD
                    && analysis::associativity_witness(&self.structure(), UNIT_TOL).is_none()
            }
        })
    }

    /// Exhaustive commutativity check on the structure constants.
    pub fn is_commutative(&self) -> bool {
        *self.cache.commutative.get_or_init(|| match &self.kind {
            RuleKind::Group(g) => g.is_commutative(),
            _ => analysis::commutativity_witness(&self.structure(), UNIT_TOL).is_none(),
        })
    }

    /// The unit matrix, when the rule is unital.
    pub fn unit(&self) -> Option<&CubicMatrix> {
        self.cache
            .unit
            .get_or_init(|| analysis::solve_unit(self, UNIT_TOL))
            .as_ref()
    }

    pub fn is_unital(&self) -> bool {
        self.unit().is_some()
    }

    /// `Q^{*n}`: left-nested for general rules, repeated squaring for associative ones.
    /// `n = 0` yields the unit when one exists.
    pub fn power(&self, q: &CubicMatrix, n: usize) -> Result<CubicMatrix> {
        if q.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: q.dim() });
        }
        if n == 0 {
            return self.unit().cloned().ok_or(Error::ZeroPowerWithoutUnit);
        }
        if self.is_associative() {
            let mut base = q.clone();
            let mut acc: Option<CubicMatrix> = None;
            let mut e = n;
            loop {
                if e & 1 == 1 {
                    acc = Some(match acc {
                        None => base.clone(),
                        Some(a) => self.multiply(&a, &base)?,
                    });
                }
                e >>= 1;
                if e == 0 {
                    break;
                }
                base = self.multiply(&base, &base)?;
            }
            Ok(acc.expect("n >= 1"))
        } else {
            self.power_left_fold(q, n)
        }
    }

    /// `((Q * Q) * Q) * ... * Q` with `n` factors.
    pub fn power_left_fold(&self, q: &CubicMatrix, n: usize) -> Result<CubicMatrix> {
        if n == 0 {
            return self.unit().cloned().ok_or(Error::ZeroPowerWithoutUnit);
        }
        let mut acc = q.clone();
        for _ in 1..n {
            acc = self.multiply(&acc, q)?;
        }
        Ok(acc)
    }
}

/// `c_{i a(l,n) r} += sum_k a_ilk b_knr`
fn maksimov_kernel(m: usize, op: &BinaryOp, a: &[f64], b: &[f64], out: &mut [f64]) {
    let m2 = m * m;
    for i in 0..m {
        for l in 0..m {
            for k in 0..m {
                let ailk = a[i * m2 + l * m + k];
                if ailk == 0.0 {
                    continue;
                }
                for n in 0..m {
                    let row = &b[k * m2 + n * m..k * m2 + n * m + m];
                    let base = i * m2 + op.apply0(l, n) * m;
                    for (r, &bknr) in row.iter().enumerate() {
                        out[base + r] += ailk * bknr;
                    }
                }
            }
        }
    }
}

/// `c_ijr = sum_k a_ijk s_kr` with `s_kr = sum_n b_knr`.
fn a0_kernel(m: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    let m2 = m * m;
    let mut s = vec![0.0; m2];
    for k in 0..m {
        for n in 0..m {
            for r in 0..m {
                s[k * m + r] += b[k * m2 + n * m + r];
            }
        }
    }
    for ij in 0..m2 {
        for k in 0..m {
            let aijk = a[ij * m + k];
            if aijk == 0.0 {
                continue;
            }
            for r in 0..m {
                out[ij * m + r] += aijk * s[k * m + r];
            }
        }
    }
}
