//! TOML documents describing multiplication rules and flows.
//!
//! A rule document:
//!
//! ```toml
//! schema = 1
//! kind = "maksimov"          # maksimov | a0 | group | general
//! dim = 2
//! op_table = [[1, 2], [2, 1]]   # or a preset: "left", "right", "cyclic", "const:1"
//! ```
//!
//! Group rules take an explicit 1-based `m^3 x m^3` table `group = [[...], ...]`
//! with optional `identity`, or a preset `group = "abelian:2,2,2"` (also
//! `"cyclic"`, `"dihedral"`). General rules list
//! `entries = [[ijk, lnr, uvw, coeff], ...]` with 1-based flat indices
//! `ijk = (i-1) m^2 + (j-1) m + k`.
//!
//! A flow document names a `family` and carries the rule inline (`[rule]`) or by
//! path (`rule_file`, relative to the document), plus the family payload:
//!
//! | family      | payload                                           |
//! |-------------|---------------------------------------------------|
//! | `a1`, `a3`  | `Q` (dense list of `m^3` values or `[i,j,k,v]` entries), `exp_tol` |
//! | `a2`        | `X`, `idempotent_tol`                             |
//! | `a4`        | `path = [[i,j,k,"expr"], ...]`, `inverse_tol`     |
//! | `a5`        | `f`, `g`, `check_tol`, `check_grid`               |
//! | `a6`        | `g`, `gamma`, `check_tol`, `check_grid`           |
//! | `transport` | `perm`, `target_op`, `[source]`                   |
//! | `product`   | `[[factors]]`                                     |
//!
//! Nested `source` and `factors` documents inherit the parent rule when they
//! omit one. `time_grid = {start, end, step}` sets the evolution grid.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::flows::{
    self, FlowFamily, MatrixPath, ScalarFamily, Source, TimeGrid, DEFAULT_CHECK_TOL,
    DEFAULT_EXP_TOL, DEFAULT_IDEMPOTENT_TOL,
};
use crate::mulrules::{BinaryOp, GroupTable, MulRule, Permutation, RuleKind, StructureTensor};
use crate::tensor::{CubicMatrix, FlatIndex};

pub const DEFAULT_INVERSE_TOL: f64 = 1e-10;

/// Current document version.
pub const SCHEMA_VERSION: u32 = 1;

fn check_schema(v: Option<u32>) -> Result<()> {
    match v {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(other) => Err(Error::Config(format!("unsupported schema version {other}, expected {SCHEMA_VERSION}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpSpec {
    Table(Vec<Vec<usize>>),
    Preset(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Table(Vec<Vec<usize>>),
    Preset(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub kind: String,
    pub dim: usize,
    #[serde(default, alias = "op", skip_serializing_if = "Option::is_none")]
    pub op_table: Option<OpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<(usize, usize, usize, f64)>>,
}

impl RuleDoc {
    pub fn build(&self) -> Result<MulRule> {
        check_schema(self.schema)?;
        let m = self.dim;
        if m == 0 {
            return Err(Error::ZeroDimension);
        }
        let unexpected = |field: &str| {
            Err(Error::Config(format!("field `{field}` does not apply to rule kind `{}`", self.kind)))
        };
        match self.kind.as_str() {
            "maksimov" => {
                if self.group.is_some() || self.entries.is_some() {
                    return unexpected("group/entries");
                }
                let op = self.op_table.as_ref().ok_or_else(|| Error::Config("maksimov rule needs `op_table`".into()))?;
                Ok(MulRule::maksimov(build_op(m, op)?))
            }
            "a0" => {
                if self.op_table.is_some() || self.group.is_some() || self.entries.is_some() {
                    return unexpected("op_table/group/entries");
                }
                MulRule::a0(m)
            }
            "group" => {
                if self.op_table.is_some() || self.entries.is_some() {
                    return unexpected("op_table/entries");
                }
                let n = m * m * m;
                let g = match self.group.as_ref() {
                    None => return Err(Error::Config("group rule needs `group`".into())),
                    Some(GroupSpec::Table(rows)) => GroupTable::new(rows, self.identity)?,
                    Some(GroupSpec::Preset(name)) => group_preset(name, n)?,
                };
                MulRule::group(m, g)
            }
            "general" => {
                if self.op_table.is_some() || self.group.is_some() {
                    return unexpected("op_table/group");
                }
                let entries = self.entries.as_ref().ok_or_else(|| Error::Config("general rule needs `entries`".into()))?;
                Ok(MulRule::general(StructureTensor::from_flat_1based(m, entries)?))
            }
            other => Err(Error::Config(format!("unknown rule kind `{other}`"))),
        }
    }

    pub fn from_rule(rule: &MulRule) -> Self {
        let m = rule.dim();
        let mut doc = RuleDoc {
            schema: Some(SCHEMA_VERSION),
            kind: rule.kind_name().into(),
            dim: m,
            op_table: None,
            group: None,
            identity: None,
            entries: None,
        };
        match rule.kind() {
            RuleKind::Maksimov(op) => doc.op_table = Some(OpSpec::Table(op.rows())),
            RuleKind::A0 => {}
            RuleKind::Group(g) => {
                doc.group = Some(GroupSpec::Table(g.rows()));
                doc.identity = Some(g.identity());
            }
            RuleKind::GeneralMu(t) => {
                doc.entries = Some(t.entries().iter().map(|e| (e.left + 1, e.right + 1, e.out + 1, e.coeff)).collect());
            }
        }
        doc
    }
}

pub fn build_op(m: usize, spec: &OpSpec) -> Result<BinaryOp> {
    let op = match spec {
        OpSpec::Table(rows) => BinaryOp::new(rows)?,
        OpSpec::Preset(name) => match name.as_str() {
            "left" => BinaryOp::left_projection(m)?,
            "right" => BinaryOp::right_projection(m)?,
            "cyclic" => BinaryOp::from_fn(m, |j, n| (j + n - 2) % m + 1)?,
            other => match other.strip_prefix("const:").map(str::parse::<usize>) {
                Some(Ok(c)) => BinaryOp::constant(m, c)?,
                _ => return Err(Error::Config(format!("unknown operation preset `{other}`"))),
            },
        },
    };
    if op.dim() != m {
        return Err(Error::DimMismatch { expected: m, found: op.dim() });
    }
    Ok(op)
}

fn group_preset(name: &str, n: usize) -> Result<GroupTable> {
    let g = match name.split_once(':') {
        Some(("abelian", orders)) => {
            let orders = orders
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Config(format!("bad group preset `{name}`")))?;
            GroupTable::abelian(&orders)?
        }
        None if name == "cyclic" => GroupTable::cyclic(n)?,
        None if name == "dihedral" => {
            if n % 2 != 0 {
                return Err(Error::Config(format!("dihedral group needs even order, m^3 = {n}")));
            }
            GroupTable::dihedral(n / 2)?
        }
        _ => return Err(Error::Config(format!("unknown group preset `{name}`"))),
    };
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixDoc {
    Dense(Vec<f64>),
    Sparse(Vec<(usize, usize, usize, f64)>),
}

impl MatrixDoc {
    pub fn build(&self, m: usize) -> Result<CubicMatrix> {
        match self {
            MatrixDoc::Dense(v) => CubicMatrix::from_vec(m, v.clone()),
            MatrixDoc::Sparse(entries) => {
                let mut out = CubicMatrix::zero(m)?;
                for &(i, j, k, v) in entries {
                    FlatIndex::compose(m, i, j, k)?;
                    let cur = out.get(i, j, k);
                    out.set(i, j, k, cur + v)?;
                }
                if !out.is_finite() {
                    return Err(Error::Config("non-finite matrix entry".into()));
                }
                Ok(out)
            }
        }
    }

    /// Sparse form listing the nonzero entries.
    pub fn from_matrix(x: &CubicMatrix) -> Self {
        MatrixDoc::Sparse(
            x.iter_indexed()
                .filter(|(_, v)| *v != 0.0)
                .map(|(idx, v)| {
                    let (i, j, k) = idx.decompose();
                    (i, j, k, v)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_file: Option<PathBuf>,
    #[serde(default, rename = "Q", alias = "q", skip_serializing_if = "Option::is_none")]
    pub q: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_tol: Option<f64>,
    #[serde(default, rename = "X", alias = "x", skip_serializing_if = "Option::is_none")]
    pub x: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub idempotent_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<(usize, usize, usize, Expr)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Expr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Expr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<Vec<Expr>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_grid: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_op: Option<OpSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<FlowDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FlowDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGrid>,
}

impl FlowDoc {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Build the flow; `base_dir` resolves `rule_file` paths.
    pub fn build(&self, base_dir: &Path) -> Result<FlowFamily> {
        self.build_inner(base_dir, None)
    }

    fn resolve_rule(&self, base_dir: &Path, inherited: Option<&MulRule>) -> Result<Option<MulRule>> {
        match (&self.rule, &self.rule_file) {
            (Some(_), Some(_)) => Err(Error::Config("give either `rule` or `rule_file`, not both".into())),
            (Some(doc), None) => doc.build().map(Some),
            (None, Some(p)) => load_rule(&base_dir.join(p)).map(Some),
            (None, None) => Ok(inherited.cloned()),
        }
    }

    fn build_inner(&self, base_dir: &Path, inherited: Option<&MulRule>) -> Result<FlowFamily> {
        check_schema(self.schema)?;
        let rule = self.resolve_rule(base_dir, inherited)?;
        let need_rule = || rule.clone().ok_or_else(|| Error::Config(format!("family `{}` needs a rule", self.family)));
        let need = |name: &str| Error::Config(format!("family `{}` needs `{name}`", self.family));
        match self.family.as_str() {
            "a1" => {
                let rule = need_rule()?;
                let q = self.q.as_ref().ok_or_else(|| need("q"))?.build(rule.dim())?;
                flows::flow_power(&rule, &q)
            }
            "a2" => {
                let rule = need_rule()?;
                let x = self.x.as_ref().ok_or_else(|| need("x"))?.build(rule.dim())?;
                flows::flow_idempotent(&rule, &x, self.idempotent_tol.unwrap_or(DEFAULT_IDEMPOTENT_TOL))
            }
            "a3" => {
                let rule = need_rule()?;
                let q = self.q.as_ref().ok_or_else(|| need("q"))?.build(rule.dim())?;
                flows::flow_exp(&rule, &q, self.exp_tol.unwrap_or(DEFAULT_EXP_TOL))
            }
            "a4" => {
                let rule = need_rule()?;
                let m = rule.dim();
                let terms = self
                    .path
                    .as_ref()
                    .ok_or_else(|| need("path"))?
                    .iter()
                    .map(|(i, j, k, e)| Ok((FlatIndex::compose(m, *i, *j, *k)?, e.clone())))
                    .collect::<Result<Vec<_>>>()?;
                let path = MatrixPath::Terms { dim: m, terms };
                flows::flow_invertible(&rule, path, self.inverse_tol.unwrap_or(DEFAULT_INVERSE_TOL))
            }
            "a5" => {
                let op = match rule.as_ref().map(|r| (r.kind(), r)) {
                    Some((RuleKind::Maksimov(op), _)) => op.clone(),
                    Some((_, r)) => {
                        return Err(Error::Config(format!("a5 needs a maksimov rule, got `{}`", r.kind_name())))
                    }
                    None => return Err(need("rule")),
                };
                let fam = ScalarFamily::fg(
                    self.f.clone().ok_or_else(|| need("f"))?,
                    self.g.clone().ok_or_else(|| need("g"))?,
                );
                let fam = fam.with_check_grid(self.check_grid.unwrap_or_default());
                flows::flow_fg(&op, fam, self.check_tol.unwrap_or(DEFAULT_CHECK_TOL))
            }
            "a6" => {
                if let Some(r) = &rule {
                    if !matches!(r.kind(), RuleKind::A0) {
                        return Err(Error::Config(format!("a6 is fixed to the a0 rule, got `{}`", r.kind_name())));
                    }
                }
                let fam = ScalarFamily::gamma(
                    self.g.clone().ok_or_else(|| need("g"))?,
                    self.gamma.clone().ok_or_else(|| need("gamma"))?,
                );
                let fam = fam.with_check_grid(self.check_grid.unwrap_or_default());
                let flow = flows::flow_gamma(fam, self.check_tol.unwrap_or(DEFAULT_CHECK_TOL))?;
                if let Some(r) = &rule {
                    if r.dim() != flow.dim() {
                        return Err(Error::DimMismatch { expected: r.dim(), found: flow.dim() });
                    }
                }
                Ok(flow)
            }
            "transport" => {
                let source = self.source.as_ref().ok_or_else(|| need("source"))?.build_inner(base_dir, None)?;
                let perm = Permutation::new(self.perm.as_ref().ok_or_else(|| need("perm"))?)?;
                let m = source.dim();
                let a = match (&self.target_op, &rule) {
                    (Some(spec), _) => build_op(m, spec)?,
                    (None, Some(r)) => r.maksimov_op().ok_or(Error::NotMaksimov)?,
                    (None, None) => return Err(need("target_op")),
                };
                flows::transport(&source, &perm, &a)
            }
            "product" => {
                let rule = need_rule()?;
                let factors = self
                    .factors
                    .as_ref()
                    .ok_or_else(|| need("factors"))?
                    .iter()
                    .map(|d| d.build_inner(base_dir, Some(&rule)))
                    .collect::<Result<Vec<_>>>()?;
                flows::flow_product(&rule, &factors)
            }
            other => Err(Error::Config(format!("unknown family `{other}`"))),
        }
    }

    /// The document that rebuilds `flow`. Custom flows and function-backed
    /// paths have no textual form.
    pub fn from_flow(flow: &FlowFamily) -> Result<Self> {
        let mut doc = Self::from_flow_inner(flow)?;
        doc.schema = Some(SCHEMA_VERSION);
        Ok(doc)
    }

    fn from_flow_inner(flow: &FlowFamily) -> Result<Self> {
        let mut doc = FlowDoc { family: flow.tag().to_string(), ..Default::default() };
        match &flow.source {
            Source::Power { q } => {
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.q = Some(MatrixDoc::from_matrix(q));
            }
            Source::Idempotent { x, tol } => {
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.x = Some(MatrixDoc::from_matrix(x));
                doc.idempotent_tol = Some(*tol);
            }
            Source::Exp { q, tol } => {
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.q = Some(MatrixDoc::from_matrix(q));
                doc.exp_tol = Some(*tol);
            }
            Source::Invertible { path, tol, .. } => {
                let MatrixPath::Terms { terms, .. } = path else {
                    return Err(Error::NotSerializable("function-backed matrix path".into()));
                };
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.path = Some(
                    terms
                        .iter()
                        .map(|(idx, e)| {
                            let (i, j, k) = idx.decompose();
                            (i, j, k, e.clone())
                        })
                        .collect(),
                );
                doc.inverse_tol = Some(*tol);
            }
            Source::Fg { fam, check_tol } => {
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.f = Some(fam.f.clone());
                doc.g = Some(fam.g.clone());
                doc.check_tol = Some(*check_tol);
                doc.check_grid = Some(fam.check_grid);
            }
            Source::Gamma { fam, check_tol } => {
                doc.g = Some(fam.g.clone());
                doc.gamma = Some(fam.gamma.clone());
                doc.check_tol = Some(*check_tol);
                doc.check_grid = Some(fam.check_grid);
            }
            Source::Transport { source, perm } => {
                doc.source = Some(Box::new(Self::from_flow_inner(source)?));
                doc.perm = Some(perm.images());
                let op = flow.rule().maksimov_op().ok_or(Error::NotMaksimov)?;
                doc.target_op = Some(OpSpec::Table(op.rows()));
            }
            Source::Product { factors } => {
                doc.rule = Some(RuleDoc::from_rule(flow.rule()));
                doc.factors = Some(factors.iter().map(Self::from_flow_inner).collect::<Result<_>>()?);
            }
            Source::Custom { .. } => return Err(Error::NotSerializable("custom flow".into())),
        }
        Ok(doc)
    }
}

/// Read a rule document; a file holding a flow document contributes its `[rule]` table.
pub fn load_rule(path: &Path) -> Result<MulRule> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    rule_from_toml(&text)
}

pub fn rule_from_toml(text: &str) -> Result<MulRule> {
    let value: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let doc: RuleDoc = match value.get("rule") {
        Some(inner) => inner.clone().try_into(),
        None => toml::Value::Table(value).try_into(),
    }
    .map_err(|e| Error::Config(e.to_string()))?;
    doc.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::FamilyTag;

    fn build(text: &str) -> Result<FlowFamily> {
        FlowDoc::from_toml(text)?.build(Path::new("."))
    }

    #[test]
    fn rule_documents() {
        let r = rule_from_toml("schema = 1\nkind = \"maksimov\"\ndim = 2\nop_table = [[1, 2], [2, 1]]\n").unwrap();
        assert_eq!(r.kind_name(), "maksimov");
        let r = rule_from_toml("[rule]\nkind = \"group\"\ndim = 2\ngroup = \"abelian:2,2,2\"\n").unwrap();
        assert!(r.is_commutative());
        let r = rule_from_toml("kind = \"group\"\ndim = 2\ngroup = \"dihedral\"\n").unwrap();
        assert!(!r.is_commutative());
        let r = rule_from_toml("kind = \"general\"\ndim = 1\nentries = [[1, 1, 1, 2.0]]\n").unwrap();
        let x = CubicMatrix::from_vec(1, vec![3.0]).unwrap();
        assert_eq!(r.multiply(&x, &x).unwrap().as_slice(), &[18.0]);
        assert!(rule_from_toml("kind = \"a0\"\ndim = 2\nop = \"left\"\n").is_err());
        assert!(rule_from_toml("kind = \"maksimov\"\ndim = 2\nop = [[1, 1], [2, 1]]\n").is_err());
        assert!(rule_from_toml("kind = \"group\"\ndim = 2\ngroup = \"cyclic:3\"\n").is_err());
        assert!(rule_from_toml("kind = \"nope\"\ndim = 2\n").is_err());
        assert!(rule_from_toml("schema = 2\nkind = \"a0\"\ndim = 2\n").is_err());
        assert!(rule_from_toml("kind = \"a0\"\ndim = 2\ntypo = 1\n").is_err());
    }

    #[test]
    fn presets() {
        assert!(build_op(3, &OpSpec::Preset("right".into())).unwrap().is_uniformly_distributed());
        assert!(!build_op(3, &OpSpec::Preset("const:2".into())).unwrap().is_uniformly_distributed());
        assert!(build_op(3, &OpSpec::Preset("const:x".into())).is_err());
        assert!(build_op(2, &OpSpec::Table(vec![vec![1, 2, 3]; 3])).is_err());
    }

    #[test]
    fn dense_and_sparse_matrices() {
        let dense = MatrixDoc::Dense((0..8).map(f64::from).collect()).build(2).unwrap();
        assert_eq!(dense.get(2, 1, 2), 5.0);
        let sparse = MatrixDoc::Sparse(vec![(2, 1, 2, 5.0), (1, 1, 2, 1.0)]).build(2).unwrap();
        assert_eq!(sparse.get(2, 1, 2), 5.0);
        assert_eq!(sparse.norm_l1(), 6.0);
        assert!(MatrixDoc::Sparse(vec![(3, 1, 1, 1.0)]).build(2).is_err());
        assert!(MatrixDoc::Dense(vec![1.0; 7]).build(2).is_err());
    }

    #[test]
    fn family_documents() {
        let a3 = build(
            "family = \"a3\"\nQ = [[1,1,2,0.1],[2,2,2,-0.05]]\n[rule]\nkind = \"group\"\ndim = 2\ngroup = \"abelian:2,2,2\"\n",
        )
        .unwrap();
        assert_eq!(a3.tag(), FamilyTag::A3);
        let a6 = build(
            "family = \"a6\"\ng = [\"exp(t)\", \"exp(t)\"]\ngamma = [[\"exp(t)/4\", \"exp(t)/4\"], [\"exp(t)/4\", \"exp(t)/4\"]]\n",
        )
        .unwrap();
        assert_eq!(a6.rule().kind_name(), "a0");
        let tr = build(
            "family = \"transport\"\nperm = [2, 1]\ntarget_op = \"left\"\n[source]\nfamily = \"a6\"\ng = [\"1\", \"1\"]\ngamma = [[\"0.25\", \"0.25\"], [\"0.25\", \"0.25\"]]\n",
        )
        .unwrap();
        assert_eq!(tr.tag(), FamilyTag::Transport);
        assert!(build("family = \"a3\"\nq = [0.0]\n").is_err());
        assert!(build("family = \"a9\"\n").is_err());
        assert!(matches!(
            build("family = \"a5\"\nf = [\"1\", \"1\"]\ng = [\"0.25\", \"0.3\"]\n[rule]\nkind = \"maksimov\"\ndim = 2\nop_table = \"right\"\n"),
            Err(Error::FgConstraint { .. })
        ));
    }

    #[test]
    fn rule_round_trip() {
        for rule in [
            MulRule::a0(2).unwrap(),
            MulRule::maksimov(BinaryOp::right_projection(3).unwrap()),
            MulRule::group(2, GroupTable::dihedral(4).unwrap()).unwrap(),
            MulRule::general(StructureTensor::from_flat_1based(1, &[(1, 1, 1, 0.5)]).unwrap()),
        ] {
            let text = toml::to_string(&RuleDoc::from_rule(&rule)).unwrap();
            assert_eq!(rule_from_toml(&text).unwrap(), rule);
        }
    }
}
