use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("index ({i}, {j}, {k}) out of range for dimension {dim}")]
    IndexOutOfRange { dim: usize, i: usize, j: usize, k: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),

    #[error("binary operation is not associative: a(a({0},{1}),{2}) != a({0},a({1},{2}))")]
    NotAssociativeOp(usize, usize, usize),

    #[error("invalid binary operation table: {0}")]
    InvalidOpTable(String),

    #[error("invalid group table: {0}")]
    InvalidGroup(String),

    #[error("invalid structure tensor: {0}")]
    InvalidStructure(String),

    #[error("dimension {dim} exceeds the analyzer guard {guard}")]
    DimensionGuard { dim: usize, guard: usize },

    #[error("rule is not unital")]
    NotUnital,

    #[error("rule is not associative")]
    NotAssociative,

    #[error("rule is not commutative")]
    NotCommutative,

    #[error("matrix is not invertible")]
    NotInvertible,

    #[error("power 0 requested but the rule has no unit")]
    ZeroPowerWithoutUnit,

    #[error("power-associativity fails for x^{n} * x^{k}: residual {residual:e}")]
    PowerAssociativity { n: usize, k: usize, residual: f64 },

    #[error("matrix is not idempotent: ‖X*X - X‖ = {0:e}")]
    NotIdempotent(f64),

    #[error("binary operation is not uniformly distributed")]
    NotUniformlyDistributed,

    #[error("constraint `sum_k f_k(t) g_k(t) = 1/m` violated at t = {t}: residual {residual:e}")]
    FgConstraint { t: f64, residual: f64 },

    #[error("constraint `m sum_j gamma_ij(s) = g_i(s)` violated for i = {i} at s = {s}: residual {residual:e}")]
    GammaConstraint { i: usize, s: f64, residual: f64 },

    #[error("g_{i}(t) vanishes at t = {t}")]
    VanishingG { i: usize, t: f64 },

    #[error("permutation compatibility `a(j,n) = pi^-1(b(pi(j),pi(n)))` fails at (j, n) = ({j}, {n})")]
    PermutationCompatibility { j: usize, n: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("flow family requires a Maksimov rule")]
    NotMaksimov,

    #[error("factor flows use different multiplication rules")]
    RuleMismatch,

    #[error("empty factor list")]
    EmptyFactors,

    #[error("time ({s}, {t}) outside the flow domain: {reason}")]
    Domain { s: f64, t: f64, reason: String },

    #[error("A[t] is not invertible at t = {0}")]
    SingularAt(f64),

    #[error("non-finite value produced at t = {0}")]
    NonFiniteAt(f64),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("expression error: {0}")]
    Expr(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("discrete flow families have no time derivative")]
    DiscreteFlow,

    #[error("flow cannot be serialized: {0}")]
    NotSerializable(String),
}
