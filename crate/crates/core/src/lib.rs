//! Algebras of cubic matrices under pluggable multiplication rules, flows of
//! algebras built from them, and numerical checks of the Kolmogorov-Chapman
//! equation `M[s,t] = M[s,tau] * M[tau,t]` and its differential forms.

pub mod cli;
pub mod config;
pub mod error;
pub mod expr;
pub mod flows;
pub mod mulrules;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
pub use expr::Expr;
pub use flows::{FlowFamily, MatrixPath, ScalarFamily, TimeGrid};
pub use mulrules::{BinaryOp, GroupTable, MulRule, Permutation, RuleKind, StructureTensor};
pub use tensor::{CubicMatrix, FlatIndex};
