//! Cubic matrices: `m x m x m` real tensors of structural constants.
//!
//! Entries are stored row-major, `(i, j, k) -> (i-1) m^2 + (j-1) m + (k-1)`
//! in the 1-based indexing used by the public API and by every file format.
//! The same flattening numbers the basis set `{E_ijk}` as `0..m^3`, which is
//! how the multiplication rules address basis elements internally.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for entrywise comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A position in the flattened basis `{1, ..., m^3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FlatIndex {
    dim: usize,
    value: usize,
}

impl FlatIndex {
    /// Compose a 1-based `(i, j, k)` into its flat index.
    pub fn compose(dim: usize, i: usize, j: usize, k: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(1..=dim).contains(&i) || !(1..=dim).contains(&j) || !(1..=dim).contains(&k) {
            return Err(Error::IndexOutOfRange { dim, i, j, k });
        }
        Ok(Self { dim, value: (i - 1) * dim * dim + (j - 1) * dim + (k - 1) + 1 })
    }

    /// Wrap a 1-based flat value in `1..=m^3`.
    pub fn new(dim: usize, value: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if value == 0 || value > dim * dim * dim {
            return Err(Error::Config(format!(
                "flat index {value} out of range 1..={}",
                dim * dim * dim
            )));
        }
        Ok(Self { dim, value })
    }

    pub(crate) fn from_offset(dim: usize, offset: usize) -> Self {
        debug_assert!(offset < dim * dim * dim);
        Self { dim, value: offset + 1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The 1-based value in `1..=m^3`.
    pub fn value(&self) -> usize {
        self.value
    }

    /// The 0-based storage offset.
    pub fn offset(&self) -> usize {
        self.value - 1
    }

    /// The 1-based `(i, j, k)` triple.
    pub fn decompose(&self) -> (usize, usize, usize) {
        let m = self.dim;
        let o = self.value - 1;
        (o / (m * m) + 1, (o / m) % m + 1, o % m + 1)
    }
}

/// An `m x m x m` real tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCubic", into = "RawCubic")]
pub struct CubicMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawCubic {
    dim: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawCubic> for CubicMatrix {
    type Error = Error;
    fn try_from(raw: RawCubic) -> Result<Self> {
        CubicMatrix::from_vec(raw.dim, raw.entries)
    }
}

impl From<CubicMatrix> for RawCubic {
    fn from(c: CubicMatrix) -> Self {
        RawCubic { dim: c.dim, entries: c.data }
    }
}

impl CubicMatrix {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim, data: vec![0.0; dim * dim * dim] })
    }

    /// The basis matrix `E_ijk` (1-based indices).
    pub fn basis(dim: usize, i: usize, j: usize, k: usize) -> Result<Self> {
        let idx = FlatIndex::compose(dim, i, j, k)?;
        let mut out = Self::zero(dim)?;
        out.data[idx.offset()] = 1.0;
        Ok(out)
    }

    pub(crate) fn basis_offset(dim: usize, offset: usize) -> Self {
        let mut data = vec![0.0; dim * dim * dim];
        data[offset] = 1.0;
        Self { dim, data }
    }

    /// Build from row-major entries; rejects wrong length and non-finite values.
    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let expected = dim * dim * dim;
        if data.len() != expected {
            return Err(Error::EntryCount { expected, found: data.len() });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { dim, data })
    }

    /// Build by evaluating `f(i, j, k)` at every 1-based index triple.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim * dim);
        for i in 1..=dim {
            for j in 1..=dim {
                for k in 1..=dim {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::from_vec(dim, data)
    }

    /// Trusted constructor for kernels whose output length is known.
    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim * dim);
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of entries, `m^3`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Entry at 1-based `(i, j, k)`.
    ///
    /// Panics when an index is out of range.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.dim;
        assert!(
            (1..=m).contains(&i) && (1..=m).contains(&j) && (1..=m).contains(&k),
            "index ({i}, {j}, {k}) out of range for dimension {m}"
        );
        self.data[(i - 1) * m * m + (j - 1) * m + (k - 1)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) -> Result<()> {
        let idx = FlatIndex::compose(self.dim, i, j, k)?;
        if !value.is_finite() {
            return Err(Error::NonFinite(idx.offset()));
        }
        self.data[idx.offset()] = value;
        Ok(())
    }

    /// Iterate `(flat index, value)` pairs in storage order.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (FlatIndex, f64)> + '_ {
        let m = self.dim;
        self.data.iter().enumerate().map(move |(o, &v)| (FlatIndex::from_offset(m, o), v))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| lambda * x).collect() }
    }

    /// `self += lambda * other`, in place.
    pub fn axpy(&mut self, lambda: f64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += lambda * b;
        }
        Ok(())
    }

    pub fn norm_l1(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    /// `‖self - other‖_1`, or an error on dimension mismatch.
    pub fn dist_l1(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).sum())
    }

    /// Entrywise agreement within `tol` (exact when `tol == 0`); `false` on dimension mismatch.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self.data.iter().zip(&other.data).all(|(a, b)| (a - b).abs() <= tol)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }
}

impl Add for &CubicMatrix {
    type Output = CubicMatrix;

    /// Panics on dimension mismatch; use [`CubicMatrix::add`] for a checked sum.
    fn add(self, rhs: Self) -> CubicMatrix {
        CubicMatrix::add(self, rhs).expect("dimension mismatch in cubic matrix sum")
    }
}

impl Sub for &CubicMatrix {
    type Output = CubicMatrix;

    fn sub(self, rhs: Self) -> CubicMatrix {
        CubicMatrix::sub(self, rhs).expect("dimension mismatch in cubic matrix difference")
    }
}

impl Mul<&CubicMatrix> for f64 {
    type Output = CubicMatrix;

    fn mul(self, rhs: &CubicMatrix) -> CubicMatrix {
        rhs.scale(self)
    }
}

impl Neg for &CubicMatrix {
    type Output = CubicMatrix;

    fn neg(self) -> CubicMatrix {
        self.scale(-1.0)
    }
}

impl fmt::Display for CubicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.dim;
        for i in 1..=m {
            writeln!(f, "i = {i}:")?;
            for j in 1..=m {
                let row: Vec<String> = (1..=m).map(|k| format!("{:>12.6}", self.get(i, j, k))).collect();
                writeln!(f, "  {}", row.join(" "))?;
            }
        }
        Ok(())
    }
}
