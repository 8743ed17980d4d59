use crate::error::{Error, Result};

/// An associative binary operation on `I = {1, ..., m}`, stored as a Cayley table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryOp {
    dim: usize,
    // 0-based values, row-major: table[j * m + n] = a(j, n) - 1
    table: Vec<usize>,
}

impl BinaryOp {
    /// Build from a 1-based `m x m` table; associativity is checked exhaustively.
    pub fn new(rows: &[Vec<usize>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut table = Vec::with_capacity(dim * dim);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidOpTable(format!(
                    "row {} has {} entries, expected {dim}",
                    j + 1,
                    row.len()
                )));
            }
            for &v in row {
                if !(1..=dim).contains(&v) {
                    return Err(Error::InvalidOpTable(format!("value {v} outside 1..={dim}")));
                }
                table.push(v - 1);
            }
        }
        let op = Self { dim, table };
        op.check_associative()?;
        Ok(op)
    }

    /// Build from a 1-based closure `(j, n) -> a(j, n)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows: Vec<Vec<usize>> =
            (1..=dim).map(|j| (1..=dim).map(|n| f(j, n)).collect()).collect();
        Self::new(&rows)
    }

    /// `a(j, n) = j`, the operation behind the `a0` rule.
    pub fn left_projection(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |j, _| j)
    }

    /// `a(j, n) = n`.
    pub fn right_projection(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |_, n| n)
    }

    /// `a(j, n) = c`.
    pub fn constant(dim: usize, c: usize) -> Result<Self> {
        Self::from_fn(dim, |_, _| c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `a(j, n)` with 1-based arguments and result.
    pub fn apply(&self, j: usize, n: usize) -> usize {
        self.table[(j - 1) * self.dim + (n - 1)] + 1
    }

    #[inline]
    pub(crate) fn apply0(&self, j: usize, n: usize) -> usize {
        self.table[j * self.dim + n]
    }

    /// The 1-based table, as accepted by [`BinaryOp::new`].
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.dim).map(|r| r.iter().map(|v| v + 1).collect()).collect()
    }

    /// Every value `j` has exactly `m` preimage pairs `(l, n)`.
    pub fn is_uniformly_distributed(&self) -> bool {
        let mut counts = vec![0usize; self.dim];
        for &v in &self.table {
            counts[v] += 1;
        }
        counts.iter().all(|&c| c == self.dim)
    }

    /// The two-sided identity element, when one exists (1-based).
    pub fn identity(&self) -> Option<usize> {
        let m = self.dim;
        (0..m)
            .find(|&e| (0..m).all(|x| self.apply0(e, x) == x && self.apply0(x, e) == x))
            .map(|e| e + 1)
    }

    /// The operation `pi b` with `(pi b)(j, n) = pi^-1(b(pi(j), pi(n)))`.
    ///
    /// `perm` is 1-based: `perm[i - 1] = pi(i)`.
    pub fn conjugate(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: perm.len() });
        }
        Self::from_fn(self.dim, |j, n| perm.inverse_apply(self.apply(perm.apply(j), perm.apply(n))))
    }

    fn check_associative(&self) -> Result<()> {
        let m = self.dim;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if self.apply0(self.apply0(i, j), k) != self.apply0(i, self.apply0(j, k)) {
                        return Err(Error::NotAssociativeOp(i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A permutation of `{1, ..., m}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    /// `images[i - 1] = pi(i)`, 1-based.
    pub fn new(images: &[usize]) -> Result<Self> {
        let m = images.len();
        if m == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut inverse = vec![usize::MAX; m];
        for (i, &p) in images.iter().enumerate() {
            if !(1..=m).contains(&p) {
                return Err(Error::InvalidPermutation(format!("image {p} outside 1..={m}")));
            }
            if inverse[p - 1] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("image {p} repeated")));
            }
            inverse[p - 1] = i;
        }
        Ok(Self { forward: images.iter().map(|p| p - 1).collect(), inverse })
    }

    pub fn identity(m: usize) -> Self {
        Self { forward: (0..m).collect(), inverse: (0..m).collect() }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.forward[i - 1] + 1
    }

    pub fn inverse_apply(&self, i: usize) -> usize {
        self.inverse[i - 1] + 1
    }

    pub fn inverse(&self) -> Self {
        Self { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// 1-based images, as accepted by [`Permutation::new`].
    pub fn images(&self) -> Vec<usize> {
        self.forward.iter().map(|p| p + 1).collect()
    }
}
