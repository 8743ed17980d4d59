use crate::error::{Error, Result};

/// A finite group on `J = {1, ..., n}` given by its Cayley table.
///
/// Used as the index group of the group-induced rule `E_p * E_q = E_{alpha(p, q)}`,
/// where `n = m^3` enumerates the basis matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupTable {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl GroupTable {
    /// Validate a 1-based table. `identity`, when given, must be the group identity.
    pub fn new(rows: &[Vec<usize>], identity: Option<usize>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (p, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {} has {} entries, expected {n}",
                    p + 1,
                    row.len()
                )));
            }
            for &v in row {
                if !(1..=n).contains(&v) {
                    return Err(Error::InvalidGroup(format!("value {v} outside 1..={n}")));
                }
                table.push(v - 1);
            }
        }
        Self::from_table0(n, table, identity.map(|e| e.wrapping_sub(1)))
    }

    fn from_table0(n: usize, table: Vec<usize>, identity: Option<usize>) -> Result<Self> {
        let op = |p: usize, q: usize| table[p * n + q];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    if op(op(p, q), r) != op(p, op(q, r)) {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({}, {}, {})",
                            p + 1,
                            q + 1,
                            r + 1
                        )));
                    }
                }
            }
        }
        let found = (0..n).find(|&e| (0..n).all(|x| op(e, x) == x && op(x, e) == x));
        let identity = match (found, identity) {
            (None, _) => return Err(Error::InvalidGroup("no two-sided identity".into())),
            (Some(e), Some(given)) if e != given => {
                return Err(Error::InvalidGroup(format!(
                    "declared identity {} is not the identity (found {})",
                    given.wrapping_add(1),
                    e + 1
                )))
            }
            (Some(e), _) => e,
        };
        let mut inverse = Vec::with_capacity(n);
        for p in 0..n {
            match (0..n).find(|&q| op(p, q) == identity && op(q, p) == identity) {
                Some(q) => inverse.push(q),
                None => {
                    return Err(Error::InvalidGroup(format!("element {} has no inverse", p + 1)))
                }
            }
        }
        Ok(Self { order: n, table, identity, inverse })
    }

    /// The cyclic group `Z_n`, element `p` standing for residue `p - 1`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("empty group".into()));
        }
        let table = (0..n).flat_map(|p| (0..n).map(move |q| (p + q) % n)).collect();
        Self::from_table0(n, table, Some(0))
    }

    /// The direct product `Z_{n_1} x ... x Z_{n_r}`, mixed-radix encoded with the
    /// first factor most significant.
    pub fn abelian(orders: &[usize]) -> Result<Self> {
        if orders.is_empty() || orders.contains(&0) {
            return Err(Error::InvalidGroup("factor orders must be positive".into()));
        }
        let n: usize = orders.iter().product();
        let digits = |mut x: usize| {
            let mut d = vec![0; orders.len()];
            for (slot, &o) in d.iter_mut().zip(orders).rev() {
                *slot = x % o;
                x /= o;
            }
            d
        };
        let encode = |d: &[usize]| d.iter().zip(orders).fold(0, |acc, (x, o)| acc * o + x);
        let mut table = Vec::with_capacity(n * n);
        for p in 0..n {
            let dp = digits(p);
            for q in 0..n {
                let dq = digits(q);
                let sum: Vec<usize> =
                    dp.iter().zip(&dq).zip(orders).map(|((a, b), o)| (a + b) % o).collect();
                table.push(encode(&sum));
            }
        }
        Self::from_table0(n, table, Some(0))
    }

    /// The dihedral group of order `2k`: element `2r + f` is `rot^r ref^f`.
    pub fn dihedral(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGroup("empty group".into()));
        }
        let n = 2 * k;
        let mut table = Vec::with_capacity(n * n);
        for p in 0..n {
            let (r1, f1) = (p / 2, p % 2);
            for q in 0..n {
                let (r2, f2) = (q / 2, q % 2);
                // ref rot^r = rot^-r ref
                let r = if f1 == 0 { (r1 + r2) % k } else { (r1 + k - r2) % k };
                table.push(2 * r + (f1 ^ f2));
            }
        }
        Self::from_table0(n, table, Some(0))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// 1-based product `alpha(p, q)`.
    pub fn apply(&self, p: usize, q: usize) -> usize {
        self.table[(p - 1) * self.order + (q - 1)] + 1
    }

    #[inline]
    pub(crate) fn apply0(&self, p: usize, q: usize) -> usize {
        self.table[p * self.order + q]
    }

    /// 1-based identity element.
    pub fn identity(&self) -> usize {
        self.identity + 1
    }

    /// 1-based inverse of `p`.
    pub fn inverse_of(&self, p: usize) -> usize {
        self.inverse[p - 1] + 1
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.order;
        (0..n).all(|p| (0..p).all(|q| self.apply0(p, q) == self.apply0(q, p)))
    }

    /// The 1-based Cayley table.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.iter().map(|v| v + 1).collect()).collect()
    }
}
