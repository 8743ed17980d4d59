//! Oracles and fixtures shared by the integration tests. Nothing here calls
//! the library's product kernels.
#![allow(dead_code)]

use cubicflow::{BinaryOp, CubicMatrix, MulRule, Result, ScalarFamily, StructureTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> CubicMatrix {
    CubicMatrix::from_fn(m, |_, _, _| rng.random_range(-1.0..1.0)).unwrap()
}

/// `c_{i a(l,n) r} = sum_k a_ilk b_knr`, written as the plain five-index loop.
pub fn maksimov_naive(op: &BinaryOp, a: &CubicMatrix, b: &CubicMatrix) -> CubicMatrix {
    let m = op.dim();
    let mut c = vec![0.0; m * m * m];
    for i in 1..=m {
        for l in 1..=m {
            for k in 1..=m {
                for n in 1..=m {
                    for r in 1..=m {
                        let j = op.apply(l, n);
                        c[(i - 1) * m * m + (j - 1) * m + (r - 1)] += a.get(i, l, k) * b.get(k, n, r);
                    }
                }
            }
        }
    }
    CubicMatrix::from_vec(m, c).unwrap()
}

/// The structure tensor `E_ijk * E_lnr = δ_kl E_{i a(j,n) r}` listed entry by entry.
pub fn maksimov_structure(op: &BinaryOp) -> MulRule {
    let m = op.dim();
    let flat = |i: usize, j: usize, k: usize| (i - 1) * m * m + (j - 1) * m + k;
    let mut entries = Vec::new();
    for i in 1..=m {
        for j in 1..=m {
            for k in 1..=m {
                for n in 1..=m {
                    for r in 1..=m {
                        entries.push((flat(i, j, k), flat(k, n, r), flat(i, op.apply(j, n), r), 1.0));
                    }
                }
            }
        }
    }
    MulRule::general(StructureTensor::from_flat_1based(m, &entries).unwrap())
}

/// Every associative binary operation on `{1, ..., m}` (small `m` only).
pub fn all_associative_ops(m: usize) -> Vec<BinaryOp> {
    let cells = m * m;
    let total = m.pow(cells as u32);
    (0..total)
        .filter_map(|mut code| {
            let mut rows = vec![vec![0; m]; m];
            for c in 0..cells {
                rows[c / m][c % m] = code % m + 1;
                code /= m;
            }
            BinaryOp::new(&rows).ok()
        })
        .collect()
}

/// A unital rule with `E_111` as unit and every other basis product zero, so
/// any `Q` with `Q_111 = 0` squares to zero.
pub fn square_zero_rule(m: usize) -> MulRule {
    let n = m * m * m;
    let mut entries: Vec<(usize, usize, usize, f64)> = (1..=n).map(|p| (1, p, p, 1.0)).collect();
    entries.extend((2..=n).map(|p| (p, 1, p, 1.0)));
    MulRule::general(StructureTensor::from_flat_1based(m, &entries).unwrap())
}

/// Random structure constants with `c_pq^w >= 0` and `sum_w c_pq^w = 1`.
pub fn stochastic_rule(m: usize, seed: u64) -> MulRule {
    let n = m * m * m;
    let mut rng = rng(seed);
    let mut entries = Vec::new();
    for p in 1..=n {
        for q in 1..=n {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            entries.extend(w.iter().enumerate().map(|(r, c)| (p, q, r + 1, c / total)));
        }
    }
    MulRule::general(StructureTensor::from_flat_1based(m, &entries).unwrap())
}

pub fn z_add(m: usize) -> BinaryOp {
    BinaryOp::from_fn(m, |j, n| (j + n - 2) % m + 1).unwrap()
}

/// `f_k = 2 + sin(kt)`, `g_k = scale / (m^2 (2 + sin(kt)))`.
pub fn sine_family(m: usize, scale: f64) -> Result<ScalarFamily> {
    let f: Vec<String> = (1..=m).map(|k| format!("2 + sin({k}*t)")).collect();
    let g: Vec<String> = (1..=m).map(|k| format!("{scale:?}/({}*(2 + sin({k}*t)))", m * m)).collect();
    ScalarFamily::parse_fg(
        &f.iter().map(String::as_str).collect::<Vec<_>>(),
        &g.iter().map(String::as_str).collect::<Vec<_>>(),
    )
}

/// `gamma_ij = scale e^t / m^2`, `g_i = e^t`.
pub fn exp_gamma_family(m: usize, scale: f64) -> Result<ScalarFamily> {
    let entry = format!("{scale:?}*exp(t)/{}", m * m);
    let row = vec![entry.as_str(); m];
    ScalarFamily::parse_gamma(&vec!["exp(t)"; m], &vec![row; m])
}

pub fn max_entry_gap(a: &CubicMatrix, b: &CubicMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
