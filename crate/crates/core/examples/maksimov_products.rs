//! Maksimov multiplication `E_ijk * E_lnr = δ_kl E_{i a(j,n) r}` for a few
//! binary operations, and the uniform-distribution test behind the `f/g` flows.

use cubicflow::{BinaryOp, CubicMatrix, MulRule, Result};

pub fn run_example() -> Result<()> {
    let m = 2;
    let z2 = BinaryOp::from_fn(m, |j, n| (j + n) % 2 + 1)?;
    let rule = MulRule::maksimov(z2.clone());

    let e112 = CubicMatrix::basis(m, 1, 1, 2)?;
    let e221 = CubicMatrix::basis(m, 2, 2, 1)?;
    // k = 2 = l, a(1, 2) = 2
    let p = rule.multiply(&e112, &e221)?;
    assert_eq!(p, CubicMatrix::basis(m, 1, 2, 1)?);
    println!("E_112 * E_221 = E_121 under Z2 addition");
    assert_eq!(rule.multiply(&e221, &e112)?, CubicMatrix::basis(m, 2, 2, 2)?);

    let a = CubicMatrix::from_fn(m, |i, j, k| (i + 2 * j + 3 * k) as f64 / 10.0)?;
    let b = CubicMatrix::from_fn(m, |i, j, k| (i * j) as f64 - k as f64 / 2.0)?;
    let general = rule.to_general();
    let gap = rule.multiply(&a, &b)?.dist_l1(&general.multiply(&a, &b)?)?;
    println!("fast kernel vs structure tensor: {gap:.1e}");

    let a0 = MulRule::a0(m)?;
    println!("a0 product:\n{}", a0.multiply(&a, &b)?);

    for m in [2, 3] {
        let ops = [
            ("a(i,j) = j", BinaryOp::right_projection(m)?),
            ("a(i,j) = i", BinaryOp::left_projection(m)?),
            ("a(i,j) = 1", BinaryOp::constant(m, 1)?),
        ];
        for (name, op) in ops {
            println!("m = {m}, {name}: uniformly distributed = {}", op.is_uniformly_distributed());
        }
    }

    let bad = BinaryOp::new(&[vec![2, 1], vec![1, 1]]);
    println!("non-associative table rejected: {}", bad.unwrap_err());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
