//! `M[s,t] = A[s] * A[t]^-1` for a path of invertible matrices, and pointwise
//! products of such flows over a commutative group rule.

use cubicflow::flows::{flow_invertible, flow_product};
use cubicflow::verify::{check_kce, standard_grid, DEFAULT_KCE_TOL};
use cubicflow::{GroupTable, MatrixPath, MulRule, Result};

pub fn run_example() -> Result<()> {
    let rule = MulRule::group(2, GroupTable::abelian(&[2, 2, 2])?)?;
    let a = MatrixPath::terms(2, &[(1, 1, 1, "2 + sin(t)"), (1, 1, 2, "0.5*cos(t)"), (2, 1, 1, "0.3")])?;
    let b = MatrixPath::terms(2, &[(1, 1, 1, "1.5"), (2, 2, 2, "0.2*cos(3*t)")])?;
    let fa = flow_invertible(&rule, a, 1e-10)?;
    let fb = flow_invertible(&rule, b, 1e-10)?;
    let grid = standard_grid(false);
    for flow in [&fa, &fb] {
        let r = check_kce(flow, &grid, DEFAULT_KCE_TOL)?;
        println!("{}: max residual {:.1e}", flow.label(), r.max_residual);
    }
    let prod = flow_product(&rule, &[fa, fb])?;
    let r = check_kce(&prod, &grid, DEFAULT_KCE_TOL)?;
    println!("{}: max residual {:.1e}, pass {}", prod.label(), r.max_residual, r.pass);

    let singular = flow_invertible(&rule, MatrixPath::terms(2, &[(1, 1, 1, "t - 1")])?, 1e-10)?;
    println!("A[1] = 0: {}", singular.eval(0.0, 1.0).unwrap_err());

    let d4 = MulRule::group(2, GroupTable::dihedral(4)?)?;
    let p = MatrixPath::terms(2, &[(1, 1, 1, "2"), (1, 1, 2, "0.1*t")])?;
    let f = flow_invertible(&d4, p, 1e-10)?;
    println!("product over D4: {}", flow_product(&d4, &[f.clone(), f]).unwrap_err());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
