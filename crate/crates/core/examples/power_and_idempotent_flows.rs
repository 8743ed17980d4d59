//! Discrete power flows `M[n,k] = Q^{*(k-n)}` and constant idempotent flows.

use cubicflow::flows::{flow_idempotent, flow_power};
use cubicflow::verify::{check_kce, standard_grid};
use cubicflow::{BinaryOp, CubicMatrix, GroupTable, MulRule, Result};

pub fn run_example() -> Result<()> {
    let rule = MulRule::group(2, GroupTable::abelian(&[2, 4])?)?;
    let q = CubicMatrix::from_fn(2, |i, j, k| 0.1 * (i as f64) - 0.05 * (j * k) as f64)?;
    let power = flow_power(&rule, &q)?;
    let r = check_kce(&power, &standard_grid(true), 1e-10)?;
    println!("{}: {} integer triples, max residual {:.1e}", power.label(), r.grid.len(), r.max_residual);
    println!("M[0,3] = Q^3:\n{}", power.eval(0.0, 3.0)?);
    match power.eval(0.5, 2.0) {
        Err(e) => println!("non-integer time rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    // a Maksimov rule is associative, so power flows need no sampling caveat
    let mak = MulRule::maksimov(BinaryOp::right_projection(2)?);
    println!("maksimov power flow label: {}", flow_power(&mak, &q)?.label());

    for x in [CubicMatrix::zero(2)?, rule.unit().expect("group rules are unital").clone()] {
        let flow = flow_idempotent(&rule, &x, 1e-12)?;
        let r = check_kce(&flow, &standard_grid(false), 1e-12)?;
        println!("idempotent flow with ‖X‖ = {}: pass {}", x.norm_l1(), r.pass);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
