//! Flows over Maksimov rules: the periodic `f/g` sine family, the `gamma/g`
//! family over the `a0` rule, and transport along a permutation.

use std::f64::consts::PI;

use cubicflow::flows::{flow_fg, flow_gamma, transport, DEFAULT_CHECK_TOL};
use cubicflow::verify::{check_kce, standard_grid};
use cubicflow::{BinaryOp, Permutation, Result, ScalarFamily};

pub fn run_example() -> Result<()> {
    let z3 = BinaryOp::from_fn(3, |j, n| (j + n - 2) % 3 + 1)?;
    let f: Vec<String> = (1..=3).map(|k| format!("2 + sin({k}*t)")).collect();
    let g: Vec<String> = (1..=3).map(|k| format!("1/(9*(2 + sin({k}*t)))")).collect();
    let fam = ScalarFamily::parse_fg(
        &f.iter().map(String::as_str).collect::<Vec<_>>(),
        &g.iter().map(String::as_str).collect::<Vec<_>>(),
    )?;
    let sine = flow_fg(&z3, fam, DEFAULT_CHECK_TOL)?;
    let grid = standard_grid(false);
    println!("sine family: max KCE residual {:.1e}", check_kce(&sine, &grid, 1e-9)?.max_residual);
    let mut drift: f64 = 0.0;
    for &(s, _, t) in &grid {
        drift = drift.max(sine.eval(s, t)?.dist_l1(&sine.eval(s + 2.0 * PI, t + 2.0 * PI)?)?);
    }
    println!("period 2π drift {drift:.1e}");

    let broken = ScalarFamily::parse_fg(&["1", "1", "1"], &["0.111", "0.111", "0.111"])?;
    println!("broken constraint: {}", flow_fg(&z3, broken, DEFAULT_CHECK_TOL).unwrap_err());

    let gam = ScalarFamily::parse_gamma(
        &["exp(t)", "2*exp(t)"],
        &[vec!["exp(t)/4", "exp(t)/4"], vec!["exp(t)/2", "exp(t)/2"]],
    )?;
    let a6 = flow_gamma(gam, 1e-12)?;
    println!("gamma/g family: max KCE residual {:.1e}", check_kce(&a6, &grid, 1e-9)?.max_residual);

    // pi = (1 2) carries a0 to itself
    let pi = Permutation::new(&[2, 1])?;
    let b = a6.rule().maksimov_op().expect("a0 is Maksimov");
    let moved = transport(&a6, &pi, &b.conjugate(&pi)?)?;
    println!("transported: max KCE residual {:.1e}", check_kce(&moved, &grid, 1e-9)?.max_residual);

    let cycle = Permutation::new(&[2, 3, 1])?;
    let z3_moved = transport(&sine, &cycle, &z3.conjugate(&cycle)?)?;
    println!("sine family moved by a 3-cycle: pass {}", check_kce(&z3_moved, &grid, 1e-9)?.pass);
    println!("incompatible target: {}", transport(&sine, &cycle, &BinaryOp::left_projection(3)?).unwrap_err());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
