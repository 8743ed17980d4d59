//! The homogeneous flow `M[s,t] = exp_mu((t-s) Q)` checked against an
//! independent Runge-Kutta solve, the semigroup law and a nilpotent generator.

use cubicflow::flows::{exp_mu, exp_mu_terms, flow_exp, DEFAULT_EXP_TOL};
use cubicflow::mulrules::mul_norm_constant;
use cubicflow::verify::{check_kce, ode_oracle, standard_grid, DEFAULT_KCE_TOL};
use cubicflow::{CubicMatrix, GroupTable, MulRule, Result, StructureTensor};

pub fn run_example() -> Result<()> {
    let rule = MulRule::group(2, GroupTable::cyclic(8)?)?;
    let q = CubicMatrix::from_fn(2, |i, j, k| ((i * 7 + j * 3 + k) % 5) as f64 / 40.0 - 0.05)?;
    println!("‖Q‖_mu = {:.4}", mul_norm_constant(&rule) * q.norm_l1());

    let (e, terms) = exp_mu_terms(&rule, &q, 1.0, 1e-12)?;
    let y = ode_oracle(&rule, &q, 1.0, 1000)?;
    println!("series ({terms} terms) vs RK4: max gap {:.1e}", e.sub(&y)?.max_abs());

    let (s, t) = (0.4, 0.7);
    let lhs = exp_mu(&rule, &q, s + t, DEFAULT_EXP_TOL)?;
    let rhs = rule.multiply(&exp_mu(&rule, &q, s, DEFAULT_EXP_TOL)?, &exp_mu(&rule, &q, t, DEFAULT_EXP_TOL)?)?;
    println!("semigroup residual {:.1e}", lhs.dist_l1(&rhs)?);

    let flow = flow_exp(&rule, &q, DEFAULT_EXP_TOL)?;
    let report = check_kce(&flow, &standard_grid(false), DEFAULT_KCE_TOL)?;
    println!("KCE on the standard grid: max residual {:.1e}, pass {}", report.max_residual, report.pass);

    // E_111 is the unit, all other basis products vanish: Q * Q = 0 when Q_111 = 0
    let mut entries: Vec<(usize, usize, usize, f64)> = (1..=8).map(|p| (1, p, p, 1.0)).collect();
    entries.extend((2..=8).map(|p| (p, 1, p, 1.0)));
    let nil_rule = MulRule::general(StructureTensor::from_flat_1based(2, &entries)?);
    let nq = CubicMatrix::from_fn(2, |i, j, k| if (i, j, k) == (1, 1, 1) { 0.0 } else { 0.1 * (i + j + k) as f64 })?;
    for t in [0.5, 1.0, 2.0] {
        let mut affine = nil_rule.unit().expect("unital").clone();
        affine.axpy(t, &nq)?;
        let gap = exp_mu(&nil_rule, &nq, t, 1e-12)?.dist_l1(&affine)?;
        println!("nilpotent Q, t = {t}: ‖exp(tQ) - (I + tQ)‖ = {gap:.1e}");
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
