//! Finite-difference residuals of the forward and backward equations, and
//! their second-order decay as the step is halved.

use cubicflow::flows::{flow_fg, flow_gamma, flow_power};
use cubicflow::verify::{check_pde, standard_pde_samples};
use cubicflow::{BinaryOp, FlowFamily, MulRule, Result, ScalarFamily};

pub fn run_example() -> Result<()> {
    let z2 = BinaryOp::from_fn(2, |j, n| (j + n) % 2 + 1)?;
    let sine = flow_fg(
        &z2,
        ScalarFamily::parse_fg(&["2 + sin(t)", "2 + sin(2*t)"], &["1/(4*(2 + sin(t)))", "1/(4*(2 + sin(2*t)))"])?,
        1e-9,
    )?;
    let exp = flow_gamma(
        ScalarFamily::parse_gamma(&["exp(t)", "exp(t)"], &[vec!["exp(t)/4", "exp(t)/4"], vec!["exp(t)/4", "exp(t)/4"]])?,
        1e-12,
    )?;
    let samples = standard_pde_samples();
    for (name, flow) in [("sine f/g", &sine), ("exponential gamma/g", &exp)] {
        let coarse = check_pde(flow, &samples, 1e-3, 1e-6)?;
        let fine = check_pde(flow, &samples, 5e-4, 1e-6)?;
        let worst = |r: &cubicflow::verify::PdeReport| r.max_forward.max(r.max_backward);
        println!(
            "{name}: h = 1e-3 -> {:.2e}, h = 5e-4 -> {:.2e}, ratio {:.2}",
            worst(&coarse),
            worst(&fine),
            worst(&coarse) / worst(&fine)
        );
    }

    // a family that breaks the KCE leaves an O(1) residual
    let inner = sine.clone();
    let skewed = FlowFamily::from_fn(sine.rule().clone(), false, false, move |s, t| Ok(inner.eval(s, t)?.scale(1.0 + 0.1 * t)));
    let r = check_pde(&skewed, &samples, 1e-4, 1e-6)?;
    println!("perturbed family: forward {:.2e}, pass {}", r.max_forward.max(r.max_backward), r.pass);

    let power = flow_power(&MulRule::a0(2)?, &sine.eval(0.0, 1.0)?)?;
    println!("discrete family: {}", check_pde(&power, &samples, 1e-4, 1e-6).unwrap_err());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
