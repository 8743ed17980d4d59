//! Acceptance gate: ten criteria at their stated tolerances, one PASS/FAIL
//! line each on stdout (written past the test harness capture).

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use cubicflow::flows::{
    exp_mu, flow_exp, flow_fg, flow_gamma, flow_idempotent, flow_invertible, flow_power, flow_product,
    transport, DEFAULT_CHECK_TOL,
};
use cubicflow::mulrules::{find_idempotents, mul_norm_constant, IdempotentOptions};
use cubicflow::verify::{check_kce, check_pde, ode_oracle, standard_grid, standard_pde_samples, PdeReport};
use cubicflow::{
    BinaryOp, CubicMatrix, Error, FlowFamily, GroupTable, MatrixPath, MulRule, Permutation, Result,
};
use rand::Rng;

type Outcome = Result<(bool, String)>;

fn group_rule() -> MulRule {
    MulRule::group(2, GroupTable::abelian(&[2, 2, 2]).unwrap()).unwrap()
}

/// Random `Q` with `‖Q‖_mu` uniform in `(0, 1]`.
fn random_q(rng: &mut rand_chacha::ChaCha8Rng, rule: &MulRule) -> CubicMatrix {
    let q = random_matrix(rng, rule.dim());
    let target = rng.random_range(0.05..1.0);
    q.scale(target / (mul_norm_constant(rule) * q.norm_l1()))
}

fn kce_max(flow: &FlowFamily) -> Result<f64> {
    Ok(check_kce(flow, &standard_grid(flow.is_discrete()), f64::INFINITY)?.max_residual)
}

fn criterion_1() -> Outcome {
    let tol = 1e-8;
    let rule = group_rule();
    let mut rng = rng(101);
    let mut flows: Vec<(&str, FlowFamily)> = Vec::new();

    flows.push(("a1", flow_power(&rule, &random_matrix(&mut rng, 2).scale(0.4))?));
    flows.push(("a2 zero", flow_idempotent(&rule, &CubicMatrix::zero(2)?, 1e-12)?));
    flows.push(("a2 unit", flow_idempotent(&rule, rule.unit().unwrap(), 1e-12)?));
    flows.push(("a3", flow_exp(&rule, &random_q(&mut rng, &rule), 1e-13)?));
    let p1 = MatrixPath::terms(2, &[(1, 1, 1, "2 + sin(t)"), (1, 1, 2, "0.5*cos(t)"), (2, 1, 1, "0.3")])?;
    let p2 = MatrixPath::terms(2, &[(1, 1, 1, "1.5"), (2, 2, 2, "0.2*cos(3*t)"), (1, 2, 1, "0.1*t")])?;
    let f1 = flow_invertible(&rule, p1, 1e-10)?;
    let f2 = flow_invertible(&rule, p2, 1e-10)?;
    flows.push(("a4", f1.clone()));
    flows.push(("a5", flow_fg(&z_add(2), sine_family(2, 1.0)?, DEFAULT_CHECK_TOL)?));
    let a6 = flow_gamma(exp_gamma_family(2, 1.0)?, 1e-12)?;
    flows.push(("a6", a6.clone()));
    let pi = Permutation::new(&[2, 1])?;
    let b = BinaryOp::left_projection(2)?;
    flows.push(("transport", transport(&a6, &pi, &b.conjugate(&pi)?)?));
    flows.push(("product", flow_product(&rule, &[f1, f2])?));

    let mut ok = true;
    let mut parts = Vec::new();
    for (name, flow) in &flows {
        let r = kce_max(flow)?;
        ok &= r <= tol;
        parts.push(format!("{name} {r:.1e}"));
    }
    Ok((ok, parts.join(", ")))
}

fn criterion_2() -> Outcome {
    let kce_floor = 1e-4;
    let mut ok = true;
    let mut parts = Vec::new();

    // Eq. f/g: g scaled by 1.01
    let rejected = matches!(flow_fg(&z_add(2), sine_family(2, 1.01)?, DEFAULT_CHECK_TOL), Err(Error::FgConstraint { .. }));
    let unchecked = kce_max(&flow_fg(&z_add(2), sine_family(2, 1.01)?, f64::INFINITY)?)?;
    ok &= rejected && unchecked > kce_floor;
    parts.push(format!("f/g rejected {rejected}, unchecked KCE {unchecked:.1e}"));

    // Eq. gamma/g: gamma scaled by 1.01
    let rejected = matches!(flow_gamma(exp_gamma_family(2, 1.01)?, DEFAULT_CHECK_TOL), Err(Error::GammaConstraint { .. }));
    let unchecked = kce_max(&flow_gamma(exp_gamma_family(2, 1.01)?, f64::INFINITY)?)?;
    ok &= rejected && unchecked > kce_floor;
    parts.push(format!("gamma/g rejected {rejected}, unchecked KCE {unchecked:.1e}"));

    // permutation compatibility: every other associative target operation
    let src = flow_fg(&z_add(2), sine_family(2, 1.0)?, DEFAULT_CHECK_TOL)?;
    let pi = Permutation::new(&[2, 1])?;
    let good = z_add(2).conjugate(&pi)?;
    let mut tried = 0;
    let mut all_rejected = true;
    let mut worst_unchecked = f64::INFINITY;
    for a in all_associative_ops(2).into_iter().filter(|a| *a != good) {
        tried += 1;
        all_rejected &= matches!(transport(&src, &pi, &a), Err(Error::PermutationCompatibility { .. }));
        // the relabeled family evaluated under the wrong target rule
        let inner = transport(&src, &pi, &good)?;
        let forced = FlowFamily::from_fn(MulRule::maksimov(a), false, false, move |s, t| inner.eval(s, t));
        worst_unchecked = worst_unchecked.min(kce_max(&forced)?);
    }
    ok &= all_rejected && tried > 0;
    parts.push(format!(
        "transport: {tried} incompatible targets rejected {all_rejected}, smallest unchecked KCE {worst_unchecked:.1e}"
    ));
    Ok((ok, parts.join("; ")))
}

fn criterion_3() -> Outcome {
    let rule = group_rule();
    let mut rng = rng(303);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let q = random_q(&mut rng, &rule);
        let e = exp_mu(&rule, &q, 1.0, 1e-12)?;
        let y = ode_oracle(&rule, &q, 1.0, 1000)?;
        worst = worst.max(max_entry_gap(&e, &y));
    }
    Ok((worst <= 1e-8, format!("max entry gap {worst:.1e} over 20 Q")))
}

fn criterion_4() -> Outcome {
    let rule = group_rule();
    let mut rng = rng(404);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let q = random_q(&mut rng, &rule);
        let (s, t) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let lhs = exp_mu(&rule, &q, s + t, 1e-13)?;
        let rhs = rule.multiply(&exp_mu(&rule, &q, s, 1e-13)?, &exp_mu(&rule, &q, t, 1e-13)?)?;
        worst = worst.max(lhs.dist_l1(&rhs)?);
    }
    Ok((worst <= 1e-8, format!("max ‖exp((s+t)Q) - exp(sQ)*exp(tQ)‖ {worst:.1e}")))
}

fn criterion_5() -> Outcome {
    let rule = square_zero_rule(2);
    let mut rng = rng(505);
    let mut q = random_matrix(&mut rng, 2);
    q.set(1, 1, 1, 0.0)?;
    let sq = rule.multiply(&q, &q)?.norm_l1();
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let mut affine = rule.unit().expect("unital").clone();
        affine.axpy(t, &q)?;
        worst = worst.max(exp_mu(&rule, &q, t, 1e-12)?.dist_l1(&affine)?);
    }
    Ok((sq == 0.0 && worst <= 1e-12, format!("‖Q*Q‖ {sq:.1e}, max ‖exp(tQ) - I - tQ‖ {worst:.1e}")))
}

fn criterion_6() -> Outcome {
    let mut rng = rng(606);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for m in [2, 3] {
        let ops = [z_add(m), BinaryOp::right_projection(m)?, BinaryOp::left_projection(m)?, BinaryOp::constant(m, 1)?];
        for trial in 0..100 {
            let op = &ops[trial % ops.len()];
            let fast = MulRule::maksimov(op.clone());
            let general = maksimov_structure(op);
            let (a, b) = (random_matrix(&mut rng, m), random_matrix(&mut rng, m));
            let naive = maksimov_naive(op, &a, &b);
            worst = worst.max(max_entry_gap(&fast.multiply(&a, &b)?, &naive));
            worst = worst.max(max_entry_gap(&general.multiply(&a, &b)?, &naive));
            pairs += 1;
        }
    }
    Ok((worst <= 1e-12, format!("{pairs} pairs, max entry gap {worst:.1e}")))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [2, 3] {
        let right = BinaryOp::right_projection(m)?.is_uniformly_distributed();
        let left = BinaryOp::left_projection(m)?.is_uniformly_distributed();
        let constant = BinaryOp::constant(m, 1)?.is_uniformly_distributed();
        ok &= right && left && !constant;
        parts.push(format!("m={m}: a=j {right}, a=i {left}, a=1 {constant}"));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_8() -> Outcome {
    let rule = stochastic_rule(2, 808);
    let found = find_idempotents(&rule, &IdempotentOptions::default())?;
    let mut best = f64::INFINITY;
    for x in found.iter().filter(|x| x.norm_l1() > 1e-6) {
        best = best.min(rule.multiply(x, x)?.dist_l1(x)?);
    }
    Ok((best <= 1e-8, format!("{} idempotents, best nonzero residual {best:.1e}", found.len())))
}

fn criterion_9() -> Outcome {
    let samples = standard_pde_samples();
    let worst = |r: &PdeReport| r.max_forward.max(r.max_backward);
    let a5 = flow_fg(&z_add(2), sine_family(2, 1.0)?, DEFAULT_CHECK_TOL)?;
    let a6 = flow_gamma(exp_gamma_family(2, 1.0)?, 1e-12)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, flow) in [("a5", &a5), ("a6", &a6)] {
        let r1 = check_pde(flow, &samples, 1e-4, 1e-6)?;
        let r2 = check_pde(flow, &samples, 5e-5, 1e-6)?;
        let ratio = worst(&r1) / worst(&r2);
        ok &= r1.pass && (2.5..=6.0).contains(&ratio);
        parts.push(format!("{name} residual {:.1e} at h=1e-4, halving ratio {ratio:.2}", worst(&r1)));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_10() -> Outcome {
    let flow = flow_fg(&z_add(2), sine_family(2, 1.0)?, DEFAULT_CHECK_TOL)?;
    let mut worst: f64 = 0.0;
    for (s, _, t) in standard_grid(false) {
        worst = worst.max(max_entry_gap(&flow.eval(s, t)?, &flow.eval(s + 2.0 * PI, t + 2.0 * PI)?));
    }
    Ok((worst <= 1e-9, format!("max entry drift over 2π {worst:.1e}")))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("KCE closure for all eight constructions", criterion_1),
        ("constraint mutations are rejected or break the KCE", criterion_2),
        ("exp_mu agrees with the RK4 oracle", criterion_3),
        ("semigroup identity", criterion_4),
        ("nilpotent closed form", criterion_5),
        ("Maksimov fast path = naive loop = structure tensor", criterion_6),
        ("uniform-distribution verdicts", criterion_7),
        ("stochastic idempotent search", criterion_8),
        ("PDE residuals and second-order decay", criterion_9),
        ("periodicity of the sine family", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        writeln!(out, "acceptance {:>2} {verdict} {name}: {detail}", n + 1).unwrap();
        if !pass {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
