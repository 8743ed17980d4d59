use super::*;
use crate::verify::{check_kce, standard_grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn z2() -> BinaryOp {
    BinaryOp::from_fn(2, |j, n| (j + n) % 2 + 1).unwrap()
}

fn z3() -> BinaryOp {
    BinaryOp::from_fn(3, |j, n| (j + n - 2) % 3 + 1).unwrap()
}

fn group8() -> MulRule {
    MulRule::group(2, GroupTable::abelian(&[2, 2, 2]).unwrap()).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, scale: f64) -> CubicMatrix {
    CubicMatrix::from_fn(m, |_, _, _| rng.random_range(-1.0..1.0) * scale).unwrap()
}

fn sine_family(m: usize) -> ScalarFamily {
    let f: Vec<String> = (1..=m).map(|k| format!("2 + sin({k}*t)")).collect();
    let g: Vec<String> = (1..=m).map(|k| format!("1/({}*(2 + sin({k}*t)))", m * m)).collect();
    let f: Vec<&str> = f.iter().map(String::as_str).collect();
    let g: Vec<&str> = g.iter().map(String::as_str).collect();
    ScalarFamily::parse_fg(&f, &g).unwrap()
}

fn exp_gamma_family(m: usize) -> ScalarFamily {
    let entry = format!("exp(t)/{}", m * m);
    let g = vec!["exp(t)"; m];
    let row = vec![entry.as_str(); m];
    ScalarFamily::parse_gamma(&g, &vec![row; m]).unwrap()
}

use crate::mulrules::GroupTable;

#[test]
fn power_flow_matches_repeated_products() {
    let rule = group8();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let q = random_matrix(&mut rng, 2, 0.3);
    let flow = flow_power(&rule, &q).unwrap();
    assert_eq!(flow.tag(), FamilyTag::A1);
    assert!(flow.is_discrete() && flow.is_homogeneous());
    assert_eq!(flow.label(), "a1");
    let m13 = flow.eval(1.0, 3.0).unwrap();
    assert!(m13.approx_eq(&rule.multiply(&q, &q).unwrap(), 1e-14));
    assert!(flow.eval(2.0, 3.0).unwrap().approx_eq(&q, 0.0));
    assert!(check_kce(&flow, &standard_grid(true), 1e-10).unwrap().pass);
}

#[test]
fn power_flow_on_non_power_associative_rule_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let entries: Vec<(usize, usize, usize, f64)> = (0..40)
        .map(|_| (rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(1..=8), rng.random_range(-1.0..1.0)))
        .collect();
    let mut dedup = std::collections::BTreeMap::new();
    for (l, r, o, c) in entries {
        dedup.insert((l, r, o), c);
    }
    let flat: Vec<_> = dedup.into_iter().map(|((l, r, o), c)| (l, r, o, c)).collect();
    let rule = MulRule::general(crate::mulrules::StructureTensor::from_flat_1based(2, &flat).unwrap());
    let q = CubicMatrix::from_fn(2, |i, j, k| (i + j + k) as f64 * 0.1).unwrap();
    assert!(matches!(flow_power(&rule, &q), Err(Error::PowerAssociativity { .. })));
}

#[test]
fn discrete_domain_is_enforced() {
    let rule = group8();
    let flow = flow_power(&rule, rule.unit().unwrap()).unwrap();
    assert!(matches!(flow.eval(0.5, 2.0), Err(Error::Domain { .. })));
    assert!(matches!(flow.eval(2.0, 2.0), Err(Error::Domain { .. })));
    assert!(matches!(flow.eval(-1.0, 2.0), Err(Error::Domain { .. })));
    assert!(flow.eval(0.0, 5.0).is_ok());
}

#[test]
fn idempotent_flows() {
    let rule = group8();
    let zero = CubicMatrix::zero(2).unwrap();
    let flow = flow_idempotent(&rule, &zero, 1e-12).unwrap();
    assert_eq!(flow.eval(0.3, 7.0).unwrap(), zero);
    let unit = rule.unit().unwrap().clone();
    assert!(check_kce(&flow_idempotent(&rule, &unit, 1e-12).unwrap(), &standard_grid(false), 1e-12).unwrap().pass);
    // E_{e} + E_{g} with g != e is not idempotent under a group rule
    let mut not = unit.clone();
    not.set(2, 2, 2, 1.0).unwrap();
    assert!(matches!(flow_idempotent(&rule, &not, 1e-9), Err(Error::NotIdempotent(_))));
}

#[test]
fn exp_flow_basics() {
    let rule = group8();
    let zero = CubicMatrix::zero(2).unwrap();
    let (e, n) = exp_mu_terms(&rule, &zero, 1.0, 1e-12).unwrap();
    assert_eq!(&e, rule.unit().unwrap());
    assert_eq!(n, 0);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let q = random_matrix(&mut rng, 2, 0.05);
    let flow = flow_exp(&rule, &q, DEFAULT_EXP_TOL).unwrap();
    assert!(flow.is_homogeneous());
    let a = flow.eval(0.2, 1.0).unwrap();
    let b = flow.eval(1.2, 2.0).unwrap();
    assert!(a.approx_eq(&b, 1e-14));
    let r = check_kce(&flow, &standard_grid(false), 1e-8).unwrap();
    assert!(r.pass, "{}", r.max_residual);

    assert_eq!(flow_exp(&MulRule::a0(2).unwrap(), &q, 1e-12).err(), Some(Error::NotUnital));
}

#[test]
fn exp_of_nilpotent_is_affine() {
    // E_111 is the unit and every other product of basis matrices vanishes
    let m = 2;
    let n3 = m * m * m;
    let mut entries = Vec::new();
    for p in 1..=n3 {
        entries.push((1, p, p, 1.0));
        if p != 1 {
            entries.push((p, 1, p, 1.0));
        }
    }
    let rule = MulRule::general(crate::mulrules::StructureTensor::from_flat_1based(m, &entries).unwrap());
    assert!(rule.is_associative());
    let q = CubicMatrix::from_fn(m, |i, j, k| if (i, j, k) == (1, 1, 1) { 0.0 } else { (i + 2 * j + k) as f64 / 10.0 })
        .unwrap();
    assert_eq!(rule.multiply(&q, &q).unwrap(), CubicMatrix::zero(m).unwrap());
    for t in [0.5, 1.0, 2.0] {
        let e = exp_mu(&rule, &q, t, 1e-12).unwrap();
        let mut affine = rule.unit().unwrap().clone();
        affine.axpy(t, &q).unwrap();
        assert!(e.approx_eq(&affine, 1e-12));
    }
}

#[test]
fn invertible_flow() {
    let rule = group8();
    let path = MatrixPath::terms(2, &[(1, 1, 1, "2 + sin(t)"), (1, 1, 2, "0.5*cos(t)"), (2, 1, 1, "0.3")]).unwrap();
    let flow = flow_invertible(&rule, path, 1e-10).unwrap();
    assert!(!flow.is_homogeneous());
    let r = check_kce(&flow, &standard_grid(false), 1e-8).unwrap();
    assert!(r.pass, "{}", r.max_residual);
    // A[s] * A[s]^-1 = I along the diagonal limit, checked via s < t close together
    let near = flow.eval(1.0, 1.0 + 1e-9).unwrap();
    assert!(near.approx_eq(rule.unit().unwrap(), 1e-7));

    let singular = MatrixPath::terms(2, &[(1, 1, 1, "t - 1")]).unwrap();
    let flow = flow_invertible(&rule, singular, 1e-10).unwrap();
    assert_eq!(flow.eval(0.0, 1.0).err(), Some(Error::SingularAt(1.0)));
    assert!(flow.eval(0.0, 2.0).is_ok());
}

#[test]
fn invertible_flow_is_safe_to_share_across_threads() {
    let rule = group8();
    let path = MatrixPath::terms(2, &[(1, 1, 1, "2 + sin(t)"), (2, 2, 2, "0.4*cos(3*t)")]).unwrap();
    let flow = flow_invertible(&rule, path, 1e-10).unwrap();
    let serial: Vec<CubicMatrix> = (0..16).map(|k| flow.eval(0.1, 1.0 + k as f64 * 0.25).unwrap()).collect();
    let parallel: Vec<Vec<CubicMatrix>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4)
            .map(|_| scope.spawn(|| (0..16).map(|k| flow.eval(0.1, 1.0 + k as f64 * 0.25).unwrap()).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for run in parallel {
        assert_eq!(run, serial);
    }
}

#[test]
fn fg_sine_family() {
    let flow = flow_fg(&z2(), sine_family(2), DEFAULT_CHECK_TOL).unwrap();
    assert_eq!(flow.tag(), FamilyTag::A5);
    let r = check_kce(&flow, &[(0.0, 0.5, 1.0), (0.2, 0.7, 1.3)], 1e-9).unwrap();
    assert!(r.pass, "{}", r.max_residual);
    let m = flow.eval(0.4, 1.1).unwrap();
    for i in 1..=2 {
        for k in 1..=2 {
            assert_eq!(m.get(i, 1, k), m.get(i, 2, k));
            let want = (2.0 + (i as f64 * 0.4).sin()) / (4.0 * (2.0 + (k as f64 * 1.1).sin()));
            assert!((m.get(i, 1, k) - want).abs() < 1e-15);
        }
    }
    let tau = 2.0 * std::f64::consts::PI;
    for (s, _, t) in standard_grid(false) {
        let a = flow.eval(s, t).unwrap();
        let b = flow.eval(s + tau, t + tau).unwrap();
        assert!(a.approx_eq(&b, 1e-9));
    }
}

#[test]
fn fg_constant_family_and_rejections() {
    let fam = ScalarFamily::parse_fg(&["1", "1", "1"], &["1/9", "1/9", "1/9"]).unwrap();
    let flow = flow_fg(&z3(), fam, 1e-12).unwrap();
    let r = check_kce(&flow, &standard_grid(false), 1e-12).unwrap();
    assert!(r.pass);
    assert!(r.max_residual < 1e-15);

    let constant = BinaryOp::constant(2, 1).unwrap();
    assert_eq!(flow_fg(&constant, sine_family(2), 1e-9).err(), Some(Error::NotUniformlyDistributed));

    let bad = ScalarFamily::parse_fg(&["1", "1"], &["0.25", "0.2525"]).unwrap();
    assert!(matches!(flow_fg(&z2(), bad, 1e-9), Err(Error::FgConstraint { t, .. }) if t == 0.0));
}

#[test]
fn gamma_families() {
    // m = 1: M_111 = g(s) / g(t)
    let one = ScalarFamily::parse_gamma(&["2 + sin(t)"], &[vec!["2 + sin(t)"]]).unwrap();
    let flow = flow_gamma(one, 1e-12).unwrap();
    assert!((flow.eval(0.3, 1.7).unwrap().get(1, 1, 1) - (2.0 + 0.3f64.sin()) / (2.0 + 1.7f64.sin())).abs() < 1e-15);
    assert!(check_kce(&flow, &standard_grid(false), 1e-14).unwrap().pass);

    let flow = flow_gamma(exp_gamma_family(2), 1e-12).unwrap();
    assert_eq!(flow.rule().kind_name(), "a0");
    let m = flow.eval(0.5, 2.0).unwrap();
    assert!((m.get(2, 1, 2) - (-1.5f64).exp() / 4.0).abs() < 1e-15);
    let r = check_kce(&flow, &standard_grid(false), 1e-9).unwrap();
    assert!(r.pass, "{}", r.max_residual);

    // gamma = 1, g = 1 violates m * sum_j gamma_ij = g_i for m = 2
    let bad = ScalarFamily::parse_gamma(&["1", "1"], &[vec!["1", "1"], vec!["1", "1"]]).unwrap();
    assert!(matches!(flow_gamma(bad, 1e-9), Err(Error::GammaConstraint { i: 1, .. })));

    let vanishing = ScalarFamily::parse_gamma(&["t - 1"], &[vec!["t - 1"]])
        .unwrap()
        .with_check_grid(TimeGrid::new(0.0, 2.0, 0.5).unwrap());
    assert!(matches!(flow_gamma(vanishing, 1e-9), Err(Error::VanishingG { i: 1, .. })));
}

#[test]
fn transport_identity_and_round_trip() {
    let b = z3();
    let src = flow_fg(&b, sine_family(3), DEFAULT_CHECK_TOL).unwrap();
    let id = Permutation::identity(3);
    let same = transport(&src, &id, &b).unwrap();
    assert_eq!(same.eval(0.2, 0.9).unwrap(), src.eval(0.2, 0.9).unwrap());

    let pi = Permutation::new(&[2, 3, 1]).unwrap();
    let a = b.conjugate(&pi).unwrap();
    let there = transport(&src, &pi, &a).unwrap();
    let back = transport(&there, &pi.inverse(), &b).unwrap();
    assert_eq!(back.eval(0.2, 0.9).unwrap(), src.eval(0.2, 0.9).unwrap());
    assert!(matches!(transport(&src, &pi, &BinaryOp::right_projection(3).unwrap()), Err(Error::PermutationCompatibility { .. })));
}

#[test]
fn transport_of_gamma_family_with_swap() {
    let src = flow_gamma(exp_gamma_family(2), 1e-12).unwrap();
    let pi = Permutation::new(&[2, 1]).unwrap();
    let b = src.rule().maksimov_op().unwrap();
    let a = b.conjugate(&pi).unwrap();
    let flow = transport(&src, &pi, &a).unwrap();
    assert_eq!(flow.tag(), FamilyTag::Transport);
    let grid = standard_grid(false);
    let r = check_kce(&flow, &grid, 1e-9).unwrap();
    assert!(r.pass, "{}", r.max_residual);
    let r0 = check_kce(&src, &grid, 1e-9).unwrap();
    for (x, y) in r.residuals.iter().zip(&r0.residuals) {
        assert!((x - y).abs() <= 1e-15);
    }
}

/// Direct KCE under Maksimov(a) written as the five-index sum, independent of
/// the rule kernels.
fn kce_residual_naive(a: &BinaryOp, f: impl Fn(f64, f64) -> CubicMatrix, s: f64, tau: f64, t: f64) -> f64 {
    let m = a.dim();
    let (x, y, z) = (f(s, tau), f(tau, t), f(s, t));
    let mut prod = vec![0.0; m * m * m];
    for i in 1..=m {
        for l in 1..=m {
            for k in 1..=m {
                for n in 1..=m {
                    for r in 1..=m {
                        let j = a.apply(l, n);
                        prod[(i - 1) * m * m + (j - 1) * m + (r - 1)] += x.get(i, l, k) * y.get(k, n, r);
                    }
                }
            }
        }
    }
    z.as_slice().iter().zip(&prod).map(|(u, v)| (u - v).abs()).sum()
}

#[test]
fn transport_direction_matters_for_three_cycles() {
    // A non-constant discrete flow over Maksimov(b) with b = Z3 addition.
    let b = z3();
    let rule_b = MulRule::maksimov(b.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = random_matrix(&mut rng, 3, 0.2);
    let src = flow_power(&rule_b, &q).unwrap();
    // shift 3-cycle: pi(1) = 2, pi(2) = 3, pi(3) = 1
    let pi = Permutation::new(&[2, 3, 1]).unwrap();
    let a = b.conjugate(&pi).unwrap();
    assert_ne!(a, b);

    let moved = transport(&src, &pi, &a).unwrap();
    let direct = |s: f64, t: f64| moved.eval(s, t).unwrap();
    let inv = |s: f64, t: f64| {
        let m = src.eval(s, t).unwrap();
        CubicMatrix::from_fn(3, |i, j, r| m.get(pi.inverse_apply(i), pi.inverse_apply(j), pi.inverse_apply(r))).unwrap()
    };
    let mut worst_direct: f64 = 0.0;
    let mut worst_inv: f64 = 0.0;
    for (s, tau, t) in standard_grid(true) {
        worst_direct = worst_direct.max(kce_residual_naive(&a, direct, s, tau, t));
        worst_inv = worst_inv.max(kce_residual_naive(&a, inv, s, tau, t));
    }
    assert!(worst_direct < 1e-12, "{worst_direct}");
    assert!(worst_inv > 1e-3, "{worst_inv}");
}

#[test]
fn product_flows() {
    let rule = group8();
    assert!(rule.is_commutative());
    let p1 = MatrixPath::terms(2, &[(1, 1, 1, "2 + sin(t)"), (1, 2, 1, "0.3*t")]).unwrap();
    let p2 = MatrixPath::terms(2, &[(1, 1, 1, "1.5"), (2, 2, 2, "0.2*cos(t)")]).unwrap();
    let f1 = flow_invertible(&rule, p1, 1e-10).unwrap();
    let f2 = flow_invertible(&rule, p2, 1e-10).unwrap();
    let prod = flow_product(&rule, &[f1.clone(), f2.clone()]).unwrap();
    assert_eq!(prod.tag(), FamilyTag::Product);
    let r = check_kce(&prod, &standard_grid(false), 1e-8).unwrap();
    assert!(r.pass, "{}", r.max_residual);
    let swapped = flow_product(&rule, &[f2, f1.clone()]).unwrap();
    assert!(prod.eval(0.3, 1.0).unwrap().approx_eq(&swapped.eval(0.3, 1.0).unwrap(), 1e-12));

    let single = flow_product(&rule, &[f1.clone()]).unwrap();
    assert_eq!(single.eval(0.3, 1.0).unwrap(), f1.eval(0.3, 1.0).unwrap());
    let unit_flow = flow_idempotent(&rule, rule.unit().unwrap(), 1e-12).unwrap();
    let absorbed = flow_product(&rule, &[f1.clone(), unit_flow]).unwrap();
    assert!(absorbed.eval(0.3, 1.0).unwrap().approx_eq(&f1.eval(0.3, 1.0).unwrap(), 1e-13));

    assert_eq!(flow_product(&rule, &[]).err(), Some(Error::EmptyFactors));
    let dihedral = MulRule::group(2, GroupTable::dihedral(4).unwrap()).unwrap();
    let d = flow_idempotent(&dihedral, dihedral.unit().unwrap(), 1e-12).unwrap();
    assert_eq!(flow_product(&dihedral, &[d.clone(), d]).err(), Some(Error::NotCommutative));
    let other = flow_idempotent(&dihedral, dihedral.unit().unwrap(), 1e-12).unwrap();
    assert_eq!(flow_product(&rule, &[f1, other]).err(), Some(Error::RuleMismatch));
}

#[test]
fn time_grid_points() {
    let g = TimeGrid::new(0.0, 1.0, 0.25).unwrap();
    assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    assert_eq!(TimeGrid::default().points().len(), 201);
    assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
    assert!(TimeGrid::new(0.0, 1.0, 0.0).is_err());
}
