//! Structural properties of a few algebras of cubic matrices: group-induced
//! rules, a Maksimov rule and a random cubic-stochastic µ.

use cubicflow::mulrules::{analyze, find_idempotents, inverse, AnalyzeOptions, IdempotentOptions};
use cubicflow::{CubicMatrix, GroupTable, MulRule, Result, StructureTensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn stochastic_rule(m: usize, seed: u64) -> Result<MulRule> {
    let n = m * m * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for p in 1..=n {
        for q in 1..=n {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = w.iter().sum();
            entries.extend(w.iter().enumerate().map(|(r, c)| (p, q, r + 1, c / total)));
        }
    }
    Ok(MulRule::general(StructureTensor::from_flat_1based(m, &entries)?))
}

pub fn run_example() -> Result<()> {
    let opts = AnalyzeOptions::default();

    let abelian = MulRule::group(2, GroupTable::abelian(&[2, 2, 2])?)?;
    let dihedral = MulRule::group(2, GroupTable::dihedral(4)?)?;
    for (name, rule) in [("Z2^3", &abelian), ("D4", &dihedral)] {
        let r = analyze(rule, &opts)?;
        println!(
            "{name}: associative {} commutative {} unital {} norm constant {}",
            r.associative, r.commutative, r.unital, r.norm_constant
        );
    }

    let x = CubicMatrix::from_fn(2, |i, j, k| if (i, j, k) == (1, 1, 1) { 2.0 } else { 0.1 * (i + j) as f64 })?;
    let inv = inverse(&abelian, &x, 1e-10)?;
    let back = abelian.multiply(&x, &inv)?;
    println!("‖x * x^-1 - I‖ = {:.1e}", back.dist_l1(abelian.unit().unwrap())?);

    let mu = stochastic_rule(2, 42)?;
    let idem = find_idempotents(&mu, &IdempotentOptions::default())?;
    for e in idem.iter().filter(|e| e.norm_l1() > 0.0) {
        let res = mu.multiply(e, e)?.dist_l1(e)?;
        println!("stochastic µ idempotent with ‖X*X - X‖ = {res:.1e}, ‖X‖ = {:.6}", e.norm_l1());
    }
    let r = analyze(&mu, &opts)?;
    println!("stochastic µ: associative {} power-associative (sampled) {}", r.associative, r.power_assoc_sampled.passed());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
