//! Checks of the synthetic generator against direct simulation and against
//! population-level independence facts.

use acebounds::synthetic::{covariate_names, exact_ace, generate_model, ModelConfig, SyntheticModel};
use acebounds::tables::JointTable;
use acebounds::witness::{rule1_decision, rule1_scores, subsets_up_to};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `I(A; B | C)` in nats from a population joint table.
fn cmi(pv: &JointTable, a: usize, b: usize, c: &[usize]) -> f64 {
    let mut vars = vec![a, b];
    vars.extend_from_slice(c);
    let joint = pv.marginal(&vars);
    let k = c.len();
    let mut p_ac = vec![0.0; 2 << k];
    let mut p_bc = vec![0.0; 2 << k];
    let mut p_c = vec![0.0; 1 << k];
    for (i, &p) in joint.iter().enumerate() {
        let (av, bv, cv) = (i & 1, (i >> 1) & 1, i >> 2);
        p_ac[(cv << 1) | av] += p;
        p_bc[(cv << 1) | bv] += p;
        p_c[cv] += p;
    }
    let mut out = 0.0;
    for (i, &p) in joint.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        let (av, bv, cv) = (i & 1, (i >> 1) & 1, i >> 2);
        out += p * (p * p_c[cv] / (p_ac[(cv << 1) | av] * p_bc[(cv << 1) | bv])).ln();
    }
    out.max(0.0)
}

/// Monte Carlo `P(Y=1 | do(X=1)) − P(Y=1 | do(X=0))` and its standard error.
fn simulated_ace(model: &SyntheticModel, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = [0.0; 2];
    for (x, m) in mean.iter_mut().enumerate() {
        let hits = (0..n)
            .filter(|_| {
                let cfg = model.forward(&mut rng, Some(x as u8));
                cfg[cfg.len() - 1] == 1
            })
            .count();
        *m = hits as f64 / n as f64;
    }
    let se = ((mean[0] * (1.0 - mean[0]) + mean[1] * (1.0 - mean[1])) / n as f64).sqrt();
    (mean[1] - mean[0], se)
}

#[test]
fn exact_ace_matches_forward_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for (i, (solvable, hard)) in [(true, false), (false, false), (true, true), (false, true)].into_iter().enumerate() {
        for j in 0..2 {
            let m = generate_model(&ModelConfig::new(solvable, hard), &mut rng).unwrap();
            let exact = exact_ace(&m);
            let (sim, se) = simulated_ace(&m, 1_000_000, (10 * i + j) as u64);
            assert!(
                (exact - sim).abs() <= 3.0 * se.max(1e-4),
                "model {i}/{j}: exact {exact}, simulated {sim} ± {se}"
            );
        }
    }
}

/// Population-valid Rule 1 pairs among the covariates: `W ⊥̸ Y | Z` and
/// `W ⊥ Y | Z ∪ {X}` exactly, with the dependence measured in nats.
fn valid_pairs(pv: &JointTable) -> Vec<(usize, Vec<usize>, f64)> {
    let x = pv.var_index("X").unwrap();
    let y = pv.var_index("Y").unwrap();
    let covs: Vec<usize> = covariate_names().iter().map(|n| pv.var_index(n).unwrap()).collect();
    let mut out = Vec::new();
    for &w in &covs {
        let rest: Vec<usize> = covs.iter().copied().filter(|&c| c != w).collect();
        for z in subsets_up_to(&rest, rest.len()) {
            let dep = cmi(pv, w, y, &z);
            let mut zx = z.clone();
            zx.push(x);
            if dep > 1e-9 && cmi(pv, w, y, &zx) < 1e-12 {
                out.push((w, z, dep));
            }
        }
    }
    out
}

#[test]
fn solvable_models_have_a_population_rule1_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..6 {
        let m = generate_model(&ModelConfig::new(true, i % 2 == 1), &mut rng).unwrap();
        let pairs = valid_pairs(&m.population_table());
        assert!(!pairs.is_empty(), "model {i} has no valid pair");
    }
}

#[test]
fn rule1_recovers_a_population_pair_from_large_samples() {
    // Dependence below this many nats is treated as undetectable, which is
    // the population threshold for the check.
    const MIN_DEPENDENCE: f64 = 1e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut checked = 0;
    for i in 0..10 {
        let m = generate_model(&ModelConfig::new(true, false), &mut rng).unwrap();
        let pv = m.population_table();
        let pairs = valid_pairs(&pv);
        let Some((w, z, dep)) = pairs.into_iter().max_by(|a, b| a.2.total_cmp(&b.2)) else {
            panic!("model {i} has no valid pair");
        };
        if dep < MIN_DEPENDENCE {
            continue;
        }
        checked += 1;
        let data = m.sample(100_000, &mut rng).unwrap();
        // Population table and dataset share the column order.
        let s = rule1_scores(&data, pv.var_index("Y").unwrap(), pv.var_index("X").unwrap(), w, &z, 10.0).unwrap();
        assert!(rule1_decision(&s), "model {i}: pair ({w}, {z:?}) with dependence {dep} not detected: {s:?}");
    }
    assert!(checked >= 5, "only {checked} models had a detectable pair");
}
