//! Choosing the relaxation: a grid of candidate settings, then a posterior
//! over the relaxation given effects estimated from other admissible sets.
//!
//! Run with `cargo run --release --example relaxation_posterior`.

use acebounds::engine::Engine;
use acebounds::relaxation::{aleph_mh, grid_search, reference_set, AlephPrior, Grid, MhConfig};
use acebounds::tables::TableForm;
use acebounds::{ContingencyTable, DirichletSpec, StratumTable};

fn main() {
    let counts = StratumTable::new([240.0, 70.0, 50.0, 210.0, 120.0, 50.0, 190.0, 270.0]);
    let table = ContingencyTable {
        form: TableForm::Counts,
        strata: vec![counts],
        weights: vec![counts.total()],
    };
    let prior = DirichletSpec::bdeu(10.0, 1).expect("valid prior");

    println!("grid points closest to an interval of length 0.3:");
    let grid = grid_search(&table, &prior, 0.3, &Grid::default(), Engine::Lp).expect("grid");
    for p in grid.iter().take(4) {
        match p.bound {
            Some(b) => println!("  k = {:.2}, c = {:.1}: [{:.3}, {:.3}]", p.k, p.c, b.lower, b.upper),
            None => println!("  k = {:.2}, c = {:.1}: infeasible", p.k, p.c),
        }
    }

    // Three other admissible sets whose back-door estimates cluster at 0.25.
    let pairs: Vec<(String, Vec<String>, f64)> = [("A", 0.24), ("B", 0.26), ("C", 0.25)]
        .iter()
        .map(|(s, a)| ("W".to_string(), vec![s.to_string()], *a))
        .collect();
    let refs = reference_set(&pairs, &[], true);
    let config = MhConfig {
        iters: 3000,
        burn_in: 500,
        ..MhConfig::default()
    };
    for (name, p) in [
        ("uniform", AlephPrior::Uniform),
        (
            "informative",
            AlephPrior::TruncatedGaussian {
                means: [0.2, 0.2, 0.95],
                variances: [0.1, 0.1, 0.05],
            },
        ),
    ] {
        let chain = aleph_mh(&p, &table, &refs, Engine::BackSub, &config).expect("chain runs");
        let m = chain.means();
        println!(
            "{name} prior: eps_w {:.3}, eps_xy {:.3}, beta {:.3}, effect {:.3}",
            m[0], m[1], m[2], m[3]
        );
    }
}
