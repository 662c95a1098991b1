//! The posterior rejection test on data that respects the relaxation and on
//! data that breaks it.
//!
//! Run with `cargo run --release --example falsification`.

use acebounds::bench::sample_counts;
use acebounds::engine::Engine;
use acebounds::tables::TableForm;
use acebounds::witness::{falsification_test, DEFAULT_THRESHOLD};
use acebounds::{ContingencyTable, DirichletSpec, RelaxationParams, StratumTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run(name: &str, zeta: StratumTable, rng: &mut ChaCha8Rng) {
    let counts = sample_counts(&zeta, 2000, rng);
    let table = ContingencyTable {
        form: TableForm::Counts,
        strata: vec![counts],
        weights: vec![counts.total()],
    };
    let aleph = RelaxationParams::new(0.05, 0.05, 0.05, 1.0, 1.0).expect("valid relaxation");
    let prior = DirichletSpec::bdeu(10.0, 1).expect("valid prior");
    let o = falsification_test(&table, &aleph, 500, DEFAULT_THRESHOLD, Engine::BackSub, &prior, 3).expect("test runs");
    println!(
        "{name}: {:.1}% of posterior draws rejected, model {}",
        100.0 * o.rejection_rate,
        if o.accepted { "kept" } else { "rejected" }
    );
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // W -> X -> Y: the witness acts only through the treatment.
    run(
        "chain",
        StratumTable::from_conditionals(0.5, [0.2, 0.8], [0.3, 0.3, 0.7, 0.7]),
        &mut rng,
    );
    // Y copies W whatever X is: a strong direct effect.
    run(
        "direct effect",
        StratumTable::from_conditionals(0.5, [0.2, 0.8], [0.05, 0.95, 0.05, 0.95]),
        &mut rng,
    );
}
