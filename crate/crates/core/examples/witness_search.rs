//! Searching a covariate pool for witness/admissible-set pairs on data
//! simulated from a model with a known effect.
//!
//! Run with `cargo run --release --example witness_search`.

use acebounds::synthetic::{covariate_names, exact_ace, generate_model, ModelConfig};
use acebounds::witness::{summarize, wpp_search, SearchConfig, SummaryMode};
use acebounds::RelaxationParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let model = generate_model(&ModelConfig::new(true, true), &mut rng).expect("model");
    let data = model.sample(5000, &mut rng).expect("sample");
    println!("true effect: {:.3}", exact_ace(&model));

    let aleph = RelaxationParams::new(0.2, 0.2, 0.2, 1.0, 1.0).expect("valid relaxation");
    let config = SearchConfig {
        max_set_size: 2,
        n_samples: 300,
        seed: 11,
        ..SearchConfig::default()
    };
    let results = wpp_search(&data, &covariate_names(), "X", "Y", &aleph, &config).expect("search");
    println!("{} pairs survived", results.len());
    for r in results.iter().take(5) {
        let b = r.interval();
        println!(
            "  W = {:<3} Z = {:<16} score {:>7.2}  rejected {:>5.1}%  [{:.3}, {:.3}]",
            r.witness,
            format!("{:?}", r.admissible),
            r.score,
            100.0 * r.rejection_rate,
            b.lower,
            b.upper
        );
    }
    if !results.is_empty() {
        for mode in [SummaryMode::BestScore, SummaryMode::MinMax, SummaryMode::Quantile(0.025)] {
            let b = summarize(&results, mode).expect("nonempty");
            println!("{mode:?}: [{:.3}, {:.3}]", b.lower, b.upper);
        }
    }
}
