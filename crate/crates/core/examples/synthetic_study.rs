//! A small version of the simulation study: random causal models with
//! hidden confounders, estimators compared against the true effect.
//!
//! Run with `cargo run --release --example synthetic_study`. Set
//! `ACEBOUNDS_THREADS` to limit the worker count.

use acebounds::cli::configure_workers;
use acebounds::synthetic::{run_study, StudyConfig};

fn main() {
    configure_workers().expect("valid worker count");
    let config = StudyConfig {
        n_datasets: 5,
        n_points: 2000,
        mc_samples: 200,
        k_eps: vec![0.1, 0.2, 0.3],
        max_set_size: 2,
        ..StudyConfig::full_scale(true, true)
    };
    let report = run_study(&config);
    print!("{}", report.to_text());
    for f in &report.failures {
        eprintln!("{f}");
    }
}
