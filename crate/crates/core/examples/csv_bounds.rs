//! Reading a CSV file and bounding the effect for a chosen witness and
//! admissible set, as the `bounds` command does.
//!
//! Run with `cargo run --release --example csv_bounds`.

use acebounds::synthetic::{generate_model, ModelConfig};
use acebounds::witness::{evaluate_pair, SearchConfig};
use acebounds::{BinaryDataset, RelaxationParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Write some simulated data to a temporary CSV file.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let model = generate_model(&ModelConfig::new(true, false), &mut rng)?;
    let path = std::env::temp_dir().join("acebounds_example.csv");
    model.sample(3000, &mut rng)?.write_csv(std::fs::File::create(&path)?)?;

    let data = BinaryDataset::from_csv_path(&path, b',')?;
    println!("{} rows, columns {:?}", data.n_rows(), data.names());
    let aleph = RelaxationParams::new(0.1, 0.1, 0.1, 1.0, 1.0)?;
    let config = SearchConfig {
        n_samples: 300,
        ..SearchConfig::default()
    };
    let ev = evaluate_pair(&data, "Z2", &["Z1"], "X", "Y", &aleph, &config)?;
    println!(
        "Rule 1 {}, {:.1}% of draws rejected, pair {}",
        if ev.rule1 { "holds" } else { "fails" },
        100.0 * ev.result.rejection_rate,
        if ev.accepted { "kept" } else { "rejected" }
    );
    if !ev.result.samples.is_empty() {
        let b = ev.result.interval();
        let q = ev.result.quantiles(0.025);
        println!("interval [{:.3}, {:.3}], 95% marginal band [{:.3}, {:.3}]", b.lower, b.upper, q.lower, q.upper);
    }
    std::fs::remove_file(&path)?;
    Ok(())
}
