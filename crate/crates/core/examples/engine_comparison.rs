//! The two bounding engines on random chain models: how much wider the
//! closed-form bounds are, and how much faster.
//!
//! Run with `cargo run --release --example engine_comparison`.

use acebounds::bench::{timing_batch, width_gap_batch};
use acebounds::RelaxationParams;

fn main() {
    for (bl, bh) in [(1.0, 1.0), (0.9, 1.1)] {
        let aleph = RelaxationParams::new(0.2, 0.2, 0.2, bl, bh).expect("valid relaxation");
        let gap = width_gap_batch(100, &aleph, 1).expect("engines run");
        println!(
            "beta = [{bl}, {bh}]: back-substitution is wider by {:.3} on average (sd {:.3}, {} models)",
            gap.mean,
            gap.sd,
            gap.gaps.len()
        );
    }
    let aleph = RelaxationParams::new(0.2, 0.2, 0.2, 0.9, 1.1).expect("valid relaxation");
    let t = timing_batch(3, 5000, 100, &aleph, 2).expect("runs complete");
    println!(
        "100-draw rejection runs: LP {:.3}s, back-substitution {:.4}s, ratio {:.0}x",
        t.lp_seconds / t.runs as f64,
        t.backsub_seconds / t.runs as f64,
        t.ratio
    );
}
