//! Standard instrumental-variable bounds: the closed form and the linear
//! program agree when the witness has no direct effect and no latent link.
//!
//! Run with `cargo run --example standard_iv`.

use acebounds::engine::Engine;
use acebounds::symbolic::balke_pearl_siv;
use acebounds::{RelaxationParams, StratumTable};

fn main() {
    // Encouragement design: W randomizes, X partly complies, Y responds.
    let zeta = StratumTable::from_conditionals(0.5, [0.15, 0.85], [0.20, 0.25, 0.55, 0.60]);

    let closed = balke_pearl_siv(&zeta);
    let lp = Engine::Lp
        .stratum_bounds(&zeta, &RelaxationParams::standard_iv())
        .expect("valid table")
        .interval()
        .expect("table satisfies the IV inequalities");
    println!("closed form: [{:.4}, {:.4}]", closed.lower, closed.upper);
    println!("LP:          [{:.4}, {:.4}]", lp.lower, lp.upper);

    let naive = zeta.naive_contrast().unwrap_or(f64::NAN);
    println!("naive contrast P(Y|X=1) - P(Y|X=0) = {naive:.4}");

    // Widening the assumptions can only widen the interval.
    for eps in [0.0, 0.05, 0.1, 0.2] {
        let aleph = RelaxationParams::new(eps, 1.0, 1.0, 1.0, 1.0).expect("valid relaxation");
        let b = Engine::Lp.stratum_bounds(&zeta, &aleph).expect("valid table").interval().unwrap();
        println!("eps_w = {eps:.2}: [{:.4}, {:.4}] width {:.4}", b.lower, b.upper, b.width());
    }
}
