//! Geometry of the relaxed model: the polygon of `(η_x0, η_x1)` pairs
//! allowed by a bound on the direct effect of the witness, and the joint
//! parameter polytope converted to inequalities.
//!
//! Run with `cargo run --example polytope_vertices`.

use acebounds::polytope::{dual_conversion, eta_polygon_vertices, relaxed_vertices, DeltaBox, EtaBox};

fn main() {
    for eps_w in [0.1, 0.3, 0.7] {
        let poly = eta_polygon_vertices(0.0, 1.0, 0.0, 1.0, eps_w).expect("unit boxes are feasible");
        println!("eps_w = {eps_w}: {} vertices", poly.len());
        for p in &poly.points {
            println!("  ({:.2}, {:.2})", p[0], p[1]);
        }
    }

    let eta = EtaBox::around([0.3, 0.35, 0.6, 0.55], 0.2);
    let delta = DeltaBox::around([0.25, 0.7], 0.2);
    let v = relaxed_vertices(&eta, &delta, 0.15).expect("feasible boxes");
    let h = dual_conversion(&v).expect("well conditioned");
    println!(
        "joint polytope: {} vertices in dimension {}, {} facets",
        v.len(),
        v.dim,
        h.n_rows()
    );
    let worst = v.points.iter().map(|p| h.max_violation(p)).fold(f64::NEG_INFINITY, f64::max);
    println!("largest facet value at a vertex: {worst:.2e} (at most zero up to round-off)");
}
