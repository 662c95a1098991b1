//! Reference computations shared by the integration tests. Everything here
//! is written directly from the model definitions and does not call the
//! bounding code under test.

#![allow(dead_code)]

use acebounds::tables::{cell_index, xw_index, TableForm};
use acebounds::{ContingencyTable, RelaxationParams, StratumTable};
use rand::Rng;

/// Number of latent states in the soundness oracle.
pub const LATENT_STATES: usize = 4;

/// A fully specified model over `W`, `X`, `Y` and a finite latent `U`,
/// together with the smallest relaxation it satisfies.
#[derive(Debug, Clone)]
pub struct LatentModel {
    pub p_w1: f64,
    /// `P(U = u | W = w)`, indexed `[w][u]`.
    pub pu_w: [[f64; LATENT_STATES]; 2],
    /// `P(X = 1 | W = w, U = u)`, indexed `[u][w]`.
    pub px: [[f64; 2]; LATENT_STATES],
    /// `P(Y = 1 | X = x, W = w, U = u)`, indexed `[u][xw_index(x, w)]`.
    pub py: [[f64; 4]; LATENT_STATES],
}

impl LatentModel {
    /// A random model. `spread` controls how far the latent strata move the
    /// conditionals away from each other.
    pub fn random<R: Rng>(rng: &mut R, spread: f64) -> Self {
        let p_w1 = rng.random_range(0.15..0.85);
        let mut pu_w = [[0.0; LATENT_STATES]; 2];
        let shared: Vec<f64> = (0..LATENT_STATES).map(|_| rng.random_range(0.1..1.0)).collect();
        for row in pu_w.iter_mut() {
            for (u, v) in row.iter_mut().enumerate() {
                *v = shared[u] * (1.0 + rng.random_range(-spread..=spread));
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let cx = [rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)];
        let cy = [rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)];
        let mut px = [[0.0; 2]; LATENT_STATES];
        let mut py = [[0.0; 4]; LATENT_STATES];
        for u in 0..LATENT_STATES {
            for w in 0..2 {
                px[u][w] = (cx[w] + rng.random_range(-spread..=spread)).clamp(0.01, 0.99);
            }
            for x in 0..2 {
                let shift = rng.random_range(-spread..=spread);
                for w in 0..2 {
                    let jitter = rng.random_range(-spread..=spread) * 0.5;
                    py[u][xw_index(x, w)] = (cy[x] + shift + jitter).clamp(0.0, 1.0);
                }
            }
        }
        Self { p_w1, pu_w, px, py }
    }

    fn p_w(&self, w: usize) -> f64 {
        if w == 1 {
            self.p_w1
        } else {
            1.0 - self.p_w1
        }
    }

    fn p_u(&self, u: usize) -> f64 {
        self.p_w(0) * self.pu_w[0][u] + self.p_w(1) * self.pu_w[1][u]
    }

    /// The observed joint `P(Y, X, W)` with `U` summed out.
    pub fn observed(&self) -> StratumTable {
        let mut cells = [0.0; 8];
        for w in 0..2 {
            for u in 0..LATENT_STATES {
                let pwu = self.p_w(w) * self.pu_w[w][u];
                for x in 0..2 {
                    let pxv = if x == 1 { self.px[u][w] } else { 1.0 - self.px[u][w] };
                    let p1 = self.py[u][xw_index(x, w)];
                    cells[cell_index(1, x, w)] += pwu * pxv * p1;
                    cells[cell_index(0, x, w)] += pwu * pxv * (1.0 - p1);
                }
            }
        }
        StratumTable::new(cells)
    }

    /// `P(Y = 1 | do(X = 1)) − P(Y = 1 | do(X = 0))`.
    pub fn ace(&self) -> f64 {
        let mut ace = 0.0;
        for w in 0..2 {
            for u in 0..LATENT_STATES {
                let pwu = self.p_w(w) * self.pu_w[w][u];
                ace += pwu * (self.py[u][xw_index(1, w)] - self.py[u][xw_index(0, w)]);
            }
        }
        ace
    }

    /// The tightest relaxation the model satisfies, widened by `slack`.
    pub fn implied_relaxation(&self, slack: f64) -> RelaxationParams {
        let obs = self.observed();
        let mut eps_w: f64 = 0.0;
        let mut eps_x: f64 = 0.0;
        let mut eps_y: f64 = 0.0;
        let mut b_lo: f64 = 1.0;
        let mut b_hi: f64 = 1.0;
        for u in 0..LATENT_STATES {
            for x in 0..2 {
                eps_w = eps_w.max((self.py[u][xw_index(x, 1)] - self.py[u][xw_index(x, 0)]).abs());
            }
            for w in 0..2 {
                let pw = obs.p_w(w);
                let p_x1 = (obs.get(0, 1, w) + obs.get(1, 1, w)) / pw;
                eps_x = eps_x.max((self.px[u][w] - p_x1).abs());
                for x in 0..2 {
                    let pxw = obs.get(0, x, w) + obs.get(1, x, w);
                    let p_y1 = obs.get(1, x, w) / pxw;
                    eps_y = eps_y.max((self.py[u][xw_index(x, w)] - p_y1).abs());
                }
                let ratio = self.pu_w[w][u] / self.p_u(u);
                b_lo = b_lo.min(ratio);
                b_hi = b_hi.max(ratio);
            }
        }
        RelaxationParams::new(
            (eps_w + slack).min(1.0),
            (eps_x + slack).min(1.0),
            (eps_y + slack).min(1.0),
            (b_lo - slack).max(1e-6),
            b_hi + slack,
        )
        .expect("implied relaxation is valid")
    }
}

/// A joint table over `(Y, X, W)` with `W ⊥ Y | X` and all parameters in
/// `[lo, 1 − lo]`.
pub fn chain_stratum<R: Rng>(rng: &mut R, lo: f64) -> (StratumTable, [f64; 2]) {
    let p_w1 = rng.random_range(lo..1.0 - lo);
    let px = [rng.random_range(lo..1.0 - lo), rng.random_range(lo..1.0 - lo)];
    let py0 = rng.random_range(lo..1.0 - lo);
    let py1 = rng.random_range(lo..1.0 - lo);
    (StratumTable::from_conditionals(p_w1, px, [py0, py0, py1, py1]), px)
}

/// A random joint table over `(Y, X, W)` with all cells positive.
pub fn random_stratum<R: Rng>(rng: &mut R) -> StratumTable {
    let mut cells = [0.0; 8];
    for c in cells.iter_mut() {
        *c = rng.random_range(0.01..1.0);
    }
    let s: f64 = cells.iter().sum();
    cells.iter_mut().for_each(|c| *c /= s);
    StratumTable::new(cells)
}

/// A probability-form table with `n_strata` chain strata.
pub fn chain_population<R: Rng>(rng: &mut R, n_strata: usize) -> ContingencyTable {
    let strata: Vec<StratumTable> = (0..n_strata).map(|_| chain_stratum(rng, 0.05).0).collect();
    let mut weights: Vec<f64> = (0..n_strata).map(|_| rng.random_range(0.1..1.0)).collect();
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= s);
    ContingencyTable {
        form: TableForm::Probabilities,
        strata,
        weights,
    }
}

/// `Σ_z P(z) [P(Y=1 | X=1, z) − P(Y=1 | X=0, z)]` from the raw cells.
pub fn backdoor_oracle(table: &ContingencyTable) -> f64 {
    let total: f64 = table.weights.iter().sum();
    let mut ace = 0.0;
    for (s, wt) in table.strata.iter().zip(&table.weights) {
        let arm = |x: usize| {
            let y1 = s.get(1, x, 0) + s.get(1, x, 1);
            let all = y1 + s.get(0, x, 0) + s.get(0, x, 1);
            y1 / all
        };
        ace += wt / total * (arm(1) - arm(0));
    }
    ace
}

/// Instrumental-variable bounds on the ACE written in the classic
/// `p_{yx.w} = P(Y = y, X = x | W = w)` notation, eight terms per side.
pub fn iv_bounds_oracle(s: &StratumTable) -> (f64, f64) {
    let pw = [s.p_w(0), s.p_w(1)];
    let p = |y: usize, x: usize, w: usize| s.get(y, x, w) / pw[w];
    let lower = [
        p(1, 1, 1) + p(0, 0, 0) - 1.0,
        p(1, 1, 0) + p(0, 0, 1) - 1.0,
        p(1, 1, 0) - p(1, 1, 1) - p(1, 0, 1) - p(0, 1, 0) - p(1, 0, 0),
        p(1, 1, 1) - p(1, 1, 0) - p(1, 0, 0) - p(0, 1, 1) - p(1, 0, 1),
        -p(0, 1, 1) - p(1, 0, 1),
        -p(0, 1, 0) - p(1, 0, 0),
        p(0, 0, 1) - p(0, 1, 1) - p(1, 0, 1) - p(0, 1, 0) - p(0, 0, 0),
        p(0, 0, 0) - p(0, 1, 0) - p(1, 0, 0) - p(0, 1, 1) - p(0, 0, 1),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let upper = [
        1.0 - p(0, 1, 1) - p(1, 0, 0),
        1.0 - p(0, 1, 0) - p(1, 0, 1),
        -p(0, 1, 0) + p(0, 1, 1) + p(0, 0, 1) + p(1, 1, 0) + p(0, 0, 0),
        -p(0, 1, 1) + p(1, 1, 1) + p(0, 0, 1) + p(0, 1, 0) + p(0, 0, 0),
        p(1, 1, 1) + p(0, 0, 1),
        p(1, 1, 0) + p(0, 0, 0),
        -p(1, 0, 1) + p(1, 1, 1) + p(0, 0, 1) + p(1, 1, 0) + p(1, 0, 0),
        -p(1, 0, 0) + p(1, 1, 0) + p(0, 0, 0) + p(1, 1, 1) + p(1, 0, 1),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    (lower, upper)
}

/// Whether `p` lies in the convex hull of `points`, decided by a small
/// feasibility LP over the convex weights.
pub fn in_convex_hull(points: &[Vec<f64>], p: &[f64], tol: f64) -> bool {
    let n = points.len();
    let d = p.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    // Σ λ_i v_i = p and Σ λ_i = 1, each as two inequalities with slack.
    for k in 0..=d {
        let row: Vec<f64> = (0..n).map(|i| if k < d { points[i][k] } else { 1.0 }).collect();
        let rhs = if k < d { p[k] } else { 1.0 };
        a.push(row.clone());
        b.push(rhs + tol);
        a.push(row.iter().map(|v| -v).collect());
        b.push(-rhs + tol);
    }
    for i in 0..n {
        let mut row = vec![0.0; n];
        row[i] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    let c = vec![0.0; n];
    matches!(
        acebounds::lp::simplex::maximize(&c, &a, &b).expect("membership LP solves"),
        acebounds::lp::simplex::LpStatus::Optimal(_)
    )
}

/// The instrumental inequality `max_x Σ_y max_w P(y, x | w) ≤ 1`, which
/// every distribution generated by the standard IV model satisfies.
pub fn iv_inequality_holds(s: &StratumTable, tol: f64) -> bool {
    let pw = [s.p_w(0), s.p_w(1)];
    (0..2).all(|x| {
        let total: f64 = (0..2)
            .map(|y| (0..2).map(|w| s.get(y, x, w) / pw[w]).fold(f64::NEG_INFINITY, f64::max))
            .sum();
        total <= 1.0 + tol
    })
}
