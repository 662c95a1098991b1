//! Engine comparison on random chain models `W → X → Y`: interval width
//! differences at population level and timing of posterior rejection runs.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Engine, EngineError};
use crate::lp::{BoundOutcome, RelaxationParams};
use crate::tables::{ContingencyTable, DirichletSpec, StratumTable, TableForm, DEFAULT_ESS};
use crate::witness::{falsification_test, WitnessError, DEFAULT_THRESHOLD};

/// A chain model with `P(W = 1)`, `P(X = 1 | W)` and `P(Y = 1 | X)` drawn
/// uniformly from `(0, 1)`. `Y` ignores `W` given `X`.
pub fn random_chain_stratum<R: Rng + ?Sized>(rng: &mut R) -> StratumTable {
    let pw: f64 = rng.random();
    let px = [rng.random(), rng.random()];
    let py_x: [f64; 2] = [rng.random(), rng.random()];
    StratumTable::from_conditionals(pw, px, [py_x[0], py_x[0], py_x[1], py_x[1]])
}

/// `n` independent draws from a stratum table, as counts.
pub fn sample_counts<R: Rng + ?Sized>(zeta: &StratumTable, n: usize, rng: &mut R) -> StratumTable {
    let p = zeta.normalized();
    let mut cdf = [0.0; 8];
    let mut acc = 0.0;
    for (i, c) in cdf.iter_mut().enumerate() {
        acc += p.cells[i];
        *c = acc;
    }
    let mut cells = [0.0; 8];
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let i = cdf.iter().position(|&c| u < c).unwrap_or(7);
        cells[i] += 1.0;
    }
    StratumTable::new(cells)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthGap {
    /// Back-substitution width minus LP width, one entry per model where
    /// both engines returned an interval.
    pub gaps: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    /// Models skipped because an engine reported infeasibility.
    pub skipped: usize,
}

/// Width differences between the engines on `n_models` population chain
/// tables under `aleph`.
pub fn width_gap_batch(n_models: usize, aleph: &RelaxationParams, seed: u64) -> Result<WidthGap, EngineError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaps = Vec::with_capacity(n_models);
    let mut skipped = 0;
    for _ in 0..n_models {
        let zeta = random_chain_stratum(&mut rng);
        let lp = Engine::Lp.stratum_bounds(&zeta, aleph)?;
        let bs = Engine::BackSub.stratum_bounds(&zeta, aleph)?;
        match (lp, bs) {
            (BoundOutcome::Bounded(l), BoundOutcome::Bounded(b)) => gaps.push(b.width() - l.width()),
            _ => skipped += 1,
        }
    }
    let n = gaps.len().max(1) as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let sd = (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt();
    Ok(WidthGap {
        gaps,
        mean,
        sd,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub runs: usize,
    pub samples_per_run: usize,
    pub lp_seconds: f64,
    pub backsub_seconds: f64,
    /// LP time over back-substitution time.
    pub ratio: f64,
}

/// Times one posterior rejection run of `n_samples` draws per engine on
/// each of `runs` chain models with `n_points` observations.
pub fn timing_batch(
    runs: usize,
    n_points: usize,
    n_samples: usize,
    aleph: &RelaxationParams,
    seed: u64,
) -> Result<TimingReport, WitnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = Duration::ZERO;
    let mut bs = Duration::ZERO;
    for r in 0..runs {
        let counts = sample_counts(&random_chain_stratum(&mut rng), n_points, &mut rng);
        let table = ContingencyTable {
            form: TableForm::Counts,
            strata: vec![counts],
            weights: vec![counts.total()],
        };
        let prior = DirichletSpec::bdeu(DEFAULT_ESS, 1)?;
        let t = Instant::now();
        falsification_test(&table, aleph, n_samples, DEFAULT_THRESHOLD, Engine::Lp, &prior, r as u64)?;
        lp += t.elapsed();
        let t = Instant::now();
        falsification_test(&table, aleph, n_samples, DEFAULT_THRESHOLD, Engine::BackSub, &prior, r as u64)?;
        bs += t.elapsed();
    }
    let (lp, bs) = (lp.as_secs_f64(), bs.as_secs_f64());
    Ok(TimingReport {
        runs,
        samples_per_run: n_samples,
        lp_seconds: lp,
        backsub_seconds: bs,
        ratio: lp / bs.max(f64::MIN_POSITIVE),
    })
}
