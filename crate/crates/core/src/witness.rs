//! Witness and admissible-set search.
//!
//! A candidate pair `(W, Z)` is proposed when Bayesian model selection
//! favours `W ⊥̸ Y | Z` and `W ⊥ Y | Z ∪ {X}`. Each proposal is then tested by
//! drawing contingency tables from the Dirichlet posterior and asking the
//! bounding engine whether the relaxed model can produce them. Pairs with
//! too many impossible draws are discarded; the rest carry the ACE bounds
//! of their accepted draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::lp::{BoundOutcome, IntervalBound, RelaxationParams};
use crate::tables::{
    bdeu_log_marginal, counts_by_index, dirichlet_sample, posterior_mean_table, BinaryDataset, ContingencyTable,
    DirichletSpec, TableError, DEFAULT_ESS,
};

/// Rejection fraction above which a model is considered falsified.
pub const DEFAULT_THRESHOLD: f64 = 0.95;
/// Largest covariate pool searched exhaustively unless configured otherwise.
pub const DEFAULT_MAX_POOL: usize = 12;
/// Posterior draws per candidate.
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("covariate pool has {size} columns, more than the cap of {cap}")]
    PoolTooLarge { size: usize, cap: usize },
    #[error("invalid roles: {0}")]
    InvalidRoles(String),
    #[error("at least one posterior sample is required")]
    NoSamples,
    #[error("threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("every posterior draw failed in the bounding engine: {0}")]
    AllDrawsFailed(String),
    #[error("cannot summarize an empty result set")]
    EmptyResults,
    #[error("quantile level must lie in (0, 1), got {0}")]
    InvalidQuantile(f64),
}

/// Log marginal likelihoods of the four Rule 1 hypotheses, all scored on
/// the conditional table of `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rule1Scores {
    /// `W ⊥̸ Y | Z`: parents `{W} ∪ Z`.
    pub m1: f64,
    /// `W ⊥ Y | Z`: parents `Z`.
    pub m2: f64,
    /// `W ⊥ Y | Z ∪ {X}`: parents `Z ∪ {X}`.
    pub m3: f64,
    /// `W ⊥̸ Y | Z ∪ {X}`: parents `{W, X} ∪ Z`.
    pub m4: f64,
}

/// Scores the four hypotheses with BDeu marginal likelihoods of equivalent
/// sample size `ess`. Columns are given by index.
pub fn rule1_scores(
    data: &BinaryDataset,
    y: usize,
    x: usize,
    w: usize,
    z: &[usize],
    ess: f64,
) -> Result<Rule1Scores, WitnessError> {
    if y == x || y == w || x == w || z.iter().any(|&c| c == x || c == y || c == w) {
        return Err(WitnessError::InvalidRoles(
            "treatment, outcome, witness and admissible set must be disjoint".into(),
        ));
    }
    let score = |parents: Vec<usize>| bdeu_log_marginal(&data.family_counts(y, &parents), ess);
    let with = |extra: &[usize]| extra.iter().copied().chain(z.iter().copied()).collect::<Vec<_>>();
    Ok(Rule1Scores {
        m1: score(with(&[w])),
        m2: score(with(&[])),
        m3: score(with(&[x])),
        m4: score(with(&[w, x])),
    })
}

/// Rule 1 fires when both Bayes factors strictly favour its premises.
pub fn rule1_decision(s: &Rule1Scores) -> bool {
    s.m1 > s.m2 && s.m3 > s.m4
}

/// Sum of the two log Bayes factors.
pub fn wpp_score(s: &Rule1Scores) -> f64 {
    (s.m1 - s.m2) + (s.m3 - s.m4)
}

/// Result of the posterior rejection test for one relaxation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsificationOutcome {
    pub accepted: bool,
    /// `n_rejected / n_samples`.
    pub rejection_rate: f64,
    pub n_samples: usize,
    pub n_rejected: usize,
    /// Draws on which the engine failed; neither accepted nor rejected.
    pub n_failed: usize,
    pub first_failure: Option<String>,
    /// Stratified ACE bounds of the accepted draws, in draw order.
    pub samples: Vec<IntervalBound>,
}

/// The model survives unless the rejection rate strictly exceeds the
/// threshold.
pub fn survives(rejection_rate: f64, threshold: f64) -> bool {
    rejection_rate <= threshold
}

/// RNG for draw `i` of a run seeded with `seed`: one ChaCha stream per draw,
/// so results do not depend on how draws are spread over workers.
pub(crate) fn draw_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Posterior rejection test: `n_samples` tables are drawn from the
/// unconstrained Dirichlet posterior, and a draw is rejected when the
/// engine reports it infeasible. The model is accepted unless the rejection
/// rate strictly exceeds `threshold`.
pub fn falsification_test(
    counts: &ContingencyTable,
    aleph: &RelaxationParams,
    n_samples: usize,
    threshold: f64,
    engine: Engine,
    prior: &DirichletSpec,
    seed: u64,
) -> Result<FalsificationOutcome, WitnessError> {
    let mut out = falsification_multi(counts, std::slice::from_ref(aleph), n_samples, threshold, engine, prior, seed)?;
    Ok(out.remove(0))
}

/// [`falsification_test`] for several relaxations sharing the same draws.
pub fn falsification_multi(
    counts: &ContingencyTable,
    alephs: &[RelaxationParams],
    n_samples: usize,
    threshold: f64,
    engine: Engine,
    prior: &DirichletSpec,
    seed: u64,
) -> Result<Vec<FalsificationOutcome>, WitnessError> {
    if n_samples == 0 {
        return Err(WitnessError::NoSamples);
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(WitnessError::InvalidThreshold(threshold));
    }
    prior.validate()?;
    let engine = engine.for_sampling();
    let per_draw: Vec<Vec<Result<BoundOutcome, EngineError>>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let table = dirichlet_sample(counts, prior, &mut draw_rng(seed, i));
            alephs.iter().map(|a| engine.table_bounds(&table, a)).collect()
        })
        .collect();

    let mut outcomes = Vec::with_capacity(alephs.len());
    for k in 0..alephs.len() {
        let mut o = FalsificationOutcome {
            accepted: false,
            rejection_rate: 0.0,
            n_samples,
            n_rejected: 0,
            n_failed: 0,
            first_failure: None,
            samples: Vec::new(),
        };
        for draw in &per_draw {
            match &draw[k] {
                Ok(BoundOutcome::Bounded(b)) => o.samples.push(*b),
                Ok(BoundOutcome::Infeasible) => o.n_rejected += 1,
                Err(e) => {
                    o.n_failed += 1;
                    o.first_failure.get_or_insert_with(|| e.to_string());
                }
            }
        }
        if o.n_failed == n_samples {
            return Err(WitnessError::AllDrawsFailed(o.first_failure.unwrap_or_default()));
        }
        o.rejection_rate = o.n_rejected as f64 / n_samples as f64;
        o.accepted = survives(o.rejection_rate, threshold) && !o.samples.is_empty();
        outcomes.push(o);
    }
    Ok(outcomes)
}

/// Search settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest admissible set considered.
    pub max_set_size: usize,
    /// Columns never used as witness.
    pub forbidden_witnesses: Vec<String>,
    /// Columns never placed in an admissible set.
    pub forbidden_members: Vec<String>,
    pub n_samples: usize,
    pub threshold: f64,
    pub engine: Engine,
    pub ess: f64,
    pub seed: u64,
    /// Hard cap on the pool size.
    pub max_pool: usize,
    /// With the `auto` engine, how many top-scoring pairs get the LP run on
    /// their posterior mean table.
    pub refine_top: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_set_size: usize::MAX,
            forbidden_witnesses: Vec::new(),
            forbidden_members: Vec::new(),
            n_samples: DEFAULT_SAMPLES,
            threshold: DEFAULT_THRESHOLD,
            engine: Engine::Auto,
            ess: DEFAULT_ESS,
            seed: 0,
            max_pool: DEFAULT_MAX_POOL,
            refine_top: 1,
        }
    }
}

/// One accepted witness/admissible-set pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult {
    pub witness: String,
    pub admissible: Vec<String>,
    pub scores: Rule1Scores,
    pub score: f64,
    pub rejection_rate: f64,
    pub n_failed: usize,
    /// Posterior mean of the lower and of the upper bound.
    pub expected: IntervalBound,
    /// LP bounds at the posterior mean table, when computed and feasible.
    pub refined: Option<IntervalBound>,
    pub samples: Vec<IntervalBound>,
}

impl WitnessResult {
    /// The reported interval: the refined LP bounds when available,
    /// otherwise the posterior expected bounds.
    pub fn interval(&self) -> IntervalBound {
        self.refined.unwrap_or(self.expected)
    }

    /// Marginal quantiles `(q of the lower bounds, 1 − q of the upper
    /// bounds)`. This is not a joint credible region.
    pub fn quantiles(&self, q: f64) -> IntervalBound {
        let lo: Vec<f64> = self.samples.iter().map(|b| b.lower).collect();
        let hi: Vec<f64> = self.samples.iter().map(|b| b.upper).collect();
        IntervalBound::new(quantile(lo, q), quantile(hi, 1.0 - q))
    }

    /// Compact JSON record: witness, set, score, rejection rate, expected
    /// and reported bounds, 2.5% / 97.5% quantiles.
    pub fn to_json(&self) -> serde_json::Value {
        let q = self.quantiles(0.025);
        serde_json::json!({
            "witness": self.witness,
            "admissible_set": self.admissible,
            "score": self.score,
            "rule1_scores": self.scores,
            "rejection_rate": self.rejection_rate,
            "failed_draws": self.n_failed,
            "expected_lower": self.expected.lower,
            "expected_upper": self.expected.upper,
            "reported_lower": self.interval().lower,
            "reported_upper": self.interval().upper,
            "quantile_lower_0.025": q.lower,
            "quantile_upper_0.975": q.upper,
            "n_accepted_samples": self.samples.len(),
        })
    }
}

fn quantile(mut v: Vec<f64>, q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    if i + 1 < v.len() {
        v[i] * (1.0 - frac) + v[i + 1] * frac
    } else {
        v[i]
    }
}

fn mean_interval(samples: &[IntervalBound]) -> IntervalBound {
    let n = samples.len() as f64;
    IntervalBound::new(
        samples.iter().map(|b| b.lower).sum::<f64>() / n,
        samples.iter().map(|b| b.upper).sum::<f64>() / n,
    )
}

/// A candidate pair by column index.
#[derive(Debug, Clone)]
struct Candidate {
    witness: usize,
    set: Vec<usize>,
}

/// All subsets of `items` with at most `max` members, smallest first.
pub fn subsets_up_to(items: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for size in 1..=max.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            // Advance to the next combination in lexicographic order.
            let mut k = size;
            while k > 0 && idx[k - 1] == items.len() - size + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Exhaustive search for one relaxation. See [`wpp_search_multi`].
pub fn wpp_search<S: AsRef<str>>(
    data: &BinaryDataset,
    pool: &[S],
    x: &str,
    y: &str,
    aleph: &RelaxationParams,
    config: &SearchConfig,
) -> Result<Vec<WitnessResult>, WitnessError> {
    Ok(wpp_search_multi(data, pool, x, y, std::slice::from_ref(aleph), config)?.remove(0))
}

/// Exhaustive search evaluated under several relaxations at once. Rule 1
/// scores and posterior draws are shared; each relaxation gets its own
/// accepted list, ordered by score (ties by witness, then set).
pub fn wpp_search_multi<S: AsRef<str>>(
    data: &BinaryDataset,
    pool: &[S],
    x: &str,
    y: &str,
    alephs: &[RelaxationParams],
    config: &SearchConfig,
) -> Result<Vec<Vec<WitnessResult>>, WitnessError> {
    if pool.len() > config.max_pool {
        return Err(WitnessError::PoolTooLarge {
            size: pool.len(),
            cap: config.max_pool,
        });
    }
    let xi = data.column_index(x)?;
    let yi = data.column_index(y)?;
    let pool_idx = data.indices(pool)?;
    if pool_idx.iter().any(|&c| c == xi || c == yi) || xi == yi {
        return Err(WitnessError::InvalidRoles(
            "the pool must exclude the treatment and outcome columns".into(),
        ));
    }
    let forbidden_w = data.indices(&config.forbidden_witnesses)?;
    let forbidden_z = data.indices(&config.forbidden_members)?;

    let mut candidates = Vec::new();
    for &w in &pool_idx {
        if forbidden_w.contains(&w) {
            continue;
        }
        let rest: Vec<usize> = pool_idx
            .iter()
            .copied()
            .filter(|&c| c != w && !forbidden_z.contains(&c))
            .collect();
        for set in subsets_up_to(&rest, config.max_set_size) {
            candidates.push(Candidate { witness: w, set });
        }
    }

    let evaluated: Vec<Option<(Rule1Scores, Vec<FalsificationOutcome>, ContingencyTable)>> = candidates
        .par_iter()
        .enumerate()
        .map(|(ci, c)| -> Result<_, WitnessError> {
            let scores = rule1_scores(data, yi, xi, c.witness, &c.set, config.ess)?;
            if !rule1_decision(&scores) {
                return Ok(None);
            }
            let counts = counts_by_index(data, yi, xi, c.witness, &c.set);
            let prior = DirichletSpec::bdeu(config.ess, counts.n_strata())?;
            let seed = config.seed ^ (ci as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let outs = falsification_multi(&counts, alephs, config.n_samples, config.threshold, config.engine, &prior, seed)?;
            Ok(Some((scores, outs, counts)))
        })
        .collect::<Result<_, _>>()?;

    let names = data.names();
    let mut per_aleph = Vec::with_capacity(alephs.len());
    for (k, aleph) in alephs.iter().enumerate() {
        let mut results: Vec<(WitnessResult, &ContingencyTable)> = Vec::new();
        for (c, ev) in candidates.iter().zip(&evaluated) {
            let Some((scores, outs, counts)) = ev else { continue };
            let o = &outs[k];
            if !o.accepted {
                continue;
            }
            results.push((
                WitnessResult {
                    witness: names[c.witness].clone(),
                    admissible: c.set.iter().map(|&i| names[i].clone()).collect(),
                    scores: *scores,
                    score: wpp_score(scores),
                    rejection_rate: o.rejection_rate,
                    n_failed: o.n_failed,
                    expected: mean_interval(&o.samples),
                    refined: None,
                    samples: o.samples.clone(),
                },
                counts,
            ));
        }
        results.sort_by(|(a, _), (b, _)| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.witness.cmp(&b.witness))
                .then_with(|| a.admissible.cmp(&b.admissible))
        });
        if config.engine == Engine::Auto {
            let prior_of = |t: &ContingencyTable| DirichletSpec::bdeu(config.ess, t.n_strata());
            let refined: Vec<Option<IntervalBound>> = results
                .par_iter()
                .take(config.refine_top)
                .map(|(_, counts)| -> Result<_, WitnessError> {
                    let mean = posterior_mean_table(counts, &prior_of(counts)?);
                    Ok(match Engine::Lp.table_bounds(&mean, aleph) {
                        Ok(BoundOutcome::Bounded(b)) => Some(b),
                        // Outside the LP polytope or a numerical failure:
                        // keep the closed-form posterior expectation.
                        Ok(BoundOutcome::Infeasible) | Err(_) => None,
                    })
                })
                .collect::<Result<_, _>>()?;
            for ((r, _), b) in results.iter_mut().zip(refined) {
                r.refined = b;
            }
        }
        per_aleph.push(results.into_iter().map(|(r, _)| r).collect());
    }
    Ok(per_aleph)
}

/// A user-chosen pair run through the same pipeline as the search, without
/// the Rule 1 filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEvaluation {
    /// Whether the Rule 1 premises are favoured by the data.
    pub rule1: bool,
    /// Whether the pair survived the falsification test.
    pub accepted: bool,
    pub result: WitnessResult,
}

/// Scores, falsifies and bounds a single witness/admissible-set pair. With
/// the `auto` engine the LP is also run on the posterior mean table.
pub fn evaluate_pair<S: AsRef<str>>(
    data: &BinaryDataset,
    witness: &str,
    admissible: &[S],
    x: &str,
    y: &str,
    aleph: &RelaxationParams,
    config: &SearchConfig,
) -> Result<PairEvaluation, WitnessError> {
    let xi = data.column_index(x)?;
    let yi = data.column_index(y)?;
    let wi = data.column_index(witness)?;
    let zi = data.indices(admissible)?;
    let scores = rule1_scores(data, yi, xi, wi, &zi, config.ess)?;
    let counts = counts_by_index(data, yi, xi, wi, &zi);
    let prior = DirichletSpec::bdeu(config.ess, counts.n_strata())?;
    let o = falsification_test(&counts, aleph, config.n_samples, config.threshold, config.engine, &prior, config.seed)?;
    let refined = if config.engine == Engine::Auto && o.accepted {
        match Engine::Lp.table_bounds(&posterior_mean_table(&counts, &prior), aleph) {
            Ok(BoundOutcome::Bounded(b)) => Some(b),
            Ok(BoundOutcome::Infeasible) | Err(_) => None,
        }
    } else {
        None
    };
    Ok(PairEvaluation {
        rule1: rule1_decision(&scores),
        accepted: o.accepted,
        result: WitnessResult {
            witness: witness.to_string(),
            admissible: admissible.iter().map(|s| s.as_ref().to_string()).collect(),
            scores,
            score: wpp_score(&scores),
            rejection_rate: o.rejection_rate,
            n_failed: o.n_failed,
            expected: mean_interval(&o.samples),
            refined,
            samples: o.samples,
        },
    })
}

/// How several accepted pairs are combined into one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "level")]
pub enum SummaryMode {
    /// Convex hull of the reported intervals.
    Union,
    /// Minimum reported lower bound and maximum reported upper bound.
    MinMax,
    /// `q` quantile of all pooled sampled lower bounds and `1 − q` quantile
    /// of the pooled upper bounds. Marginal, not joint.
    Quantile(f64),
    /// The top-scoring pair's reported interval.
    BestScore,
}

/// Combines results; `results` must be ordered as returned by the search
/// for [`SummaryMode::BestScore`].
pub fn summarize(results: &[WitnessResult], mode: SummaryMode) -> Result<IntervalBound, WitnessError> {
    if results.is_empty() {
        return Err(WitnessError::EmptyResults);
    }
    Ok(match mode {
        SummaryMode::Union | SummaryMode::MinMax => {
            let lo = results.iter().map(|r| r.interval().lower).fold(f64::INFINITY, f64::min);
            let hi = results.iter().map(|r| r.interval().upper).fold(f64::NEG_INFINITY, f64::max);
            IntervalBound::new(lo, hi)
        }
        SummaryMode::Quantile(q) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(WitnessError::InvalidQuantile(q));
            }
            let lo = results.iter().flat_map(|r| r.samples.iter().map(|b| b.lower)).collect();
            let hi = results.iter().flat_map(|r| r.samples.iter().map(|b| b.upper)).collect();
            IntervalBound::new(quantile(lo, q), quantile(hi, 1.0 - q))
        }
        SummaryMode::BestScore => results[0].interval(),
    })
}
