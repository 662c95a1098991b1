//! Synthetic benchmark: random causal models with known ACE, data sampled
//! from them, and the estimators compared on those data.
//!
//! Every model has eight observed covariates `Z1..Z8`, four latent
//! variables `L1..L4`, a treatment `X` and an outcome `Y`. `Z5..Z8` are
//! children of all four latents only, so adjusting for the whole pool opens
//! paths `X ← L1 → Z_i ← L2 → Y`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::Engine;
use crate::lp::{IntervalBound, RelaxationParams};
use crate::relaxation::{backdoor_ace, RelaxError};
use crate::tables::{BinaryDataset, JointTable, TableError};
use crate::witness::{wpp_search_multi, SearchConfig, WitnessError};

/// Number of observed covariates.
pub const N_COVARIATES: usize = 8;
const N_LATENT: usize = 4;
const L0: usize = N_COVARIATES;
const X: usize = N_COVARIATES + N_LATENT;
const Y: usize = X + 1;
const N_VARS: usize = Y + 1;
/// Standard deviation numerator of the logistic weights.
const WEIGHT_SCALE: f64 = 20.0;

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("no model with NE1 bias >= {min_bias} after {attempts} attempts")]
    HardCaseNotFound { attempts: usize, min_bias: f64 },
    #[error("empty estimate list")]
    Empty,
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
}

/// Name of variable `v` in the model's fixed order.
pub fn var_name(v: usize) -> String {
    match v {
        v if v < N_COVARIATES => format!("Z{}", v + 1),
        v if v < X => format!("L{}", v - L0 + 1),
        X => "X".into(),
        _ => "Y".into(),
    }
}

/// Names of the observed covariates.
pub fn covariate_names() -> Vec<String> {
    (0..N_COVARIATES).map(var_name).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Whether a valid witness/admissible-set pair exists.
    pub solvable: bool,
    /// Resample until back-door adjustment on the whole pool is biased by
    /// at least `min_bias`.
    pub hard: bool,
    pub min_bias: f64,
    pub max_attempts: usize,
}

impl ModelConfig {
    pub fn new(solvable: bool, hard: bool) -> Self {
        Self {
            solvable,
            hard,
            min_bias: 0.1,
            max_attempts: 10_000,
        }
    }
}

/// `P(v = 1 | parents)` for one vertex; entry `j` has parent `i` equal to
/// bit `i` of `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    pub parents: Vec<usize>,
    pub p1: Vec<f64>,
}

impl Cpt {
    fn prob1(&self, cfg: &[u8; N_VARS]) -> f64 {
        let mut j = 0usize;
        for (i, &p) in self.parents.iter().enumerate() {
            j |= (cfg[p] as usize) << i;
        }
        self.p1[j]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticModel {
    pub cpts: Vec<Cpt>,
    pub solvable: bool,
    pub hard: bool,
}

/// Sampling order: latents, `Z1..Z8`, `X`, `Y`.
fn topological_order() -> impl Iterator<Item = usize> {
    (L0..X).chain(0..N_COVARIATES).chain([X, Y])
}

fn squash<R: Rng>(p: f64, rng: &mut R) -> f64 {
    if p > 0.975 {
        rng.random_range(0.950..0.975)
    } else if p < 0.025 {
        rng.random_range(0.025..0.050)
    } else {
        p
    }
}

/// Logistic model with all pairwise interactions; weights (intercept
/// included) drawn from `N(0, (20 / #parents)^2)`. A root gets a uniform
/// marginal.
fn random_cpt<R: Rng>(parents: Vec<usize>, rng: &mut R) -> Cpt {
    let k = parents.len();
    if k == 0 {
        let p = squash(rng.random::<f64>(), rng);
        return Cpt { parents, p1: vec![p] };
    }
    let normal = Normal::new(0.0, WEIGHT_SCALE / k as f64).expect("positive scale");
    let intercept = normal.sample(rng);
    let main: Vec<f64> = (0..k).map(|_| normal.sample(rng)).collect();
    let pair: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| normal.sample(rng)).collect()).collect();
    let p1 = (0..1usize << k)
        .map(|j| {
            let on = |i: usize| ((j >> i) & 1) as f64;
            let mut eta = intercept;
            for i in 0..k {
                eta += main[i] * on(i);
                for m in (i + 1)..k {
                    eta += pair[i][m] * on(i) * on(m);
                }
            }
            squash(1.0 / (1.0 + (-eta).exp()), rng)
        })
        .collect();
    Cpt { parents, p1 }
}

fn random_structure<R: Rng>(solvable: bool, rng: &mut R) -> Vec<Vec<usize>> {
    let mut parents = vec![Vec::new(); N_VARS];
    // Z1..Z4, X, Y in lexicographic order; each forward edge with
    // probability 1/2, except X -> Y which is always present.
    let ordered: Vec<usize> = (0..4).chain([X, Y]).collect();
    for (a, &u) in ordered.iter().enumerate() {
        for &v in &ordered[a + 1..] {
            if (u == X && v == Y) || rng.random_bool(0.5) {
                parents[v].push(u);
            }
        }
    }
    for z in 4..N_COVARIATES {
        parents[z] = (L0..X).collect();
    }
    if solvable {
        // Guarantee a witness: some Z_i -> X without Z_i -> Y.
        if !(0..4).any(|i| parents[X].contains(&i) && !parents[Y].contains(&i)) {
            let i = rng.random_range(0..4);
            parents[X].push(i);
            parents[Y].retain(|&p| p != i);
        }
        parents[X].push(L0);
        parents[Y].push(L0 + 1);
        for l in [L0 + 2, L0 + 3] {
            if rng.random_bool(0.5) {
                parents[X].push(l);
            } else {
                parents[Y].push(l);
            }
        }
    } else {
        for l in L0..X {
            parents[X].push(l);
            parents[Y].push(l);
        }
    }
    for p in &mut parents {
        p.sort_unstable();
    }
    parents
}

impl SyntheticModel {
    fn draw<R: Rng>(solvable: bool, hard: bool, rng: &mut R) -> Self {
        let cpts = random_structure(solvable, rng)
            .into_iter()
            .map(|p| random_cpt(p, rng))
            .collect();
        Self { cpts, solvable, hard }
    }

    /// Probability of a full configuration; `skip_x` leaves out the factor
    /// of `X` (the truncated factorization under an intervention on `X`).
    fn config_prob(&self, cfg: &[u8; N_VARS], skip_x: bool) -> f64 {
        let mut p = 1.0;
        for (v, cpt) in self.cpts.iter().enumerate() {
            if skip_x && v == X {
                continue;
            }
            let q = cpt.prob1(cfg);
            p *= if cfg[v] == 1 { q } else { 1.0 - q };
        }
        p
    }

    fn for_each_config(mut f: impl FnMut(&[u8; N_VARS])) {
        let mut cfg = [0u8; N_VARS];
        for bits in 0..(1usize << N_VARS) {
            for (v, c) in cfg.iter_mut().enumerate() {
                *c = ((bits >> v) & 1) as u8;
            }
            f(&cfg);
        }
    }

    /// Population joint table over `Z1..Z8, X, Y`.
    pub fn population_table(&self) -> JointTable {
        let observed: Vec<usize> = (0..N_COVARIATES).chain([X, Y]).collect();
        let mut probs = vec![0.0; 1 << observed.len()];
        Self::for_each_config(|cfg| {
            let mut j = 0usize;
            for (i, &v) in observed.iter().enumerate() {
                j |= (cfg[v] as usize) << i;
            }
            probs[j] += self.config_prob(cfg, false);
        });
        JointTable {
            names: observed.iter().map(|&v| var_name(v)).collect(),
            probs,
        }
    }

    /// Forward sample of the observed variables.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Result<BinaryDataset, TableError> {
        let observed: Vec<usize> = (0..N_COVARIATES).chain([X, Y]).collect();
        let mut columns = vec![Vec::with_capacity(n); observed.len()];
        for _ in 0..n {
            let cfg = self.forward(rng, None);
            for (c, &v) in columns.iter_mut().zip(&observed) {
                c.push(cfg[v]);
            }
        }
        BinaryDataset::from_columns(observed.iter().map(|&v| var_name(v)).collect(), columns)
    }

    /// One forward draw of all variables, optionally under `do(X = x)`.
    pub fn forward<R: Rng>(&self, rng: &mut R, do_x: Option<u8>) -> [u8; N_VARS] {
        let mut cfg = [0u8; N_VARS];
        for v in topological_order() {
            cfg[v] = match (v, do_x) {
                (X, Some(x)) => x,
                _ => rng.random_bool(self.cpts[v].prob1(&cfg)) as u8,
            };
        }
        cfg
    }
}

/// Draws a model. In the hard case whole models are redrawn until the
/// population bias of adjusting for all covariates reaches `min_bias`.
pub fn generate_model<R: Rng>(cfg: &ModelConfig, rng: &mut R) -> Result<SyntheticModel, SyntheticError> {
    if !cfg.hard {
        return Ok(SyntheticModel::draw(cfg.solvable, false, rng));
    }
    for _ in 0..cfg.max_attempts.max(1) {
        let m = SyntheticModel::draw(cfg.solvable, true, rng);
        let (ne1, _) = naive_estimators(&m.population_table())?;
        if (ne1 - exact_ace(&m)).abs() >= cfg.min_bias {
            return Ok(m);
        }
    }
    Err(SyntheticError::HardCaseNotFound {
        attempts: cfg.max_attempts,
        min_bias: cfg.min_bias,
    })
}

/// `P(Y=1 | do(X=1)) − P(Y=1 | do(X=0))` by exact enumeration.
pub fn exact_ace(model: &SyntheticModel) -> f64 {
    let mut ace = 0.0;
    SyntheticModel::for_each_config(|cfg| {
        if cfg[Y] == 1 {
            let p = model.config_prob(cfg, true);
            ace += if cfg[X] == 1 { p } else { -p };
        }
    });
    ace
}

/// Back-door adjustment on all covariates (NE1) and on none (NE2).
pub fn naive_estimators(pv: &JointTable) -> Result<(f64, f64), SyntheticError> {
    let ne1 = backdoor_ace(pv, &covariate_names(), "X", "Y")?;
    let ne2 = backdoor_ace::<&str>(pv, &[], "X", "Y")?;
    Ok((ne1, ne2))
}

/// Mean back-door estimate over the accepted admissible sets.
pub fn faithfulness_estimator<S: AsRef<str>>(pv: &JointTable, sets: &[Vec<S>]) -> Result<f64, SyntheticError> {
    if sets.is_empty() {
        return Err(SyntheticError::Empty);
    }
    let mut acc = 0.0;
    for s in sets {
        acc += backdoor_ace(pv, s, "X", "Y")?;
    }
    Ok(acc / sets.len() as f64)
}

/// Distance from the truth to the closest point of the estimate, and
/// whether it exceeds 0.1.
pub fn interval_error(truth: f64, estimate: &IntervalBound) -> (f64, bool) {
    let e = if truth < estimate.lower {
        estimate.lower - truth
    } else if truth > estimate.upper {
        truth - estimate.upper
    } else {
        0.0
    };
    (e, e > 0.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub solvable: bool,
    pub hard: bool,
    pub n_datasets: usize,
    pub n_points: usize,
    pub k_eps: Vec<f64>,
    /// `(β̲, β̄)` configurations; the first is the reference for the found
    /// rate and the faithfulness estimator.
    pub betas: Vec<(f64, f64)>,
    pub mc_samples: usize,
    pub seed: u64,
    pub max_set_size: usize,
    pub engine: Engine,
}

impl StudyConfig {
    /// The full-size study: 100 datasets of 5000 points, 1000 draws.
    pub fn full_scale(solvable: bool, hard: bool) -> Self {
        Self {
            solvable,
            hard,
            n_datasets: 100,
            n_points: 5000,
            k_eps: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
            betas: vec![(1.0, 1.0), (0.9, 1.1)],
            mc_samples: 1000,
            seed: 0,
            max_set_size: usize::MAX,
            engine: Engine::Auto,
        }
    }

    pub fn case_name(&self) -> String {
        format!(
            "{}, {}",
            if self.hard { "Hard" } else { "Easy" },
            if self.solvable { "Solvable" } else { "Not Solvable" }
        )
    }
}

/// `(error average, error tail mass at 0.1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub average: f64,
    pub tail: f64,
    pub n: usize,
}

impl ErrorSummary {
    fn from_errors(errs: &[(f64, bool)]) -> Self {
        if errs.is_empty() {
            return Self {
                average: f64::NAN,
                tail: f64::NAN,
                n: 0,
            };
        }
        let n = errs.len() as f64;
        Self {
            average: errs.iter().map(|e| e.0).sum::<f64>() / n,
            tail: errs.iter().filter(|e| e.1).count() as f64 / n,
            n: errs.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigRow {
    pub k_eps: f64,
    pub beta_low: f64,
    pub beta_high: f64,
    pub found_rate: f64,
    /// Over datasets where a pair was found.
    pub faithfulness: ErrorSummary,
    pub wpp: ErrorSummary,
    pub median_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub case: String,
    pub config: StudyConfig,
    pub n_completed: usize,
    pub failures: Vec<String>,
    pub ne1: ErrorSummary,
    pub ne2: ErrorSummary,
    /// One row per `(β configuration, k)`, β-major.
    pub rows: Vec<ConfigRow>,
}

impl StudyReport {
    pub fn row(&self, k: f64, beta: (f64, f64)) -> Option<&ConfigRow> {
        self.rows
            .iter()
            .find(|r| (r.k_eps - k).abs() < 1e-12 && r.beta_low == beta.0 && r.beta_high == beta.1)
    }

    /// Aligned text table: one line per `k`, one block of columns per β
    /// configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: NE1 = ({:.2}, {:.2}), NE2 = ({:.2}, {:.2}), datasets = {}",
            self.case, self.ne1.average, self.ne1.tail, self.ne2.average, self.ne2.tail, self.n_completed
        );
        let _ = write!(s, "{:>6} {:>6} {:>12}", "k_eps", "Found", "Faith");
        for (i, _) in self.config.betas.iter().enumerate() {
            let _ = write!(s, " {:>12} {:>7}", format!("WPP{}", i + 1), format!("Width{}", i + 1));
        }
        s.push('\n');
        for &k in &self.config.k_eps {
            let Some(first) = self.config.betas.first().and_then(|&b| self.row(k, b)) else {
                continue;
            };
            let _ = write!(
                s,
                "{:>6.2} {:>6.2} {:>5.2}, {:>5.2}",
                k, first.found_rate, first.faithfulness.average, first.faithfulness.tail
            );
            for &b in &self.config.betas {
                if let Some(r) = self.row(k, b) {
                    let _ = write!(s, " {:>5.2}, {:>5.2} {:>7.2}", r.wpp.average, r.wpp.tail, r.median_width);
                }
            }
            s.push('\n');
        }
        s
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Per-dataset outcome for one relaxation.
struct Outcome {
    wpp: Option<IntervalBound>,
    faith: Option<f64>,
}

struct DatasetRun {
    truth: f64,
    ne: (f64, f64),
    outcomes: Vec<Outcome>,
}

fn run_dataset(cfg: &StudyConfig, alephs: &[RelaxationParams], index: usize) -> Result<DatasetRun, SyntheticError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let model = generate_model(&ModelConfig::new(cfg.solvable, cfg.hard), &mut rng)?;
    let truth = exact_ace(&model);
    let pv = model.population_table();
    let ne = naive_estimators(&pv)?;
    let data = model.sample(cfg.n_points, &mut rng)?;
    let search = SearchConfig {
        max_set_size: cfg.max_set_size,
        n_samples: cfg.mc_samples,
        engine: cfg.engine,
        seed: rng.random(),
        ..SearchConfig::default()
    };
    let results = wpp_search_multi(&data, &covariate_names(), "X", "Y", alephs, &search)?;
    let mut outcomes = Vec::with_capacity(alephs.len());
    for res in &results {
        let faith = if res.is_empty() {
            None
        } else {
            let sets: Vec<Vec<String>> = res.iter().map(|r| r.admissible.clone()).collect();
            Some(faithfulness_estimator(&pv, &sets)?)
        };
        outcomes.push(Outcome {
            wpp: res.first().map(|r| r.interval()),
            faith,
        });
    }
    Ok(DatasetRun { truth, ne, outcomes })
}

/// Runs the full study, datasets in parallel. Each dataset has its own RNG
/// stream, so the report depends only on the configuration. Failed
/// datasets are excluded and listed.
pub fn run_study(cfg: &StudyConfig) -> StudyReport {
    let alephs: Vec<RelaxationParams> = cfg
        .betas
        .iter()
        .flat_map(|&(bl, bh)| {
            cfg.k_eps
                .iter()
                .map(move |&k| RelaxationParams::new(k, k, k, bl, bh).expect("study relaxation is valid"))
        })
        .collect();

    let outcomes: Vec<Result<DatasetRun, SyntheticError>> =
        (0..cfg.n_datasets).into_par_iter().map(|i| run_dataset(cfg, &alephs, i)).collect();
    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(r) => runs.push(r),
            Err(e) => failures.push(format!("dataset {i}: {e}")),
        }
    }

    let ne1: Vec<_> = runs.iter().map(|r| interval_error(r.truth, &IntervalBound::point(r.ne.0))).collect();
    let ne2: Vec<_> = runs.iter().map(|r| interval_error(r.truth, &IntervalBound::point(r.ne.1))).collect();
    let nk = cfg.k_eps.len();
    let mut rows = Vec::with_capacity(alephs.len());
    for (a, aleph) in alephs.iter().enumerate() {
        // The faithfulness estimator and found rate follow the first β
        // configuration at the same k.
        let reference = a % nk;
        let mut wpp = Vec::new();
        let mut faith = Vec::new();
        let mut widths = Vec::new();
        let mut found = 0usize;
        for r in &runs {
            if r.outcomes[reference].wpp.is_some() {
                found += 1;
            }
            if let Some(b) = r.outcomes[a].wpp {
                wpp.push(interval_error(r.truth, &b));
                widths.push(b.width());
            }
            if let Some(f) = r.outcomes[reference].faith {
                faith.push(interval_error(r.truth, &IntervalBound::point(f)));
            }
        }
        rows.push(ConfigRow {
            k_eps: aleph.eps_w,
            beta_low: aleph.beta_low,
            beta_high: aleph.beta_high,
            found_rate: if runs.is_empty() { f64::NAN } else { found as f64 / runs.len() as f64 },
            faithfulness: ErrorSummary::from_errors(&faith),
            wpp: ErrorSummary::from_errors(&wpp),
            median_width: median(widths),
        });
    }
    StudyReport {
        case: cfg.case_name(),
        config: cfg.clone(),
        n_completed: runs.len(),
        failures,
        ne1: ErrorSummary::from_errors(&ne1),
        ne2: ErrorSummary::from_errors(&ne2),
        rows,
    }
}
