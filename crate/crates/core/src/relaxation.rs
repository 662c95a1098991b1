//! Choosing the relaxation vector: grid search against a target interval
//! length, and a Metropolis–Hastings posterior over `(ε_w, ε_xy, β)` driven
//! by the spread of back-door estimates from other admissible sets.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};
use thiserror::Error;

use crate::engine::{Engine, EngineError};
use crate::lp::{BoundOutcome, IntervalBound, LpError, RelaxationParams};
use crate::tables::{posterior_mean_table, ContingencyTable, DirichletSpec, JointTable, TableError};

/// Variance used when the bounds collapse to a point.
pub const VARIANCE_FLOOR: f64 = 1e-8;
/// Default random-walk step of each MH component.
pub const DEFAULT_STEP: f64 = 0.05;

#[derive(Debug, Error)]
pub enum RelaxError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Params(#[from] LpError),
    #[error("P(X = {x} | stratum {stratum}) is zero while the stratum has positive probability")]
    UndefinedConditional { stratum: String, x: u8 },
    #[error("the grid must contain at least one k and one c")]
    EmptyGrid,
    #[error("the chain needs at least one iteration")]
    NoIterations,
    #[error("no starting point with feasible bounds was found")]
    NoFeasibleStart,
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// `Σ_z [P(Y=1|X=1,z) − P(Y=1|X=0,z)] P(z)` from a joint table.
pub fn backdoor_ace<S: AsRef<str>>(pv: &JointTable, z_cols: &[S], x_col: &str, y_col: &str) -> Result<f64, RelaxError> {
    let mut vars = vec![pv.var_index(y_col)?, pv.var_index(x_col)?];
    for z in z_cols {
        vars.push(pv.var_index(z.as_ref())?);
    }
    let m = pv.marginal(&vars);
    let mut ace = 0.0;
    for z in 0..(1usize << z_cols.len()) {
        let p = |y: usize, x: usize| m[y | (x << 1) | (z << 2)];
        let pz = p(0, 0) + p(1, 0) + p(0, 1) + p(1, 1);
        if pz <= 0.0 {
            continue;
        }
        let mut contrast = 0.0;
        for x in 0..2 {
            let px = p(0, x) + p(1, x);
            if px <= 0.0 {
                let stratum = z_cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| format!("{}={}", c.as_ref(), (z >> i) & 1))
                    .collect::<Vec<_>>()
                    .join(",");
                return Err(RelaxError::UndefinedConditional { stratum, x: x as u8 });
            }
            let sign = if x == 1 { 1.0 } else { -1.0 };
            contrast += sign * p(1, x) / px;
        }
        ace += pz * contrast;
    }
    Ok(ace)
}

/// Grid of `ε_w = ε_x = ε_y = k`, `β̲ = c`, `β̄ = 1/c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub k: Vec<f64>,
    pub c: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            k: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
            c: vec![0.9, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub k: f64,
    pub c: f64,
    /// `None` when the posterior mean table is infeasible at this point.
    pub bound: Option<IntervalBound>,
}

/// Evaluates every grid point on the posterior mean table and sorts by
/// `|width − target_length|`; infeasible points go last. The sort is
/// stable, so ties keep grid order.
pub fn grid_search(
    counts: &ContingencyTable,
    prior: &DirichletSpec,
    target_length: f64,
    grid: &Grid,
    engine: Engine,
) -> Result<Vec<GridPoint>, RelaxError> {
    if grid.k.is_empty() || grid.c.is_empty() {
        return Err(RelaxError::EmptyGrid);
    }
    let mean = posterior_mean_table(counts, prior);
    let mut out = Vec::with_capacity(grid.k.len() * grid.c.len());
    for &k in &grid.k {
        for &c in &grid.c {
            let aleph = RelaxationParams::from_k_c(k, c)?;
            let bound = match engine.table_bounds(&mean, &aleph)? {
                BoundOutcome::Bounded(b) => Some(b),
                BoundOutcome::Infeasible => None,
            };
            out.push(GridPoint { k, c, bound });
        }
    }
    let key = |p: &GridPoint| p.bound.map_or(f64::INFINITY, |b| (b.width() - target_length).abs());
    out.sort_by(|a, b| key(a).total_cmp(&key(b)));
    Ok(out)
}

/// A reference admissible set with its back-door estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub set: Vec<String>,
    pub ace: f64,
}

/// Reference admissible sets, sorted by size then names, each set once.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub members: Vec<Reference>,
}

impl ReferenceSet {
    pub fn aces(&self) -> Vec<f64> {
        self.members.iter().map(|r| r.ace).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Builds the reference set from `(witness, set, ace)` triples: drops the
/// empty set unless allowed, then strict supersets of any remaining set or
/// of the target, then the target itself. Repeated sets keep their first
/// estimate.
pub fn reference_set(pairs: &[(String, Vec<String>, f64)], target_z: &[String], allow_empty: bool) -> ReferenceSet {
    let as_set = |v: &[String]| v.iter().cloned().collect::<BTreeSet<String>>();
    let target = as_set(target_z);
    let mut uniq: Vec<(BTreeSet<String>, f64)> = Vec::new();
    for (_, z, ace) in pairs {
        let s = as_set(z);
        if !uniq.iter().any(|(u, _)| *u == s) {
            uniq.push((s, *ace));
        }
    }
    if !allow_empty {
        uniq.retain(|(s, _)| !s.is_empty());
    }
    let pool: Vec<BTreeSet<String>> = uniq.iter().map(|(s, _)| s.clone()).chain(std::iter::once(target.clone())).collect();
    let strict_superset = |s: &BTreeSet<String>| pool.iter().any(|p| p.len() < s.len() && p.is_subset(s));
    let mut members: Vec<Reference> = uniq
        .into_iter()
        .filter(|(s, _)| !strict_superset(s) && *s != target)
        .map(|(s, ace)| Reference {
            set: s.into_iter().collect(),
            ace,
        })
        .collect();
    members.sort_by(|a, b| a.set.len().cmp(&b.set.len()).then_with(|| a.set.cmp(&b.set)));
    ReferenceSet { members }
}

/// Log density at `x` of `N(m, v)` truncated to `[−1, 1]`.
pub fn trunc_normal_logpdf(x: f64, m: f64, v: f64) -> f64 {
    if !(-1.0..=1.0).contains(&x) || v <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let sd = v.sqrt();
    let std = StatNormal::standard();
    let mass = std.cdf((1.0 - m) / sd) - std.cdf((-1.0 - m) / sd);
    let z = (x - m) / sd;
    -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - sd.ln() - mass.ln()
}

/// `v(LB, UB) = ((UB − LB)/6)²`, floored at [`VARIANCE_FLOOR`].
pub fn bound_variance(b: &IntervalBound) -> f64 {
    ((b.upper - b.lower) / 6.0).powi(2).max(VARIANCE_FLOOR)
}

/// `Σ_i log p_{N[−1,1]}(ACE_i; m, v(LB, UB))`.
pub fn aleph_loglik(m: f64, bounds: &IntervalBound, aces: &[f64]) -> f64 {
    let v = bound_variance(bounds);
    aces.iter().map(|&a| trunc_normal_logpdf(a, m, v)).sum()
}

/// The three-parameter relaxation used by the selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlephSample {
    pub eps_w: f64,
    pub eps_xy: f64,
    /// `β̲ = beta`, `β̄ = 1/beta`.
    pub beta: f64,
}

impl AlephSample {
    /// `ε_x = ε_y = eps_xy`, `β̲ = beta`, `β̄ = 1/beta`.
    pub fn to_params(&self) -> Result<RelaxationParams, LpError> {
        if !(self.beta > 0.0) {
            return Err(LpError::InvalidParams(format!("beta must be positive, got {}", self.beta)));
        }
        RelaxationParams::new(self.eps_w, self.eps_xy, self.eps_xy, self.beta, 1.0 / self.beta)
    }

    fn from_coords(s: &[f64]) -> Self {
        Self {
            eps_w: s[0],
            eps_xy: s[1],
            beta: s[2],
        }
    }
}

/// Independent priors on each of `(ε_w, ε_xy, β)` over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlephPrior {
    Uniform,
    /// Gaussians truncated to `[0, 1]`.
    TruncatedGaussian { means: [f64; 3], variances: [f64; 3] },
}

impl AlephPrior {
    /// Unnormalized log density; the truncation constants do not depend on
    /// the point and cancel in acceptance ratios.
    pub fn log_density(&self, a: &AlephSample) -> f64 {
        let vals = [a.eps_w, a.eps_xy, a.beta];
        if vals.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return f64::NEG_INFINITY;
        }
        match self {
            AlephPrior::Uniform => 0.0,
            AlephPrior::TruncatedGaussian { means, variances } => (0..3)
                .map(|i| -0.5 * (vals[i] - means[i]).powi(2) / variances[i])
                .sum(),
        }
    }

    fn validate(&self) -> Result<(), RelaxError> {
        if let AlephPrior::TruncatedGaussian { variances, .. } = self {
            if variances.iter().any(|v| !(*v > 0.0)) {
                return Err(RelaxError::InvalidPrior("variances must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MhConfig {
    pub iters: usize,
    pub burn_in: usize,
    pub step: f64,
    pub seed: u64,
}

impl Default for MhConfig {
    fn default() -> Self {
        Self {
            iters: 10_000,
            burn_in: 1_000,
            step: DEFAULT_STEP,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub iteration: usize,
    pub aleph: AlephSample,
    pub m: f64,
    pub bounds: IntervalBound,
    pub loglik: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlephChain {
    /// Post-burn-in states.
    pub states: Vec<ChainState>,
    /// Accepted proposals over all proposals, per component
    /// `(ε_w, ε_xy, β, m)`.
    pub acceptance: [f64; 4],
}

impl AlephChain {
    /// Posterior means of `(ε_w, ε_xy, β, m)`.
    pub fn means(&self) -> [f64; 4] {
        let n = self.states.len().max(1) as f64;
        let mut s = [0.0; 4];
        for st in &self.states {
            s[0] += st.aleph.eps_w;
            s[1] += st.aleph.eps_xy;
            s[2] += st.aleph.beta;
            s[3] += st.m;
        }
        s.map(|v| v / n)
    }

    /// CSV with columns `iteration,eps_w,eps_xy,beta,m,loglik`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iteration,eps_w,eps_xy,beta,m,loglik")?;
        for s in &self.states {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                s.iteration, s.aleph.eps_w, s.aleph.eps_xy, s.aleph.beta, s.m, s.loglik
            )?;
        }
        Ok(())
    }
}

/// Reflects `v` into `[0, 1]`.
pub(crate) fn reflect_unit(mut v: f64) -> f64 {
    loop {
        if v < 0.0 {
            v = -v;
        } else if v > 1.0 {
            v = 2.0 - v;
        } else {
            return v;
        }
    }
}

/// Component-wise random-walk Metropolis on `[0, 1]^D` with reflecting
/// boundaries. `log_target` returns `None` outside the support. Returns all
/// states (including the initial one) and per-component acceptance counts.
pub(crate) fn reflected_mh<const D: usize, R: Rng>(
    init: [f64; D],
    iters: usize,
    step: f64,
    rng: &mut R,
    mut log_target: impl FnMut(&[f64; D], usize) -> Option<f64>,
) -> (Vec<([f64; D], f64)>, [usize; D]) {
    let normal = Normal::new(0.0, step).expect("positive step");
    let mut cur = init;
    let mut cur_lp = log_target(&cur, usize::MAX).unwrap_or(f64::NEG_INFINITY);
    let mut out = Vec::with_capacity(iters);
    let mut acc = [0usize; D];
    for _ in 0..iters {
        for i in 0..D {
            let mut prop = cur;
            prop[i] = reflect_unit(cur[i] + normal.sample(rng));
            if let Some(lp) = log_target(&prop, i) {
                let log_u: f64 = rng.random::<f64>().ln();
                if log_u < lp - cur_lp {
                    cur = prop;
                    cur_lp = lp;
                    acc[i] += 1;
                }
            }
        }
        out.push((cur, cur_lp));
    }
    (out, acc)
}

/// Posterior over the relaxation for a target pair.
///
/// `table` is the target pair's `P(Y, X, W | Z)` (probability form, usually
/// the posterior mean). The chain runs over `(ε_w, ε_xy, β, t)`, where
/// `m = LB + t (UB − LB)`; a uniform `t` is the same as a uniform `m` on
/// `[LB, UB]`, and this coordinate keeps `m` valid when a move changes the
/// bounds. Proposals with infeasible bounds or `β = 0` are rejected.
pub fn aleph_mh(
    prior: &AlephPrior,
    table: &ContingencyTable,
    refset: &ReferenceSet,
    engine: Engine,
    config: &MhConfig,
) -> Result<AlephChain, RelaxError> {
    if config.iters == 0 {
        return Err(RelaxError::NoIterations);
    }
    prior.validate()?;
    let aces = refset.aces();
    let engine = engine.for_sampling();
    let bounds_at = |a: &AlephSample| -> Option<IntervalBound> {
        if a.beta <= 0.0 {
            return None;
        }
        let p = a.to_params().ok()?;
        engine.table_bounds(table, &p).ok()?.interval()
    };

    // Start from the vacuous corner, which is always feasible.
    let start = AlephSample {
        eps_w: 1.0,
        eps_xy: 1.0,
        beta: 1.0,
    };
    if bounds_at(&start).is_none() {
        return Err(RelaxError::NoFeasibleStart);
    }

    let key = |s: &[f64]| [s[0].to_bits(), s[1].to_bits(), s[2].to_bits()];
    let mut cache: HashMap<[u64; 3], Option<IntervalBound>> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let eval = |s: &[f64; 4], _component: usize| -> Option<f64> {
        let a = AlephSample::from_coords(s);
        let lp_prior = prior.log_density(&a);
        if !lp_prior.is_finite() {
            return None;
        }
        let b = (*cache.entry(key(s)).or_insert_with(|| bounds_at(&a)))?;
        let m = b.lower + s[3] * (b.upper - b.lower);
        Some(lp_prior + aleph_loglik(m, &b, &aces))
    };
    let (raw, acc) = reflected_mh([start.eps_w, start.eps_xy, start.beta, 0.5], config.iters, config.step, &mut rng, eval);

    let mut states = Vec::with_capacity(raw.len().saturating_sub(config.burn_in));
    for (it, (s, lp)) in raw.into_iter().enumerate().skip(config.burn_in) {
        let a = AlephSample::from_coords(&s);
        // Every chain state was evaluated and found feasible.
        let b = cache[&key(&s)].expect("chain states are feasible");
        states.push(ChainState {
            iteration: it,
            aleph: a,
            m: b.lower + s[3] * (b.upper - b.lower),
            bounds: b,
            loglik: lp - prior.log_density(&a),
        });
    }
    let n = config.iters as f64;
    Ok(AlephChain {
        states,
        acceptance: acc.map(|c| c as f64 / n),
    })
}
