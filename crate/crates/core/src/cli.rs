//! Command implementations behind the `acebounds` binary.
//!
//! Every command writes one JSON document that starts with the resolved
//! configuration, so a result file is enough to rerun the analysis.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bench::{timing_batch, width_gap_batch};
use crate::engine::Engine;
use crate::lp::{IntervalBound, LpError, RelaxationParams};
use crate::relaxation::{
    aleph_mh, backdoor_ace, reference_set, AlephPrior, MhConfig, RelaxError, DEFAULT_STEP,
};
use crate::synthetic::{run_study, StudyConfig};
use crate::tables::{empirical_counts, BinaryDataset, JointTable, TableError, DEFAULT_ESS};
use crate::witness::{
    evaluate_pair, summarize, wpp_search, SearchConfig, SummaryMode, WitnessError, DEFAULT_SAMPLES,
    DEFAULT_THRESHOLD,
};

/// Environment variable holding the number of worker threads.
pub const THREADS_ENV: &str = "ACEBOUNDS_THREADS";
/// Version of the JSON output layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const IO: i32 = 3;
    /// The model was rejected by the falsification test.
    pub const INFEASIBLE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    Relax(#[from] RelaxError),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Table(TableError::Io(_)) | CliError::Relax(RelaxError::Io(_)) => exit::IO,
            CliError::Table(TableError::Csv(e)) if matches!(e.kind(), csv::ErrorKind::Io(_)) => exit::IO,
            CliError::Validation(_)
            | CliError::Table(_)
            | CliError::Witness(
                WitnessError::Table(_)
                | WitnessError::PoolTooLarge { .. }
                | WitnessError::InvalidRoles(_)
                | WitnessError::NoSamples
                | WitnessError::InvalidThreshold(_)
                | WitnessError::InvalidQuantile(_),
            )
            | CliError::Relax(
                RelaxError::Table(_) | RelaxError::Params(_) | RelaxError::InvalidPrior(_) | RelaxError::EmptyGrid | RelaxError::NoIterations,
            ) => exit::VALIDATION,
            _ => exit::FAILURE,
        }
    }
}

impl From<LpError> for CliError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::InvalidParams(m) => CliError::Validation(m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "acebounds", version, about = "Bounds on the average causal effect of a binary treatment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Bounds for a given witness and admissible set.
    Bounds(BoundsArgs),
    /// Search a covariate pool for witness/admissible-set pairs.
    Search(SearchArgs),
    /// Run the synthetic benchmark study.
    Simulate(SimulateArgs),
    /// Posterior over relaxation parameters by Metropolis-Hastings.
    Aleph(AlephArgs),
    /// Compare the two engines on random chain models.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    /// CSV file with a header row and 0/1 entries.
    #[arg(long)]
    pub input: PathBuf,
    /// Treatment column.
    #[arg(long)]
    pub x: String,
    /// Outcome column.
    #[arg(long)]
    pub y: String,
    /// Field delimiter.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args, Serialize, Clone, Copy)]
pub struct RelaxArgs {
    #[arg(long = "eps-w", default_value_t = 0.2)]
    pub eps_w: f64,
    #[arg(long = "eps-x", default_value_t = 0.2)]
    pub eps_x: f64,
    #[arg(long = "eps-y", default_value_t = 0.2)]
    pub eps_y: f64,
    #[arg(long = "beta-low", default_value_t = 1.0)]
    pub beta_low: f64,
    #[arg(long = "beta-high", default_value_t = 1.0)]
    pub beta_high: f64,
}

impl RelaxArgs {
    pub fn params(&self) -> Result<RelaxationParams, CliError> {
        Ok(RelaxationParams::new(self.eps_w, self.eps_x, self.eps_y, self.beta_low, self.beta_high)?)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SamplingArgs {
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    pub engine: EngineArg,
    /// Posterior draws per falsification test.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rejection fraction above which a pair is discarded.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Equivalent sample size of the BDeu prior.
    #[arg(long, default_value_t = DEFAULT_ESS)]
    pub ess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    Lp,
    Backsub,
    Auto,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Lp => Engine::Lp,
            EngineArg::Backsub => Engine::BackSub,
            EngineArg::Auto => Engine::Auto,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub witness: String,
    /// Admissible set, comma separated; empty for none.
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<String>,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Tail level of the reported marginal bound quantiles.
    #[arg(long, default_value_t = 0.025)]
    pub quantile: f64,
    /// Output JSON path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SummaryArg {
    Union,
    MinMax,
    Quantile,
    Best,
}

#[derive(Debug, Args, Serialize)]
pub struct SearchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Candidate covariates, comma separated; every other column when absent.
    #[arg(long, value_delimiter = ',')]
    pub pool: Vec<String>,
    #[arg(long = "max-set-size")]
    pub max_set_size: Option<usize>,
    #[arg(long = "forbid-witness", value_delimiter = ',')]
    pub forbid_witness: Vec<String>,
    #[arg(long = "forbid-member", value_delimiter = ',')]
    pub forbid_member: Vec<String>,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = SummaryArg::Best)]
    pub summary: SummaryArg,
    #[arg(long, default_value_t = 0.025)]
    pub quantile: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Generate models without a valid witness.
    #[arg(long)]
    pub unsolvable: bool,
    /// Skip the rejection step that makes full adjustment biased.
    #[arg(long)]
    pub easy: bool,
    #[arg(long, default_value_t = 100)]
    pub datasets: usize,
    #[arg(long, default_value_t = 5000)]
    pub points: usize,
    #[arg(long = "k-eps", value_delimiter = ',', default_values_t = vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30])]
    pub k_eps: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "max-set-size")]
    pub max_set_size: Option<usize>,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    pub engine: EngineArg,
    /// Also print the text table to standard error.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorArg {
    Uniform,
    Gaussian,
}

#[derive(Debug, Args, Serialize)]
pub struct AlephArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub witness: String,
    #[arg(long, value_delimiter = ',')]
    pub z: Vec<String>,
    /// Reference admissible set, comma separated members; repeat for more.
    /// When absent the references come from a search over `--pool`.
    #[arg(long = "reference")]
    pub references: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub pool: Vec<String>,
    #[arg(long = "forbid-witness", value_delimiter = ',')]
    pub forbid_witness: Vec<String>,
    #[arg(long = "forbid-member", value_delimiter = ',')]
    pub forbid_member: Vec<String>,
    /// Keep the empty set among the references.
    #[arg(long)]
    pub allow_empty: bool,
    /// Relaxation used by the reference search.
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = PriorArg::Uniform)]
    pub prior: PriorArg,
    /// Prior means of `(ε_w, ε_xy, β)`.
    #[arg(long = "prior-means", value_delimiter = ',', default_values_t = vec![0.2, 0.2, 0.95])]
    pub prior_means: Vec<f64>,
    #[arg(long = "prior-vars", value_delimiter = ',', default_values_t = vec![0.1, 0.1, 0.05])]
    pub prior_vars: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    #[arg(long = "burn-in", default_value_t = 1_000)]
    pub burn_in: usize,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    pub step: f64,
    /// Chain CSV path.
    #[arg(long)]
    pub chain: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Chain models in the width comparison.
    #[arg(long, default_value_t = 200)]
    pub models: usize,
    /// Rejection runs timed per engine.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 5000)]
    pub points: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a command: the JSON report and the exit code to use.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

/// Sizes the global worker pool from [`THREADS_ENV`] when set. Calling it
/// more than once is harmless.
pub fn configure_workers() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Validation(format!("{THREADS_ENV} must be positive")));
        }
        // Fails only if the pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn load(data: &DataArgs) -> Result<BinaryDataset, CliError> {
    if !data.delimiter.is_ascii() {
        return Err(CliError::Validation("the delimiter must be an ASCII character".into()));
    }
    let ds = BinaryDataset::from_csv_path(&data.input, data.delimiter as u8)?;
    ds.column_index(&data.x)?;
    ds.column_index(&data.y)?;
    if data.x == data.y {
        return Err(CliError::Validation("--x and --y must differ".into()));
    }
    Ok(ds)
}

fn non_empty(v: &[String]) -> Vec<String> {
    v.iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn search_config(s: &SamplingArgs, max_set_size: Option<usize>, fw: &[String], fm: &[String]) -> SearchConfig {
    SearchConfig {
        max_set_size: max_set_size.unwrap_or(usize::MAX),
        forbidden_witnesses: non_empty(fw),
        forbidden_members: non_empty(fm),
        n_samples: s.samples,
        threshold: s.threshold,
        engine: s.engine.into(),
        ess: s.ess,
        seed: s.seed,
        ..SearchConfig::default()
    }
}

fn default_pool(ds: &BinaryDataset, data: &DataArgs, pool: &[String]) -> Vec<String> {
    let pool = non_empty(pool);
    if !pool.is_empty() {
        return pool;
    }
    ds.names().iter().filter(|n| **n != data.x && **n != data.y).cloned().collect()
}

fn header(cmd: &Command) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "config": cmd,
        "workers": rayon::current_num_threads(),
    })
}

fn interval_json(b: &IntervalBound) -> Value {
    json!({ "lower": b.lower, "upper": b.upper })
}

pub fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome, CliError> {
    let ds = load(&a.data)?;
    let aleph = a.relax.params()?;
    let z = non_empty(&a.z);
    let cfg = search_config(&a.sampling, None, &[], &[]);
    let ev = evaluate_pair(&ds, &a.witness, &z, &a.data.x, &a.data.y, &aleph, &cfg)?;
    let r = &ev.result;
    let mut report = json!({
        "witness": r.witness,
        "admissible_set": r.admissible,
        "rule1_holds": ev.rule1,
        "accepted": ev.accepted,
        "rejection_rate": r.rejection_rate,
        "failed_draws": r.n_failed,
        "score": r.score,
    });
    if !r.samples.is_empty() {
        report["expected"] = interval_json(&r.expected);
        report["interval"] = interval_json(&r.interval());
        report["quantiles"] = json!({
            "level": a.quantile,
            "lower": r.quantiles(a.quantile).lower,
            "upper": r.quantiles(a.quantile).upper,
        });
    }
    Ok(Outcome {
        report,
        code: if ev.accepted { exit::OK } else { exit::INFEASIBLE },
    })
}

pub fn cmd_search(a: &SearchArgs) -> Result<Outcome, CliError> {
    let ds = load(&a.data)?;
    let aleph = a.relax.params()?;
    let pool = default_pool(&ds, &a.data, &a.pool);
    let cfg = search_config(&a.sampling, a.max_set_size, &a.forbid_witness, &a.forbid_member);
    let results = wpp_search(&ds, &pool, &a.data.x, &a.data.y, &aleph, &cfg)?;
    let mode = match a.summary {
        SummaryArg::Union => SummaryMode::Union,
        SummaryArg::MinMax => SummaryMode::MinMax,
        SummaryArg::Quantile => SummaryMode::Quantile(a.quantile),
        SummaryArg::Best => SummaryMode::BestScore,
    };
    let summary = match summarize(&results, mode) {
        Ok(b) => interval_json(&b),
        Err(WitnessError::EmptyResults) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome {
        report: json!({
            "pool": pool,
            "n_results": results.len(),
            "summary": summary,
            "results": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        }),
        code: exit::OK,
    })
}

pub fn cmd_simulate(a: &SimulateArgs) -> Result<Outcome, CliError> {
    if a.datasets == 0 || a.points == 0 || a.samples == 0 || a.k_eps.is_empty() {
        return Err(CliError::Validation("datasets, points, samples and k-eps must be nonempty".into()));
    }
    let mut cfg = StudyConfig::full_scale(!a.unsolvable, !a.easy);
    cfg.n_datasets = a.datasets;
    cfg.n_points = a.points;
    cfg.k_eps = a.k_eps.clone();
    cfg.mc_samples = a.samples;
    cfg.seed = a.seed;
    cfg.engine = a.engine.into();
    if let Some(m) = a.max_set_size {
        cfg.max_set_size = m;
    }
    for &k in &cfg.k_eps {
        for &(bl, bh) in &cfg.betas {
            RelaxationParams::new(k, k, k, bl, bh)?;
        }
    }
    let report = run_study(&cfg);
    if a.table {
        eprint!("{}", report.to_text());
    }
    Ok(Outcome {
        report: json!({ "study": report, "table": report.to_text() }),
        code: exit::OK,
    })
}

pub fn cmd_aleph(a: &AlephArgs) -> Result<Outcome, CliError> {
    let ds = load(&a.data)?;
    let z = non_empty(&a.z);
    let prior = match a.prior {
        PriorArg::Uniform => AlephPrior::Uniform,
        PriorArg::Gaussian => {
            let three = |v: &[f64], what: &str| -> Result<[f64; 3], CliError> {
                v.try_into()
                    .map_err(|_| CliError::Validation(format!("{what} needs exactly three values")))
            };
            AlephPrior::TruncatedGaussian {
                means: three(&a.prior_means, "--prior-means")?,
                variances: three(&a.prior_vars, "--prior-vars")?,
            }
        }
    };

    let pairs: Vec<(String, Vec<String>, f64)> = if a.references.is_empty() {
        let aleph = a.relax.params()?;
        let pool = default_pool(&ds, &a.data, &a.pool);
        let cfg = search_config(&a.sampling, None, &a.forbid_witness, &a.forbid_member);
        let found = wpp_search(&ds, &pool, &a.data.x, &a.data.y, &aleph, &cfg)?;
        found.into_iter().map(|r| (r.witness, r.admissible, f64::NAN)).collect()
    } else {
        a.references
            .iter()
            .map(|s| (String::new(), non_empty(&s.split(',').map(str::to_string).collect::<Vec<_>>()), f64::NAN))
            .collect()
    };
    // Back-door estimates of the candidate references on the posterior
    // mean joint table.
    let mut with_ace = Vec::with_capacity(pairs.len());
    for (w, set, _) in pairs {
        let mut cols = vec![a.data.y.clone(), a.data.x.clone()];
        cols.extend(set.iter().cloned());
        let pv = JointTable::posterior_mean(&ds, &cols, a.sampling.ess)?;
        let ace = backdoor_ace(&pv, &set, &a.data.x, &a.data.y)?;
        with_ace.push((w, set, ace));
    }
    let refset = reference_set(&with_ace, &z, a.allow_empty);
    let mut warnings = Vec::new();
    if refset.len() < 2 {
        warnings.push(format!(
            "only {} reference set(s); the posterior is driven mostly by the prior",
            refset.len()
        ));
    }

    let table = empirical_counts(&ds, &a.data.y, &a.data.x, &a.witness, &z)?;
    let config = MhConfig {
        iters: a.iters,
        burn_in: a.burn_in,
        step: a.step,
        seed: a.sampling.seed,
    };
    let chain = aleph_mh(&prior, &table, &refset, a.sampling.engine.into(), &config)?;
    if let Some(path) = &a.chain {
        chain.write_csv(BufWriter::new(File::create(path)?))?;
    }
    let means = chain.means();
    Ok(Outcome {
        report: json!({
            "references": refset.members,
            "warnings": warnings,
            "acceptance": chain.acceptance,
            "posterior_means": {
                "eps_w": means[0], "eps_xy": means[1], "beta": means[2], "ace": means[3],
            },
            "n_states": chain.states.len(),
        }),
        code: exit::OK,
    })
}

pub fn cmd_bench(a: &BenchArgs) -> Result<Outcome, CliError> {
    let aleph = a.relax.params()?;
    let gap = width_gap_batch(a.models, &aleph, a.seed).map_err(|e| CliError::Compute(e.to_string()))?;
    let timing = timing_batch(a.runs, a.points, a.samples, &aleph, a.seed)?;
    Ok(Outcome {
        report: json!({
            "width_gap": { "mean": gap.mean, "sd": gap.sd, "n": gap.gaps.len(), "skipped": gap.skipped },
            "timing": timing,
        }),
        code: exit::OK,
    })
}

/// Runs a parsed command and writes its report. Returns the exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    configure_workers()?;
    let (outcome, out) = match &cli.command {
        Command::Bounds(a) => (cmd_bounds(a)?, &a.out),
        Command::Search(a) => (cmd_search(a)?, &a.out),
        Command::Simulate(a) => (cmd_simulate(a)?, &a.out),
        Command::Aleph(a) => (cmd_aleph(a)?, &a.out),
        Command::Bench(a) => (cmd_bench(a)?, &a.out),
    };
    let mut doc = header(&cli.command);
    doc["result"] = outcome.report;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Compute(e.to_string()))?;
    match out {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p)?);
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                // A closed pipe means the reader has what it wants.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(outcome.code)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("acebounds").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn bounds_flags_parse() {
        let c = parse(&[
            "bounds", "--input", "d.csv", "--x", "X", "--y", "Y", "--witness", "W", "--z", "A,B", "--eps-w", "0.1",
            "--eps-x", "0.3", "--eps-y", "0.4", "--beta-low", "0.9", "--beta-high", "1.1", "--engine", "lp",
            "--samples", "50", "--seed", "7", "--out", "o.json",
        ]);
        let Command::Bounds(b) = c.command else { panic!() };
        assert_eq!(b.z, vec!["A", "B"]);
        assert_eq!(b.relax.eps_w, 0.1);
        assert_eq!(b.relax.beta_high, 1.1);
        assert_eq!(b.sampling.engine, EngineArg::Lp);
        assert_eq!(b.sampling.samples, 50);
        assert_eq!(b.out, Some(PathBuf::from("o.json")));
    }

    #[test]
    fn search_flags_parse() {
        let c = parse(&[
            "search", "--input", "d.csv", "--x", "X", "--y", "Y", "--pool", "A,B,C", "--forbid-witness", "A",
            "--forbid-member", "B,C",
        ]);
        let Command::Search(s) = c.command else { panic!() };
        assert_eq!(s.pool.len(), 3);
        assert_eq!(s.forbid_member, vec!["B", "C"]);
        assert_eq!(s.summary, SummaryArg::Best);
    }

    #[test]
    fn invalid_relaxation_is_a_validation_error() {
        let r = RelaxArgs {
            eps_w: 0.2,
            eps_x: 0.2,
            eps_y: 0.2,
            beta_low: 1.2,
            beta_high: 1.0,
        };
        assert_eq!(r.params().unwrap_err().exit_code(), exit::VALIDATION);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let a = DataArgs {
            input: PathBuf::from("/nonexistent/file.csv"),
            x: "X".into(),
            y: "Y".into(),
            delimiter: ',',
        };
        assert_eq!(load(&a).unwrap_err().exit_code(), exit::IO);
    }
}
