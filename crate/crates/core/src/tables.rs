//! Binary data ingestion, contingency tables and Dirichlet/BDeu machinery.
//!
//! A [`ContingencyTable`] holds one 2×2×2 table over `(Y, X, W)` for each
//! assignment `z` of the admissible set, plus the stratum weights `P(Z = z)`.
//! Cells are addressed with [`cell_index`]: bit 2 is `y`, bit 1 is `x`,
//! bit 0 is `w`. Strata are addressed by the bits of `z`, with the first
//! column of the admissible set in bit 0.

use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Default BDeu equivalent sample size.
pub const DEFAULT_ESS: f64 = 10.0;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("non-binary value `{value}` at row {row}, column `{column}`")]
    NonBinary {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("columns must be distinct: {0}")]
    OverlappingRoles(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("too many variables for a joint table: {0}")]
    TooManyVariables(usize),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
}

/// Index of cell `(y, x, w)` inside a stratum.
#[inline]
pub const fn cell_index(y: usize, x: usize, w: usize) -> usize {
    (y << 2) | (x << 1) | w
}

/// Index of `(x, w)` in the four-entry arrays used for η, ω and box bounds.
#[inline]
pub const fn xw_index(x: usize, w: usize) -> usize {
    (x << 1) | w
}

/// A column-major matrix of binary observations with named columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryDataset {
    names: Vec<String>,
    columns: Vec<Vec<u8>>,
    n_rows: usize,
}

impl BinaryDataset {
    /// Builds a dataset from row-major data. Every value must be 0 or 1.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<u8>]) -> Result<Self, TableError> {
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != names.len() {
                return Err(TableError::RaggedRow {
                    row: r + 1,
                    found: row.len(),
                    expected: names.len(),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(TableError::NonBinary {
                        row: r + 1,
                        column: names[c].clone(),
                        value: v.to_string(),
                    });
                }
                columns[c].push(v);
            }
        }
        Self::from_columns(names, columns)
    }

    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<u8>>) -> Result<Self, TableError> {
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(TableError::DuplicateColumn(n.clone()));
            }
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (c, col) in columns.iter().enumerate() {
            if col.len() != n_rows {
                return Err(TableError::RaggedRow {
                    row: col.len().min(n_rows) + 1,
                    found: col.len(),
                    expected: n_rows,
                });
            }
            if let Some((r, &v)) = col.iter().enumerate().find(|(_, &v)| v > 1) {
                return Err(TableError::NonBinary {
                    row: r + 1,
                    column: names[c].clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(Self {
            names,
            columns,
            n_rows,
        })
    }

    /// Reads a CSV with a header row. Cells must be exactly `0` or `1`
    /// (surrounding whitespace is tolerated). Row numbers in errors count
    /// data rows from 1.
    pub fn from_csv_reader<R: Read>(reader: R, delimiter: u8) -> Result<Self, TableError> {
        let mut rdr = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); names.len()];
        for (r, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != names.len() {
                return Err(TableError::RaggedRow {
                    row: r + 1,
                    found: rec.len(),
                    expected: names.len(),
                });
            }
            for (c, field) in rec.iter().enumerate() {
                let v = match field.trim() {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(TableError::NonBinary {
                            row: r + 1,
                            column: names[c].clone(),
                            value: other.to_string(),
                        })
                    }
                };
                columns[c].push(v);
            }
        }
        Self::from_columns(names, columns)
    }

    pub fn from_csv_path(path: impl AsRef<Path>, delimiter: u8) -> Result<Self, TableError> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(file), delimiter)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<(), TableError> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(&self.names)?;
        let mut buf = vec![String::new(); self.names.len()];
        for r in 0..self.n_rows {
            for (c, col) in self.columns.iter().enumerate() {
                buf[c] = col[r].to_string();
            }
            wtr.write_record(&buf)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize, TableError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| TableError::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, idx: usize) -> &[u8] {
        &self.columns[idx]
    }

    /// Resolves a list of column names to indices.
    pub fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, TableError> {
        names.iter().map(|n| self.column_index(n.as_ref())).collect()
    }

    /// Counts of `child` for every configuration of `parents`. Configuration
    /// `j` has parent `i` equal to bit `i` of `j`. Returns `2^|parents|`
    /// rows of `[count(child = 0), count(child = 1)]`.
    pub fn family_counts(&self, child: usize, parents: &[usize]) -> Vec<[f64; 2]> {
        let mut counts = vec![[0.0; 2]; 1 << parents.len()];
        let child_col = &self.columns[child];
        for r in 0..self.n_rows {
            let mut cfg = 0usize;
            for (i, &p) in parents.iter().enumerate() {
                cfg |= (self.columns[p][r] as usize) << i;
            }
            counts[cfg][child_col[r] as usize] += 1.0;
        }
        counts
    }
}

/// Whether a table holds raw counts or normalized probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableForm {
    Counts,
    Probabilities,
}

/// One `(Y, X, W)` table, either counts or the joint `ζ_{yxw}` of a stratum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StratumTable {
    pub cells: [f64; 8],
}

impl StratumTable {
    pub fn new(cells: [f64; 8]) -> Self {
        Self { cells }
    }

    /// Builds a joint table from `P(W = 1)`, `P(X = 1 | W = w)` and
    /// `P(Y = 1 | X = x, W = w)` (indexed by [`xw_index`]).
    pub fn from_conditionals(p_w1: f64, p_x1: [f64; 2], p_y1: [f64; 4]) -> Self {
        let mut cells = [0.0; 8];
        for w in 0..2 {
            let pw = if w == 1 { p_w1 } else { 1.0 - p_w1 };
            for x in 0..2 {
                let px = if x == 1 { p_x1[w] } else { 1.0 - p_x1[w] };
                let py1 = p_y1[xw_index(x, w)];
                cells[cell_index(1, x, w)] = pw * px * py1;
                cells[cell_index(0, x, w)] = pw * px * (1.0 - py1);
            }
        }
        Self { cells }
    }

    pub fn get(&self, y: usize, x: usize, w: usize) -> f64 {
        self.cells[cell_index(y, x, w)]
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn normalized(&self) -> Self {
        let t = self.total();
        if t <= 0.0 {
            return Self {
                cells: [0.125; 8],
            };
        }
        let mut cells = self.cells;
        cells.iter_mut().for_each(|c| *c /= t);
        Self { cells }
    }

    /// `P(W = w)` (for a probability table).
    pub fn p_w(&self, w: usize) -> f64 {
        (0..2)
            .flat_map(|y| (0..2).map(move |x| (y, x)))
            .map(|(y, x)| self.get(y, x, w))
            .sum()
    }

    /// `ζ_{yx.w} = P(Y = y, X = x | W = w)`, or `None` when `P(W = w) = 0`.
    pub fn cond(&self, y: usize, x: usize, w: usize) -> Option<f64> {
        let pw = self.p_w(w);
        (pw > 0.0).then(|| self.get(y, x, w) / pw)
    }

    /// All eight conditionals; strata with `P(W = w) = 0` get the uniform
    /// `1/4` so that downstream code stays finite.
    pub fn conditionals(&self) -> [f64; 8] {
        let mut out = [0.25; 8];
        for w in 0..2 {
            let pw = self.p_w(w);
            if pw > 0.0 {
                for y in 0..2 {
                    for x in 0..2 {
                        out[cell_index(y, x, w)] = self.get(y, x, w) / pw;
                    }
                }
            }
        }
        out
    }

    /// `P(X = 1 | W = w)`.
    pub fn p_x1_given_w(&self, w: usize) -> Option<f64> {
        let pw = self.p_w(w);
        (pw > 0.0).then(|| (self.get(0, 1, w) + self.get(1, 1, w)) / pw)
    }

    /// `P(Y = 1 | X = x, W = w)`.
    pub fn p_y1_given_xw(&self, x: usize, w: usize) -> Option<f64> {
        let pxw = self.get(0, x, w) + self.get(1, x, w);
        (pxw > 0.0).then(|| self.get(1, x, w) / pxw)
    }

    /// `P(Y = 1 | X = 1) − P(Y = 1 | X = 0)` within the stratum.
    pub fn naive_contrast(&self) -> Option<f64> {
        let mut py = [0.0; 2];
        for (x, slot) in py.iter_mut().enumerate() {
            let num = self.get(1, x, 0) + self.get(1, x, 1);
            let den = num + self.get(0, x, 0) + self.get(0, x, 1);
            if den <= 0.0 {
                return None;
            }
            *slot = num / den;
        }
        Some(py[1] - py[0])
    }
}

/// Tables over `(Y, X, W)`, one per stratum of the admissible set `Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub form: TableForm,
    pub strata: Vec<StratumTable>,
    /// Stratum counts (count form) or `P(Z = z)` (probability form).
    pub weights: Vec<f64>,
}

impl ContingencyTable {
    /// A single-stratum probability table.
    pub fn single(stratum: StratumTable) -> Self {
        Self {
            form: TableForm::Probabilities,
            strata: vec![stratum.normalized()],
            weights: vec![1.0],
        }
    }

    pub fn n_strata(&self) -> usize {
        self.strata.len()
    }

    pub fn total(&self) -> f64 {
        self.strata.iter().map(StratumTable::total).sum()
    }

    /// Converts a count table to empirical frequencies.
    pub fn to_probabilities(&self) -> Self {
        if self.form == TableForm::Probabilities {
            return self.clone();
        }
        let n = self.total();
        Self {
            form: TableForm::Probabilities,
            strata: self.strata.iter().map(StratumTable::normalized).collect(),
            weights: self
                .strata
                .iter()
                .map(|s| if n > 0.0 { s.total() / n } else { 0.0 })
                .collect(),
        }
    }

    /// Back-door adjusted ACE over the strata:
    /// `Σ_z P(z) [P(Y=1|X=1,z) − P(Y=1|X=0,z)]`. Strata with zero weight are
    /// skipped; a positive-weight stratum without both treatment arms yields
    /// `None`.
    pub fn backdoor_ace(&self) -> Option<f64> {
        let p = self.to_probabilities();
        let mut acc = 0.0;
        for (s, &wt) in p.strata.iter().zip(&p.weights) {
            if wt <= 0.0 {
                continue;
            }
            acc += wt * s.naive_contrast()?;
        }
        Some(acc)
    }
}

/// Tallies `(Y, X, W)` for every assignment of `z_cols`.
///
/// All `2^|Z|` strata are returned, including those with no observations.
pub fn empirical_counts<S: AsRef<str>>(
    data: &BinaryDataset,
    y_col: &str,
    x_col: &str,
    w_col: &str,
    z_cols: &[S],
) -> Result<ContingencyTable, TableError> {
    let y = data.column_index(y_col)?;
    let x = data.column_index(x_col)?;
    let w = data.column_index(w_col)?;
    let z = data.indices(z_cols)?;
    Ok(counts_by_index(data, y, x, w, &z))
}

pub(crate) fn counts_by_index(
    data: &BinaryDataset,
    y: usize,
    x: usize,
    w: usize,
    z: &[usize],
) -> ContingencyTable {
    let mut strata = vec![StratumTable::new([0.0; 8]); 1 << z.len()];
    let (yc, xc, wc) = (data.column(y), data.column(x), data.column(w));
    for r in 0..data.n_rows() {
        let mut s = 0usize;
        for (i, &zi) in z.iter().enumerate() {
            s |= (data.column(zi)[r] as usize) << i;
        }
        strata[s].cells[cell_index(yc[r] as usize, xc[r] as usize, wc[r] as usize)] += 1.0;
    }
    let weights = strata.iter().map(StratumTable::total).collect();
    ContingencyTable {
        form: TableForm::Counts,
        strata,
        weights,
    }
}

/// Dirichlet concentrations for the per-stratum tables and the stratum
/// weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletSpec {
    /// Concentration added to every `(y, x, w)` cell.
    pub cell: f64,
    /// Concentration added to every stratum of `P(Z)`.
    pub stratum: f64,
}

impl DirichletSpec {
    pub fn uniform(cell: f64, stratum: f64) -> Result<Self, TableError> {
        let spec = Self { cell, stratum };
        spec.validate()?;
        Ok(spec)
    }

    /// BDeu-style spread of an equivalent sample size over the full
    /// `(Y, X, W, Z)` table.
    pub fn bdeu(ess: f64, n_strata: usize) -> Result<Self, TableError> {
        let s = n_strata.max(1) as f64;
        Self::uniform(ess / (8.0 * s), ess / s)
    }

    pub fn validate(&self) -> Result<(), TableError> {
        if !(self.cell > 0.0 && self.stratum > 0.0 && self.cell.is_finite() && self.stratum.is_finite()) {
            return Err(TableError::InvalidPrior(format!(
                "concentrations must be positive and finite, got cell={} stratum={}",
                self.cell, self.stratum
            )));
        }
        Ok(())
    }
}

fn dirichlet_draw<R: Rng + ?Sized>(alphas: &[f64], out: &mut [f64], rng: &mut R) {
    loop {
        let mut sum = 0.0;
        for (o, &a) in out.iter_mut().zip(alphas) {
            // Gamma::new only fails on non-positive or non-finite shapes,
            // which the prior validation rules out.
            let g = Gamma::new(a, 1.0).expect("positive shape").sample(rng);
            *o = g;
            sum += g;
        }
        if sum > 0.0 && sum.is_finite() {
            out.iter_mut().for_each(|o| *o /= sum);
            return;
        }
    }
}

/// Draws a probability table from the unconstrained Dirichlet posterior:
/// each stratum from `Dirichlet(counts + cell)` and the weights from
/// `Dirichlet(stratum counts + stratum)`.
pub fn dirichlet_sample<R: Rng + ?Sized>(
    counts: &ContingencyTable,
    prior: &DirichletSpec,
    rng: &mut R,
) -> ContingencyTable {
    let mut alphas = [0.0; 8];
    let mut strata = Vec::with_capacity(counts.n_strata());
    for s in &counts.strata {
        for (a, &c) in alphas.iter_mut().zip(&s.cells) {
            *a = c + prior.cell;
        }
        let mut cells = [0.0; 8];
        dirichlet_draw(&alphas, &mut cells, rng);
        strata.push(StratumTable::new(cells));
    }
    let mut weights = vec![1.0; counts.n_strata()];
    if counts.n_strata() > 1 {
        let wa: Vec<f64> = counts
            .strata
            .iter()
            .map(|s| s.total() + prior.stratum)
            .collect();
        dirichlet_draw(&wa, &mut weights, rng);
    }
    ContingencyTable {
        form: TableForm::Probabilities,
        strata,
        weights,
    }
}

/// Posterior expected table: `(count + cell) / (N_z + 8 cell)` per stratum,
/// `(N_z + stratum) / (N + S stratum)` for the weights.
pub fn posterior_mean_table(counts: &ContingencyTable, prior: &DirichletSpec) -> ContingencyTable {
    let strata: Vec<StratumTable> = counts
        .strata
        .iter()
        .map(|s| {
            let denom = s.total() + 8.0 * prior.cell;
            let mut cells = [0.0; 8];
            for (o, &c) in cells.iter_mut().zip(&s.cells) {
                *o = (c + prior.cell) / denom;
            }
            StratumTable::new(cells)
        })
        .collect();
    let n = counts.total();
    let k = counts.n_strata() as f64;
    let weights = counts
        .strata
        .iter()
        .map(|s| (s.total() + prior.stratum) / (n + k * prior.stratum))
        .collect();
    ContingencyTable {
        form: TableForm::Probabilities,
        strata,
        weights,
    }
}

/// BDeu log marginal likelihood of a child column.
///
/// `counts[j][k]` is the number of observations with parent configuration
/// `j` and child state `k`. The equivalent sample size is spread uniformly
/// over all `q × r` cells.
pub fn bdeu_log_marginal<C: AsRef<[f64]>>(counts: &[C], ess: f64) -> f64 {
    let q = counts.len().max(1) as f64;
    let mut total = 0.0;
    for row in counts {
        let row = row.as_ref();
        let r = row.len() as f64;
        let a_j = ess / q;
        let a_jk = a_j / r;
        let n_j: f64 = row.iter().sum();
        if n_j == 0.0 {
            continue;
        }
        total += ln_gamma(a_j) - ln_gamma(a_j + n_j);
        for &n in row {
            if n > 0.0 {
                total += ln_gamma(a_jk + n) - ln_gamma(a_jk);
            }
        }
    }
    total
}

/// A full joint probability table over a list of binary variables.
/// Configuration `i` has variable `j` equal to bit `j` of `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointTable {
    pub names: Vec<String>,
    pub probs: Vec<f64>,
}

/// Largest number of variables a [`JointTable`] may hold.
pub const MAX_JOINT_VARS: usize = 24;

impl JointTable {
    /// Posterior expected joint distribution of `columns` under a BDeu prior
    /// of equivalent sample size `ess` spread over all cells.
    pub fn posterior_mean<S: AsRef<str>>(
        data: &BinaryDataset,
        columns: &[S],
        ess: f64,
    ) -> Result<Self, TableError> {
        let idx = data.indices(columns)?;
        if idx.len() > MAX_JOINT_VARS {
            return Err(TableError::TooManyVariables(idx.len()));
        }
        let size = 1usize << idx.len();
        let mut counts = vec![0.0; size];
        for r in 0..data.n_rows() {
            let mut cfg = 0usize;
            for (j, &c) in idx.iter().enumerate() {
                cfg |= (data.column(c)[r] as usize) << j;
            }
            counts[cfg] += 1.0;
        }
        let a = ess / size as f64;
        let denom = data.n_rows() as f64 + ess;
        Ok(Self {
            names: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            probs: counts.into_iter().map(|c| (c + a) / denom).collect(),
        })
    }

    pub fn var_index(&self, name: &str) -> Result<usize, TableError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| TableError::UnknownColumn(name.to_string()))
    }

    /// Marginal over `vars`; entry `i` has `vars[j]` equal to bit `j` of `i`.
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << vars.len()];
        for (cfg, &p) in self.probs.iter().enumerate() {
            let mut m = 0usize;
            for (j, &v) in vars.iter().enumerate() {
                m |= ((cfg >> v) & 1) << j;
            }
            out[m] += p;
        }
        out
    }

    /// Probability form contingency table for `(Y, X, W)` stratified by `Z`.
    pub fn contingency<S: AsRef<str>>(
        &self,
        y: &str,
        x: &str,
        w: &str,
        z: &[S],
    ) -> Result<ContingencyTable, TableError> {
        let mut vars = vec![self.var_index(w)?, self.var_index(x)?, self.var_index(y)?];
        for zi in z {
            vars.push(self.var_index(zi.as_ref())?);
        }
        let m = self.marginal(&vars);
        let n_strata = 1usize << z.len();
        let mut strata = vec![StratumTable::new([0.0; 8]); n_strata];
        for (cfg, p) in m.into_iter().enumerate() {
            // bit 0 = w, bit 1 = x, bit 2 = y matches cell_index
            strata[cfg >> 3].cells[cfg & 7] += p;
        }
        let weights: Vec<f64> = strata.iter().map(StratumTable::total).collect();
        Ok(ContingencyTable {
            form: TableForm::Probabilities,
            strata: strata.iter().map(StratumTable::normalized).collect(),
            weights,
        })
    }
}
