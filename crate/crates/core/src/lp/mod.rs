//! The bounding linear program over `(η, ω, κ)`.
//!
//! Decision variables are laid out as `η_{xw}` at `0..4`, `ω_{xw}` at `4..8`
//! and `κ_{yx.w}` at `8..16`, each block indexed like the tables module.
//! `κ` and `ω` are the observational and interventional parameters averaged
//! under the latent prior; `η` carries the objective
//! `Σ_w P(W = w)(η_{1w} − η_{0w})`.

pub mod simplex;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::{
    dual_conversion, relaxed_vertices, DeltaBox, EtaBox, HRep, PolytopeError, ETA_OFFSET, JOINT_DIM,
};
use crate::tables::{cell_index, xw_index, StratumTable};
use simplex::{maximize, LpStatus, SimplexError};

/// Number of LP decision variables.
pub const N_VARS: usize = 16;
const ETA: usize = 0;
const OMEGA: usize = 4;
const KAPPA: usize = 8;
/// Slack added to polytope rows so that round-off in the facet data cannot
/// turn a boundary point infeasible.
const HREP_SLACK: f64 = 1e-11;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid relaxation parameters: {0}")]
    InvalidParams(String),
    #[error("halfspace representation has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("solver failure: {0}")]
    Solver(#[from] SimplexError),
    #[error("stratum weights and bounds differ in length ({0} vs {1})")]
    StrataMismatch(usize, usize),
}

/// The relaxation vector: how far the model may depart from a witness
/// structure with exact independences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationParams {
    /// Maximum direct dependence of `Y` on `W` given `X` and the latents.
    pub eps_w: f64,
    /// Maximum change in `P(X = 1 | W)` from conditioning on the latents.
    pub eps_x: f64,
    /// Maximum change in `P(Y = 1 | X, W)` from conditioning on the latents.
    pub eps_y: f64,
    pub beta_low: f64,
    pub beta_high: f64,
}

impl RelaxationParams {
    pub fn new(
        eps_w: f64,
        eps_x: f64,
        eps_y: f64,
        beta_low: f64,
        beta_high: f64,
    ) -> Result<Self, LpError> {
        let p = Self {
            eps_w,
            eps_x,
            eps_y,
            beta_low,
            beta_high,
        };
        p.validate()?;
        Ok(p)
    }

    /// All epsilons zero and `β = 1`: the exact witness model.
    pub fn exact() -> Self {
        Self {
            eps_w: 0.0,
            eps_x: 0.0,
            eps_y: 0.0,
            beta_low: 1.0,
            beta_high: 1.0,
        }
    }

    /// The standard instrumental-variable model: `ε_w = 0`, other epsilons
    /// vacuous, `β = 1`.
    pub fn standard_iv() -> Self {
        Self {
            eps_w: 0.0,
            eps_x: 1.0,
            eps_y: 1.0,
            beta_low: 1.0,
            beta_high: 1.0,
        }
    }

    /// All epsilons one and `β = 1`: no constraint beyond the data.
    pub fn vacuous() -> Self {
        Self {
            eps_w: 1.0,
            eps_x: 1.0,
            eps_y: 1.0,
            beta_low: 1.0,
            beta_high: 1.0,
        }
    }

    /// `ε_w = ε_x = ε_y = k`, `β̲ = c`, `β̄ = 1/c`.
    pub fn from_k_c(k: f64, c: f64) -> Result<Self, LpError> {
        if c <= 0.0 {
            return Err(LpError::InvalidParams(format!("c must be positive, got {c}")));
        }
        Self::new(k, k, k, c, 1.0 / c)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for (name, v) in [("eps_w", self.eps_w), ("eps_x", self.eps_x), ("eps_y", self.eps_y)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(LpError::InvalidParams(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if !(self.beta_low > 0.0 && self.beta_low <= 1.0) {
            return Err(LpError::InvalidParams(format!(
                "beta_low = {} outside (0, 1]",
                self.beta_low
            )));
        }
        if !(self.beta_high >= 1.0 && self.beta_high.is_finite()) {
            return Err(LpError::InvalidParams(format!(
                "beta_high = {} must be finite and at least 1",
                self.beta_high
            )));
        }
        Ok(())
    }
}

/// A closed interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalBound {
    pub lower: f64,
    pub upper: f64,
}

impl IntervalBound {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn point(v: f64) -> Self {
        Self { lower: v, upper: v }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lower - tol && v <= self.upper + tol
    }

    /// Whether `other ⊆ self` up to `tol`.
    pub fn contains_interval(&self, other: &IntervalBound, tol: f64) -> bool {
        other.lower >= self.lower - tol && other.upper <= self.upper + tol
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }
}

/// Result of a bounding computation: an interval, or proof that the relaxed
/// model cannot have generated the observed table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BoundOutcome {
    Bounded(IntervalBound),
    Infeasible,
}

impl BoundOutcome {
    pub fn interval(&self) -> Option<IntervalBound> {
        match self {
            Self::Bounded(b) => Some(*b),
            Self::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Self::Infeasible)
    }
}

/// `A x ≤ b` over the 16 decision variables with the ACE objective.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub objective: [f64; N_VARS],
    /// Row labels used by the text dump.
    pub labels: Vec<String>,
}

impl LpProblem {
    fn push(&mut self, row: [f64; N_VARS], rhs: f64, label: String) {
        self.a.push(row.to_vec());
        self.b.push(rhs);
        self.labels.push(label);
    }

    /// Renders the problem in CPLEX LP text format (maximization).
    pub fn to_lp_format(&self) -> String {
        let mut s = String::from("\\ ACE bounding program\nMaximize\n obj:");
        write_expr(&mut s, &self.objective);
        s.push_str("\nSubject To\n");
        for ((row, rhs), label) in self.a.iter().zip(&self.b).zip(&self.labels) {
            let _ = write!(s, " {label}:");
            write_expr(&mut s, row);
            let _ = writeln!(s, " <= {rhs:.17e}");
        }
        s.push_str("Bounds\n");
        for i in 0..N_VARS {
            let _ = writeln!(s, " 0 <= {} <= 1", var_name(i));
        }
        s.push_str("End\n");
        s
    }
}

fn write_expr(s: &mut String, row: &[f64]) {
    let mut any = false;
    for (i, &v) in row.iter().enumerate() {
        if v != 0.0 {
            let _ = write!(s, " {} {:.17e} {}", if v < 0.0 { "-" } else { "+" }, v.abs(), var_name(i));
            any = true;
        }
    }
    if !any {
        let _ = write!(s, " 0 {}", var_name(0));
    }
}

/// Name of LP variable `i` in text dumps.
pub fn var_name(i: usize) -> String {
    match i {
        0..=3 => format!("eta_{}{}", i >> 1, i & 1),
        4..=7 => format!("omega_{}{}", (i - 4) >> 1, (i - 4) & 1),
        _ => {
            let c = i - 8;
            format!("kappa_{}{}{}", c >> 2, (c >> 1) & 1, c & 1)
        }
    }
}

/// Observed conditionals of a stratum, with undefined entries left `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedConditionals {
    pub p_w: [f64; 2],
    /// `P(Y = y, X = x | W = w)` by cell index.
    pub zeta: [Option<f64>; 8],
    /// `P(X = 1 | W = w)`.
    pub p_x1: [Option<f64>; 2],
    /// `P(Y = 1 | X = x, W = w)` by `xw_index`.
    pub p_y1: [Option<f64>; 4],
}

impl ObservedConditionals {
    pub fn from_stratum(s: &StratumTable) -> Self {
        let s = s.normalized();
        let mut zeta = [None; 8];
        for (i, z) in zeta.iter_mut().enumerate() {
            *z = s.cond(i >> 2, (i >> 1) & 1, i & 1);
        }
        let mut p_y1 = [None; 4];
        for x in 0..2 {
            for w in 0..2 {
                p_y1[xw_index(x, w)] = s.p_y1_given_xw(x, w);
            }
        }
        Self {
            p_w: [s.p_w(0), s.p_w(1)],
            zeta,
            p_x1: [s.p_x1_given_w(0), s.p_x1_given_w(1)],
            p_y1,
        }
    }

    /// `[P(Y=1|x,w) ∓ ε_y] ∩ [0,1]`, vacuous where undefined.
    pub fn eta_box(&self, eps_y: f64) -> EtaBox {
        let mut b = EtaBox {
            lower: [0.0; 4],
            upper: [1.0; 4],
        };
        for i in 0..4 {
            if let Some(p) = self.p_y1[i] {
                b.lower[i] = (p - eps_y).clamp(0.0, 1.0);
                b.upper[i] = (p + eps_y).clamp(0.0, 1.0);
            }
        }
        b
    }

    /// `[P(X=1|w) ∓ ε_x] ∩ [0,1]`, vacuous where undefined.
    pub fn delta_box(&self, eps_x: f64) -> DeltaBox {
        let mut b = DeltaBox {
            lower: [0.0; 2],
            upper: [1.0; 2],
        };
        for w in 0..2 {
            if let Some(p) = self.p_x1[w] {
                b.lower[w] = (p - eps_x).clamp(0.0, 1.0);
                b.upper[w] = (p + eps_x).clamp(0.0, 1.0);
            }
        }
        b
    }
}

/// Halfspace form of the relaxed `(ζ*, η*)` space for one stratum, or
/// `None` when the `ε_w` polygon is empty.
pub fn relaxed_hrep(
    obs: &ObservedConditionals,
    aleph: &RelaxationParams,
) -> Result<Option<HRep>, PolytopeError> {
    match relaxed_vertices(&obs.eta_box(aleph.eps_y), &obs.delta_box(aleph.eps_x), aleph.eps_w) {
        Ok(v) => dual_conversion(&v).map(Some),
        Err(PolytopeError::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Assembles the LP for one stratum.
///
/// `pw` weights the objective; `zeta` supplies the `κ` links.
pub fn build_lp(
    h: &HRep,
    zeta: &StratumTable,
    pw: [f64; 2],
    aleph: &RelaxationParams,
) -> Result<LpProblem, LpError> {
    if h.dim != JOINT_DIM {
        return Err(LpError::DimensionMismatch {
            expected: JOINT_DIM,
            found: h.dim,
        });
    }
    aleph.validate()?;
    let obs = ObservedConditionals::from_stratum(zeta);
    let mut lp = LpProblem {
        a: Vec::new(),
        b: Vec::new(),
        objective: [0.0; N_VARS],
        labels: Vec::new(),
    };
    for w in 0..2 {
        lp.objective[ETA + xw_index(1, w)] += pw[w];
        lp.objective[ETA + xw_index(0, w)] -= pw[w];
    }
    for (k, (row, &rhs)) in h.a.iter().zip(&h.b).enumerate() {
        let mut r = [0.0; N_VARS];
        for i in 0..8 {
            r[KAPPA + i] = row[i];
        }
        for i in 0..4 {
            r[OMEGA + i] = row[ETA_OFFSET + i];
        }
        lp.push(r, rhs + HREP_SLACK, format!("poly{k}"));
    }
    for i in 0..8 {
        if let Some(z) = obs.zeta[i] {
            let mut r = [0.0; N_VARS];
            r[KAPPA + i] = 1.0;
            lp.push(r, (z / aleph.beta_low).min(1.0), format!("kappa_hi{i}"));
            r[KAPPA + i] = -1.0;
            lp.push(r, -(z / aleph.beta_high), format!("kappa_lo{i}"));
        }
    }
    for i in 0..4 {
        let mut r = [0.0; N_VARS];
        r[OMEGA + i] = aleph.beta_low;
        r[ETA + i] = -1.0;
        lp.push(r, 0.0, format!("omega_eta_lo{i}"));
        let mut r = [0.0; N_VARS];
        r[ETA + i] = 1.0;
        r[OMEGA + i] = -aleph.beta_high;
        lp.push(r, 0.0, format!("omega_eta_hi{i}"));
    }
    for i in 0..N_VARS {
        let mut r = [0.0; N_VARS];
        r[i] = 1.0;
        lp.push(r, 1.0, format!("ub_{}", var_name(i)));
        r[i] = -1.0;
        lp.push(r, 0.0, format!("lb_{}", var_name(i)));
    }
    for w in 0..2 {
        let mut r = [0.0; N_VARS];
        for y in 0..2 {
            for x in 0..2 {
                r[KAPPA + cell_index(y, x, w)] = 1.0;
            }
        }
        lp.push(r, 1.0, format!("simplex_hi{w}"));
        r.iter_mut().for_each(|v| *v = -*v);
        lp.push(r, -1.0, format!("simplex_lo{w}"));
    }
    Ok(lp)
}

/// Minimum and maximum of the objective over the feasible region.
pub fn solve_interval(lp: &LpProblem) -> Result<BoundOutcome, LpError> {
    let up = match maximize(&lp.objective, &lp.a, &lp.b)? {
        LpStatus::Optimal(s) => s.objective,
        LpStatus::Infeasible => return Ok(BoundOutcome::Infeasible),
        LpStatus::Unbounded => return Err(LpError::Solver(SimplexError::NonFinite)),
    };
    let neg: Vec<f64> = lp.objective.iter().map(|v| -v).collect();
    let lo = match maximize(&neg, &lp.a, &lp.b)? {
        LpStatus::Optimal(s) => -s.objective,
        LpStatus::Infeasible => return Ok(BoundOutcome::Infeasible),
        LpStatus::Unbounded => return Err(LpError::Solver(SimplexError::NonFinite)),
    };
    Ok(BoundOutcome::Bounded(IntervalBound::new(lo, up.max(lo))))
}

/// Weighted combination of per-stratum bounds; any infeasible stratum makes
/// the whole model infeasible.
pub fn stratified_interval(per_z: &[BoundOutcome], pz: &[f64]) -> Result<BoundOutcome, LpError> {
    if per_z.len() != pz.len() {
        return Err(LpError::StrataMismatch(pz.len(), per_z.len()));
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (b, &p) in per_z.iter().zip(pz) {
        match b {
            BoundOutcome::Infeasible => return Ok(BoundOutcome::Infeasible),
            BoundOutcome::Bounded(i) => {
                lo += p * i.lower;
                hi += p * i.upper;
            }
        }
    }
    Ok(BoundOutcome::Bounded(IntervalBound::new(lo, hi)))
}

/// The full LP pipeline for one stratum: boxes, vertices, halfspaces, LP.
pub fn lp_stratum_bounds(zeta: &StratumTable, aleph: &RelaxationParams) -> Result<BoundOutcome, LpError> {
    aleph.validate()?;
    let obs = ObservedConditionals::from_stratum(zeta);
    let Some(h) = relaxed_hrep(&obs, aleph)? else {
        return Ok(BoundOutcome::Infeasible);
    };
    let lp = build_lp(&h, zeta, obs.p_w, aleph)?;
    solve_interval(&lp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> StratumTable {
        StratumTable::from_conditionals(0.4, [0.3, 0.7], [0.2, 0.5, 0.6, 0.9])
    }

    #[test]
    fn objective_arithmetic() {
        let h = relaxed_hrep(&ObservedConditionals::from_stratum(&table()), &RelaxationParams::vacuous())
            .unwrap()
            .unwrap();
        let lp = build_lp(&h, &table(), [0.6, 0.4], &RelaxationParams::vacuous()).unwrap();
        let eta = [0.0, 0.0, 1.0, 1.0];
        let v: f64 = (0..4).map(|i| lp.objective[i] * eta[i]).sum();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kappa_links_follow_beta() {
        let mut cells = [0.0; 8];
        cells[cell_index(1, 1, 1)] = 0.18;
        cells[cell_index(0, 1, 1)] = 0.32;
        cells[cell_index(1, 0, 1)] = 0.5;
        cells[cell_index(0, 0, 0)] = 1.0;
        let t = StratumTable::new(cells).normalized();
        let aleph = RelaxationParams::new(1.0, 1.0, 1.0, 0.9, 1.1).unwrap();
        let h = relaxed_hrep(&ObservedConditionals::from_stratum(&t), &aleph).unwrap().unwrap();
        let lp = build_lp(&h, &t, [0.5, 0.5], &aleph).unwrap();
        let i = lp.labels.iter().position(|l| l == "kappa_hi7").unwrap();
        assert!((lp.b[i] - 0.2).abs() < 1e-12);
        let i = lp.labels.iter().position(|l| l == "kappa_lo7").unwrap();
        assert!((-lp.b[i] - 0.18 / 1.1).abs() < 1e-12);
    }

    #[test]
    fn vacuous_model_is_wide() {
        let b = lp_stratum_bounds(&table(), &RelaxationParams::vacuous()).unwrap();
        let i = b.interval().unwrap();
        assert!(i.lower <= 0.0 && i.upper >= 0.0);
        assert!(i.width() > 0.9);
    }

    #[test]
    fn exact_model_on_chain_is_a_point() {
        let t = StratumTable::from_conditionals(0.4, [0.3, 0.7], [0.2, 0.2, 0.9, 0.9]);
        let b = lp_stratum_bounds(&t, &RelaxationParams::exact()).unwrap().interval().unwrap();
        assert!(b.width().abs() < 1e-9);
        assert!((b.lower - 0.7).abs() < 1e-9);
    }

    #[test]
    fn exact_model_rejects_direct_effect() {
        let b = lp_stratum_bounds(&table(), &RelaxationParams::exact()).unwrap();
        assert!(b.is_infeasible());
    }

    #[test]
    fn stratified_combination() {
        let b = stratified_interval(
            &[
                BoundOutcome::Bounded(IntervalBound::new(0.0, 0.2)),
                BoundOutcome::Bounded(IntervalBound::new(0.4, 0.6)),
            ],
            &[0.5, 0.5],
        )
        .unwrap();
        let i = b.interval().unwrap();
        assert!((i.lower - 0.2).abs() < 1e-15 && (i.upper - 0.4).abs() < 1e-15);
        let b = stratified_interval(
            &[BoundOutcome::Bounded(IntervalBound::new(0.0, 0.2)), BoundOutcome::Infeasible],
            &[1.0, 0.0],
        )
        .unwrap();
        assert!(b.is_infeasible());
    }

    #[test]
    fn lp_dump_mentions_every_row() {
        let h = relaxed_hrep(&ObservedConditionals::from_stratum(&table()), &RelaxationParams::vacuous())
            .unwrap()
            .unwrap();
        let lp = build_lp(&h, &table(), [0.6, 0.4], &RelaxationParams::vacuous()).unwrap();
        let text = lp.to_lp_format();
        assert!(text.starts_with("\\ ACE"));
        assert_eq!(text.matches(" <= ").count() - N_VARS * 2, lp.b.len());
    }
}
