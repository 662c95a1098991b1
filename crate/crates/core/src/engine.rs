//! Engine selection: the full linear program, closed-form back-substitution,
//! or a combination of the two.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{lp_stratum_bounds, stratified_interval, BoundOutcome, LpError, RelaxationParams};
use crate::polytope::PolytopeError;
use crate::symbolic::{backsub_stratum_bounds, SymbolicError, DEFAULT_MAX_ITERS};
use crate::tables::{ContingencyTable, StratumTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("unknown engine {0:?}; expected lp, backsub or auto")]
    Unknown(String),
}

/// Which bounding method to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Vertex enumeration, dual conversion and linear programming.
    Lp,
    /// Iterative tightening of the closed-form bounds.
    BackSub,
    /// Back-substitution inside sampling loops; the LP on single tables,
    /// falling back to back-substitution when the LP path fails
    /// numerically or finds the table outside its polytope.
    #[default]
    Auto,
}

impl Engine {
    /// The engine used for each posterior draw.
    pub fn for_sampling(self) -> Engine {
        match self {
            Engine::Auto => Engine::BackSub,
            e => e,
        }
    }

    pub fn stratum_bounds(self, zeta: &StratumTable, aleph: &RelaxationParams) -> Result<BoundOutcome, EngineError> {
        match self {
            Engine::Lp => Ok(lp_stratum_bounds(zeta, aleph)?),
            Engine::BackSub => Ok(backsub_stratum_bounds(zeta, aleph, DEFAULT_MAX_ITERS)?),
            Engine::Auto => match lp_stratum_bounds(zeta, aleph) {
                Ok(BoundOutcome::Bounded(b)) => Ok(BoundOutcome::Bounded(b)),
                Ok(BoundOutcome::Infeasible)
                | Err(LpError::Polytope(PolytopeError::NumericalDegeneracy(_)))
                | Err(LpError::Solver(_)) => Ok(backsub_stratum_bounds(zeta, aleph, DEFAULT_MAX_ITERS)?),
                Err(e) => Err(e.into()),
            },
        }
    }

    /// Stratified ACE bounds over every stratum with positive weight.
    /// Strata of zero weight contribute nothing and are not solved.
    pub fn table_bounds(self, table: &ContingencyTable, aleph: &RelaxationParams) -> Result<BoundOutcome, EngineError> {
        let p = table.to_probabilities();
        let mut per = Vec::with_capacity(p.n_strata());
        for (s, &wt) in p.strata.iter().zip(&p.weights) {
            if wt <= 0.0 || s.total() <= 0.0 {
                per.push(BoundOutcome::Bounded(crate::lp::IntervalBound::point(0.0)));
                continue;
            }
            let out = self.stratum_bounds(s, aleph)?;
            if out.is_infeasible() {
                return Ok(BoundOutcome::Infeasible);
            }
            per.push(out);
        }
        Ok(stratified_interval(&per, &p.weights)?)
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Lp => "lp",
            Engine::BackSub => "backsub",
            Engine::Auto => "auto",
        })
    }
}

impl FromStr for Engine {
    type Err = EngineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(Engine::Lp),
            "backsub" | "back-substitution" => Ok(Engine::BackSub),
            "auto" => Ok(Engine::Auto),
            _ => Err(EngineError::Unknown(s.to_string())),
        }
    }
}
