//! Bounds on the average causal effect of a binary treatment `X` on a binary
//! outcome `Y` from observational data.
//!
//! The library searches a pool of binary covariates for a witness `W` and an
//! admissible set `Z`, then bounds the effect under a relaxed faithfulness
//! model. Two bounding engines are provided: a linear program built from the
//! vertices of the relaxed parameter space ([`lp`]) and a fast iterative
//! back-substitution over closed-form inequalities ([`symbolic`]).
//!
//! Module map:
//!
//! - [`tables`]: CSV ingestion, contingency tables, Dirichlet sampling, BDeu.
//! - [`polytope`]: polygon vertices, joint vertices, vertex/halfspace conversion.
//! - [`lp`]: dense simplex solver and the bounding linear program.
//! - [`symbolic`]: closed-form bounds, back-substitution and standard IV bounds.
//! - [`engine`]: a single entry point over both engines.
//! - [`bench`]: engine comparison on random chain models.
//! - [`witness`]: witness search, falsification and summaries.
//! - [`relaxation`]: grid search and posterior sampling of relaxation parameters.
//! - [`synthetic`]: simulated causal models and the benchmark study.
//! - [`cli`]: command implementations behind the `acebounds` binary.

pub mod bench;
pub mod cli;
pub mod engine;
pub mod lp;
pub mod polytope;
pub mod relaxation;
pub mod symbolic;
pub mod synthetic;
pub mod tables;
pub mod witness;

pub use engine::{Engine, EngineError};
pub use lp::{IntervalBound, RelaxationParams};
pub use tables::{BinaryDataset, ContingencyTable, DirichletSpec, StratumTable};
