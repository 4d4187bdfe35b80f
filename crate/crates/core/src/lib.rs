//! Philippine Eagle Optimization Algorithm (PEOA) for bound-constrained
//! global minimization.
//!
//! A population of eagles is initialized from a Latin hypercube sample. Every
//! generation the best eagle runs a budgeted local search inside its territory,
//! then the rest of the population is evolved by three operators (Movement,
//! Mutation I with a Lévy flight term, Mutation II) whose usage probabilities,
//! scaling factors and population size adapt as the run progresses.
//!
//! ```no_run
//! use peoa::{benchmarks, OptimizerConfig};
//!
//! let (mut sphere, space) = benchmarks::make("sphere", 5).unwrap();
//! let config = OptimizerConfig::for_dimension(5).with_seed(7);
//! let record = peoa::run(&mut sphere, &space, &config).unwrap();
//! println!("best {:e} after {} evaluations", record.best_value, record.evals_used);
//! ```
//!
//! The [`harness`] module runs the multi-run benchmark protocol and writes CSV
//! reports; [`harness::ExternalObjective`] attaches objectives living in another process.

// Negated comparisons such as `!(x > 0.0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptation;
pub mod benchmarks;
mod error;
pub mod harness;
pub mod local_search;
pub mod operators;
pub mod optimizer;
pub mod sampling;
pub mod types;

pub use error::{Error, Result};
pub use optimizer::{run, GenerationRecord, Optimizer, OptimizerState};
pub use types::{
    function_error, Eagle, Evaluator, FnObjective, Objective, OptimizerConfig, RunRecord,
    SearchSpace, Termination, TracePoint,
};
