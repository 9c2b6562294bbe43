//! Estimation of Pareto sets for multi-objective learning problems in high
//! dimensions.
//!
//! The library centers on quadratic objectives `L(theta) = (theta-b)' Q (theta-b) + c`,
//! which cover multi-distribution squared-loss regression (`Q` a covariance
//! matrix), fixed-design regression (`Q = X'X/n`) and a demographic-parity
//! fairness score (`Q = mu mu'`). On top of that normal form it provides:
//!
//! - closed-form minimizers of linearly scalarized objective tuples and
//!   coordinate-descent / proximal-gradient solvers for l1-penalized
//!   quadratics ([`solvers`]),
//! - plug-in, directly regularized and two-stage Pareto-point estimators
//!   together with their stage-1 parameter estimators ([`estimators`]),
//! - front quality metrics: estimation error, excess scalarized loss,
//!   exact and Monte-Carlo hypervolume, and smoothness-based front bounds
//!   ([`metrics`]),
//! - seeded synthetic generators including worst-case covariance
//!   constructions used as adversarial test fixtures ([`datagen`]),
//! - CSV ingestion and preprocessing for fairness datasets ([`dataio`]),
//! - whole-set approximators: simplex-grid ensembles and small
//!   preference-conditioned hypernetworks trained with Adam ([`pareto_set`]),
//! - a deterministic experiment runner behind the `paretofit` CLI
//!   ([`experiments`]).
//!
//! Everything is deterministic given explicit seeds: random draws go through
//! a counter-based generator keyed by `(seed, purpose-tag)` ([`rng`]).

// Negated float comparisons are deliberate: they reject NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod dataio;
mod error;
pub mod estimators;
pub mod experiments;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod pareto_set;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use linalg::Mat;
pub use model::{
    eval_objective, eval_scalarized, fairness_objective, fairness_risk_objective, grad_objective,
    regularity_of, ObjectiveTuple, QuadraticObjective, RegularityConstants, ScalarizationKind,
    SimplexWeights,
};
pub use solvers::{PenalizedQuadratic, SolverRun, SolverSettings};
