//! Qualitative probabilistic networks (QPNs) over finite discrete variables.
//!
//! The crate covers three layers:
//!
//! * exact discrete joint tables and first-order stochastic dominance
//!   ([`dist`]) together with the pairwise positive-dependence checkers built
//!   on them ([`dependence`]);
//! * signed DAGs with d-separation and trail enumeration ([`graph`]), the
//!   four-valued sign algebra ([`sign`]) and qualitative inference by trail
//!   propagation or reduce/reverse query processing ([`inference`]);
//! * numerical verification that a joint table satisfies a QPN
//!   ([`semantics`]) and the built-in fixtures and randomized counterexample
//!   search ([`scenarios`]).
//!
//! Inference comes in two modes. [`Mode::Classical`] assumes influences are
//! symmetric, which only holds when both endpoints of an edge are binary.
//! [`Mode::Sound`] replaces every sign obtained by reading an edge against its
//! direction between non-binary variables with `?`.

pub mod dependence;
pub mod dist;
pub mod error;
pub mod graph;
pub mod inference;
pub mod sampling;
pub mod scenarios;
pub mod semantics;
pub mod sign;

pub use dependence::{
    association_check, influence_sign, influence_sign_explained, mlrp_check, prop1_forward,
    prop1_witness_search, tp2_check, AssociationReport, DominanceWitness, Influence,
    InfluenceVerdict, Likelihood, MlrpReport, MlrpWitness, Tp2Report,
};
pub use dist::{cdf_of, fsd_compare, Cdf, DominanceOrder, JointTable, VariableSpec, EPS_PROB};
pub use error::{Error, Result};
pub use graph::{Direction, Qpn, SignedDag, SignedEdge, Trail, TrailStep};
pub use inference::{
    propagate, query, reduce_vertex, reverse_edge, Mode, PropagationResult, QueryOp, QueryResult,
    QueryStep,
};
pub use sampling::{simplex, trial_rng};
pub use scenarios::{
    factorized_joint, figure1_qpn, find_counterexample, random_cpts, random_factorized_joint,
    shuttle_distribution, shuttle_qpn, table1_fixture, two_node_qpn, Claim, CounterexampleReport,
    Cpts,
};
pub use semantics::{
    ci_deviation, markov_check, satisfies_qpn, EdgeViolation, MarkovViolation, SatisfactionReport,
    EPS_CI,
};
pub use sign::Sign;
