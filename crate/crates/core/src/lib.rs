//! Exact simple valuations on finite posets.
//!
//! Weights are dyadic rationals held exactly. The valuation order is decided
//! by max flow (the Splitting Lemma), measures are represented as layered maps
//! out of the Cantor tree, and those maps are turned into samplers on the unit
//! interval.
//!
//! ```
//! use std::sync::Arc;
//! use powerdomain::{text, SimpleValuation, Space};
//!
//! let p = Arc::new(text::parse_poset(
//!     "element bot\nelement a\nelement b\nelement top\nbottom bot\n\
//!      cover bot a\ncover bot b\ncover a top\ncover b top",
//! ).unwrap());
//! let mu = SimpleValuation::from_named(&p, &[("a", "1/2^1"), ("b", "1/2^1")]).unwrap();
//! let nu = SimpleValuation::from_named(&p, &[("top", "1")]).unwrap();
//! assert!(mu.leq(&nu).unwrap());
//! assert!(!nu.way_below(&nu, Space::Probability).unwrap());
//! ```

pub mod cantor;
pub mod chain;
pub mod dyadic;
pub mod flow;
pub mod pipeline;
pub mod poset;
pub mod skorohod;
pub mod text;
pub mod valuation;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use cantor::{pushforward_counting, unit_to_word, word_to_unit, CantorError, Level, Word, WordKind, MAX_DEPTH};
pub use chain::{cdf, lower_adjoint, pushforward_lebesgue, Cdf, ChainError, QuantileMap};
pub use dyadic::{Dyadic, DyadicError};
pub use flow::{max_flow, max_flow_min_cut, min_cut, Cut, Edge, Flow, FlowError, FlowNetwork, Node};
pub use pipeline::{
    skorohod, skorohod_sequence, skorohod_subprobability, target_from_ratios, GridRecord, PipelineError,
    SequenceReport, SequenceWitness, SkorohodWitness,
};
pub use poset::{Classification, ElementId, Poset, PosetError, UpperSet, ORACLE_BOUND};
pub use skorohod::{
    build_schedule, convergence_check, lift_step, represent, represent_sequence, represent_subprobability,
    ApproximationSchedule, ConvergenceReport, Layer, RepresentationMap, SequenceRepresentation, SkorohodError,
    SubprobabilityRepresentation, WordOutcome,
};
pub use text::TextError;
pub use valuation::{
    portmanteau_check, Condition, MonotoneMap, OrderDecision, PortmanteauReport, PortmanteauWitness, SetCheck,
    SimpleValuation, Space, TransportPlan, ValuationError,
};

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Valuation(#[from] ValuationError),
    #[error(transparent)]
    Cantor(#[from] CantorError),
    #[error(transparent)]
    Skorohod(#[from] SkorohodError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Text(#[from] TextError),
}
