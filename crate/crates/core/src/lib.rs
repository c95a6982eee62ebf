//! Exact and bounded belief computation for discrete Bayesian networks.
//!
//! Networks are generic over the probability scalar ([`Prob`]); the
//! aliases at the crate root fix it to `f64` or `f32`.

pub mod analysis;
pub mod bcond;
pub mod cutset;
pub mod dynamic;
pub mod error;
pub mod fixtures;
pub mod model;
pub mod netgen;
pub mod polytree;
pub mod scalar;

pub use analysis::{CutsetAnalysis, LocalCutsetKind, LocalCutsets, RelevantCutsets};
pub use bcond::{
    abstract_network, bounded_belief, epsilon_sweep, pruned_belief, zero_rank_propagation, Abstraction, AssumptionSet,
    Bounds,
};
pub use cutset::{find_loop_cutset, is_loop_cutset, ConditionedNetwork, ConditionedStructure, LoopCutset};
pub use dynamic::{dc_belief, dc_belief_all, DynamicEngine, EngineStats, MessageKey, MessageKind};
pub use error::{Error, Result};
pub use model::format::{parse_network, serialize_network};
pub use model::oracle::{oracle_marginal, oracle_marginals};
pub use model::{Cpt, Findings, Instantiation, Network, NetworkBuilder, SupportVector, VarId, Variable};
pub use netgen::{diamond_ladder, n_bit_adder, random_loopy, Family, GeneratorSpec};
pub use polytree::PolytreeState;
pub use scalar::Prob;

pub type Network64 = Network<f64>;
pub type Network32 = Network<f32>;
pub type SupportVector64 = SupportVector<f64>;
pub type SupportVector32 = SupportVector<f32>;
pub type Bounds64 = Bounds<f64>;
pub type Bounds32 = Bounds<f32>;
