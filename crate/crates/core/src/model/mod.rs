//! The network model: variables, CPTs, instantiations, the `.bnet` text
//! format, graph utilities and the brute-force marginal oracle.

mod findings;
pub mod format;
pub mod graph;
mod instantiation;
mod network;
pub mod oracle;
mod support;

pub use findings::Findings;
pub use instantiation::{Assignments, Instantiation};
pub use network::{Cpt, Network, NetworkBuilder, VarId, Variable};
pub use support::SupportVector;
