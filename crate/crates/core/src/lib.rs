//! Execution and exhaustive verification of lattice-linear distributed
//! algorithms.
//!
//! The crate runs guarded-command rule sets ([`framework::Algorithm`]) under
//! several scheduling daemons ([`scheduler`]) and checks the structure of
//! their state spaces by enumeration ([`analyzer`], [`report`]). Three rule
//! sets ship with it: a self-stabilizing minimal dominating set ([`mds`]),
//! man-proposing stable marriage ([`smp`]) and a multi-counter fixture whose
//! runs meet the move bound exactly ([`ramp`]).

pub mod analyzer;
pub mod framework;
pub mod graph;
pub mod mds;
pub mod ramp;
pub mod report;
pub mod scheduler;
pub mod smp;

pub use framework::{Algorithm, Domain, GlobalState, LocalState};
pub use graph::{Graph, NodeId};
