//! Finite Kripke frames: relation algebra, modal formulas and their
//! semantics, tuned partitions, frame sums and covers, and the defect-based
//! construction of finite subalgebras.

mod error;
mod exec;
mod frame;
mod relation;
mod worldset;

pub mod defect;
pub mod experiment;
pub mod formula;
pub mod io;
pub mod partition;
pub mod semantics;
pub mod sums;

pub use error::{Error, Result};
pub use exec::Exec;
pub use formula::Formula;
pub use frame::{clusters_of, transitivity_degree, Cluster, Frame, ModalityAlphabet, Skeleton};
pub use partition::Partition;
pub use relation::{compose, star, Relation};
pub use semantics::Model;
pub use worldset::WorldSet;
