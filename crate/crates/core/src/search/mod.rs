//! Critical points of `φ_k` on the admissible set and the linking-level check.

pub mod linking;
pub mod optimize;
pub mod region;

pub use linking::{check_linking_level, LinkingMode, LinkingOptions, LinkingOutcome, LinkingReport};
pub use optimize::{classify, find_minimum, local_minimum, newton_polish, CriticalPoint, PointKind, SearchOptions, SearchResult};
pub use region::{Negated, Objective, PhiObjective, SearchRegion};
