//! Bubble profiles, the first approximation and the operators `T`, `R`, `N`.

pub mod ansatz;
pub mod config;
pub mod operators;
pub mod standard;

pub use ansatz::{Ansatz, Correction, Remainders};
pub use config::{check_admissible, select_mu, BubbleConfig};
pub use operators::{residual_star_rays, ExpandedProblem, ResidualMode};
pub use standard::{bubble_mass, limit_rhs, nested_neg_laplacian, rescaled, standard_bubble};
