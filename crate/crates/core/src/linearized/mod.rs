//! Linear theory on the expanded domain: kernel modes, the projected solve, the
//! sphere spectrum and numerical evidence for the kernel dimension.

pub mod count;
pub mod kernel;
pub mod projected;
pub mod spectral;

pub use count::{kernel_count, KernelCount};
pub use kernel::{cutoff, kernel_eval, KernelBasis, DEFAULT_R0};
pub use projected::{assemble_linearized, solution_starstar, Linearized, ProjectedSolveResult, ProjectedSolver};
pub use spectral::{spectral_table, sphere_spectral_check, SpectralCheck};
