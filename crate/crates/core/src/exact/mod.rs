//! Reference solver for `iδ²∂ₜψ = H(δ)ψ` on an axial grid times a window
//! of angular modes.

pub mod banded;
pub mod grid;
pub mod hamiltonian;
pub mod observables;
pub mod propagate;

pub use banded::{BandedLu, BandedMatrix};
pub use grid::{Grid, WaveField};
pub use hamiltonian::{build_hamiltonian, metric_correction, AssemblyOptions, DiscreteHamiltonian};
pub use observables::{integrated_bound, loglog_slope, operator_norm_on, overlap, residual_norm, LevelProjector};
pub use propagate::Propagator;
