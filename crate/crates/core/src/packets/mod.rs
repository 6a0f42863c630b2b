//! Semiclassical wave packets and Born–Oppenheimer state assembly.

pub mod bo;
pub mod cutoff;
pub mod fourier;
pub mod hagedorn;
pub mod phase;

pub use bo::{assemble_bo_state, assemble_inner_state, frame_on_grid, BoState};
pub use cutoff::{cutoff, smooth_cutoff};
pub use fourier::{scaled_fourier, ScaledTransform};
pub use hagedorn::{tracked_sqrt, unit_packet, HagedornPacket};
pub use phase::{adiabatic_phase, connection, transport_phase_on_grid};
