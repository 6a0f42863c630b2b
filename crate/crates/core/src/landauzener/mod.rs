//! Special functions and the Landau-Zener inner problem: the parabolic
//! cylinder solution of the two-level equation, matching coefficients and
//! the outgoing transition amplitudes.

pub mod gamma;
pub mod inner;
pub mod pcf;
pub mod transition;

pub use gamma::{gamma_complex, rgamma};
pub use inner::{InnerSolution, LzParameters};
pub use pcf::{pcf_d, pcf_d_with, PcfMethod, PcfOptions};
pub use transition::{matching_coefficients, transition_matrix, transition_phase, IncomingPacket, TransitionResult};
