//! Wave-packet propagation on a surface of revolution in an axial magnetic
//! field, with Landau-Zener transitions at avoided crossings of the angular
//! levels.
//!
//! The crate is organised bottom-up:
//!
//! - [`surface`]: the radius profile `R(x)` and the geometric potentials.
//! - [`angular`]: the rotor spectrum, the coupling `W`, two-level reduction
//!   and perturbative modified potentials.
//! - [`classical`]: trajectories, actions and linearized flows.
//! - [`packets`]: Hagedorn packets and Born-Oppenheimer states.
//! - [`landauzener`]: special functions and the inner transition problem.
//! - [`exact`]: a Crank-Nicolson reference solver on an `x` × mode lattice.
//! - [`pipeline`]: scenarios, the crossing experiment and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod angular;
pub mod classical;
pub mod error;
pub mod exact;
pub mod landauzener;
pub mod packets;
pub mod par;
pub mod pipeline;
pub mod surface;

pub use error::{Error, Result};
pub use par::Execution;
