//! Classical trajectories, actions and linearized flows on the adiabatic
//! potentials, including the tilded variants built from `Ṽ^C`.

pub mod asymptotics;
pub mod ode;
pub mod potential;
pub mod tilded;
pub mod trajectory;

pub use asymptotics::{outer_asymptotics, outer_asymptotics_physical};
pub use ode::{solve, OdeFailure, OdeOptions};
pub use potential::{Branch, ExactLevel, FnPotential, ModifiedLevel, Potential, Quadratic};
pub use tilded::{integrate_tilded, momentum_from_energy, tilded_initial_data, RegimeExponents, TildedSetup};
pub use trajectory::{
    integrate_classical, integrate_linearized, integrate_trajectory, linspace, ClassicalState, Trajectory,
};
