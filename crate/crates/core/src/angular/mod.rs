//! The angular fiber: spectrum of the magnetic rotor `h(R)`, the
//! symmetry-breaking coupling `W`, the two-level reduction at an avoided
//! crossing and the perturbative modified potentials.

pub mod coupling;
pub mod fiber;
pub mod series;
pub mod spectrum;
pub mod twolevel;

pub use coupling::{matrix_element_quadrature, FourierTerm, Harmonic, Perturbation};
pub use fiber::{fix_gauge, FiberEigen, FiberModel, Level, ModeBasis};
pub use series::{modified_potential, perturbation_series, EffectivePair, PerturbationSeries};
pub use spectrum::{classical_effective_minimum, crossing, eigenvalue, eigenvalue_dr, eigenvalue_drr, CrossingPoint};
pub use twolevel::{
    adiabatic_angles, adiabatic_eigvecs, reduce_two_level, AdiabaticVectors, NormalForm, ReducedTwoLevel, Reduction,
    TwoLevelFrame,
};
