//! Spin-½ lattice Hamiltonians whose eigen (ground) states are Gibbs states
//! of a classical spin system, with exact and Monte Carlo checks of their
//! eigenstate, ground-state and order-parameter properties.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the CLI and the tolerances
//! quoted in the docs assume.

pub mod classical;
pub mod config;
pub mod error;
pub mod lattice;
pub mod model;
pub mod operators;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod verify;

pub use classical::{ClassicalPotential, GibbsMeasure, GibbsParameters, SpinConfiguration};
pub use error::{Error, Result};
pub use lattice::{Lattice, SiteCaps, SiteSet};
pub use model::{CouplingEntry, CouplingTable, DiagonalCoupling, ModelInstance};
pub use operators::{Axis, OperatorMatrix, StateVector};
pub use scalar::{Complex, Real};

pub type Potential = ClassicalPotential<f64>;
pub type Operator = OperatorMatrix<f64>;
pub type State = StateVector<f64>;
pub type Model = ModelInstance<f64>;
pub type Couplings = CouplingTable<f64>;
