//! Pseudospectral simulation of the Maxwell–Lorentz system with a rigid,
//! spinning, spherically symmetric charge, written in Hamilton–Poisson
//! variables `(A, Π, q, p, π)`, together with the machinery to audit its
//! conservation laws and momentum map numerically.

pub mod charge;
pub mod checks;
pub mod comoving;
pub mod config;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod init;
pub mod integrator;
pub mod momentum;
pub mod snapshot;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

pub use charge::ChargeProfile;
pub use comoving::{ComovingState, Rotation};
pub use grid::{GridSpec, ScalarField, VectorField3};
pub use hamiltonian::{Model, PhaseVector, State};
pub use integrator::RunConfig;
