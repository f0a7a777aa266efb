//! Six-parameter resultant shell kinematics, drilling-invariant strain
//! measures, isotropic energies and a small variational solver.

pub mod audit;
pub mod cli;
pub mod drilling;
pub mod eigen;
pub mod energy;
pub mod error;
pub mod fields;
pub mod flow;
pub mod geometry;
pub mod kinematics;
pub mod linearized;
pub mod measures;
pub mod minimizer;
pub mod tensor;

pub use error::{Result, ShellError};
