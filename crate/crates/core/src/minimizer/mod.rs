//! Desk-scale variational solver for the discretized shell functional.

pub mod assemble;
pub mod loads;
pub mod mesh;
pub mod residual;
pub mod solve;

pub use assemble::{assemble_energy, assemble_gradient, DensityRoute, DiscreteEnergy};
pub use loads::{BoundarySpec, EdgeCondition, EdgeSpec, LoadSpec};
pub use mesh::{DofField, ShellMesh};
pub use residual::{equilibrium_residual, ResidualReport};
pub use solve::{minimize, IterationRecord, MinimizeOptions, MinimizeResult, Problem};
