//! Truncated multimode Fock space: bases, pure and mixed states, and the
//! lifting of linear-optical mode transforms to Fock-space operators.

mod basis;
mod operator;
mod permanent;
mod state;
mod transform;

pub use basis::{basis_size, FockBasis, Occupation, DEFAULT_MAX_BASIS_SIZE};
pub use operator::{Evolve, FockOperator};
pub use permanent::permanent;
pub use state::{DensityOperator, FockState, Projection, StateVector, ZERO_PROBABILITY};
pub use transform::{unitarity_deviation, ModeTransform, TransformKind, UNITARITY_TOL};
