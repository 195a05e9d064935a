//! Linear relations in finite-dimensional Hilbert spaces, nonnegative
//! selfadjoint relations, their 2×2 block structure and Schur complements.

pub mod block;
pub mod error;
pub mod generator;
pub mod json;
pub mod kernel;
pub mod nonneg;
pub mod relation;
pub mod schur;
pub mod subspace;
pub mod verify;

pub use block::BlockRepresentation;
pub use error::{Error, Result};
pub use generator::{Instance, InstanceSpec};
pub use kernel::{ComplexMatrix, Tolerances, C64};
pub use nonneg::NonnegSelfAdjointRelation;
pub use relation::{LinearRelation, OperatorPart};
pub use schur::SchurResult;
pub use subspace::Subspace;
