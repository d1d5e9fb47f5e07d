//! Cyclic constant-dimension subspace codes from Sidon spaces and subspace
//! polynomials.

pub mod channel;
pub mod field;
pub mod linalg;
pub mod linearized;
pub mod orbit;
pub mod sidon;
pub mod subspace;

pub use field::{FieldElement, FieldError, FieldOps, FieldTower, Level, TowerSpec};
