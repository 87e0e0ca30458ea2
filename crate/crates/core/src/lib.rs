//! Semidefinite-programming upper bounds on classical communication over
//! bipartite and point-to-point quantum channels.

pub mod error;
pub mod linalg;
pub mod channels;
pub mod random;
pub mod sdp;
pub mod divergences;
pub mod symmetry;
pub mod bounds;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SystemShape};
