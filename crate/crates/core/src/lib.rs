//! Balanced Pólya urns: simulation, Jordan structure of the replacement
//! operator, reduced polynomial bases and exact moment recursions.

pub mod cli;
pub mod error;
pub mod field;
pub mod moments;
pub mod poly;
pub mod reduction;
pub mod rng;
pub mod spectral;
pub mod urn;
pub mod verify;

pub use error::{Error, Result, Violation};
pub use field::Field;
pub use spectral::{classify, decompose, Arith, Decomposition, SpectralDecomposition, SpectralOptions, UrnClass, UrnKind};
pub use urn::{simulate, validate, NormalizedUrn, Trajectory, UrnSpec, UrnState};
