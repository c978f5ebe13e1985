//! Entanglement measures for pure and mixed multi-partite states.
//!
//! The centre of the crate is the geometric measure of entanglement: the
//! largest overlap `Λ_max` of a state with product states, with
//! `E_sin² = 1 − Λ²` and `E_log₂ = −2 log₂ Λ`. Around it sit the bipartite
//! measures (concurrence, negativity), convex-roof constructions for a few
//! symmetric families, the relative entropy of entanglement, bound entangled
//! states, small protocol demos and the transverse-field XY chain.
//!
//! Layout conventions shared by every module:
//! - states are dense; party 0 is the most significant digit of a basis index;
//! - logarithms are base 2 unless a name says otherwise;
//! - every stochastic routine takes an explicit seed.

pub mod bipartite;
pub mod boundent;
pub mod error;
pub mod geomopt;
pub mod linalg;
pub mod mixedhull;
pub mod protocols;
pub mod qstate;
pub mod random;
pub mod ree;
pub mod xychain;

mod optim;

pub use error::{Error, Result};
pub use geomopt::{EntanglementReport, HartreeConfig};
pub use num_complex::Complex64 as C64;
pub use qstate::{DensityMatrix, PartitionSpec, ProductState, PureState};

/// Crate version, used in CLI output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
