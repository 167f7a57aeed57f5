//! Exact diagonalization of definite-particle sectors of disordered quantum
//! Heisenberg Hamiltonians
//!
//! ```text
//! H = Σ_{i<j} J_ij σ_i·σ_j = Σ_{i<j} J_ij (2 S_ij − 1)
//! ```
//!
//! together with pairwise concurrence and participation-ratio statistics of
//! every eigenstate, identification of promoted eigenstates through the
//! collective ladder operators σ±, random-state ensembles and scaling-law
//! fits.
//!
//! The numerical core is generic over the scalar type through [`Real`]
//! (implemented for `f32` and `f64`). Purely algebraic pieces such as the
//! unnormalized ladder action and the participation ratio of an unnormalized
//! vector only need [`num_traits::Num`], so they also run on exact rationals.
//! Concrete `f64`/`f32` aliases for the main types live at the crate root.

pub mod basis;
pub mod couplings;
pub mod ensembles;
pub mod entanglement;
mod error;
pub mod experiment;
pub mod fitting;
pub mod ladder;
pub mod oracle;
pub mod rng;
mod scalar;
pub mod sector;
pub mod spectrum;
pub mod stats;
pub mod verify;

pub use basis::{Pattern, SectorBasis};
pub use couplings::{CouplingMatrix, CouplingModel};
pub use entanglement::{DefiniteParticleState, PairRdm};
pub use error::{Error, Result};
pub use ladder::{Classification, Label, PromotionMap};
pub use scalar::Real;
pub use sector::SectorMatrix;
pub use spectrum::Spectrum;

pub type CouplingMatrixF64 = CouplingMatrix<f64>;
pub type CouplingMatrixF32 = CouplingMatrix<f32>;
pub type SectorMatrixF64 = SectorMatrix<f64>;
pub type SectorMatrixF32 = SectorMatrix<f32>;
pub type SpectrumF64 = Spectrum<f64>;
pub type SpectrumF32 = Spectrum<f32>;
pub type StateF64 = DefiniteParticleState<f64>;
pub type StateF32 = DefiniteParticleState<f32>;
pub type PairRdmF64 = PairRdm<f64>;
pub type PairRdmF32 = PairRdm<f32>;
pub type ClassificationF64 = Classification<f64>;
pub type FitResultF64 = fitting::FitResult<f64>;

/// Crate version echoed into output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
