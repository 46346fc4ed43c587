//! Mean-field Dicke-Bose-Hubbard model.
//!
//! A lattice of coupled cavities, each holding `N` two-level atoms, is reduced
//! to a single-site problem by decoupling the photon hopping with a real
//! superfluid order parameter `ψ`. This crate builds the truncated on-site
//! Hamiltonian, solves it, and sweeps it over hopping and chemical potential
//! to map Mott-insulator lobes and the superfluid region.

pub mod contour;
pub mod dressed;
pub mod eig;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod matrix;
pub mod meanfield;
pub mod sweep;

pub use error::{Error, Result};
pub use hamiltonian::{BasisState, ModelParams};
pub use matrix::SymmetricMatrix;
pub use meanfield::{MeanFieldSolution, Phase};
pub use sweep::{GridSpec, PhaseGrid};
