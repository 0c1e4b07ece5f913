//! Spatial dependence of the Rydberg blockade shift and of the two-pulse
//! controlled-phase gate fidelity for a pair of alkali atoms.
//!
//! The pipeline runs bottom-up:
//!
//! 1. [`species`]: quantum-defect series for one atomic species, loaded from a
//!    TOML data file.
//! 2. [`atomic`]: Rydberg level energies, Numerov radial wavefunctions on a
//!    square-root grid, and radial dipole matrix elements.
//! 3. [`pair`]: dipole-allowed interaction channels, their C6 coefficients,
//!    angular dyad operators and the van der Waals Hamiltonian on the
//!    two-atom Zeeman space.
//! 4. [`blockade`]: laser-selected bright pair states and the mean blockade
//!    shift as a function of separation and angle.
//! 5. [`gate`]: the two-pulse protocol, its calibration and the Bell-state
//!    fidelity.
//! 6. [`sweep`]: (R, θ) maps with validity flags and run manifests.

pub mod angular;
pub mod atomic;
pub mod blockade;
pub mod error;
pub mod gate;
pub mod pair;
pub mod species;
pub mod sweep;
pub mod units;

pub use error::{Error, Result};
pub use species::{SpeciesModel, Term};
