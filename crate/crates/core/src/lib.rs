//! Kicked Ising Floquet circuit: Pauli-operator algebra, state-vector
//! evolution, symmetry-sector spectra and the fidelity / golden-rule analyses
//! built on top of them.

pub mod error;
pub mod fgr;
pub mod fidelity;
pub mod linalg;
pub mod par;
pub mod pauli;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use fidelity::{AveragedFidelity, FidelityTrace};
pub use par::Exec;
pub use pauli::model::ModelParams;
pub use pauli::{commutator, Pauli, PauliOperator, PauliString};
pub use spectral::sector::SectorBasis;
pub use state::floquet::{FloquetStepPlan, Propagator};
pub use state::StateVector;
