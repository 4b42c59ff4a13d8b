//! Symmetry-sector spectra: effective Hamiltonian eigenstates, the Floquet
//! eigensystem of the Trotter cycle, and matrix elements of `delta U`.

pub mod floquet;
pub mod lanczos;
pub mod sector;

pub use floquet::{
    deformed_sector_unitary, delta_u_matrix, eigensystem_effective, floquet_eigensystem, DeltaUMatrix,
    EffectiveSpectrum, EigenPair, FloquetEigensystem, SectorFloquetBuilder, Want,
};
pub use sector::{SectorBasis, SectorOperator};
