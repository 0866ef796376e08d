//! Exact-diagonalization diagnostics of quantum chaos in disordered
//! spin-1/2 Heisenberg lattices: level statistics, eigenvector
//! delocalization and entanglement of the full spectrum.

pub mod deloc;
pub mod entangle;
pub mod error;
pub mod hamiltonian;
pub mod harness;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod rmt_baseline;
pub mod spectral;
pub mod symmetry;

pub use deloc::{BasisFrame, FrameLabel};
pub use entangle::{EntanglementRow, PartitionScheme, ReducedDensity};
pub use error::{Error, Result};
pub use hamiltonian::{DisorderLaw, ModelParams, Realization};
pub use harness::{
    DiagnosticsRow, DisorderCase, LsiMode, Measures, SectorMode, SweepConfig, THREADS_ENV,
};
pub use lattice::{Bond, LatticeSpec};
pub use linalg::{Matrix, Spectrum};
pub use spectral::{SpacingSample, UnfoldingConfig};
pub use symmetry::{ParityMode, SectorBasis, SymmetrySector};
