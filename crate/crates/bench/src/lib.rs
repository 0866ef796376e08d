//! Fixtures shared by the benchmarks.

use spinchaos::hamiltonian::{build_sector_hamiltonian, sample_realization, DisorderLaw, ModelParams};
use spinchaos::lattice::LatticeSpec;
use spinchaos::linalg::Matrix;
use spinchaos::symmetry::{sz_basis, SectorBasis};

/// The `S_z = 0` Hamiltonian of one disordered 12-site chain.
pub fn chain_sector(seed: u64) -> (LatticeSpec, SectorBasis, Matrix) {
    let lattice = LatticeSpec::chain(12).expect("valid chain");
    let basis = sz_basis(12, 0).expect("valid sector");
    let params = ModelParams {
        eps_mean: 1.0,
        eps_spread: 1.0,
        j_mean: 0.5,
        j_spread: 0.0,
        law: DisorderLaw::Uniform,
    };
    let real = sample_realization(&params, &lattice, seed).expect("valid params");
    let h = build_sector_hamiltonian(&real, &lattice, &basis).expect("sizes match");
    (lattice, basis, h)
}
