//! Disorder realizations and the Heisenberg Hamiltonian
//! `H = Σ_i (ε_i/2) σ_z^i + Σ_⟨ij⟩ (J_ij/4) σ⃗_i·σ⃗_j` on a fixed-`S_z` basis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::Matrix;
use crate::symmetry::SectorBasis;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderLaw {
    /// Offsets uniform on `[−spread/2, spread/2]`.
    #[default]
    Uniform,
    /// Offsets normal with standard deviation `spread/4`.
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub eps_mean: f64,
    pub eps_spread: f64,
    pub j_mean: f64,
    pub j_spread: f64,
    pub law: DisorderLaw,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.eps_mean, self.eps_spread, self.j_mean, self.j_spread]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Config("model parameters must be finite".into()));
        }
        if self.eps_spread < 0.0 || self.j_spread < 0.0 {
            return Err(Error::Config("disorder spreads must be non-negative".into()));
        }
        Ok(())
    }
}

/// One draw of on-site energies and bond couplings.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub eps: Vec<f64>,
    /// One coupling per bond, in the lattice's canonical bond order.
    pub couplings: Vec<f64>,
    pub seed: u64,
}

/// Seed of realization `index` within an ensemble.
pub fn realization_seed(master_seed: u64, index: u64) -> u64 {
    master_seed.wrapping_add(index)
}

/// Draws a realization from ChaCha8 seeded with `seed`: all sites in index
/// order, then all bonds in canonical order.
pub fn sample_realization(
    params: &ModelParams,
    lattice: &LatticeSpec,
    seed: u64,
) -> Result<Realization> {
    params.validate()?;
    let bonds = lattice.bonds()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |mean: f64, spread: f64| -> f64 {
        match params.law {
            DisorderLaw::Uniform => mean + spread * (rng.random::<f64>() - 0.5),
            DisorderLaw::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                mean + 0.25 * spread * z
            }
        }
    };
    let eps = (0..lattice.num_sites()).map(|_| draw(params.eps_mean, params.eps_spread)).collect();
    let couplings = bonds.iter().map(|_| draw(params.j_mean, params.j_spread)).collect();
    Ok(Realization { eps, couplings, seed })
}

/// Disorder-free realization with `ε_i = eps` and `J_ij = j`.
pub fn uniform_realization(lattice: &LatticeSpec, eps: f64, j: f64) -> Result<Realization> {
    Ok(Realization {
        eps: vec![eps; lattice.num_sites()],
        couplings: vec![j; lattice.bonds()?.len()],
        seed: 0,
    })
}

#[inline]
fn spin_z(state: u32, site: usize) -> f64 {
    if (state >> site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense sector matrix of the Hamiltonian.
///
/// Diagonal: `Σ_i (ε_i/2) z_i + Σ_b (J_b/4) z_i z_j`; off-diagonal `J_b/2`
/// between bitstrings related by exchanging an antiparallel pair on bond `b`.
pub fn build_sector_hamiltonian(
    real: &Realization,
    lattice: &LatticeSpec,
    basis: &SectorBasis,
) -> Result<Matrix> {
    let bonds = lattice.bonds()?;
    if basis.sites() != lattice.num_sites()
        || real.eps.len() != lattice.num_sites()
        || real.couplings.len() != bonds.len()
    {
        return Err(Error::Config(format!(
            "size mismatch: lattice has {} sites / {} bonds, basis {} sites, realization {} / {}",
            lattice.num_sites(),
            bonds.len(),
            basis.sites(),
            real.eps.len(),
            real.couplings.len()
        )));
    }
    let n = basis.dim();
    let mut h = Matrix::zeros(n, n);
    for (k, &s) in basis.states().iter().enumerate() {
        let mut diag: f64 =
            real.eps.iter().enumerate().map(|(i, e)| 0.5 * e * spin_z(s, i)).sum();
        for (b, &jb) in bonds.iter().zip(&real.couplings) {
            let zz = spin_z(s, b.i) * spin_z(s, b.j);
            diag += 0.25 * jb * zz;
            if zz < 0.0 && jb != 0.0 {
                let t = s ^ (1 << b.i) ^ (1 << b.j);
                let kt = basis.index_of(t).expect("exchange conserves magnetization");
                h[(kt, k)] += 0.5 * jb;
            }
        }
        h[(k, k)] = diag;
    }
    Ok(h)
}

/// Clean Heisenberg exchange `H_J` with uniform coupling `j` and no field.
pub fn exchange_hamiltonian(lattice: &LatticeSpec, basis: &SectorBasis, j: f64) -> Result<Matrix> {
    build_sector_hamiltonian(&uniform_realization(lattice, 0.0, j)?, lattice, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvalsh;
    use crate::symmetry::{parity_matrix, sz_basis, total_spin_matrix};

    fn params(eps_spread: f64, j_spread: f64, law: DisorderLaw) -> ModelParams {
        ModelParams { eps_mean: 1.0, eps_spread, j_mean: 1.0, j_spread, law }
    }

    #[test]
    fn zero_spread_is_clean() {
        let lattice = LatticeSpec::grid(3, 4).unwrap();
        let r = sample_realization(&params(0.0, 0.0, DisorderLaw::Uniform), &lattice, 5).unwrap();
        assert!(r.eps.iter().all(|&e| e == 1.0));
        assert_eq!(r.couplings.len(), 17);
        assert!(r.couplings.iter().all(|&j| j == 1.0));
        let g = sample_realization(&params(0.0, 0.0, DisorderLaw::Gaussian), &lattice, 5).unwrap();
        assert!(g.couplings.iter().all(|&j| j == 1.0));
    }

    #[test]
    fn uniform_draws_in_range_and_centered() {
        let lattice = LatticeSpec::chain(12).unwrap();
        let p = params(2.0, 0.0, DisorderLaw::Uniform);
        let mut sum = 0.0;
        let mut count = 0.0;
        for seed in 0..10_000 {
            let r = sample_realization(&p, &lattice, seed).unwrap();
            for &e in &r.eps {
                assert!((0.0..=2.0).contains(&e));
                sum += e;
                count += 1.0;
            }
        }
        // Uniform width 2: σ = 2/√12; 3σ bound on the mean of ~1.2e5 draws.
        let sigma_mean = (2.0 / 12f64.sqrt()) / f64::sqrt(count);
        assert!((sum / count - 1.0).abs() < 3.0 * sigma_mean);
    }

    #[test]
    fn gaussian_width_is_quarter_spread() {
        let lattice = LatticeSpec::chain(12).unwrap();
        let p = ModelParams { j_spread: 4.0, ..params(0.0, 0.0, DisorderLaw::Gaussian) };
        let draws: Vec<f64> = (0..5_000)
            .flat_map(|s| sample_realization(&p, &lattice, s).unwrap().couplings)
            .collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((var.sqrt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn realizations_are_reproducible() {
        let lattice = LatticeSpec::grid(3, 4).unwrap();
        let p = params(1.0, 3.0, DisorderLaw::Uniform);
        let a = sample_realization(&p, &lattice, 42).unwrap();
        let b = sample_realization(&p, &lattice, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_realization(&p, &lattice, 43).unwrap());
        assert!(sample_realization(&params(-1.0, 0.0, DisorderLaw::Uniform), &lattice, 1).is_err());
    }

    #[test]
    fn two_site_singlet_triplet() {
        let lattice = LatticeSpec::chain(2).unwrap();
        let basis = sz_basis(2, 0).unwrap();
        let h = exchange_hamiltonian(&lattice, &basis, 1.0).unwrap();
        assert_eq!(h, Matrix::from_vec(2, 2, vec![-0.25, 0.5, 0.5, -0.25]));
        let ev = eigvalsh(&h).unwrap();
        assert!((ev[0] + 0.75).abs() < 1e-15 && (ev[1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exactly_symmetric() {
        let lattice = LatticeSpec::grid(3, 4).unwrap();
        let basis = sz_basis(12, 0).unwrap();
        let r = sample_realization(&params(1.0, 2.0, DisorderLaw::Uniform), &lattice, 3).unwrap();
        let h = build_sector_hamiltonian(&r, &lattice, &basis).unwrap();
        assert_eq!(h.asymmetry(), 0.0);
    }

    #[test]
    fn commutes_with_total_spin_without_field_disorder() {
        for lattice in [LatticeSpec::chain(8).unwrap(), LatticeSpec::grid(2, 4).unwrap()] {
            let basis = sz_basis(8, 0).unwrap();
            let s2 = total_spin_matrix(&basis);
            let r =
                sample_realization(&params(0.0, 1.5, DisorderLaw::Uniform), &lattice, 9).unwrap();
            let h = build_sector_hamiltonian(&r, &lattice, &basis).unwrap();
            let comm = h.matmul(&s2).sub(&s2.matmul(&h));
            assert!(comm.max_abs() < 1e-10);
        }
    }

    #[test]
    fn clean_hamiltonian_commutes_with_reflections() {
        for lattice in [LatticeSpec::chain(8).unwrap(), LatticeSpec::grid(2, 4).unwrap()] {
            let basis = sz_basis(8, 0).unwrap();
            let h = build_sector_hamiltonian(
                &uniform_realization(&lattice, 0.7, 1.3).unwrap(),
                &lattice,
                &basis,
            )
            .unwrap();
            for refl in lattice.reflections() {
                let p = parity_matrix(&basis, &refl).unwrap();
                assert!(h.matmul(&p).sub(&p.matmul(&h)).max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn size_mismatch_is_config_error() {
        let lattice = LatticeSpec::chain(4).unwrap();
        let basis = sz_basis(6, 0).unwrap();
        let r = uniform_realization(&lattice, 0.0, 1.0).unwrap();
        assert!(matches!(build_sector_hamiltonian(&r, &lattice, &basis), Err(Error::Config(_))));
    }
}
