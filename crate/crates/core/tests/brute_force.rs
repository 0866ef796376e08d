mod common;

use common::*;
use spinchaos::entangle::{
    concurrence, default_partitions, fermionic_purity, n_local_purity, reduced_density,
    FermionPlan,
};
use spinchaos::hamiltonian::{
    build_sector_hamiltonian, sample_realization, uniform_realization, DisorderLaw, ModelParams,
};
use spinchaos::lattice::LatticeSpec;
use spinchaos::linalg::{eigh, eigvalsh};
use spinchaos::symmetry::sz_basis;

fn lattices() -> Vec<LatticeSpec> {
    vec![
        LatticeSpec::chain(4).unwrap(),
        LatticeSpec::chain(6).unwrap(),
        LatticeSpec::grid(2, 2).unwrap(),
        LatticeSpec::grid(2, 3).unwrap(),
    ]
}

fn disordered() -> ModelParams {
    ModelParams { eps_mean: 0.7, eps_spread: 1.0, j_mean: 1.0, j_spread: 1.5, law: DisorderLaw::Uniform }
}

#[test]
fn sector_blocks_match_full_hamiltonian() {
    for lattice in lattices() {
        let l = lattice.num_sites();
        let real = sample_realization(&disordered(), &lattice, 3).unwrap();
        let full = full_hamiltonian(&lattice, &real);
        let mut all = Vec::new();
        for sz in (-(l as i32)..=l as i32).step_by(2) {
            let basis = sz_basis(l, sz).unwrap();
            let h = build_sector_hamiltonian(&real, &lattice, &basis).unwrap();
            for (a, &sa) in basis.states().iter().enumerate() {
                for (b, &sb) in basis.states().iter().enumerate() {
                    assert!((h[(a, b)] - full[(sa as usize, sb as usize)]).abs() < 1e-14);
                }
            }
            all.extend(eigvalsh(&h).unwrap());
        }
        all.sort_by(f64::total_cmp);
        let reference = eigvalsh(&full).unwrap();
        let gap = all.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-10, "{lattice:?}: {gap}");
    }
}

#[test]
fn full_hamiltonian_is_traceless_without_field() {
    for lattice in lattices() {
        let p = ModelParams { eps_mean: 0.0, eps_spread: 0.0, ..disordered() };
        let real = sample_realization(&p, &lattice, 11).unwrap();
        assert!(full_hamiltonian(&lattice, &real).trace().abs() < 1e-12);
    }
}

#[test]
fn four_site_ground_state_pair_density() {
    let lattice = LatticeSpec::chain(4).unwrap();
    let basis = sz_basis(4, 0).unwrap();
    let real = uniform_realization(&lattice, 0.0, 1.0).unwrap();
    let spec = eigh(&build_sector_hamiltonian(&real, &lattice, &basis).unwrap()).unwrap();
    let ground = spec.vectors.column(0);
    let rho = reduced_density(&ground, &basis, &[0, 1]).unwrap();
    let reference = pauli_reconstructed_rdm(&embed(&ground, &basis), 4, &[0, 1]);
    assert!(rho.rho.max_abs_diff(&reference) < 1e-12);
}

#[test]
fn reduced_densities_and_purities_match_full_register() {
    for lattice in lattices() {
        let l = lattice.num_sites();
        let basis = sz_basis(l, 0).unwrap();
        let real = sample_realization(&disordered(), &lattice, 5).unwrap();
        let spec = eigh(&build_sector_hamiltonian(&real, &lattice, &basis).unwrap()).unwrap();
        let subsets: Vec<Vec<usize>> = vec![vec![0], vec![l - 1], vec![0, 1], vec![2, 0], vec![1, 3, 0]];
        for k in 0..spec.dim() {
            let state = spec.vectors.column(k);
            let full = embed(&state, &basis);
            for sites in &subsets {
                let rho = reduced_density(&state, &basis, sites).unwrap();
                let reference = pauli_reconstructed_rdm(&full, l, sites);
                assert!(rho.rho.max_abs_diff(&reference) < 1e-10, "{sites:?}");
                if sites.len() == 2 {
                    let c = concurrence(&rho).unwrap();
                    let c_ref = concurrence(&spinchaos::ReducedDensity {
                        sites: sites.clone(),
                        rho: reference,
                    })
                    .unwrap();
                    assert!((c - c_ref).abs() < 1e-8);
                }
            }
            for n in (1..=l).filter(|n| l % n == 0 && *n <= 3) {
                let part = default_partitions(&lattice, n).unwrap();
                let d = (1 << n) as f64;
                let expected = part
                    .blocks
                    .iter()
                    .map(|b| {
                        let r = pauli_reconstructed_rdm(&full, l, b);
                        let pur: f64 = r.as_slice().iter().map(|x| x * x).sum();
                        (d * pur - 1.0) / (d - 1.0)
                    })
                    .sum::<f64>()
                    / part.blocks.len() as f64;
                let got = n_local_purity(&state, &basis, &part).unwrap();
                assert!((got - expected).abs() < 1e-10, "n = {n}");
            }
        }
    }
}

#[test]
fn fermionic_purity_matches_full_correlation_matrix() {
    for lattice in lattices() {
        let l = lattice.num_sites();
        let basis = sz_basis(l, 0).unwrap();
        let real = sample_realization(&disordered(), &lattice, 8).unwrap();
        let spec = eigh(&build_sector_hamiltonian(&real, &lattice, &basis).unwrap()).unwrap();
        let plan = FermionPlan::new(&basis);
        for k in 0..spec.dim() {
            let state = spec.vectors.column(k);
            let m = full_correlation_matrix(&embed(&state, &basis), l);
            assert!(plan.correlation_matrix(&state, &basis).max_abs_diff(&m) < 1e-12);
            let expected = 4.0 / l as f64 * (m.matmul(&m).trace() - m.trace()) + 1.0;
            let got = fermionic_purity(&state, &basis).unwrap();
            assert!((got - expected).abs() < 1e-10);
        }
    }
}

#[test]
fn two_site_examples_from_full_register() {
    // (|0101⟩ + |1010⟩)/√2 on four sites.
    let basis = sz_basis(4, 0).unwrap();
    let mut v = vec![0.0; basis.dim()];
    v[basis.index_of(0b0101).unwrap()] = std::f64::consts::FRAC_1_SQRT_2;
    v[basis.index_of(0b1010).unwrap()] = std::f64::consts::FRAC_1_SQRT_2;
    let m = full_correlation_matrix(&embed(&v, &basis), 4);
    let expected = (m.matmul(&m).trace() - m.trace()) + 1.0;
    assert!((fermionic_purity(&v, &basis).unwrap() - expected).abs() < 1e-10);
}
