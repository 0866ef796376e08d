//! Random-state and GOE baselines: closed-form expected n-local purities of
//! Haar-random real states in the `S_z = 0` subspace, a class-by-class
//! enumeration of the same quantity, and Monte-Carlo samplers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::deloc::{goe_npc, npc, BasisFrame};
use crate::entangle::{default_partitions, EntanglementPlan, EntanglementSpec};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{eigvalsh, norm, Matrix};
use crate::pauli::PauliString;
use crate::spectral::{lsi, unfold, SpacingSample, UnfoldingConfig};
use crate::symmetry::{sz_basis, SectorBasis};

/// Block sizes covered by the closed forms.
pub const PURITY_ORDERS: [usize; 5] = [1, 2, 3, 4, 6];

fn binom(n: i64, k: i64) -> i128 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `Σ_k (−1)^k C(m,k) C(L−m, L/2−k)`: trace of a product of `m` distinct
/// `σ_z` over the `S_z = 0` subspace.
pub fn lambda_m(l: usize, m: usize) -> i128 {
    let (l, m) = (l as i64, m as i64);
    (0..=m)
        .map(|k| {
            let term = binom(m, k) * binom(l - m, l / 2 - k);
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubspacePurityTable {
    pub sites: usize,
    pub n0: usize,
    /// `(n, P̄_n)` for every supported block size.
    pub expected: Vec<(usize, f64)>,
}

impl SubspacePurityTable {
    pub fn get(&self, n: usize) -> Option<f64> {
        self.expected.iter().find(|(m, _)| *m == n).map(|&(_, p)| p)
    }
}

/// Closed-form expected purities for `n ∈ {1, 2, 3, 4, 6}` with `2n ≤ L`.
///
/// The `n = 4` and `n = 6` expressions count each flip-flop operator class
/// once rather than weighting it by `C(m, m/2)`; see
/// [`expected_purity_by_enumeration`] for the class-by-class sum.
pub fn expected_purities(l: usize) -> Result<SubspacePurityTable> {
    if l < 4 || l % 2 != 0 || l > 30 {
        return Err(Error::Config(format!("expected purities need even L in 4..=30, got {l}")));
    }
    let n0i = binom(l as i64, l as i64 / 2);
    let n0 = n0i as f64;
    let b = |m: usize| binom((l - m) as i64, ((l - m) / 2) as i64) as f64;
    let lam2 = |m: usize| (lambda_m(l, m) as f64 / n0).powi(2);
    let g = 2.0 / (n0 + 2.0);
    let p2 = (g * (3.0 - lam2(2) + 4.0 / n0 * b(2)) + lam2(2)) / 3.0;
    let mut expected = vec![(1, g), (2, p2)];
    if l >= 6 {
        let p3 = (g * (7.0 - 3.0 * lam2(2) + 24.0 / n0 * b(2)) + 3.0 * lam2(2)) / 7.0;
        expected.push((3, p3));
    }
    if l >= 8 {
        let p4 = (g * (15.0 - 6.0 * lam2(2) - lam2(4) + 48.0 / n0 * b(2) + 8.0 / n0 * b(4))
            + 6.0 * lam2(2)
            + lam2(4))
            / 15.0;
        expected.push((4, p4));
    }
    if l >= 12 {
        let p6 = (g
            * (63.0 - 15.0 * lam2(2) - 15.0 * lam2(4) - lam2(6)
                + 480.0 / n0 * b(2)
                + 480.0 / n0 * b(4)
                + 32.0 / n0 * b(6))
            + 15.0 * lam2(2)
            + 15.0 * lam2(4)
            + lam2(6))
            / 63.0;
        expected.push((6, p6));
    }
    Ok(SubspacePurityTable { sites: l, n0: n0i as usize, expected })
}

/// Decomposition `Π A Π = α A′ + β 𝟙` of a Pauli string compressed to a
/// sector, with `Tr A′ = 0` and `Tr A′² = N′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectedStats {
    pub trace: f64,
    /// `Tr((Π A Π)²)`.
    pub trace_sq: f64,
    pub alpha_sq: f64,
    pub beta_sq: f64,
    /// Mean of `⟨ψ|A|ψ⟩²` over Haar-random real states of the sector.
    pub expected_sq: f64,
}

pub fn projected_operator_stats(p: &PauliString, basis: &SectorBasis) -> ProjectedStats {
    let dim = basis.dim() as f64;
    let flip = p.flip_mask();
    let mut trace = 0.0;
    let mut kept = 0usize;
    for &s in basis.states() {
        if basis.index_of(s ^ flip).is_some() {
            kept += 1;
            if flip == 0 {
                // Diagonal strings are products of σ_z: the phase is real.
                let odd = (s & p.z_mask()).count_ones() % 2 == 1;
                trace += if odd { -1.0 } else { 1.0 };
            }
        }
    }
    let trace_sq = kept as f64;
    let beta_sq = (trace / dim).powi(2);
    let alpha_sq = trace_sq / dim - beta_sq;
    let expected_sq = if p.is_real() { 2.0 * alpha_sq / (dim + 2.0) + beta_sq } else { 0.0 };
    ProjectedStats { trace, trace_sq, alpha_sq, beta_sq, expected_sq }
}

/// Expected `P_n` from summing the projected statistics of all `4^n − 1`
/// non-identity strings on one block.
pub fn expected_purity_by_enumeration(l: usize, n: usize) -> Result<f64> {
    if n == 0 || n > l || n > 8 {
        return Err(Error::Config(format!("block size {n} unsupported for L = {l}")));
    }
    let basis = sz_basis(l, (l % 2) as i32)?;
    let sites: Vec<usize> = (0..n).collect();
    let total: f64 = PauliString::all_on(&sites)
        .iter()
        .skip(1)
        .map(|p| projected_operator_stats(p, &basis).expected_sq)
        .sum();
    Ok(total / ((1usize << n) - 1) as f64)
}

/// Haar-random real unit vector drawn from `rng`.
pub fn random_real_state(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let r = norm(&v);
    v.into_iter().map(|x| x / r).collect()
}

pub fn sample_random_real_state(n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Config("state dimension must be positive".into()));
    }
    Ok(random_real_state(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// `(G + Gᵀ)/2` with i.i.d. standard normal `G`.
pub fn sample_goe(n: usize, seed: u64) -> Result<Matrix> {
    if n < 2 {
        return Err(Error::Config(format!("GOE needs N >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Matrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    Ok(Matrix::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)])))
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let k = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / k;
        if xs.len() < 2 {
            return Self { mean, std_error: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        Self { mean, std_error: (var / k).sqrt() }
    }

    /// `|mean − target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.std_error
    }
}

/// Monte-Carlo `P_n` of Haar-random real `S_z = 0` states on an `L`-site
/// chain with contiguous blocks. Sample `k` uses seed `seed + k`.
pub fn monte_carlo_purities(
    l: usize,
    orders: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<(usize, Estimate)>> {
    if samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let lattice = LatticeSpec::chain(l)?;
    let basis = sz_basis(l, (l % 2) as i32)?;
    let partitions =
        orders.iter().map(|&n| default_partitions(&lattice, n)).collect::<Result<Vec<_>>>()?;
    let spec =
        EntanglementSpec { concurrence: false, partitions, fermionic: false, entropy_block: None };
    let plan = EntanglementPlan::new(&lattice, &basis, &spec)?;
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
            let psi = random_real_state(basis.dim(), &mut rng);
            plan.evaluate(0.0, &psi, &basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(orders
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let xs: Vec<f64> = rows.iter().map(|r| r.purities[i].1).collect();
            (n, Estimate::from_samples(&xs))
        })
        .collect())
}

/// Monte-Carlo NPC of Haar-random real vectors, with its GOE prediction.
pub fn monte_carlo_npc(n: usize, samples: usize, seed: u64) -> Result<(Estimate, f64)> {
    if samples == 0 || n == 0 {
        return Err(Error::Config("samples and dimension must be positive".into()));
    }
    let frame = BasisFrame::computational();
    let xs = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
            npc(&random_real_state(n, &mut rng), &frame)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((Estimate::from_samples(&xs), goe_npc(n)))
}

/// η of the pooled unfolded spacings of `count` GOE matrices of size `n`.
pub fn goe_pooled_lsi(n: usize, count: usize, seed: u64, cfg: &UnfoldingConfig) -> Result<f64> {
    let samples = (0..count as u64)
        .into_par_iter()
        .map(|k| unfold(&eigvalsh(&sample_goe(n, seed.wrapping_add(k))?)?, cfg))
        .collect::<Result<Vec<_>>>()?;
    lsi(&SpacingSample::pooled(&samples))
}
