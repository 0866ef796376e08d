//! Fixed-magnetization bitstring bases and their (S, R) symmetry sectors.
//!
//! Bit convention: a 0 bit is spin up (σ_z = +1), a 1 bit is spin down.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ReflectionMap;
use crate::linalg::{eigh, Matrix};

/// All `L`-bit strings with a fixed number of up spins, in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    sz_twice: i32,
    states: Vec<u32>,
}

impl SectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `2 S_z`, always an integer.
    pub fn sz_twice(&self) -> i32 {
        self.sz_twice
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn state(&self, k: usize) -> u32 {
        self.states[k]
    }

    /// Position of a bitstring in the basis, if present.
    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Number of down spins (1 bits) shared by every state.
    pub fn down_spins(&self) -> usize {
        (self.sites as i32 - self.sz_twice) as usize / 2
    }
}

/// Basis of the `S_z = sz_twice / 2` subspace of `sites` spins.
pub fn sz_basis(sites: usize, sz_twice: i32) -> Result<SectorBasis> {
    if sites == 0 || sites > 30 {
        return Err(Error::Config(format!("unsupported site count {sites}")));
    }
    if sz_twice.unsigned_abs() as usize > sites || (sites as i32 - sz_twice) % 2 != 0 {
        return Err(Error::Config(format!(
            "2*Sz = {sz_twice} is incompatible with {sites} sites"
        )));
    }
    let ones = (sites as i32 - sz_twice) as usize / 2;
    let mut states = Vec::with_capacity(binomial(sites, ones));
    if ones == 0 {
        states.push(0);
    } else {
        // Gosper's hack walks fixed-popcount words in increasing order.
        let limit = 1u64 << sites;
        let mut v: u64 = (1u64 << ones) - 1;
        while v < limit {
            states.push(v as u32);
            let t = v | (v - 1);
            v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        }
    }
    Ok(SectorBasis { sites, sz_twice, states })
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Matrix of `S² = (Σ_i σ⃗_i / 2)²` in the bitstring basis.
pub fn total_spin_matrix(basis: &SectorBasis) -> Matrix {
    let l = basis.sites;
    let n = basis.dim();
    let mut m = Matrix::zeros(n, n);
    for (k, &s) in basis.states.iter().enumerate() {
        // S² = 3L/4 + 2 Σ_{i<j} s_i·s_j, with s_i·s_j = z_i z_j / 4 + flip-flop / 2.
        let mut diag = 0.75 * l as f64;
        for i in 0..l {
            for j in (i + 1)..l {
                let anti = ((s >> i) ^ (s >> j)) & 1 == 1;
                if anti {
                    diag -= 0.5;
                    let t = s ^ (1 << i) ^ (1 << j);
                    let kt = basis.index_of(t).expect("flip-flop stays in the Sz sector");
                    m[(kt, k)] += 1.0;
                } else {
                    diag += 0.5;
                }
            }
        }
        m[(k, k)] = diag;
    }
    m
}

/// Applies a site permutation to a bitstring: bit `i` moves to `perm[i]`.
pub fn permute_bits(state: u32, perm: &[usize]) -> u32 {
    perm.iter()
        .enumerate()
        .filter(|&(i, _)| (state >> i) & 1 == 1)
        .fold(0, |acc, (_, &p)| acc | (1 << p))
}

/// `target[k]` is the basis position of the reflected image of state `k`.
pub fn parity_permutation(basis: &SectorBasis, refl: &ReflectionMap) -> Result<Vec<usize>> {
    if refl.perm.len() != basis.sites {
        return Err(Error::Config("reflection does not match the basis size".into()));
    }
    Ok(basis
        .states
        .iter()
        .map(|&s| {
            basis
                .index_of(permute_bits(s, &refl.perm))
                .expect("reflections conserve magnetization")
        })
        .collect())
}

/// Permutation matrix of a lattice reflection in the bitstring basis.
pub fn parity_matrix(basis: &SectorBasis, refl: &ReflectionMap) -> Result<Matrix> {
    let target = parity_permutation(basis, refl)?;
    let mut p = Matrix::zeros(basis.dim(), basis.dim());
    for (k, &t) in target.iter().enumerate() {
        p[(t, k)] = 1.0;
    }
    Ok(p)
}

/// Which lattice reflections a sector decomposition resolves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMode {
    None,
    /// The chain flip, or the horizontal flip of a grid.
    #[default]
    Primary,
    /// Every reflection of the lattice (both flips of a grid).
    All,
}

impl ParityMode {
    pub fn select<'a>(&self, reflections: &'a [ReflectionMap]) -> &'a [ReflectionMap] {
        match self {
            ParityMode::None => &[],
            ParityMode::Primary => &reflections[..reflections.len().min(1)],
            ParityMode::All => reflections,
        }
    }
}

/// Joint eigenspace of `S_z`, optionally `S²`, and the chosen reflections.
#[derive(Clone, Debug)]
pub struct SymmetrySector {
    pub sz_twice: i32,
    /// `2S`, when total spin was resolved.
    pub spin_twice: Option<u32>,
    /// One ±1 eigenvalue per resolved reflection, in reflection order.
    pub parities: Vec<i8>,
    /// Orthonormal columns in coordinates of the parent basis.
    pub basis_vectors: Matrix,
}

impl SymmetrySector {
    pub fn dim(&self) -> usize {
        self.basis_vectors.cols()
    }

    pub fn spin(&self) -> Option<f64> {
        self.spin_twice.map(|s| s as f64 / 2.0)
    }

    pub fn label(&self) -> String {
        let mut s = format!("sz={}", self.sz_twice as f64 / 2.0);
        if let Some(spin) = self.spin() {
            s.push_str(&format!(",S={spin}"));
        }
        for p in &self.parities {
            s.push_str(if *p > 0 { ",R=+1" } else { ",R=-1" });
        }
        s
    }
}

/// Splits a fixed-`S_z` basis into symmetry sectors.
///
/// Total spin is resolved by diagonalizing `S²` and rounding each eigenvalue
/// to the nearest `S(S+1)`; each reflection is then diagonalized inside every
/// block found so far. Sectors are ordered by ascending `S`, then `R = +1`
/// before `R = −1` for each reflection in turn.
pub fn decompose_sectors(
    basis: &SectorBasis,
    use_spin: bool,
    reflections: &[ReflectionMap],
) -> Result<Vec<SymmetrySector>> {
    let n = basis.dim();
    let mut blocks: Vec<(Option<u32>, Vec<i8>, Matrix)> = Vec::new();
    if use_spin {
        let spectrum = eigh(&total_spin_matrix(basis))?;
        let mut labels = Vec::with_capacity(n);
        for &lambda in &spectrum.values {
            let spin = (-1.0 + (1.0 + 4.0 * lambda.max(0.0)).sqrt()) / 2.0;
            let twice = (2.0 * spin).round() as u32;
            let s = twice as f64 / 2.0;
            if (lambda - s * (s + 1.0)).abs() > 0.25 || (twice as usize + basis.sites) % 2 != 0 {
                return Err(Error::Numerical(format!(
                    "S^2 eigenvalue {lambda} is not close to any S(S+1)"
                )));
            }
            labels.push(twice);
        }
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for twice in distinct {
            let idx: Vec<usize> = (0..n).filter(|&k| labels[k] == twice).collect();
            blocks.push((Some(twice), Vec::new(), spectrum.vectors.select_columns(&idx)));
        }
    } else {
        blocks.push((None, Vec::new(), Matrix::identity(n)));
    }

    for refl in reflections {
        let target = parity_permutation(basis, refl)?;
        let mut refined = Vec::with_capacity(2 * blocks.len());
        for (spin, parities, b) in blocks {
            let mut pb = Matrix::zeros(b.rows(), b.cols());
            for (k, &t) in target.iter().enumerate() {
                pb.row_mut(t).copy_from_slice(b.row(k));
            }
            let mut restricted = b.t_matmul(&pb);
            restricted.symmetrize();
            let spec = eigh(&restricted)?;
            let mut plus = Vec::new();
            let mut minus = Vec::new();
            for (k, &v) in spec.values.iter().enumerate() {
                if (v - 1.0).abs() < 0.25 {
                    plus.push(k);
                } else if (v + 1.0).abs() < 0.25 {
                    minus.push(k);
                } else {
                    return Err(Error::Numerical(format!("parity eigenvalue {v} is not +-1")));
                }
            }
            for (sign, idx) in [(1i8, plus), (-1i8, minus)] {
                if idx.is_empty() {
                    continue;
                }
                let mut p = parities.clone();
                p.push(sign);
                refined.push((spin, p, b.matmul(&spec.vectors.select_columns(&idx))));
            }
        }
        blocks = refined;
    }

    Ok(blocks
        .into_iter()
        .map(|(spin_twice, parities, basis_vectors)| SymmetrySector {
            sz_twice: basis.sz_twice,
            spin_twice,
            parities,
            basis_vectors,
        })
        .collect())
}

/// The sector with the requested quantum numbers. `spin_twice = None` keeps
/// all spins; an empty `parities` keeps all parities.
pub fn find_sector<'a>(
    sectors: &'a [SymmetrySector],
    spin_twice: Option<u32>,
    parities: &[i8],
) -> Option<&'a SymmetrySector> {
    sectors.iter().find(|s| {
        (spin_twice.is_none() || s.spin_twice == spin_twice)
            && parities.iter().zip(&s.parities).all(|(a, b)| a == b)
            && s.parities.len() >= parities.len()
    })
}
