//! Entanglement measures of real sector states: reduced density matrices,
//! concurrence, n-local purities, block entropies and the fermionic u(L)
//! purity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{eigh, eigvalsh, Matrix};
use crate::symmetry::SectorBasis;

/// Largest subsystem handled by [`reduced_density`].
pub const MAX_SUBSYSTEM: usize = 8;

const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-8;
const ENTROPY_CUTOFF: f64 = 1e-12;

/// Reduced state of `sites`. In the local index, `sites[0]` is the most
/// significant bit and bit value 1 is spin down.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensity {
    pub sites: Vec<usize>,
    pub rho: Matrix,
}

impl ReducedDensity {
    pub fn num_qubits(&self) -> usize {
        self.sites.len()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.as_slice().iter().map(|x| x * x).sum()
    }
}

/// Precomputed partial-trace plan for one subset of sites.
///
/// Sector states are grouped by their complement bits; `ρ` is the sum over
/// groups of the outer product of the in-group amplitudes.
#[derive(Clone, Debug)]
pub struct Reducer {
    sites: Vec<usize>,
    /// `(local index, sector index)`, grouped by complement configuration.
    entries: Vec<(u16, u32)>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Reducer {
    pub fn new(basis: &SectorBasis, sites: &[usize]) -> Result<Self> {
        let n = sites.len();
        if n == 0 || n > MAX_SUBSYSTEM {
            return Err(Error::Config(format!(
                "subsystem size must be in 1..={MAX_SUBSYSTEM}, got {n}"
            )));
        }
        let mut mask = 0u32;
        for &s in sites {
            if s >= basis.sites() || mask & (1 << s) != 0 {
                return Err(Error::Config(format!("invalid subsystem {sites:?}")));
            }
            mask |= 1 << s;
        }
        let mut keyed: Vec<(u32, u16, u32)> = basis
            .states()
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let local = sites
                    .iter()
                    .fold(0u16, |acc, &site| (acc << 1) | ((s >> site) & 1) as u16);
                (s & !mask, local, k as u32)
            })
            .collect();
        keyed.sort_unstable();
        let mut offsets = vec![0];
        for w in 1..keyed.len() {
            if keyed[w].0 != keyed[w - 1].0 {
                offsets.push(w);
            }
        }
        offsets.push(keyed.len());
        Ok(Self {
            sites: sites.to_vec(),
            entries: keyed.into_iter().map(|(_, l, k)| (l, k)).collect(),
            offsets,
            dim: basis.dim(),
        })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn reduce(&self, state: &[f64]) -> Result<ReducedDensity> {
        if state.len() != self.dim {
            return Err(Error::Contract(format!(
                "state has length {}, sector dimension is {}",
                state.len(),
                self.dim
            )));
        }
        let d = 1usize << self.sites.len();
        let mut rho = Matrix::zeros(d, d);
        for g in self.offsets.windows(2) {
            let group = &self.entries[g[0]..g[1]];
            for &(la, ka) in group {
                let a = state[ka as usize];
                if a == 0.0 {
                    continue;
                }
                let row = rho.row_mut(la as usize);
                for &(lb, kb) in group {
                    row[lb as usize] += a * state[kb as usize];
                }
            }
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Contract(format!("state is not normalized: Tr ρ = {tr}")));
        }
        Ok(ReducedDensity { sites: self.sites.clone(), rho })
    }
}

pub fn reduced_density(
    state: &[f64],
    basis: &SectorBasis,
    sites: &[usize],
) -> Result<ReducedDensity> {
    Reducer::new(basis, sites)?.reduce(state)
}

/// `σ_y ⊗ σ_y`, real in the two-qubit computational basis.
fn yy() -> Matrix {
    Matrix::from_vec(
        4,
        4,
        vec![
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// Wootters concurrence of a two-qubit state.
///
/// For real `ρ`, `√ρ ρ̃ √ρ = S²` with `S = √ρ (σ_y⊗σ_y) √ρ` symmetric, so the
/// `λ_k` are the absolute eigenvalues of `S`.
pub fn concurrence(rho: &ReducedDensity) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Contract(format!(
            "concurrence needs two qubits, got {}",
            rho.num_qubits()
        )));
    }
    let spec = eigh(&rho.rho)?;
    if let Some(&min) = spec.values.first() {
        if min < -PSD_TOL {
            return Err(Error::Contract(format!("ρ is not positive semidefinite: {min:e}")));
        }
    }
    let roots: Vec<f64> = spec.values.iter().map(|&p| p.max(0.0).sqrt()).collect();
    let v = &spec.vectors;
    let sqrt_rho =
        Matrix::from_fn(4, 4, |i, j| (0..4).map(|k| v[(i, k)] * roots[k] * v[(j, k)]).sum());
    let mut s = sqrt_rho.matmul(&yy()).matmul(&sqrt_rho);
    s.symmetrize();
    let mut lambdas: Vec<f64> = eigvalsh(&s)?.into_iter().map(f64::abs).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// `|⟨ψ|σ_y⊗σ_y|ψ*⟩|` for a real two-qubit pure state.
pub fn pure_concurrence(psi: &[f64; 4]) -> f64 {
    (2.0 * (psi[1] * psi[2] - psi[0] * psi[3])).abs()
}

/// Disjoint equal-size blocks covering every site.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionScheme {
    pub blocks: Vec<Vec<usize>>,
}

impl PartitionScheme {
    pub fn new(blocks: Vec<Vec<usize>>, sites: usize) -> Result<Self> {
        let p = Self { blocks };
        p.validate(sites)?;
        Ok(p)
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        let n = self.block_size();
        if n == 0 || self.blocks.iter().any(|b| b.len() != n) {
            return Err(Error::Config("partition blocks must be non-empty and equal size".into()));
        }
        let mut seen = vec![false; sites];
        for &s in self.blocks.iter().flatten() {
            if s >= sites || std::mem::replace(&mut seen[s], true) {
                return Err(Error::Config(format!("partition is not a cover of {sites} sites")));
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::Config(format!("partition does not cover all {sites} sites")));
        }
        Ok(())
    }

    pub fn block_size(&self) -> usize {
        self.blocks.first().map_or(0, Vec::len)
    }
}

/// Default n-site blocks: contiguous for a chain; on a grid, rows when `n`
/// equals the row length, columns when it equals the column length, left and
/// right halves for `n = L/2` with an even number of columns, and contiguous
/// row-major runs otherwise.
pub fn default_partitions(lattice: &LatticeSpec, n: usize) -> Result<PartitionScheme> {
    let l = lattice.num_sites();
    if n == 0 || l % n != 0 {
        return Err(Error::Config(format!("{l} sites cannot be split into blocks of {n}")));
    }
    let contiguous = || (0..l / n).map(|b| (b * n..(b + 1) * n).collect()).collect();
    let blocks = match *lattice {
        LatticeSpec::Chain { .. } => contiguous(),
        LatticeSpec::Grid { rows, cols } => {
            if n == cols {
                contiguous()
            } else if n == rows {
                (0..cols).map(|c| (0..rows).map(|r| r * cols + c).collect()).collect()
            } else if 2 * n == l && cols % 2 == 0 {
                let half = cols / 2;
                (0..2)
                    .map(|h| {
                        (0..rows)
                            .flat_map(|r| (h * half..(h + 1) * half).map(move |c| r * cols + c))
                            .collect()
                    })
                    .collect()
            } else {
                contiguous()
            }
        }
    };
    PartitionScheme::new(blocks, l)
}

fn normalized_purity(purity: f64, n: usize) -> f64 {
    let d = (1usize << n) as f64;
    (d * purity - 1.0) / (d - 1.0)
}

pub fn n_local_purity(
    state: &[f64],
    basis: &SectorBasis,
    partition: &PartitionScheme,
) -> Result<f64> {
    partition.validate(basis.sites())?;
    let mut acc = 0.0;
    for block in &partition.blocks {
        acc += normalized_purity(reduced_density(state, basis, block)?.purity(), block.len());
    }
    Ok(acc / partition.blocks.len() as f64)
}

pub fn meyer_wallach(state: &[f64], basis: &SectorBasis) -> Result<f64> {
    let singles = PartitionScheme { blocks: (0..basis.sites()).map(|s| vec![s]).collect() };
    Ok(1.0 - n_local_purity(state, basis, &singles)?)
}

/// Linear entropy `1 − Tr ρ²` and von Neumann entropy in bits.
pub fn block_entropies(rho: &ReducedDensity) -> Result<(f64, f64)> {
    let vn = eigvalsh(&rho.rho)?
        .into_iter()
        .filter(|&p| p > ENTROPY_CUTOFF)
        .map(|p| -p * p.log2())
        .sum();
    Ok((1.0 - rho.purity(), vn))
}

pub fn mean_nn_concurrence(
    state: &[f64],
    basis: &SectorBasis,
    lattice: &LatticeSpec,
) -> Result<f64> {
    let bonds = lattice.bonds()?;
    let mut acc = 0.0;
    for b in &bonds {
        acc += concurrence(&reduced_density(state, basis, &[b.i, b.j])?)?;
    }
    Ok(acc / bonds.len() as f64)
}

/// Hopping transitions `c†_i c_j |s⟩ = sign |t⟩` within a sector under the
/// Jordan–Wigner map with occupation = bit 1 and strings on lower sites.
#[derive(Clone, Debug)]
pub struct FermionPlan {
    sites: usize,
    /// `(i, j, from, to, sign)` for every `i ≠ j`.
    hops: Vec<(u8, u8, u32, u32, f64)>,
    dim: usize,
}

impl FermionPlan {
    pub fn new(basis: &SectorBasis) -> Self {
        let l = basis.sites();
        let mut hops = Vec::new();
        for (k, &s) in basis.states().iter().enumerate() {
            for j in (0..l).filter(|&j| (s >> j) & 1 == 1) {
                for i in (0..l).filter(|&i| (s >> i) & 1 == 0) {
                    let (lo, hi) = (i.min(j), i.max(j));
                    let between = (s >> (lo + 1)) & ((1u32 << (hi - lo - 1)) - 1);
                    let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    let t = s ^ (1 << i) ^ (1 << j);
                    let kt = basis.index_of(t).expect("hopping conserves particle number");
                    hops.push((i as u8, j as u8, k as u32, kt as u32, sign));
                }
            }
        }
        Self { sites: l, hops, dim: basis.dim() }
    }

    /// One-body correlation matrix `M_ij = ⟨c†_i c_j⟩` of a real state.
    pub fn correlation_matrix(&self, state: &[f64], basis: &SectorBasis) -> Matrix {
        let l = self.sites;
        let mut m = Matrix::zeros(l, l);
        for (k, &s) in basis.states().iter().enumerate() {
            let p = state[k] * state[k];
            for i in (0..l).filter(|&i| (s >> i) & 1 == 1) {
                m[(i, i)] += p;
            }
        }
        for &(i, j, from, to, sign) in &self.hops {
            m[(i as usize, j as usize)] += sign * state[to as usize] * state[from as usize];
        }
        m
    }

    /// u(L) purity from the symmetric and antisymmetric hopping expectations
    /// and the occupation fluctuations.
    pub fn purity(&self, state: &[f64], basis: &SectorBasis) -> Result<f64> {
        if state.len() != self.dim {
            return Err(Error::Contract("state length does not match the sector".into()));
        }
        let l = self.sites;
        let m = self.correlation_matrix(state, basis);
        let mut hopping = 0.0;
        for i in 0..l {
            for j in i + 1..l {
                let sym = m[(i, j)] + m[(j, i)];
                let anti = m[(i, j)] - m[(j, i)];
                hopping += sym * sym - anti * anti;
            }
        }
        let occupation: f64 = (0..l).map(|i| (m[(i, i)] - 0.5).powi(2)).sum();
        Ok(2.0 / l as f64 * hopping + 4.0 / l as f64 * occupation)
    }
}

pub fn fermionic_purity(state: &[f64], basis: &SectorBasis) -> Result<f64> {
    FermionPlan::new(basis).purity(state, basis)
}

/// P₁ implied by a computational-basis NPC `ξ_c` in an `n`-dimensional sector.
pub fn predicted_p1(xi_c: f64, n: usize) -> f64 {
    let n = n as f64;
    n / (n - 1.0) / xi_c - 1.0 / (n - 1.0)
}

/// Which measures an [`EntanglementPlan`] evaluates.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementSpec {
    pub concurrence: bool,
    pub partitions: Vec<PartitionScheme>,
    pub fermionic: bool,
    /// Block whose linear and von Neumann entropies are reported.
    pub entropy_block: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementRow {
    pub energy: f64,
    pub concurrence: Option<f64>,
    /// `(n, P_n)` in the order of the configured partitions.
    pub purities: Vec<(usize, f64)>,
    pub fermionic: Option<f64>,
    pub linear_entropy: Option<f64>,
    pub von_neumann: Option<f64>,
}

impl EntanglementRow {
    pub fn purity(&self, n: usize) -> Option<f64> {
        self.purities.iter().find(|(m, _)| *m == n).map(|&(_, p)| p)
    }

    pub fn meyer_wallach(&self) -> Option<f64> {
        self.purity(1).map(|p| 1.0 - p)
    }
}

/// Reusable reducers for evaluating many states of one sector.
#[derive(Clone, Debug)]
pub struct EntanglementPlan {
    bonds: Vec<Reducer>,
    partitions: Vec<(usize, Vec<Reducer>)>,
    fermions: Option<FermionPlan>,
    entropy: Option<Reducer>,
}

impl EntanglementPlan {
    pub fn new(lattice: &LatticeSpec, basis: &SectorBasis, spec: &EntanglementSpec) -> Result<Self> {
        if lattice.num_sites() != basis.sites() {
            return Err(Error::Config("lattice and sector differ in site count".into()));
        }
        let bonds = if spec.concurrence {
            lattice.bonds()?.iter().map(|b| Reducer::new(basis, &[b.i, b.j])).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let mut partitions = Vec::with_capacity(spec.partitions.len());
        for p in &spec.partitions {
            p.validate(basis.sites())?;
            let reducers = p.blocks.iter().map(|b| Reducer::new(basis, b)).collect::<Result<_>>()?;
            partitions.push((p.block_size(), reducers));
        }
        Ok(Self {
            bonds,
            partitions,
            fermions: spec.fermionic.then(|| FermionPlan::new(basis)),
            entropy: spec.entropy_block.as_deref().map(|b| Reducer::new(basis, b)).transpose()?,
        })
    }

    pub fn evaluate(&self, energy: f64, state: &[f64], basis: &SectorBasis) -> Result<EntanglementRow> {
        let concurrence = if self.bonds.is_empty() {
            None
        } else {
            let mut acc = 0.0;
            for r in &self.bonds {
                acc += concurrence(&r.reduce(state)?)?;
            }
            Some(acc / self.bonds.len() as f64)
        };
        let mut purities = Vec::with_capacity(self.partitions.len());
        for (n, reducers) in &self.partitions {
            let mut acc = 0.0;
            for r in reducers {
                acc += normalized_purity(r.reduce(state)?.purity(), *n);
            }
            purities.push((*n, acc / reducers.len() as f64));
        }
        let fermionic = self.fermions.as_ref().map(|f| f.purity(state, basis)).transpose()?;
        let (linear_entropy, von_neumann) = match &self.entropy {
            Some(r) => {
                let (lin, vn) = block_entropies(&r.reduce(state)?)?;
                (Some(lin), Some(vn))
            }
            None => (None, None),
        };
        Ok(EntanglementRow { energy, concurrence, purities, fermionic, linear_entropy, von_neumann })
    }
}
