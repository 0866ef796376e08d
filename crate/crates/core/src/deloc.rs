//! Number of principal components (NPC) of states in a chosen reference
//! frame: the computational basis, the eigenbasis of the clean exchange
//! Hamiltonian, or the eigenbasis of a neighbouring disorder realization.

use std::borrow::Cow;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::hamiltonian::exchange_hamiltonian;
use crate::lattice::LatticeSpec;
use crate::linalg::{eigh, Matrix};
use crate::symmetry::{decompose_sectors, ParityMode, SectorBasis};

/// Tolerance of the normalization guard on frame coefficients.
const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameLabel {
    CBasis,
    JBasis,
    Relative,
}

/// Orthonormal reference frame. `transform` holds the frame vectors as
/// columns in bitstring coordinates; `None` is the computational basis.
#[derive(Clone, Debug)]
pub struct BasisFrame {
    pub label: FrameLabel,
    pub transform: Option<Matrix>,
}

impl BasisFrame {
    pub fn computational() -> Self {
        Self { label: FrameLabel::CBasis, transform: None }
    }

    /// Frame spanned by another realization's eigenvectors.
    pub fn relative(vectors: Matrix) -> Self {
        Self { label: FrameLabel::Relative, transform: Some(vectors) }
    }

    /// Coefficients `⟨n|ψ⟩` of each column of `states` in this frame.
    pub fn coefficients<'a>(&self, states: &'a Matrix) -> Result<Cow<'a, Matrix>> {
        match &self.transform {
            None => Ok(Cow::Borrowed(states)),
            Some(t) => {
                if t.rows() != states.rows() {
                    return Err(Error::Contract(format!(
                        "frame acts on dimension {}, states have {}",
                        t.rows(),
                        states.rows()
                    )));
                }
                Ok(Cow::Owned(t.t_matmul(states)))
            }
        }
    }
}

/// NPC `1 / Σ_n |⟨n|ψ⟩|⁴` of every column of `states`.
pub fn npc_columns(states: &Matrix, frame: &BasisFrame) -> Result<Vec<f64>> {
    let coeffs = frame.coefficients(states)?;
    let norms = coeffs.column_norms_sq();
    if let Some((k, n)) = norms.iter().enumerate().find(|(_, n)| (*n - 1.0).abs() > NORM_TOL) {
        return Err(Error::Contract(format!(
            "state {k} has squared norm {n} in the {:?} frame",
            frame.label
        )));
    }
    Ok(coeffs.column_fourth_moments().into_iter().map(|m| 1.0 / m).collect())
}

pub fn npc(state: &[f64], frame: &BasisFrame) -> Result<f64> {
    let col = Matrix::from_vec(state.len(), 1, state.to_vec());
    Ok(npc_columns(&col, frame)?[0])
}

/// Expected NPC of a Gaussian random real vector of dimension `n`.
pub fn goe_npc(n: usize) -> f64 {
    (n as f64 + 2.0) / 3.0
}

/// Eigenbasis of the clean exchange Hamiltonian with coupling `j_mean`.
///
/// Degenerate levels are pinned by diagonalizing inside joint `(S, R)`
/// sectors first, then applying the eigensolver's sign convention.
pub fn j_basis_frame(
    lattice: &LatticeSpec,
    basis: &SectorBasis,
    j_mean: f64,
    parity: ParityMode,
) -> Result<BasisFrame> {
    if j_mean == 0.0 {
        return Err(Error::Contract("J-basis needs a non-zero coupling".into()));
    }
    let h = exchange_hamiltonian(lattice, basis, j_mean)?;
    let reflections = lattice.reflections();
    let sectors = decompose_sectors(basis, true, parity.select(&reflections))?;
    let mut blocks = Vec::with_capacity(sectors.len());
    for sec in &sectors {
        let spec = eigh(&h.project(&sec.basis_vectors))?;
        blocks.push(sec.basis_vectors.matmul(&spec.vectors));
    }
    Ok(BasisFrame { label: FrameLabel::JBasis, transform: Some(Matrix::hstack(&blocks)) })
}

/// Mean NPC of realization `k`'s eigenvectors in realization `k−1`'s
/// eigenbasis, for each consecutive pair.
pub fn relative_npc(vectors: &[Matrix]) -> Result<Vec<f64>> {
    if vectors.len() < 2 {
        return Err(Error::Contract("relative NPC needs at least two realizations".into()));
    }
    vectors
        .windows(2)
        .map(|pair| {
            if pair[0].rows() != pair[1].rows() || pair[0].cols() != pair[1].cols() {
                return Err(Error::Contract("realizations differ in sector dimension".into()));
            }
            let xi = npc_columns(&pair[1], &BasisFrame::relative(pair[0].clone()))?;
            Ok(xi.iter().sum::<f64>() / xi.len() as f64)
        })
        .collect()
}

/// Ranks of the `count` states in the middle of an `n`-level spectrum.
pub fn central_window(n: usize, count: usize) -> Range<usize> {
    if count >= n {
        return 0..n;
    }
    let start = (n - count) / 2;
    start..start + count
}

#[derive(Clone, Debug)]
pub struct NpcProfile {
    /// `(energy, ξ)` per eigenstate, in spectrum order.
    pub points: Vec<(f64, f64)>,
    pub mean: f64,
    pub central_mean: f64,
}

pub fn npc_energy_profile(
    values: &[f64],
    vectors: &Matrix,
    frame: &BasisFrame,
    central: usize,
) -> Result<NpcProfile> {
    let xi = npc_columns(vectors, frame)?;
    if xi.len() != values.len() {
        return Err(Error::Contract("eigenvalue and eigenvector counts differ".into()));
    }
    let mean = xi.iter().sum::<f64>() / xi.len() as f64;
    let window = central_window(xi.len(), central);
    let central_mean = xi[window.clone()].iter().sum::<f64>() / window.len() as f64;
    Ok(NpcProfile { points: values.iter().copied().zip(xi).collect(), mean, central_mean })
}
