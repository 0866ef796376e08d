//! Pauli strings acting on bitstring basis states.

use crate::symmetry::SectorBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Tensor product of single-site Paulis, stored as bit masks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    x_mask: u32,
    y_mask: u32,
    z_mask: u32,
}

impl PauliString {
    pub fn identity() -> Self {
        Self { x_mask: 0, y_mask: 0, z_mask: 0 }
    }

    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        let mut p = Self::identity();
        for &(site, op) in ops {
            p = p.with(site, op);
        }
        p
    }

    /// Replaces the operator on `site`.
    pub fn with(mut self, site: usize, op: Pauli) -> Self {
        let bit = 1u32 << site;
        self.x_mask &= !bit;
        self.y_mask &= !bit;
        self.z_mask &= !bit;
        match op {
            Pauli::I => {}
            Pauli::X => self.x_mask |= bit,
            Pauli::Y => self.y_mask |= bit,
            Pauli::Z => self.z_mask |= bit,
        }
        self
    }

    /// All `4^n` strings supported on `sites`, identity first.
    pub fn all_on(sites: &[usize]) -> Vec<PauliString> {
        let mut out = vec![PauliString::identity()];
        for &s in sites {
            out = out
                .into_iter()
                .flat_map(|p| Pauli::ALL.into_iter().map(move |op| p.with(s, op)))
                .collect();
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask | self.y_mask | self.z_mask == 0
    }

    /// Sites whose bit the string flips.
    pub fn flip_mask(&self) -> u32 {
        self.x_mask | self.y_mask
    }

    pub fn z_mask(&self) -> u32 {
        self.z_mask
    }

    pub fn count_x(&self) -> u32 {
        self.x_mask.count_ones()
    }

    pub fn count_y(&self) -> u32 {
        self.y_mask.count_ones()
    }

    pub fn count_z(&self) -> u32 {
        self.z_mask.count_ones()
    }

    /// Matrix elements are real exactly when the number of `σ_y` is even.
    pub fn is_real(&self) -> bool {
        self.count_y() % 2 == 0
    }

    /// `P|s⟩ = phase · |target⟩` for a real string; `None` if `P` is imaginary.
    ///
    /// Bit 0 is spin up, so `σ_z|1⟩ = −|1⟩` and `σ_y|b⟩ = i(−1)^b |1−b⟩`.
    pub fn apply_real(&self, state: u32) -> Option<(u32, f64)> {
        if !self.is_real() {
            return None;
        }
        let mut sign = if (self.count_y() / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if (state & (self.y_mask | self.z_mask)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        Some((state ^ self.flip_mask(), sign))
    }

    /// `⟨ψ|P|ψ⟩` for a real sector state; zero for imaginary strings and for
    /// strings leaving the sector.
    pub fn expectation(&self, state: &[f64], basis: &SectorBasis) -> f64 {
        if !self.is_real() || self.flip_mask().count_ones() % 2 == 1 {
            return 0.0;
        }
        let mut acc = 0.0;
        for (k, &s) in basis.states().iter().enumerate() {
            let (t, phase) = self.apply_real(s).expect("real string");
            if let Some(kt) = basis.index_of(t) {
                acc += state[kt] * phase * state[k];
            }
        }
        acc
    }
}
