//! Open-boundary chain and rectangular-grid geometries.
//!
//! Sites are numbered `0..L`; on a grid, site `row * cols + col`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatticeSpec {
    Chain { sites: usize },
    Grid { rows: usize, cols: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReflectionLabel {
    ChainFlip,
    GridHorizontal,
    GridVertical,
}

/// Site permutation of a lattice reflection. Always an involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionMap {
    pub perm: Vec<usize>,
    pub label: ReflectionLabel,
}

impl ReflectionMap {
    pub fn apply_bond(&self, b: Bond) -> Bond {
        let (x, y) = (self.perm[b.i], self.perm[b.j]);
        Bond { i: x.min(y), j: x.max(y) }
    }
}

impl LatticeSpec {
    pub fn chain(sites: usize) -> Result<Self> {
        let spec = LatticeSpec::Chain { sites };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        let spec = LatticeSpec::Grid { rows, cols };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LatticeSpec::Chain { sites } if sites < 2 => {
                Err(Error::Config(format!("chain needs at least 2 sites, got {sites}")))
            }
            LatticeSpec::Grid { rows, cols } if rows < 2 || cols < 2 => Err(Error::Config(
                format!("grid needs rows >= 2 and cols >= 2, got {rows}x{cols}"),
            )),
            _ if self.num_sites() > 30 => {
                Err(Error::Config("lattices beyond 30 sites are not supported".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn num_sites(&self) -> usize {
        match *self {
            LatticeSpec::Chain { sites } => sites,
            LatticeSpec::Grid { rows, cols } => rows * cols,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, LatticeSpec::Grid { .. })
    }

    /// Nearest-neighbour bonds sorted by `(i, j)`.
    pub fn bonds(&self) -> Result<Vec<Bond>> {
        self.validate()?;
        let mut out = Vec::new();
        match *self {
            LatticeSpec::Chain { sites } => {
                out.extend((0..sites - 1).map(|i| Bond { i, j: i + 1 }));
            }
            LatticeSpec::Grid { rows, cols } => {
                for r in 0..rows {
                    for c in 0..cols {
                        let i = r * cols + c;
                        if c + 1 < cols {
                            out.push(Bond { i, j: i + 1 });
                        }
                        if r + 1 < rows {
                            out.push(Bond { i, j: i + cols });
                        }
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Reflection symmetries: one flip for a chain; horizontal then vertical
    /// for a grid.
    pub fn reflections(&self) -> Vec<ReflectionMap> {
        match *self {
            LatticeSpec::Chain { sites } => vec![ReflectionMap {
                perm: (0..sites).map(|i| sites - 1 - i).collect(),
                label: ReflectionLabel::ChainFlip,
            }],
            LatticeSpec::Grid { rows, cols } => {
                let horizontal = (0..rows * cols)
                    .map(|s| (s / cols) * cols + (cols - 1 - s % cols))
                    .collect();
                let vertical = (0..rows * cols)
                    .map(|s| (rows - 1 - s / cols) * cols + s % cols)
                    .collect();
                vec![
                    ReflectionMap { perm: horizontal, label: ReflectionLabel::GridHorizontal },
                    ReflectionMap { perm: vertical, label: ReflectionLabel::GridVertical },
                ]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn chain_bonds() {
        let b = LatticeSpec::chain(4).unwrap().bonds().unwrap();
        assert_eq!(b, vec![Bond { i: 0, j: 1 }, Bond { i: 1, j: 2 }, Bond { i: 2, j: 3 }]);
        assert_eq!(LatticeSpec::chain(2).unwrap().bonds().unwrap(), vec![Bond { i: 0, j: 1 }]);
    }

    #[test]
    fn grid_bond_count_matches_enumeration() {
        for rows in 2..=4 {
            for cols in 2..=4 {
                let bonds = LatticeSpec::grid(rows, cols).unwrap().bonds().unwrap();
                // Enumerate all site pairs at Manhattan distance one.
                let mut brute = BTreeSet::new();
                for a in 0..rows * cols {
                    for b in (a + 1)..rows * cols {
                        let (ra, ca, rb, cb) = (a / cols, a % cols, b / cols, b % cols);
                        if ra.abs_diff(rb) + ca.abs_diff(cb) == 1 {
                            brute.insert(Bond { i: a, j: b });
                        }
                    }
                }
                assert_eq!(bonds.len(), rows * (cols - 1) + cols * (rows - 1));
                assert_eq!(bonds.iter().copied().collect::<BTreeSet<_>>(), brute);
                assert!(bonds.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(LatticeSpec::grid(3, 4).unwrap().bonds().unwrap().len(), 17);
    }

    #[test]
    fn invalid_dimensions() {
        assert!(matches!(LatticeSpec::chain(1), Err(Error::Config(_))));
        assert!(matches!(LatticeSpec::grid(1, 4), Err(Error::Config(_))));
        assert!(LatticeSpec::Chain { sites: 0 }.bonds().is_err());
    }

    #[test]
    fn reflection_maps() {
        let r = LatticeSpec::chain(4).unwrap().reflections();
        assert_eq!(r[0].perm, vec![3, 2, 1, 0]);
        assert_eq!(LatticeSpec::chain(2).unwrap().reflections()[0].perm, vec![1, 0]);
        let g = LatticeSpec::grid(3, 4).unwrap().reflections();
        for s in 0..12 {
            let (row, col) = (s / 4, s % 4);
            assert_eq!(g[0].perm[s], row * 4 + (3 - col));
            assert_eq!(g[1].perm[s], (2 - row) * 4 + col);
        }
    }

    #[test]
    fn reflections_are_bond_preserving_involutions() {
        let specs = [
            LatticeSpec::chain(2).unwrap(),
            LatticeSpec::chain(7).unwrap(),
            LatticeSpec::grid(3, 4).unwrap(),
            LatticeSpec::grid(4, 4).unwrap(),
            LatticeSpec::grid(2, 5).unwrap(),
        ];
        for spec in specs {
            let bonds: BTreeSet<Bond> = spec.bonds().unwrap().into_iter().collect();
            for r in spec.reflections() {
                assert!((0..spec.num_sites()).all(|s| r.perm[r.perm[s]] == s));
                let mapped: BTreeSet<Bond> = bonds.iter().map(|&b| r.apply_bond(b)).collect();
                assert_eq!(mapped, bonds);
            }
        }
    }
}
