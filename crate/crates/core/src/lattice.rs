//! Periodic rectangular qubit lattice. Sites are 1-based with index
//! `i = x + L_x (y - 1)`, `x in [1, L_x]`, `y in [1, L_y]`; edges connect
//! nearest neighbors with periodic boundary conditions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLattice {
    l_x: usize,
    l_y: usize,
    edges: Vec<(usize, usize)>,
}

/// Deduplicated periodic nearest-neighbor edge set in deterministic
/// (sorted-pair) order. A wrap edge that duplicates an interior edge (side of
/// length 2) is merged into a single edge; a side of length 1 contributes no
/// edge in that direction.
pub fn build_lattice(l_x: usize, l_y: usize) -> QubitLattice {
    let site = |x: usize, y: usize| x + l_x * (y - 1);
    let mut set = BTreeSet::new();
    for y in 1..=l_y {
        for x in 1..=l_x {
            let i = site(x, y);
            let right = site(x % l_x + 1, y);
            let up = site(x, y % l_y + 1);
            for j in [right, up] {
                if i != j {
                    set.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    QubitLattice {
        l_x,
        l_y,
        edges: set.into_iter().collect(),
    }
}

impl QubitLattice {
    pub fn l_x(&self) -> usize {
        self.l_x
    }

    pub fn l_y(&self) -> usize {
        self.l_y
    }

    pub fn n_tot(&self) -> usize {
        self.l_x * self.l_y
    }

    /// Unordered edges as sorted 1-based site pairs, in deterministic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Edges incident to `site`, in edge order.
    pub fn edges_at(&self, site: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(i, j))| i == site || j == site)
            .map(|(e, _)| e)
            .collect()
    }
}
