//! Symmetric coupling weights on king's-graph edges.

use std::collections::BTreeMap;

use crate::error::{OimError, Result};
use crate::fxp::Weight8;
use crate::grid::GridTopology;

/// Coupling weights keyed on unordered king-adjacent node pairs. Absent pairs
/// have `J = 0`.
///
/// The hardware splits each pair's register between the two PEs; a single
/// symmetric map is the logical equivalent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingStore {
    grid: GridTopology,
    weights: BTreeMap<(usize, usize), Weight8>,
}

impl CouplingStore {
    pub fn new(grid: GridTopology) -> Self {
        Self {
            grid,
            weights: BTreeMap::new(),
        }
    }

    pub fn grid(&self) -> &GridTopology {
        &self.grid
    }

    /// Sets `J_ij = J_ji = w`. A zero weight removes the pair.
    pub fn set(&mut self, i: usize, j: usize, w: Weight8) -> Result<()> {
        self.grid.check_node(i)?;
        self.grid.check_node(j)?;
        if !self.grid.is_adjacent(i, j) {
            return Err(OimError::NotAdjacent { i, j });
        }
        let key = (i.min(j), i.max(j));
        if w.is_zero() {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Weight8 {
        self.weights
            .get(&(i.min(j), i.max(j)))
            .copied()
            .unwrap_or_default()
    }

    /// Nonzero pairs `(i, j, J)` with `i < j`, in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Weight8)> + '_ {
        self.weights.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}
