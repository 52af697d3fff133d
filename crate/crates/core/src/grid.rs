//! King's-graph grid topology.

use serde::{Deserialize, Serialize};

use crate::error::{OimError, Result};

/// King-move offsets `(d_row, d_col)`.
const KING_MOVES: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// A `width x height` array of PEs. Node index is `row * width + col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridTopology {
    width: usize,
    height: usize,
}

impl GridTopology {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(OimError::EmptyGrid { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn nodes(&self) -> usize {
        self.width * self.height
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.height && col < self.width);
        row * self.width + col
    }

    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node / self.width, node % self.width)
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.nodes() {
            Ok(())
        } else {
            Err(OimError::NodeOutOfRange {
                node,
                nodes: self.nodes(),
            })
        }
    }

    /// King-move neighbors of `node` in ascending index order. Interior nodes
    /// have 8, edge nodes 5, corners 3 (fewer on degenerate 1-wide grids).
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        let (row, col) = self.coords(node);
        KING_MOVES.iter().filter_map(move |&(dr, dc)| {
            let r = row.checked_add_signed(dr)?;
            let c = col.checked_add_signed(dc)?;
            (r < self.height && c < self.width).then(|| self.index(r, c))
        })
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors(node).count()
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        if i == j || i >= self.nodes() || j >= self.nodes() {
            return false;
        }
        let (ri, ci) = self.coords(i);
        let (rj, cj) = self.coords(j);
        ri.abs_diff(rj) <= 1 && ci.abs_diff(cj) <= 1
    }

    /// Every king's-graph edge `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for i in 0..self.nodes() {
            out.extend(self.neighbors(i).filter(|&j| j > i).map(|j| (i, j)));
        }
        out
    }

    /// Closed form for the full king's graph.
    pub fn edge_count(&self) -> usize {
        let (w, h) = (self.width, self.height);
        4 * w * h + 2 - 3 * w - 3 * h
    }
}
