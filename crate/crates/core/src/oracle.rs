//! Exact solvers for small instances.
//!
//! Both searches fix node 0 (its spin by complement symmetry, its color by
//! label symmetry) and walk assignments in lexicographic order, keeping the
//! first optimum they meet. Spins order `+1` before `-1`.

use serde::Serialize;

use crate::error::{OimError, Result};
use crate::problem::{
    coloring_conflicts, cut_value, ColorAssignment, ProblemInstance, ProblemKind, SpinAssignment,
};

pub const MAXCUT_NODE_LIMIT: usize = 28;
pub const COLORING_NODE_LIMIT: usize = 18;
pub const ENUMERATION_NODE_LIMIT: usize = 24;

/// Optimal objective value with one witnessing assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult<A> {
    /// Best cut weight, or minimum number of conflicting edges.
    pub optimum: i64,
    pub witness: A,
}

fn check_size(instance: &ProblemInstance, solver: &'static str, limit: usize) -> Result<()> {
    if instance.nodes() > limit {
        Err(OimError::TooLarge {
            solver,
            nodes: instance.nodes(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// For each node, its edges to lower-indexed nodes.
fn back_edges(instance: &ProblemInstance) -> Vec<Vec<(usize, i64)>> {
    let mut back = vec![Vec::new(); instance.nodes()];
    for e in instance.edges() {
        back[e.j].push((e.i, i64::from(e.w)));
    }
    back
}

struct CutSearch {
    back: Vec<Vec<(usize, i64)>>,
    /// `slack[k]`: positive weight still undecided once nodes `0..k` are set.
    slack: Vec<i64>,
    spins: Vec<i8>,
    best: i64,
    best_spins: Vec<i8>,
}

impl CutSearch {
    fn descend(&mut self, k: usize, cut: i64) {
        let n = self.spins.len();
        if k == n {
            if cut > self.best {
                self.best = cut;
                self.best_spins.copy_from_slice(&self.spins);
            }
            return;
        }
        if cut + self.slack[k] <= self.best {
            return;
        }
        for s in [1i8, -1] {
            self.spins[k] = s;
            let gained: i64 = self.back[k]
                .iter()
                .filter(|&&(j, _)| self.spins[j] != s)
                .map(|&(_, w)| w)
                .sum();
            self.descend(k + 1, cut + gained);
        }
    }
}

/// Maximum cut by depth-first branch and bound.
pub fn brute_force_maxcut(instance: &ProblemInstance) -> Result<OracleResult<SpinAssignment>> {
    if !instance.kind().is_maxcut() {
        return Err(OimError::KindMismatch {
            expected: "max-cut",
            got: instance.kind().token(),
        });
    }
    check_size(instance, "brute_force_maxcut", MAXCUT_NODE_LIMIT)?;
    let n = instance.nodes();
    let back = back_edges(instance);
    let mut slack = vec![0i64; n + 1];
    for k in (0..n).rev() {
        slack[k] = slack[k + 1] + back[k].iter().map(|&(_, w)| w.max(0)).sum::<i64>();
    }
    let mut search = CutSearch {
        back,
        slack,
        spins: vec![1; n],
        best: i64::MIN,
        best_spins: vec![1; n],
    };
    search.descend(1, 0);
    Ok(OracleResult {
        optimum: search.best,
        witness: SpinAssignment(search.best_spins),
    })
}

/// Maximum cut by plain enumeration of all `2^(n-1)` patterns. Independent
/// of [`brute_force_maxcut`]; used to cross-check it.
pub fn enumerate_maxcut(instance: &ProblemInstance) -> Result<OracleResult<SpinAssignment>> {
    check_size(instance, "enumerate_maxcut", ENUMERATION_NODE_LIMIT)?;
    let n = instance.nodes();
    let mut best: Option<(i64, SpinAssignment)> = None;
    for mask in 0u64..(1u64 << (n - 1)) {
        // Bit k of the mask is the spin of node k+1, most significant node
        // first so masks count up in lexicographic order.
        let spins = SpinAssignment(
            (0..n)
                .map(|node| {
                    if node == 0 {
                        return 1;
                    }
                    let bit = n - 1 - node;
                    if mask >> bit & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect(),
        );
        let cut = cut_value(instance, &spins)?;
        if best.as_ref().is_none_or(|(b, _)| cut > *b) {
            best = Some((cut, spins));
        }
    }
    let (optimum, witness) = best.expect("at least one pattern");
    Ok(OracleResult { optimum, witness })
}

struct ColorSearch {
    back: Vec<Vec<usize>>,
    colors: Vec<u8>,
    best: usize,
    best_colors: Vec<u8>,
}

impl ColorSearch {
    fn descend(&mut self, k: usize, conflicts: usize) {
        if conflicts >= self.best {
            return;
        }
        if k == self.colors.len() {
            self.best = conflicts;
            self.best_colors.copy_from_slice(&self.colors);
            return;
        }
        for c in 0..3u8 {
            self.colors[k] = c;
            let added = self.back[k]
                .iter()
                .filter(|&&j| self.colors[j] == c)
                .count();
            self.descend(k + 1, conflicts + added);
            if self.best == 0 {
                return;
            }
        }
    }
}

/// Minimum number of monochromatic edges over all 3-colorings.
pub fn brute_force_coloring(instance: &ProblemInstance) -> Result<OracleResult<ColorAssignment>> {
    if instance.kind() != ProblemKind::Coloring3 {
        return Err(OimError::KindMismatch {
            expected: "color3",
            got: instance.kind().token(),
        });
    }
    check_size(instance, "brute_force_coloring", COLORING_NODE_LIMIT)?;
    let n = instance.nodes();
    let back = back_edges(instance)
        .into_iter()
        .map(|v| v.into_iter().map(|(j, _)| j).collect())
        .collect();
    let mut search = ColorSearch {
        back,
        colors: vec![0; n],
        best: usize::MAX,
        best_colors: vec![0; n],
    };
    search.descend(1, 0);
    let witness = ColorAssignment(search.best_colors);
    debug_assert_eq!(
        coloring_conflicts(instance, &witness).ok(),
        Some(search.best)
    );
    Ok(OracleResult {
        optimum: search.best as i64,
        witness,
    })
}
