//! Combinatorial problems on a king's grid: max-cut and 3-coloring.
//!
//! Max-cut maps to couplings `J_ij = -w_ij`, so a spin assignment with a
//! larger cut has a lower Ising energy `H = -sum J_ij s_i s_j`. Coloring maps
//! every edge to the full-scale antiferromagnetic coupling.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::couplings::CouplingStore;
use crate::error::{OimError, Result};
use crate::fxp::Weight8;
use crate::grid::GridTopology;

/// Weight written for unweighted max-cut edges.
pub const UNIT_WEIGHT: i8 = Weight8::FULL_SCALE;
/// Weight written for coloring edges; the value itself is not used.
pub const COLOR_EDGE_WEIGHT: i8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "maxcut")]
    MaxCutUnweighted,
    #[serde(rename = "maxcutw")]
    MaxCutWeighted,
    #[serde(rename = "color3")]
    Coloring3,
}

impl ProblemKind {
    /// Token used in instance files.
    pub fn token(self) -> &'static str {
        match self {
            ProblemKind::MaxCutUnweighted => "maxcut",
            ProblemKind::MaxCutWeighted => "maxcutw",
            ProblemKind::Coloring3 => "color3",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "maxcut" => Some(ProblemKind::MaxCutUnweighted),
            "maxcutw" => Some(ProblemKind::MaxCutWeighted),
            "color3" => Some(ProblemKind::Coloring3),
            _ => None,
        }
    }

    pub fn is_maxcut(self) -> bool {
        !matches!(self, ProblemKind::Coloring3)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: i8,
}

/// A weighted subgraph of a king's grid. Edges are kept sorted by `(i, j)`
/// with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemInstance {
    grid: GridTopology,
    kind: ProblemKind,
    edges: Vec<Edge>,
}

impl ProblemInstance {
    /// Validates adjacency, duplicates and weights; edges may be given in any
    /// order and orientation.
    pub fn new(
        grid: GridTopology,
        kind: ProblemKind,
        edges: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b, w) in edges {
            grid.check_node(a)?;
            grid.check_node(b)?;
            let (i, j) = (a.min(b), a.max(b));
            if !grid.is_adjacent(i, j) {
                return Err(OimError::NotAdjacent { i, j });
            }
            if w == 0 || !(-127..=127).contains(&w) {
                return Err(OimError::WeightOutOfRange { i, j, w });
            }
            if !seen.insert((i, j)) {
                return Err(OimError::DuplicateEdge { i, j });
            }
            out.push(Edge { i, j, w: w as i8 });
        }
        out.sort_unstable_by_key(|e| (e.i, e.j));
        Ok(Self {
            grid,
            kind,
            edges: out,
        })
    }

    pub fn grid(&self) -> &GridTopology {
        &self.grid
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn nodes(&self) -> usize {
        self.grid.nodes()
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| i64::from(e.w)).sum()
    }

    fn expect_maxcut(&self) -> Result<()> {
        if self.kind.is_maxcut() {
            Ok(())
        } else {
            Err(OimError::KindMismatch {
                expected: "max-cut",
                got: self.kind.token(),
            })
        }
    }

    fn expect_coloring(&self) -> Result<()> {
        if self.kind == ProblemKind::Coloring3 {
            Ok(())
        } else {
            Err(OimError::KindMismatch {
                expected: "color3",
                got: self.kind.token(),
            })
        }
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got == self.nodes() {
            Ok(())
        } else {
            Err(OimError::LengthMismatch {
                expected: self.nodes(),
                got,
            })
        }
    }
}

/// One `+1`/`-1` spin per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SpinAssignment(pub Vec<i8>);

impl SpinAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flipped(&self) -> Self {
        SpinAssignment(self.0.iter().map(|s| -s).collect())
    }
}

/// One color in `{0, 1, 2}` per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ColorAssignment(pub Vec<u8>);

impl ColorAssignment {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A solver readout of either kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Assignment {
    Spins(SpinAssignment),
    Colors(ColorAssignment),
}

impl Assignment {
    /// Cut weight for max-cut instances, conflicting edges for coloring.
    pub fn objective(&self, instance: &ProblemInstance) -> Result<i64> {
        match self {
            Assignment::Spins(s) => cut_value(instance, s),
            Assignment::Colors(c) => coloring_conflicts(instance, c).map(|n| n as i64),
        }
    }
}

/// `J_ij = -w_ij` for every edge.
pub fn maxcut_to_couplings(instance: &ProblemInstance) -> Result<CouplingStore> {
    instance.expect_maxcut()?;
    let mut store = CouplingStore::new(instance.grid);
    for e in &instance.edges {
        // |w| <= 127, so the negation fits.
        store.set(e.i, e.j, Weight8(-e.w))?;
    }
    Ok(store)
}

/// Uniform `J = -64` on every edge.
pub fn coloring_to_couplings(instance: &ProblemInstance) -> Result<CouplingStore> {
    instance.expect_coloring()?;
    let mut store = CouplingStore::new(instance.grid);
    for e in &instance.edges {
        store.set(e.i, e.j, Weight8(-Weight8::FULL_SCALE))?;
    }
    Ok(store)
}

/// Maps either problem kind to its couplings.
pub fn to_couplings(instance: &ProblemInstance) -> Result<CouplingStore> {
    if instance.kind.is_maxcut() {
        maxcut_to_couplings(instance)
    } else {
        coloring_to_couplings(instance)
    }
}

/// Total weight of edges whose endpoints have different spins.
pub fn cut_value(instance: &ProblemInstance, spins: &SpinAssignment) -> Result<i64> {
    instance.expect_maxcut()?;
    instance.check_len(spins.len())?;
    Ok(instance
        .edges
        .iter()
        .filter(|e| spins.0[e.i] != spins.0[e.j])
        .map(|e| i64::from(e.w))
        .sum())
}

/// `H = -sum_{i<j} J_ij s_i s_j` over stored pairs.
pub fn ising_energy(couplings: &CouplingStore, spins: &SpinAssignment) -> Result<i64> {
    let n = couplings.grid().nodes();
    if spins.len() != n {
        return Err(OimError::LengthMismatch {
            expected: n,
            got: spins.len(),
        });
    }
    Ok(-couplings
        .iter()
        .map(|(i, j, w)| i64::from(w.raw()) * i64::from(spins.0[i]) * i64::from(spins.0[j]))
        .sum::<i64>())
}

/// Number of edges whose endpoints share a color.
pub fn coloring_conflicts(instance: &ProblemInstance, colors: &ColorAssignment) -> Result<usize> {
    instance.expect_coloring()?;
    instance.check_len(colors.len())?;
    Ok(instance
        .edges
        .iter()
        .filter(|e| colors.0[e.i] == colors.0[e.j])
        .count())
}

/// Fraction of properly colored edges; 1 for an edgeless graph.
pub fn coloring_satisfaction(instance: &ProblemInstance, colors: &ColorAssignment) -> Result<f64> {
    let conflicts = coloring_conflicts(instance, colors)?;
    let total = instance.edges.len();
    if total == 0 {
        return Ok(1.0);
    }
    Ok((total - conflicts) as f64 / total as f64)
}

/// Quantizes `w` against the instance full scale `w_max` to `[-64, 64]`,
/// rounding half away from zero.
pub fn quantize_weight(w: f64, w_max: f64) -> Weight8 {
    if w == 0.0 || w_max <= 0.0 {
        return Weight8(0);
    }
    let full = f64::from(Weight8::FULL_SCALE);
    // f64::round is half-away-from-zero.
    let q = (w / w_max * full).round().clamp(-full, full);
    Weight8(q as i8)
}

/// Random max-cut instance: each king's-graph edge kept with probability
/// `density`. Unweighted edges carry `+64`; weighted edges draw a uniform
/// value in `[-1, 1]`, quantized against the largest magnitude drawn, and
/// edges that quantize to zero are dropped.
pub fn gen_maxcut(
    grid: GridTopology,
    weighted: bool,
    density: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<(usize, usize, f64)> = Vec::new();
    for (i, j) in grid.edges() {
        if !rng.gen_bool(density) {
            continue;
        }
        let w = if weighted {
            rng.gen_range(-1.0f64..=1.0)
        } else {
            1.0
        };
        picked.push((i, j, w));
    }
    let (kind, edges): (_, Vec<_>) = if weighted {
        let w_max = picked.iter().map(|e| e.2.abs()).fold(0.0, f64::max);
        let edges = picked
            .into_iter()
            .map(|(i, j, w)| (i, j, i64::from(quantize_weight(w, w_max).raw())))
            .filter(|e| e.2 != 0)
            .collect();
        (ProblemKind::MaxCutWeighted, edges)
    } else {
        let edges = picked
            .into_iter()
            .map(|(i, j, _)| (i, j, i64::from(UNIT_WEIGHT)))
            .collect();
        (ProblemKind::MaxCutUnweighted, edges)
    };
    ProblemInstance::new(grid, kind, edges)
}

/// A generated 3-colorable instance together with the hidden coloring that
/// certifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorableInstance {
    pub instance: ProblemInstance,
    pub certificate: ColorAssignment,
}

/// Random 3-colorable instance: draw a hidden color per node, then keep each
/// king's-graph edge between differently colored nodes with probability
/// `density`.
pub fn gen_3colorable(grid: GridTopology, density: f64, seed: u64) -> Result<ColorableInstance> {
    check_density(density)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden = ColorAssignment((0..grid.nodes()).map(|_| rng.gen_range(0..3u8)).collect());
    gen_3colorable_from(grid, hidden, density, &mut rng)
}

/// Edge sampling step of [`gen_3colorable`] for a given hidden coloring.
pub fn gen_3colorable_from<R: Rng>(
    grid: GridTopology,
    hidden: ColorAssignment,
    density: f64,
    rng: &mut R,
) -> Result<ColorableInstance> {
    check_density(density)?;
    if hidden.len() != grid.nodes() {
        return Err(OimError::LengthMismatch {
            expected: grid.nodes(),
            got: hidden.len(),
        });
    }
    let mut edges = Vec::new();
    for (i, j) in grid.edges() {
        if hidden.0[i] != hidden.0[j] && rng.gen_bool(density) {
            edges.push((i, j, i64::from(COLOR_EDGE_WEIGHT)));
        }
    }
    Ok(ColorableInstance {
        instance: ProblemInstance::new(grid, ProblemKind::Coloring3, edges)?,
        certificate: hidden,
    })
}

fn check_density(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(OimError::Config(format!(
            "density must be in (0, 1], got {p}"
        )))
    }
}
