//! Synchronous PE-array emulator.
//!
//! Every iteration each PE reads the previous-iteration phases of its king's
//! graph neighbors, accumulates `J * F_c` through the sign mux, optionally
//! adds the synchronization term, shifts the sum by `h = 2^-m` and subtracts
//! it from its own phase. All PEs update from the same snapshot, which is
//! modeled with a pair of phase buffers.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::couplings::CouplingStore;
use crate::error::{OimError, Result};
use crate::fxp::{
    apply_update, f_c, f_s2, f_s3, phase_diff, scale_by_h, signed_weight, GradientAcc, Phase8,
    Sign, Weight8,
};
use crate::grid::GridTopology;
use crate::problem::{ColorAssignment, SpinAssignment};

/// Number of discrete phase states the synchronization term creates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `N = 2`, two-state Ising spins.
    Ising,
    /// `N = 3`, three-state Potts spins.
    Potts3,
}

impl Mode {
    pub fn states(self) -> u8 {
        match self {
            Mode::Ising => 2,
            Mode::Potts3 => 3,
        }
    }

    pub fn from_states(n: u8) -> Option<Mode> {
        match n {
            2 => Some(Mode::Ising),
            3 => Some(Mode::Potts3),
            _ => None,
        }
    }

    #[inline]
    pub fn sync_sign(self, phi: Phase8) -> Sign {
        match self {
            Mode::Ising => f_s2(phi),
            Mode::Potts3 => f_s3(phi),
        }
    }
}

pub const DEFAULT_H_SHIFT: u32 = 6;
pub const DEFAULT_ITERS: usize = 1000;
pub const DEFAULT_SYNC_AMP: u8 = 64;
pub const MAX_SYNC_AMP: u8 = 128;

/// Run parameters for one emulator run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineConfig {
    pub grid: GridTopology,
    pub mode: Mode,
    /// `m` in `h = 2^-m`.
    pub h_shift: u32,
    pub total_iters: usize,
    /// First iteration with the synchronization term enabled.
    pub sync_start: usize,
    pub sync_amp: u8,
    pub seed: u64,
}

impl MachineConfig {
    /// Defaults: `m = 6`, `T = 1000`, sync from `T/4`, `A_s = 64`, seed 0.
    pub fn new(grid: GridTopology, mode: Mode) -> Self {
        Self {
            grid,
            mode,
            h_shift: DEFAULT_H_SHIFT,
            total_iters: DEFAULT_ITERS,
            sync_start: DEFAULT_ITERS / 4,
            sync_amp: DEFAULT_SYNC_AMP,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.h_shift > 8 {
            return Err(OimError::Config(format!(
                "h shift must be in [0, 8], got {}",
                self.h_shift
            )));
        }
        if self.sync_start > self.total_iters {
            return Err(OimError::Config(format!(
                "sync start {} exceeds total iterations {}",
                self.sync_start, self.total_iters
            )));
        }
        if self.sync_amp == 0 || self.sync_amp > MAX_SYNC_AMP {
            return Err(OimError::Config(format!(
                "sync amplitude must be in [1, {MAX_SYNC_AMP}], got {}",
                self.sync_amp
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Phase registers of all PEs plus the iteration counter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineState {
    pub phases: Vec<Phase8>,
    pub iteration: usize,
}

impl MachineState {
    pub fn from_phases(phases: Vec<Phase8>) -> Self {
        Self {
            phases,
            iteration: 0,
        }
    }
}

/// Uniform random initial phases over all 256 codes, drawn from a ChaCha8
/// stream seeded with `config.seed`.
pub fn init_random(config: &MachineConfig) -> MachineState {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let phases = (0..config.grid.nodes())
        .map(|_| Phase8(rng.gen::<u8>()))
        .collect();
    MachineState::from_phases(phases)
}

/// Phase vectors of a run, row 0 being the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trajectory {
    pub rows: Vec<Vec<Phase8>>,
}

impl Trajectory {
    /// One line per iteration of comma-separated decimal phase codes.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for row in &self.rows {
            let mut first = true;
            for p in row {
                if !first {
                    out.write_all(b",")?;
                }
                first = false;
                write!(out, "{}", p.raw())?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// A PE array programmed with one coupling configuration.
///
/// Neighbor weights are flattened into per-node slices so the inner loop
/// touches only the nonzero couplings of each PE.
#[derive(Debug, Clone)]
pub struct Emulator {
    config: MachineConfig,
    offsets: Vec<usize>,
    neighbor: Vec<u32>,
    weight: Vec<Weight8>,
}

impl Emulator {
    pub fn new(config: MachineConfig, couplings: &CouplingStore) -> Result<Self> {
        config.validate()?;
        if couplings.grid() != &config.grid {
            return Err(OimError::Config(format!(
                "coupling grid {}x{} does not match machine grid {}x{}",
                couplings.grid().width(),
                couplings.grid().height(),
                config.grid.width(),
                config.grid.height()
            )));
        }
        let n = config.grid.nodes();
        let mut adjacency: Vec<Vec<(u32, Weight8)>> = vec![Vec::new(); n];
        for (i, j, w) in couplings.iter() {
            adjacency[i].push((j as u32, w));
            adjacency[j].push((i as u32, w));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbor = Vec::new();
        let mut weight = Vec::new();
        offsets.push(0);
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(k, _)| k);
            for &(k, w) in list.iter() {
                neighbor.push(k);
                weight.push(w);
            }
            offsets.push(neighbor.len());
        }
        Ok(Self {
            config,
            offsets,
            neighbor,
            weight,
        })
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    pub fn nodes(&self) -> usize {
        self.config.grid.nodes()
    }

    /// Coupling sum of PE `i` given the previous-iteration phases.
    #[inline]
    pub fn pe_gradient(&self, i: usize, phases: &[Phase8], sync_enable: bool) -> GradientAcc {
        let phi = phases[i];
        let range = self.offsets[i]..self.offsets[i + 1];
        let mut sum: GradientAcc = 0;
        for (&k, &w) in self.neighbor[range.clone()].iter().zip(&self.weight[range]) {
            sum += signed_weight(w, f_c(phase_diff(phi, phases[k as usize])));
        }
        if sync_enable {
            let amp = self.config.sync_amp as GradientAcc;
            sum += amp * self.config.mode.sync_sign(phi).value();
        }
        sum
    }

    #[inline]
    fn update_pe(&self, i: usize, prev: &[Phase8], sync_enable: bool) -> Phase8 {
        let grad = self.pe_gradient(i, prev, sync_enable);
        apply_update(prev[i], scale_by_h(grad, self.config.h_shift))
    }

    fn sync_enabled(&self, iteration: usize) -> bool {
        iteration >= self.config.sync_start
    }

    /// One Forward Euler iteration for all PEs from `prev` into `next`.
    pub fn step_into(&self, prev: &[Phase8], next: &mut [Phase8], iteration: usize) {
        debug_assert_eq!(prev.len(), self.nodes());
        debug_assert_eq!(next.len(), self.nodes());
        let sync = self.sync_enabled(iteration);
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = self.update_pe(i, prev, sync);
        }
    }

    pub fn step(&self, state: &MachineState) -> MachineState {
        let mut next = vec![Phase8::ZERO; state.phases.len()];
        self.step_into(&state.phases, &mut next, state.iteration);
        MachineState {
            phases: next,
            iteration: state.iteration + 1,
        }
    }

    /// Same as [`step`](Self::step) but visits PEs in the given order. The
    /// result does not depend on the order.
    pub fn step_ordered(&self, state: &MachineState, order: &[usize]) -> MachineState {
        assert_eq!(order.len(), state.phases.len(), "order must cover every PE");
        let sync = self.sync_enabled(state.iteration);
        let mut next = vec![Phase8::ZERO; state.phases.len()];
        for &i in order {
            next[i] = self.update_pe(i, &state.phases, sync);
        }
        MachineState {
            phases: next,
            iteration: state.iteration + 1,
        }
    }

    /// Advances `state` by `iters` iterations in place.
    pub fn advance(&self, state: &mut MachineState, iters: usize) {
        let mut scratch = vec![Phase8::ZERO; state.phases.len()];
        for _ in 0..iters {
            self.step_into(&state.phases, &mut scratch, state.iteration);
            std::mem::swap(&mut state.phases, &mut scratch);
            state.iteration += 1;
        }
    }

    /// Runs `T` iterations from `initial`.
    pub fn run_from(&self, initial: MachineState) -> MachineState {
        let mut state = initial;
        self.advance(&mut state, self.config.total_iters);
        state
    }

    pub fn run_from_recorded(&self, initial: MachineState) -> (MachineState, Trajectory) {
        let mut rows = Vec::with_capacity(self.config.total_iters + 1);
        rows.push(initial.phases.clone());
        let mut state = initial;
        for _ in 0..self.config.total_iters {
            state = self.step(&state);
            rows.push(state.phases.clone());
        }
        (state, Trajectory { rows })
    }

    /// Random initialization followed by exactly `T` iterations.
    pub fn run(&self) -> MachineState {
        self.run_from(init_random(&self.config))
    }

    pub fn run_recorded(&self) -> (MachineState, Trajectory) {
        self.run_from_recorded(init_random(&self.config))
    }
}

/// Spin readout: `+1` when the MSB is clear. Splits the two-state attractor
/// bands around `0x40` and `0xC0` at the codes farthest from both.
pub fn readout_spins(state: &MachineState) -> SpinAssignment {
    SpinAssignment(
        state
            .phases
            .iter()
            .map(|p| if p.msb() { -1 } else { 1 })
            .collect(),
    )
}

/// Boundaries between the three-state attractors `0x20`, `0x80`, `0xE0`.
const COLOR_BOUNDARIES: [u8; 2] = [0x50, 0xB0];

pub fn color_of(p: Phase8) -> u8 {
    if p.raw() < COLOR_BOUNDARIES[0] {
        0
    } else if p.raw() < COLOR_BOUNDARIES[1] {
        1
    } else {
        2
    }
}

/// Color readout by nearest three-state attractor.
pub fn readout_colors(state: &MachineState) -> ColorAssignment {
    ColorAssignment(state.phases.iter().map(|&p| color_of(p)).collect())
}
