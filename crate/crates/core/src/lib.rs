//! Bit-accurate emulator of a fixed-point oscillator Ising/Potts machine.
//!
//! A `width x height` array of processing elements, each holding an 8-bit
//! phase, is coupled along king's-graph edges. Every iteration all PEs apply
//! one Forward Euler step of simplified Kuramoto dynamics; the settled phases
//! are read out as Ising spins (max-cut) or three Potts colors (graph
//! coloring).
//!
//! Modules:
//! - [`fxp`]: phase arithmetic and the bit-inspection kernels.
//! - [`grid`], [`couplings`], [`emulator`]: the PE array.
//! - [`problem`], [`format`]: problem instances, mappings, generators, files.
//! - [`oracle`], [`reference`]: exact solvers and a continuous-phase solver.
//! - [`harness`]: batch statistics, comparisons and throughput.

pub mod couplings;
pub mod emulator;
pub mod error;
pub mod format;
pub mod fxp;
pub mod grid;
pub mod harness;
pub mod oracle;
pub mod problem;
pub mod reference;

pub use couplings::CouplingStore;
pub use emulator::{
    init_random, readout_colors, readout_spins, Emulator, MachineConfig, MachineState, Mode,
};
pub use error::{OimError, Result};
pub use fxp::{Phase8, Sign, Weight8};
pub use grid::GridTopology;
pub use problem::{Assignment, ColorAssignment, ProblemInstance, ProblemKind, SpinAssignment};
