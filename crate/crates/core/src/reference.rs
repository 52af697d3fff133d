//! Continuous-phase Forward Euler reference.
//!
//! Integrates the same schedule as the emulator on `f64` phases in `[0, 1)`,
//! either with the piecewise-constant coupling and synchronization functions
//! or with the original sinusoidal ones. Couplings enter as `J / 64` and the
//! sync term as `A_s / 64`. The step is `2^-m / 4` turns per unit gradient,
//! which is exactly what the emulator's shift does to a sum of full-scale
//! terms (`64 >> 6` = one code = 1/256 turn); with this step and full-scale
//! weights the piecewise reference reproduces the emulator's first
//! iterations exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::emulator::{init_random, MachineConfig, Mode};
use crate::error::{OimError, Result};
use crate::fxp::{f_s3_exact, Weight8};
use crate::problem::{to_couplings, Assignment, ColorAssignment, ProblemInstance, SpinAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Sign-valued coupling and synchronization with exact real boundaries.
    Piecewise,
    /// `sin(2 pi psi)` coupling and `sin(2 pi N phi)` synchronization.
    Sinusoidal,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Piecewise => "piecewise",
            Family::Sinusoidal => "sinusoidal",
        }
    }

    fn coupling(self, psi: f64) -> f64 {
        match self {
            Family::Piecewise => {
                if psi.rem_euclid(1.0) < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            Family::Sinusoidal => (TAU * psi).sin(),
        }
    }

    fn sync(self, mode: Mode, phi: f64) -> f64 {
        match (self, mode) {
            (Family::Piecewise, Mode::Ising) => {
                if phi.rem_euclid(0.5) < 0.25 {
                    -1.0
                } else {
                    1.0
                }
            }
            (Family::Piecewise, Mode::Potts3) => f64::from(f_s3_exact(phi).value()),
            (Family::Sinusoidal, _) => (TAU * f64::from(mode.states()) * phi).sin(),
        }
    }

    /// Stable phases of the isolated oscillator, in readout order.
    pub fn attractors(self, mode: Mode) -> &'static [f64] {
        match (self, mode) {
            (Family::Piecewise, Mode::Ising) => &[0.25, 0.75],
            (Family::Sinusoidal, Mode::Ising) => &[0.0, 0.5],
            (Family::Piecewise, Mode::Potts3) => &[1.0 / 6.0, 0.5, 5.0 / 6.0],
            (Family::Sinusoidal, Mode::Potts3) => &[0.0, 1.0 / 3.0, 2.0 / 3.0],
        }
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Index of the nearest attractor. A phase exactly between two attractors
/// goes to the one above it, so readout cells are lower-inclusive.
pub fn nearest_attractor(family: Family, mode: Mode, phi: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, &a) in family.attractors(mode).iter().enumerate() {
        let d = circular_distance(phi, a);
        let above = (a - phi).rem_euclid(1.0) <= 0.5;
        if d < best_d || (d == best_d && above) {
            best = k;
            best_d = d;
        }
    }
    best
}

fn wrap(phi: f64) -> f64 {
    let w = phi.rem_euclid(1.0);
    // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

/// Real-valued counterpart of [`crate::emulator::Emulator`].
#[derive(Debug, Clone)]
pub struct FloatIntegrator {
    config: MachineConfig,
    family: Family,
    step: f64,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl FloatIntegrator {
    pub fn new(config: MachineConfig, instance: &ProblemInstance, family: Family) -> Result<Self> {
        config.validate()?;
        if *instance.grid() != config.grid {
            return Err(OimError::Config(
                "instance grid does not match machine grid".into(),
            ));
        }
        let couplings = to_couplings(instance)?;
        let scale = f64::from(Weight8::FULL_SCALE);
        let mut adjacency = vec![Vec::new(); config.grid.nodes()];
        for (i, j, w) in couplings.iter() {
            let j_real = f64::from(w.raw()) / scale;
            adjacency[i].push((j, j_real));
            adjacency[j].push((i, j_real));
        }
        let step = (-(config.h_shift as f64)).exp2() * scale / 256.0;
        Ok(Self {
            config,
            family,
            step,
            adjacency,
        })
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    /// Step size in turns per unit gradient.
    pub fn step_size(&self) -> f64 {
        self.step
    }

    pub fn gradient(&self, i: usize, phases: &[f64], sync_enable: bool) -> f64 {
        let phi = phases[i];
        let mut g: f64 = self.adjacency[i]
            .iter()
            .map(|&(k, j)| j * self.family.coupling(phi - phases[k]))
            .sum();
        if sync_enable {
            let amp = f64::from(self.config.sync_amp) / f64::from(Weight8::FULL_SCALE);
            g += amp * self.family.sync(self.config.mode, phi);
        }
        g
    }

    /// One synchronous Euler step; `iteration` selects the sync schedule.
    pub fn step(&self, phases: &[f64], iteration: usize) -> Vec<f64> {
        let sync = iteration >= self.config.sync_start;
        (0..phases.len())
            .map(|i| wrap(phases[i] - self.step * self.gradient(i, phases, sync)))
            .collect()
    }

    /// Runs `T` steps from the given phases.
    pub fn run_from(&self, mut phases: Vec<f64>) -> Vec<f64> {
        for it in 0..self.config.total_iters {
            phases = self.step(&phases, it);
        }
        phases
    }

    /// Runs from the emulator's initial phases for `config.seed`, as
    /// `raw / 256`.
    pub fn run(&self) -> Vec<f64> {
        let init = init_random(&self.config)
            .phases
            .iter()
            .map(|p| p.turns())
            .collect();
        self.run_from(init)
    }

    pub fn readout(&self, phases: &[f64]) -> Assignment {
        let idx = phases
            .iter()
            .map(|&p| nearest_attractor(self.family, self.config.mode, p));
        match self.config.mode {
            Mode::Ising => Assignment::Spins(SpinAssignment(
                idx.map(|k| if k == 0 { 1 } else { -1 }).collect(),
            )),
            Mode::Potts3 => Assignment::Colors(ColorAssignment(idx.map(|k| k as u8).collect())),
        }
    }
}

/// Final phases and readout of one reference run.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatRun {
    pub phases: Vec<f64>,
    pub assignment: Assignment,
    /// Cut weight for max-cut, conflicting edges for coloring.
    pub objective: i64,
}

pub fn float_reference_run(
    config: &MachineConfig,
    instance: &ProblemInstance,
    family: Family,
) -> Result<FloatRun> {
    let integrator = FloatIntegrator::new(*config, instance, family)?;
    let phases = integrator.run();
    let assignment = integrator.readout(&phases);
    let objective = assignment.objective(instance)?;
    Ok(FloatRun {
        phases,
        assignment,
        objective,
    })
}
