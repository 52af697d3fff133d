//! Batch runs, accuracy statistics and throughput measurement.
//!
//! A batch is `R` independent runs of the same instance. Run `k` uses the
//! seed [`run_seed`]`(config.seed, k)`, so results do not depend on the order
//! or thread in which runs execute. Aggregation folds over run index.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::emulator::{init_random, readout_colors, readout_spins, Emulator, MachineConfig, Mode};
use crate::error::{OimError, Result};
use crate::grid::GridTopology;
use crate::problem::{
    coloring_satisfaction, gen_maxcut, to_couplings, Assignment, ProblemInstance, ProblemKind,
};
use crate::reference::{Family, FloatIntegrator};

/// PE updates per second of the 20x20 ASIC at 200 MHz, one iteration per cycle.
pub const ASIC_PE_UPDATES_PER_SECOND: f64 = 400.0 * 200.0e6;
/// Solutions per second reported for the ASIC at 1000 iterations per run.
pub const ASIC_SOLUTIONS_PER_SECOND: f64 = 200.0e3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run` in a batch with base seed `base`.
pub fn run_seed(base: u64, run: usize) -> u64 {
    splitmix64(base ^ splitmix64(run as u64))
}

/// Emulator mode implied by an instance kind.
pub fn mode_for(kind: ProblemKind) -> Mode {
    if kind.is_maxcut() {
        Mode::Ising
    } else {
        Mode::Potts3
    }
}

fn check_mode(config: &MachineConfig, instance: &ProblemInstance) -> Result<()> {
    let want = mode_for(instance.kind());
    if config.mode != want {
        return Err(OimError::Config(format!(
            "{} instances need N = {}, config has N = {}",
            instance.kind(),
            want.states(),
            config.mode.states()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Exact optimum from the brute-force oracle.
    Oracle,
    /// Best-known value given by the caller.
    Supplied,
    /// No reference given; normalized by the best run of this batch.
    BestOfBatch,
}

/// Objective value accuracy is measured against: best cut for max-cut,
/// minimum conflicts for coloring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Reference {
    pub value: i64,
    pub source: ReferenceSource,
}

impl Reference {
    pub fn oracle(value: i64) -> Self {
        Self {
            value,
            source: ReferenceSource::Oracle,
        }
    }

    pub fn supplied(value: i64) -> Self {
        Self {
            value,
            source: ReferenceSource::Supplied,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Cut weight for max-cut, conflicting edges for coloring.
    pub objective: i64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub runs: usize,
    pub mean_accuracy: f64,
    /// Population standard deviation.
    pub std_accuracy: f64,
    pub min_accuracy: f64,
    pub max_accuracy: f64,
    /// Runs whose objective equals the reference.
    pub optimum_hits: usize,
    pub best_objective: i64,
    pub best_run: usize,
    pub best_witness: Assignment,
    pub reference: Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub iterations_per_second: f64,
    pub pe_updates_per_second: f64,
    pub solutions_per_second: f64,
}

impl Timing {
    fn measure(wall_seconds: f64, runs: usize, iters: usize, nodes: usize) -> Self {
        let per = |count: f64| {
            if wall_seconds > 0.0 {
                count / wall_seconds
            } else {
                f64::INFINITY
            }
        };
        Self {
            wall_seconds,
            iterations_per_second: per((runs * iters) as f64),
            pe_updates_per_second: per((runs * iters * nodes) as f64),
            solutions_per_second: per(runs as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStats {
    pub per_run: Vec<RunRecord>,
    pub summary: Summary,
    pub timing: Timing,
}

impl RunStats {
    pub fn accuracies(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_run.iter().map(|r| r.accuracy)
    }
}

/// Runs `runs` independent emulator runs and aggregates their accuracy.
pub fn run_batch(
    config: &MachineConfig,
    instance: &ProblemInstance,
    runs: usize,
    reference: Option<Reference>,
) -> Result<RunStats> {
    check_mode(config, instance)?;
    let emulator = Emulator::new(*config, &to_couplings(instance)?)?;
    batch_with(config, instance, runs, reference, |seed| {
        let state = emulator.run_from(init_random(&config.with_seed(seed)));
        Ok(match config.mode {
            Mode::Ising => Assignment::Spins(readout_spins(&state)),
            Mode::Potts3 => Assignment::Colors(readout_colors(&state)),
        })
    })
}

/// Same batch protocol with the continuous-phase reference solver. Run `k`
/// starts from the same phases as emulator run `k`.
pub fn run_float_batch(
    config: &MachineConfig,
    instance: &ProblemInstance,
    runs: usize,
    reference: Option<Reference>,
    family: Family,
) -> Result<RunStats> {
    check_mode(config, instance)?;
    let integrator = FloatIntegrator::new(*config, instance, family)?;
    batch_with(config, instance, runs, reference, |seed| {
        let phases = integrator.run_from(
            init_random(&config.with_seed(seed))
                .phases
                .iter()
                .map(|p| p.turns())
                .collect(),
        );
        Ok(integrator.readout(&phases))
    })
}

fn batch_with<F>(
    config: &MachineConfig,
    instance: &ProblemInstance,
    runs: usize,
    reference: Option<Reference>,
    solve: F,
) -> Result<RunStats>
where
    F: Fn(u64) -> Result<Assignment> + Sync,
{
    if runs == 0 {
        return Err(OimError::Config("a batch needs at least one run".into()));
    }
    let started = Instant::now();
    let outcomes: Vec<(u64, Assignment, i64)> = (0..runs)
        .into_par_iter()
        .map(|k| {
            let seed = run_seed(config.seed, k);
            let assignment = solve(seed)?;
            let objective = assignment.objective(instance)?;
            Ok((seed, assignment, objective))
        })
        .collect::<Result<_>>()?;
    let wall = started.elapsed().as_secs_f64();

    let maxcut = instance.kind().is_maxcut();
    let better = |a: i64, b: i64| if maxcut { a > b } else { a < b };
    let mut best_run = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if better(o.2, outcomes[best_run].2) {
            best_run = k;
        }
    }
    let best_objective = outcomes[best_run].2;
    let reference = reference.unwrap_or(Reference {
        value: best_objective,
        source: ReferenceSource::BestOfBatch,
    });
    if maxcut && reference.value <= 0 {
        return Err(OimError::NonPositiveReference(reference.value));
    }
    if !maxcut && reference.value < 0 {
        return Err(OimError::Config(format!(
            "coloring reference must be a non-negative conflict count, got {}",
            reference.value
        )));
    }

    let mut per_run = Vec::with_capacity(runs);
    for (k, (seed, assignment, objective)) in outcomes.iter().enumerate() {
        if better(*objective, reference.value) {
            return Err(OimError::ReferenceExceeded {
                run: k,
                objective: *objective,
                reference: reference.value,
            });
        }
        let accuracy = match assignment {
            Assignment::Spins(_) => (*objective).max(0) as f64 / reference.value as f64,
            Assignment::Colors(c) => coloring_satisfaction(instance, c)?,
        };
        per_run.push(RunRecord {
            run: k,
            seed: *seed,
            objective: *objective,
            accuracy,
        });
    }

    let n = runs as f64;
    let mean = per_run.iter().map(|r| r.accuracy).sum::<f64>() / n;
    let var = per_run
        .iter()
        .map(|r| (r.accuracy - mean).powi(2))
        .sum::<f64>()
        / n;
    let min = per_run
        .iter()
        .map(|r| r.accuracy)
        .fold(f64::INFINITY, f64::min);
    let max = per_run
        .iter()
        .map(|r| r.accuracy)
        .fold(f64::NEG_INFINITY, f64::max);
    let optimum_hits = per_run
        .iter()
        .filter(|r| r.objective == reference.value)
        .count();

    let summary = Summary {
        runs,
        mean_accuracy: mean,
        std_accuracy: var.sqrt(),
        min_accuracy: min,
        max_accuracy: max,
        optimum_hits,
        best_objective,
        best_run,
        best_witness: outcomes[best_run].1.clone(),
        reference,
    };
    Ok(RunStats {
        per_run,
        summary,
        timing: Timing::measure(wall, runs, config.total_iters, instance.nodes()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceInfo {
    pub kind: ProblemKind,
    pub width: usize,
    pub height: usize,
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: i64,
}

impl InstanceInfo {
    pub fn of(instance: &ProblemInstance) -> Self {
        Self {
            kind: instance.kind(),
            width: instance.grid().width(),
            height: instance.grid().height(),
            nodes: instance.nodes(),
            edges: instance.edges().len(),
            total_weight: instance.total_weight(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigInfo {
    pub states: u8,
    pub h_shift: u32,
    pub iters: usize,
    pub sync_start: usize,
    pub sync_amp: u8,
    pub seed: u64,
    pub runs: usize,
}

impl ConfigInfo {
    pub fn of(config: &MachineConfig, runs: usize) -> Self {
        Self {
            states: config.mode.states(),
            h_shift: config.h_shift,
            iters: config.total_iters,
            sync_start: config.sync_start,
            sync_amp: config.sync_amp,
            seed: config.seed,
            runs,
        }
    }
}

/// JSON document written by `solve`.
#[derive(Debug, Clone, Serialize)]
pub struct BatchReport {
    pub instance: InstanceInfo,
    pub config: ConfigInfo,
    pub per_run: Vec<RunRecord>,
    pub summary: Summary,
    pub timing: Timing,
}

impl BatchReport {
    pub fn new(instance: &ProblemInstance, config: &MachineConfig, stats: RunStats) -> Self {
        Self {
            instance: InstanceInfo::of(instance),
            config: ConfigInfo::of(config, stats.per_run.len()),
            per_run: stats.per_run,
            summary: stats.summary,
            timing: stats.timing,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverSection {
    pub per_run: Vec<RunRecord>,
    pub summary: Summary,
    pub timing: Timing,
}

impl From<RunStats> for SolverSection {
    fn from(s: RunStats) -> Self {
        Self {
            per_run: s.per_run,
            summary: s.summary,
            timing: s.timing,
        }
    }
}

/// JSON document written by `compare`.
#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub instance: InstanceInfo,
    pub config: ConfigInfo,
    pub fixed_point: SolverSection,
    pub float_piecewise: SolverSection,
    pub float_sinusoidal: SolverSection,
    /// Fixed-point mean accuracy minus piecewise-float mean accuracy.
    pub mean_gap_piecewise: f64,
    pub mean_gap_sinusoidal: f64,
}

/// Runs the same batch on the emulator and on both reference families.
pub fn compare(
    config: &MachineConfig,
    instance: &ProblemInstance,
    runs: usize,
    reference: Option<Reference>,
) -> Result<CompareReport> {
    let fixed = run_batch(config, instance, runs, reference)?;
    let piecewise = run_float_batch(config, instance, runs, reference, Family::Piecewise)?;
    let sinusoidal = run_float_batch(config, instance, runs, reference, Family::Sinusoidal)?;
    let gap = |other: &RunStats| fixed.summary.mean_accuracy - other.summary.mean_accuracy;
    Ok(CompareReport {
        instance: InstanceInfo::of(instance),
        config: ConfigInfo::of(config, runs),
        mean_gap_piecewise: gap(&piecewise),
        mean_gap_sinusoidal: gap(&sinusoidal),
        fixed_point: fixed.into(),
        float_piecewise: piecewise.into(),
        float_sinusoidal: sinusoidal.into(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub width: usize,
    pub height: usize,
    pub edges: usize,
    pub iters: usize,
    pub runs: usize,
    pub wall_seconds: f64,
    pub pe_updates_per_second: f64,
    pub solutions_per_second: f64,
    pub asic_pe_updates_per_second: f64,
    pub asic_solutions_per_second: f64,
    /// Emulator throughput as a fraction of the ASIC's.
    pub pe_update_ratio: f64,
    /// Folded into the report so the runs cannot be optimized away.
    pub checksum: u64,
}

/// Single-threaded throughput on a full-density unweighted max-cut grid.
pub fn bench(
    width: usize,
    height: usize,
    iters: usize,
    runs: usize,
    seed: u64,
) -> Result<BenchReport> {
    if runs == 0 {
        return Err(OimError::Config("bench needs at least one run".into()));
    }
    let grid = GridTopology::new(width, height)?;
    let instance = gen_maxcut(grid, false, 1.0, seed)?;
    let mut config = MachineConfig::new(grid, Mode::Ising).with_seed(seed);
    config.total_iters = iters;
    config.sync_start = iters / 4;
    let emulator = Emulator::new(config, &to_couplings(&instance)?)?;
    let initial: Vec<_> = (0..runs)
        .map(|k| init_random(&config.with_seed(run_seed(seed, k))))
        .collect();

    let started = Instant::now();
    let mut checksum = 0u64;
    for state in initial {
        let end = emulator.run_from(state);
        checksum = end
            .phases
            .iter()
            .fold(checksum, |acc, p| acc.rotate_left(5) ^ u64::from(p.raw()));
    }
    let wall = started.elapsed().as_secs_f64();
    let timing = Timing::measure(wall, runs, iters, grid.nodes());
    Ok(BenchReport {
        width,
        height,
        edges: instance.edges().len(),
        iters,
        runs,
        wall_seconds: wall,
        pe_updates_per_second: timing.pe_updates_per_second,
        solutions_per_second: timing.solutions_per_second,
        asic_pe_updates_per_second: ASIC_PE_UPDATES_PER_SECOND,
        asic_solutions_per_second: ASIC_SOLUTIONS_PER_SECOND,
        pe_update_ratio: timing.pe_updates_per_second / ASIC_PE_UPDATES_PER_SECOND,
        checksum,
    })
}
