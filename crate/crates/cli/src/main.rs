use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use oim_core::emulator::{init_random, Emulator, DEFAULT_H_SHIFT, DEFAULT_ITERS, DEFAULT_SYNC_AMP};
use oim_core::format::{
    certificate_comment, load_instance, write_instance, write_instance_with_comments,
};
use oim_core::harness::{
    bench, compare, mode_for, run_batch, run_seed, BatchReport, Reference,
    ASIC_PE_UPDATES_PER_SECOND, ASIC_SOLUTIONS_PER_SECOND,
};
use oim_core::oracle::{brute_force_coloring, brute_force_maxcut};
use oim_core::problem::{gen_3colorable, gen_maxcut, to_couplings};
use oim_core::{GridTopology, MachineConfig, ProblemInstance, ProblemKind};

#[derive(Parser)]
#[command(
    name = "oim",
    version,
    about = "Bit-accurate oscillator Ising/Potts machine emulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random king's-graph instance.
    Generate(GenerateArgs),
    /// Run a batch of emulator runs on an instance and write JSON statistics.
    Solve(SolveArgs),
    /// Solve a small instance exactly.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Run the emulator and both float reference solvers on the same seeds.
    Compare(CompareArgs),
    /// Measure single-threaded emulator throughput.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Maxcut,
    Maxcutw,
    Color3,
}

impl From<KindArg> for ProblemKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Maxcut => ProblemKind::MaxCutUnweighted,
            KindArg::Maxcutw => ProblemKind::MaxCutWeighted,
            KindArg::Color3 => ProblemKind::Coloring3,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 20)]
    width: usize,
    #[arg(long, default_value_t = 20)]
    height: usize,
    /// Probability that each king's-graph edge is kept.
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MachineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_H_SHIFT)]
    h_shift: u32,
    /// Iteration at which sync injection turns on; defaults to iters/4.
    #[arg(long)]
    sync_start: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SYNC_AMP)]
    sync_amp: u8,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Best-known objective to normalize accuracy against.
    #[arg(long, conflicts_with = "oracle")]
    reference: Option<i64>,
    /// Use the brute-force optimum as the reference.
    #[arg(long)]
    oracle: bool,
    /// JSON output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    machine: MachineArgs,
    /// Write the per-iteration phases of run 0 as CSV.
    #[arg(long)]
    dump_trajectory: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    machine: MachineArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    width: usize,
    #[arg(long, default_value_t = 20)]
    height: usize,
    #[arg(long, default_value_t = DEFAULT_ITERS)]
    iters: usize,
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Oracle { graph } => oracle(&graph),
        Command::Compare(a) => {
            let (instance, config, reference) = prepare(&a.machine)?;
            let report = compare(&config, &instance, a.machine.runs, reference)?;
            emit_json(a.machine.out.as_deref(), &report)
        }
        Command::Bench(a) => run_bench(a),
    }
}

fn generate(a: GenerateArgs) -> anyhow::Result<()> {
    let grid = GridTopology::new(a.width, a.height)?;
    let text = match ProblemKind::from(a.kind) {
        ProblemKind::MaxCutUnweighted => {
            write_instance(&gen_maxcut(grid, false, a.density, a.seed)?)
        }
        ProblemKind::MaxCutWeighted => write_instance(&gen_maxcut(grid, true, a.density, a.seed)?),
        ProblemKind::Coloring3 => {
            let c = gen_3colorable(grid, a.density, a.seed)?;
            write_instance_with_comments(&c.instance, &[certificate_comment(&c.certificate)])
        }
    };
    match a.out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(Into::into),
    }
}

fn prepare(m: &MachineArgs) -> anyhow::Result<(ProblemInstance, MachineConfig, Option<Reference>)> {
    let instance =
        load_instance(&m.graph).with_context(|| format!("loading {}", m.graph.display()))?;
    let mut config =
        MachineConfig::new(*instance.grid(), mode_for(instance.kind())).with_seed(m.seed);
    config.total_iters = m.iters;
    config.h_shift = m.h_shift;
    config.sync_start = m.sync_start.unwrap_or(m.iters / 4);
    config.sync_amp = m.sync_amp;
    config.validate()?;
    if m.runs == 0 {
        bail!("--runs must be at least 1");
    }
    let reference = if m.oracle {
        Some(Reference::oracle(oracle_optimum(&instance)?))
    } else {
        m.reference.map(Reference::supplied)
    };
    Ok((instance, config, reference))
}

fn oracle_optimum(instance: &ProblemInstance) -> anyhow::Result<i64> {
    Ok(if instance.kind().is_maxcut() {
        brute_force_maxcut(instance)?.optimum
    } else {
        brute_force_coloring(instance)?.optimum
    })
}

fn solve(a: SolveArgs) -> anyhow::Result<()> {
    let (instance, config, reference) = prepare(&a.machine)?;
    if let Some(path) = &a.dump_trajectory {
        let emulator = Emulator::new(config, &to_couplings(&instance)?)?;
        let (_, trajectory) =
            emulator.run_from_recorded(init_random(&config.with_seed(run_seed(config.seed, 0))));
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        let mut out = BufWriter::new(file);
        trajectory.write_csv(&mut out)?;
        out.flush()?;
    }
    let stats = run_batch(&config, &instance, a.machine.runs, reference)?;
    emit_json(
        a.machine.out.as_deref(),
        &BatchReport::new(&instance, &config, stats),
    )
}

fn oracle(graph: &Path) -> anyhow::Result<()> {
    let instance = load_instance(graph).with_context(|| format!("loading {}", graph.display()))?;
    let (optimum, witness) = if instance.kind().is_maxcut() {
        let r = brute_force_maxcut(&instance)?;
        (r.optimum, join(r.witness.0.iter()))
    } else {
        let r = brute_force_coloring(&instance)?;
        (r.optimum, join(r.witness.0.iter()))
    };
    println!("optimum {optimum}");
    println!("witness {witness}");
    Ok(())
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn run_bench(a: BenchArgs) -> anyhow::Result<()> {
    let report = bench(a.width, a.height, a.iters, a.runs, a.seed)?;
    if a.json {
        return emit_json(None, &report);
    }
    println!(
        "grid {}x{} ({} edges), {} iterations x {} runs in {:.3} s",
        report.width, report.height, report.edges, report.iters, report.runs, report.wall_seconds
    );
    println!(
        "PE updates/s  {:>12.4e}  ({:.2e} of ASIC {:.1e})",
        report.pe_updates_per_second, report.pe_update_ratio, ASIC_PE_UPDATES_PER_SECOND
    );
    println!(
        "solutions/s   {:>12.4e}  ({:.2e} of ASIC {:.1e})",
        report.solutions_per_second,
        report.solutions_per_second / ASIC_SOLUTIONS_PER_SECOND,
        ASIC_SOLUTIONS_PER_SECOND
    );
    println!("checksum {:016x}", report.checksum);
    Ok(())
}

fn emit_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
