use oim_core::emulator::{
    init_random, readout_colors, readout_spins, Emulator, MachineConfig, MachineState, Mode,
};
use oim_core::fxp::Phase8;
use oim_core::grid::GridTopology;
use oim_core::oracle::{brute_force_coloring, brute_force_maxcut};
use oim_core::problem::{
    coloring_conflicts, cut_value, gen_3colorable, gen_maxcut, maxcut_to_couplings, to_couplings,
    ProblemInstance, ProblemKind,
};
use oim_core::reference::{Family, FloatIntegrator};
use oim_core::{CouplingStore, Weight8};
use proptest::prelude::*;

fn grid(w: usize, h: usize) -> GridTopology {
    GridTopology::new(w, h).unwrap()
}

#[test]
fn float_piecewise_tracks_emulator_on_a_pair() {
    let g = grid(2, 1);
    for w in [64i64, -64] {
        let inst = ProblemInstance::new(g, ProblemKind::MaxCutWeighted, [(0, 1, w)]).unwrap();
        for sync_start in [0, 5, 10] {
            let mut cfg = MachineConfig::new(g, Mode::Ising);
            cfg.total_iters = 10;
            cfg.sync_start = sync_start;
            let emu = Emulator::new(cfg, &maxcut_to_couplings(&inst).unwrap()).unwrap();
            let float = FloatIntegrator::new(cfg, &inst, Family::Piecewise).unwrap();
            for a in (0..=255u8).step_by(5) {
                for b in (0..=255u8).step_by(7) {
                    let mut s = MachineState::from_phases(vec![Phase8(a), Phase8(b)]);
                    let mut f: Vec<f64> = s.phases.iter().map(|p| p.turns()).collect();
                    for it in 0..10 {
                        s = emu.step(&s);
                        f = float.step(&f, it);
                        for (p, x) in s.phases.iter().zip(&f) {
                            let d = (p.turns() - x).rem_euclid(1.0);
                            let d = d.min(1.0 - d);
                            assert!(
                                d <= 2.0 / 256.0,
                                "w={w} start=({a},{b}) it={it}: {p} vs {x}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn emulator_never_beats_the_oracle() {
    let g = grid(4, 3);
    for seed in 0..8u64 {
        let inst = gen_maxcut(g, seed % 2 == 0, 0.7, seed).unwrap();
        let opt = brute_force_maxcut(&inst).unwrap().optimum;
        let emu = Emulator::new(
            MachineConfig::new(g, Mode::Ising),
            &to_couplings(&inst).unwrap(),
        )
        .unwrap();
        for run in 0..10 {
            let s = emu.run_from(init_random(&emu.config().with_seed(run)));
            assert!(cut_value(&inst, &readout_spins(&s)).unwrap() <= opt);
        }

        let col = gen_3colorable(g, 1.0, seed).unwrap().instance;
        let min = brute_force_coloring(&col).unwrap().optimum;
        let emu = Emulator::new(
            MachineConfig::new(g, Mode::Potts3),
            &to_couplings(&col).unwrap(),
        )
        .unwrap();
        for run in 0..10 {
            let s = emu.run_from(init_random(&emu.config().with_seed(run)));
            assert!(coloring_conflicts(&col, &readout_colors(&s)).unwrap() as i64 >= min);
        }
    }
}

#[test]
fn full_size_run_is_reproducible() {
    let g = grid(20, 20);
    let inst = gen_maxcut(g, true, 0.6, 42).unwrap();
    let cfg = MachineConfig::new(g, Mode::Ising).with_seed(9);
    let store = to_couplings(&inst).unwrap();
    let a = Emulator::new(cfg, &store).unwrap().run();
    let b = Emulator::new(cfg, &store).unwrap().run();
    assert_eq!(a, b);
    assert_eq!(a.iteration, 1000);
}

#[test]
fn recorded_run_has_every_row() {
    let g = grid(3, 3);
    let inst = gen_maxcut(g, false, 1.0, 1).unwrap();
    let mut cfg = MachineConfig::new(g, Mode::Ising).with_seed(2);
    cfg.total_iters = 40;
    cfg.sync_start = 10;
    let emu = Emulator::new(cfg, &to_couplings(&inst).unwrap()).unwrap();
    let (last, traj) = emu.run_recorded();
    assert_eq!(traj.rows.len(), 41);
    assert_eq!(traj.rows[0], init_random(&cfg).phases);
    assert_eq!(traj.rows[40], last.phases);
    assert_eq!(last, emu.run());
}

#[test]
fn isolated_ising_readout_is_stable_after_settling() {
    let g = grid(1, 1);
    let mut cfg = MachineConfig::new(g, Mode::Ising);
    cfg.sync_start = 0;
    let emu = Emulator::new(cfg, &CouplingStore::new(g)).unwrap();
    for start in 0..=255u8 {
        let mut s = MachineState::from_phases(vec![Phase8(start)]);
        emu.advance(&mut s, 64);
        let spin = readout_spins(&s);
        for _ in 0..200 {
            s = emu.step(&s);
            assert_eq!(readout_spins(&s), spin, "start {start:#04x}");
        }
    }
}

proptest! {
    #[test]
    fn uncoupled_boundary_nodes_are_fixed_without_sync(
        w in 2usize..7, h in 2usize..7, seed: u64, weights in proptest::collection::vec(-64i8..=64, 200)
    ) {
        let g = grid(w, h);
        // Couple only interior-to-interior pairs; boundary PEs see zero weights.
        let interior = |i: usize| {
            let (r, c) = g.coords(i);
            r > 0 && c > 0 && r + 1 < h && c + 1 < w
        };
        let mut store = CouplingStore::new(g);
        for (k, (i, j)) in g.edges().into_iter().enumerate() {
            if interior(i) && interior(j) {
                store.set(i, j, Weight8(weights[k % weights.len()])).unwrap();
            }
        }
        let mut cfg = MachineConfig::new(g, Mode::Ising).with_seed(seed);
        cfg.total_iters = 30;
        cfg.sync_start = 30;
        let emu = Emulator::new(cfg, &store).unwrap();
        let s0 = init_random(&cfg);
        let s1 = emu.run_from(s0.clone());
        for i in (0..g.nodes()).filter(|&i| !interior(i)) {
            prop_assert_eq!(s1.phases[i], s0.phases[i]);
        }
    }

    #[test]
    fn gradient_reads_only_incident_weights(seed: u64, node in 0usize..25) {
        let g = grid(5, 5);
        let inst = gen_maxcut(g, true, 1.0, seed).unwrap();
        let store = to_couplings(&inst).unwrap();
        let emu = Emulator::new(MachineConfig::new(g, Mode::Ising), &store).unwrap();
        let phases = init_random(&MachineConfig::new(g, Mode::Ising).with_seed(seed)).phases;
        let bound: i32 = g.neighbors(node).map(|k| i32::from(store.get(node, k).raw()).abs()).sum();
        prop_assert!(emu.pe_gradient(node, &phases, false).abs() <= bound);
    }
}
