mod common;

use std::sync::Arc;

use proptest::prelude::*;

use qss_core::attack::{
    attack_efficiency, expected_runtime, optimize_measurement_time, run_attack,
    strong_attack_efficiency, SearchInstance,
};
use qss_core::ec::{find_2ec, find_3ec, is_exceptional};
use qss_core::generators::{GraphModel, ModelParams};
use qss_core::sampling::{derive_seed, sample_connected};
use qss_core::stats::{wilson_interval, Z_95};
use qss_core::walk::{PairLayout, SearchRun, WalkOperator, WalkState};
use qss_core::{Graph, MarkedReflection, StochasticMatrix};

fn model() -> impl Strategy<Value = GraphModel> {
    prop::sample::select(GraphModel::ALL.to_vec())
}

fn reflection() -> impl Strategy<Value = MarkedReflection> {
    prop::sample::select(vec![
        MarkedReflection::PhaseFlip,
        MarkedReflection::Absorbing,
    ])
}

/// Connected model graph with `n` in the given range.
fn connected(model: GraphModel, n: usize, seed: u64) -> Arc<Graph> {
    Arc::new(
        sample_connected(&ModelParams::defaults(model), n, seed)
            .unwrap()
            .graph,
    )
}

fn pick_marked(n: usize, picks: &[usize]) -> Vec<usize> {
    let mut m: Vec<usize> = picks.iter().map(|p| p % n).collect();
    m.sort_unstable();
    m.dedup();
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_valid(model in model(), n in 4usize..120, seed: u64) {
        let g = ModelParams::defaults(model).generate(n, seed).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.vertex_count(), n);
        let degree_sum: usize = (0..n).map(|v| g.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
    }

    #[test]
    fn generation_is_deterministic(model in model(), n in 4usize..80, seed: u64) {
        let p = ModelParams::defaults(model);
        prop_assert_eq!(p.generate(n, seed).unwrap(), p.generate(n, seed).unwrap());
    }

    #[test]
    fn edge_list_round_trips(model in model(), n in 4usize..60, seed: u64) {
        let g = ModelParams::defaults(model).generate(n, seed).unwrap();
        prop_assert_eq!(Graph::parse_edge_list(&g.to_edge_list_string()).unwrap(), g);
    }

    #[test]
    fn uniform_matrix_is_stochastic(model in model(), n in 4usize..60, seed: u64) {
        let g = connected(model, n, seed);
        let p = StochasticMatrix::uniform(&g).unwrap();
        prop_assert!(p.check_support(&g).is_ok());
        for v in 0..n {
            let sum: f64 = p.column(v).iter().map(|&(_, x)| x).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_probability_is_marked_fraction(
        model in model(), n in 4usize..80, seed: u64,
        picks in prop::collection::vec(any::<usize>(), 1..6),
        reflection in reflection(),
    ) {
        let g = connected(model, n, seed);
        let marked = pick_marked(n, &picks);
        let p = StochasticMatrix::uniform(&g).unwrap();
        let run = SearchRun::new(&g, &p, &marked, reflection).unwrap();
        prop_assert!((run.success_probability() - marked.len() as f64 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn steps_preserve_norm_and_reflections_are_involutions(
        model in model(), n in 4usize..40, seed: u64,
        picks in prop::collection::vec(any::<usize>(), 1..4),
        raw in prop::collection::vec(-1.0f64..1.0, 1..2000),
        reflection in reflection(),
    ) {
        let g = connected(model, n, seed);
        let layout = PairLayout::new(Arc::clone(&g));
        let p = StochasticMatrix::uniform(&g).unwrap();
        let op = WalkOperator::search(&layout, &p, &pick_marked(n, &picks), reflection).unwrap();
        let mut amps: Vec<f64> = (0..layout.slot_count()).map(|i| raw[i % raw.len()] + 1e-3).collect();
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let state = WalkState::from_amplitudes(&layout, amps).unwrap();

        let mut s = state.clone();
        for _ in 0..5 {
            op.step(&mut s).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }
        let mut twice = state.clone();
        op.reflect_first(&mut twice).unwrap();
        op.reflect_first(&mut twice).unwrap();
        for (a, b) in twice.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let mut twice = state.clone();
        op.reflect_second(&mut twice).unwrap();
        op.reflect_second(&mut twice).unwrap();
        for (a, b) in twice.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sparse_walk_matches_dense_reference(
        model in model(), n in 4usize..8, seed: u64,
        picks in prop::collection::vec(any::<usize>(), 1..3),
        reflection in reflection(),
    ) {
        let g = connected(model, n, seed);
        let marked = pick_marked(n, &picks);
        let p = StochasticMatrix::uniform(&g).unwrap();
        let sparse = qss_core::walk::probability_trace(&g, &marked, &p, 12, reflection).unwrap();
        let dense = common::dense_trace(&g, &marked, reflection, 12);
        for (a, b) in sparse.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn enumerated_configurations_are_certified(model in model(), n in 6usize..60, seed: u64, v_pick: usize) {
        let g = connected(model, n, seed);
        let v = v_pick % n;
        let mut all = find_2ec(&g, v);
        all.extend(find_3ec(&g, v));
        for ec in &all {
            prop_assert!(ec.vertices.contains(&v));
            prop_assert_eq!(ec.anchor, v);
            prop_assert_eq!(ec.vertices.len(), if ec.kind.order() == qss_core::EcOrder::Two { 2 } else { 3 });
            prop_assert_eq!(is_exceptional(&g, &ec.vertices), Ok(true));
        }
    }

    #[test]
    fn is_exceptional_ignores_vertex_order(model in model(), n in 6usize..40, seed: u64, v_pick: usize) {
        let g = connected(model, n, seed);
        let v = v_pick % n;
        let nb = g.neighbors(v);
        if nb.len() >= 2 {
            let set = [v, nb[0], nb[1]];
            let rev = [nb[1], v, nb[0]];
            prop_assert_eq!(is_exceptional(&g, &set), is_exceptional(&g, &rev));
        }
    }

    #[test]
    fn identity_attack_has_zero_efficiency(model in model(), n in 8usize..80, seed: u64, v_pick: usize, t in 0usize..30) {
        let g = connected(model, n, seed);
        let base = SearchInstance::uniform(g, &[v_pick % n], t).unwrap();
        let same = base.clone();
        prop_assert_eq!(attack_efficiency(&base, &same).unwrap(), 0.0);
        let t_pen = (n as f64).ln().ceil() as usize;
        prop_assert!(strong_attack_efficiency(&base, &base.marked, t_pen).unwrap() <= 1e-12);
    }

    #[test]
    fn attack_reports_are_consistent(model in model(), n in 10usize..90, seed: u64, v_pick: usize) {
        let g = connected(model, n, seed);
        let v = v_pick % n;
        let Some(ec) = find_2ec(&g, v).into_iter().next() else { return Ok(()); };
        let p = StochasticMatrix::uniform(&g).unwrap();
        let t_pen = (n as f64).ln().ceil() as usize;
        let r = run_attack(&g, &p, &ec, t_pen, MarkedReflection::default()).unwrap();
        prop_assert!((r.efficiency - (1.0 - r.p_attacked / r.p_base)).abs() < 1e-12);
        prop_assert!(r.runtime_opt <= r.runtime_attacked);
        prop_assert!((r.runtime_base - expected_runtime(r.t_base, r.p_base, t_pen)).abs() < 1e-9);
        let base = optimize_measurement_time(&g, &[v], &p, t_pen, MarkedReflection::default()).unwrap();
        prop_assert_eq!(base.t, r.t_base);
        // The clean optimum never loses to the clean search at another time.
        let inst = SearchInstance::uniform(Arc::clone(&g), &[v], r.t_base + 1).unwrap();
        prop_assert!(inst.expected_runtime(t_pen).unwrap() >= r.runtime_base - 1e-9);
    }

    #[test]
    fn wilson_interval_brackets_the_estimate(trials in 1usize..500, frac in 0.0f64..=1.0) {
        let hits = (frac * trials as f64).round() as usize;
        let (lo, hi) = wilson_interval(hits, trials, Z_95);
        let p = hits as f64 / trials as f64;
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn derived_seeds_depend_on_every_path_element(root: u64, a: u64, b: u64) {
        prop_assume!(a != b);
        prop_assert_ne!(derive_seed(root, &[a]), derive_seed(root, &[b]));
        prop_assert_eq!(derive_seed(root, &[a, b]), derive_seed(root, &[a, b]));
    }
}
