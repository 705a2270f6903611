mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use injhom::catalog::{
    enumerate_reflexive_tournaments, named_target, transitive_tournament, Target, TargetName,
};
use injhom::digraph::{
    disjoint_union, identify_vertices, parse_document, serialize_document, Direction,
    InjectivityMode, OrientedGraph,
};
use injhom::poly::decide_small_target;
use injhom::solver::{
    decide, enumerate, enumerate_mod_aut, verify_colouring, SolveOptions, SolveStatus,
};
use injhom::twosat::{Lit, TwoSatInstance};

fn graph_from_codes(n: usize, codes: &[u8], loops: &[bool]) -> OrientedGraph {
    let mut arcs = Vec::new();
    let mut k = 0;
    for (u, &has_loop) in loops.iter().enumerate().take(n) {
        if has_loop {
            arcs.push((u, u));
        }
        for v in u + 1..n {
            match codes[k] % 3 {
                1 => arcs.push((u, v)),
                2 => arcs.push((v, u)),
                _ => {}
            }
            k += 1;
        }
    }
    OrientedGraph::from_arcs(n, arcs).unwrap()
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = OrientedGraph> {
    (0..=max_n).prop_flat_map(|n| {
        let pairs = n * n.saturating_sub(1) / 2;
        (
            Just(n),
            proptest::collection::vec(0u8..3, pairs),
            proptest::collection::vec(proptest::bool::weighted(0.2), n),
        )
            .prop_map(|(n, codes, loops)| graph_from_codes(n, &codes, &loops))
    })
}

fn arb_mode() -> impl Strategy<Value = InjectivityMode> {
    prop::sample::select(InjectivityMode::ALL.to_vec())
}

fn arb_target() -> impl Strategy<Value = Target> {
    let mut targets = vec![
        named_target(TargetName::C3),
        named_target(TargetName::TT3),
        named_target(TargetName::T4),
        named_target(TargetName::T5),
    ];
    targets.extend(enumerate_reflexive_tournaments(4).unwrap());
    prop::sample::select(targets)
}

fn witness_set(g: &OrientedGraph, t: &Target, mode: InjectivityMode) -> Vec<Vec<usize>> {
    let r = enumerate(g, t, &SolveOptions::new(mode)).unwrap();
    assert_ne!(r.status, SolveStatus::BudgetExhausted);
    r.witnesses.iter().map(|w| w.as_total().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn loops_sit_in_both_neighbourhoods(g in arb_graph(7)) {
        for v in 0..g.vertex_count() {
            let ins = g.members(v, Direction::In).contains(&v);
            let outs = g.members(v, Direction::Out).contains(&v);
            prop_assert_eq!(g.has_loop(v), ins);
            prop_assert_eq!(ins, outs);
        }
    }

    #[test]
    fn serialize_parse_round_trip(g in arb_graph(7), port in 0usize..7) {
        let mut ports = BTreeMap::new();
        if port < g.vertex_count() {
            ports.insert("p".to_string(), port);
        }
        let text = serialize_document(&g, &ports);
        let doc = parse_document(&text).unwrap();
        prop_assert_eq!(&doc.graph, &g);
        prop_assert_eq!(&doc.ports, &ports);
        prop_assert_eq!(serialize_document(&doc.graph, &doc.ports), text);
    }

    #[test]
    fn union_is_additive(a in arb_graph(5), b in arb_graph(5)) {
        let (u, offsets) = disjoint_union(&[&a, &b]);
        prop_assert_eq!(u.vertex_count(), a.vertex_count() + b.vertex_count());
        prop_assert_eq!(u.arc_count(), a.arc_count() + b.arc_count());
        prop_assert_eq!(offsets, vec![0, a.vertex_count()]);
    }

    #[test]
    fn identification_never_leaves_a_digon(g in arb_graph(6), pairs in proptest::collection::vec((0usize..6, 0usize..6), 1..3)) {
        let n = g.vertex_count();
        let merges: Vec<(usize, usize)> = pairs.into_iter().filter(|&(a, b)| a < n && b < n && a != b).collect();
        let mut used = BTreeSet::new();
        let merges: Vec<_> = merges.into_iter().filter(|&(a, b)| used.insert(a) && used.insert(b)).collect();
        if let Ok((h, map)) = identify_vertices(&g, &merges) {
            prop_assert_eq!(h.vertex_count(), n - merges.len());
            prop_assert_eq!(map.len(), n);
            for (u, v) in h.arcs() {
                prop_assert!(u == v || !h.has_arc(v, u));
            }
        }
    }

    #[test]
    fn decide_and_enumerate_match_brute_force(g in arb_graph(5), t in arb_target(), mode in arb_mode()) {
        let expected = common::all_colourings(&g, t.graph(), mode);
        prop_assert_eq!(witness_set(&g, &t, mode), expected.clone());
        let r = decide(&g, &t, &SolveOptions::new(mode)).unwrap();
        prop_assert_eq!(r.is_sat(), !expected.is_empty());
        for w in &r.witnesses {
            prop_assert!(expected.contains(&w.as_total().unwrap()));
        }
    }

    #[test]
    fn modes_are_nested(g in arb_graph(6), t in arb_target()) {
        let in_only: BTreeSet<_> = witness_set(&g, &t, InjectivityMode::InOnly).into_iter().collect();
        let ios: BTreeSet<_> = witness_set(&g, &t, InjectivityMode::IosSeparate).into_iter().collect();
        let iot: BTreeSet<_> = witness_set(&g, &t, InjectivityMode::IotTogether).into_iter().collect();
        prop_assert!(iot.is_subset(&ios));
        prop_assert!(ios.is_subset(&in_only));
    }

    #[test]
    fn witnesses_are_closed_under_automorphisms(g in arb_graph(6), t in arb_target(), mode in arb_mode()) {
        let set: BTreeSet<_> = witness_set(&g, &t, mode).into_iter().collect();
        for w in &set {
            for p in t.automorphisms().unwrap() {
                let moved: Vec<usize> = w.iter().map(|&c| p[c]).collect();
                prop_assert!(set.contains(&moved));
            }
        }
        let reps = enumerate_mod_aut(&g, &t, &SolveOptions::new(mode)).unwrap();
        prop_assert_eq!(reps.orbit_sizes.iter().sum::<usize>(), set.len());
    }

    #[test]
    fn enumeration_is_deterministic(g in arb_graph(6), t in arb_target(), mode in arb_mode()) {
        let a = witness_set(&g, &t, mode);
        prop_assert_eq!(&a, &witness_set(&g, &t, mode));
        let mut sorted = a.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(a, sorted);
    }

    #[test]
    fn relabelling_the_instance_relabels_witnesses(g in arb_graph(5), t in arb_target(), mode in arb_mode(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = g.permuted(&perm);
        let moved: BTreeSet<Vec<usize>> = witness_set(&g, &t, mode)
            .into_iter()
            .map(|w| {
                let mut out = vec![0; n];
                for v in 0..n {
                    out[perm[v]] = w[v];
                }
                out
            })
            .collect();
        let direct: BTreeSet<_> = witness_set(&h, &t, mode).into_iter().collect();
        prop_assert_eq!(moved, direct);
    }

    #[test]
    fn small_targets_agree_with_search(g in arb_graph(10), mode in arb_mode(), k in 1usize..=2) {
        let t = transitive_tournament(k);
        let poly = decide_small_target(&g, &t, mode).unwrap();
        let search = decide(&g, &t, &SolveOptions::new(mode)).unwrap();
        prop_assert_eq!(poly.is_sat(), search.is_sat());
        if let injhom::poly::SmallTargetAnswer::Sat(f) = poly {
            prop_assert!(verify_colouring(&g, &t, &f, mode).unwrap().is_valid());
        }
    }

    #[test]
    fn two_sat_matches_truth_tables(vars in 1usize..7, raw in proptest::collection::vec((0usize..7, any::<bool>(), 0usize..7, any::<bool>()), 0..14)) {
        let mut ins = TwoSatInstance::new(vars);
        for (a, pa, b, pb) in raw {
            ins.add_clause(Lit { var: a % vars, positive: pa }, Lit { var: b % vars, positive: pb });
        }
        let any_model = (0..1u32 << vars).any(|bits| {
            let model: Vec<bool> = (0..vars).map(|i| bits >> i & 1 == 1).collect();
            ins.is_satisfied_by(&model)
        });
        match ins.solve() {
            Some(model) => prop_assert!(ins.is_satisfied_by(&model)),
            None => prop_assert!(!any_model),
        }
    }
}

#[test]
fn reflexive_tournament_degree_sums() {
    for n in 1..=6 {
        for t in enumerate_reflexive_tournaments(n).unwrap() {
            let g = t.graph();
            let strict: usize = (0..n).map(|v| g.out_degree(v) - 1).sum();
            assert_eq!(strict, n * (n - 1) / 2);
            for v in 0..n {
                assert_eq!(g.in_degree(v) + g.out_degree(v), n + 1);
            }
            for p in t.automorphisms().unwrap() {
                let moved: BTreeSet<_> = g.arcs().map(|(u, v)| (p[u], p[v])).collect();
                assert_eq!(moved, g.arcs().collect::<BTreeSet<_>>());
            }
        }
    }
}

#[test]
fn four_and_five_vertex_targets_without_a_degree_four_vertex() {
    let low = |t: &Target| {
        (0..t.vertex_count()).all(|v| t.graph().out_degree(v) < 4 && t.graph().in_degree(v) < 4)
    };
    for (n, named) in [(4, TargetName::T4), (5, TargetName::T5)] {
        let found: Vec<Target> = enumerate_reflexive_tournaments(n)
            .unwrap()
            .into_iter()
            .filter(low)
            .collect();
        assert_eq!(found.len(), 1);
        assert_eq!(
            found[0].canonical_form().unwrap(),
            named_target(named).canonical_form().unwrap()
        );
    }
}

/// Node growth of the two-colour decider stays near linear: each tenfold
/// size step must cost well under a hundredfold in time.
#[test]
fn small_target_size_ladder() {
    use rand::{Rng, SeedableRng};
    let t = transitive_tournament(2);
    let mut times = Vec::new();
    for n in [1_000, 3_000, 10_000] {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(n as u64);
        // Sparse paths keep most instances satisfiable, so the 2-SAT stage runs.
        let arcs: Vec<(usize, usize)> = (0..n - 1)
            .filter(|_| rng.gen_bool(0.9))
            .map(|i| (i, i + 1))
            .collect();
        let g = OrientedGraph::from_arcs(n, arcs).unwrap();
        let start = std::time::Instant::now();
        for mode in InjectivityMode::ALL {
            decide_small_target(&g, &t, mode).unwrap();
        }
        times.push(start.elapsed().as_secs_f64().max(1e-4));
    }
    println!("ladder seconds: {times:?}");
    assert!(times[2] / times[0] < 100.0, "{times:?}");
}
