mod common;

use injhom::catalog::{
    enumerate_reflexive_tournaments, named_target, transitive_tournament, Target, TargetName,
};
use injhom::digraph::{Direction, InjectivityMode, OrientedGraph};
use injhom::gadgets::AssetStore;
use injhom::reductions::*;
use injhom::solver::{decide, verify_colouring, Colouring, SolveOptions, SolveStatus};

fn store() -> AssetStore {
    AssetStore::new(AssetStore::bundled_dir())
}

fn solve(ri: &ReductionInstance) -> Option<Colouring> {
    let r = decide(&ri.graph, &ri.target, &SolveOptions::new(ri.mode)).unwrap();
    assert_ne!(r.status, SolveStatus::BudgetExhausted);
    let f = r.witnesses.into_iter().next()?;
    assert!(verify_colouring(&ri.graph, &ri.target, &f, ri.mode)
        .unwrap()
        .is_valid());
    Some(f)
}

#[test]
fn edge_reductions_agree_with_oracle_on_small_subcubic_graphs() {
    let store = store();
    for n in 1..=5 {
        for g in subcubic_graphs(n) {
            let expected = three_edge_colouring_oracle(&g).unwrap().is_some();
            for build in [build_ios_t4, build_iot_t4] {
                let ri = build(&g, &store).unwrap();
                let got = solve(&ri);
                assert_eq!(got.is_some(), expected, "{} on {}", ri.kind, g.to_text());
                if let Some(f) = got {
                    extract_edge_colouring(&ri, &f)
                        .unwrap()
                        .check_proper(&g)
                        .unwrap();
                }
            }
        }
    }
}

#[test]
fn k3_k4_petersen() {
    let store = store();
    for build in [build_ios_t4, build_iot_t4] {
        let k3 = build(&UndirectedGraph::complete(3), &store).unwrap();
        assert!(solve(&k3).is_some());
        let k4 = build(&UndirectedGraph::complete(4), &store).unwrap();
        assert!(solve(&k4).is_some());
        let petersen = build(&UndirectedGraph::petersen(), &store).unwrap();
        assert!(solve(&petersen).is_none(), "{}", petersen.kind);
    }
}

#[test]
fn degree_four_is_rejected() {
    let star = UndirectedGraph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
    assert!(matches!(
        build_ios_t4(&star, &store()),
        Err(ReductionError::DegreeTooHigh {
            vertex: 0,
            degree: 4
        })
    ));
}

#[test]
fn edge_lift_and_extract_round_trip() {
    let store = store();
    let g = UndirectedGraph::complete(4);
    let base = three_edge_colouring_oracle(&g).unwrap().unwrap();
    for build in [build_ios_t4, build_iot_t4] {
        let ri = build(&g, &store).unwrap();
        let f = lift_colouring(&ri, &BaseSolution::Edges(base.clone())).unwrap();
        assert!(verify_colouring(&ri.graph, &ri.target, &f, ri.mode)
            .unwrap()
            .is_valid());
        assert_eq!(extract_edge_colouring(&ri, &f).unwrap(), base);
        let bad = EdgeColouring {
            colours: vec![1; 6],
        };
        assert!(matches!(
            lift_colouring(&ri, &BaseSolution::Edges(bad)),
            Err(ReductionError::InvalidBase(_))
        ));
    }
}

#[test]
fn mismatched_ports_are_reported() {
    let g = UndirectedGraph::new(2, [(0, 1)]).unwrap();
    let ri = build_ios_t4(&g, &store()).unwrap();
    let mut f = solve(&ri).unwrap().as_total().unwrap();
    let right = ri.scope.get("e0", "right").unwrap();
    f[right] = if f[right] == 1 { 2 } else { 1 };
    assert!(matches!(
        extract_edge_colouring(&ri, &Colouring::total(f)),
        Err(ReductionError::PortColourMismatch { edge: 0, .. })
    ));
}

fn small_sources() -> Vec<OrientedGraph> {
    let mut out = vec![
        OrientedGraph::empty(1),
        OrientedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap(),
        OrientedGraph::from_arcs(3, [(0, 1), (0, 2)]).unwrap(),
        OrientedGraph::from_arcs(4, [(0, 1), (0, 2), (0, 3)]).unwrap(),
        OrientedGraph::from_arcs(2, [(0, 0), (0, 1)]).unwrap(),
    ];
    for seed in 0..12 {
        out.push(common::random_oriented(
            2 + (seed as usize % 4),
            0.6,
            0.15,
            seed,
        ));
    }
    out
}

#[test]
fn ring_reductions_agree_with_brute_force() {
    let store = store();
    let c3 = named_target(TargetName::C3);
    for g in small_sources() {
        for (build, mode) in [
            (
                build_ios_t5 as fn(&_, &_) -> _,
                InjectivityMode::IosSeparate,
            ),
            (build_iot_t5, InjectivityMode::IotTogether),
        ] {
            let expected = common::has_colouring(&g, c3.graph(), mode);
            let ri = build(&g, &store).unwrap();
            let got = solve(&ri);
            assert_eq!(
                got.is_some(),
                expected,
                "{} on {:?}",
                ri.kind,
                g.arcs().collect::<Vec<_>>()
            );
            if let Some(f) = got {
                let inner = extract_inner_colouring(&ri, &f).unwrap();
                assert!(verify_colouring(&g, &c3, &inner, mode).unwrap().is_valid());
                let lifted = lift_colouring(&ri, &BaseSolution::Vertices(inner.clone())).unwrap();
                assert_eq!(extract_inner_colouring(&ri, &lifted).unwrap(), inner);
            }
        }
    }
}

#[test]
fn ring_padding() {
    let store = store();
    let one = OrientedGraph::empty(1);
    let ri = build_ios_t5(&one, &store).unwrap();
    assert_eq!(ri.inner.len(), 2);
    assert_eq!(ri.graph.vertex_count(), 2 * 20 + 2);
    assert!(ri.map_text().contains("padding.1="));
    let ri = build_iot_t5(&OrientedGraph::empty(0), &store).unwrap();
    assert_eq!(ri.graph.vertex_count(), 2 * 10 + 2);
}

/// Every (tournament, pivot, direction) on five vertices that admits a
/// collapse, plus one six-vertex case with a five-vertex subtournament.
fn collapse_cases() -> Vec<(Target, usize, Direction)> {
    let mut out = Vec::new();
    for t in enumerate_reflexive_tournaments(5).unwrap() {
        for v in 0..5 {
            for dir in [Direction::Out, Direction::In] {
                if collapse_target(&t, v, dir).is_ok() {
                    out.push((t.clone(), v, dir));
                }
            }
        }
    }
    out.push((transitive_tournament(6), 0, Direction::Out));
    out
}

#[test]
fn collapse_reductions_agree_with_brute_force() {
    let sources = small_sources();
    let cases = collapse_cases();
    assert!(cases.len() > 4);
    for (ci, (t, v, dir)) in cases.iter().enumerate() {
        let sub = collapse_target(t, *v, *dir).unwrap();
        assert!(sub.target.is_reflexive_tournament());
        for (gi, g) in sources
            .iter()
            .enumerate()
            .filter(|(gi, _)| (gi + ci) % 3 == 0)
        {
            for (build, mode) in [
                (
                    build_ios_collapse as fn(&_, &_, _, _) -> _,
                    InjectivityMode::IosSeparate,
                ),
                (build_iot_collapse, InjectivityMode::IotTogether),
            ] {
                let expected = common::has_colouring(g, sub.target.graph(), mode);
                let ri = build(g, t, *v, *dir).unwrap();
                let got = solve(&ri);
                assert_eq!(
                    got.is_some(),
                    expected,
                    "{} {} pivot {v} {dir:?} source {gi}",
                    ri.kind,
                    t.name()
                );
                if let Some(f) = got {
                    let inner = extract_inner_colouring(&ri, &f).unwrap();
                    assert!(verify_colouring(g, &sub.target, &inner, mode)
                        .unwrap()
                        .is_valid());
                    let lifted =
                        lift_colouring(&ri, &BaseSolution::Vertices(inner.clone())).unwrap();
                    assert_eq!(extract_inner_colouring(&ri, &lifted).unwrap(), inner);
                }
            }
        }
    }
}

#[test]
fn collapse_rejects_small_pivots() {
    let t4 = named_target(TargetName::T4);
    for v in 0..4 {
        for dir in [Direction::Out, Direction::In] {
            assert!(matches!(
                build_ios_collapse(&OrientedGraph::empty(1), &t4, v, dir),
                Err(ReductionError::DegreeTooLow { .. })
            ));
        }
    }
}

#[test]
fn map_sidecar_is_deterministic() {
    let g = UndirectedGraph::complete(3);
    let a = build_iot_t4(&g, &store()).unwrap().map_text();
    let b = build_iot_t4(&g, &store()).unwrap().map_text();
    assert_eq!(a, b);
    assert!(a.starts_with("kind=iot-t4\n"));
    assert_eq!(a.lines().filter(|l| l.starts_with("ident.")).count(), 6);
}

/// Class counts by a naive oracle: canonical edge lists over all vertex
/// permutations.
#[test]
fn subcubic_classes_match_naive_count() {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    for n in 1..=6 {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let all = perms(n);
        let mut classes = std::collections::BTreeSet::new();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            let mut deg = vec![0; n];
            for &(u, v) in &edges {
                deg[u] += 1;
                deg[v] += 1;
            }
            if deg.iter().any(|&d| d > 3) {
                continue;
            }
            let canon = all
                .iter()
                .map(|p| {
                    let mut e: Vec<(usize, usize)> = edges
                        .iter()
                        .map(|&(u, v)| (p[u].min(p[v]), p[u].max(p[v])))
                        .collect();
                    e.sort();
                    e
                })
                .min()
                .unwrap();
            classes.insert(canon);
        }
        assert_eq!(subcubic_graphs(n).len(), classes.len(), "n = {n}");
    }
}

#[test]
fn edge_reductions_on_larger_random_subcubic_graphs() {
    use rand::{seq::SliceRandom, SeedableRng};
    let store = store();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for round in 0..12 {
        let n = 8 + round % 3;
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        pairs.shuffle(&mut rng);
        let mut deg = vec![0; n];
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if deg[u] < 3 && deg[v] < 3 {
                deg[u] += 1;
                deg[v] += 1;
                edges.push((u, v));
            }
        }
        let g = UndirectedGraph::new(n, edges).unwrap();
        let expected = three_edge_colouring_oracle(&g).unwrap().is_some();
        for build in [build_ios_t4, build_iot_t4] {
            let ri = build(&g, &store).unwrap();
            assert_eq!(
                solve(&ri).is_some(),
                expected,
                "{} on {}",
                ri.kind,
                g.to_text()
            );
        }
    }
}

#[test]
fn builders_are_deterministic() {
    use injhom::digraph::serialize_graph;
    let store = store();
    let g = UndirectedGraph::complete(4);
    let og = OrientedGraph::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
    let tt5 = transitive_tournament(5);
    let builds: Vec<Box<dyn Fn() -> ReductionInstance>> = vec![
        Box::new(|| build_ios_t4(&g, &store).unwrap()),
        Box::new(|| build_iot_t4(&g, &store).unwrap()),
        Box::new(|| build_ios_t5(&og, &store).unwrap()),
        Box::new(|| build_iot_t5(&og, &store).unwrap()),
        Box::new(|| build_ios_collapse(&og, &tt5, 0, Direction::Out).unwrap()),
        Box::new(|| build_iot_collapse(&og, &tt5, 4, Direction::In).unwrap()),
    ];
    for build in builds {
        let (a, b) = (build(), build());
        assert_eq!(serialize_graph(&a.graph), serialize_graph(&b.graph));
        assert_eq!(a.map_text(), b.map_text());
    }
}
