//! The acceptance battery: eleven checks, each with a pinned time limit,
//! run by `injhom selfcheck` and by the `acceptance` test target.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{
    enumerate_reflexive_tournaments, enumerate_reflexive_tournaments_exhaustive, named_target,
    transitive_tournament, Target, TargetName,
};
use crate::digraph::{Direction, InjectivityMode, OrientedGraph};
use crate::gadgets::{all_cases, AssetStore, DEFAULT_VERIFY_BUDGET};
use crate::poly::decide_small_target;
use crate::reductions::{
    build_ios_collapse, build_ios_t4, build_ios_t5, build_iot_collapse, build_iot_t4, build_iot_t5,
    collapse_target, extract_edge_colouring, extract_inner_colouring, lift_colouring,
    subcubic_graphs, three_edge_colouring_oracle, BaseSolution, EdgeColouring, ReductionInstance,
    UndirectedGraph, EDGE_COLOURS,
};
use crate::solver::{decide, enumerate, verify_colouring, Colouring, SolveOptions, SolveStatus};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone)]
pub struct SelfcheckConfig {
    /// Smaller batteries, all on at most six vertices.
    pub quick: bool,
    pub seed: u64,
    pub store: AssetStore,
}

impl SelfcheckConfig {
    pub fn new(store: AssetStore) -> Self {
        SelfcheckConfig {
            quick: false,
            seed: DEFAULT_SEED,
            store,
        }
    }
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub limit: Duration,
    run: fn(&SelfcheckConfig) -> Result<String, String>,
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "catalog-counts",
        limit: Duration::from_secs(5),
        run: catalog_counts,
    },
    Criterion {
        id: 2,
        name: "uniqueness-facts",
        limit: Duration::from_secs(30),
        run: uniqueness_facts,
    },
    Criterion {
        id: 3,
        name: "t5-automorphisms",
        limit: Duration::from_secs(1),
        run: t5_automorphisms,
    },
    Criterion {
        id: 4,
        name: "solver-oracle-equivalence",
        limit: Duration::from_secs(600),
        run: solver_oracle,
    },
    Criterion {
        id: 5,
        name: "mode-monotonicity",
        limit: Duration::from_secs(600),
        run: mode_monotonicity,
    },
    Criterion {
        id: 6,
        name: "gadget-contracts",
        limit: Duration::from_secs(600),
        run: gadget_contracts,
    },
    Criterion {
        id: 7,
        name: "edge-colouring-reductions",
        limit: Duration::from_secs(1800),
        run: edge_reductions,
    },
    Criterion {
        id: 8,
        name: "c3-ring-reductions",
        limit: Duration::from_secs(1200),
        run: ring_reductions,
    },
    Criterion {
        id: 9,
        name: "collapse-reductions",
        limit: Duration::from_secs(1200),
        run: collapse_reductions,
    },
    Criterion {
        id: 10,
        name: "small-target-agreement",
        limit: Duration::from_secs(120),
        run: poly_agreement,
    },
    Criterion {
        id: 11,
        name: "lift-extract-round-trips",
        limit: Duration::from_secs(300),
        run: round_trips,
    },
];

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<26} {:>8.2}s / {}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

pub fn run_criterion(c: &Criterion, config: &SelfcheckConfig) -> CriterionReport {
    let start = Instant::now();
    let outcome = (c.run)(config);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > c.limit {
        passed = false;
        detail = format!("over time limit; {detail}");
    }
    CriterionReport {
        id: c.id,
        name: c.name,
        passed,
        detail,
        elapsed,
        limit: c.limit,
    }
}

pub fn run_all(config: &SelfcheckConfig) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c, config)).collect()
}

/// Brute-force reference: tries every map `V(g) -> V(t)` and keeps the
/// valid ones, in lexicographic order. Neighbourhoods are read straight off
/// the arc list.
pub fn brute_force_colourings(
    g: &OrientedGraph,
    t: &OrientedGraph,
    mode: InjectivityMode,
) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let k = t.vertex_count();
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let adj: Vec<bool> = (0..k * k).map(|i| t.has_arc(i / k, i % k)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for w in 0..n {
        let ins: Vec<usize> = arcs.iter().filter(|a| a.1 == w).map(|a| a.0).collect();
        let outs: Vec<usize> = arcs.iter().filter(|a| a.0 == w).map(|a| a.1).collect();
        match mode {
            InjectivityMode::InOnly => groups.push(ins),
            InjectivityMode::IosSeparate => {
                groups.push(ins);
                groups.push(outs);
            }
            InjectivityMode::IotTogether => {
                let all: BTreeSet<usize> = ins.into_iter().chain(outs).collect();
                groups.push(all.into_iter().collect());
            }
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut f = vec![0usize; n];
    'maps: loop {
        let valid = arcs.iter().all(|&(u, v)| adj[f[u] * k + f[v]])
            && groups.iter().all(|grp| {
                grp.iter()
                    .enumerate()
                    .all(|(i, &x)| grp[..i].iter().all(|&y| f[x] != f[y]))
            });
        if valid {
            out.push(f.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                break 'maps;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < k {
                break;
            }
            f[i] = 0;
        }
    }
    out
}

/// Every labelled oriented graph on `n` vertices, loops included.
pub fn all_oriented_graphs(n: usize) -> Vec<OrientedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let orientations = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::with_capacity(orientations << n);
    for code in 0..orientations {
        let mut c = code;
        let mut arcs = Vec::new();
        for &(u, v) in &pairs {
            match c % 3 {
                1 => arcs.push((u, v)),
                2 => arcs.push((v, u)),
                _ => {}
            }
            c /= 3;
        }
        for loops in 0..1usize << n {
            let all = arcs
                .iter()
                .copied()
                .chain((0..n).filter(|i| loops >> i & 1 == 1).map(|i| (i, i)));
            out.push(OrientedGraph::from_arcs(n, all).expect("one arc per pair"));
        }
    }
    out
}

/// Each unordered pair gets an arc with probability `p` in a random
/// direction; each vertex a loop with probability `loops`.
pub fn random_oriented(n: usize, p: f64, loops: f64, rng: &mut impl Rng) -> OrientedGraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        if rng.gen_bool(loops) {
            arcs.push((u, u));
        }
        for v in u + 1..n {
            if rng.gen_bool(p) {
                arcs.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
            }
        }
    }
    OrientedGraph::from_arcs(n, arcs).expect("one arc per pair")
}

fn text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn describe(g: &OrientedGraph) -> String {
    format!(
        "n={} arcs={:?}",
        g.vertex_count(),
        g.arcs().collect::<Vec<_>>()
    )
}

fn solver_battery(config: &SelfcheckConfig) -> Vec<OrientedGraph> {
    let mut graphs: Vec<OrientedGraph> = (0..=4).flat_map(all_oriented_graphs).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let random = if config.quick { 50 } else { 200 };
    for _ in 0..random {
        let n = rng.gen_range(5..=6);
        graphs.push(random_oriented(n, 0.5, 0.2, &mut rng));
    }
    graphs
}

fn battery_targets() -> Vec<Target> {
    vec![
        named_target(TargetName::C3),
        named_target(TargetName::TT3),
        named_target(TargetName::T4),
        named_target(TargetName::T5),
    ]
}

fn solver_sets(
    g: &OrientedGraph,
    t: &Target,
    mode: InjectivityMode,
) -> Result<Vec<Vec<usize>>, String> {
    let r = enumerate(g, t, &SolveOptions::new(mode)).map_err(text)?;
    if r.status == SolveStatus::BudgetExhausted {
        return Err(format!("budget exhausted on {}", describe(g)));
    }
    r.witnesses
        .iter()
        .map(|w| w.as_total().map_err(text))
        .collect()
}

fn catalog_counts(_: &SelfcheckConfig) -> Result<String, String> {
    let counts: Vec<usize> = (1..=5)
        .map(|n| enumerate_reflexive_tournaments(n).map(|v| v.len()))
        .collect::<Result<_, _>>()
        .map_err(text)?;
    let exhaustive: Vec<usize> = (1..=5)
        .map(|n| enumerate_reflexive_tournaments_exhaustive(n).map(|v| v.len()))
        .collect::<Result<_, _>>()
        .map_err(text)?;
    let detail = format!("counts {counts:?}, 4+5 = {}", counts[3] + counts[4]);
    if counts != [1, 1, 2, 4, 12] || counts[3] + counts[4] != 16 || exhaustive != counts {
        return Err(format!("{detail}; exhaustive {exhaustive:?}"));
    }
    Ok(detail)
}

fn uniqueness_facts(_: &SelfcheckConfig) -> Result<String, String> {
    let key = |t: &Target| t.canonical_form().map_err(text);
    let four = enumerate_reflexive_tournaments(4).map_err(text)?;
    let strong: Vec<&Target> = four
        .iter()
        .filter(|t| t.graph().is_strongly_connected())
        .collect();
    if strong.len() != 1 || key(strong[0])? != key(&named_target(TargetName::T4))? {
        return Err(format!("{} strongly connected on 4 vertices", strong.len()));
    }
    let five = enumerate_reflexive_tournaments(5).map_err(text)?;
    let regular: Vec<&Target> = five
        .iter()
        .filter(|t| (0..5).all(|v| t.graph().out_degree(v) == 3 && t.graph().in_degree(v) == 3))
        .collect();
    if regular.len() != 1 || key(regular[0])? != key(&named_target(TargetName::T5))? {
        return Err(format!("{} regular on 5 vertices", regular.len()));
    }
    let six = enumerate_reflexive_tournaments(6).map_err(text)?;
    let big = six
        .iter()
        .filter(|t| (0..6).any(|v| t.graph().out_degree(v) >= 4 || t.graph().in_degree(v) >= 4))
        .count();
    if six.len() != 56 || big != 56 {
        return Err(format!(
            "{big} of {} six-vertex tournaments have a degree-4 vertex",
            six.len()
        ));
    }
    Ok("T4 unique strong, T5 unique regular, 56/56 six-vertex with degree >= 4".into())
}

fn t5_automorphisms(_: &SelfcheckConfig) -> Result<String, String> {
    let t5 = named_target(TargetName::T5);
    let auts = t5.automorphisms().map_err(text)?;
    let transitive = t5.is_vertex_transitive().map_err(text)?;
    let a_to_c = auts.iter().any(|p| p[0] == 2 && p[2] == 4);
    if auts.len() != 5 || !transitive || !a_to_c {
        return Err(format!(
            "|Aut|={} transitive={transitive} a->c,c->e={a_to_c}",
            auts.len()
        ));
    }
    Ok("|Aut(T5)| = 5, vertex-transitive, a->c and c->e present".into())
}

fn solver_oracle(config: &SelfcheckConfig) -> Result<String, String> {
    let graphs = solver_battery(config);
    let targets = battery_targets();
    let mut checked = 0;
    for g in &graphs {
        for t in &targets {
            for mode in InjectivityMode::ALL {
                let expected = brute_force_colourings(g, t.graph(), mode);
                let sets = solver_sets(g, t, mode)?;
                let sat = decide(g, t, &SolveOptions::new(mode)).map_err(text)?;
                if sat.status == SolveStatus::BudgetExhausted {
                    return Err(format!("budget exhausted on {}", describe(g)));
                }
                if sat.is_sat() != !expected.is_empty() || sets != expected {
                    return Err(format!(
                        "{} {} {}: mismatch",
                        t.name(),
                        mode.short_name(),
                        describe(g)
                    ));
                }
                if let Some(w) = sat.witnesses.first() {
                    if !expected.contains(&w.as_total().map_err(text)?) {
                        return Err(format!("invalid witness on {}", describe(g)));
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{} graphs, {checked} (graph, target, mode) cases",
        graphs.len()
    ))
}

fn mode_monotonicity(config: &SelfcheckConfig) -> Result<String, String> {
    let graphs = solver_battery(config);
    let targets = battery_targets();
    for g in &graphs {
        for t in &targets {
            let in_only: BTreeSet<_> = solver_sets(g, t, InjectivityMode::InOnly)?
                .into_iter()
                .collect();
            let ios: BTreeSet<_> = solver_sets(g, t, InjectivityMode::IosSeparate)?
                .into_iter()
                .collect();
            let iot: BTreeSet<_> = solver_sets(g, t, InjectivityMode::IotTogether)?
                .into_iter()
                .collect();
            if !iot.is_subset(&ios) || !ios.is_subset(&in_only) {
                return Err(format!("{} {}", t.name(), describe(g)));
            }
        }
    }
    Ok(format!(
        "iot <= ios <= in on {} graphs x 4 targets",
        graphs.len()
    ))
}

fn gadget_contracts(config: &SelfcheckConfig) -> Result<String, String> {
    let cases = all_cases(&config.store).map_err(text)?;
    let mut failed = Vec::new();
    for case in &cases {
        match case.verify(Some(DEFAULT_VERIFY_BUDGET)) {
            Ok(r) if r.passed() => {}
            Ok(r) => {
                let bad: Vec<String> = r
                    .facts
                    .iter()
                    .filter(|f| !matches!(f.outcome, crate::gadgets::FactOutcome::Pass))
                    .map(|f| f.fact.to_string())
                    .collect();
                failed.push(format!("{} [{}]", r.id, bad.join("; ")));
            }
            Err(e) => failed.push(format!("{}: {e}", case.id)),
        }
    }
    if failed.is_empty() {
        Ok(format!("{} contracts pass", cases.len()))
    } else {
        Err(format!("failed: {}", failed.join(", ")))
    }
}

fn solve_instance(ri: &ReductionInstance) -> Result<Option<Colouring>, String> {
    let r = decide(&ri.graph, &ri.target, &SolveOptions::new(ri.mode)).map_err(text)?;
    match r.status {
        SolveStatus::Sat => Ok(r.witnesses.into_iter().next()),
        SolveStatus::Unsat => Ok(None),
        SolveStatus::BudgetExhausted => Err(format!("{} budget exhausted", ri.kind)),
    }
}

fn decide_sat(g: &OrientedGraph, t: &Target, mode: InjectivityMode) -> Result<bool, String> {
    let r = decide(g, t, &SolveOptions::new(mode)).map_err(text)?;
    match r.status {
        SolveStatus::BudgetExhausted => Err(format!("budget exhausted on {}", describe(g))),
        _ => Ok(r.is_sat()),
    }
}

fn edge_reductions(config: &SelfcheckConfig) -> Result<String, String> {
    let max_n = if config.quick { 5 } else { 6 };
    let mut graphs = 0;
    let mut colourable = 0;
    for n in 1..=max_n {
        for g in subcubic_graphs(n) {
            let expected = three_edge_colouring_oracle(&g).map_err(text)?.is_some();
            for build in [build_ios_t4, build_iot_t4] {
                let ri = build(&g, &config.store).map_err(text)?;
                if solve_instance(&ri)?.is_some() != expected {
                    return Err(format!(
                        "{} disagrees on {}",
                        ri.kind,
                        g.to_text().replace('\n', " ")
                    ));
                }
            }
            graphs += 1;
            colourable += usize::from(expected);
        }
    }
    let mut detail =
        format!("{graphs} subcubic graphs on <= {max_n} vertices, {colourable} colourable");
    if !config.quick {
        // Reported but not gating.
        let petersen = UndirectedGraph::petersen();
        let mut verdicts = Vec::new();
        for build in [build_ios_t4, build_iot_t4] {
            let ri = build(&petersen, &config.store).map_err(text)?;
            verdicts.push(match solve_instance(&ri) {
                Ok(None) => "unsat",
                Ok(Some(_)) => "SAT",
                Err(_) => "unknown",
            });
        }
        detail.push_str(&format!("; petersen {}", verdicts.join("/")));
    }
    Ok(detail)
}

fn ring_reductions(config: &SelfcheckConfig) -> Result<String, String> {
    let count = if config.quick { 30 } else { 100 };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5);
    let c3 = named_target(TargetName::C3);
    let mut sat = 0;
    for _ in 0..count {
        let n = rng.gen_range(1..=5);
        let g = random_oriented(n, 0.5, 0.1, &mut rng);
        for (build, mode) in [
            (
                build_ios_t5 as fn(&_, &_) -> _,
                InjectivityMode::IosSeparate,
            ),
            (build_iot_t5, InjectivityMode::IotTogether),
        ] {
            let expected = decide_sat(&g, &c3, mode)?;
            let ri: ReductionInstance = build(&g, &config.store).map_err(text)?;
            if solve_instance(&ri)?.is_some() != expected {
                return Err(format!("{} disagrees on {}", ri.kind, describe(&g)));
            }
            sat += usize::from(expected);
        }
    }
    Ok(format!("{count} graphs x 2 modes, {sat} sat"))
}

fn collapse_reductions(config: &SelfcheckConfig) -> Result<String, String> {
    let count = if config.quick { 30 } else { 100 };
    let tt5 = transitive_tournament(5);
    let tt4 = transitive_tournament(4);
    let tt4_key = tt4.canonical_form().map_err(text)?;
    let pivots = [(0, Direction::Out), (4, Direction::In)];
    for (v, dir) in pivots {
        let sub = collapse_target(&tt5, v, dir).map_err(text)?;
        if sub.target.canonical_form().map_err(text)? != tt4_key {
            return Err(format!("collapse at {v} is not TT4"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9);
    let mut sat = 0;
    for _ in 0..count {
        let n = rng.gen_range(1..=4);
        let g = random_oriented(n, 0.5, 0.1, &mut rng);
        for (v, dir) in pivots {
            for (build, mode) in [
                (
                    build_ios_collapse as fn(&_, &_, _, _) -> _,
                    InjectivityMode::IosSeparate,
                ),
                (build_iot_collapse, InjectivityMode::IotTogether),
            ] {
                let sub = collapse_target(&tt5, v, dir).map_err(text)?;
                let expected = decide_sat(&g, &sub.target, mode)?;
                let ri: ReductionInstance = build(&g, &tt5, v, dir).map_err(text)?;
                if solve_instance(&ri)?.is_some() != expected {
                    return Err(format!(
                        "{} pivot {v} disagrees on {}",
                        ri.kind,
                        describe(&g)
                    ));
                }
                sat += usize::from(expected);
            }
        }
    }
    Ok(format!("{count} graphs x 2 pivots x 2 modes, {sat} sat"))
}

fn poly_agreement(config: &SelfcheckConfig) -> Result<String, String> {
    let mut graphs: Vec<OrientedGraph> = (0..=4).flat_map(all_oriented_graphs).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x10);
    let random = if config.quick { 100 } else { 500 };
    for _ in 0..random {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.5);
        graphs.push(random_oriented(n, p, 0.3, &mut rng));
    }
    let targets = [transitive_tournament(1), transitive_tournament(2)];
    for g in &graphs {
        for t in &targets {
            for mode in InjectivityMode::ALL {
                let poly = decide_small_target(g, t, mode).map_err(text)?;
                if poly.is_sat() != decide_sat(g, t, mode)? {
                    return Err(format!(
                        "{} {} {}",
                        t.name(),
                        mode.short_name(),
                        describe(g)
                    ));
                }
                if let crate::poly::SmallTargetAnswer::Sat(f) = &poly {
                    let ok = verify_colouring(g, t, f, mode).map_err(text)?.is_valid();
                    if !ok {
                        return Err(format!("invalid 2-SAT witness on {}", describe(g)));
                    }
                }
            }
        }
    }
    Ok(format!("{} graphs x 2 targets x 3 modes", graphs.len()))
}

/// Every proper `{b, c, d}` edge colouring, by brute force.
fn all_edge_colourings(g: &UndirectedGraph) -> Vec<EdgeColouring> {
    let m = g.edges().len();
    (0..3usize.pow(m as u32))
        .map(|mut code| {
            let colours = (0..m)
                .map(|_| {
                    let c = EDGE_COLOURS[code % 3];
                    code /= 3;
                    c
                })
                .collect();
            EdgeColouring { colours }
        })
        .filter(|ec| ec.check_proper(g).is_ok())
        .collect()
}

fn round_trips(config: &SelfcheckConfig) -> Result<String, String> {
    let mut lifts = 0;
    let mut extracted = 0;
    for g in [UndirectedGraph::complete(3), UndirectedGraph::complete(4)] {
        for build in [build_ios_t4, build_iot_t4] {
            let ri = build(&g, &config.store).map_err(text)?;
            let witnesses = enumerate(
                &ri.graph,
                &ri.target,
                &SolveOptions::new(ri.mode).with_limit(50),
            )
            .map_err(text)?
            .witnesses;
            if witnesses.is_empty() {
                return Err(format!(
                    "{} on K{} has no witness",
                    ri.kind,
                    g.vertex_count()
                ));
            }
            for f in &witnesses {
                extract_edge_colouring(&ri, f).map_err(text)?;
                extracted += 1;
            }
            for base in all_edge_colourings(&g) {
                let f = lift_colouring(&ri, &BaseSolution::Edges(base.clone())).map_err(text)?;
                if !verify_colouring(&ri.graph, &ri.target, &f, ri.mode)
                    .map_err(text)?
                    .is_valid()
                {
                    return Err(format!("{} lift is invalid", ri.kind));
                }
                if extract_edge_colouring(&ri, &f).map_err(text)? != base {
                    return Err(format!("{} extract after lift differs", ri.kind));
                }
                lifts += 1;
            }
        }
    }
    let sources = [
        OrientedGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).expect("cycle"),
        OrientedGraph::from_arcs(3, [(0, 1), (2, 1)]).expect("path"),
    ];
    let c3 = named_target(TargetName::C3);
    let tt5 = transitive_tournament(5);
    for g in &sources {
        let mut instances = Vec::new();
        for build in [build_ios_t5, build_iot_t5] {
            instances.push(build(g, &config.store).map_err(text)?);
        }
        for (v, dir) in [(0, Direction::Out), (4, Direction::In)] {
            instances.push(build_ios_collapse(g, &tt5, v, dir).map_err(text)?);
            instances.push(build_iot_collapse(g, &tt5, v, dir).map_err(text)?);
        }
        for ri in &instances {
            let source_target = ri.source_target.as_ref().map_or(&c3, |s| &s.target);
            for base in brute_force_colourings(g, source_target.graph(), ri.mode) {
                let base = Colouring::total(base);
                let f = lift_colouring(ri, &BaseSolution::Vertices(base.clone())).map_err(text)?;
                if !verify_colouring(&ri.graph, &ri.target, &f, ri.mode)
                    .map_err(text)?
                    .is_valid()
                {
                    return Err(format!("{} lift is invalid", ri.kind));
                }
                if extract_inner_colouring(ri, &f).map_err(text)? != base {
                    return Err(format!("{} extract after lift differs", ri.kind));
                }
                lifts += 1;
            }
        }
    }
    Ok(format!(
        "{extracted} witnesses extracted, {lifts} lifts round-tripped"
    ))
}
