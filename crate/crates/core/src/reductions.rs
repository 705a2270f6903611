//! Reduction builders, the 3-edge-colouring oracle, and moving solutions
//! between a source problem and its reduced instance.
//!
//! Edge reductions (`ios-t4`, `iot-t4`) replace every vertex of a subcubic
//! graph by a vertex gadget and every edge by an edge gadget glued to one
//! square of each endpoint gadget. Ring reductions (`ios-t5`, `iot-t5`)
//! chain one gadget copy per source vertex into a ring and hang the source
//! vertex off the copy's attachment port. Collapse reductions embed the
//! subtournament spanned by a pivot's strict out- or in-neighbourhood into
//! the whole tournament using a ring of irreflexive target copies.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::canon::canonical_key;
use crate::catalog::{colour_label, named_target, CatalogError, Target, TargetName};
use crate::digraph::{
    disjoint_union, induced_subgraph, Direction, GraphError, InjectivityMode, OrientedGraph,
    VertexId,
};
use crate::gadgets::{compose, ring, AssetStore, GadgetError, GadgetSpec, ScopeMap};
use crate::solver::{
    decide, verify_colouring, Colouring, SolveError, SolveOptions, SolveStatus, Verdict,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("vertex {vertex} has degree {degree}; at most 3 is allowed")]
    DegreeTooHigh { vertex: VertexId, degree: usize },
    #[error("pivot {} has {}-degree {degree}; at least 4 is required", colour_label(*vertex), direction_name(*direction))]
    DegreeTooLow {
        vertex: VertexId,
        direction: Direction,
        degree: usize,
    },
    #[error("invalid undirected graph: {0}")]
    BadUndirected(String),
    #[error("edge {edge}: ports coloured {} and {}", colour_label(*left), colour_label(*right))]
    PortColourMismatch {
        edge: usize,
        left: VertexId,
        right: VertexId,
    },
    #[error("extracted edge colouring is not a proper 3-edge-colouring: {0}")]
    ImproperColouring(String),
    #[error("no automorphism normalises the anchor: {0}")]
    NormalizationFailed(String),
    #[error("no completion of the base solution exists")]
    TemplateNotFound,
    #[error("base solution rejected: {0}")]
    InvalidBase(String),
    #[error("operation not available for {0} instances")]
    WrongKind(ReductionKind),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::In => "in",
        Direction::Out => "out",
        Direction::Both => "total",
    }
}

/// A simple undirected graph; edges are stored as `(u, v)` with `u < v`,
/// sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl UndirectedGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, ReductionError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(ReductionError::BadUndirected(format!(
                    "edge {u}-{v} out of range"
                )));
            }
            if u == v {
                return Err(ReductionError::BadUndirected(format!("loop at {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(ReductionError::BadUndirected(format!(
                    "duplicate edge {u}-{v}"
                )));
            }
        }
        Ok(UndirectedGraph {
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Indices of edges at `v`, ascending.
    pub fn incident(&self, v: VertexId) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].0 == v || self.edges[i].1 == v)
            .collect()
    }

    pub fn complete(n: usize) -> Self {
        UndirectedGraph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        UndirectedGraph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    /// Reads the edge-list format, with `e <u> <v>` (or `a <u> <v>`) lines
    /// for edges.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut n = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| ReductionError::BadUndirected(format!("line {}: {why}", idx + 1));
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["n", k] if n.is_none() => {
                    n = Some(k.parse().map_err(|_| bad("bad vertex count"))?)
                }
                ["e" | "a", u, v] if n.is_some() => {
                    let u = u.parse().map_err(|_| bad("bad vertex id"))?;
                    let v = v.parse().map_err(|_| bad("bad vertex id"))?;
                    edges.push((u, v));
                }
                _ => return Err(bad("expected `n <count>` then `e <u> <v>` lines")),
            }
        }
        UndirectedGraph::new(
            n.ok_or_else(|| ReductionError::BadUndirected("missing `n` line".into()))?,
            edges,
        )
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("n {}", self.n)];
        lines.extend(self.edges.iter().map(|(u, v)| format!("e {u} {v}")));
        lines.join("\n")
    }
}

/// Orients every edge from its smaller to its larger endpoint.
pub fn orient_edges(g: &UndirectedGraph) -> OrientedGraph {
    OrientedGraph::from_arcs(g.vertex_count(), g.edges().iter().copied()).expect("simple graph")
}

/// Edge colours aligned with [`UndirectedGraph::edges`]; colours are T4
/// vertex ids, so `b`, `c`, `d` are 1, 2, 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColouring {
    pub colours: Vec<VertexId>,
}

/// The three edge colours, as T4 vertex ids.
pub const EDGE_COLOURS: [VertexId; 3] = [1, 2, 3];

impl EdgeColouring {
    /// Checks colours are in `{b, c, d}` and edges sharing an endpoint differ.
    pub fn check_proper(&self, g: &UndirectedGraph) -> Result<(), String> {
        if self.colours.len() != g.edges().len() {
            return Err(format!(
                "{} colours for {} edges",
                self.colours.len(),
                g.edges().len()
            ));
        }
        for (i, &c) in self.colours.iter().enumerate() {
            if !EDGE_COLOURS.contains(&c) {
                return Err(format!("edge {i} has colour {}", colour_label(c)));
            }
        }
        for v in 0..g.vertex_count() {
            let inc = g.incident(v);
            for (k, &i) in inc.iter().enumerate() {
                for &j in &inc[k + 1..] {
                    if self.colours[i] == self.colours[j] {
                        return Err(format!("edges {i} and {j} share colour at vertex {v}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn describe(&self, g: &UndirectedGraph) -> String {
        g.edges()
            .iter()
            .zip(&self.colours)
            .map(|((u, v), &c)| format!("{u}-{v}={}", colour_label(c)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check_subcubic(g: &UndirectedGraph) -> Result<(), ReductionError> {
    for v in 0..g.vertex_count() {
        let degree = g.degree(v);
        if degree > 3 {
            return Err(ReductionError::DegreeTooHigh { vertex: v, degree });
        }
    }
    Ok(())
}

/// A proper colouring of the edges with `b, c, d`, found by backtracking
/// over edges in order with colours tried in order; `None` if there is none.
pub fn three_edge_colouring_oracle(
    g: &UndirectedGraph,
) -> Result<Option<EdgeColouring>, ReductionError> {
    check_subcubic(g)?;
    let m = g.edges().len();
    let incident: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.incident(v)).collect();
    let mut colours = vec![usize::MAX; m];
    fn rec(i: usize, g: &UndirectedGraph, incident: &[Vec<usize>], colours: &mut [usize]) -> bool {
        if i == colours.len() {
            return true;
        }
        let (u, v) = g.edges()[i];
        for c in EDGE_COLOURS {
            let clash = incident[u]
                .iter()
                .chain(&incident[v])
                .any(|&j| j < i && colours[j] == c);
            if clash {
                continue;
            }
            colours[i] = c;
            if rec(i + 1, g, incident, colours) {
                return true;
            }
        }
        colours[i] = usize::MAX;
        false
    }
    Ok(rec(0, g, &incident, &mut colours).then_some(EdgeColouring { colours }))
}

/// All subcubic simple graphs on `n` vertices up to isomorphism, in
/// canonical-key order (`n <= 8`).
pub fn subcubic_graphs(n: usize) -> Vec<UndirectedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut seen = BTreeMap::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut deg = vec![0; n];
        let mut edges = Vec::new();
        let mut ok = true;
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                deg[u] += 1;
                deg[v] += 1;
                ok &= deg[u] <= 3 && deg[v] <= 3;
                edges.push((u, v));
            }
        }
        if !ok {
            continue;
        }
        let key = canonical_key(n, |a, b| edges.contains(&(a.min(b), a.max(b))));
        seen.entry(key).or_insert(edges);
    }
    seen.into_values()
        .map(|edges| UndirectedGraph::new(n, edges).unwrap())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    IosT4,
    IotT4,
    IosT5,
    IotT5,
    CollapseIos,
    CollapseIot,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::IosT4,
        ReductionKind::IotT4,
        ReductionKind::IosT5,
        ReductionKind::IotT5,
        ReductionKind::CollapseIos,
        ReductionKind::CollapseIot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::IosT4 => "ios-t4",
            ReductionKind::IotT4 => "iot-t4",
            ReductionKind::IosT5 => "ios-t5",
            ReductionKind::IotT5 => "iot-t5",
            ReductionKind::CollapseIos => "collapse-ios",
            ReductionKind::CollapseIot => "collapse-iot",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn mode(self) -> InjectivityMode {
        match self {
            ReductionKind::IosT4 | ReductionKind::IosT5 | ReductionKind::CollapseIos => {
                InjectivityMode::IosSeparate
            }
            _ => InjectivityMode::IotTogether,
        }
    }

    pub fn is_edge_kind(self) -> bool {
        matches!(self, ReductionKind::IosT4 | ReductionKind::IotT4)
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where an edge gadget's port was glued.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortIdentification {
    pub edge: usize,
    pub edge_port: String,
    pub source_vertex: VertexId,
    pub square: String,
    pub instance_vertex: VertexId,
}

/// The smaller problem a collapse or ring reduction starts from.
#[derive(Debug, Clone)]
pub struct SourceTarget {
    pub target: Target,
    /// Target vertex of the instance's target for each source colour.
    pub embedding: Vec<VertexId>,
}

/// Output of a reduction builder plus the bookkeeping needed to move
/// solutions back and forth.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    pub kind: ReductionKind,
    pub graph: OrientedGraph,
    /// Target the instance is to be coloured with.
    pub target: Target,
    pub mode: InjectivityMode,
    /// Vertex count of the source graph before padding.
    pub source_vertices: usize,
    /// Source edges (edge kinds only), aligned with the edge gadget scopes
    /// `e0, e1, ...`.
    pub source_edges: Vec<(VertexId, VertexId)>,
    /// Instance vertices of the source graph's vertices (ring and collapse
    /// kinds), followed by padding vertices.
    pub inner: Vec<VertexId>,
    pub identifications: Vec<PortIdentification>,
    /// Colourings are normalised so that this instance vertex gets this colour.
    pub anchor: Option<(VertexId, VertexId)>,
    pub source_target: Option<SourceTarget>,
    /// Every gadget copy (or target copy) and the instance vertex of each of
    /// its labels.
    pub scope: ScopeMap,
    /// Scope name and local vertex count of each copy, in build order.
    pub copies: Vec<(String, usize)>,
}

impl ReductionInstance {
    /// Deterministic `key=value` lines describing the bookkeeping.
    pub fn map_text(&self) -> String {
        let mut lines = vec![
            format!("kind={}", self.kind),
            format!("target={}", self.target.name()),
            format!("mode={}", self.mode.short_name()),
            format!("vertices={}", self.graph.vertex_count()),
            format!("arcs={}", self.graph.arc_count()),
            format!("source_vertices={}", self.source_vertices),
        ];
        if let Some(st) = &self.source_target {
            lines.push(format!("source_target={}", st.target.name()));
            let emb: Vec<String> = st.embedding.iter().map(|&c| colour_label(c)).collect();
            lines.push(format!("source_target.embedding={}", emb.join(",")));
        }
        if let Some((v, c)) = self.anchor {
            lines.push(format!("anchor={v}:{}", colour_label(c)));
        }
        for (i, (u, v)) in self.source_edges.iter().enumerate() {
            lines.push(format!("edge.{i}={u},{v}"));
        }
        for (i, &v) in self.inner.iter().enumerate() {
            let key = if i < self.source_vertices {
                "inner"
            } else {
                "padding"
            };
            lines.push(format!("{key}.{i}={v}"));
        }
        for id in &self.identifications {
            lines.push(format!(
                "ident.e{}.{}=x{}.{}:{}",
                id.edge, id.edge_port, id.source_vertex, id.square, id.instance_vertex
            ));
        }
        for (scope, count) in &self.copies {
            let ids: Vec<String> = (0..*count)
                .map(|v| {
                    self.scope
                        .get(scope, &v.to_string())
                        .expect("registered")
                        .to_string()
                })
                .collect();
            lines.push(format!("copy.{scope}={}", ids.join(",")));
        }
        lines.join("\n")
    }

    fn require_kind(&self, ok: bool) -> Result<(), ReductionError> {
        if ok {
            Ok(())
        } else {
            Err(ReductionError::WrongKind(self.kind))
        }
    }

    /// Short description such as `4 Hx, 6 He`.
    pub fn summary(&self) -> String {
        let copies = |prefix: &str| {
            self.copies
                .iter()
                .filter(|(s, _)| s.starts_with(prefix))
                .count()
        };
        let n = self.copies.len();
        let parts = match self.kind {
            ReductionKind::IosT4 => format!("{} Hx, {} He", copies("x"), copies("e")),
            ReductionKind::IotT4 => format!("{} Fx, {} Fe", copies("x"), copies("e")),
            ReductionKind::IosT5 => format!("{n} Jv"),
            ReductionKind::IotT5 => format!("{n} Dv"),
            ReductionKind::CollapseIos => format!("{n} target copies"),
            ReductionKind::CollapseIot => format!(
                "{} target copies, {} trimmed copies",
                copies("T"),
                copies("S")
            ),
        };
        format!(
            "{}: {} vertices, {} arcs ({parts})",
            self.kind,
            self.graph.vertex_count(),
            self.graph.arc_count()
        )
    }
}

fn edge_reduction(
    g: &UndirectedGraph,
    store: &AssetStore,
    kind: ReductionKind,
    vertex_gadget: &str,
    edge_gadget: &str,
) -> Result<ReductionInstance, ReductionError> {
    check_subcubic(g)?;
    let x = store.load_gadget(vertex_gadget)?;
    let e = store.load_gadget(edge_gadget)?;
    let mut squares: Vec<&String> = x.ports.keys().filter(|k| k.starts_with("square")).collect();
    squares.sort();
    let vnames: Vec<String> = (0..g.vertex_count()).map(|i| format!("x{i}")).collect();
    let enames: Vec<String> = (0..g.edges().len()).map(|i| format!("e{i}")).collect();
    let mut parts: Vec<(&str, &GadgetSpec)> = vnames.iter().map(|s| (s.as_str(), &x)).collect();
    parts.extend(enames.iter().map(|s| (s.as_str(), &e)));

    let mut next_square = vec![0usize; g.vertex_count()];
    let mut claims = Vec::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        for (end, port) in [(u, "left"), (v, "right")] {
            let k = next_square[end];
            assert!(k < squares.len(), "square exhausted at vertex {end}");
            next_square[end] += 1;
            claims.push((i, port, end, squares[k].clone()));
        }
    }
    let idents: Vec<_> = claims
        .iter()
        .map(|(i, port, end, sq)| {
            (
                (vnames[*end].as_str(), sq.as_str()),
                (enames[*i].as_str(), *port),
            )
        })
        .collect::<Vec<((&str, &str), (&str, &str))>>();
    let comp = compose(&parts, &idents)?;
    let identifications = claims
        .iter()
        .map(|(i, port, end, sq)| PortIdentification {
            edge: *i,
            edge_port: port.to_string(),
            source_vertex: *end,
            square: sq.clone(),
            instance_vertex: comp.scope.get(&vnames[*end], sq).expect("square"),
        })
        .collect();
    let mut copies: Vec<(String, usize)> = vnames
        .iter()
        .map(|s| (s.clone(), x.graph.vertex_count()))
        .collect();
    copies.extend(enames.iter().map(|s| (s.clone(), e.graph.vertex_count())));
    Ok(ReductionInstance {
        kind,
        graph: comp.graph,
        target: named_target(TargetName::T4),
        mode: kind.mode(),
        source_vertices: g.vertex_count(),
        source_edges: g.edges().to_vec(),
        inner: Vec::new(),
        identifications,
        anchor: None,
        source_target: None,
        scope: comp.scope,
        copies,
    })
}

/// One `Hx` per vertex and one `He` per edge of the min-to-max orientation.
pub fn build_ios_t4(
    g: &UndirectedGraph,
    store: &AssetStore,
) -> Result<ReductionInstance, ReductionError> {
    edge_reduction(g, store, ReductionKind::IosT4, "Hx", "He")
}

/// One `Fx` per vertex and one `Fe` per edge of the min-to-max orientation.
pub fn build_iot_t4(
    g: &UndirectedGraph,
    store: &AssetStore,
) -> Result<ReductionInstance, ReductionError> {
    edge_reduction(g, store, ReductionKind::IotT4, "Fx", "Fe")
}

/// Rings need at least two slots; smaller sources get isolated dummies.
pub fn padded_count(n: usize) -> usize {
    n.max(2)
}

/// C3 inside T5 on `b -> d -> e -> b`.
fn c3_in_t5() -> SourceTarget {
    SourceTarget {
        target: named_target(TargetName::C3),
        embedding: vec![1, 3, 4],
    }
}

#[allow(clippy::too_many_arguments)]
fn ring_reduction(
    g: &OrientedGraph,
    store: &AssetStore,
    kind: ReductionKind,
    gadget: &str,
    outs: &[&str],
    anchor_label: &str,
    anchor_colour: VertexId,
) -> Result<ReductionInstance, ReductionError> {
    let spec = store.load_gadget(gadget)?;
    let n = padded_count(g.vertex_count());
    let ring_comp = ring(&spec, n, outs, "in")?;
    let padded = OrientedGraph::from_arcs(n, g.arcs())?;
    let (union, offsets) = disjoint_union(&[&ring_comp.graph, &padded]);
    let inner: Vec<VertexId> = (0..n).map(|i| offsets[1] + i).collect();
    let mut scope = ring_comp.scope.clone();
    let mut arcs: Vec<_> = union.arcs().collect();
    for (i, &w) in inner.iter().enumerate() {
        arcs.push((scope.require(&i.to_string(), "attach")?, w));
        scope.insert("g", &i.to_string(), w);
    }
    let graph = OrientedGraph::from_arcs(union.vertex_count(), arcs)?;
    let anchor = scope.require("0", anchor_label)?;
    Ok(ReductionInstance {
        kind,
        graph,
        target: named_target(TargetName::T5),
        mode: kind.mode(),
        source_vertices: g.vertex_count(),
        source_edges: Vec::new(),
        inner,
        identifications: Vec::new(),
        anchor: Some((anchor, anchor_colour)),
        source_target: Some(c3_in_t5()),
        scope,
        copies: (0..n)
            .map(|i| (i.to_string(), spec.graph.vertex_count()))
            .collect(),
    })
}

/// Ring of `Jv` copies, one per (padded) source vertex, with an arc from
/// each copy's attachment port to its source vertex.
pub fn build_ios_t5(
    g: &OrientedGraph,
    store: &AssetStore,
) -> Result<ReductionInstance, ReductionError> {
    ring_reduction(
        g,
        store,
        ReductionKind::IosT5,
        "Jv",
        &["out0", "out1", "out2"],
        "8",
        0,
    )
}

/// Ring of `Dv` copies, one per (padded) source vertex, with an arc from
/// each copy's attachment port to its source vertex.
pub fn build_iot_t5(
    g: &OrientedGraph,
    store: &AssetStore,
) -> Result<ReductionInstance, ReductionError> {
    ring_reduction(g, store, ReductionKind::IotT5, "Dv", &["out"], "0", 3)
}

/// Reflexive subtournament on the strict out- (or in-) neighbourhood of
/// `v`. The pivot needs degree at least 4 in that direction, loop included.
pub fn collapse_target(
    t: &Target,
    v: VertexId,
    direction: Direction,
) -> Result<SourceTarget, ReductionError> {
    let tg = t.graph();
    if v >= tg.vertex_count() {
        return Err(GraphError::VertexOutOfRange {
            vertex: v,
            n: tg.vertex_count(),
        }
        .into());
    }
    let members = match direction {
        Direction::Out => tg.out_neighbours(v),
        Direction::In => tg.in_neighbours(v),
        Direction::Both => panic!("collapse direction must be in or out"),
    };
    let strict: BTreeSet<VertexId> = members.iter().copied().filter(|&u| u != v).collect();
    // Degrees are counted with the loop of a reflexive target.
    let degree = strict.len() + 1;
    if degree < 4 {
        return Err(ReductionError::DegreeTooLow {
            vertex: v,
            direction,
            degree,
        });
    }
    let (sub, embedding) = induced_subgraph(tg, &strict)?;
    let dir = if direction == Direction::Out {
        "out"
    } else {
        "in"
    };
    Ok(SourceTarget {
        target: Target::new(format!("{}[{}{dir}]", t.name(), colour_label(v)), sub),
        embedding,
    })
}

fn strict_arcs(t: &OrientedGraph) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
    t.arcs().filter(|(u, v)| u != v)
}

/// Ring of `n` irreflexive copies `T0, T1, ...` of `t` linked through new
/// vertices `x_i`: `v_i -> x_i -> v_{i+1}`, plus `x_i -> w_i` (out) or
/// `w_i -> x_i` (in) for each source vertex `w_i`.
pub fn build_ios_collapse(
    g: &OrientedGraph,
    t: &Target,
    v: VertexId,
    direction: Direction,
) -> Result<ReductionInstance, ReductionError> {
    let source_target = collapse_target(t, v, direction)?;
    let k = t.vertex_count();
    let n = padded_count(g.vertex_count());
    let x = |i: usize| n + i;
    let copy = |i: usize, u: usize| 2 * n + i * k + u;
    let mut arcs: Vec<_> = g.arcs().collect();
    let mut scope = ScopeMap::default();
    for i in 0..n {
        scope.insert("g", &i.to_string(), i);
        scope.insert("x", &i.to_string(), x(i));
        for u in 0..k {
            scope.insert(&format!("T{i}"), &u.to_string(), copy(i, u));
        }
        arcs.extend(strict_arcs(t.graph()).map(|(a, b)| (copy(i, a), copy(i, b))));
        arcs.push((copy(i, v), x(i)));
        arcs.push((x(i), copy((i + 1) % n, v)));
        arcs.push(match direction {
            Direction::In => (i, x(i)),
            _ => (x(i), i),
        });
    }
    let graph = OrientedGraph::from_arcs(2 * n + n * k, arcs)?;
    Ok(ReductionInstance {
        kind: ReductionKind::CollapseIos,
        graph,
        target: t.clone(),
        mode: InjectivityMode::IosSeparate,
        source_vertices: g.vertex_count(),
        source_edges: Vec::new(),
        inner: (0..n).collect(),
        identifications: Vec::new(),
        anchor: Some((copy(0, v), v)),
        source_target: Some(source_target),
        scope,
        copies: (0..n).map(|i| (format!("T{i}"), k)).collect(),
    })
}

/// Out-direction construction: irreflexive copies `T_i` of `t` and `S_i` of
/// `t` without the strict arcs leaving `v`; arcs `S_{i-1}[u] -> T_i[u]` for
/// `u != v` (indices mod `n`), `T_i[v] -> S_i[v]` and `S_i[v] -> w_i`.
fn iot_collapse_out(
    g: &OrientedGraph,
    t: &OrientedGraph,
    v: VertexId,
) -> (OrientedGraph, ScopeMap) {
    let k = t.vertex_count();
    let n = padded_count(g.vertex_count());
    let copy = |i: usize, u: usize| n + i * k + u;
    let star = |i: usize, u: usize| n + n * k + i * k + u;
    let mut arcs: Vec<_> = g.arcs().collect();
    let mut scope = ScopeMap::default();
    for i in 0..n {
        scope.insert("g", &i.to_string(), i);
        for u in 0..k {
            scope.insert(&format!("T{i}"), &u.to_string(), copy(i, u));
            scope.insert(&format!("S{i}"), &u.to_string(), star(i, u));
        }
        arcs.extend(strict_arcs(t).map(|(a, b)| (copy(i, a), copy(i, b))));
        arcs.extend(
            strict_arcs(t)
                .filter(|&(a, _)| a != v)
                .map(|(a, b)| (star(i, a), star(i, b))),
        );
        let prev = (i + n - 1) % n;
        arcs.extend(
            (0..k)
                .filter(|&u| u != v)
                .map(|u| (star(prev, u), copy(i, u))),
        );
        arcs.push((copy(i, v), star(i, v)));
        arcs.push((star(i, v), i));
    }
    let graph = OrientedGraph::from_arcs(n + 2 * n * k, arcs).expect("construction is oriented");
    (graph, scope)
}

/// The iot collapse. The in-direction instance is the reversal of the
/// out-direction instance built for the reversed source and target.
pub fn build_iot_collapse(
    g: &OrientedGraph,
    t: &Target,
    v: VertexId,
    direction: Direction,
) -> Result<ReductionInstance, ReductionError> {
    let source_target = collapse_target(t, v, direction)?;
    let k = t.vertex_count();
    let n = padded_count(g.vertex_count());
    let (graph, scope) = match direction {
        Direction::In => {
            let (rev, scope) = iot_collapse_out(&g.reversed(), &t.graph().reversed(), v);
            (rev.reversed(), scope)
        }
        _ => iot_collapse_out(g, t.graph(), v),
    };
    let anchor = scope.get("T0", &v.to_string()).expect("pivot copy");
    let mut copies: Vec<(String, usize)> = (0..n).map(|i| (format!("T{i}"), k)).collect();
    copies.extend((0..n).map(|i| (format!("S{i}"), k)));
    Ok(ReductionInstance {
        kind: ReductionKind::CollapseIot,
        graph,
        target: t.clone(),
        mode: InjectivityMode::IotTogether,
        source_vertices: g.vertex_count(),
        source_edges: Vec::new(),
        inner: (0..n).collect(),
        identifications: Vec::new(),
        anchor: Some((anchor, v)),
        source_target: Some(source_target),
        scope,
        copies,
    })
}

/// The edge colouring carried by the port colours of each edge gadget.
pub fn extract_edge_colouring(
    ri: &ReductionInstance,
    f: &Colouring,
) -> Result<EdgeColouring, ReductionError> {
    ri.require_kind(ri.kind.is_edge_kind())?;
    let colours = f.as_total()?;
    let mut out = Vec::with_capacity(ri.source_edges.len());
    for i in 0..ri.source_edges.len() {
        let scope = format!("e{i}");
        let left = colours[ri.scope.require(&scope, "left")?];
        let right = colours[ri.scope.require(&scope, "right")?];
        if left != right {
            return Err(ReductionError::PortColourMismatch {
                edge: i,
                left,
                right,
            });
        }
        out.push(left);
    }
    let ec = EdgeColouring { colours: out };
    let g = UndirectedGraph::new(ri.source_vertices, ri.source_edges.iter().copied())?;
    ec.check_proper(&g)
        .map_err(ReductionError::ImproperColouring)?;
    Ok(ec)
}

/// First automorphism of the instance target sending `f(anchor)` to the
/// anchor colour.
fn normaliser(ri: &ReductionInstance, f: &[VertexId]) -> Result<Vec<VertexId>, ReductionError> {
    let (anchor, colour) = ri.anchor.ok_or(ReductionError::WrongKind(ri.kind))?;
    ri.target
        .automorphisms()?
        .iter()
        .find(|p| p[f[anchor]] == colour)
        .cloned()
        .ok_or_else(|| {
            ReductionError::NormalizationFailed(format!(
                "anchor vertex {anchor} has colour {}",
                colour_label(f[anchor])
            ))
        })
}

/// The colouring of the source graph read off the inner vertices, after
/// normalising the anchor and translating into source-target colours.
pub fn extract_inner_colouring(
    ri: &ReductionInstance,
    f: &Colouring,
) -> Result<Colouring, ReductionError> {
    ri.require_kind(!ri.kind.is_edge_kind())?;
    let colours = f.as_total()?;
    let sigma = normaliser(ri, &colours)?;
    let st = ri
        .source_target
        .as_ref()
        .expect("ring and collapse kinds have one");
    let mut out = Vec::with_capacity(ri.source_vertices);
    for &w in &ri.inner[..ri.source_vertices] {
        let c = sigma[colours[w]];
        let local = st.embedding.iter().position(|&e| e == c).ok_or_else(|| {
            ReductionError::NormalizationFailed(format!(
                "vertex {w} has colour {} outside {}",
                colour_label(c),
                st.target.name()
            ))
        })?;
        out.push(local);
    }
    Ok(Colouring::total(out))
}

/// Base solution for [`lift_colouring`].
#[derive(Debug, Clone)]
pub enum BaseSolution {
    Edges(EdgeColouring),
    Vertices(Colouring),
}

/// Extends a source solution to the whole instance: ports (or inner
/// vertices and the anchor) are fixed from `base`, and the solver completes
/// the gadget copies.
pub fn lift_colouring(
    ri: &ReductionInstance,
    base: &BaseSolution,
) -> Result<Colouring, ReductionError> {
    let mut fixed = BTreeMap::new();
    match base {
        BaseSolution::Edges(ec) => {
            ri.require_kind(ri.kind.is_edge_kind())?;
            let g = UndirectedGraph::new(ri.source_vertices, ri.source_edges.iter().copied())?;
            ec.check_proper(&g).map_err(ReductionError::InvalidBase)?;
            for (i, &c) in ec.colours.iter().enumerate() {
                let scope = format!("e{i}");
                fixed.insert(ri.scope.require(&scope, "left")?, c);
                fixed.insert(ri.scope.require(&scope, "right")?, c);
            }
        }
        BaseSolution::Vertices(f) => {
            ri.require_kind(!ri.kind.is_edge_kind())?;
            let st = ri
                .source_target
                .as_ref()
                .expect("ring and collapse kinds have one");
            let source = source_graph(ri);
            match verify_colouring(&source, &st.target, f, ri.mode) {
                Ok(Verdict::Valid) => {}
                Ok(Verdict::Invalid(why)) => {
                    return Err(ReductionError::InvalidBase(why.to_string()))
                }
                Err(e) => return Err(ReductionError::InvalidBase(e.to_string())),
            }
            for (i, c) in f.as_total()?.into_iter().enumerate() {
                fixed.insert(ri.inner[i], st.embedding[c]);
            }
            let (anchor, colour) = ri.anchor.expect("ring and collapse kinds have one");
            fixed.insert(anchor, colour);
        }
    }
    let options = SolveOptions::new(ri.mode).with_fixed(fixed);
    let result = match decide(&ri.graph, &ri.target, &options) {
        Ok(r) => r,
        Err(SolveError::InvalidFixedAssignment(_)) => return Err(ReductionError::TemplateNotFound),
        Err(e) => return Err(e.into()),
    };
    match result.status {
        SolveStatus::Sat => Ok(result.witnesses.into_iter().next().expect("witness")),
        _ => Err(ReductionError::TemplateNotFound),
    }
}

/// The source graph of a ring or collapse instance, recovered from the
/// inner vertices.
pub fn source_graph(ri: &ReductionInstance) -> OrientedGraph {
    let pos: BTreeMap<VertexId, VertexId> = ri.inner[..ri.source_vertices]
        .iter()
        .enumerate()
        .map(|(i, &w)| (w, i))
        .collect();
    let arcs = ri
        .graph
        .arcs()
        .filter_map(|(u, v)| Some((*pos.get(&u)?, *pos.get(&v)?)));
    OrientedGraph::from_arcs(ri.source_vertices, arcs).expect("subgraph of an oriented graph")
}
