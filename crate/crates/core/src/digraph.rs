//! Loop-aware oriented graphs.
//!
//! An [`OrientedGraph`] joins any two distinct vertices by at most one arc.
//! Loops are allowed, and a loop at `v` puts `v` into both its in- and its
//! out-neighbourhood.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Dense 0-based vertex index.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("arcs {u}->{v} and {v}->{u} would form a digon")]
    DigonViolation { u: usize, v: usize },
    #[error("arc {u}->{v} listed twice")]
    DuplicateArc { u: usize, v: usize },
    #[error("merge of vertex {vertex} is part of a cycle of merges")]
    SelfMergeCycle { vertex: usize },
    #[error("port {name} declared twice")]
    DuplicatePort { name: String },
}

/// Which neighbourhood of a vertex to look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
    Both,
}

/// The neighbourhood(s) on which a homomorphism has to be injective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InjectivityMode {
    /// Injective on every in-neighbourhood.
    InOnly,
    /// Injective on every in-neighbourhood and on every out-neighbourhood.
    IosSeparate,
    /// Injective on the union of in- and out-neighbourhood.
    IotTogether,
}

impl InjectivityMode {
    pub const ALL: [InjectivityMode; 3] = [
        InjectivityMode::InOnly,
        InjectivityMode::IosSeparate,
        InjectivityMode::IotTogether,
    ];

    /// The neighbourhood directions that must be injective under this mode.
    pub fn directions(self) -> &'static [Direction] {
        match self {
            InjectivityMode::InOnly => &[Direction::In],
            InjectivityMode::IosSeparate => &[Direction::In, Direction::Out],
            InjectivityMode::IotTogether => &[Direction::Both],
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            InjectivityMode::InOnly => "in",
            InjectivityMode::IosSeparate => "ios",
            InjectivityMode::IotTogether => "iot",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "in" => Some(InjectivityMode::InOnly),
            "ios" => Some(InjectivityMode::IosSeparate),
            "iot" => Some(InjectivityMode::IotTogether),
            _ => None,
        }
    }
}

impl fmt::Display for InjectivityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbourhood {
    pub vertex: VertexId,
    pub direction: Direction,
    pub members: BTreeSet<VertexId>,
}

/// Directed graph without digons; loops permitted. Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrientedGraph {
    n: usize,
    out: Vec<Vec<VertexId>>,
    inn: Vec<Vec<VertexId>>,
    arc_count: usize,
}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrientedGraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}

impl OrientedGraph {
    pub fn empty(n: usize) -> Self {
        OrientedGraph {
            n,
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
            arc_count: 0,
        }
    }

    /// Builds a graph from an arc list. Duplicates and digons are errors.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u != v && set.contains(&(v, u)) {
                return Err(GraphError::DigonViolation { u, v });
            }
            if !set.insert((u, v)) {
                return Err(GraphError::DuplicateArc { u, v });
            }
        }
        Ok(Self::from_arc_set(n, &set))
    }

    /// Like [`from_arcs`](Self::from_arcs) but duplicates collapse silently.
    pub fn from_arcs_dedup<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            check_vertex(u, n)?;
            check_vertex(v, n)?;
            if u != v && set.contains(&(v, u)) {
                return Err(GraphError::DigonViolation { u, v });
            }
            set.insert((u, v));
        }
        Ok(Self::from_arc_set(n, &set))
    }

    fn from_arc_set(n: usize, set: &BTreeSet<(VertexId, VertexId)>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in set {
            out[u].push(v);
            inn[v].push(u);
        }
        for list in inn.iter_mut() {
            list.sort_unstable();
        }
        OrientedGraph {
            n,
            out,
            inn,
            arc_count: set.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of arcs, loops included.
    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && self.out[u].binary_search(&v).is_ok()
    }

    pub fn has_loop(&self, v: VertexId) -> bool {
        self.has_arc(v, v)
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|v| !self.has_loop(v))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|v| self.has_loop(v))
    }

    /// Sorted out-neighbours, `v` itself included when it carries a loop.
    pub fn out_neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.out[v]
    }

    /// Sorted in-neighbours, `v` itself included when it carries a loop.
    pub fn in_neighbours(&self, v: VertexId) -> &[VertexId] {
        &self.inn[v]
    }

    /// Sorted union of in- and out-neighbours.
    pub fn neighbours(&self, v: VertexId) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self.out[v].iter().chain(&self.inn[v]).copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.inn[v].len()
    }

    pub fn members(&self, v: VertexId, direction: Direction) -> Vec<VertexId> {
        match direction {
            Direction::In => self.inn[v].clone(),
            Direction::Out => self.out[v].clone(),
            Direction::Both => self.neighbours(v),
        }
    }

    pub fn neighbourhood(
        &self,
        v: VertexId,
        direction: Direction,
    ) -> Result<Neighbourhood, GraphError> {
        check_vertex(v, self.n)?;
        Ok(Neighbourhood {
            vertex: v,
            direction,
            members: self.members(v, direction).into_iter().collect(),
        })
    }

    /// The graph with every arc reversed.
    pub fn reversed(&self) -> OrientedGraph {
        OrientedGraph {
            n: self.n,
            out: self.inn.clone(),
            inn: self.out.clone(),
            arc_count: self.arc_count,
        }
    }

    /// Same vertices and strict arcs, loops dropped.
    pub fn without_loops(&self) -> OrientedGraph {
        let set: BTreeSet<_> = self.arcs().filter(|(u, v)| u != v).collect();
        Self::from_arc_set(self.n, &set)
    }

    /// Same strict arcs with a loop added at every vertex.
    pub fn with_all_loops(&self) -> OrientedGraph {
        let mut set: BTreeSet<_> = self.arcs().collect();
        for v in 0..self.n {
            set.insert((v, v));
        }
        Self::from_arc_set(self.n, &set)
    }

    /// Relabels vertex `v` to `perm[v]`.
    pub fn permuted(&self, perm: &[VertexId]) -> OrientedGraph {
        assert_eq!(perm.len(), self.n, "permutation length mismatch");
        let set: BTreeSet<_> = self.arcs().map(|(u, v)| (perm[u], perm[v])).collect();
        Self::from_arc_set(self.n, &set)
    }

    /// True iff every ordered pair of vertices is joined by a directed path.
    pub fn is_strongly_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let reach = |adj: &Vec<Vec<VertexId>>| {
            let mut seen = vec![false; self.n];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&self.out) && reach(&self.inn)
    }
}

fn check_vertex(v: usize, n: usize) -> Result<(), GraphError> {
    if v < n {
        Ok(())
    } else {
        Err(GraphError::VertexOutOfRange { vertex: v, n })
    }
}

/// Disjoint union; returns the graph and the offset of each input.
pub fn disjoint_union(graphs: &[&OrientedGraph]) -> (OrientedGraph, Vec<usize>) {
    let mut offsets = Vec::with_capacity(graphs.len());
    let mut total = 0;
    for g in graphs {
        offsets.push(total);
        total += g.vertex_count();
    }
    let mut set = BTreeSet::new();
    for (g, &off) in graphs.iter().zip(&offsets) {
        set.extend(g.arcs().map(|(u, v)| (u + off, v + off)));
    }
    (OrientedGraph::from_arc_set(total, &set), offsets)
}

/// Quotient by `(keep, merge)` pairs. Returns the quotient and the map from
/// old vertex ids to new (dense) ids. Duplicate arcs collapse; a digon is an
/// error.
pub fn identify_vertices(
    g: &OrientedGraph,
    pairs: &[(VertexId, VertexId)],
) -> Result<(OrientedGraph, Vec<VertexId>), GraphError> {
    let n = g.vertex_count();
    let mut parent: Vec<VertexId> = (0..n).collect();
    for &(keep, merge) in pairs {
        check_vertex(keep, n)?;
        check_vertex(merge, n)?;
        if keep == merge || parent[merge] != merge {
            return Err(GraphError::SelfMergeCycle { vertex: merge });
        }
        parent[merge] = keep;
    }
    // Resolve chains; a chain that revisits a vertex is a cycle.
    let mut root = vec![0; n];
    for (v, r) in root.iter_mut().enumerate() {
        let mut cur = v;
        let mut steps = 0;
        while parent[cur] != cur {
            cur = parent[cur];
            steps += 1;
            if steps > n {
                return Err(GraphError::SelfMergeCycle { vertex: v });
            }
        }
        *r = cur;
    }
    let mut relabel = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if root[v] == v {
            relabel[v] = next;
            next += 1;
        }
    }
    let map: Vec<VertexId> = (0..n).map(|v| relabel[root[v]]).collect();
    let quotient = OrientedGraph::from_arcs_dedup(next, g.arcs().map(|(u, v)| (map[u], map[v])))?;
    Ok((quotient, map))
}

/// Subgraph induced on `vertices`, relabelled densely in ascending order.
/// The second component maps new ids back to old ids.
pub fn induced_subgraph(
    g: &OrientedGraph,
    vertices: &BTreeSet<VertexId>,
) -> Result<(OrientedGraph, Vec<VertexId>), GraphError> {
    for &v in vertices {
        check_vertex(v, g.vertex_count())?;
    }
    let old: Vec<VertexId> = vertices.iter().copied().collect();
    let new_of: BTreeMap<VertexId, VertexId> =
        old.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let set: BTreeSet<_> = g
        .arcs()
        .filter_map(|(u, v)| Some((*new_of.get(&u)?, *new_of.get(&v)?)))
        .collect();
    Ok((OrientedGraph::from_arc_set(old.len(), &set), old))
}

/// A graph together with named port vertices, as stored in edge-list files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDocument {
    pub graph: OrientedGraph,
    pub ports: BTreeMap<String, VertexId>,
    /// Comment lines (without the leading `#`) in file order.
    pub comments: Vec<String>,
}

/// Parses the edge-list format:
///
/// ```text
/// # comment
/// n 3
/// a 0 1
/// port left 0
/// ```
pub fn parse_document(text: &str) -> Result<GraphDocument, GraphError> {
    let mut n: Option<usize> = None;
    let mut arcs = BTreeSet::new();
    let mut ports = BTreeMap::new();
    let mut comments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        let malformed = |reason: &str| GraphError::MalformedLine {
            line: line_no,
            reason: reason.to_string(),
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (toks[0], n) {
            ("n", None) => {
                if toks.len() != 2 {
                    return Err(malformed("expected `n <count>`"));
                }
                n = Some(toks[1].parse().map_err(|_| malformed("bad vertex count"))?);
            }
            ("n", Some(_)) => return Err(malformed("vertex count declared twice")),
            (_, None) => return Err(malformed("first data line must be `n <count>`")),
            ("a", Some(count)) => {
                if toks.len() != 3 {
                    return Err(malformed("expected `a <u> <v>`"));
                }
                let u: usize = toks[1].parse().map_err(|_| malformed("bad vertex id"))?;
                let v: usize = toks[2].parse().map_err(|_| malformed("bad vertex id"))?;
                check_vertex(u, count)?;
                check_vertex(v, count)?;
                if u != v && arcs.contains(&(v, u)) {
                    return Err(GraphError::DigonViolation { u, v });
                }
                if !arcs.insert((u, v)) {
                    return Err(GraphError::DuplicateArc { u, v });
                }
            }
            ("port", Some(count)) => {
                if toks.len() != 3 {
                    return Err(malformed("expected `port <name> <v>`"));
                }
                let v: usize = toks[2].parse().map_err(|_| malformed("bad vertex id"))?;
                check_vertex(v, count)?;
                if ports.insert(toks[1].to_string(), v).is_some() {
                    return Err(GraphError::DuplicatePort {
                        name: toks[1].to_string(),
                    });
                }
            }
            (other, Some(_)) => return Err(malformed(&format!("unknown record `{other}`"))),
        }
    }
    let n = n.ok_or(GraphError::MalformedLine {
        line: 0,
        reason: "missing `n <count>` line".into(),
    })?;
    Ok(GraphDocument {
        graph: OrientedGraph::from_arc_set(n, &arcs),
        ports,
        comments,
    })
}

pub fn parse_graph(text: &str) -> Result<OrientedGraph, GraphError> {
    parse_document(text).map(|d| d.graph)
}

/// Header line, sorted arcs, ports sorted by name; `\n` separated, no
/// trailing newline. Comments are not emitted.
pub fn serialize_document(graph: &OrientedGraph, ports: &BTreeMap<String, VertexId>) -> String {
    let mut lines = vec![format!("n {}", graph.vertex_count())];
    lines.extend(graph.arcs().map(|(u, v)| format!("a {u} {v}")));
    lines.extend(ports.iter().map(|(name, v)| format!("port {name} {v}")));
    lines.join("\n")
}

pub fn serialize_graph(graph: &OrientedGraph) -> String {
    serialize_document(graph, &BTreeMap::new())
}
