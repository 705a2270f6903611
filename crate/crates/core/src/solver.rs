//! Decision and enumeration of locally-injective homomorphisms.
//!
//! Every instance is compiled into a binary constraint network over the
//! instance vertices: one arc constraint per instance arc, one unary loop
//! constraint per instance loop, and one difference constraint per pair of
//! vertices that share a mode-relevant neighbourhood. Domains are bitsets
//! over the target vertices, so targets are limited to 64 vertices.
//!
//! Search maintains arc consistency after every assignment and checks each
//! neighbourhood for pigeonhole infeasibility. [`decide`] branches on the
//! smallest domain (ties by vertex id) and splits the unassigned vertices
//! into independent components at every node; [`enumerate`] branches in
//! vertex-id order so that witnesses come out lexicographically sorted.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::catalog::{colour_label, CatalogError, Target};
use crate::digraph::{Direction, InjectivityMode, OrientedGraph, VertexId};

/// Largest target the bitset domains can represent.
pub const MAX_TARGET_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("fixed assignment is inconsistent: {0}")]
    InvalidFixedAssignment(String),
    #[error("colouring leaves vertex {0} unassigned")]
    PartialColouring(VertexId),
    #[error("colouring has length {got}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("target has {0} vertices; at most 64 are supported")]
    TargetTooLarge(usize),
    #[error("vertex {vertex} out of range ({n} available)")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// A total or partial map from instance vertices to target vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Colouring {
    assignment: Vec<Option<VertexId>>,
}

impl Colouring {
    pub fn empty(n: usize) -> Self {
        Colouring {
            assignment: vec![None; n],
        }
    }

    pub fn total(colours: Vec<VertexId>) -> Self {
        Colouring {
            assignment: colours.into_iter().map(Some).collect(),
        }
    }

    pub fn from_partial(n: usize, fixed: &BTreeMap<VertexId, VertexId>) -> Self {
        let mut c = Colouring::empty(n);
        for (&v, &col) in fixed {
            c.assignment[v] = Some(col);
        }
        c
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.assignment.get(v).copied().flatten()
    }

    pub fn set(&mut self, v: VertexId, colour: VertexId) {
        self.assignment[v] = Some(colour);
    }

    pub fn is_total(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// The colours of a total colouring.
    pub fn as_total(&self) -> Result<Vec<VertexId>, SolveError> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(v, c)| c.ok_or(SolveError::PartialColouring(v)))
            .collect()
    }

    pub fn assignment(&self) -> &[Option<VertexId>] {
        &self.assignment
    }

    /// Post-composition with a permutation of the target.
    pub fn mapped(&self, perm: &[VertexId]) -> Colouring {
        Colouring {
            assignment: self.assignment.iter().map(|c| c.map(|c| perm[c])).collect(),
        }
    }

    /// `v=colour` pairs separated by spaces, vertices ascending; unassigned
    /// vertices are skipped.
    pub fn witness_line(&self) -> String {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(v, c)| c.map(|c| format!("{v}={}", colour_label(c))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ColourOutOfRange {
        vertex: VertexId,
        colour: VertexId,
    },
    ArcNotPreserved {
        from: VertexId,
        to: VertexId,
    },
    NotInjective {
        centre: VertexId,
        direction: Direction,
        first: VertexId,
        second: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ColourOutOfRange { vertex, colour } => {
                write!(f, "vertex {vertex} has colour {colour} outside the target")
            }
            Violation::ArcNotPreserved { from, to } => {
                write!(f, "arc {from}->{to} is not mapped onto an arc")
            }
            Violation::NotInjective { centre, direction, first, second } => write!(
                f,
                "vertices {first} and {second} share a colour inside the {direction:?} neighbourhood of {centre}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Invalid(Violation),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks a total colouring against arc preservation and the injectivity
/// requirement of `mode`. Reports the first violation found.
pub fn verify_colouring(
    g: &OrientedGraph,
    t: &Target,
    f: &Colouring,
    mode: InjectivityMode,
) -> Result<Verdict, SolveError> {
    if f.len() != g.vertex_count() {
        return Err(SolveError::LengthMismatch {
            expected: g.vertex_count(),
            got: f.len(),
        });
    }
    let colours = f.as_total()?;
    let k = t.vertex_count();
    for (v, &c) in colours.iter().enumerate() {
        if c >= k {
            return Ok(Verdict::Invalid(Violation::ColourOutOfRange {
                vertex: v,
                colour: c,
            }));
        }
    }
    for (u, v) in g.arcs() {
        if !t.graph().has_arc(colours[u], colours[v]) {
            return Ok(Verdict::Invalid(Violation::ArcNotPreserved {
                from: u,
                to: v,
            }));
        }
    }
    for w in 0..g.vertex_count() {
        for &dir in mode.directions() {
            let members = g.members(w, dir);
            let mut seen: BTreeMap<VertexId, VertexId> = BTreeMap::new();
            for &x in &members {
                if let Some(&y) = seen.get(&colours[x]) {
                    return Ok(Verdict::Invalid(Violation::NotInjective {
                        centre: w,
                        direction: dir,
                        first: y,
                        second: x,
                    }));
                }
                seen.insert(colours[x], x);
            }
        }
    }
    Ok(Verdict::Valid)
}

/// Size of the largest neighbourhood of `t` in direction `dir`.
fn max_target_neighbourhood(t: &OrientedGraph, dir: Direction) -> usize {
    (0..t.vertex_count())
        .map(|v| t.members(v, dir).len())
        .max()
        .unwrap_or(0)
}

/// A neighbourhood of the instance that is too large for any neighbourhood
/// of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PigeonholeWitness {
    pub vertex: VertexId,
    pub direction: Direction,
    pub size: usize,
    pub target_max: usize,
}

/// Returns a neighbourhood whose size exceeds the target's maximum in the
/// same direction, if there is one; such an instance has no colouring.
pub fn pigeonhole_screen(
    g: &OrientedGraph,
    t: &Target,
    mode: InjectivityMode,
) -> Option<PigeonholeWitness> {
    for &dir in mode.directions() {
        let target_max = max_target_neighbourhood(t.graph(), dir);
        for v in 0..g.vertex_count() {
            let size = g.members(v, dir).len();
            if size > target_max {
                return Some(PigeonholeWitness {
                    vertex: v,
                    direction: dir,
                    size,
                    target_max,
                });
            }
        }
    }
    None
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub mode: Option<InjectivityMode>,
    /// Pre-coloured instance vertices.
    pub fixed: BTreeMap<VertexId, VertexId>,
    /// Stop enumerating after this many witnesses.
    pub limit: Option<usize>,
    /// Abort with [`SolveStatus::BudgetExhausted`] after this many search nodes.
    pub node_budget: Option<u64>,
    /// Report one witness per orbit of the target's automorphism group.
    pub modulo_automorphisms: bool,
}

impl SolveOptions {
    pub fn new(mode: InjectivityMode) -> Self {
        SolveOptions {
            mode: Some(mode),
            ..Default::default()
        }
    }

    pub fn with_fixed(mut self, fixed: BTreeMap<VertexId, VertexId>) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = Some(limit);
        self
    }

    pub fn with_budget(mut self, nodes: u64) -> Self {
        self.node_budget = Some(nodes);
        self
    }

    fn mode(&self) -> InjectivityMode {
        self.mode.unwrap_or(InjectivityMode::IosSeparate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Sat,
    Unsat,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub witnesses: Vec<Colouring>,
    pub stats: SearchStats,
    /// For automorphism-reduced enumeration: the number of witnesses in the
    /// orbit of each representative.
    pub orbit_sizes: Vec<usize>,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == SolveStatus::Sat
    }
}

/// Distinct restrictions of the witness set to a list of observed vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    /// Colours of the observed vertices, in the order they were given.
    pub colours: Vec<VertexId>,
    /// One full witness with these colours.
    pub example: Colouring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedResult {
    pub status: SolveStatus,
    pub projections: Vec<Projection>,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    /// Arc from the owning vertex to `other`.
    Succ,
    /// Arc from `other` to the owning vertex.
    Pred,
    /// Different colours.
    Diff,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    other: usize,
    rel: Rel,
}

/// Compiled constraint network.
struct Network {
    n: usize,
    out_mask: Vec<u64>,
    in_mask: Vec<u64>,
    adj: Vec<Vec<Edge>>,
    groups: Vec<Vec<usize>>,
    /// Per group: vertices whose in-neighbourhood (`true`) or
    /// out-neighbourhood (`false`) is exactly the group.
    centres: Vec<Vec<(usize, bool)>>,
    var_groups: Vec<Vec<usize>>,
    initial: Vec<u64>,
}

fn bit(c: usize) -> u64 {
    1u64 << c
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let c = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(c)
        }
    })
}

impl Network {
    fn build(
        g: &OrientedGraph,
        t: &Target,
        mode: InjectivityMode,
        fixed: &BTreeMap<VertexId, VertexId>,
    ) -> Result<Network, SolveError> {
        let k = t.vertex_count();
        if k > MAX_TARGET_VERTICES {
            return Err(SolveError::TargetTooLarge(k));
        }
        let n = g.vertex_count();
        let tg = t.graph();
        let mask_of = |vs: &[VertexId]| vs.iter().fold(0u64, |m, &v| m | bit(v));
        let out_mask: Vec<u64> = (0..k).map(|a| mask_of(tg.out_neighbours(a))).collect();
        let in_mask: Vec<u64> = (0..k).map(|a| mask_of(tg.in_neighbours(a))).collect();
        let loop_mask = (0..k)
            .filter(|&a| tg.has_loop(a))
            .fold(0, |m, a| m | bit(a));
        let full = if k == 64 { u64::MAX } else { bit(k) - 1 };

        for (&v, &c) in fixed {
            if v >= n {
                return Err(SolveError::VertexOutOfRange { vertex: v, n });
            }
            if c >= k {
                return Err(SolveError::InvalidFixedAssignment(format!(
                    "colour {c} of vertex {v} is not a target vertex"
                )));
            }
        }

        // Per-vertex capacity: a vertex whose neighbourhood has size s can
        // only take colours whose corresponding neighbourhood has size >= s.
        let mut initial = vec![full; n];
        for (v, dom) in initial.iter_mut().enumerate() {
            if g.has_loop(v) {
                *dom &= loop_mask;
            }
            for &dir in mode.directions() {
                let need = g.members(v, dir).len();
                for a in 0..k {
                    if tg.members(a, dir).len() < need {
                        *dom &= !bit(a);
                    }
                }
            }
        }

        let mut adj = vec![Vec::new(); n];
        for (u, v) in g.arcs() {
            if u == v {
                continue;
            }
            adj[u].push(Edge {
                other: v,
                rel: Rel::Succ,
            });
            adj[v].push(Edge {
                other: u,
                rel: Rel::Pred,
            });
        }
        // Groups are keyed by member set. With injectivity on the union of
        // both neighbourhoods, the in- and out-neighbourhoods are implied
        // groups; they add no difference constraints but let a tight group
        // restrict its centre.
        let mut group_map: BTreeMap<Vec<usize>, Vec<(usize, bool)>> = BTreeMap::new();
        for w in 0..n {
            for &dir in mode.directions() {
                let members = g.members(w, dir);
                if members.len() >= 2 {
                    let entry = group_map.entry(members).or_default();
                    match dir {
                        Direction::In => entry.push((w, true)),
                        Direction::Out => entry.push((w, false)),
                        Direction::Both => {}
                    }
                }
            }
            if mode == InjectivityMode::IotTogether {
                for (dir, is_in) in [(Direction::In, true), (Direction::Out, false)] {
                    let members = g.members(w, dir);
                    if members.len() >= 2 {
                        group_map.entry(members).or_default().push((w, is_in));
                    }
                }
            }
        }
        let (groups, centres): (Vec<Vec<usize>>, Vec<_>) = group_map.into_iter().unzip();
        let mut pairs = HashSet::new();
        let mut var_groups = vec![Vec::new(); n];
        for (gi, grp) in groups.iter().enumerate() {
            for (i, &x) in grp.iter().enumerate() {
                var_groups[x].push(gi);
                for &y in &grp[i + 1..] {
                    if pairs.insert((x, y)) {
                        adj[x].push(Edge {
                            other: y,
                            rel: Rel::Diff,
                        });
                        adj[y].push(Edge {
                            other: x,
                            rel: Rel::Diff,
                        });
                    }
                }
            }
        }

        // Eager validation of the pre-colouring against itself.
        let colour_of = |v: usize| fixed.get(&v).copied();
        for (&v, &c) in fixed {
            if g.has_loop(v) && !tg.has_loop(c) {
                return Err(SolveError::InvalidFixedAssignment(format!(
                    "vertex {v} has a loop but colour {} does not",
                    colour_label(c)
                )));
            }
            for e in &adj[v] {
                let Some(d) = colour_of(e.other) else {
                    continue;
                };
                let bad = match e.rel {
                    Rel::Succ => !tg.has_arc(c, d),
                    Rel::Pred => !tg.has_arc(d, c),
                    Rel::Diff => c == d,
                };
                if bad {
                    return Err(SolveError::InvalidFixedAssignment(format!(
                        "vertices {v}={} and {}={} violate a constraint",
                        colour_label(c),
                        e.other,
                        colour_label(d)
                    )));
                }
            }
        }
        for (&v, &c) in fixed {
            initial[v] &= bit(c);
        }

        Ok(Network {
            n,
            out_mask,
            in_mask,
            adj,
            groups,
            centres,
            var_groups,
            initial,
        })
    }
}

struct Exhausted;

struct Search<'a> {
    net: &'a Network,
    dom: Vec<u64>,
    trail: Vec<(usize, u64)>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    stats: SearchStats,
    budget: Option<u64>,
}

impl<'a> Search<'a> {
    fn new(net: &'a Network, budget: Option<u64>) -> Self {
        Search {
            net,
            dom: net.initial.clone(),
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; net.n],
            stats: SearchStats::default(),
            budget,
        }
    }

    fn set_domain(&mut self, v: usize, new: u64) -> bool {
        let old = self.dom[v];
        if old == new {
            return true;
        }
        self.trail.push((v, old));
        self.dom[v] = new;
        if new == 0 {
            return false;
        }
        if !self.queued[v] {
            self.queued[v] = true;
            self.queue.push(v);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, old) = self.trail.pop().unwrap();
            self.dom[v] = old;
        }
    }

    fn clear_queue(&mut self) {
        for v in self.queue.drain(..) {
            self.queued[v] = false;
        }
    }

    /// Arc consistency plus two neighbourhood rules: a group whose domains
    /// cover fewer colours than it has members fails, and a group covering
    /// exactly as many colours uses all of them, so its centre must be
    /// adjacent to each.
    fn propagate(&mut self) -> bool {
        let net = self.net;
        let mut dirty_groups: Vec<usize> = Vec::new();
        loop {
            while let Some(y) = self.queue.pop() {
                self.queued[y] = false;
                dirty_groups.extend_from_slice(&net.var_groups[y]);
                let dy = self.dom[y];
                let mut image_out = None;
                let mut image_in = None;
                for e in &net.adj[y] {
                    let x = e.other;
                    self.stats.propagations += 1;
                    let allowed = match e.rel {
                        // y -> x: colour of x must be an out-neighbour of some colour of y.
                        Rel::Succ => *image_out
                            .get_or_insert_with(|| bits(dy).fold(0, |m, b| m | net.out_mask[b])),
                        Rel::Pred => *image_in
                            .get_or_insert_with(|| bits(dy).fold(0, |m, b| m | net.in_mask[b])),
                        Rel::Diff => {
                            if dy.count_ones() == 1 {
                                !dy
                            } else {
                                continue;
                            }
                        }
                    };
                    let new = self.dom[x] & allowed;
                    if !self.set_domain(x, new) {
                        self.clear_queue();
                        return false;
                    }
                }
            }
            if dirty_groups.is_empty() {
                return true;
            }
            dirty_groups.sort_unstable();
            dirty_groups.dedup();
            for gi in std::mem::take(&mut dirty_groups) {
                let grp = &net.groups[gi];
                let union = grp.iter().fold(0u64, |m, &v| m | self.dom[v]);
                let colours = union.count_ones() as usize;
                if colours < grp.len() {
                    self.clear_queue();
                    return false;
                }
                if colours > grp.len() {
                    continue;
                }
                for &(w, members_are_in) in &net.centres[gi] {
                    let masks = if members_are_in {
                        &net.out_mask
                    } else {
                        &net.in_mask
                    };
                    let allowed = bits(union).fold(u64::MAX, |m, c| m & masks[c]);
                    self.stats.propagations += 1;
                    if !self.set_domain(w, self.dom[w] & allowed) {
                        self.clear_queue();
                        return false;
                    }
                }
            }
        }
    }

    fn start(&mut self) -> bool {
        if self.dom.contains(&0) {
            return false;
        }
        for v in 0..self.net.n {
            self.queued[v] = true;
            self.queue.push(v);
        }
        self.propagate()
    }

    fn tick(&mut self) -> Result<(), Exhausted> {
        self.stats.nodes += 1;
        match self.budget {
            Some(b) if self.stats.nodes > b => Err(Exhausted),
            _ => Ok(()),
        }
    }

    fn assign(&mut self, v: usize, c: usize) -> bool {
        let ok = self.set_domain(v, bit(c));
        ok && self.propagate()
    }

    fn witness(&self) -> Vec<VertexId> {
        self.dom
            .iter()
            .map(|d| d.trailing_zeros() as usize)
            .collect()
    }

    /// Connected components of the unassigned vertices among `vars`.
    fn components(&self, vars: &[usize]) -> Vec<Vec<usize>> {
        let free: Vec<usize> = vars
            .iter()
            .copied()
            .filter(|&v| self.dom[v].count_ones() > 1)
            .collect();
        let mut in_free = vec![false; self.net.n];
        for &v in &free {
            in_free[v] = true;
        }
        let mut seen = vec![false; self.net.n];
        let mut comps = Vec::new();
        for &s in &free {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for e in &self.net.adj[u] {
                    if in_free[e.other] && !seen[e.other] {
                        seen[e.other] = true;
                        comp.push(e.other);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Finds values for every vertex of `vars`, leaving them assigned on
    /// success. Independent components are solved one after another.
    fn solve(&mut self, vars: &[usize]) -> Result<bool, Exhausted> {
        for comp in self.components(vars) {
            if !self.solve_component(&comp)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn solve_component(&mut self, comp: &[usize]) -> Result<bool, Exhausted> {
        let Some(&v) = comp
            .iter()
            .filter(|&&v| self.dom[v].count_ones() > 1)
            .min_by_key(|&&v| (self.dom[v].count_ones(), v))
        else {
            return Ok(true);
        };
        for c in bits(self.dom[v]) {
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(v, c) && self.solve(comp)? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }

    fn enumerate(&mut self, limit: usize, out: &mut Vec<Vec<VertexId>>) -> Result<(), Exhausted> {
        if out.len() >= limit {
            return Ok(());
        }
        let Some(v) = (0..self.net.n).find(|&v| self.dom[v].count_ones() > 1) else {
            out.push(self.witness());
            return Ok(());
        };
        for c in bits(self.dom[v]) {
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(v, c) {
                self.enumerate(limit, out)?;
            }
            self.undo(mark);
            if out.len() >= limit {
                break;
            }
        }
        Ok(())
    }

    fn project(
        &mut self,
        observed: &[usize],
        all: &[usize],
        out: &mut Vec<Projection>,
    ) -> Result<(), Exhausted> {
        let Some(&v) = observed.iter().find(|&&v| self.dom[v].count_ones() > 1) else {
            let mark = self.trail.len();
            if self.solve(all)? {
                let w = self.witness();
                out.push(Projection {
                    colours: observed.iter().map(|&v| w[v]).collect(),
                    example: Colouring::total(w),
                });
            }
            self.undo(mark);
            return Ok(());
        };
        for c in bits(self.dom[v]) {
            self.tick()?;
            let mark = self.trail.len();
            if self.assign(v, c) {
                self.project(observed, all, out)?;
            }
            self.undo(mark);
        }
        Ok(())
    }
}

fn early_unsat(stats: SearchStats) -> SolveResult {
    SolveResult {
        status: SolveStatus::Unsat,
        witnesses: Vec::new(),
        stats,
        orbit_sizes: Vec::new(),
    }
}

/// Decides whether a colouring extending `options.fixed` exists and returns
/// one witness if so.
pub fn decide(
    g: &OrientedGraph,
    t: &Target,
    options: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let mode = options.mode();
    let net = Network::build(g, t, mode, &options.fixed)?;
    if pigeonhole_screen(g, t, mode).is_some() {
        return Ok(early_unsat(SearchStats::default()));
    }
    let mut search = Search::new(&net, options.node_budget);
    if !search.start() {
        return Ok(early_unsat(search.stats));
    }
    let all: Vec<usize> = (0..net.n).collect();
    let (status, witnesses) = match search.solve(&all) {
        Ok(true) => (SolveStatus::Sat, vec![Colouring::total(search.witness())]),
        Ok(false) => (SolveStatus::Unsat, Vec::new()),
        Err(Exhausted) => (SolveStatus::BudgetExhausted, Vec::new()),
    };
    Ok(SolveResult {
        status,
        witnesses,
        stats: search.stats,
        orbit_sizes: Vec::new(),
    })
}

/// All colourings extending `options.fixed` (up to `options.limit`), in
/// lexicographic order. With `modulo_automorphisms` set this delegates to
/// [`enumerate_mod_aut`].
pub fn enumerate(
    g: &OrientedGraph,
    t: &Target,
    options: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    if options.modulo_automorphisms {
        return enumerate_mod_aut(g, t, options);
    }
    enumerate_all(g, t, options, options.limit.unwrap_or(usize::MAX))
}

fn enumerate_all(
    g: &OrientedGraph,
    t: &Target,
    options: &SolveOptions,
    limit: usize,
) -> Result<SolveResult, SolveError> {
    let mode = options.mode();
    let net = Network::build(g, t, mode, &options.fixed)?;
    if pigeonhole_screen(g, t, mode).is_some() {
        return Ok(early_unsat(SearchStats::default()));
    }
    let mut search = Search::new(&net, options.node_budget);
    if !search.start() {
        return Ok(early_unsat(search.stats));
    }
    let mut found = Vec::new();
    let exhausted = search.enumerate(limit, &mut found).is_err();
    let status = if exhausted {
        SolveStatus::BudgetExhausted
    } else if found.is_empty() {
        SolveStatus::Unsat
    } else {
        SolveStatus::Sat
    };
    Ok(SolveResult {
        status,
        witnesses: found.into_iter().map(Colouring::total).collect(),
        stats: search.stats,
        orbit_sizes: Vec::new(),
    })
}

/// One representative per orbit of the witness set under post-composition
/// with automorphisms of `t`. Orbits are taken inside the witness set, so a
/// pre-colouring that breaks the symmetry simply yields smaller orbits.
/// Representatives are the lexicographically smallest member of each orbit
/// and are returned in ascending order; `orbit_sizes` is aligned with them.
pub fn enumerate_mod_aut(
    g: &OrientedGraph,
    t: &Target,
    options: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let auts = t.automorphisms()?.to_vec();
    let full = enumerate_all(g, t, options, usize::MAX)?;
    if full.status == SolveStatus::BudgetExhausted {
        return Ok(full);
    }
    let mut orbits: BTreeMap<Colouring, (Colouring, usize)> = BTreeMap::new();
    for w in &full.witnesses {
        let key = auts
            .iter()
            .map(|p| w.mapped(p))
            .min()
            .expect("identity is an automorphism");
        let entry = orbits.entry(key).or_insert_with(|| (w.clone(), 0));
        if *w < entry.0 {
            entry.0 = w.clone();
        }
        entry.1 += 1;
    }
    let mut reps: Vec<(Colouring, usize)> = orbits.into_values().collect();
    reps.sort();
    let limit = options.limit.unwrap_or(usize::MAX);
    reps.truncate(limit);
    let (witnesses, orbit_sizes) = reps.into_iter().unzip();
    Ok(SolveResult {
        status: full.status,
        witnesses,
        stats: full.stats,
        orbit_sizes,
    })
}

/// Distinct colour tuples taken by `observed` over all colourings extending
/// `options.fixed`, in lexicographic order, each with one full witness.
pub fn enumerate_projected(
    g: &OrientedGraph,
    t: &Target,
    options: &SolveOptions,
    observed: &[VertexId],
) -> Result<ProjectedResult, SolveError> {
    let mode = options.mode();
    let net = Network::build(g, t, mode, &options.fixed)?;
    for &v in observed {
        if v >= net.n {
            return Err(SolveError::VertexOutOfRange {
                vertex: v,
                n: net.n,
            });
        }
    }
    let unsat = |stats| ProjectedResult {
        status: SolveStatus::Unsat,
        projections: Vec::new(),
        stats,
    };
    if pigeonhole_screen(g, t, mode).is_some() {
        return Ok(unsat(SearchStats::default()));
    }
    let mut search = Search::new(&net, options.node_budget);
    if !search.start() {
        return Ok(unsat(search.stats));
    }
    let all: Vec<usize> = (0..net.n).collect();
    let mut out = Vec::new();
    let exhausted = search.project(observed, &all, &mut out).is_err();
    let status = if exhausted {
        SolveStatus::BudgetExhausted
    } else if out.is_empty() {
        SolveStatus::Unsat
    } else {
        SolveStatus::Sat
    };
    Ok(ProjectedResult {
        status,
        projections: out,
        stats: search.stats,
    })
}
