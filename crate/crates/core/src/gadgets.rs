//! Gadgets as data: loading, composition, contract checking and synthesis.
//!
//! A gadget is an edge-list file with named ports plus a `.contract` sidecar
//! listing facts that must hold across all of its colourings. Compositions
//! (several gadget copies glued at ports, or chained into rings) carry a
//! [`ScopeMap`] so that contracts can name vertices as `<copy>.<label>`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::{colour_label, named_target_by_str, parse_colour, CatalogError};
use crate::digraph::{
    disjoint_union, identify_vertices, parse_document, GraphError, InjectivityMode, OrientedGraph,
    VertexId,
};
use crate::solver::{
    decide, enumerate_projected, Colouring, SearchStats, SolveError, SolveOptions, SolveStatus,
};

/// Environment variable that overrides the gadget asset directory.
pub const ASSET_DIR_ENV: &str = "INJHOM_ASSET_DIR";

/// Search-node budget used when verifying contracts.
pub const DEFAULT_VERIFY_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("gadget asset `{name}` not found at {}", path.display())]
    AssetMissing { name: String, path: PathBuf },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed contract (line {line}): {reason}")]
    ContractMalformed { line: usize, reason: String },
    #[error("unknown port or label `{label}` in scope `{scope}`")]
    UnknownPort { scope: String, label: String },
    #[error("unresolvable vertex reference `{0}`")]
    UnresolvedRef(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("no gadget found within the size bound")]
    NotFound,
    #[error("gadget `{name}`: {source}")]
    Graph { name: String, source: GraphError },
    #[error(transparent)]
    Surgery(#[from] GraphError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// A reference to a vertex inside a contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexRef {
    /// A vertex id or port name; only valid when there is a single scope.
    Plain(String),
    /// `<scope>.<label>`.
    Scoped(String, String),
    /// `*.<label>`: the label in every scope that has it.
    Wildcard(String),
}

impl VertexRef {
    pub fn parse(s: &str) -> VertexRef {
        match s.split_once('.') {
            Some(("*", label)) => VertexRef::Wildcard(label.to_string()),
            Some((scope, label)) => VertexRef::Scoped(scope.to_string(), label.to_string()),
            None => VertexRef::Plain(s.to_string()),
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexRef::Plain(l) => write!(f, "{l}"),
            VertexRef::Scoped(s, l) => write!(f, "{s}.{l}"),
            VertexRef::Wildcard(l) => write!(f, "*.{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fact {
    NonEmpty,
    Forced(VertexRef, VertexId),
    Equal(VertexRef, VertexRef),
    Range(VertexRef, BTreeSet<VertexId>),
    Extends(Vec<(VertexRef, VertexId)>),
}

fn colour_list(cs: &BTreeSet<VertexId>) -> String {
    cs.iter()
        .map(|&c| colour_label(c))
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::NonEmpty => write!(f, "nonempty"),
            Fact::Forced(v, c) => write!(f, "forced {v} {}", colour_label(*c)),
            Fact::Equal(u, v) => write!(f, "equal {u} {v}"),
            Fact::Range(v, cs) => write!(f, "range {v} {}", colour_list(cs)),
            Fact::Extends(pairs) => {
                let body: Vec<String> = pairs
                    .iter()
                    .map(|(v, c)| format!("{v}={}", colour_label(*c)))
                    .collect();
                write!(f, "extends {}", body.join(","))
            }
        }
    }
}

/// The checkable content of a forced-colouring statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contract {
    pub target: String,
    pub mode: InjectivityMode,
    /// Colourings are normalised so that this vertex gets this colour; the
    /// target must be vertex-transitive.
    pub anchor: Option<(VertexRef, VertexId)>,
    pub facts: Vec<Fact>,
}

impl Contract {
    pub fn parse(text: &str) -> Result<Contract, GadgetError> {
        let mut target = None;
        let mut mode = None;
        let mut anchor = None;
        let mut facts = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| GadgetError::ContractMalformed {
                line: line_no,
                reason,
            };
            let colour = |s: &str| parse_colour(s).ok_or_else(|| bad(format!("bad colour `{s}`")));
            let toks: Vec<&str> = line.split_whitespace().collect();
            let arity = |k: usize| {
                if toks.len() == k + 1 {
                    Ok(())
                } else {
                    Err(bad(format!("`{}` takes {k} argument(s)", toks[0])))
                }
            };
            match toks[0] {
                "target" => {
                    arity(1)?;
                    target = Some(toks[1].to_string());
                }
                "mode" => {
                    arity(1)?;
                    mode = Some(
                        InjectivityMode::parse(toks[1])
                            .ok_or_else(|| bad(format!("unknown mode `{}`", toks[1])))?,
                    );
                }
                "anchor" => {
                    arity(2)?;
                    anchor = Some((VertexRef::parse(toks[1]), colour(toks[2])?));
                }
                "nonempty" => {
                    arity(0)?;
                    facts.push(Fact::NonEmpty);
                }
                "forced" => {
                    arity(2)?;
                    facts.push(Fact::Forced(VertexRef::parse(toks[1]), colour(toks[2])?));
                }
                "equal" => {
                    arity(2)?;
                    let (u, v) = (VertexRef::parse(toks[1]), VertexRef::parse(toks[2]));
                    if matches!(u, VertexRef::Wildcard(_)) || matches!(v, VertexRef::Wildcard(_)) {
                        return Err(bad("`equal` does not accept wildcards".into()));
                    }
                    facts.push(Fact::Equal(u, v));
                }
                "range" => {
                    arity(2)?;
                    let cs = toks[2]
                        .split(',')
                        .map(colour)
                        .collect::<Result<BTreeSet<_>, _>>()?;
                    facts.push(Fact::Range(VertexRef::parse(toks[1]), cs));
                }
                "extends" => {
                    arity(1)?;
                    let mut pairs = Vec::new();
                    for item in toks[1].split(',') {
                        let (v, c) = item.split_once('=').ok_or_else(|| {
                            bad(format!("expected `<vertex>=<colour>`, got `{item}`"))
                        })?;
                        let r = VertexRef::parse(v);
                        if matches!(r, VertexRef::Wildcard(_)) {
                            return Err(bad("`extends` does not accept wildcards".into()));
                        }
                        pairs.push((r, colour(c)?));
                    }
                    facts.push(Fact::Extends(pairs));
                }
                other => return Err(bad(format!("unknown fact `{other}`"))),
            }
        }
        let missing = |what: &str| GadgetError::ContractMalformed {
            line: 0,
            reason: format!("missing `{what}` line"),
        };
        Ok(Contract {
            target: target.ok_or_else(|| missing("target"))?,
            mode: mode.ok_or_else(|| missing("mode"))?,
            anchor,
            facts,
        })
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![
            format!("target {}", self.target),
            format!("mode {}", self.mode.short_name()),
        ];
        if let Some((v, c)) = &self.anchor {
            lines.push(format!("anchor {v} {}", colour_label(*c)));
        }
        lines.extend(self.facts.iter().map(|f| f.to_string()));
        lines.join("\n")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Reconstructed,
    Synthesized,
}

#[derive(Debug, Clone)]
pub struct GadgetSpec {
    pub name: String,
    pub graph: OrientedGraph,
    pub ports: BTreeMap<String, VertexId>,
    pub contract: Contract,
    pub provenance: Provenance,
}

impl GadgetSpec {
    /// Resolves a numeric vertex label or a port name.
    pub fn label(&self, label: &str) -> Option<VertexId> {
        if let Some(&v) = self.ports.get(label) {
            return Some(v);
        }
        label
            .parse()
            .ok()
            .filter(|&v| v < self.graph.vertex_count())
    }

    pub fn port(&self, name: &str) -> Result<VertexId, GadgetError> {
        self.ports
            .get(name)
            .copied()
            .ok_or_else(|| GadgetError::UnknownPort {
                scope: self.name.clone(),
                label: name.to_string(),
            })
    }

    /// Ports whose names start with `prefix`, in name order.
    pub fn ports_with_prefix(&self, prefix: &str) -> Vec<VertexId> {
        self.ports
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, &v)| v)
            .collect()
    }

    pub fn scope(&self) -> ScopeMap {
        let mut s = ScopeMap::default();
        s.add_copy(
            &self.name,
            self,
            0,
            &(0..self.graph.vertex_count()).collect::<Vec<_>>(),
        );
        s
    }
}

/// Directory holding `<name>.graph` and `<name>.contract` files.
#[derive(Debug, Clone)]
pub struct AssetStore {
    dir: PathBuf,
}

impl AssetStore {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AssetStore { dir: dir.into() }
    }

    /// `$INJHOM_ASSET_DIR` if set, else the assets shipped with the crate.
    pub fn from_env() -> Self {
        match std::env::var_os(ASSET_DIR_ENV) {
            Some(dir) => AssetStore::new(dir),
            None => AssetStore::new(Self::bundled_dir()),
        }
    }

    pub fn bundled_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("assets")
            .join("gadgets")
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn read(&self, name: &str, ext: &str) -> Result<String, GadgetError> {
        let path = self.dir.join(format!("{name}.{ext}"));
        match std::fs::read_to_string(&path) {
            Ok(s) => Ok(s),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(GadgetError::AssetMissing {
                name: name.to_string(),
                path,
            }),
            Err(source) => Err(GadgetError::Io { path, source }),
        }
    }

    pub fn load_gadget(&self, name: &str) -> Result<GadgetSpec, GadgetError> {
        let doc =
            parse_document(&self.read(name, "graph")?).map_err(|source| GadgetError::Graph {
                name: name.to_string(),
                source,
            })?;
        let contract = Contract::parse(&self.read(name, "contract")?)?;
        let provenance = if doc.comments.iter().any(|c| c.contains("synthesized")) {
            Provenance::Synthesized
        } else {
            Provenance::Reconstructed
        };
        let mut seen = BTreeSet::new();
        for (port, &v) in &doc.ports {
            if !seen.insert(v) {
                return Err(GadgetError::Graph {
                    name: name.to_string(),
                    source: GraphError::DuplicatePort { name: port.clone() },
                });
            }
        }
        Ok(GadgetSpec {
            name: name.to_string(),
            graph: doc.graph,
            ports: doc.ports,
            contract,
            provenance,
        })
    }

    /// Names of all gadgets in the directory, sorted.
    pub fn gadget_names(&self) -> Result<Vec<String>, GadgetError> {
        let entries = std::fs::read_dir(&self.dir).map_err(|source| GadgetError::Io {
            path: self.dir.clone(),
            source,
        })?;
        let mut names: Vec<String> = entries
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let p = e.path();
                (p.extension()? == "graph").then(|| p.file_stem()?.to_str().map(String::from))?
            })
            .collect();
        names.sort();
        Ok(names)
    }
}

/// Loads a gadget from the default asset store.
pub fn load_gadget(name: &str) -> Result<GadgetSpec, GadgetError> {
    AssetStore::from_env().load_gadget(name)
}

/// Resolves `(scope, label)` pairs to vertices of a composed graph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScopeMap {
    scopes: Vec<String>,
    labels: BTreeMap<(String, String), VertexId>,
}

impl ScopeMap {
    /// Registers every vertex label and port of `spec` under `scope`, where
    /// local vertex `v` ends up at `map[offset + v]`.
    fn add_copy(&mut self, scope: &str, spec: &GadgetSpec, offset: usize, map: &[VertexId]) {
        if !self.scopes.iter().any(|s| s == scope) {
            self.scopes.push(scope.to_string());
        }
        for v in 0..spec.graph.vertex_count() {
            self.labels
                .insert((scope.to_string(), v.to_string()), map[offset + v]);
        }
        for (port, &v) in &spec.ports {
            self.labels
                .insert((scope.to_string(), port.clone()), map[offset + v]);
        }
    }

    pub fn insert(&mut self, scope: &str, label: &str, v: VertexId) {
        if !self.scopes.iter().any(|s| s == scope) {
            self.scopes.push(scope.to_string());
        }
        self.labels
            .insert((scope.to_string(), label.to_string()), v);
    }

    pub fn scopes(&self) -> &[String] {
        &self.scopes
    }

    pub fn get(&self, scope: &str, label: &str) -> Option<VertexId> {
        self.labels
            .get(&(scope.to_string(), label.to_string()))
            .copied()
    }

    pub fn require(&self, scope: &str, label: &str) -> Result<VertexId, GadgetError> {
        self.get(scope, label)
            .ok_or_else(|| GadgetError::UnknownPort {
                scope: scope.to_string(),
                label: label.to_string(),
            })
    }

    /// Expands a reference into `(display name, vertex)` pairs.
    pub fn resolve(&self, r: &VertexRef) -> Result<Vec<(String, VertexId)>, GadgetError> {
        match r {
            VertexRef::Plain(label) => {
                if self.scopes.len() != 1 {
                    return Err(GadgetError::UnresolvedRef(r.to_string()));
                }
                Ok(vec![(label.clone(), self.require(&self.scopes[0], label)?)])
            }
            VertexRef::Scoped(scope, label) => {
                Ok(vec![(r.to_string(), self.require(scope, label)?)])
            }
            VertexRef::Wildcard(label) => {
                let found: Vec<_> = self
                    .scopes
                    .iter()
                    .filter_map(|s| Some((format!("{s}.{label}"), self.get(s, label)?)))
                    .collect();
                if found.is_empty() {
                    return Err(GadgetError::UnresolvedRef(r.to_string()));
                }
                Ok(found)
            }
        }
    }

    fn relabelled(&self, map: &[VertexId]) -> ScopeMap {
        ScopeMap {
            scopes: self.scopes.clone(),
            labels: self
                .labels
                .iter()
                .map(|(k, &v)| (k.clone(), map[v]))
                .collect(),
        }
    }
}

/// A graph assembled from gadget copies.
#[derive(Debug, Clone)]
pub struct Composition {
    pub graph: OrientedGraph,
    pub scope: ScopeMap,
}

/// `(scope, port-or-label)`.
pub type ScopedLabel<'a> = (&'a str, &'a str);

impl Composition {
    /// Adds a fresh isolated vertex registered as `scope.label`.
    pub fn add_vertex(&mut self, scope: &str, label: &str) -> VertexId {
        let v = self.graph.vertex_count();
        self.graph = OrientedGraph::from_arcs_dedup(v + 1, self.graph.arcs()).expect("same arcs");
        self.scope.insert(scope, label, v);
        v
    }

    pub fn add_arcs(&mut self, arcs: &[(VertexId, VertexId)]) -> Result<(), GadgetError> {
        let n = self.graph.vertex_count();
        let all: Vec<_> = self.graph.arcs().chain(arcs.iter().copied()).collect();
        self.graph = OrientedGraph::from_arcs_dedup(n, all)?;
        Ok(())
    }

    pub fn add_scoped_arc(
        &mut self,
        from: ScopedLabel,
        to: ScopedLabel,
    ) -> Result<(), GadgetError> {
        let u = self.scope.require(from.0, from.1)?;
        let v = self.scope.require(to.0, to.1)?;
        self.add_arcs(&[(u, v)])
    }
}

/// Disjoint union of the given gadget copies followed by identification of
/// port pairs. In each pair the first vertex is kept and the second merged
/// into it.
pub fn compose(
    parts: &[(&str, &GadgetSpec)],
    identifications: &[(ScopedLabel, ScopedLabel)],
) -> Result<Composition, GadgetError> {
    let graphs: Vec<&OrientedGraph> = parts.iter().map(|(_, s)| &s.graph).collect();
    let (union, offsets) = disjoint_union(&graphs);
    let identity: Vec<VertexId> = (0..union.vertex_count()).collect();
    let mut scope = ScopeMap::default();
    for ((name, spec), &off) in parts.iter().zip(&offsets) {
        scope.add_copy(name, spec, off, &identity);
    }
    let mut pairs = Vec::with_capacity(identifications.len());
    for &(keep, merge) in identifications {
        pairs.push((
            scope.require(keep.0, keep.1)?,
            scope.require(merge.0, merge.1)?,
        ));
    }
    let (graph, map) = identify_vertices(&union, &pairs)?;
    Ok(Composition {
        graph,
        scope: scope.relabelled(&map),
    })
}

/// `n` copies of `spec` scoped `0..n`, with an arc from every `out` port of
/// copy `i` to the `input` port of copy `i + 1 (mod n)`.
pub fn ring(
    spec: &GadgetSpec,
    n: usize,
    outs: &[&str],
    input: &str,
) -> Result<Composition, GadgetError> {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let parts: Vec<(&str, &GadgetSpec)> = names.iter().map(|s| (s.as_str(), spec)).collect();
    let mut comp = compose(&parts, &[])?;
    let mut arcs = Vec::new();
    for i in 0..n {
        let next = (i + 1) % n;
        for out in outs {
            arcs.push((
                comp.scope.require(&names[i], out)?,
                comp.scope.require(&names[next], input)?,
            ));
        }
    }
    comp.add_arcs(&arcs)?;
    Ok(comp)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactOutcome {
    Pass,
    Fail {
        reason: String,
        /// A valid colouring contradicting the fact, when one exists.
        counterexample: Option<Colouring>,
    },
    /// The node budget ran out before the fact could be decided.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactReport {
    pub fact: String,
    pub outcome: FactOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub id: String,
    pub facts: Vec<FactReport>,
    /// Distinct colourings of the vertices mentioned by the contract.
    pub witness_count: usize,
    pub stats: SearchStats,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.facts.iter().all(|f| f.outcome == FactOutcome::Pass)
    }

    pub fn inconclusive(&self) -> bool {
        self.facts
            .iter()
            .any(|f| f.outcome == FactOutcome::Inconclusive)
    }

    /// One line per fact: `PASS`, `FAIL` or `INCONCLUSIVE` followed by the fact.
    pub fn table(&self) -> String {
        let mut lines = vec![format!(
            "{} ({} observed colourings)",
            self.id, self.witness_count
        )];
        for f in &self.facts {
            let status = match &f.outcome {
                FactOutcome::Pass => "PASS".to_string(),
                FactOutcome::Fail { reason, .. } => format!("FAIL ({reason})"),
                FactOutcome::Inconclusive => "INCONCLUSIVE".to_string(),
            };
            lines.push(format!("  {:<40} {status}", f.fact));
        }
        lines.join("\n")
    }
}

enum Check {
    NonEmpty,
    Forced(VertexId, VertexId),
    Equal(VertexId, VertexId),
    Range(VertexId, BTreeSet<VertexId>),
    Extends(BTreeMap<VertexId, VertexId>),
}

/// Checks every fact of `contract` against the full set of colourings of
/// `g` (normalised by the anchor, if any). Vertices named by forced, equal
/// and range facts are enumerated exhaustively; extension facts are decided
/// with the partial colouring fixed.
pub fn verify_contract(
    id: &str,
    g: &OrientedGraph,
    contract: &Contract,
    scope: &ScopeMap,
    budget: Option<u64>,
) -> Result<VerificationReport, GadgetError> {
    let target = named_target_by_str(&contract.target)?;
    let mut base_fixed = BTreeMap::new();
    if let Some((r, c)) = &contract.anchor {
        if !target.is_vertex_transitive()? {
            return Err(GadgetError::ContractMalformed {
                line: 0,
                reason: "anchor needs a vertex-transitive target".into(),
            });
        }
        if *c >= target.vertex_count() {
            return Err(GadgetError::ContractMalformed {
                line: 0,
                reason: format!("anchor colour {} is not in the target", colour_label(*c)),
            });
        }
        for (_, v) in scope.resolve(r)? {
            base_fixed.insert(v, *c);
        }
    }

    let mut checks: Vec<(String, Check)> = Vec::new();
    for fact in &contract.facts {
        match fact {
            Fact::NonEmpty => checks.push((fact.to_string(), Check::NonEmpty)),
            Fact::Forced(r, c) => {
                for (name, v) in scope.resolve(r)? {
                    checks.push((
                        format!("forced {name} {}", colour_label(*c)),
                        Check::Forced(v, *c),
                    ));
                }
            }
            Fact::Equal(a, b) => {
                let (_, u) = scope.resolve(a)?[0].clone();
                let (_, v) = scope.resolve(b)?[0].clone();
                checks.push((fact.to_string(), Check::Equal(u, v)));
            }
            Fact::Range(r, cs) => {
                for (name, v) in scope.resolve(r)? {
                    checks.push((
                        format!("range {name} {}", colour_list(cs)),
                        Check::Range(v, cs.clone()),
                    ));
                }
            }
            Fact::Extends(pairs) => {
                let mut partial = BTreeMap::new();
                for (r, c) in pairs {
                    let (_, v) = scope.resolve(r)?[0].clone();
                    if partial.insert(v, *c).is_some_and(|old| old != *c) {
                        return Err(GadgetError::ContractMalformed {
                            line: 0,
                            reason: format!("`{fact}` assigns two colours to one vertex"),
                        });
                    }
                }
                checks.push((fact.to_string(), Check::Extends(partial)));
            }
        }
    }

    let mut observed: Vec<VertexId> = Vec::new();
    for (_, check) in &checks {
        let vs: Vec<VertexId> = match check {
            Check::Forced(v, _) | Check::Range(v, _) => vec![*v],
            Check::Equal(u, v) => vec![*u, *v],
            _ => vec![],
        };
        for v in vs {
            if !observed.contains(&v) {
                observed.push(v);
            }
        }
    }
    let position = |v: VertexId| observed.iter().position(|&o| o == v).expect("observed");

    let mut options = SolveOptions::new(contract.mode).with_fixed(base_fixed.clone());
    options.node_budget = budget;
    let projected = enumerate_projected(g, &target, &options, &observed)?;
    let mut stats = projected.stats;
    let exhausted = projected.status == SolveStatus::BudgetExhausted;
    let projections = &projected.projections;

    let mut facts = Vec::new();
    for (name, check) in checks {
        let empty_fail = || FactOutcome::Fail {
            reason: "no colourings".into(),
            counterexample: None,
        };
        // First projection violating a predicate, as a counterexample.
        let first_bad = |bad: &dyn Fn(&[VertexId]) -> bool, reason: &str| match projections
            .iter()
            .find(|p| bad(&p.colours))
        {
            Some(p) => FactOutcome::Fail {
                reason: reason.to_string(),
                counterexample: Some(p.example.clone()),
            },
            None => FactOutcome::Pass,
        };
        let outcome = match &check {
            Check::Extends(partial) => {
                let mut fixed = base_fixed.clone();
                let mut clash = false;
                for (&v, &c) in partial {
                    clash |= fixed.insert(v, c).is_some_and(|old| old != c);
                }
                if clash {
                    FactOutcome::Fail {
                        reason: "conflicts with the anchor".into(),
                        counterexample: None,
                    }
                } else {
                    let mut opts = SolveOptions::new(contract.mode).with_fixed(fixed);
                    opts.node_budget = budget;
                    match decide(g, &target, &opts) {
                        Ok(r) => {
                            stats.nodes += r.stats.nodes;
                            stats.propagations += r.stats.propagations;
                            match r.status {
                                SolveStatus::Sat => FactOutcome::Pass,
                                SolveStatus::Unsat => FactOutcome::Fail {
                                    reason: "no completion".into(),
                                    counterexample: None,
                                },
                                SolveStatus::BudgetExhausted => FactOutcome::Inconclusive,
                            }
                        }
                        Err(SolveError::InvalidFixedAssignment(msg)) => FactOutcome::Fail {
                            reason: msg,
                            counterexample: None,
                        },
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            _ if exhausted => FactOutcome::Inconclusive,
            _ if projections.is_empty() => empty_fail(),
            Check::NonEmpty => FactOutcome::Pass,
            Check::Forced(v, c) => {
                let i = position(*v);
                first_bad(&|cols| cols[i] != *c, "another colour occurs")
            }
            Check::Equal(u, v) => {
                let (i, j) = (position(*u), position(*v));
                first_bad(&|cols| cols[i] != cols[j], "colours differ")
            }
            Check::Range(v, cs) => {
                let i = position(*v);
                first_bad(&|cols| !cs.contains(&cols[i]), "colour outside the range")
            }
        };
        facts.push(FactReport {
            fact: name,
            outcome,
        });
    }
    Ok(VerificationReport {
        id: id.to_string(),
        facts,
        witness_count: projections.len(),
        stats,
    })
}

/// Verifies a gadget against its own sidecar contract.
pub fn verify_gadget(
    spec: &GadgetSpec,
    budget: Option<u64>,
) -> Result<VerificationReport, GadgetError> {
    verify_contract(
        &spec.name,
        &spec.graph,
        &spec.contract,
        &spec.scope(),
        budget,
    )
}

/// A graph with a contract, ready to verify.
#[derive(Debug, Clone)]
pub struct CheckCase {
    pub id: String,
    pub graph: OrientedGraph,
    pub scope: ScopeMap,
    pub contract: Contract,
}

impl CheckCase {
    pub fn verify(&self, budget: Option<u64>) -> Result<VerificationReport, GadgetError> {
        verify_contract(&self.id, &self.graph, &self.contract, &self.scope, budget)
    }
}

/// Named forced-colouring checks and the gadgets they exercise.
pub struct CheckInfo {
    pub name: &'static str,
    pub gadgets: &'static [&'static str],
    pub summary: &'static str,
}

pub const CHECKS: &[CheckInfo] = &[
    CheckInfo {
        name: "hx-forced",
        gadgets: &["Hx"],
        summary: "Hx into T4 (ios): 3, 13, 23 forced a and 31 forced d; squares take b, c, d in any order",
    },
    CheckInfo {
        name: "he-equal",
        gadgets: &["He", "Hx"],
        summary: "He glued to two Hx squares (all 9 choices): both ends share a colour from b, c, d",
    },
    CheckInfo {
        name: "jv-ring",
        gadgets: &["Jv"],
        summary: "rings of 2 and 3 Jv copies into T5 (ios): 0, 4, 8, 12, 16 forced a, c, e, b, d; attached vertices range over b, d, e",
    },
    CheckInfo {
        name: "fx-forced",
        gadgets: &["Fx"],
        summary: "Fx into T4 (iot): 0 forced b and 4 forced a; squares take b, c, d in any order",
    },
    CheckInfo {
        name: "fe-forced",
        gadgets: &["Fe"],
        summary: "Fe into T4 (iot): 7 forced a and 9 forced b",
    },
    CheckInfo {
        name: "fe-equal",
        gadgets: &["Fe", "Fx"],
        summary: "Fe glued to two Fx squares (all 9 choices): both ends share a colour from b, c, d",
    },
    CheckInfo {
        name: "dv-ring",
        gadgets: &["Dv"],
        summary: "rings of 2 and 3 Dv copies into T5 (iot): 0, 4, 8 forced d, a, c; attached vertices range over b, d, e",
    },
];

fn sidecar_case(spec: &GadgetSpec) -> CheckCase {
    CheckCase {
        id: spec.name.clone(),
        graph: spec.graph.clone(),
        scope: spec.scope(),
        contract: spec.contract.clone(),
    }
}

fn contract_text(lines: &[String]) -> Result<Contract, GadgetError> {
    Contract::parse(&lines.join("\n"))
}

/// Edge gadget glued between squares of two vertex gadgets, for every
/// choice of squares.
fn edge_cases(
    store: &AssetStore,
    edge: &str,
    vertex: &str,
    mode: &str,
) -> Result<Vec<CheckCase>, GadgetError> {
    let e = store.load_gadget(edge)?;
    let x = store.load_gadget(vertex)?;
    let squares: Vec<&String> = x.ports.keys().filter(|k| k.starts_with("square")).collect();
    let mut contract = vec![
        "target T4".to_string(),
        format!("mode {mode}"),
        "nonempty".into(),
        "equal e.left e.right".into(),
        "range e.left b,c,d".into(),
        "range e.right b,c,d".into(),
    ];
    for c in ["b", "c", "d"] {
        contract.push(format!("extends e.left={c},e.right={c}"));
    }
    let contract = contract_text(&contract)?;
    let mut cases = Vec::new();
    for sl in &squares {
        for sr in &squares {
            let comp = compose(
                &[("e", &e), ("u", &x), ("v", &x)],
                &[(("u", sl), ("e", "left")), (("v", sr), ("e", "right"))],
            )?;
            cases.push(CheckCase {
                id: format!("{edge}+{vertex}[{sl},{sr}]"),
                graph: comp.graph,
                scope: comp.scope,
                contract: contract.clone(),
            });
        }
    }
    Ok(cases)
}

/// Rings of 2 and 3 copies with forced colours on a chain of vertices, plus
/// a 3-ring with a new vertex hanging off each attachment port.
#[allow(clippy::too_many_arguments)]
fn ring_cases(
    store: &AssetStore,
    name: &str,
    outs: &[&str],
    mode: &str,
    anchor: &str,
    forced: &[(&str, &str)],
    attached_anchor: &str,
) -> Result<Vec<CheckCase>, GadgetError> {
    let spec = store.load_gadget(name)?;
    let outs: Vec<String> = outs.iter().map(|s| s.to_string()).collect();
    let out_refs: Vec<&str> = outs.iter().map(String::as_str).collect();
    let mut cases = Vec::new();
    for n in [2, 3] {
        let comp = ring(&spec, n, &out_refs, "in")?;
        let mut lines = vec![
            "target T5".to_string(),
            format!("mode {mode}"),
            format!("anchor {anchor}"),
            "nonempty".into(),
        ];
        lines.extend(forced.iter().map(|(v, c)| format!("forced *.{v} {c}")));
        cases.push(CheckCase {
            id: format!("{name}-ring{n}"),
            graph: comp.graph,
            scope: comp.scope,
            contract: contract_text(&lines)?,
        });
    }
    let mut comp = ring(&spec, 3, &out_refs, "in")?;
    for i in 0..3 {
        let scope = i.to_string();
        let w = comp.add_vertex(&scope, "w");
        let a = comp.scope.require(&scope, "attach")?;
        comp.add_arcs(&[(a, w)])?;
    }
    let mut lines = vec![
        "target T5".to_string(),
        format!("mode {mode}"),
        format!("anchor {attached_anchor}"),
        "nonempty".into(),
        "range *.w b,d,e".into(),
    ];
    for c in ["b", "d", "e"] {
        lines.push(format!("extends 0.w={c}"));
    }
    cases.push(CheckCase {
        id: format!("{name}-ring3-attached"),
        graph: comp.graph,
        scope: comp.scope,
        contract: contract_text(&lines)?,
    });
    Ok(cases)
}

/// The graphs and contracts behind a named check.
pub fn check_cases(store: &AssetStore, check: &str) -> Result<Vec<CheckCase>, GadgetError> {
    match check {
        "hx-forced" => Ok(vec![sidecar_case(&store.load_gadget("Hx")?)]),
        "fx-forced" => Ok(vec![sidecar_case(&store.load_gadget("Fx")?)]),
        "fe-forced" => Ok(vec![sidecar_case(&store.load_gadget("Fe")?)]),
        "he-equal" => edge_cases(store, "He", "Hx", "ios"),
        "fe-equal" => edge_cases(store, "Fe", "Fx", "iot"),
        "jv-ring" => ring_cases(
            store,
            "Jv",
            &["out0", "out1", "out2"],
            "ios",
            "0.0 a",
            &[("0", "a"), ("4", "c"), ("8", "e"), ("12", "b"), ("16", "d")],
            "0.8 a",
        ),
        "dv-ring" => ring_cases(
            store,
            "Dv",
            &["out"],
            "iot",
            "0.0 d",
            &[("0", "d"), ("4", "a"), ("8", "c")],
            "0.0 d",
        ),
        other => Err(GadgetError::UnknownCheck(other.to_string())),
    }
}

pub fn run_check(
    store: &AssetStore,
    check: &str,
    budget: Option<u64>,
) -> Result<Vec<VerificationReport>, GadgetError> {
    check_cases(store, check)?
        .iter()
        .map(|c| c.verify(budget))
        .collect()
}

/// Every named check, plus the sidecar contract of every gadget not
/// already covered by one.
pub fn all_cases(store: &AssetStore) -> Result<Vec<CheckCase>, GadgetError> {
    let mut cases = Vec::new();
    for info in CHECKS {
        cases.extend(check_cases(store, info.name)?);
    }
    let covered: BTreeSet<String> = cases.iter().map(|c| c.id.clone()).collect();
    for name in store.gadget_names()? {
        if !covered.contains(&name) {
            cases.push(sidecar_case(&store.load_gadget(&name)?));
        }
    }
    Ok(cases)
}

/// Port names used by synthesized gadgets: `p0`, `p1`, ...
fn synth_ports(count: usize) -> BTreeMap<String, VertexId> {
    (0..count).map(|i| (format!("p{i}"), i)).collect()
}

fn passes(
    name: &str,
    g: &OrientedGraph,
    contract: &Contract,
    ports: &BTreeMap<String, VertexId>,
) -> bool {
    let spec = GadgetSpec {
        name: name.to_string(),
        graph: g.clone(),
        ports: ports.clone(),
        contract: contract.clone(),
        provenance: Provenance::Synthesized,
    };
    matches!(verify_gadget(&spec, Some(1_000_000)), Ok(r) if r.passed())
}

/// Loopless oriented graph on `k` vertices whose pair `(i, j)`, `i < j`, is
/// absent, `i -> j` or `j -> i` according to successive base-3 digits of
/// `code`.
fn graph_from_code(k: usize, mut code: u64) -> OrientedGraph {
    let mut arcs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            match code % 3 {
                1 => arcs.push((i, j)),
                2 => arcs.push((j, i)),
                _ => {}
            }
            code /= 3;
        }
    }
    OrientedGraph::from_arcs(k, arcs).expect("one arc per pair")
}

/// Largest size searched exhaustively by [`synthesize_gadget`].
pub const SYNTH_EXHAUSTIVE_MAX: usize = 4;
/// Largest size bound accepted by [`synthesize_gadget`].
pub const SYNTH_MAX_VERTICES: usize = 12;
const SYNTH_SAMPLES_PER_SIZE: usize = 400;

/// Searches for a loopless gadget on at most `size_bound` vertices whose
/// first `port_count` vertices are ports `p0, p1, ...` and which satisfies
/// `contract`. Sizes up to four are searched exhaustively in code order;
/// larger sizes are sampled with a generator seeded by `seed`.
pub fn synthesize_gadget(
    contract: &Contract,
    size_bound: usize,
    port_count: usize,
    seed: u64,
) -> Result<GadgetSpec, GadgetError> {
    let size_bound = size_bound.min(SYNTH_MAX_VERTICES);
    let ports = synth_ports(port_count);
    let found = |g: OrientedGraph| GadgetSpec {
        name: "synthesized".into(),
        graph: g,
        ports: ports.clone(),
        contract: contract.clone(),
        provenance: Provenance::Synthesized,
    };
    let start = port_count.max(1);
    for k in start..=size_bound.min(SYNTH_EXHAUSTIVE_MAX) {
        let pairs = (k * (k - 1) / 2) as u32;
        for code in 0..3u64.pow(pairs) {
            let g = graph_from_code(k, code);
            if passes("synthesized", &g, contract, &ports) {
                return Ok(found(g));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in start.max(SYNTH_EXHAUSTIVE_MAX + 1)..=size_bound {
        let pairs = (k * (k - 1) / 2) as u32;
        for _ in 0..SYNTH_SAMPLES_PER_SIZE {
            let density: f64 = rng.gen_range(0.1..0.6);
            let mut code = 0u64;
            for _ in 0..pairs {
                let digit = if rng.gen_bool(density) {
                    rng.gen_range(1..3)
                } else {
                    0
                };
                code = code * 3 + digit;
            }
            let g = graph_from_code(k, code);
            if passes("synthesized", &g, contract, &ports) {
                return Ok(found(g));
            }
        }
    }
    Err(GadgetError::NotFound)
}
