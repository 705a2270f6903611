//! Named targets and the catalogue of small reflexive tournaments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::canon::{self, CanonicalKey, MAX_CANON_VERTICES};
use crate::digraph::{OrientedGraph, VertexId};

/// Largest `n` accepted by [`enumerate_reflexive_tournaments`].
pub const MAX_ENUMERATION_VERTICES: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("{what} supports at most {limit} vertices, got {n}")]
    BoundExceeded {
        what: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("unknown target name `{0}`")]
    UnknownTarget(String),
}

/// Colour label of a target vertex: `a`, `b`, ... and `c26`, `c27`, ...
/// beyond the alphabet.
pub fn colour_label(v: VertexId) -> String {
    if v < 26 {
        ((b'a' + v as u8) as char).to_string()
    } else {
        format!("c{v}")
    }
}

/// Inverse of [`colour_label`]; bare integers are accepted too.
pub fn parse_colour(s: &str) -> Option<VertexId> {
    let bytes = s.as_bytes();
    if bytes.len() == 1 && bytes[0].is_ascii_lowercase() {
        return Some((bytes[0] - b'a') as usize);
    }
    if let Some(rest) = s.strip_prefix('c') {
        return rest.parse().ok();
    }
    s.parse().ok()
}

/// A colour space: a (usually reflexive) digraph with cached automorphisms.
pub struct Target {
    name: String,
    graph: OrientedGraph,
    automorphisms: OnceLock<Vec<Vec<VertexId>>>,
}

impl Clone for Target {
    fn clone(&self) -> Self {
        let automorphisms = OnceLock::new();
        if let Some(a) = self.automorphisms.get() {
            let _ = automorphisms.set(a.clone());
        }
        Target {
            name: self.name.clone(),
            graph: self.graph.clone(),
            automorphisms,
        }
    }
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Target")
            .field("name", &self.name)
            .field("graph", &self.graph)
            .finish()
    }
}

impl PartialEq for Target {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph
    }
}

impl Target {
    pub fn new(name: impl Into<String>, graph: OrientedGraph) -> Self {
        Target {
            name: name.into(),
            graph,
            automorphisms: OnceLock::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn is_reflexive(&self) -> bool {
        self.graph.is_reflexive()
    }

    /// Every unordered pair of distinct vertices joined by exactly one arc.
    pub fn is_tournament(&self) -> bool {
        let n = self.vertex_count();
        (0..n).all(|u| (u + 1..n).all(|v| self.graph.has_arc(u, v) != self.graph.has_arc(v, u)))
    }

    pub fn is_reflexive_tournament(&self) -> bool {
        self.is_reflexive() && self.is_tournament()
    }

    /// The full automorphism group, lexicographically ordered.
    pub fn automorphisms(&self) -> Result<&[Vec<VertexId>], CatalogError> {
        let n = self.vertex_count();
        if n > MAX_CANON_VERTICES {
            return Err(CatalogError::BoundExceeded {
                what: "automorphisms",
                n,
                limit: MAX_CANON_VERTICES,
            });
        }
        Ok(self
            .automorphisms
            .get_or_init(|| canon::automorphisms(n, |u, v| self.graph.has_arc(u, v))))
    }

    pub fn is_vertex_transitive(&self) -> Result<bool, CatalogError> {
        let auts = self.automorphisms()?;
        let n = self.vertex_count();
        if n == 0 {
            return Ok(true);
        }
        let orbit: BTreeSet<VertexId> = auts.iter().map(|p| p[0]).collect();
        Ok(orbit.len() == n)
    }

    pub fn canonical_form(&self) -> Result<CanonicalKey, CatalogError> {
        let n = self.vertex_count();
        if n > MAX_CANON_VERTICES {
            return Err(CatalogError::BoundExceeded {
                what: "canonical_form",
                n,
                limit: MAX_CANON_VERTICES,
            });
        }
        Ok(canon::canonical_key(n, |u, v| self.graph.has_arc(u, v)))
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        degree_profile(self)
    }

    /// Edge-list text with a `# target <name>` header comment.
    pub fn to_document(&self) -> String {
        format!(
            "# target {}\n{}",
            self.name,
            crate::digraph::serialize_graph(&self.graph)
        )
    }
}

/// Per-vertex degrees, loops counted once in each direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    /// `(in_degree, out_degree)` per vertex.
    pub degrees: Vec<(usize, usize)>,
    pub max_in: usize,
    pub max_out: usize,
    /// Vertices whose in- or out-degree is at least four.
    pub high_degree: Vec<VertexId>,
}

pub fn degree_profile(t: &Target) -> DegreeProfile {
    let g = t.graph();
    let degrees: Vec<(usize, usize)> = (0..g.vertex_count())
        .map(|v| (g.in_degree(v), g.out_degree(v)))
        .collect();
    DegreeProfile {
        max_in: degrees.iter().map(|d| d.0).max().unwrap_or(0),
        max_out: degrees.iter().map(|d| d.1).max().unwrap_or(0),
        high_degree: degrees
            .iter()
            .enumerate()
            .filter(|(_, &(i, o))| i >= 4 || o >= 4)
            .map(|(v, _)| v)
            .collect(),
        degrees,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetName {
    C3,
    TT3,
    TTn(usize),
    T4,
    T5,
}

impl TargetName {
    /// `C3`, `TT3`, `TT<n>`, `T4`, `T5` (case-insensitive).
    pub fn parse(s: &str) -> Option<TargetName> {
        let up = s.to_ascii_uppercase();
        match up.as_str() {
            "C3" => Some(TargetName::C3),
            "TT3" => Some(TargetName::TT3),
            "T4" => Some(TargetName::T4),
            "T5" => Some(TargetName::T5),
            _ => {
                let n: usize = up.strip_prefix("TT")?.parse().ok()?;
                (n >= 1).then_some(TargetName::TTn(n))
            }
        }
    }
}

fn reflexive_with(name: &str, n: usize, strict: &[(usize, usize)]) -> Target {
    let arcs = (0..n).map(|v| (v, v)).chain(strict.iter().copied());
    Target::new(
        name,
        OrientedGraph::from_arcs(n, arcs).expect("named target arcs are valid"),
    )
}

/// Reflexive transitive tournament: `i -> j` for all `i < j`.
pub fn transitive_tournament(n: usize) -> Target {
    let strict: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    reflexive_with(&format!("TT{n}"), n, &strict)
}

pub fn named_target(name: TargetName) -> Target {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;
    match name {
        TargetName::C3 => reflexive_with("C3", 3, &[(A, B), (B, C), (C, A)]),
        TargetName::TT3 => transitive_tournament(3),
        TargetName::TTn(n) => transitive_tournament(n),
        TargetName::T4 => {
            reflexive_with("T4", 4, &[(A, B), (A, C), (B, C), (B, D), (C, D), (D, A)])
        }
        TargetName::T5 => reflexive_with(
            "T5",
            5,
            &[
                (A, B),
                (A, C),
                (B, C),
                (B, D),
                (C, D),
                (C, E),
                (D, E),
                (D, A),
                (E, A),
                (E, B),
            ],
        ),
    }
}

/// A named target, or a catalogue entry `R<n>.<i>` as listed by
/// [`enumerate_reflexive_tournaments`].
pub fn named_target_by_str(s: &str) -> Result<Target, CatalogError> {
    if let Some(name) = TargetName::parse(s) {
        return Ok(named_target(name));
    }
    let unknown = || CatalogError::UnknownTarget(s.to_string());
    let (n, i) = s
        .strip_prefix('R')
        .and_then(|r| r.split_once('.'))
        .ok_or_else(unknown)?;
    let n: usize = n.parse().map_err(|_| unknown())?;
    let i: usize = i.parse().map_err(|_| unknown())?;
    enumerate_reflexive_tournaments(n)?
        .into_iter()
        .nth(i)
        .ok_or_else(unknown)
}

fn check_enumeration_bound(n: usize) -> Result<(), CatalogError> {
    if n == 0 || n > MAX_ENUMERATION_VERTICES {
        return Err(CatalogError::BoundExceeded {
            what: "enumerate_reflexive_tournaments",
            n,
            limit: MAX_ENUMERATION_VERTICES,
        });
    }
    Ok(())
}

fn catalogue_from(n: usize, classes: BTreeMap<CanonicalKey, OrientedGraph>) -> Vec<Target> {
    classes
        .into_values()
        .enumerate()
        .map(|(i, g)| Target::new(format!("R{n}.{i}"), g))
        .collect()
}

/// All reflexive tournaments on `n` vertices up to isomorphism, in ascending
/// canonical-key order.
///
/// Classes on `n` vertices are grown from the classes on `n - 1` vertices by
/// adding a vertex with every possible orientation towards the old ones;
/// since deleting a vertex of any tournament leaves a tournament, this
/// reaches every class.
pub fn enumerate_reflexive_tournaments(n: usize) -> Result<Vec<Target>, CatalogError> {
    check_enumeration_bound(n)?;
    let mut level: Vec<OrientedGraph> =
        vec![OrientedGraph::from_arcs(1, [(0, 0)]).expect("single loop")];
    for m in 2..=n {
        let mut classes = BTreeMap::new();
        let new = m - 1;
        for base in &level {
            for mask in 0u32..(1 << new) {
                let arcs = base
                    .arcs()
                    .chain(std::iter::once((new, new)))
                    .chain((0..new).map(|i| {
                        if mask >> i & 1 == 1 {
                            (new, i)
                        } else {
                            (i, new)
                        }
                    }));
                let g = OrientedGraph::from_arcs(m, arcs).expect("orientation is oriented");
                let key = canon::canonical_key(m, |u, v| g.has_arc(u, v));
                classes.entry(key).or_insert(g);
            }
        }
        level = classes.into_values().collect();
    }
    let classes = level
        .into_iter()
        .map(|g| (canon::canonical_key(n, |u, v| g.has_arc(u, v)), g))
        .collect();
    Ok(catalogue_from(n, classes))
}

/// Same result as [`enumerate_reflexive_tournaments`], computed by
/// canonicalising every one of the `2^(n(n-1)/2)` orientations.
pub fn enumerate_reflexive_tournaments_exhaustive(n: usize) -> Result<Vec<Target>, CatalogError> {
    check_enumeration_bound(n)?;
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut classes = BTreeMap::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let arcs = (0..n)
            .map(|v| (v, v))
            .chain(
                pairs
                    .iter()
                    .enumerate()
                    .map(|(k, &(i, j))| if mask >> k & 1 == 1 { (j, i) } else { (i, j) }),
            );
        let g = OrientedGraph::from_arcs(n, arcs).expect("orientation is oriented");
        let key = canon::canonical_key(n, |u, v| g.has_arc(u, v));
        classes.entry(key).or_insert(g);
    }
    Ok(catalogue_from(n, classes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::induced_subgraph;

    #[test]
    fn named_arcs() {
        let c3 = named_target(TargetName::C3);
        assert!(c3.is_reflexive_tournament());
        assert!(c3.graph().has_arc(0, 1) && c3.graph().has_arc(1, 2) && c3.graph().has_arc(2, 0));

        let t4 = named_target(TargetName::T4);
        let strict: Vec<_> = t4.graph().arcs().filter(|(u, v)| u != v).collect();
        assert_eq!(strict, vec![(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 0)]);
        // c has out-neighbours c, d; d has out-neighbours a, d.
        assert_eq!(t4.graph().out_neighbours(2), &[2, 3]);
        assert_eq!(t4.graph().out_neighbours(3), &[0, 3]);

        let t5 = named_target(TargetName::T5);
        assert_eq!(t5.graph().out_neighbours(0), &[0, 1, 2]);
        assert_eq!(t5.graph().out_neighbours(3), &[0, 3, 4]);
        let (bde, _) = induced_subgraph(t5.graph(), &BTreeSet::from([1, 3, 4])).unwrap();
        let c3 = named_target(TargetName::C3);
        assert_eq!(
            Target::new("x", bde).canonical_form().unwrap(),
            c3.canonical_form().unwrap()
        );
    }

    #[test]
    fn t4_is_the_unique_strongly_connected_four_vertex_tournament() {
        let all = enumerate_reflexive_tournaments(4).unwrap();
        let strong: Vec<_> = all
            .iter()
            .filter(|t| t.graph().is_strongly_connected())
            .collect();
        assert_eq!(strong.len(), 1);
        let t4 = named_target(TargetName::T4);
        assert_eq!(
            strong[0].canonical_form().unwrap(),
            t4.canonical_form().unwrap()
        );
    }

    #[test]
    fn t5_is_the_unique_regular_five_vertex_tournament() {
        let all = enumerate_reflexive_tournaments(5).unwrap();
        let regular: Vec<_> = all
            .iter()
            .filter(|t| t.degree_profile().degrees.iter().all(|&d| d == (3, 3)))
            .collect();
        assert_eq!(regular.len(), 1);
        let t5 = named_target(TargetName::T5);
        assert_eq!(
            regular[0].canonical_form().unwrap(),
            t5.canonical_form().unwrap()
        );
    }

    #[test]
    fn counts() {
        let counts: Vec<usize> = (1..=5)
            .map(|n| enumerate_reflexive_tournaments(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 12]);
        assert!(enumerate_reflexive_tournaments(0).is_err());
        assert!(matches!(
            enumerate_reflexive_tournaments(8),
            Err(CatalogError::BoundExceeded { .. })
        ));
    }

    #[test]
    fn extension_matches_exhaustive() {
        for n in 1..=5 {
            let a = enumerate_reflexive_tournaments(n).unwrap();
            let b = enumerate_reflexive_tournaments_exhaustive(n).unwrap();
            let ka: Vec<_> = a.iter().map(|t| t.canonical_form().unwrap()).collect();
            let kb: Vec<_> = b.iter().map(|t| t.canonical_form().unwrap()).collect();
            assert_eq!(ka, kb);
        }
    }

    #[test]
    fn canonical_form_examples() {
        let t4 = named_target(TargetName::T4);
        let moved = Target::new("t4'", t4.graph().permuted(&[3, 1, 0, 2]));
        assert_eq!(
            t4.canonical_form().unwrap(),
            moved.canonical_form().unwrap()
        );
        assert_ne!(
            named_target(TargetName::C3).canonical_form().unwrap(),
            named_target(TargetName::TT3).canonical_form().unwrap()
        );
        assert_eq!(
            t4.canonical_form().unwrap().to_hex(),
            t4.canonical_form().unwrap().to_hex()
        );
        let big = transitive_tournament(9);
        assert!(big.canonical_form().is_err());
        assert!(big.automorphisms().is_err());
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(
            named_target(TargetName::TT3).automorphisms().unwrap(),
            &[vec![0, 1, 2]]
        );
        assert_eq!(
            named_target(TargetName::C3).automorphisms().unwrap().len(),
            3
        );
        let t5 = named_target(TargetName::T5);
        let auts = t5.automorphisms().unwrap();
        assert_eq!(auts.len(), 5);
        // a->c, c->e, e->b, b->d, d->a
        assert!(auts.contains(&vec![2, 3, 4, 0, 1]));
        assert!(t5.is_vertex_transitive().unwrap());
        assert!(!named_target(TargetName::T4).is_vertex_transitive().unwrap());
        assert!(transitive_tournament(1).is_vertex_transitive().unwrap());
    }

    #[test]
    fn degree_examples() {
        let t5 = named_target(TargetName::T5).degree_profile();
        assert!(t5.degrees.iter().all(|&d| d == (3, 3)));
        let t4 = named_target(TargetName::T4).degree_profile();
        let outs: Vec<_> = t4.degrees.iter().map(|d| d.1).collect();
        assert_eq!(outs, vec![3, 3, 2, 2]);
        let tt6 = transitive_tournament(6).degree_profile();
        assert_eq!(tt6.degrees[0].1, 6);
        assert!(tt6.high_degree.contains(&0));
    }

    #[test]
    fn labels() {
        assert_eq!(colour_label(0), "a");
        assert_eq!(colour_label(4), "e");
        assert_eq!(colour_label(30), "c30");
        assert_eq!(parse_colour("d"), Some(3));
        assert_eq!(parse_colour("c30"), Some(30));
        assert_eq!(parse_colour("7"), Some(7));
        assert_eq!(parse_colour("?"), None);
        assert_eq!(TargetName::parse("tt6"), Some(TargetName::TTn(6)));
        assert_eq!(TargetName::parse("TT0"), None);
        assert_eq!(named_target_by_str("R5.0").unwrap().vertex_count(), 5);
        assert!(named_target_by_str("R5.12").is_err());
        assert!(named_target_by_str("R9.0").is_err());
    }
}
