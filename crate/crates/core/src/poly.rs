//! Polynomial decision procedure for targets with at most two vertices.
//!
//! With two colours every vertex is a boolean variable and every constraint
//! (arc preservation, loops, pairwise difference) is a 2-clause, so the
//! problem is an instance of 2-SAT.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::catalog::Target;
use crate::digraph::{InjectivityMode, OrientedGraph};
use crate::solver::{pigeonhole_screen, verify_colouring, Colouring};
use crate::twosat::{Lit, TwoSatInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("target has {0} vertices; the polynomial decider handles at most 2")]
    TargetTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmallTargetAnswer {
    Sat(Colouring),
    Unsat,
}

impl SmallTargetAnswer {
    pub fn is_sat(&self) -> bool {
        matches!(self, SmallTargetAnswer::Sat(_))
    }
}

/// The 2-SAT encoding of an instance against a two-vertex target: variable
/// `v` is true iff vertex `v` takes colour 1. Returns `None` when some
/// neighbourhood has three or more members, which two colours cannot
/// separate.
pub fn encode_two_colour(
    g: &OrientedGraph,
    t: &Target,
    mode: InjectivityMode,
) -> Option<TwoSatInstance> {
    assert_eq!(t.vertex_count(), 2);
    let tg = t.graph();
    let n = g.vertex_count();
    let lit = |v: usize, colour: usize| {
        if colour == 1 {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    };
    let mut ins = TwoSatInstance::new(n);
    for (u, v) in g.arcs() {
        if u == v {
            for a in 0..2 {
                if !tg.has_loop(a) {
                    ins.add_clause(lit(u, a).negated(), lit(u, a).negated());
                }
            }
            continue;
        }
        for a in 0..2 {
            for b in 0..2 {
                if !tg.has_arc(a, b) {
                    ins.add_clause(lit(u, a).negated(), lit(v, b).negated());
                }
            }
        }
    }
    let mut groups = BTreeSet::new();
    for w in 0..n {
        for &dir in mode.directions() {
            let members = g.members(w, dir);
            if members.len() >= 3 {
                return None;
            }
            if members.len() == 2 {
                groups.insert((members[0], members[1]));
            }
        }
    }
    for (x, y) in groups {
        ins.add_clause(Lit::pos(x), Lit::pos(y));
        ins.add_clause(Lit::neg(x), Lit::neg(y));
    }
    ins.dedup();
    Some(ins)
}

/// Decides the existence of a colouring into a target with one or two
/// vertices in time polynomial in the size of `g`.
pub fn decide_small_target(
    g: &OrientedGraph,
    t: &Target,
    mode: InjectivityMode,
) -> Result<SmallTargetAnswer, PolyError> {
    let k = t.vertex_count();
    if k > 2 {
        return Err(PolyError::TargetTooLarge(k));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Ok(SmallTargetAnswer::Sat(Colouring::total(Vec::new())));
    }
    if k == 0 || pigeonhole_screen(g, t, mode).is_some() {
        return Ok(SmallTargetAnswer::Unsat);
    }
    if k == 1 {
        let f = Colouring::total(vec![0; n]);
        let valid = verify_colouring(g, t, &f, mode)
            .expect("constant colouring is total")
            .is_valid();
        return Ok(if valid {
            SmallTargetAnswer::Sat(f)
        } else {
            SmallTargetAnswer::Unsat
        });
    }
    let Some(ins) = encode_two_colour(g, t, mode) else {
        return Ok(SmallTargetAnswer::Unsat);
    };
    Ok(match ins.solve() {
        Some(bits) => SmallTargetAnswer::Sat(Colouring::total(
            bits.into_iter().map(usize::from).collect(),
        )),
        None => SmallTargetAnswer::Unsat,
    })
}
