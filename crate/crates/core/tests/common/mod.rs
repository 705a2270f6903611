// Independent reference checks shared by the integration tests. Nothing here
// calls the solver; colourings are found by trying every map.
#![allow(dead_code)]

use injhom::digraph::{InjectivityMode, OrientedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Arc preservation plus injectivity on the neighbourhoods `mode` requires,
/// with neighbourhoods read straight off the arc list.
pub fn is_valid(
    arcs: &[(usize, usize)],
    t: &OrientedGraph,
    f: &[usize],
    mode: InjectivityMode,
) -> bool {
    if arcs.iter().any(|&(u, v)| !t.has_arc(f[u], f[v])) {
        return false;
    }
    let injective = |members: Vec<usize>| {
        let mut cols: Vec<usize> = members.iter().map(|&x| f[x]).collect();
        cols.sort_unstable();
        cols.windows(2).all(|w| w[0] != w[1])
    };
    for w in 0..f.len() {
        let ins: Vec<usize> = arcs.iter().filter(|a| a.1 == w).map(|a| a.0).collect();
        let outs: Vec<usize> = arcs.iter().filter(|a| a.0 == w).map(|a| a.1).collect();
        let ok = match mode {
            InjectivityMode::InOnly => injective(ins),
            InjectivityMode::IosSeparate => injective(ins) && injective(outs),
            InjectivityMode::IotTogether => {
                let mut all = ins;
                for x in outs {
                    if !all.contains(&x) {
                        all.push(x);
                    }
                }
                injective(all)
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Every valid colouring, in lexicographic order.
pub fn all_colourings(
    g: &OrientedGraph,
    t: &OrientedGraph,
    mode: InjectivityMode,
) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let k = t.vertex_count();
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut f = vec![0; n];
    loop {
        if is_valid(&arcs, t, &f, mode) {
            out.push(f.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            f[i] += 1;
            if f[i] < k {
                break;
            }
            f[i] = 0;
        }
    }
}

pub fn has_colouring(g: &OrientedGraph, t: &OrientedGraph, mode: InjectivityMode) -> bool {
    !all_colourings(g, t, mode).is_empty()
}

/// Random oriented graph: each unordered pair gets an arc with probability
/// `p` in a random direction, each vertex a loop with probability `loops`.
pub fn random_oriented(n: usize, p: f64, loops: f64, seed: u64) -> OrientedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
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
    OrientedGraph::from_arcs(n, arcs).unwrap()
}
