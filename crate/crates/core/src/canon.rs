//! Brute-force canonical labelling and automorphisms for graphs on at most
//! eight vertices.

/// Largest vertex count the brute-force routines accept.
pub const MAX_CANON_VERTICES: usize = 8;

/// Canonical key of a small digraph: the lexicographically minimal
/// adjacency bit-string over all relabellings.
///
/// Bits are laid out block by block: for position `k` the loop bit `(k,k)`
/// comes first, followed by `(i,k)` and `(k,i)` for every `i < k`. The first
/// bit of the string is the most significant bit of `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey {
    pub n: usize,
    pub bits: u64,
}

impl CanonicalKey {
    /// Hex rendering, stable across runs and platforms.
    pub fn to_hex(&self) -> String {
        format!("{}:{:016x}", self.n, self.bits)
    }
}

/// `adj(u, v)` reports whether the arc `u -> v` is present.
pub fn canonical_key<F>(n: usize, adj: F) -> CanonicalKey
where
    F: Fn(usize, usize) -> bool,
{
    assert!(n <= MAX_CANON_VERTICES, "canonical_key supports n <= 8");
    let mut matrix = [[false; MAX_CANON_VERTICES]; MAX_CANON_VERTICES];
    for (u, row) in matrix.iter_mut().enumerate().take(n) {
        for (v, cell) in row.iter_mut().enumerate().take(n) {
            *cell = adj(u, v);
        }
    }
    let mut search = CanonSearch {
        n,
        matrix,
        order: Vec::with_capacity(n),
        used: [false; MAX_CANON_VERTICES],
        best: None,
    };
    search.extend(0, 0);
    let bits = search.best.unwrap_or(0);
    // Left-align so that the first emitted bit is the MSB.
    let total = n * n;
    let bits = if total == 0 { 0 } else { bits << (64 - total) };
    CanonicalKey { n, bits }
}

struct CanonSearch {
    n: usize,
    matrix: [[bool; MAX_CANON_VERTICES]; MAX_CANON_VERTICES],
    order: Vec<usize>,
    used: [bool; MAX_CANON_VERTICES],
    best: Option<u64>,
}

impl CanonSearch {
    fn block(&self, k: usize, p: usize) -> (u64, usize) {
        let mut bits = self.matrix[p][p] as u64;
        let mut len = 1;
        for &q in &self.order[..k] {
            bits = (bits << 2) | ((self.matrix[q][p] as u64) << 1) | self.matrix[p][q] as u64;
            len += 2;
        }
        (bits, len)
    }

    fn extend(&mut self, prefix: u64, prefix_len: usize) {
        let k = self.order.len();
        if k == self.n {
            if self.best.is_none_or(|b| prefix < b) {
                self.best = Some(prefix);
            }
            return;
        }
        let total = self.n * self.n;
        for p in 0..self.n {
            if self.used[p] {
                continue;
            }
            let (bits, len) = self.block(k, p);
            let next = (prefix << len) | bits;
            let next_len = prefix_len + len;
            if let Some(best) = self.best {
                let best_prefix = best >> (total - next_len);
                if next > best_prefix {
                    continue;
                }
            }
            self.used[p] = true;
            self.order.push(p);
            self.extend(next, next_len);
            self.order.pop();
            self.used[p] = false;
        }
    }
}

/// All arc-preserving bijections `perm` (with `adj(u,v) == adj(perm[u], perm[v])`),
/// in lexicographic order.
pub fn automorphisms<F>(n: usize, adj: F) -> Vec<Vec<usize>>
where
    F: Fn(usize, usize) -> bool,
{
    assert!(n <= MAX_CANON_VERTICES, "automorphisms supports n <= 8");
    let matrix: Vec<Vec<bool>> = (0..n)
        .map(|u| (0..n).map(|v| adj(u, v)).collect())
        .collect();
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        matrix: &[Vec<bool>],
        perm: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = matrix.len();
        let k = perm.len();
        if k == n {
            out.push(perm.clone());
            return;
        }
        for img in 0..n {
            if used[img] || matrix[k][k] != matrix[img][img] {
                continue;
            }
            let ok = (0..k).all(|j| {
                matrix[j][k] == matrix[perm[j]][img] && matrix[k][j] == matrix[img][perm[j]]
            });
            if !ok {
                continue;
            }
            used[img] = true;
            perm.push(img);
            rec(matrix, perm, used, out);
            perm.pop();
            used[img] = false;
        }
    }
    rec(&matrix, &mut perm, &mut used, &mut out);
    out
}
