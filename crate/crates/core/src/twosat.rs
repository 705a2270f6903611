//! 2-SAT via strongly connected components of the implication graph.

/// A literal: variable index plus polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Lit {
            var,
            positive: false,
        }
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    fn node(self) -> usize {
        2 * self.var + usize::from(self.positive)
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TwoSatInstance {
    vars: usize,
    clauses: Vec<(Lit, Lit)>,
}

impl TwoSatInstance {
    pub fn new(vars: usize) -> Self {
        TwoSatInstance {
            vars,
            clauses: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[(Lit, Lit)] {
        &self.clauses
    }

    /// Adds `a ∨ b`. Panics on out-of-range variables.
    pub fn add_clause(&mut self, a: Lit, b: Lit) {
        assert!(
            a.var < self.vars && b.var < self.vars,
            "literal out of range"
        );
        self.clauses.push(if a <= b { (a, b) } else { (b, a) });
    }

    /// Sorts and removes duplicate clauses.
    pub fn dedup(&mut self) {
        self.clauses.sort_unstable();
        self.clauses.dedup();
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|&(a, b)| a.eval(assignment) || b.eval(assignment))
    }

    /// A satisfying assignment, or `None` if the formula is unsatisfiable.
    /// With no clauses every variable is false.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let nodes = 2 * self.vars;
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in &self.clauses {
            adj[a.negated().node()].push(b.node());
            adj[b.negated().node()].push(a.node());
        }
        let comp = tarjan(&adj);
        let mut out = vec![false; self.vars];
        for (v, slot) in out.iter_mut().enumerate() {
            let (n, p) = (comp[2 * v], comp[2 * v + 1]);
            if p == n {
                return None;
            }
            // Tarjan numbers components in reverse topological order; a literal
            // is true when its component comes later topologically.
            *slot = p < n;
        }
        Some(out)
    }
}

/// Iterative Tarjan; returns the component index of every node.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
