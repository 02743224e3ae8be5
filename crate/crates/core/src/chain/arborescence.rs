//! Minimum-cost spanning in-trees (every non-root vertex keeps exactly one
//! outgoing edge and all paths lead to the root).
//!
//! [`all_roots_min_in_tree`] runs Edmonds' contraction once without a root
//! and reads every root's optimum off the contraction hierarchy: the
//! optimum for root r is the sum of the contraction duals of all hierarchy
//! nodes that do not contain r. One pass costs O(E log V) with mergeable
//! heaps, instead of one pass per root.

use crate::error::{Error, Result};

/// Largest vertex count the exhaustive enumerators accept.
pub const MAX_ORACLE_STATES: usize = 8;

const NIL: u32 = u32::MAX;

/// Leftist heap arena with lazy additive offsets.
struct Heaps {
    key: Vec<f64>,
    delta: Vec<f64>,
    left: Vec<u32>,
    right: Vec<u32>,
    rank: Vec<u32>,
}

impl Heaps {
    fn with_capacity(n: usize) -> Self {
        Heaps {
            key: Vec::with_capacity(n),
            delta: Vec::with_capacity(n),
            left: Vec::with_capacity(n),
            right: Vec::with_capacity(n),
            rank: Vec::with_capacity(n),
        }
    }

    /// Node ids equal edge ids.
    fn singleton(&mut self, key: f64) -> u32 {
        self.key.push(key);
        self.delta.push(0.0);
        self.left.push(NIL);
        self.right.push(NIL);
        self.rank.push(1);
        (self.key.len() - 1) as u32
    }

    fn rank(&self, a: u32) -> u32 {
        if a == NIL {
            0
        } else {
            self.rank[a as usize]
        }
    }

    fn prop(&mut self, a: u32) {
        let a = a as usize;
        let d = self.delta[a];
        if d != 0.0 {
            self.key[a] += d;
            for c in [self.left[a], self.right[a]] {
                if c != NIL {
                    self.delta[c as usize] += d;
                }
            }
            self.delta[a] = 0.0;
        }
    }

    fn merge(&mut self, mut a: u32, mut b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        self.prop(a);
        self.prop(b);
        if self.key[a as usize] > self.key[b as usize] || (self.key[a as usize] == self.key[b as usize] && a > b) {
            std::mem::swap(&mut a, &mut b);
        }
        let ai = a as usize;
        let merged = self.merge(self.right[ai], b);
        self.right[ai] = merged;
        if self.rank(self.left[ai]) < self.rank(self.right[ai]) {
            std::mem::swap(&mut self.left[ai], &mut self.right[ai]);
        }
        self.rank[ai] = self.rank(self.right[ai]) + 1;
        a
    }

    fn top(&mut self, a: u32) -> f64 {
        self.prop(a);
        self.key[a as usize]
    }

    fn pop(&mut self, a: u32) -> u32 {
        self.prop(a);
        let (l, r) = (self.left[a as usize], self.right[a as usize]);
        self.merge(l, r)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        a
    }
}

/// Minimum in-tree cost for every root of a strongly connected digraph on
/// `n` vertices. Edges are `(from, to, cost)` with nonnegative finite costs;
/// in a tree, `from`'s parent is `to`.
pub fn all_roots_min_in_tree(n: usize, edges: &[(usize, usize, f64)]) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    if let Some(e) = edges.iter().find(|e| e.0 >= n || e.1 >= n || !(e.2 >= 0.0 && e.2.is_finite())) {
        return Err(Error::InvalidArgument(format!("bad edge {e:?}")));
    }
    let mut heaps = Heaps::with_capacity(edges.len());
    let mut heap_of = vec![NIL; n];
    for &(from, _, cost) in edges {
        let h = heaps.singleton(cost);
        heap_of[from] = heaps.merge(heap_of[from], h);
    }

    let mut uf = UnionFind::new(n);
    // Hierarchy: leaves 0..n are the vertices, later ids are contractions.
    let mut h_parent: Vec<usize> = vec![usize::MAX; n];
    let mut dual: Vec<f64> = vec![0.0; n];
    let mut node_of: Vec<usize> = (0..n).collect();
    let mut on_path = vec![false; n];
    let mut path: Vec<usize> = Vec::new();
    let mut components = n;

    let mut u = 0;
    while components > 1 {
        let mut h = heap_of[u];
        while h != NIL && uf.find(edges[h as usize].1) == u {
            h = heaps.pop(h);
        }
        heap_of[u] = h;
        if h == NIL {
            return Err(Error::Precondition("graph is not strongly connected".into()));
        }
        let w = heaps.top(h);
        dual[node_of[u]] = w;
        heaps.delta[h as usize] -= w;
        on_path[u] = true;
        path.push(u);
        let v = uf.find(edges[h as usize].1);
        if !on_path[v] {
            u = v;
            continue;
        }
        let id = dual.len();
        dual.push(0.0);
        h_parent.push(usize::MAX);
        let mut merged = NIL;
        let mut rep = v;
        loop {
            let x = path.pop().expect("cycle member on path");
            on_path[x] = false;
            h_parent[node_of[x]] = id;
            merged = heaps.merge(merged, heap_of[x]);
            rep = uf.union(rep, x);
            if x == v {
                break;
            }
            components -= 1;
        }
        heap_of[rep] = merged;
        node_of[rep] = id;
        u = rep;
    }

    // Subtree dual sums, then for every node the duals hanging off its
    // ancestor chain.
    let total = dual.len();
    let mut subtree = dual.clone();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); total];
    for c in 0..total {
        let p = h_parent[c];
        if p != usize::MAX {
            subtree[p] += subtree[c];
            children[p].push(c);
        }
    }
    let mut outside = vec![0.0; total];
    for a in (0..total).rev() {
        let kids = &children[a];
        let mut suffix = vec![0.0; kids.len() + 1];
        for j in (0..kids.len()).rev() {
            suffix[j] = suffix[j + 1] + subtree[kids[j]];
        }
        let mut prefix = 0.0;
        for (j, &c) in kids.iter().enumerate() {
            outside[c] = outside[a] + prefix + suffix[j + 1];
            prefix += subtree[c];
        }
    }
    outside.truncate(n);
    Ok(outside)
}

/// Calls `visit(parent)` for every spanning in-tree rooted at `root` that
/// only uses edges `v -> parent[v]` with `allowed(v, parent[v])`.
/// `parent[root] == root`.
pub fn for_each_in_tree<A, F>(n: usize, root: usize, allowed: A, mut visit: F)
where
    A: Fn(usize, usize) -> bool,
    F: FnMut(&[usize]),
{
    let choices: Vec<Vec<usize>> =
        (0..n).map(|v| if v == root { vec![root] } else { (0..n).filter(|&u| u != v && allowed(v, u)).collect() }).collect();
    let mut parent = vec![0usize; n];
    fn reaches_root(parent: &[usize], root: usize) -> bool {
        (0..parent.len()).all(|mut v| {
            for _ in 0..parent.len() {
                if v == root {
                    return true;
                }
                v = parent[v];
            }
            v == root
        })
    }
    fn rec<F: FnMut(&[usize])>(v: usize, choices: &[Vec<usize>], parent: &mut [usize], root: usize, visit: &mut F) {
        if v == parent.len() {
            if reaches_root(parent, root) {
                visit(parent);
            }
            return;
        }
        for &u in &choices[v] {
            parent[v] = u;
            rec(v + 1, choices, parent, root, visit);
        }
    }
    rec(0, &choices, &mut parent, root, &mut visit);
}

/// Brute-force minimum in-tree cost for `root`; `cost(v, u)` is `None` for
/// missing edges. `None` if no tree exists.
pub fn exhaustive_min_in_tree<C>(n: usize, root: usize, cost: C) -> Result<Option<f64>>
where
    C: Fn(usize, usize) -> Option<f64>,
{
    if n > MAX_ORACLE_STATES {
        return Err(Error::Infeasible { what: "tree enumeration", size: n.to_string(), cap: MAX_ORACLE_STATES });
    }
    let mut best: Option<f64> = None;
    for_each_in_tree(n, root, |v, u| cost(v, u).is_some(), |parent| {
        let c: f64 = (0..n).filter(|&v| v != root).map(|v| cost(v, parent[v]).unwrap()).sum();
        if best.is_none_or(|b| c < b) {
            best = Some(c);
        }
    });
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_match_cayley() {
        // Complete digraph on n vertices has n^(n-2) spanning trees per root.
        for n in 2..=6 {
            let mut count = 0usize;
            for_each_in_tree(n, 0, |_, _| true, |_| count += 1);
            assert_eq!(count, n.pow(n as u32 - 2));
        }
    }

    #[test]
    fn two_vertices() {
        let costs = all_roots_min_in_tree(2, &[(0, 1, 3.0), (1, 0, 5.0)]).unwrap();
        assert_eq!(costs, vec![5.0, 3.0]);
    }

    #[test]
    fn single_vertex() {
        assert_eq!(all_roots_min_in_tree(1, &[]).unwrap(), vec![0.0]);
    }

    #[test]
    fn not_strongly_connected() {
        assert!(all_roots_min_in_tree(3, &[(0, 1, 1.0), (1, 0, 1.0), (2, 0, 1.0)]).is_err());
    }

    #[test]
    fn matches_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.random_range(2..=7);
            let mut m = vec![vec![None; n]; n];
            let mut edges = Vec::new();
            for v in 0..n {
                // Cycle edge keeps the graph strongly connected.
                let c = if rng.random_bool(0.3) { rng.random_range(0..3) as f64 } else { rng.random_range(0.0..5.0) };
                m[v][(v + 1) % n] = Some(c);
                for u in 0..n {
                    if u != v && m[v][u].is_none() && rng.random_bool(0.5) {
                        let c = if rng.random_bool(0.3) { rng.random_range(0..3) as f64 } else { rng.random_range(0.0..5.0) };
                        m[v][u] = Some(c);
                    }
                }
            }
            for v in 0..n {
                for u in 0..n {
                    if let Some(c) = m[v][u] {
                        edges.push((v, u, c));
                    }
                }
            }
            let fast = all_roots_min_in_tree(n, &edges).unwrap();
            for r in 0..n {
                let slow = exhaustive_min_in_tree(n, r, |v, u| m[v][u]).unwrap().unwrap();
                assert!((fast[r] - slow).abs() < 1e-9, "root {r}: {} vs {slow}", fast[r]);
            }
        }
    }
}
