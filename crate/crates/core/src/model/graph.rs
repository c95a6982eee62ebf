//! Small graph utilities over `(parent, child)` edge lists.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::VarId;

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Kahn's algorithm, smallest ready id first. On a cycle returns some
/// variable that lies on or behind it.
pub fn topological_order(n: usize, edges: &[(VarId, VarId)]) -> Result<Vec<VarId>, VarId> {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(p, c) in edges {
        indegree[c] += 1;
        out[p].push(c);
    }
    let mut ready: BinaryHeap<Reverse<VarId>> = (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &c in &out[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&v| indegree[v] > 0).unwrap_or(0))
    }
}

/// True iff the undirected version of the edge list has no cycle.
pub fn is_forest(n: usize, edges: &[(VarId, VarId)]) -> bool {
    let mut uf = UnionFind::new(n);
    edges.iter().all(|&(a, b)| uf.union(a, b))
}

/// Connected component label of every vertex, labels in order of first
/// appearance.
pub fn components(n: usize, edges: &[(VarId, VarId)]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    let mut root_label = vec![usize::MAX; n];
    let mut next = 0;
    (0..n)
        .map(|v| {
            let r = uf.find(v);
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            root_label[r]
        })
        .collect()
}

/// Undirected adjacency lists.
pub fn undirected_adjacency(n: usize, edges: &[(VarId, VarId)]) -> Vec<Vec<VarId>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// Sorted-set union of two sorted id slices.
pub fn union_sorted(a: &[VarId], b: &[VarId]) -> Vec<VarId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn intersect_sorted(a: &[VarId], b: &[VarId]) -> Vec<VarId> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub fn is_subset_sorted(a: &[VarId], b: &[VarId]) -> bool {
    intersect_sorted(a, b).len() == a.len()
}
