//! Relevant and local cutsets.
//!
//! A relevant cutset of a support or message is a subset of the loop cutset
//! outside of which the value never changes. They are computed by one pass
//! over the conditioned polytree: a message carries the absorption sets of
//! its sender plus the relevant cutsets of every message entering the
//! sender from elsewhere. Local cutsets (belief, causal, diagnostic) are
//! then read off pairwise overlaps of relevant cutsets.

use std::collections::HashMap;

use crate::cutset::{ConditionedStructure, LoopCutset};
use crate::model::graph::{intersect_sorted, union_sorted, UnionFind};
use crate::model::{Network, VarId};
use crate::scalar::Prob;

/// `A⁺` and `A⁻` for every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionSets {
    plus: Vec<Vec<VarId>>,
    minus: Vec<Vec<VarId>>,
}

impl AbsorptionSets {
    pub fn plus(&self, v: VarId) -> &[VarId] {
        &self.plus[v]
    }

    pub fn minus(&self, v: VarId) -> &[VarId] {
        &self.minus[v]
    }

    /// `A⁺ ∪ A⁻`.
    pub fn both(&self, v: VarId) -> Vec<VarId> {
        union_sorted(&self.plus[v], &self.minus[v])
    }
}

/// `A⁺(X)`: former parents absorbed into X; `A⁻(X)`: `{X}` for cutset members.
pub fn compute_absorption_sets(structure: &ConditionedStructure) -> AbsorptionSets {
    let n = structure.len();
    AbsorptionSets {
        plus: (0..n).map(|v| structure.absorbed_parents(v).to_vec()).collect(),
        minus: (0..n)
            .map(|v| if structure.in_cutset(v) { vec![v] } else { Vec::new() })
            .collect(),
    }
}

/// Relevant cutsets of every support and message of the conditioned polytree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelevantCutsets {
    pi_support: Vec<Vec<VarId>>,
    lambda_support: Vec<Vec<VarId>>,
    pi_message: HashMap<(VarId, VarId), Vec<VarId>>,
    lambda_message: HashMap<(VarId, VarId), Vec<VarId>>,
    visited_edges: usize,
}

impl RelevantCutsets {
    /// `R⁺_X`, for π(x).
    pub fn pi_support(&self, x: VarId) -> &[VarId] {
        &self.pi_support[x]
    }

    /// `R⁻_X`, for λ(x).
    pub fn lambda_support(&self, x: VarId) -> &[VarId] {
        &self.lambda_support[x]
    }

    /// `R⁺_{UX}`, for the π message from parent `u` to `x`.
    pub fn pi_message(&self, u: VarId, x: VarId) -> &[VarId] {
        &self.pi_message[&(u, x)]
    }

    /// `R⁻_{XY}`, for the λ message from child `y` to `x`.
    pub fn lambda_message(&self, x: VarId, y: VarId) -> &[VarId] {
        &self.lambda_message[&(x, y)]
    }

    /// Number of (message, incoming message) pairs inspected while
    /// computing the sets.
    pub fn visited_edges(&self) -> usize {
        self.visited_edges
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Msg {
    /// π message along retained edge (parent, child).
    Pi(VarId, VarId),
    /// λ message along retained edge (parent, child), sent upward.
    Lambda(VarId, VarId),
}

struct Propagation<'a> {
    structure: &'a ConditionedStructure,
    abs: &'a AbsorptionSets,
    memo: HashMap<Msg, Vec<VarId>>,
    visited: usize,
}

impl Propagation<'_> {
    /// Relevant cutset of every message entering `v` except the one along
    /// `skip`, plus `v`'s own absorption sets.
    fn sender_sets(&mut self, v: VarId, skip: Msg) -> Vec<VarId> {
        let mut acc = self.abs.both(v);
        for &p in self.structure.parents(v) {
            let m = Msg::Pi(p, v);
            if Msg::Lambda(p, v) == skip {
                continue;
            }
            self.visited += 1;
            let r = self.get(m);
            acc = union_sorted(&acc, &r);
        }
        for &c in self.structure.children(v) {
            let m = Msg::Lambda(v, c);
            if Msg::Pi(v, c) == skip {
                continue;
            }
            self.visited += 1;
            let r = self.get(m);
            acc = union_sorted(&acc, &r);
        }
        acc
    }

    fn get(&mut self, m: Msg) -> Vec<VarId> {
        if let Some(r) = self.memo.get(&m) {
            return r.clone();
        }
        // A message out of `v` toward `w` excludes what `w` sends back to `v`.
        let r = match m {
            Msg::Pi(u, x) => self.sender_sets(u, Msg::Pi(u, x)),
            Msg::Lambda(x, y) => self.sender_sets(y, Msg::Lambda(x, y)),
        };
        self.memo.insert(m, r.clone());
        r
    }
}

/// Computes `R⁺_{UX}`, `R⁻_{XY}`, `R⁺_X` and `R⁻_X` in one memoized pass.
pub fn compute_relevant_cutsets(structure: &ConditionedStructure, abs: &AbsorptionSets) -> RelevantCutsets {
    let n = structure.len();
    let mut prop = Propagation {
        structure,
        abs,
        memo: HashMap::new(),
        visited: 0,
    };
    let edges = structure.edges();
    for &(p, c) in &edges {
        prop.get(Msg::Pi(p, c));
        prop.get(Msg::Lambda(p, c));
    }
    let mut pi_message = HashMap::with_capacity(edges.len());
    let mut lambda_message = HashMap::with_capacity(edges.len());
    for (m, r) in prop.memo {
        match m {
            Msg::Pi(u, x) => pi_message.insert((u, x), r),
            Msg::Lambda(x, y) => lambda_message.insert((x, y), r),
        };
    }
    let pi_support = (0..n)
        .map(|x| {
            structure
                .parents(x)
                .iter()
                .fold(abs.plus(x).to_vec(), |acc, &u| union_sorted(&acc, &pi_message[&(u, x)]))
        })
        .collect();
    let lambda_support = (0..n)
        .map(|x| {
            structure.children(x).iter().fold(abs.minus(x).to_vec(), |acc, &y| {
                union_sorted(&acc, &lambda_message[&(x, y)])
            })
        })
        .collect();
    RelevantCutsets {
        pi_support,
        lambda_support,
        pi_message,
        lambda_message,
        visited_edges: prop.visited,
    }
}

/// Belief, causal and diagnostic cutsets of every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCutsets {
    belief: Vec<Vec<VarId>>,
    causal: Vec<Vec<VarId>>,
    diagnostic: Vec<Vec<VarId>>,
}

impl LocalCutsets {
    /// `C_X`.
    pub fn belief(&self, x: VarId) -> &[VarId] {
        &self.belief[x]
    }

    /// `C⁺_X`.
    pub fn causal(&self, x: VarId) -> &[VarId] {
        &self.causal[x]
    }

    /// `C⁻_X`.
    pub fn diagnostic(&self, x: VarId) -> &[VarId] {
        &self.diagnostic[x]
    }
}

fn pairwise_overlap(sets: &[&[VarId]]) -> Vec<VarId> {
    let mut acc = Vec::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            acc = union_sorted(&acc, &intersect_sorted(sets[i], sets[j]));
        }
    }
    acc
}

/// `C_X = R⁺_X ∩ R⁻_X`; `C⁺_X = A⁺_X ∪ ⋃_{i≠j} R⁺_{U_iX} ∩ R⁺_{U_jX}`;
/// `C⁻_X = A⁻_X ∪ ⋃_{i≠j} R⁻_{XY_i} ∩ R⁻_{XY_j}`.
pub fn derive_local_cutsets(
    structure: &ConditionedStructure,
    rel: &RelevantCutsets,
    abs: &AbsorptionSets,
) -> LocalCutsets {
    let n = structure.len();
    let mut out = LocalCutsets {
        belief: Vec::with_capacity(n),
        causal: Vec::with_capacity(n),
        diagnostic: Vec::with_capacity(n),
    };
    for x in 0..n {
        out.belief
            .push(intersect_sorted(rel.pi_support(x), rel.lambda_support(x)));
        let incoming: Vec<&[VarId]> = structure.parents(x).iter().map(|&u| rel.pi_message(u, x)).collect();
        out.causal.push(union_sorted(abs.plus(x), &pairwise_overlap(&incoming)));
        let outgoing: Vec<&[VarId]> = structure
            .children(x)
            .iter()
            .map(|&y| rel.lambda_message(x, y))
            .collect();
        out.diagnostic
            .push(union_sorted(abs.minus(x), &pairwise_overlap(&outgoing)));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalCutsetKind {
    Belief,
    Causal,
    Diagnostic,
}

/// Checks a candidate local cutset by graph separation.
///
/// The candidate (plus `belief` for causal and diagnostic checks) is deleted
/// from the undirected original graph together with `x`, and the remaining
/// components are labelled by which neighbours of `x` they touch:
/// - belief: no component touches both a parent and a child of `x`;
/// - causal: no component touches two different parents;
/// - diagnostic: no component touches two different children.
///
/// When `x` itself is conditioned on, its absorbed outgoing arcs no longer
/// make the target a child.
pub fn verify_local_cutset<T: Prob>(
    net: &Network<T>,
    structure: &ConditionedStructure,
    x: VarId,
    kind: LocalCutsetKind,
    candidate: &[VarId],
    belief: &[VarId],
) -> bool {
    let n = net.len();
    let mut deleted = vec![false; n];
    for &v in candidate {
        deleted[v] = true;
    }
    if kind != LocalCutsetKind::Belief {
        for &v in belief {
            deleted[v] = true;
        }
    }
    let x_conditioned = deleted[x];
    deleted[x] = true;
    let mut uf = UnionFind::new(n);
    for (a, b) in net.edges() {
        if !deleted[a] && !deleted[b] {
            uf.union(a, b);
        }
    }
    let parents: Vec<VarId> = net.parents(x).iter().copied().filter(|&u| !deleted[u]).collect();
    let children: Vec<VarId> = net
        .children(x)
        .iter()
        .copied()
        .filter(|&w| !deleted[w] && !(x_conditioned && structure.is_absorbed(x, w)))
        .collect();
    let parent_roots: Vec<usize> = parents.iter().map(|&u| uf.find(u)).collect();
    let child_roots: Vec<usize> = children.iter().map(|&w| uf.find(w)).collect();
    let all_distinct = |roots: &[usize]| (0..roots.len()).all(|i| !roots[..i].contains(&roots[i]));
    match kind {
        LocalCutsetKind::Belief => parent_roots.iter().all(|r| !child_roots.contains(r)),
        LocalCutsetKind::Causal => all_distinct(&parent_roots),
        LocalCutsetKind::Diagnostic => all_distinct(&child_roots),
    }
}

/// Everything derived from a network and one loop cutset.
#[derive(Clone, Debug)]
pub struct CutsetAnalysis {
    pub cutset: LoopCutset,
    pub structure: ConditionedStructure,
    pub absorption: AbsorptionSets,
    pub relevant: RelevantCutsets,
    pub local: LocalCutsets,
}

impl CutsetAnalysis {
    pub fn new<T: Prob>(net: &Network<T>, cutset: LoopCutset) -> Self {
        let structure = ConditionedStructure::new(net, &cutset);
        let absorption = compute_absorption_sets(&structure);
        let relevant = compute_relevant_cutsets(&structure, &absorption);
        let local = derive_local_cutsets(&structure, &relevant, &absorption);
        CutsetAnalysis {
            cutset,
            structure,
            absorption,
            relevant,
            local,
        }
    }

    /// Verifies the three local cutsets of `x`.
    pub fn verify<T: Prob>(&self, net: &Network<T>, x: VarId) -> [bool; 3] {
        let belief = self.local.belief(x);
        [
            verify_local_cutset(net, &self.structure, x, LocalCutsetKind::Belief, belief, &[]),
            verify_local_cutset(
                net,
                &self.structure,
                x,
                LocalCutsetKind::Causal,
                self.local.causal(x),
                belief,
            ),
            verify_local_cutset(
                net,
                &self.structure,
                x,
                LocalCutsetKind::Diagnostic,
                self.local.diagnostic(x),
                belief,
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn diamond() -> (Network, CutsetAnalysis) {
        let net = fixtures::net_d();
        let cutset = LoopCutset::new(&net, &[0]).unwrap();
        let analysis = CutsetAnalysis::new(&net, cutset);
        (net, analysis)
    }

    #[test]
    fn diamond_absorption_sets() {
        let (_, a) = diamond();
        assert_eq!(a.absorption.plus(2), &[0]);
        assert!(a.absorption.plus(1).is_empty());
        assert_eq!(a.absorption.minus(0), &[0]);
        for v in 1..4 {
            assert!(a.absorption.minus(v).is_empty());
        }
        assert!(a.absorption.plus(0).is_empty());
        assert!(a.absorption.plus(3).is_empty());
    }

    #[test]
    fn diamond_relevant_cutsets() {
        let (_, a) = diamond();
        let r = &a.relevant;
        assert_eq!(r.pi_message(1, 3), &[0]);
        assert_eq!(r.pi_message(2, 3), &[0]);
        assert_eq!(r.pi_support(3), &[0]);
        assert!(r.lambda_support(3).is_empty());
    }

    #[test]
    fn diamond_local_cutsets() {
        let (net, a) = diamond();
        assert!(a.local.belief(3).is_empty());
        assert_eq!(a.local.causal(3), &[0]);
        assert!(a.local.diagnostic(3).is_empty());
        for x in 0..4 {
            assert_eq!(a.verify(&net, x), [true; 3], "variable {x}");
        }
    }

    #[test]
    fn verify_examples() {
        let (net, a) = diamond();
        let s = &a.structure;
        assert!(verify_local_cutset(&net, s, 3, LocalCutsetKind::Causal, &[0], &[]));
        assert!(!verify_local_cutset(&net, s, 3, LocalCutsetKind::Causal, &[], &[]));
        for x in 0..4 {
            assert!(verify_local_cutset(
                &net,
                s,
                x,
                LocalCutsetKind::Belief,
                a.cutset.vars(),
                &[]
            ));
        }
        // B's ancestors and descendants meet through C unless A is fixed.
        assert!(!verify_local_cutset(&net, s, 1, LocalCutsetKind::Belief, &[], &[]));
    }

    #[test]
    fn polytree_sets_are_empty() {
        let net = fixtures::net_a();
        let a = CutsetAnalysis::new(&net, LoopCutset::empty());
        for x in 0..2 {
            assert!(a.relevant.pi_support(x).is_empty());
            assert!(a.relevant.lambda_support(x).is_empty());
            assert!(a.local.belief(x).is_empty());
            assert!(a.local.causal(x).is_empty());
            assert!(a.local.diagnostic(x).is_empty());
        }
        assert!(a.relevant.pi_message(0, 1).is_empty());
        assert!(a.relevant.lambda_message(0, 1).is_empty());
    }
}
