//! Loop cutsets, the conditioning transform, and classical cutset
//! conditioning.
//!
//! Conditioning on a cutset absorbs as many outgoing arcs of the cutset
//! variables as possible without disconnecting the network. Which arcs go
//! depends only on the cutset, so every instantiation of it shares one
//! [`ConditionedStructure`].

use crate::error::{Error, Result};
use crate::model::graph::{self, UnionFind};
use crate::model::{Assignments, Cpt, Findings, Instantiation, Network, SupportVector, VarId};
use crate::polytree::PolytreeState;
use crate::scalar::Prob;

/// A variable set whose conditioning leaves the network singly connected.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LoopCutset(Vec<VarId>);

impl LoopCutset {
    /// Validates `vars` as a loop cutset of `net`.
    pub fn new<T: Prob>(net: &Network<T>, vars: &[VarId]) -> Result<LoopCutset> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        if let Some(&v) = vars.iter().find(|&&v| v >= net.len()) {
            return Err(Error::InvalidInstantiation(format!("cutset variable {v} out of range")));
        }
        if !is_loop_cutset(net, &vars) {
            return Err(Error::Structural(format!(
                "{{{}}} is not a loop cutset",
                vars.iter().map(|&v| net.name(v)).collect::<Vec<_>>().join(",")
            )));
        }
        Ok(LoopCutset(vars))
    }

    pub fn empty() -> LoopCutset {
        LoopCutset(Vec::new())
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Number of cutset instantiations.
    pub fn case_count<T: Prob>(&self, net: &Network<T>) -> u128 {
        self.0.iter().map(|&v| net.cardinality(v) as u128).product()
    }
}

/// True iff absorbing arcs out of `vars` leaves no undirected cycle.
pub fn is_loop_cutset<T: Prob>(net: &Network<T>, vars: &[VarId]) -> bool {
    ConditionedStructure::with_vars(net, vars).is_singly_connected()
}

/// Greedy loop-cutset search.
///
/// Repeatedly strips vertices of degree at most one, then conditions on the
/// vertex of highest remaining degree (lowest id on ties) that still has an
/// outgoing arc. Redundant members are dropped afterwards. The result is
/// always valid but not necessarily minimum.
pub fn find_loop_cutset<T: Prob>(net: &Network<T>) -> LoopCutset {
    let n = net.len();
    let mut alive: Vec<(VarId, VarId)> = net.edges();
    let mut cutset = Vec::new();
    loop {
        // Strip everything that cannot lie on a cycle.
        loop {
            let mut degree = vec![0usize; n];
            for &(a, b) in &alive {
                degree[a] += 1;
                degree[b] += 1;
            }
            let before = alive.len();
            alive.retain(|&(a, b)| degree[a] > 1 && degree[b] > 1);
            if alive.len() == before {
                break;
            }
        }
        if alive.is_empty() {
            break;
        }
        let mut degree = vec![0usize; n];
        let mut out_degree = vec![0usize; n];
        for &(a, b) in &alive {
            degree[a] += 1;
            degree[b] += 1;
            out_degree[a] += 1;
        }
        let pick = (0..n)
            .filter(|&v| out_degree[v] > 0)
            .max_by_key(|&v| (degree[v], std::cmp::Reverse(v)))
            .expect("a remaining cycle has a vertex with an outgoing arc");
        cutset.push(pick);
        alive.retain(|&(a, _)| a != pick);
    }
    cutset.sort_unstable();
    for i in (0..cutset.len()).rev() {
        let mut smaller = cutset.clone();
        smaller.remove(i);
        if is_loop_cutset(net, &smaller) {
            cutset = smaller;
        }
    }
    debug_assert!(is_loop_cutset(net, &cutset));
    LoopCutset(cutset)
}

/// The shape of a network conditioned on a cutset, shared by every
/// instantiation of that cutset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionedStructure {
    cutset: Vec<VarId>,
    absorbed: Vec<(VarId, VarId)>,
    parents: Vec<Vec<VarId>>,
    children: Vec<Vec<VarId>>,
    absorbed_parents: Vec<Vec<VarId>>,
    component: Vec<usize>,
}

impl ConditionedStructure {
    pub fn new<T: Prob>(net: &Network<T>, cutset: &LoopCutset) -> Self {
        Self::with_vars(net, cutset.vars())
    }

    /// Absorption rule: arcs leaving non-cutset variables always stay.
    /// Outgoing arcs of cutset variables are visited in (parent, child) id
    /// order and kept only when needed to join two otherwise disconnected
    /// parts; everything else is absorbed. The kept arcs form a spanning
    /// forest, so each original component stays connected.
    fn with_vars<T: Prob>(net: &Network<T>, vars: &[VarId]) -> Self {
        let n = net.len();
        let mut cutset = vars.to_vec();
        cutset.sort_unstable();
        cutset.dedup();
        let in_cutset = |v: VarId| cutset.binary_search(&v).is_ok();

        let mut uf = UnionFind::new(n);
        let mut optional = Vec::new();
        for (p, c) in net.edges() {
            if in_cutset(p) {
                optional.push((p, c));
            } else {
                uf.union(p, c);
            }
        }
        optional.sort_unstable();
        let mut absorbed = Vec::new();
        for (p, c) in optional {
            if !uf.union(p, c) {
                absorbed.push((p, c));
            }
        }
        absorbed.sort_unstable();

        let mut parents = vec![Vec::new(); n];
        let mut absorbed_parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            for &p in net.parents(v) {
                if absorbed.binary_search(&(p, v)).is_ok() {
                    absorbed_parents[v].push(p);
                } else {
                    parents[v].push(p);
                    children[p].push(v);
                }
            }
            absorbed_parents[v].sort_unstable();
        }
        for list in &mut children {
            list.sort_unstable();
        }
        let component = graph::components(n, &net.edges());
        ConditionedStructure {
            cutset,
            absorbed,
            parents,
            children,
            absorbed_parents,
            component,
        }
    }

    /// Structure of an unconditioned network.
    pub fn identity<T: Prob>(net: &Network<T>) -> Self {
        Self::with_vars(net, &[])
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn cutset(&self) -> &[VarId] {
        &self.cutset
    }

    pub fn in_cutset(&self, v: VarId) -> bool {
        self.cutset.binary_search(&v).is_ok()
    }

    /// Absorbed arcs `(cutset variable, child)`.
    pub fn absorbed_arcs(&self) -> &[(VarId, VarId)] {
        &self.absorbed
    }

    pub fn is_absorbed(&self, parent: VarId, child: VarId) -> bool {
        self.absorbed.binary_search(&(parent, child)).is_ok()
    }

    /// Retained parents, in the order of the original cpt.
    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.parents[v]
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v]
    }

    /// Former parents whose arc into `v` was absorbed.
    pub fn absorbed_parents(&self, v: VarId) -> &[VarId] {
        &self.absorbed_parents[v]
    }

    pub fn component(&self, v: VarId) -> usize {
        self.component[v]
    }

    /// Lowest-id member of every component other than `v`'s.
    pub fn other_component_representatives(&self, v: VarId) -> Vec<VarId> {
        let mut seen = vec![false; self.len()];
        seen[self.component[v]] = true;
        let mut reps = Vec::new();
        for u in 0..self.len() {
            let c = self.component[u];
            if !seen[c] {
                seen[c] = true;
                reps.push(u);
            }
        }
        reps
    }

    /// Retained edges `(parent, child)`.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        (0..self.len())
            .flat_map(|v| self.parents[v].iter().map(move |&p| (p, v)))
            .collect()
    }

    pub fn is_singly_connected(&self) -> bool {
        graph::is_forest(self.len(), &self.edges())
    }

    /// Applies a cutset instantiation: reduces the cpts of absorption
    /// targets and adds the instantiation as evidence.
    pub fn instantiate<T: Prob>(
        &self,
        net: &Network<T>,
        c: &Instantiation,
        findings: &Findings,
    ) -> Result<ConditionedNetwork<T>> {
        let vars: Vec<VarId> = c.vars().collect();
        if vars != self.cutset {
            return Err(Error::InvalidInstantiation(format!(
                "conditioning instantiation {c} does not cover exactly the cutset"
            )));
        }
        net.check_instantiation(c)?;
        let mut findings = findings.clone();
        for (v, x) in c.iter() {
            findings.observe(v, x);
        }
        let cpts = (0..net.len())
            .map(|v| {
                if self.absorbed_parents[v].is_empty() {
                    net.cpt(v).clone()
                } else {
                    net.cpt(v).reduce(&c.restrict(&self.absorbed_parents[v]))
                }
            })
            .collect();
        Ok(ConditionedNetwork {
            structure: self.clone(),
            instantiation: c.clone(),
            cpts,
            cardinalities: net.cardinalities(),
            findings,
        })
    }
}

/// A network conditioned on one cutset instantiation.
#[derive(Clone, Debug)]
pub struct ConditionedNetwork<T: Prob = f64> {
    structure: ConditionedStructure,
    instantiation: Instantiation,
    cpts: Vec<Cpt<T>>,
    cardinalities: Vec<usize>,
    findings: Findings,
}

impl<T: Prob> ConditionedNetwork<T> {
    /// The network itself with the given findings; no arcs absorbed.
    pub fn unconditioned(net: &Network<T>, findings: &Findings) -> Self {
        ConditionedStructure::identity(net)
            .instantiate(net, &Instantiation::new(), findings)
            .expect("empty instantiation fits the empty cutset")
    }

    pub fn structure(&self) -> &ConditionedStructure {
        &self.structure
    }

    pub fn instantiation(&self) -> &Instantiation {
        &self.instantiation
    }

    pub fn len(&self) -> usize {
        self.cpts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cpts.is_empty()
    }

    pub fn cardinality(&self, v: VarId) -> usize {
        self.cardinalities[v]
    }

    /// Reduced cpt; its parents are the retained parents.
    pub fn cpt(&self, v: VarId) -> &Cpt<T> {
        &self.cpts[v]
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        self.cpts[v].parents()
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        self.structure.children(v)
    }

    /// Original evidence plus the cutset instantiation.
    pub fn findings(&self) -> &Findings {
        &self.findings
    }

    pub fn is_singly_connected(&self) -> bool {
        self.structure.is_singly_connected()
    }
}

/// Conditions `net` on a full instantiation of `cutset`.
pub fn condition<T: Prob>(net: &Network<T>, cutset: &LoopCutset, c: &Instantiation) -> Result<ConditionedNetwork<T>> {
    ConditionedStructure::new(net, cutset).instantiate(net, c, &Findings::none(net))
}

/// Instantiations of `vars` in canonical order.
pub fn cutset_instantiations<T: Prob>(net: &Network<T>, vars: &[VarId]) -> impl Iterator<Item = Instantiation> {
    let cards: Vec<usize> = vars.iter().map(|&v| net.cardinality(v)).collect();
    let vars = vars.to_vec();
    Assignments::full(&cards).map(move |vals| Instantiation::from_parts(&vars, &vals))
}

/// Result of classical cutset conditioning.
#[derive(Clone, Debug, PartialEq)]
pub struct CutsetRun<T: Prob = f64> {
    pub belief: SupportVector<T>,
    /// Conditioned networks evaluated.
    pub cases: u128,
}

/// `Pr(x ∧ e)` as the sum of polytree beliefs over every cutset instantiation.
pub fn cutset_conditioning_belief<T: Prob>(
    net: &Network<T>,
    target: VarId,
    evidence: &Instantiation,
    cutset: Option<&LoopCutset>,
) -> Result<CutsetRun<T>> {
    let findings = Findings::from_evidence(net, evidence)?;
    let (beliefs, cases) = cutset_conditioning_beliefs(net, &findings, cutset, Some(target))?;
    let belief = beliefs.into_iter().nth(target).expect("target computed");
    Ok(CutsetRun { belief, cases })
}

/// Cutset conditioning for every variable at once (or only `only`, with the
/// other entries left zero), one polytree state per conditioned network.
pub fn cutset_conditioning_beliefs<T: Prob>(
    net: &Network<T>,
    findings: &Findings,
    cutset: Option<&LoopCutset>,
    only: Option<VarId>,
) -> Result<(Vec<SupportVector<T>>, u128)> {
    let found;
    let cutset = match cutset {
        Some(c) => c,
        None => {
            found = find_loop_cutset(net);
            &found
        }
    };
    let structure = ConditionedStructure::new(net, cutset);
    let mut acc: Vec<Vec<T>> = net
        .variables()
        .iter()
        .map(|v| vec![T::zero(); v.cardinality()])
        .collect();
    let mut cases = 0u128;
    for c in cutset_instantiations(net, cutset.vars()) {
        cases += 1;
        let cn = structure.instantiate(net, &c, findings)?;
        let mut state = PolytreeState::new(&cn)?;
        let targets: Vec<VarId> = match only {
            Some(t) => vec![t],
            None => (0..net.len()).collect(),
        };
        for v in targets {
            let bel = state.belief(v)?;
            for (a, b) in acc[v].iter_mut().zip(bel.values) {
                *a = *a + b;
            }
        }
    }
    let beliefs = acc
        .into_iter()
        .enumerate()
        .map(|(v, vals)| SupportVector::new(v, vals))
        .collect();
    Ok((beliefs, cases))
}
