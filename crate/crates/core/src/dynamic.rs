//! Dynamic conditioning: exact belief computation on multiply connected
//! networks.
//!
//! The engine runs the polytree recursion over the structure left by a
//! loop cutset, but never instantiates the whole cutset. Each support or
//! message is evaluated under a partial conditioning context and
//!
//! * sums over the instantiations of its local cutset that the context does
//!   not fix yet (belief cutset for beliefs and outgoing messages, causal
//!   cutset for π, diagnostic cutset for λ), and
//! * is cached under the restriction of the context to its relevant
//!   cutset, so contexts that agree there share one computation.
//!
//! A value computed under context `c` equals the corresponding polytree
//! quantity summed over every instantiation of the relevant cutset not
//! fixed by `c`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::analysis::CutsetAnalysis;
use crate::cutset::{find_loop_cutset, LoopCutset};
use crate::error::{Error, Result};
use crate::model::{Assignments, Findings, Instantiation, Network, SupportVector, VarId};
use crate::scalar::Prob;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MessageKind {
    PiSupport,
    LambdaSupport,
    PiMessage,
    LambdaMessage,
}

/// Cache key: what is computed, between which variables, and under which
/// instantiation of its relevant cutset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MessageKey {
    pub kind: MessageKind,
    pub from: VarId,
    pub to: VarId,
    pub context: Instantiation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// π and λ messages computed; equals `cache_misses`.
    pub messages_computed: usize,
    pub cache_hits: usize,
    pub cache_misses: usize,
    /// π and λ supports computed, and requests for them served from cache.
    pub supports_computed: usize,
    pub support_cache_hits: usize,
    /// Local-cutset instantiations summed over, across all nontrivial sums.
    pub conditioning_cases_expanded: usize,
    /// π and λ messages computed per retained arc `(parent, child)`,
    /// both directions together.
    pub per_arc: BTreeMap<(VarId, VarId), usize>,
    /// λ-support computations per variable.
    pub lambda_support_evaluations: Vec<usize>,
    /// Distinct relevant-cutset instantiations requested for each λ-support.
    pub lambda_support_keys: Vec<usize>,
}

impl EngineStats {
    pub fn max_per_arc(&self) -> usize {
        self.per_arc.values().copied().max().unwrap_or(0)
    }

    pub fn arc_messages(&self) -> usize {
        self.per_arc.values().sum()
    }
}

fn is_support(kind: MessageKind) -> bool {
    matches!(kind, MessageKind::PiSupport | MessageKind::LambdaSupport)
}

#[derive(Clone, Copy, Debug)]
enum ParentSlot {
    Retained(usize),
    Absorbed(VarId),
}

/// One engine per query stream: the cache and statistics are private to it.
#[derive(Debug)]
pub struct DynamicEngine<'a, T: Prob = f64> {
    net: &'a Network<T>,
    analysis: CutsetAnalysis,
    findings: Findings,
    slots: Vec<Vec<ParentSlot>>,
    cache: HashMap<MessageKey, Vec<T>>,
    caching: bool,
    in_progress: HashSet<MessageKey>,
    lambda_keys: Vec<HashSet<Instantiation>>,
    stats: EngineStats,
}

impl<'a, T: Prob> DynamicEngine<'a, T> {
    /// Engine over the cutset found by [`find_loop_cutset`].
    pub fn new(net: &'a Network<T>, findings: Findings) -> Self {
        Self::with_cutset(net, findings, find_loop_cutset(net))
    }

    pub fn with_cutset(net: &'a Network<T>, findings: Findings, cutset: LoopCutset) -> Self {
        Self::with_analysis(net, findings, CutsetAnalysis::new(net, cutset))
    }

    pub fn with_analysis(net: &'a Network<T>, findings: Findings, analysis: CutsetAnalysis) -> Self {
        let n = net.len();
        let slots = (0..n)
            .map(|x| {
                let retained = analysis.structure.parents(x);
                net.parents(x)
                    .iter()
                    .map(|&p| match retained.iter().position(|&r| r == p) {
                        Some(k) => ParentSlot::Retained(k),
                        None => ParentSlot::Absorbed(p),
                    })
                    .collect()
            })
            .collect();
        DynamicEngine {
            net,
            analysis,
            findings,
            slots,
            cache: HashMap::new(),
            caching: true,
            in_progress: HashSet::new(),
            lambda_keys: vec![HashSet::new(); n],
            stats: EngineStats {
                lambda_support_evaluations: vec![0; n],
                lambda_support_keys: vec![0; n],
                ..EngineStats::default()
            },
        }
    }

    /// Turns the message cache off; every request is recomputed.
    pub fn without_cache(mut self) -> Self {
        self.caching = false;
        self
    }

    pub fn analysis(&self) -> &CutsetAnalysis {
        &self.analysis
    }

    pub fn stats(&self) -> &EngineStats {
        &self.stats
    }

    pub fn reset_stats(&mut self) {
        let n = self.net.len();
        self.stats = EngineStats {
            lambda_support_evaluations: vec![0; n],
            lambda_support_keys: vec![0; n],
            ..EngineStats::default()
        };
        self.lambda_keys = vec![HashSet::new(); n];
    }

    /// `BEL(x) = Σ_{c_X} π(x | c_X) λ(x | c_X)`, times the evidence mass of
    /// other connected components.
    pub fn belief(&mut self, x: VarId) -> Result<SupportVector<T>> {
        let mut bel = self.component_belief(x)?;
        for r in self.analysis.structure.other_component_representatives(x) {
            let mass: T = self.component_belief(r)?.into_iter().sum();
            for b in &mut bel {
                *b = *b * mass;
            }
        }
        Ok(SupportVector::new(x, bel))
    }

    /// Beliefs of every variable, sharing the cache.
    pub fn belief_all(&mut self) -> Result<Vec<SupportVector<T>>> {
        (0..self.net.len()).map(|x| self.belief(x)).collect()
    }

    /// `π(x | c)`.
    pub fn pi_support(&mut self, x: VarId, context: &Instantiation) -> Result<SupportVector<T>> {
        Ok(SupportVector::new(x, self.pi(x, context)?))
    }

    /// `λ(x | c)`.
    pub fn lambda_support(&mut self, x: VarId, context: &Instantiation) -> Result<SupportVector<T>> {
        Ok(SupportVector::new(x, self.lambda(x, context)?))
    }

    /// `π_Y(x | c)`, from `x` to its child `y`.
    pub fn pi_message(&mut self, x: VarId, y: VarId, context: &Instantiation) -> Result<SupportVector<T>> {
        if !self.analysis.structure.children(x).contains(&y) {
            return Err(Error::NotAChild { parent: x, child: y });
        }
        Ok(SupportVector::new(x, self.pi_msg(x, y, context)?))
    }

    /// `λ_X(u | c)`, from `x` to its parent `u`.
    pub fn lambda_message(&mut self, x: VarId, u: VarId, context: &Instantiation) -> Result<SupportVector<T>> {
        if !self.analysis.structure.parents(x).contains(&u) {
            return Err(Error::NotAParent { parent: u, child: x });
        }
        Ok(SupportVector::new(u, self.lambda_msg(x, u, context)?))
    }

    fn component_belief(&mut self, x: VarId) -> Result<Vec<T>> {
        let belief_cutset = self.analysis.local.belief(x).to_vec();
        let mut out = vec![T::zero(); self.net.cardinality(x)];
        for c in self.expand(&Instantiation::new(), &belief_cutset) {
            let pi = self.pi(x, &c)?;
            let lambda = self.lambda(x, &c)?;
            for ((o, p), l) in out.iter_mut().zip(pi).zip(lambda) {
                *o = *o + p * l;
            }
        }
        Ok(out)
    }

    /// Extensions of `base` by every allowed instantiation of the variables
    /// of `vars` that `base` leaves free, in canonical order.
    fn expand(&mut self, base: &Instantiation, vars: &[VarId]) -> Vec<Instantiation> {
        let free: Vec<VarId> = vars.iter().copied().filter(|&v| !base.contains(v)).collect();
        let choices = free.iter().map(|&v| self.findings.allowed_values(v)).collect();
        let out: Vec<Instantiation> = Assignments::new(choices)
            .map(|vals| {
                let mut c = base.clone();
                for (&v, x) in free.iter().zip(vals) {
                    c.insert(v, x);
                }
                c
            })
            .collect();
        if !free.is_empty() {
            self.stats.conditioning_cases_expanded += out.len();
        }
        out
    }

    /// Indicator of `x = value` from findings and, for cutset members, the
    /// conditioning context.
    fn indicator(&self, x: VarId, value: usize, context: &Instantiation) -> T {
        let fixed = match context.get(x) {
            Some(c) if self.analysis.structure.in_cutset(x) => c == value,
            _ => true,
        };
        if fixed && self.findings.allows(x, value) {
            T::one()
        } else {
            T::zero()
        }
    }

    fn lookup(&mut self, key: &MessageKey) -> Result<Option<Vec<T>>> {
        if key.kind == MessageKind::LambdaSupport && self.lambda_keys[key.from].insert(key.context.clone()) {
            self.stats.lambda_support_keys[key.from] += 1;
        }
        if self.caching {
            if let Some(v) = self.cache.get(key) {
                if is_support(key.kind) {
                    self.stats.support_cache_hits += 1;
                } else {
                    self.stats.cache_hits += 1;
                }
                return Ok(Some(v.clone()));
            }
        }
        if !self.in_progress.insert(key.clone()) {
            return Err(Error::CyclicDependency(format!(
                "{:?} {}->{} under {}",
                key.kind, key.from, key.to, key.context
            )));
        }
        Ok(None)
    }

    fn store(&mut self, key: MessageKey, value: &[T]) {
        self.in_progress.remove(&key);
        if is_support(key.kind) {
            self.stats.supports_computed += 1;
        } else {
            self.stats.cache_misses += 1;
            self.stats.messages_computed += 1;
        }
        match key.kind {
            MessageKind::PiMessage => *self.stats.per_arc.entry((key.from, key.to)).or_default() += 1,
            MessageKind::LambdaMessage => *self.stats.per_arc.entry((key.to, key.from)).or_default() += 1,
            MessageKind::LambdaSupport => self.stats.lambda_support_evaluations[key.from] += 1,
            MessageKind::PiSupport => {}
        }
        if self.caching {
            self.cache.insert(key, value.to_vec());
        }
    }

    /// Row of the original cpt of `x` for retained parent values `u`, with
    /// absorbed parents read from the context.
    fn cpt_row(&self, x: VarId, u: &[usize], context: &Instantiation, buf: &mut Vec<usize>) -> &'a [T] {
        buf.clear();
        for slot in &self.slots[x] {
            buf.push(match *slot {
                ParentSlot::Retained(k) => u[k],
                ParentSlot::Absorbed(p) => context.get(p).expect("absorbed parent fixed by causal cutset"),
            });
        }
        let cpt = self.net.cpt(x);
        cpt.row(cpt.row_index(buf))
    }

    /// Causal support, summing over the causal cutset.
    fn pi(&mut self, x: VarId, context: &Instantiation) -> Result<Vec<T>> {
        let key = MessageKey {
            kind: MessageKind::PiSupport,
            from: x,
            to: x,
            context: context.restrict(self.analysis.relevant.pi_support(x)),
        };
        if let Some(v) = self.lookup(&key)? {
            return Ok(v);
        }
        let causal = self.analysis.local.causal(x).to_vec();
        let parents = self.analysis.structure.parents(x).to_vec();
        let mut out = vec![T::zero(); self.net.cardinality(x)];
        let mut buf = Vec::new();
        for c in self.expand(&key.context, &causal) {
            let messages = parents
                .iter()
                .map(|&u| self.pi_msg(u, x, &c))
                .collect::<Result<Vec<_>>>()?;
            let choices = parents.iter().map(|&u| self.findings.allowed_values(u)).collect();
            for u in Assignments::new(choices) {
                let w = u.iter().zip(&messages).fold(T::one(), |acc, (&ui, m)| acc * m[ui]);
                if w == T::zero() {
                    continue;
                }
                let row = self.cpt_row(x, &u, &c, &mut buf);
                for (o, &p) in out.iter_mut().zip(row) {
                    *o = *o + p * w;
                }
            }
        }
        self.store(key, &out);
        Ok(out)
    }

    /// Diagnostic support, summing over the diagnostic cutset.
    fn lambda(&mut self, x: VarId, context: &Instantiation) -> Result<Vec<T>> {
        let key = MessageKey {
            kind: MessageKind::LambdaSupport,
            from: x,
            to: x,
            context: context.restrict(self.analysis.relevant.lambda_support(x)),
        };
        if let Some(v) = self.lookup(&key)? {
            return Ok(v);
        }
        let diagnostic = self.analysis.local.diagnostic(x).to_vec();
        let children = self.analysis.structure.children(x).to_vec();
        let card = self.net.cardinality(x);
        let mut out = vec![T::zero(); card];
        for c in self.expand(&key.context, &diagnostic) {
            let mut term: Vec<T> = (0..card).map(|v| self.indicator(x, v, &c)).collect();
            for &y in &children {
                let m = self.lambda_msg(y, x, &c)?;
                for (t, mv) in term.iter_mut().zip(m) {
                    *t = *t * mv;
                }
            }
            for (o, t) in out.iter_mut().zip(term) {
                *o = *o + t;
            }
        }
        self.store(key, &out);
        Ok(out)
    }

    /// Message from `x` to child `y`: sums over the belief cutset, then the
    /// diagnostic cutset.
    fn pi_msg(&mut self, x: VarId, y: VarId, context: &Instantiation) -> Result<Vec<T>> {
        let key = MessageKey {
            kind: MessageKind::PiMessage,
            from: x,
            to: y,
            context: context.restrict(self.analysis.relevant.pi_message(x, y)),
        };
        if let Some(v) = self.lookup(&key)? {
            return Ok(v);
        }
        let belief = self.analysis.local.belief(x).to_vec();
        let diagnostic = self.analysis.local.diagnostic(x).to_vec();
        let children = self.analysis.structure.children(x).to_vec();
        let card = self.net.cardinality(x);
        let mut out = vec![T::zero(); card];
        for c1 in self.expand(&key.context, &belief) {
            let pi = self.pi(x, &c1)?;
            let mut inner = vec![T::zero(); card];
            for c2 in self.expand(&c1, &diagnostic) {
                let mut term: Vec<T> = (0..card).map(|v| self.indicator(x, v, &c2)).collect();
                for &k in children.iter().filter(|&&k| k != y) {
                    let m = self.lambda_msg(k, x, &c2)?;
                    for (t, mv) in term.iter_mut().zip(m) {
                        *t = *t * mv;
                    }
                }
                for (i, t) in inner.iter_mut().zip(term) {
                    *i = *i + t;
                }
            }
            for ((o, p), i) in out.iter_mut().zip(pi).zip(inner) {
                *o = *o + p * i;
            }
        }
        self.store(key, &out);
        Ok(out)
    }

    /// Message from `x` to parent `u`: sums over the belief cutset, then the
    /// causal cutset.
    fn lambda_msg(&mut self, x: VarId, u: VarId, context: &Instantiation) -> Result<Vec<T>> {
        let key = MessageKey {
            kind: MessageKind::LambdaMessage,
            from: x,
            to: u,
            context: context.restrict(self.analysis.relevant.lambda_message(u, x)),
        };
        if let Some(v) = self.lookup(&key)? {
            return Ok(v);
        }
        let belief = self.analysis.local.belief(x).to_vec();
        let causal = self.analysis.local.causal(x).to_vec();
        let parents = self.analysis.structure.parents(x).to_vec();
        let i = parents.iter().position(|&p| p == u).expect("u is a retained parent");
        let mut out = vec![T::zero(); self.net.cardinality(u)];
        let mut buf = Vec::new();
        for c1 in self.expand(&key.context, &belief) {
            let lambda = self.lambda(x, &c1)?;
            for c2 in self.expand(&c1, &causal) {
                let messages = parents
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| {
                        if k == i {
                            Ok(None)
                        } else {
                            self.pi_msg(p, x, &c2).map(Some)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                let choices = parents
                    .iter()
                    .enumerate()
                    .map(|(k, &p)| {
                        if k == i {
                            (0..self.net.cardinality(p)).collect()
                        } else {
                            self.findings.allowed_values(p)
                        }
                    })
                    .collect();
                for vals in Assignments::new(choices) {
                    let w = vals.iter().zip(&messages).fold(T::one(), |acc, (&v, m)| match m {
                        Some(m) => acc * m[v],
                        None => acc,
                    });
                    if w == T::zero() {
                        continue;
                    }
                    let row = self.cpt_row(x, &vals, &c2, &mut buf);
                    let s: T = row.iter().zip(&lambda).map(|(&p, &l)| p * l).sum();
                    out[vals[i]] = out[vals[i]] + s * w;
                }
            }
        }
        self.store(key, &out);
        Ok(out)
    }
}

/// `Pr(x ∧ e)` by dynamic conditioning over the heuristic loop cutset.
pub fn dc_belief<T: Prob>(
    net: &Network<T>,
    target: VarId,
    evidence: &Instantiation,
) -> Result<(SupportVector<T>, EngineStats)> {
    let findings = Findings::from_evidence(net, evidence)?;
    let mut engine = DynamicEngine::new(net, findings);
    let bel = engine.belief(target)?;
    Ok((bel, engine.stats().clone()))
}

/// Beliefs for every variable through one shared cache.
pub fn dc_belief_all<T: Prob>(
    net: &Network<T>,
    evidence: &Instantiation,
) -> Result<(Vec<SupportVector<T>>, EngineStats)> {
    let findings = Findings::from_evidence(net, evidence)?;
    let mut engine = DynamicEngine::new(net, findings);
    let all = engine.belief_all()?;
    Ok((all, engine.stats().clone()))
}
