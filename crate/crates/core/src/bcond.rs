//! B-conditioning: bounds on `Pr(x ∧ e)` from an ε-abstraction of the
//! network.
//!
//! Cpt entries with probability at most ε are read as impossible events.
//! A forward zero-rank pass collects the variable values that become
//! impossible under that reading; the conjunction `a` of their complements
//! is the assumption. Inference restricted to worlds satisfying `a` gives
//! `Pr(x ∧ e ∧ a)`, a lower bound, and the mass it misses bounds the error:
//!
//! `Pr(x ∧ e ∧ a) <= Pr(x ∧ e) <= Pr(x ∧ e ∧ a) + 1 - Σ_y Pr(y ∧ e ∧ a)`.
//!
//! The bounds hold for any assumption set; the propagation only decides how
//! tight they are.

use std::fmt;

use crate::dynamic::DynamicEngine;
use crate::error::{Error, Result};
use crate::model::format::format_decimal;
use crate::model::oracle::oracle_marginals;
use crate::model::{Assignments, Findings, Instantiation, Network, SupportVector, VarId};
use crate::scalar::Prob;

/// One cpt entry read as impossible.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpossibleEntry<T: Prob = f64> {
    pub child: VarId,
    pub parent_values: Vec<usize>,
    pub value: usize,
    pub probability: T,
}

/// The entries with `p <= epsilon`, kept per cpt as a mask over the table.
#[derive(Clone, Debug, PartialEq)]
pub struct Abstraction<T: Prob = f64> {
    epsilon: T,
    masks: Vec<Vec<bool>>,
    entries: Vec<ImpossibleEntry<T>>,
}

impl<T: Prob> Abstraction<T> {
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn entries(&self) -> &[ImpossibleEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Whether entry `(child, row, value)` was abstracted away.
    pub fn is_impossible(&self, child: VarId, row: usize, value: usize, cardinality: usize) -> bool {
        self.masks[child][row * cardinality + value]
    }
}

/// Collects the entries with `p <= epsilon`. `epsilon = 0` keeps only
/// exact zeros.
pub fn abstract_network<T: Prob>(net: &Network<T>, epsilon: T) -> Result<Abstraction<T>> {
    let e = epsilon.as_f64();
    if !(0.0..1.0).contains(&e) {
        return Err(Error::InvalidEpsilon(e));
    }
    let mut masks = Vec::with_capacity(net.len());
    let mut entries = Vec::new();
    for cpt in net.cpts() {
        let card = cpt.cardinality();
        let mask: Vec<bool> = cpt.table().iter().map(|&p| p <= epsilon).collect();
        for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            entries.push(ImpossibleEntry {
                child: cpt.child(),
                parent_values: cpt.row_values(i / card),
                value: i % card,
                probability: cpt.table()[i],
            });
        }
        masks.push(mask);
    }
    Ok(Abstraction {
        epsilon,
        masks,
        entries,
    })
}

/// Values declared impossible, per variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AssumptionSet {
    impossible: Vec<Vec<bool>>,
}

impl AssumptionSet {
    /// Assumes nothing.
    pub fn empty<T: Prob>(net: &Network<T>) -> Self {
        AssumptionSet {
            impossible: net.variables().iter().map(|v| vec![false; v.cardinality()]).collect(),
        }
    }

    /// Declares `v = x` impossible. Refuses to strike out the last
    /// remaining value of a variable.
    pub fn assume_not(&mut self, v: VarId, x: usize) -> Result<()> {
        let row = &mut self.impossible[v];
        if row.iter().enumerate().all(|(i, &imp)| imp || i == x) {
            return Err(Error::AbstractionInconsistent(format!(
                "variable {v} would have no possible value"
            )));
        }
        row[x] = true;
        Ok(())
    }

    pub fn is_impossible(&self, v: VarId, x: usize) -> bool {
        self.impossible[v][x]
    }

    /// Number of `(variable, value)` pairs assumed impossible.
    pub fn count(&self) -> usize {
        self.impossible.iter().flatten().filter(|&&i| i).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn pairs(&self) -> Vec<(VarId, usize)> {
        self.impossible
            .iter()
            .enumerate()
            .flat_map(|(v, row)| row.iter().enumerate().filter(|(_, &i)| i).map(move |(x, _)| (v, x)))
            .collect()
    }

    pub fn is_subset(&self, other: &AssumptionSet) -> bool {
        self.pairs().iter().all(|&(v, x)| other.is_impossible(v, x))
    }

    /// The assumption as findings: every assumed-impossible value masked.
    pub fn to_findings<T: Prob>(&self, net: &Network<T>) -> Findings {
        let mut f = Findings::none(net);
        for (v, x) in self.pairs() {
            f.forbid(v, x);
        }
        f
    }
}

/// Evidence on non-root variables does not enter the propagation; the
/// bounds stay valid but may be loose.
fn non_root_evidence<T: Prob>(net: &Network<T>, evidence: &Instantiation) -> Vec<VarId> {
    evidence.vars().filter(|&v| !net.parents(v).is_empty()).collect()
}

/// Forward pass in topological order. A value is possible iff some
/// instantiation of possible parent values gives it a non-abstracted
/// entry. Observed roots keep exactly their observed value.
pub fn zero_rank_propagation<T: Prob>(
    abst: &Abstraction<T>,
    net: &Network<T>,
    root_evidence: &Instantiation,
) -> Result<AssumptionSet> {
    net.check_instantiation(root_evidence)?;
    let mut possible: Vec<Vec<bool>> = net.variables().iter().map(|v| vec![false; v.cardinality()]).collect();
    for v in net.topological_order() {
        let cpt = net.cpt(v);
        let card = cpt.cardinality();
        if cpt.parents().is_empty() {
            if let Some(x) = root_evidence.get(v) {
                possible[v][x] = true;
                continue;
            }
        }
        let choices = cpt
            .parents()
            .iter()
            .map(|&p| (0..net.cardinality(p)).filter(|&x| possible[p][x]).collect())
            .collect();
        for u in Assignments::new(choices) {
            let row = cpt.row_index(&u);
            for (x, p) in possible[v].iter_mut().enumerate() {
                *p |= !abst.is_impossible(v, row, x, card);
            }
        }
        if !possible[v].iter().any(|&p| p) {
            return Err(Error::AbstractionInconsistent(format!(
                "every value of `{}` is impossible at epsilon {}",
                net.name(v),
                abst.epsilon()
            )));
        }
    }
    Ok(AssumptionSet {
        impossible: possible
            .into_iter()
            .map(|row| row.into_iter().map(|p| !p).collect())
            .collect(),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Dynamic,
    Oracle,
}

/// `Pr(x ∧ e ∧ a)` for every value of `target`, plus the number of
/// messages the engine computed (zero for the oracle).
pub fn pruned_belief<T: Prob>(
    net: &Network<T>,
    target: VarId,
    evidence: &Instantiation,
    assumptions: &AssumptionSet,
    method: Method,
) -> Result<(SupportVector<T>, usize)> {
    let findings = Findings::from_evidence(net, evidence)?.intersect(&assumptions.to_findings(net));
    match method {
        Method::Dynamic => {
            let mut engine = DynamicEngine::new(net, findings);
            let bel = engine.belief(target)?;
            Ok((bel, engine.stats().messages_computed))
        }
        Method::Oracle => {
            let all = oracle_marginals(net, &findings)?;
            Ok((all.into_iter().nth(target).expect("target in range"), 0))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bounds<T: Prob = f64> {
    pub var: VarId,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    /// `1 - Σ lower`: mass outside the assumption (and the evidence).
    pub lost_mass: T,
}

impl<T: Prob> Bounds<T> {
    pub fn from_lower(lower: SupportVector<T>) -> Self {
        let lost_mass = T::one() - lower.total();
        let upper = lower.values.iter().map(|&l| l + lost_mass).collect();
        Bounds {
            var: lower.var,
            lower: lower.values,
            upper,
            lost_mass,
        }
    }

    pub fn contains(&self, x: usize, p: T, tol: T) -> bool {
        self.lower[x] - tol <= p && p <= self.upper[x] + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundedBelief<T: Prob = f64> {
    pub bounds: Bounds<T>,
    pub assumptions: AssumptionSet,
    pub messages: usize,
    pub warnings: Vec<String>,
}

/// Abstraction, propagation and pruned inference in one call.
pub fn bounded_belief<T: Prob>(
    net: &Network<T>,
    target: VarId,
    evidence: &Instantiation,
    epsilon: T,
    method: Method,
) -> Result<BoundedBelief<T>> {
    let abst = abstract_network(net, epsilon)?;
    let non_root = non_root_evidence(net, evidence);
    let roots = evidence.restrict(
        &net.variables()
            .iter()
            .map(|v| v.id)
            .filter(|v| !non_root.contains(v))
            .collect::<Vec<_>>(),
    );
    let assumptions = zero_rank_propagation(&abst, net, &roots)?;
    let (lower, messages) = pruned_belief(net, target, evidence, &assumptions, method)?;
    let warnings = non_root
        .iter()
        .map(|&v| {
            format!(
                "evidence on non-root `{}` is ignored by the propagation; bounds may be loose",
                net.name(v)
            )
        })
        .collect();
    Ok(BoundedBelief {
        bounds: Bounds::from_lower(lower),
        assumptions,
        messages,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T: Prob = f64> {
    pub epsilon: T,
    pub bounds: Bounds<T>,
    pub assumptions: usize,
    pub messages: usize,
}

/// One bounded belief per ε, largest ε first.
pub fn epsilon_sweep<T: Prob>(
    net: &Network<T>,
    target: VarId,
    evidence: &Instantiation,
    epsilons: &[T],
    method: Method,
) -> Result<Vec<SweepRow<T>>> {
    if let Some(w) = epsilons.windows(2).find(|w| w[1] > w[0]) {
        return Err(Error::InvalidEpsilon(w[1].as_f64()));
    }
    epsilons
        .iter()
        .map(|&epsilon| {
            let b = bounded_belief(net, target, evidence, epsilon, method)?;
            Ok(SweepRow {
                epsilon,
                assumptions: b.assumptions.count(),
                bounds: b.bounds,
                messages: b.messages,
            })
        })
        .collect()
}

/// Column layout of a sweep table: epsilon, assumption count, lower and
/// upper per value, lost mass, messages.
pub struct SweepTable<'a, T: Prob> {
    pub net: &'a Network<T>,
    pub rows: &'a [SweepRow<T>],
}

impl<T: Prob> SweepTable<'_, T> {
    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["epsilon".to_string(), "assumptions".to_string()];
        if let Some(row) = self.rows.first() {
            let var = self.net.variable(row.bounds.var);
            for v in &var.value_names {
                cols.push(format!("lower({v})"));
                cols.push(format!("upper({v})"));
            }
        }
        cols.push("lost_mass".into());
        cols.push("messages".into());
        cols
    }
}

impl<T: Prob> fmt::Display for SweepTable<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.header().join("\t"))?;
        for row in self.rows {
            write!(f, "{}\t{}", row.epsilon, row.assumptions)?;
            for (l, u) in row.bounds.lower.iter().zip(&row.bounds.upper) {
                write!(f, "\t{}\t{}", format_decimal(l.as_f64()), format_decimal(u.as_f64()))?;
            }
            writeln!(
                f,
                "\t{}\t{}",
                format_decimal(row.bounds.lost_mass.as_f64()),
                row.messages
            )?;
        }
        Ok(())
    }
}
