use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::{graph, Instantiation};

/// Dense variable index, `0..n`.
pub type VarId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub id: VarId,
    pub name: String,
    pub value_names: Vec<String>,
}

impl Variable {
    pub fn cardinality(&self) -> usize {
        self.value_names.len()
    }

    pub fn value_index(&self, name: &str) -> Option<usize> {
        self.value_names.iter().position(|v| v == name)
    }
}

/// Conditional probability table. Rows are parent instantiations with the
/// last listed parent varying fastest; columns are child values.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt<T: Prob = f64> {
    child: VarId,
    parents: Vec<VarId>,
    parent_cards: Vec<usize>,
    cardinality: usize,
    table: Vec<T>,
}

impl<T: Prob> Cpt<T> {
    pub fn child(&self) -> VarId {
        self.child
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn parent_cards(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn row_count(&self) -> usize {
        self.parent_cards.iter().product()
    }

    pub fn table(&self) -> &[T] {
        &self.table
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.table[row * self.cardinality..(row + 1) * self.cardinality]
    }

    /// Row index of a parent instantiation given in `parents()` order.
    pub fn row_index(&self, parent_values: &[usize]) -> usize {
        debug_assert_eq!(parent_values.len(), self.parents.len());
        parent_values
            .iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (&u, &card)| acc * card + u)
    }

    /// Inverse of [`Cpt::row_index`].
    pub fn row_values(&self, mut row: usize) -> Vec<usize> {
        let mut values = vec![0; self.parents.len()];
        for (slot, &card) in values.iter_mut().zip(&self.parent_cards).rev() {
            *slot = row % card;
            row /= card;
        }
        values
    }

    pub fn prob(&self, parent_values: &[usize], x: usize) -> T {
        self.table[self.row_index(parent_values) * self.cardinality + x]
    }

    /// Fixes some parents to the values in `fixed` and drops them from the
    /// table, keeping only the consistent rows.
    pub fn reduce(&self, fixed: &Instantiation) -> Cpt<T> {
        let keep: Vec<usize> = (0..self.parents.len())
            .filter(|&i| !fixed.contains(self.parents[i]))
            .collect();
        if keep.len() == self.parents.len() {
            return self.clone();
        }
        let parents: Vec<VarId> = keep.iter().map(|&i| self.parents[i]).collect();
        let parent_cards: Vec<usize> = keep.iter().map(|&i| self.parent_cards[i]).collect();
        let rows: usize = parent_cards.iter().product();
        let mut full = vec![0; self.parents.len()];
        for (i, &p) in self.parents.iter().enumerate() {
            if let Some(x) = fixed.get(p) {
                full[i] = x;
            }
        }
        let mut table = Vec::with_capacity(rows * self.cardinality);
        for reduced in super::Assignments::full(&parent_cards) {
            for (&i, &u) in keep.iter().zip(&reduced) {
                full[i] = u;
            }
            table.extend_from_slice(self.row(self.row_index(&full)));
        }
        Cpt {
            child: self.child,
            parents,
            parent_cards,
            cardinality: self.cardinality,
            table,
        }
    }
}

/// An immutable discrete Bayesian network.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T: Prob = f64> {
    variables: Vec<Variable>,
    cpts: Vec<Cpt<T>>,
    children: Vec<Vec<VarId>>,
    by_name: HashMap<String, VarId>,
}

impl<T: Prob> Network<T> {
    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: VarId) -> &Variable {
        &self.variables[v]
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.variables[v].name
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn cardinality(&self, v: VarId) -> usize {
        self.variables[v].cardinality()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    pub fn cpt(&self, v: VarId) -> &Cpt<T> {
        &self.cpts[v]
    }

    pub fn cpts(&self) -> &[Cpt<T>] {
        &self.cpts
    }

    pub fn parents(&self, v: VarId) -> &[VarId] {
        &self.cpts[v].parents
    }

    pub fn children(&self, v: VarId) -> &[VarId] {
        &self.children[v]
    }

    /// Directed edges `(parent, child)`, ordered by child then parent position.
    pub fn edges(&self) -> Vec<(VarId, VarId)> {
        self.cpts
            .iter()
            .flat_map(|c| c.parents.iter().map(move |&p| (p, c.child)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.cpts.iter().map(|c| c.parents.len()).sum()
    }

    /// Number of joint states, saturating at `u128::MAX`.
    pub fn state_count(&self) -> u128 {
        self.variables
            .iter()
            .try_fold(1u128, |acc, v| acc.checked_mul(v.cardinality() as u128))
            .unwrap_or(u128::MAX)
    }

    /// Parents precede children; ties broken by lowest id.
    pub fn topological_order(&self) -> Vec<VarId> {
        graph::topological_order(self.len(), &self.edges()).expect("network is acyclic")
    }

    /// True iff the underlying undirected graph has no cycle.
    pub fn is_singly_connected(&self) -> bool {
        graph::is_forest(self.len(), &self.edges())
    }

    /// Parses `name=value` style evidence into an instantiation.
    pub fn instantiation(&self, pairs: &[(&str, &str)]) -> Result<Instantiation> {
        let mut inst = Instantiation::new();
        for &(var, value) in pairs {
            let v = self.var_id(var)?;
            let x = self.variables[v]
                .value_index(value)
                .ok_or_else(|| Error::UnknownValue {
                    variable: var.to_string(),
                    value: value.to_string(),
                })?;
            inst.insert(v, x);
        }
        Ok(inst)
    }

    pub fn check_instantiation(&self, inst: &Instantiation) -> Result<()> {
        for (v, x) in inst.iter() {
            if v >= self.len() {
                return Err(Error::InvalidInstantiation(format!("variable {v} out of range")));
            }
            if x >= self.cardinality(v) {
                return Err(Error::InvalidInstantiation(format!(
                    "value {x} out of range for `{}`",
                    self.name(v)
                )));
            }
        }
        Ok(())
    }

    /// Chain-rule product of CPT entries for a full instantiation.
    pub fn joint_probability(&self, full: &Instantiation) -> Result<T> {
        self.check_instantiation(full)?;
        if full.len() != self.len() {
            return Err(Error::InvalidInstantiation(format!(
                "joint probability needs all {} variables, got {}",
                self.len(),
                full.len()
            )));
        }
        let values: Vec<usize> = full.iter().map(|(_, x)| x).collect();
        Ok(self.joint_of_values(&values))
    }

    pub(crate) fn joint_of_values(&self, values: &[usize]) -> T {
        let mut p = T::one();
        let mut buf = Vec::new();
        for cpt in &self.cpts {
            buf.clear();
            buf.extend(cpt.parents.iter().map(|&u| values[u]));
            p = p * cpt.prob(&buf, values[cpt.child]);
        }
        p
    }

    /// Same network with one CPT replaced; the replacement must keep the
    /// parent set acyclic.
    pub fn with_cpt_table(&self, child: VarId, table: Vec<T>) -> Result<Network<T>> {
        let mut builder = NetworkBuilder::from_network(self);
        builder.set_cpt(child, self.parents(child).to_vec(), table);
        builder.build()
    }

    /// Same structure, parameters converted to another scalar type.
    pub fn convert<U: Prob>(&self) -> Result<Network<U>> {
        let mut builder = NetworkBuilder::<U>::new();
        for v in &self.variables {
            builder.add_variable(&v.name, v.value_names.clone());
        }
        for c in &self.cpts {
            builder.set_cpt(
                c.child,
                c.parents.clone(),
                c.table.iter().map(|p| U::lit(p.as_f64())).collect(),
            );
        }
        builder.build()
    }
}

/// Incremental constructor; all validation happens in [`NetworkBuilder::build`].
#[derive(Clone, Debug)]
pub struct NetworkBuilder<T: Prob = f64> {
    variables: Vec<Variable>,
    cpts: Vec<Option<(Vec<VarId>, Vec<T>)>>,
}

impl<T: Prob> Default for NetworkBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Prob> NetworkBuilder<T> {
    pub fn new() -> Self {
        NetworkBuilder {
            variables: Vec::new(),
            cpts: Vec::new(),
        }
    }

    pub fn from_network(net: &Network<T>) -> Self {
        NetworkBuilder {
            variables: net.variables.clone(),
            cpts: net
                .cpts
                .iter()
                .map(|c| Some((c.parents.clone(), c.table.clone())))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn find(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn cardinality(&self, v: VarId) -> usize {
        self.variables[v].cardinality()
    }

    pub fn add_variable<S: Into<String>>(&mut self, name: S, value_names: Vec<String>) -> VarId {
        let id = self.variables.len();
        self.variables.push(Variable {
            id,
            name: name.into(),
            value_names,
        });
        self.cpts.push(None);
        id
    }

    /// Adds a variable with values named `0..cardinality`.
    pub fn add_indexed_variable<S: Into<String>>(&mut self, name: S, cardinality: usize) -> VarId {
        self.add_variable(name, (0..cardinality).map(|i| i.to_string()).collect())
    }

    pub fn has_cpt(&self, child: VarId) -> bool {
        self.cpts[child].is_some()
    }

    pub fn set_cpt(&mut self, child: VarId, parents: Vec<VarId>, table: Vec<T>) {
        self.cpts[child] = Some((parents, table));
    }

    pub fn build(self) -> Result<Network<T>> {
        let n = self.variables.len();
        let mut by_name = HashMap::with_capacity(n);
        for v in &self.variables {
            if v.cardinality() < 2 {
                return Err(Error::InvalidNetwork(format!(
                    "variable `{}` needs at least 2 values",
                    v.name
                )));
            }
            if by_name.insert(v.name.clone(), v.id).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate variable `{}`", v.name)));
            }
            for (i, a) in v.value_names.iter().enumerate() {
                if v.value_names[..i].contains(a) {
                    return Err(Error::InvalidNetwork(format!(
                        "duplicate value `{a}` in variable `{}`",
                        v.name
                    )));
                }
            }
        }
        let tol = T::tolerance();
        let mut cpts = Vec::with_capacity(n);
        let mut children = vec![Vec::new(); n];
        for (child, entry) in self.cpts.into_iter().enumerate() {
            let name = &self.variables[child].name;
            let (parents, table) =
                entry.ok_or_else(|| Error::InvalidNetwork(format!("variable `{name}` has no cpt")))?;
            for (i, &p) in parents.iter().enumerate() {
                if p >= n {
                    return Err(Error::InvalidNetwork(format!("parent id {p} out of range")));
                }
                if p == child || parents[..i].contains(&p) {
                    return Err(Error::InvalidNetwork(format!(
                        "cpt of `{name}` has a repeated or self parent"
                    )));
                }
                children[p].push(child);
            }
            let parent_cards: Vec<usize> = parents.iter().map(|&p| self.variables[p].cardinality()).collect();
            let cardinality = self.variables[child].cardinality();
            let rows: usize = parent_cards.iter().product();
            if table.len() != rows * cardinality {
                return Err(Error::InvalidNetwork(format!(
                    "cpt of `{name}` has {} entries, expected {}",
                    table.len(),
                    rows * cardinality
                )));
            }
            for (row, chunk) in table.chunks(cardinality).enumerate() {
                for &p in chunk {
                    if !(p >= T::zero() && p <= T::one()) {
                        return Err(Error::EntryRange {
                            child: name.clone(),
                            value: p.as_f64(),
                        });
                    }
                }
                let sum: T = chunk.iter().copied().sum();
                if (sum - T::one()).abs() > tol {
                    return Err(Error::RowSum {
                        child: name.clone(),
                        row,
                        sum: sum.as_f64(),
                    });
                }
            }
            cpts.push(Cpt {
                child,
                parents,
                parent_cards,
                cardinality,
                table,
            });
        }
        for list in &mut children {
            list.sort_unstable();
        }
        let edges: Vec<(VarId, VarId)> = cpts
            .iter()
            .flat_map(|c| c.parents.iter().map(move |&p| (p, c.child)))
            .collect();
        if let Err(v) = graph::topological_order(n, &edges) {
            return Err(Error::Cycle(self.variables[v].name.clone()));
        }
        Ok(Network {
            variables: self.variables,
            cpts,
            children,
            by_name,
        })
    }
}
