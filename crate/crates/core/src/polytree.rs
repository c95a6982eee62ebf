//! Pearl's polytree algorithm on singly connected (possibly conditioned)
//! networks.
//!
//! Evaluation is demand driven: asking for a belief recursively requests
//! exactly the supports and messages it depends on, memoizing each. Beliefs
//! are unnormalized, `BEL(x) = Pr(x ∧ e)`. Evidence enters as an indicator
//! on the diagnostic side of the observed variable.

use std::collections::HashMap;

use crate::cutset::ConditionedNetwork;
use crate::error::{Error, Result};
use crate::model::{Assignments, SupportVector, VarId};
use crate::scalar::Prob;

/// Memoized supports and messages for one query context.
#[derive(Debug)]
pub struct PolytreeState<'a, T: Prob = f64> {
    net: &'a ConditionedNetwork<T>,
    pi: Vec<Option<Vec<T>>>,
    lambda: Vec<Option<Vec<T>>>,
    /// `(x, y)` → π message from `x` to its child `y`.
    pi_msg: HashMap<(VarId, VarId), Vec<T>>,
    /// `(x, u)` → λ message from `x` to its parent `u`.
    lambda_msg: HashMap<(VarId, VarId), Vec<T>>,
}

impl<'a, T: Prob> PolytreeState<'a, T> {
    pub fn new(net: &'a ConditionedNetwork<T>) -> Result<Self> {
        if !net.is_singly_connected() {
            return Err(Error::Structural(
                "polytree algorithm needs a singly connected network".into(),
            ));
        }
        let n = net.len();
        Ok(PolytreeState {
            net,
            pi: vec![None; n],
            lambda: vec![None; n],
            pi_msg: HashMap::new(),
            lambda_msg: HashMap::new(),
        })
    }

    /// π(x) = Σ_u Pr(x | u) Π_i π_X(u_i).
    pub fn compute_pi(&mut self, x: VarId) -> Result<SupportVector<T>> {
        Ok(SupportVector::new(x, self.pi(x)))
    }

    /// λ(x) = indicator(x) · Π_j λ_{Y_j}(x).
    pub fn compute_lambda(&mut self, x: VarId) -> Result<SupportVector<T>> {
        Ok(SupportVector::new(x, self.lambda(x)))
    }

    /// π_Y(x) = π(x) · indicator(x) · Π_{k≠Y} λ_{Y_k}(x).
    pub fn pi_message(&mut self, x: VarId, child: VarId) -> Result<SupportVector<T>> {
        if !self.net.children(x).contains(&child) {
            return Err(Error::NotAChild { parent: x, child });
        }
        Ok(SupportVector::new(x, self.pi_msg(x, child)))
    }

    /// λ_X(u) = Σ_x λ(x) Σ_{u_k, k≠i} Pr(x | u) Π_{k≠i} π_X(u_k).
    pub fn lambda_message(&mut self, x: VarId, parent: VarId) -> Result<SupportVector<T>> {
        if !self.net.parents(x).contains(&parent) {
            return Err(Error::NotAParent { parent, child: x });
        }
        Ok(SupportVector::new(parent, self.lambda_msg(x, parent)))
    }

    /// BEL(x) = π(x) λ(x), times the evidence mass of any other connected
    /// components.
    pub fn belief(&mut self, x: VarId) -> Result<SupportVector<T>> {
        let mut bel = self.local_belief(x);
        let reps = self.net.structure().other_component_representatives(x);
        for r in reps {
            let mass: T = self.local_belief(r).into_iter().sum();
            for b in &mut bel {
                *b = *b * mass;
            }
        }
        Ok(SupportVector::new(x, bel))
    }

    /// Pr(e), read off any variable.
    pub fn evidence_probability(&mut self) -> Result<T> {
        if self.net.is_empty() {
            return Ok(T::one());
        }
        Ok(self.belief(0)?.total())
    }

    fn local_belief(&mut self, x: VarId) -> Vec<T> {
        let pi = self.pi(x);
        let lambda = self.lambda(x);
        pi.iter().zip(&lambda).map(|(&p, &l)| p * l).collect()
    }

    fn pi(&mut self, x: VarId) -> Vec<T> {
        if let Some(v) = &self.pi[x] {
            return v.clone();
        }
        let net = self.net;
        let parents = net.parents(x);
        let messages: Vec<Vec<T>> = parents.iter().map(|&u| self.pi_msg(u, x)).collect();
        let cpt = net.cpt(x);
        let card = net.cardinality(x);
        let mut out = vec![T::zero(); card];
        let choices = parents.iter().map(|&u| net.findings().allowed_values(u)).collect();
        for u in Assignments::new(choices) {
            let w = u.iter().zip(&messages).fold(T::one(), |acc, (&ui, m)| acc * m[ui]);
            if w == T::zero() {
                continue;
            }
            let row = cpt.row(cpt.row_index(&u));
            for (o, &p) in out.iter_mut().zip(row) {
                *o = *o + p * w;
            }
        }
        self.pi[x] = Some(out.clone());
        out
    }

    fn lambda(&mut self, x: VarId) -> Vec<T> {
        if let Some(v) = &self.lambda[x] {
            return v.clone();
        }
        let net = self.net;
        let mut out: Vec<T> = (0..net.cardinality(x))
            .map(|v| net.findings().indicator(x, v))
            .collect();
        for &y in net.children(x) {
            let m = self.lambda_msg(y, x);
            for (o, mv) in out.iter_mut().zip(m) {
                *o = *o * mv;
            }
        }
        self.lambda[x] = Some(out.clone());
        out
    }

    fn pi_msg(&mut self, x: VarId, child: VarId) -> Vec<T> {
        if let Some(v) = self.pi_msg.get(&(x, child)) {
            return v.clone();
        }
        let net = self.net;
        let mut out = self.pi(x);
        for (xv, o) in out.iter_mut().enumerate() {
            *o = *o * net.findings().indicator(x, xv);
        }
        for &y in net.children(x) {
            if y == child {
                continue;
            }
            let m = self.lambda_msg(y, x);
            for (o, mv) in out.iter_mut().zip(m) {
                *o = *o * mv;
            }
        }
        self.pi_msg.insert((x, child), out.clone());
        out
    }

    fn lambda_msg(&mut self, x: VarId, parent: VarId) -> Vec<T> {
        if let Some(v) = self.lambda_msg.get(&(x, parent)) {
            return v.clone();
        }
        let net = self.net;
        let lambda = self.lambda(x);
        let parents = net.parents(x);
        let i = parents.iter().position(|&u| u == parent).expect("parent of x");
        let messages: Vec<Option<Vec<T>>> = parents
            .iter()
            .enumerate()
            .map(|(k, &u)| (k != i).then(|| self.pi_msg(u, x)))
            .collect();
        let cpt = net.cpt(x);
        let mut out = vec![T::zero(); net.cardinality(parent)];
        let choices = parents
            .iter()
            .enumerate()
            .map(|(k, &u)| {
                if k == i {
                    (0..net.cardinality(u)).collect()
                } else {
                    net.findings().allowed_values(u)
                }
            })
            .collect();
        for u in Assignments::new(choices) {
            let w = u.iter().zip(&messages).fold(T::one(), |acc, (&uk, m)| match m {
                Some(m) => acc * m[uk],
                None => acc,
            });
            if w == T::zero() {
                continue;
            }
            let row = cpt.row(cpt.row_index(&u));
            let s: T = row.iter().zip(&lambda).map(|(&p, &l)| p * l).sum();
            out[u[i]] = out[u[i]] + s * w;
        }
        self.lambda_msg.insert((x, parent), out.clone());
        out
    }
}
