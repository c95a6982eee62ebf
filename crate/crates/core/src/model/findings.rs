use crate::error::Result;
use crate::scalar::Prob;

use super::{Instantiation, Network, VarId};

/// Per-variable mask of values still allowed.
///
/// Observations restrict a variable to one value; assumptions ("findings")
/// strike out individual values. Engines treat the mask as an indicator
/// factor on the diagnostic side of each variable and skip disallowed
/// values whenever they sum over states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Findings {
    allowed: Vec<Vec<bool>>,
}

impl Findings {
    pub fn none<T: Prob>(net: &Network<T>) -> Self {
        Findings {
            allowed: net.variables().iter().map(|v| vec![true; v.cardinality()]).collect(),
        }
    }

    pub fn from_evidence<T: Prob>(net: &Network<T>, evidence: &Instantiation) -> Result<Self> {
        net.check_instantiation(evidence)?;
        let mut f = Self::none(net);
        for (v, x) in evidence.iter() {
            f.observe(v, x);
        }
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    pub fn allows(&self, v: VarId, x: usize) -> bool {
        self.allowed[v][x]
    }

    pub fn mask(&self, v: VarId) -> &[bool] {
        &self.allowed[v]
    }

    pub fn allowed_values(&self, v: VarId) -> Vec<usize> {
        (0..self.allowed[v].len()).filter(|&x| self.allowed[v][x]).collect()
    }

    /// True when no value of `v` is struck out.
    pub fn is_vacuous(&self, v: VarId) -> bool {
        self.allowed[v].iter().all(|&a| a)
    }

    /// Keeps only `x` (intersected with what was already allowed).
    pub fn observe(&mut self, v: VarId, x: usize) {
        for (i, a) in self.allowed[v].iter_mut().enumerate() {
            *a = *a && i == x;
        }
    }

    pub fn forbid(&mut self, v: VarId, x: usize) {
        self.allowed[v][x] = false;
    }

    pub fn intersect(&self, other: &Findings) -> Findings {
        Findings {
            allowed: self
                .allowed
                .iter()
                .zip(&other.allowed)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x && y).collect())
                .collect(),
        }
    }

    /// Indicator value for `v = x`.
    pub fn indicator<T: Prob>(&self, v: VarId, x: usize) -> T {
        if self.allowed[v][x] {
            T::one()
        } else {
            T::zero()
        }
    }
}
