use std::ops::Index;

use crate::scalar::Prob;

use super::VarId;

/// Per-value nonnegative support for one variable (π, λ, a message, or BEL).
#[derive(Clone, Debug, PartialEq)]
pub struct SupportVector<T: Prob = f64> {
    pub var: VarId,
    pub values: Vec<T>,
}

impl<T: Prob> SupportVector<T> {
    pub fn new(var: VarId, values: Vec<T>) -> Self {
        SupportVector { var, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }

    /// Divides by the total; a zero vector stays zero.
    pub fn normalized(&self) -> SupportVector<T> {
        let z = self.total();
        let values = if z > T::zero() {
            self.values.iter().map(|&v| v / z).collect()
        } else {
            self.values.clone()
        };
        SupportVector::new(self.var, values)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SupportVector<T>) -> T {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T: Prob> Index<usize> for SupportVector<T> {
    type Output = T;

    fn index(&self, x: usize) -> &T {
        &self.values[x]
    }
}
