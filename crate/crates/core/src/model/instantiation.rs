use std::fmt;

use super::VarId;

/// A partial assignment of variables to value indices, kept sorted by
/// variable id so equal instantiations compare and hash identically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instantiation {
    entries: Vec<(VarId, usize)>,
}

impl Instantiation {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary pairs. A later pair for the same variable
    /// replaces an earlier one.
    pub fn from_pairs<I: IntoIterator<Item = (VarId, usize)>>(pairs: I) -> Self {
        let mut inst = Self::new();
        for (v, x) in pairs {
            inst.insert(v, x);
        }
        inst
    }

    /// Zips a sorted variable list with values.
    pub fn from_parts(vars: &[VarId], values: &[usize]) -> Self {
        debug_assert_eq!(vars.len(), values.len());
        Self::from_pairs(vars.iter().copied().zip(values.iter().copied()))
    }

    pub fn insert(&mut self, var: VarId, value: usize) {
        match self.entries.binary_search_by_key(&var, |e| e.0) {
            Ok(i) => self.entries[i].1 = value,
            Err(i) => self.entries.insert(i, (var, value)),
        }
    }

    pub fn with(mut self, var: VarId, value: usize) -> Self {
        self.insert(var, value);
        self
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.entries
            .binary_search_by_key(&var, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.get(var).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.entries.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    /// Keeps only the entries whose variable is in `vars` (sorted).
    pub fn restrict(&self, vars: &[VarId]) -> Instantiation {
        let mut out = Vec::with_capacity(vars.len().min(self.entries.len()));
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < vars.len() {
            let v = self.entries[i].0;
            match v.cmp(&vars[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.entries[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Instantiation { entries: out }
    }

    /// Adds every entry of `other`; entries of `other` win on conflict.
    pub fn extend(&mut self, other: &Instantiation) {
        for (v, x) in other.iter() {
            self.insert(v, x);
        }
    }

    /// True when no variable is assigned differently by the two.
    pub fn agrees_with(&self, other: &Instantiation) -> bool {
        self.iter().all(|(v, x)| other.get(v).is_none_or(|y| y == x))
    }
}

impl fmt::Display for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, x)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}={x}")?;
        }
        f.write_str("}")
    }
}

/// Cartesian product over per-variable choice lists, last position fastest.
///
/// This is the canonical lexicographic enumeration order used for cutset
/// cases and local-cutset summations.
#[derive(Clone, Debug)]
pub struct Assignments {
    choices: Vec<Vec<usize>>,
    cursor: Vec<usize>,
    done: bool,
}

impl Assignments {
    pub fn new(choices: Vec<Vec<usize>>) -> Self {
        let done = choices.iter().any(|c| c.is_empty());
        let cursor = vec![0; choices.len()];
        Assignments { choices, cursor, done }
    }

    /// Every value of every listed cardinality.
    pub fn full(cards: &[usize]) -> Self {
        Self::new(cards.iter().map(|&c| (0..c).collect()).collect())
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.cursor.iter().zip(&self.choices).map(|(&i, c)| c[i]).collect();
        let mut pos = self.cursor.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.cursor[pos] += 1;
            if self.cursor[pos] < self.choices[pos].len() {
                break;
            }
            self.cursor[pos] = 0;
        }
        Some(item)
    }
}
