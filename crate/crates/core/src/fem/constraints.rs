//! Prescribed values on selected unknowns of a linear system.

use std::collections::BTreeMap;

/// Map from global unknown to prescribed value. Later insertions with
/// `overwrite = false` never replace an existing entry.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraints {
    values: BTreeMap<usize, f64>,
}

impl Constraints {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, dof: usize, value: f64) {
        self.values.insert(dof, value);
    }

    pub fn set_if_free(&mut self, dof: usize, value: f64) {
        self.values.entry(dof).or_insert(value);
    }

    pub fn get(&self, dof: usize) -> Option<f64> {
        self.values.get(&dof).copied()
    }

    pub fn contains(&self, dof: usize) -> bool {
        self.values.contains_key(&dof)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().map(|(&d, &v)| (d, v))
    }

    /// Indicator vector of constrained unknowns for a system of size `n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &d in self.values.keys() {
            m[d] = true;
        }
        m
    }

    /// Writes the prescribed values into `x`.
    pub fn apply(&self, x: &mut [f64]) {
        for (&d, &v) in &self.values {
            x[d] = v;
        }
    }

    /// Same constraints with every value set to zero.
    pub fn homogeneous(&self) -> Self {
        Constraints {
            values: self.values.keys().map(|&d| (d, 0.0)).collect(),
        }
    }
}
