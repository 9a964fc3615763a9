//! Finite partitions ("factors") with complexity bookkeeping, and
//! conditional expectation onto them.

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Scalar};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A partition of `0..n` into atoms, labelled `0..n_atoms` in order of first
/// appearance. `complexity` counts the generating sets adjoined so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    labels: Vec<usize>,
    n_atoms: usize,
    complexity: usize,
}

impl Factor {
    pub fn trivial(n: usize) -> Self {
        Factor { labels: vec![0; n], n_atoms: usize::from(n > 0), complexity: 0 }
    }

    /// Singletons; complexity n (one generator per point).
    pub fn discrete(n: usize) -> Self {
        Factor { labels: (0..n).collect(), n_atoms: n, complexity: n }
    }

    /// Canonicalizes arbitrary labels into first-appearance order.
    pub fn from_labels(raw: &[usize], complexity: usize) -> Self {
        let mut map = HashMap::new();
        let labels: Vec<usize> = raw
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Factor { n_atoms: map.len(), labels, complexity }
    }

    pub fn from_keys<K: std::hash::Hash + Eq + Clone>(keys: &[K], complexity: usize) -> Self {
        let mut map: HashMap<K, usize> = HashMap::new();
        let labels: Vec<usize> = keys
            .iter()
            .map(|k| {
                let next = map.len();
                *map.entry(k.clone()).or_insert(next)
            })
            .collect();
        Factor { n_atoms: map.len(), labels, complexity }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn complexity(&self) -> usize {
        self.complexity
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn atom_of(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn atoms(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_atoms];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Adjoin one generating set.
    pub fn refine(&self, set: &[bool]) -> Result<Factor> {
        if set.len() != self.len() {
            return Err(Error::ShapeMismatch(format!("set of length {} for factor on {} points", set.len(), self.len())));
        }
        let keys: Vec<(usize, bool)> = self.labels.iter().copied().zip(set.iter().copied()).collect();
        Ok(Factor::from_keys(&keys, self.complexity + 1))
    }

    pub fn join(&self, other: &Factor) -> Result<Factor> {
        if other.len() != self.len() {
            return Err(Error::ShapeMismatch("joining factors on different spaces".into()));
        }
        let keys: Vec<(usize, usize)> = self.labels.iter().copied().zip(other.labels.iter().copied()).collect();
        Ok(Factor::from_keys(&keys, self.complexity + other.complexity))
    }

    /// Every atom of `self` lies inside an atom of `coarser`.
    pub fn refines(&self, coarser: &Factor) -> bool {
        if coarser.len() != self.len() {
            return false;
        }
        let mut image = vec![usize::MAX; self.n_atoms];
        for (i, &l) in self.labels.iter().enumerate() {
            let c = coarser.labels[i];
            if image[l] == usize::MAX {
                image[l] = c;
            } else if image[l] != c {
                return false;
            }
        }
        true
    }

    pub fn atom_measures<S: Scalar>(&self, weights: &[S]) -> Vec<S> {
        let mut parts: Vec<Vec<S>> = vec![Vec::new(); self.n_atoms];
        for (i, &l) in self.labels.iter().enumerate() {
            parts[l].push(weights[i].clone());
        }
        parts.iter().map(|p| pairwise_sum(p)).collect()
    }
}

/// Weighted atom means of `f`; zero on atoms of zero measure, and `f` itself
/// on singleton atoms of positive measure (exact even in float mode).
pub fn conditional_expectation<S: Scalar>(f: &[S], weights: &[S], factor: &Factor) -> Result<Vec<S>> {
    if f.len() != factor.len() || weights.len() != factor.len() {
        return Err(Error::ShapeMismatch(format!(
            "function of length {}, weights {}, factor on {} points",
            f.len(),
            weights.len(),
            factor.len()
        )));
    }
    let atoms = factor.atoms();
    let mut means = Vec::with_capacity(atoms.len());
    for atom in &atoms {
        let mass = pairwise_sum(&atom.iter().map(|&i| weights[i].clone()).collect::<Vec<_>>());
        let value = if mass.is_zero() {
            S::zero()
        } else if atom.len() == 1 {
            f[atom[0]].clone()
        } else {
            pairwise_sum(&atom.iter().map(|&i| weights[i].clone() * f[i].clone()).collect::<Vec<_>>()) / mass
        };
        means.push(value);
    }
    Ok(factor.labels().iter().map(|&l| means[l].clone()).collect())
}
