//! Residue sets, exact progression counts and the brute-force density oracles.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Ambient {
    /// ℤ/Nℤ with wraparound.
    Cyclic { modulus: u64 },
    /// The integers `lo..=hi`; never wraps.
    Interval { lo: i64, hi: i64 },
}

impl Ambient {
    pub fn size(&self) -> u64 {
        match *self {
            Ambient::Cyclic { modulus } => modulus,
            Ambient::Interval { lo, hi } => (hi - lo + 1).max(0) as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSet {
    ambient: Ambient,
    elements: Vec<i64>,
}

impl ResidueSet {
    pub fn cyclic(modulus: u64, elements: impl IntoIterator<Item = i64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        let m = modulus as i64;
        let mut elements: Vec<i64> = elements.into_iter().collect();
        if let Some(bad) = elements.iter().find(|&&x| x < 0 || x >= m) {
            return Err(Error::invalid(format!("residue {bad} outside [0, {modulus})")));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(ResidueSet { ambient: Ambient::Cyclic { modulus }, elements })
    }

    /// Residues taken mod N (negative inputs allowed).
    pub fn cyclic_reduced(modulus: u64, elements: impl IntoIterator<Item = i64>) -> Result<Self> {
        let m = modulus.max(1) as i64;
        Self::cyclic(modulus, elements.into_iter().map(|x| x.rem_euclid(m)))
    }

    pub fn interval(lo: i64, hi: i64, elements: impl IntoIterator<Item = i64>) -> Result<Self> {
        if hi < lo {
            return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
        }
        let mut elements: Vec<i64> = elements.into_iter().collect();
        if let Some(bad) = elements.iter().find(|&&x| x < lo || x > hi) {
            return Err(Error::invalid(format!("element {bad} outside [{lo}, {hi}]")));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(ResidueSet { ambient: Ambient::Interval { lo, hi }, elements })
    }

    pub fn full_cyclic(modulus: u64) -> Self {
        ResidueSet { ambient: Ambient::Cyclic { modulus }, elements: (0..modulus as i64).collect() }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn density(&self) -> BigRational {
        let n = self.ambient.size().max(1);
        BigRational::new(BigInt::from(self.len()), BigInt::from(n))
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    fn indicator(&self) -> (i64, Vec<bool>) {
        let (lo, size) = match self.ambient {
            Ambient::Cyclic { modulus } => (0, modulus as usize),
            Ambient::Interval { lo, hi } => (lo, (hi - lo + 1) as usize),
        };
        let mut bits = vec![false; size];
        for &x in &self.elements {
            bits[(x - lo) as usize] = true;
        }
        (lo, bits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct APCount {
    pub k: usize,
    pub total_ordered: u64,
    pub trivial: u64,
    pub nontrivial: u64,
}

/// Ordered count of pairs (n, r), r = 0 included, with n, n+r, …, n+(k−1)r in A.
///
/// Cyclic mode ranges over (ℤ/Nℤ)²; interval mode over all integer r for
/// which the progression stays inside the interval (so |r| < length).
pub fn count_progressions(a: &ResidueSet, k: usize) -> Result<APCount> {
    if k == 0 {
        return Err(Error::invalid("progression length k must be at least 1"));
    }
    let size = a.ambient.size();
    let card = a.len() as u64;
    let total = if k == 1 {
        match a.ambient {
            Ambient::Cyclic { .. } => card * size,
            Ambient::Interval { .. } => card * (2 * size - 1),
        }
    } else {
        let (lo, bits) = a.indicator();
        let mut total = 0u64;
        for &x in &a.elements {
            for &y in &a.elements {
                let ok = match a.ambient {
                    Ambient::Cyclic { modulus } => {
                        let m = modulus as i64;
                        let r = (y - x).rem_euclid(m);
                        (2..k as i64).all(|j| bits[((x + j * r) % m) as usize])
                    }
                    Ambient::Interval { .. } => {
                        let r = y - x;
                        (2..k as i64).all(|j| {
                            let z = x + j * r - lo;
                            z >= 0 && (z as usize) < bits.len() && bits[z as usize]
                        })
                    }
                };
                total += ok as u64;
            }
        }
        total
    };
    Ok(APCount { k, total_ordered: total, trivial: card, nontrivial: total - card })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parallelogram {
    pub x: i64,
    pub a: i64,
    pub b: i64,
}

impl Parallelogram {
    pub fn corners(&self) -> [i64; 4] {
        [self.x, self.x + self.a, self.x + self.b, self.x + self.a + self.b]
    }
}

/// The pigeonhole argument: bucket differences of distinct pairs; two pairs
/// (y, y+a), (y', y'+a) in one bucket give the parallelogram x=y, a, b=y'−y.
/// Returns every witness so produced, with a, b > 0.
pub fn find_parallelograms(a: &ResidueSet) -> Vec<Parallelogram> {
    let mut buckets: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let els = a.elements();
    for (i, &y) in els.iter().enumerate() {
        for &x in &els[i + 1..] {
            buckets.entry(x - y).or_default().push(y);
        }
    }
    let mut out = Vec::new();
    for (&d, bases) in &buckets {
        for (i, &y) in bases.iter().enumerate() {
            for &y2 in &bases[i + 1..] {
                out.push(Parallelogram { x: y, a: d, b: y2 - y });
            }
        }
    }
    out.sort_by_key(|p| (p.x, p.a, p.b));
    out
}

pub const DEFAULT_DENSITY_GUARD: u64 = 18;

/// min over A ⊆ ℤ/Nℤ with |A| ≥ δN of total_ordered/N². Only sets of the
/// minimal admissible size are scanned: counts are monotone under inclusion.
pub fn min_density_count(n: u64, delta: &BigRational, k: usize, guard: u64) -> Result<BigRational> {
    if n > guard {
        return Err(Error::resource("exhaustive subset enumeration over ℤ/Nℤ", format!("N = {n}"), format!("N ≤ {guard}")));
    }
    if n == 0 || n > 62 {
        return Err(Error::invalid("N must lie in 1..=62"));
    }
    if k == 0 {
        return Err(Error::invalid("progression length k must be at least 1"));
    }
    let lower = delta * BigRational::from_integer(BigInt::from(n));
    let s = lower.ceil().to_integer();
    let s: u64 = if s < BigInt::from(0) { 0 } else { s.try_into().unwrap_or(u64::MAX) };
    if s > n {
        return Err(Error::invalid("δ > 1 admits no subset"));
    }
    let mut best: Option<u64> = None;
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as u64 != s {
            continue;
        }
        let set = ResidueSet::cyclic(n, (0..n as i64).filter(|&i| mask >> i & 1 == 1))?;
        let c = count_progressions(&set, k)?.total_ordered;
        best = Some(best.map_or(c, |b| b.min(c)));
    }
    Ok(BigRational::new(BigInt::from(best.unwrap_or(0)), BigInt::from(n * n)))
}

/// 𝔼_{n∈ℤ/Nℤ} 𝔼_{1≤m,r≤M} 1[n+m+jλr ∈ A for 0 ≤ j < k].
pub fn varnavides_count(a: &ResidueSet, window: u64, lambda: i64, k: usize) -> Result<BigRational> {
    let Ambient::Cyclic { modulus } = a.ambient else {
        return Err(Error::invalid("varnavides_count needs a cyclic residue set"));
    };
    if window == 0 || window >= modulus {
        return Err(Error::invalid(format!("window M = {window} must satisfy 1 ≤ M < N = {modulus}")));
    }
    if k == 0 {
        return Err(Error::invalid("progression length k must be at least 1"));
    }
    let m = modulus as i64;
    let (_, bits) = a.indicator();
    // The shift n+m sweeps all residues for each m, so the m-average is trivial.
    let mut hits = 0u64;
    for r in 1..=window as i64 {
        let step = (lambda.rem_euclid(m) * r) % m;
        for x in 0..m {
            hits += (0..k as i64).all(|j| bits[((x + j * step) % m) as usize]) as u64;
        }
    }
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(modulus * window)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_empty() {
        let full = ResidueSet::full_cyclic(5);
        assert_eq!(count_progressions(&full, 3).unwrap().total_ordered, 25);
        let empty = ResidueSet::cyclic(7, []).unwrap();
        assert_eq!(count_progressions(&empty, 3).unwrap().total_ordered, 0);
        assert!(count_progressions(&full, 0).is_err());
    }

    #[test]
    fn interval_single_term_ranges() {
        let a = ResidueSet::interval(1, 4, [2]).unwrap();
        assert_eq!(count_progressions(&a, 1).unwrap().total_ordered, 7);
        let b = ResidueSet::interval(1, 5, [1, 3, 5]).unwrap();
        // r ∈ {0, ±2, ±4 for 2-APs}; 3-APs: trivial 3 plus (1,2),(5,−2).
        assert_eq!(count_progressions(&b, 3).unwrap().total_ordered, 5);
    }

    #[test]
    fn parallelograms() {
        let a = ResidueSet::interval(-10, 10, [1, 2, 3, 4]).unwrap();
        let ps = find_parallelograms(&a);
        assert!(ps.contains(&Parallelogram { x: 1, a: 1, b: 2 }));
        let b = ResidueSet::interval(-10, 10, [1, 2]).unwrap();
        assert!(find_parallelograms(&b).is_empty());
    }

    #[test]
    fn min_density_trivial_cases() {
        let one = BigRational::from_integer(1.into());
        assert_eq!(min_density_count(5, &one, 3, 18).unwrap(), one);
        let eighth = BigRational::new(1.into(), 8.into());
        assert_eq!(min_density_count(8, &eighth, 3, 18).unwrap(), BigRational::new(1.into(), 64.into()));
        assert!(matches!(min_density_count(19, &eighth, 3, 18), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn varnavides_trivial() {
        let full = ResidueSet::full_cyclic(11);
        assert_eq!(varnavides_count(&full, 3, 2, 3).unwrap(), BigRational::from_integer(1.into()));
        let empty = ResidueSet::cyclic(11, []).unwrap();
        assert_eq!(varnavides_count(&empty, 3, 2, 3).unwrap(), BigRational::from_integer(0.into()));
        assert!(varnavides_count(&full, 11, 1, 3).is_err());
    }
}
