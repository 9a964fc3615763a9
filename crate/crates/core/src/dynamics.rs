//! Finite measure-preserving systems: a permutation T of the states with a
//! T-invariant rational probability measure. Convention: (Tf)(x) = f(T x).

use crate::error::{Error, Result};
use crate::partition::{conditional_expectation, Factor};
use crate::scalar::{pairwise_sum, Scalar};
use crate::seed::{self, streams};
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSystem {
    perm: Vec<usize>,
    measure: Vec<BigRational>,
}

impl FiniteSystem {
    pub fn new(perm: Vec<usize>, measure: Vec<BigRational>) -> Result<Self> {
        let n = perm.len();
        if measure.len() != n {
            return Err(Error::ShapeMismatch(format!("{n} states but {} weights", measure.len())));
        }
        let mut seen = vec![false; n];
        for &t in &perm {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return Err(Error::invalid("shift is not a bijection"));
            }
        }
        if measure.iter().any(|w| w < &BigRational::zero()) {
            return Err(Error::invalid("negative measure"));
        }
        if measure.iter().sum::<BigRational>() != BigRational::one() {
            return Err(Error::invalid("measure does not sum to 1"));
        }
        if (0..n).any(|x| measure[perm[x]] != measure[x]) {
            return Err(Error::invalid("measure is not shift-invariant"));
        }
        Ok(FiniteSystem { perm, measure })
    }

    fn uniform(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let w = BigRational::new(BigInt::one(), BigInt::from(n.max(1)));
        Self::new(perm, vec![w; n])
    }

    /// Shift by one on ℤ/nℤ.
    pub fn cycle(n: usize) -> Result<Self> {
        Self::uniform((0..n).map(|x| (x + 1) % n).collect())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::uniform((0..n).collect())
    }

    /// Disjoint cycles of the given lengths on consecutive states, uniform measure.
    pub fn from_cycle_type(lengths: &[usize]) -> Result<Self> {
        let mut perm = Vec::new();
        for &l in lengths {
            if l == 0 {
                return Err(Error::invalid("cycle length 0"));
            }
            let start = perm.len();
            perm.extend((0..l).map(|i| start + (i + 1) % l));
        }
        Self::uniform(perm)
    }

    /// Random permutation of n states with a random orbit-constant measure.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one state"));
        }
        let mut rng = seed::rng(seed, streams::SYSTEM);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        // Cut the shuffled states into cycles of random lengths.
        let mut perm = vec![0; n];
        let mut i = 0;
        while i < n {
            let len = rng.gen_range(1..=(n - i).min(12));
            for j in 0..len {
                perm[order[i + j]] = order[i + (j + 1) % len];
            }
            i += len;
        }
        let mut sys = FiniteSystem { perm, measure: vec![BigRational::zero(); n] };
        let orbits = sys.orbits();
        let raw: Vec<u64> = orbits.iter().map(|_| rng.gen_range(1..=5)).collect();
        let total: u64 = orbits.iter().zip(&raw).map(|(o, &w)| w * o.len() as u64).sum();
        for (o, &w) in orbits.iter().zip(&raw) {
            for &x in o {
                sys.measure[x] = BigRational::new(BigInt::from(w), BigInt::from(total));
            }
        }
        Self::new(sys.perm, sys.measure)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn shift(&self) -> &[usize] {
        &self.perm
    }

    pub fn measure(&self) -> &[BigRational] {
        &self.measure
    }

    pub fn weights<S: Scalar>(&self) -> Vec<S> {
        self.measure.iter().map(S::from_ratio).collect()
    }

    /// Orbits x, Tx, T²x, … ordered by their smallest state.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for x in 0..self.len() {
            if seen[x] {
                continue;
            }
            let mut orbit = vec![x];
            seen[x] = true;
            let mut y = self.perm[x];
            while y != x {
                seen[y] = true;
                orbit.push(y);
                y = self.perm[y];
            }
            out.push(orbit);
        }
        out
    }

    /// lcm of the orbit lengths: T^P = id.
    pub fn global_period(&self) -> BigUint {
        self.orbits().iter().fold(BigUint::one(), |acc, o| acc.lcm(&BigUint::from(o.len())))
    }

    /// (T^r f)(x) = f(T^r x).
    pub fn apply<T: Clone>(&self, f: &[T], r: usize) -> Vec<T> {
        let mut out = f.to_vec();
        for o in self.orbits() {
            let l = o.len();
            for (p, &x) in o.iter().enumerate() {
                out[x] = f[o[(p + r) % l]].clone();
            }
        }
        out
    }
}

/// Systems serialize as {n, permutation, measure: ["p/q", …]}.
#[derive(Serialize, Deserialize)]
struct SystemRepr {
    n: usize,
    permutation: Vec<usize>,
    measure: Vec<String>,
}

impl Serialize for FiniteSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemRepr { n: self.len(), permutation: self.perm.clone(), measure: self.measure.iter().map(|m| m.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = SystemRepr::deserialize(d)?;
        if r.n != r.permutation.len() {
            return Err(D::Error::custom("n does not match permutation length"));
        }
        let measure = r
            .measure
            .iter()
            .map(|s| crate::scalar::parse_ratio(s).ok_or_else(|| D::Error::custom(format!("bad rational {s}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        FiniteSystem::new(r.permutation, measure).map_err(D::Error::custom)
    }
}

/// Y₀: atoms are the orbits of T.
pub fn invariant_factor(sys: &FiniteSystem) -> Factor {
    let mut labels = vec![0; sys.len()];
    let orbits = sys.orbits();
    for (i, o) in orbits.iter().enumerate() {
        for &x in o {
            labels[x] = i;
        }
    }
    Factor::from_labels(&labels, orbits.len())
}

pub fn cond_exp<S: Scalar>(f: &[S], factor: &Factor, sys: &FiniteSystem) -> Result<Vec<S>> {
    conditional_expectation(f, &sys.weights::<S>(), factor)
}

/// ∫ |f|² dμ.
pub fn l2_norm_sq<S: Scalar>(f: &[S], sys: &FiniteSystem) -> S {
    let w = sys.weights::<S>();
    pairwise_sum(&f.iter().zip(&w).map(|(x, w)| w.clone() * x.clone() * x.clone()).collect::<Vec<_>>())
}

fn big_to_scalar<S: Scalar>(n: &BigUint) -> S {
    S::from_ratio(&BigRational::from_integer(BigInt::from(n.clone())))
}

fn check_len<T>(f: &[T], sys: &FiniteSystem) -> Result<()> {
    if f.len() != sys.len() {
        return Err(Error::ShapeMismatch(format!("function of length {} on {} states", f.len(), sys.len())));
    }
    Ok(())
}

/// 𝔼_{1≤r≤N} T^r f, exactly: per orbit, N = qL + s splits into q full turns
/// plus a partial window.
pub fn ergodic_average<S: Scalar>(f: &[S], sys: &FiniteSystem, n: &BigUint) -> Result<Vec<S>> {
    check_len(f, sys)?;
    if n.is_zero() {
        return Err(Error::invalid("N must be at least 1"));
    }
    let mut out = vec![S::zero(); f.len()];
    let total: S = big_to_scalar(n);
    for o in sys.orbits() {
        let l = o.len();
        let (q, s) = n.div_rem(&BigUint::from(l));
        let s = s.to_usize().unwrap_or(0);
        let vals: Vec<S> = o.iter().map(|&x| f[x].clone()).collect();
        let turn = pairwise_sum(&vals);
        let q: S = big_to_scalar(&q);
        for (p, &x) in o.iter().enumerate() {
            let partial = pairwise_sum(&(1..=s).map(|r| vals[(p + r) % l].clone()).collect::<Vec<_>>());
            out[x] = (q.clone() * turn.clone() + partial) / total.clone();
        }
    }
    Ok(out)
}

/// Shared engine for 𝔼_{1≤r≤N} ∫ Π_j T^{jr} f_j dμ over any ring-like values.
fn recurrence_engine<T, W>(fs: &[&[T]], sys: &FiniteSystem, n: &BigUint, weight: W, from_big: impl Fn(&BigUint) -> T) -> T
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
    W: Fn(&BigRational) -> T,
{
    let mut acc = T::zero();
    for o in sys.orbits() {
        let l = o.len();
        let mu = weight(&sys.measure[o[0]]);
        // c(ρ) = Σ_{x∈orbit} Π_j f_j(T^{jρ} x), periodic in ρ mod L.
        let c: Vec<T> = (0..l)
            .map(|rho| {
                (0..l).fold(T::zero(), |s, p| {
                    let prod = fs.iter().enumerate().fold(T::one(), |pr, (j, f)| pr * f[o[(p + j * rho) % l]].clone());
                    s + prod
                })
            })
            .collect();
        let (q, s) = n.div_rem(&BigUint::from(l));
        let s = s.to_usize().unwrap_or(0);
        let full = c.iter().cloned().fold(T::zero(), |a, b| a + b);
        let partial = (1..=s).fold(T::zero(), |a, r| a + c[r % l].clone());
        acc = acc + mu * (from_big(&q) * full + partial);
    }
    acc
}

/// 𝔼_{1≤r≤N} ∫ f · T^r f ⋯ T^{(k−1)r} f dμ, exact for rational f.
pub fn multi_recurrence_average<S: Scalar>(f: &[S], sys: &FiniteSystem, k: usize, n: &BigUint) -> Result<S> {
    check_len(f, sys)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if n.is_zero() {
        return Err(Error::invalid("N must be at least 1"));
    }
    let fs: Vec<&[S]> = vec![f; k];
    let sum = recurrence_engine(&fs, sys, n, S::from_ratio, big_to_scalar::<S>);
    Ok(sum / big_to_scalar::<S>(n))
}

/// 𝔼_{1≤r≤N} ∫ Π_j T^{jr} f_j dμ for complex f_0, …, f_{k−1}.
pub fn multi_recurrence_average_complex(fs: &[Vec<Complex64>], sys: &FiniteSystem, n: &BigUint) -> Result<Complex64> {
    for f in fs {
        check_len(f, sys)?;
    }
    if n.is_zero() {
        return Err(Error::invalid("N must be at least 1"));
    }
    let refs: Vec<&[Complex64]> = fs.iter().map(|f| f.as_slice()).collect();
    let as_c = |q: &BigUint| Complex64::new(q.to_f64().unwrap_or(f64::INFINITY), 0.0);
    let sum = recurrence_engine(&refs, sys, n, |w| Complex64::new(w.to_f64().unwrap_or(0.0), 0.0), as_c);
    Ok(sum / as_c(n))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ObservableClass {
    Invariant,
    /// Orbit spans a 1-dimensional space: Tf = e^{2πiθ} f.
    Eigenfunction { theta: f64 },
    /// Orbit spans a space of dimension < period.
    Quasiperiodic { dim: usize, period: u64 },
    /// Orbit vectors are linearly independent.
    Periodic { period: u64 },
    /// Period beyond the classification cap.
    Generic { period: String },
}

pub const CLASSIFY_PERIOD_CAP: u64 = 4096;

/// Minimal n ≥ 1 with T^n f = f: lcm over orbits of the value-sequence period.
pub fn function_period<T: PartialEq>(f: &[T], sys: &FiniteSystem) -> BigUint {
    sys.orbits().iter().fold(BigUint::one(), |acc, o| {
        let l = o.len();
        let p = (1..=l)
            .filter(|d| l % d == 0)
            .find(|&d| (0..l).all(|i| f[o[i]] == f[o[(i + d) % l]]))
            .unwrap_or(l);
        acc.lcm(&BigUint::from(p))
    })
}

/// Classification by the orbit {Tⁿ f}: its period, and the rank of its
/// span (singular values below `tol`·σ_max count as zero).
pub fn classify_function(f: &[Complex64], sys: &FiniteSystem, tol: f64) -> Result<ObservableClass> {
    check_len(f, sys)?;
    let period = function_period(f, sys);
    if period.is_one() {
        return Ok(ObservableClass::Invariant);
    }
    let Some(p) = period.to_u64().filter(|&p| p <= CLASSIFY_PERIOD_CAP) else {
        return Ok(ObservableClass::Generic { period: period.to_string() });
    };
    let n = f.len();
    let mut rows = DMatrix::<Complex64>::zeros(p as usize, n);
    let mut cur = f.to_vec();
    for r in 0..p as usize {
        for (c, v) in cur.iter().enumerate() {
            rows[(r, c)] = *v;
        }
        cur = sys.apply(&cur, 1);
    }
    let sv = rows.singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > tol * smax).count();
    Ok(if rank == 1 {
        let tf = sys.apply(f, 1);
        let num: Complex64 = tf.iter().zip(f).map(|(a, b)| a * b.conj()).sum();
        let theta = (num.arg() / std::f64::consts::TAU).rem_euclid(1.0);
        ObservableClass::Eigenfunction { theta }
    } else if (rank as u64) < p {
        ObservableClass::Quasiperiodic { dim: rank, period: p }
    } else {
        ObservableClass::Periodic { period: p }
    })
}

/// Exact rank of the orbit span for rational-valued f (Gaussian elimination).
pub fn orbit_rank_exact(f: &[BigRational], sys: &FiniteSystem) -> Result<Option<usize>> {
    check_len(f, sys)?;
    let Some(p) = function_period(f, sys).to_u64().filter(|&p| p <= CLASSIFY_PERIOD_CAP) else {
        return Ok(None);
    };
    let mut rows = Vec::with_capacity(p as usize);
    let mut cur = f.to_vec();
    for _ in 0..p {
        rows.push(cur.clone());
        cur = sys.apply(&cur, 1);
    }
    Ok(Some(rank_rational(rows)))
}

fn rank_rational(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, piv);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = rows[r][c].clone() / pivot.clone();
                for cc in c..cols {
                    let delta = factor.clone() * rows[rank][cc].clone();
                    rows[r][cc] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// 𝔼_{−N≤n≤N} ‖E(Tⁿf · f | Y₀)‖²_{L²}, with 2N+1 normalization.
pub fn weak_mixing_defect<S: Scalar>(f: &[S], sys: &FiniteSystem, n: u64) -> Result<S> {
    check_len(f, sys)?;
    let mut terms = Vec::new();
    for o in sys.orbits() {
        let l = o.len() as u64;
        let mass = S::from_ratio(&sys.measure[o[0]]) * S::from_u64(l).unwrap();
        let vals: Vec<S> = o.iter().map(|&x| f[x].clone()).collect();
        // c(ρ): orbit mean of f(T^ρ x) f(x), uniform on the orbit.
        let c: Vec<S> = (0..l as usize)
            .map(|rho| {
                pairwise_sum(&(0..vals.len()).map(|p| vals[(p + rho) % vals.len()].clone() * vals[p].clone()).collect::<Vec<_>>())
                    / S::from_u64(l).unwrap()
            })
            .collect();
        // Multiplicity of each residue ρ among n ∈ [−N, N].
        let counts: Vec<u64> = (0..l).map(|rho| residue_count(n, l, rho)).collect();
        let s = pairwise_sum(&c.iter().zip(&counts).map(|(ci, &k)| S::from_u64(k).unwrap() * ci.clone() * ci.clone()).collect::<Vec<_>>());
        terms.push(mass * s);
    }
    Ok(pairwise_sum(&terms) / S::from_u64(2 * n + 1).unwrap())
}

/// #{n ∈ [−N, N] : n ≡ ρ (mod L)}.
fn residue_count(n: u64, l: u64, rho: u64) -> u64 {
    // Count of m ∈ [0, 2N] with m ≡ ρ + N (mod L).
    let target = (rho + n % l) % l;
    let top = 2 * n;
    if target > top {
        0
    } else {
        (top - target) / l + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErgodicComponent {
    #[serde(with = "crate::scalar::ratio_str")]
    pub weight: BigRational,
    pub orbit: Vec<usize>,
    /// Same state space, uniform measure on the orbit.
    pub system: FiniteSystem,
}

pub fn ergodic_decomposition(sys: &FiniteSystem) -> Result<Vec<ErgodicComponent>> {
    let n = sys.len();
    sys.orbits()
        .into_iter()
        .filter_map(|o| {
            let weight: BigRational = o.iter().map(|&x| sys.measure[x].clone()).sum();
            if weight.is_zero() {
                return None;
            }
            let mut measure = vec![BigRational::zero(); n];
            let share = BigRational::new(BigInt::one(), BigInt::from(o.len()));
            for &x in &o {
                measure[x] = share.clone();
            }
            Some(FiniteSystem::new(sys.perm.clone(), measure).map(|system| ErgodicComponent { weight, orbit: o, system }))
        })
        .collect()
}
