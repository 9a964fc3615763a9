use crate::boxnorms::{Kernel2, MeasuredSpace};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::seed::{rng, streams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// ν = p⁻¹·1_H for a host graph H = G(n,p) on one vertex set shared by X, Y
/// and Z. Each unordered pair {x,y} with x ≤ y is an independent p-coin, the
/// diagonal included, so that p = 1 gives ν ≡ 1.
#[derive(Clone, Debug)]
pub struct SparseWeight {
    n: usize,
    p: BigRational,
    seed: u64,
    words: usize,
    /// Symmetric bit rows, loops included.
    rows: Vec<u64>,
}

impl SparseWeight {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &BigRational {
        &self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn has(&self, x: usize, y: usize) -> bool {
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    fn row(&self, x: usize) -> &[u64] {
        &self.rows[x * self.words..(x + 1) * self.words]
    }

    /// The loopless host graph H.
    pub fn host(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for x in 0..self.n {
            for y in x + 1..self.n {
                if self.has(x, y) {
                    g.add_edge(x, y);
                }
            }
        }
        g
    }

    /// Number of ordered pairs (x,y), loops included, with ν(x,y) > 0.
    pub fn support(&self) -> u64 {
        self.rows.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn value<S: Scalar>(&self) -> S {
        S::from_ratio(&self.p.recip())
    }

    pub fn kernel<S: Scalar>(&self) -> Kernel2<S> {
        let v = self.value::<S>();
        let sp = MeasuredSpace::uniform(self.n);
        Kernel2::from_fn(sp.clone(), sp, |x, y| if self.has(x, y) { v.clone() } else { S::zero() })
    }

    /// ∫∫ν = support / (n²p).
    pub fn mean<S: Scalar>(&self) -> S {
        let n = BigInt::from(self.n);
        S::from_ratio(&(BigRational::from_integer(self.support().into()) / (BigRational::from_integer(&n * &n) * &self.p)))
    }

    /// Standard deviation of the mean under the sampling model:
    /// √((1−p)(2n²−n)/(p n⁴)).
    pub fn mean_sigma(&self) -> f64 {
        let n = self.n as f64;
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        ((1.0 - p) * (2.0 * n * n - n) / (p * n.powi(4))).sqrt()
    }

    /// The smallest p allowed without override, 1/ln n.
    pub fn p_floor(n: usize) -> f64 {
        1.0 / (n as f64).ln()
    }
}

impl SparseWeight {
    /// ν = p⁻¹·1_H for a given (loopless) host graph, e.g. an adversarial one.
    pub fn from_graph(h: &Graph, p: &BigRational) -> Result<SparseWeight> {
        if !p.is_positive() || *p > BigRational::one() {
            return Err(Error::invalid("p must lie in (0,1]"));
        }
        let n = h.n();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for (x, y) in h.edges() {
            rows[x * words + y / 64] |= 1 << (y % 64);
            rows[y * words + x / 64] |= 1 << (x % 64);
        }
        Ok(SparseWeight { n, p: p.clone(), seed: 0, words, rows })
    }
}

/// H = G(n,p) with p ≥ 1/ln n.
pub fn sample_gnp_weight(n: usize, p: &BigRational, seed: u64) -> Result<SparseWeight> {
    let pf = p.to_f64().unwrap_or(f64::NAN);
    if n < 3 || pf < SparseWeight::p_floor(n) {
        return Err(Error::invalid(format!(
            "p = {p} is below the floor 1/ln n = {:.4} (use the override to go lower)",
            SparseWeight::p_floor(n.max(2))
        )));
    }
    sample_gnp_weight_unchecked(n, p, seed)
}

/// As [`sample_gnp_weight`] without the 1/ln n floor.
pub fn sample_gnp_weight_unchecked(n: usize, p: &BigRational, seed: u64) -> Result<SparseWeight> {
    if !p.is_positive() || *p > BigRational::one() {
        return Err(Error::invalid("p must lie in (0,1]"));
    }
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let pf = p.to_f64().unwrap();
    let all = p.is_one();
    let words = n.div_ceil(64);
    let mut rows = vec![0u64; n * words];
    let mut r = rng(seed, streams::GNP);
    for x in 0..n {
        for y in x..n {
            if all || r.gen::<f64>() < pf {
                rows[x * words + y / 64] |= 1 << (y % 64);
                rows[y * words + x / 64] |= 1 << (x % 64);
            }
        }
    }
    Ok(SparseWeight { n, p: p.clone(), seed, words, rows })
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct Correlation<S> {
    pub name: &'static str,
    #[serde(serialize_with = "ser_scalar")]
    pub value: S,
    pub deviation: f64,
    pub pass: bool,
}

fn ser_scalar<S: Scalar, Z: serde::Serializer>(v: &S, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    serde::Serialize::serialize(&crate::scalar::to_json(v), s)
}

#[derive(Clone, Debug, Serialize)]
#[serde(bound = "S: Scalar")]
pub struct LinearFormsReport<S> {
    pub n: usize,
    pub tol: f64,
    /// ∫ν, ‖ν‖⁴_{□²} and the 12-factor octahedral correlation, in that order.
    pub correlations: Vec<Correlation<S>>,
    pub pass: bool,
}

impl<S: Scalar> LinearFormsReport<S> {
    pub fn get(&self, name: &str) -> Option<&Correlation<S>> {
        self.correlations.iter().find(|c| c.name == name)
    }
}

pub const DEFAULT_OCTAHEDRAL_GUARD: f64 = 2e10;

/// Self-correlations of ν, each compared with 1. Counts are exact integers
/// (homomorphism counts of an edge, a 4-cycle and the octahedron K_{2,2,2}
/// into H with loops), divided by n^v p^e.
pub fn linear_forms_check<S: Scalar>(nu: &SparseWeight, tol: f64, guard: f64) -> Result<LinearFormsReport<S>> {
    let n = nu.n;
    let pf = nu.p.to_f64().unwrap();
    let s = (pf * pf * n as f64).max(1.0);
    let work = (n as f64).powi(2) / 2.0 * s * s / 2.0 * (s / 64.0).ceil();
    if work > guard {
        return Err(Error::resource("octahedral correlation", format!("{work:.3e} word operations"), format!("{guard:.3e}")));
    }
    let edge = nu.support() as u128;
    let c4 = c4_count(nu);
    let octa = octahedral_count(nu);
    let norm = |count: u128, v: i32, e: i32| {
        let nn = BigRational::from_integer(BigInt::from(n)).pow(v);
        S::from_ratio(&(BigRational::from_integer(BigInt::from(count)) / (nn * nu.p.pow(e))))
    };
    let correlations: Vec<Correlation<S>> = [("mean", norm(edge, 2, 1)), ("box", norm(c4, 4, 4)), ("octahedral", norm(octa, 6, 12))]
        .into_iter()
        .map(|(name, value)| {
            let deviation = (value.to_f64_lossy() - 1.0).abs();
            Correlation { name, value, deviation, pass: deviation <= tol }
        })
        .collect();
    let pass = correlations.iter().all(|c| c.pass);
    Ok(LinearFormsReport { n, tol, correlations, pass })
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Σ_{x,x'} codeg(x,x')².
fn c4_count(nu: &SparseWeight) -> u128 {
    (0..nu.n)
        .into_par_iter()
        .map(|x| {
            (0..nu.n)
                .map(|x2| {
                    let c = popcount_and(nu.row(x), nu.row(x2)) as u128;
                    c * c
                })
                .sum::<u128>()
        })
        .sum()
}

/// Homomorphisms of K_{2,2,2}: for each (x,x'), with S = N(x) ∩ N(x'), the
/// y- and z-pairs both range over S and contribute Σ_{y,y' ∈ S} |N(y) ∩ N(y') ∩ S|².
fn octahedral_count(nu: &SparseWeight) -> u128 {
    let n = nu.n;
    (0..n)
        .into_par_iter()
        .map(|x| {
            let mut total = 0u128;
            let mut common = vec![0u64; nu.words];
            for x2 in x..n {
                for (c, (a, b)) in common.iter_mut().zip(nu.row(x).iter().zip(nu.row(x2))) {
                    *c = a & b;
                }
                let s: Vec<usize> = ones(&common).collect();
                let w = s.len().div_ceil(64);
                // masks[i] = N(s_i) ∩ S in S-local coordinates
                let mut masks = vec![0u64; s.len() * w];
                for (i, &y) in s.iter().enumerate() {
                    for (j, &z) in s.iter().enumerate() {
                        if nu.has(y, z) {
                            masks[i * w + j / 64] |= 1 << (j % 64);
                        }
                    }
                }
                let mut inner = 0u128;
                for i in 0..s.len() {
                    let mi = &masks[i * w..(i + 1) * w];
                    let d = popcount_and(mi, mi) as u128;
                    inner += d * d;
                    for j in i + 1..s.len() {
                        let c = popcount_and(mi, &masks[j * w..(j + 1) * w]) as u128;
                        inner += 2 * c * c;
                    }
                }
                total += if x2 == x { inner } else { 2 * inner };
            }
            total
        })
        .sum()
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(k, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(k * 64 + t)
        })
    })
}
