//! The colour-focusing induction as an inspectable bound tree, and an
//! exhaustive census of colourings that avoid both progressions and fans.

use super::{find_fan, Colouring};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub name: String,
    pub formula: String,
    /// Decimal value, or None once the bound is beyond evaluation.
    pub value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FocusingTrace {
    pub k: usize,
    pub m: u64,
    pub bound: Option<String>,
    pub nodes: Vec<TraceNode>,
}

const MAX_BITS: u64 = 4096;

/// The bound tree W(k,m) = N(k,m,m), N(k,m,0) = 1 and
/// N(k,m,d) = 4k·N₁·N₂ with N₁ = N(k,m,d−1), N₂ = W(k−1, mᵈN₁ᵈ).
/// Nested W-calls deeper than `max_depth` stay symbolic.
pub fn focusing_trace(k: usize, m: u64, max_depth: usize) -> FocusingTrace {
    let mut t = Tracer { nodes: BTreeMap::new(), max_depth };
    let bound = t.w(k, &BigUint::from(m), 0);
    FocusingTrace {
        k,
        m,
        bound: bound.map(|b| b.to_string()),
        nodes: t.nodes.into_values().collect(),
    }
}

struct Tracer {
    nodes: BTreeMap<String, TraceNode>,
    max_depth: usize,
}

impl Tracer {
    fn record(&mut self, name: String, formula: String, value: &Option<BigUint>) {
        self.nodes.entry(name.clone()).or_insert(TraceNode { name, formula, value: value.as_ref().map(|v| v.to_string()) });
    }

    fn w(&mut self, k: usize, m: &BigUint, depth: usize) -> Option<BigUint> {
        let name = format!("W({k}, {})", short(m));
        if k == 1 {
            let v = Some(BigUint::one());
            self.record(name, "1".into(), &v);
            return v;
        }
        let small_m = u64::try_from(m).ok().filter(|&x| x <= 64);
        let v = match small_m {
            Some(mm) if depth <= self.max_depth => self.n(k, mm, mm, depth),
            _ => None,
        };
        self.record(name, format!("N({k}, {0}, {0})", short(m)), &v);
        v
    }

    fn n(&mut self, k: usize, m: u64, d: u64, depth: usize) -> Option<BigUint> {
        let name = format!("N({k}, {m}, {d})");
        if d == 0 {
            let v = Some(BigUint::one());
            self.record(name, "1".into(), &v);
            return v;
        }
        let n1 = self.n(k, m, d - 1, depth);
        let n2 = n1.as_ref().and_then(|n1| {
            let colours = BigUint::from(m).pow(d as u32) * n1.pow(d as u32);
            if colours.bits() > MAX_BITS {
                None
            } else {
                self.w(k - 1, &colours, depth + 1)
            }
        });
        let v = match (&n1, &n2) {
            (Some(a), Some(b)) => Some(BigUint::from(4 * k as u64) * a * b).filter(|v| v.bits() <= MAX_BITS),
            _ => None,
        };
        let formula = format!("4·{k}·N({k}, {m}, {}) · W({}, {m}^{d}·N₁^{d})", d - 1, k - 1);
        self.record(name, formula, &v);
        v
    }
}

fn short(x: &BigUint) -> String {
    let s = x.to_string();
    if s.len() <= 24 {
        s
    } else {
        format!("{}…({} digits)", &s[..8], s.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanCensus {
    pub n: usize,
    pub m: u32,
    pub k: usize,
    pub d: usize,
    /// Colourings of [1, N] with no monochromatic k-AP.
    pub ap_free: u64,
    /// Of those, colourings that also contain no polychromatic fan of degree d.
    pub neither: u64,
    pub first_neither: Option<Colouring>,
}

/// Exhaustive census by DFS with progression pruning.
pub fn fan_census(n: usize, m: u32, k: usize, d: usize, guard: u64) -> Result<FanCensus> {
    if k < 2 || m == 0 {
        return Err(Error::invalid("census needs k ≥ 2 and m ≥ 1"));
    }
    let mut census = FanCensus { n, m, k, d, ap_free: 0, neither: 0, first_neither: None };
    let mut cur = Vec::with_capacity(n);
    let mut nodes = 0u64;
    census_dfs(&mut census, &mut cur, &mut nodes, guard)?;
    Ok(census)
}

fn census_dfs(c: &mut FanCensus, cur: &mut Vec<u32>, nodes: &mut u64, guard: u64) -> Result<()> {
    if cur.len() == c.n {
        c.ap_free += 1;
        let col = Colouring { m: c.m, colours: cur.clone() };
        if find_fan(&col, c.k, c.d)?.is_none() {
            c.neither += 1;
            if c.first_neither.is_none() {
                c.first_neither = Some(col);
            }
        }
        return Ok(());
    }
    for colour in 1..=c.m {
        *nodes += 1;
        if *nodes > guard {
            return Err(Error::resource("fan census DFS", format!("> {guard} nodes"), guard));
        }
        cur.push(colour);
        let p = cur.len() - 1;
        let span = c.k - 1;
        let closes = (1..=p / span).any(|r| (1..=span).all(|j| cur[p - j * r] == colour));
        if !closes {
            census_dfs(c, cur, nodes, guard)?;
        }
        cur.pop();
    }
    Ok(())
}
