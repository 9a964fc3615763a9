//! Colouring theorems at desk scale: van der Waerden, fans, Schur,
//! Hales-Jewett. Searches return lexicographically least witnesses; every
//! witness can be rechecked by the independent predicates in [`verify`].

mod cube;
mod focusing;
pub mod verify;

pub use cube::{hj_subcube_search, Coord, DEFAULT_CUBE_GUARD, shelah_step, Cube, CubeColouring, Indexing, ShelahWitness, SubcubeKind, Subspace};
pub use focusing::{fan_census, focusing_trace, FanCensus, FocusingTrace, TraceNode};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A colouring of {1, …, N} by colours 1..=m; `colours[i]` is the colour of i+1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    m: u32,
    colours: Vec<u32>,
}

impl Colouring {
    pub fn new(m: u32, colours: Vec<u32>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("need at least one colour"));
        }
        if let Some(c) = colours.iter().find(|&&c| c == 0 || c > m) {
            return Err(Error::invalid(format!("colour {c} outside 1..={m}")));
        }
        Ok(Colouring { m, colours })
    }

    pub fn constant(n: usize) -> Self {
        Colouring { m: 1, colours: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    pub fn num_colours(&self) -> u32 {
        self.m
    }

    /// Colour of the integer `x` ∈ [1, N].
    pub fn at(&self, x: usize) -> u32 {
        self.colours[x - 1]
    }

    pub fn colours(&self) -> &[u32] {
        &self.colours
    }

    /// Base-m digits of `index` (least significant first), shifted to 1..=m.
    pub fn from_index(n: usize, m: u32, mut index: u64) -> Self {
        let colours = (0..n)
            .map(|_| {
                let c = (index % m as u64) as u32 + 1;
                index /= m as u64;
                c
            })
            .collect();
        Colouring { m, colours }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoAp {
    pub a: usize,
    pub r: usize,
    pub colour: u32,
}

/// Smallest (a, then r ≥ 1) with a, a+r, …, a+(k−1)r monochromatic in [1, N].
pub fn find_mono_ap(c: &Colouring, k: usize) -> Result<Option<MonoAp>> {
    if k == 0 {
        return Err(Error::invalid("progression length k must be at least 1"));
    }
    let n = c.len();
    for a in 1..=n {
        let col = c.at(a);
        let mut r = 1;
        while k == 1 || a + (k - 1) * r <= n {
            if (1..k).all(|j| c.at(a + j * r) == col) {
                return Ok(Some(MonoAp { a, r, colour: col }));
            }
            if k == 1 {
                break;
            }
            r += 1;
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub base: usize,
    pub radius: usize,
    /// Strictly increasing spoke increments.
    pub increments: Vec<usize>,
    /// c₀ (base) followed by one colour per spoke.
    pub colours: Vec<u32>,
}

impl Fan {
    pub fn degree(&self) -> usize {
        self.increments.len()
    }
}

/// Lexicographically least polychromatic fan of radius k and degree d: base
/// a and spokes a + [1,k)·rᵢ, each spoke monochromatic, all d+1 colours distinct.
pub fn find_fan(c: &Colouring, k: usize, d: usize) -> Result<Option<Fan>> {
    if k < 2 {
        return Err(Error::invalid("fans need radius k ≥ 2"));
    }
    if d > c.num_colours() as usize {
        return Err(Error::invalid(format!("degree {d} exceeds the {} available colours", c.num_colours())));
    }
    let n = c.len();
    for a in 1..=n {
        let c0 = c.at(a);
        let spokes: Vec<(usize, u32)> = (1..)
            .take_while(|&r| a + (k - 1) * r <= n)
            .filter_map(|r| {
                let col = c.at(a + r);
                ((2..k).all(|j| c.at(a + j * r) == col) && col != c0).then_some((r, col))
            })
            .collect();
        let mut chosen = Vec::with_capacity(d);
        if pick_spokes(&spokes, 0, d, &mut chosen) {
            let mut colours = vec![c0];
            colours.extend(chosen.iter().map(|&i| spokes[i].1));
            return Ok(Some(Fan { base: a, radius: k, increments: chosen.iter().map(|&i| spokes[i].0).collect(), colours }));
        }
    }
    Ok(None)
}

fn pick_spokes(spokes: &[(usize, u32)], from: usize, d: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == d {
        return true;
    }
    for i in from..spokes.len() {
        if chosen.iter().any(|&j| spokes[j].1 == spokes[i].1) {
            continue;
        }
        chosen.push(i);
        if pick_spokes(spokes, i + 1, d, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VdwOutcome {
    /// W(k, m) = w; `certificate` colours [1, w−1] with no monochromatic k-AP.
    Exact { w: usize, certificate: Colouring, nodes: u64 },
    /// Every length up to `limit` admits an avoiding colouring; W > limit.
    LowerBound { limit: usize, witness: Colouring, nodes: u64 },
}

pub const DEFAULT_VDW_GUARD: u64 = 100_000_000;

/// Depth-first search over colourings of [1, N], pruning any prefix that
/// completes a monochromatic k-AP at its last cell. Colour 1 is fixed at
/// position 1 (colour permutation symmetry).
pub fn vdw_number(k: usize, m: u32, n_limit: usize, guard: u64) -> Result<VdwOutcome> {
    if k == 0 || m == 0 {
        return Err(Error::invalid("k and m must be positive"));
    }
    if n_limit == 0 {
        return Err(Error::invalid("search limit must be positive"));
    }
    if k == 1 {
        return Ok(VdwOutcome::Exact { w: 1, certificate: Colouring { m, colours: vec![] }, nodes: 0 });
    }
    let mut state = VdwSearch { k, m, limit: n_limit, guard, nodes: 0, cur: Vec::new(), best: Vec::new() };
    state.dfs()?;
    let nodes = state.nodes;
    let witness = Colouring { m, colours: state.best };
    if witness.len() >= n_limit {
        Ok(VdwOutcome::LowerBound { limit: n_limit, witness, nodes })
    } else {
        Ok(VdwOutcome::Exact { w: witness.len() + 1, certificate: witness, nodes })
    }
}

struct VdwSearch {
    k: usize,
    m: u32,
    limit: usize,
    guard: u64,
    nodes: u64,
    cur: Vec<u32>,
    best: Vec<u32>,
}

impl VdwSearch {
    /// Returns true once the limit depth is reached (search can stop).
    fn dfs(&mut self) -> Result<bool> {
        if self.cur.len() > self.best.len() {
            self.best = self.cur.clone();
        }
        if self.cur.len() >= self.limit {
            return Ok(true);
        }
        let top = if self.cur.is_empty() { 1 } else { self.m };
        for col in 1..=top {
            self.nodes += 1;
            if self.nodes > self.guard {
                return Err(Error::resource("van der Waerden DFS", format!("> {} nodes", self.guard), self.guard));
            }
            self.cur.push(col);
            if !self.closes_ap() && self.dfs()? {
                return Ok(true);
            }
            self.cur.pop();
        }
        Ok(false)
    }

    fn closes_ap(&self) -> bool {
        let p = self.cur.len() - 1;
        let col = self.cur[p];
        let span = self.k - 1;
        (1..=p / span).any(|r| (1..=span).all(|j| self.cur[p - j * r] == col))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchurWitness {
    pub x: usize,
    pub y: usize,
    pub colour: u32,
    /// The monochromatic triangle a < b < c in the Cayley graph on {1, …, N+1}.
    pub triangle: (usize, usize, usize),
}

/// Colours the edge {a, b} of the complete graph on {1, …, N+1} by 𝔠(|b−a|)
/// and returns the least monochromatic triangle, read back as x = b−a, y = c−b.
pub fn schur_witness(c: &Colouring) -> Option<SchurWitness> {
    let v = c.len() + 1;
    let edge = |a: usize, b: usize| c.at(b - a);
    for a in 1..=v {
        for b in a + 1..=v {
            for cc in b + 1..=v {
                let col = edge(a, b);
                if edge(b, cc) == col && edge(a, cc) == col {
                    return Some(SchurWitness { x: b - a, y: cc - b, colour: col, triangle: (a, b, cc) });
                }
            }
        }
    }
    None
}

/// JSON certificate envelope shared by witness searches.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "type")]
    pub kind: String,
    pub parameters: serde_json::Value,
    pub witness: serde_json::Value,
    pub verified: bool,
}
