//! Hales-Jewett cubes, subspaces, weak monochromaticity, and Shelah's
//! pigeonhole step.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How many values each axis of a "length k" cube takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indexing {
    /// n ∈ {0, …, k}: k+1 values, swap k−1 ↔ k.
    Inclusive,
    /// n ∈ {0, …, k−1}: k values, swap k−2 ↔ k−1.
    HalfOpen,
}

impl Indexing {
    pub fn axis_len(self, k: usize) -> usize {
        match self {
            Indexing::Inclusive => k + 1,
            Indexing::HalfOpen => k,
        }
    }
}

/// An integer cube a + Σ nᵢvᵢ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub a: i64,
    pub k: usize,
    pub generators: Vec<i64>,
    pub indexing: Indexing,
}

impl Cube {
    pub fn new(a: i64, k: usize, generators: Vec<i64>, indexing: Indexing) -> Result<Self> {
        if generators.iter().any(|&v| v <= 0) {
            return Err(Error::invalid("cube generators must be positive"));
        }
        let cube = Cube { a, k, generators, indexing };
        let mut els = cube.elements();
        els.sort_unstable();
        if els.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("cube elements are not distinct"));
        }
        Ok(cube)
    }

    /// The interval {1, …, L^d} as a proper cube with generators L^i.
    pub fn interval(k: usize, d: usize, indexing: Indexing) -> Self {
        let l = indexing.axis_len(k) as i64;
        Cube { a: 1, k, generators: (0..d as u32).map(|i| l.pow(i)).collect(), indexing }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn element(&self, n: &[usize]) -> i64 {
        self.a + n.iter().zip(&self.generators).map(|(&x, &v)| x as i64 * v).sum::<i64>()
    }

    pub fn elements(&self) -> Vec<i64> {
        let l = self.indexing.axis_len(self.k);
        let d = self.dim();
        (0..l.pow(d as u32)).map(|idx| self.element(&digits(idx, l, d))).collect()
    }
}

fn digits(mut idx: usize, l: usize, d: usize) -> Vec<usize> {
    (0..d)
        .map(|_| {
            let x = idx % l;
            idx /= l;
            x
        })
        .collect()
}

/// A colouring of the index grid [0, L)^d of a cube, colours 1..=m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeColouring {
    pub d: usize,
    pub k: usize,
    pub m: u32,
    pub indexing: Indexing,
    /// Mixed-radix order, coordinate 0 least significant.
    pub colours: Vec<u32>,
}

impl CubeColouring {
    pub fn new(d: usize, k: usize, m: u32, indexing: Indexing, colours: Vec<u32>) -> Result<Self> {
        let l = indexing.axis_len(k);
        if l < 2 {
            return Err(Error::invalid("cube axes need at least two values"));
        }
        let expected = l.checked_pow(d as u32).ok_or_else(|| Error::invalid("cube too large"))?;
        if colours.len() != expected {
            return Err(Error::ShapeMismatch(format!("{} colours for a cube with {expected} points", colours.len())));
        }
        if m == 0 || colours.iter().any(|&c| c == 0 || c > m) {
            return Err(Error::invalid(format!("colours must lie in 1..={m}")));
        }
        Ok(CubeColouring { d, k, m, indexing, colours })
    }

    /// Colour an integer cube through an integer colouring function.
    pub fn from_fn(d: usize, k: usize, m: u32, indexing: Indexing, f: impl Fn(&[usize]) -> u32) -> Result<Self> {
        let l = indexing.axis_len(k);
        let colours = (0..l.pow(d as u32)).map(|i| f(&digits(i, l, d))).collect();
        Self::new(d, k, m, indexing, colours)
    }

    pub fn axis_len(&self) -> usize {
        self.indexing.axis_len(self.k)
    }

    /// The two top values whose swap defines weak monochromaticity.
    pub fn swap_pair(&self) -> (usize, usize) {
        let top = self.axis_len() - 1;
        (top - 1, top)
    }

    pub fn colour(&self, n: &[usize]) -> u32 {
        let l = self.axis_len();
        let idx = n.iter().rev().fold(0, |acc, &x| acc * l + x);
        self.colours[idx]
    }
}

/// Per-coordinate role in a subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    Fixed(usize),
    /// Moves with wildcard block b: merging the generators of a block gives
    /// one generator of the subcube.
    Wild(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    pub coords: Vec<Coord>,
    pub dim: usize,
}

impl Subspace {
    pub fn point(&self, t: &[usize]) -> Vec<usize> {
        self.coords
            .iter()
            .map(|c| match *c {
                Coord::Fixed(v) => v,
                Coord::Wild(b) => t[b],
            })
            .collect()
    }

    /// Subcube generators Σ_{i ∈ block} vᵢ and base a + Σ fixed·vᵢ.
    pub fn realize(&self, cube: &Cube) -> (i64, Vec<i64>) {
        let mut base = cube.a;
        let mut gens = vec![0; self.dim];
        for (c, &v) in self.coords.iter().zip(&cube.generators) {
            match *c {
                Coord::Fixed(x) => base += x as i64 * v,
                Coord::Wild(b) => gens[b] += v,
            }
        }
        (base, gens)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubcubeKind {
    Monochromatic,
    /// Unchanged colour under swapping any wildcard value top−1 ↔ top.
    WeaklyMonochromatic,
}

pub const DEFAULT_CUBE_GUARD: u64 = 50_000_000;

/// Exhaustive search over j-dimensional subspaces (coordinates fixed or
/// assigned to one of j wildcard blocks, blocks first appearing in order).
pub fn hj_subcube_search(c: &CubeColouring, j: usize, kind: SubcubeKind, guard: u64) -> Result<Option<Subspace>> {
    if j == 0 || j > c.d {
        return Err(Error::invalid(format!("subcube dimension j = {j} must lie in 1..={}", c.d)));
    }
    let l = c.axis_len();
    let work = ((l + j) as f64).powi(c.d as i32) * (l as f64).powi(j as i32);
    if work > guard as f64 {
        return Err(Error::resource("Hales-Jewett subspace enumeration", format!("{work:.3e} point checks"), guard));
    }
    let mut coords = Vec::with_capacity(c.d);
    Ok(search(c, j, kind, &mut coords, 0))
}

fn search(c: &CubeColouring, j: usize, kind: SubcubeKind, coords: &mut Vec<Coord>, used: usize) -> Option<Subspace> {
    if coords.len() == c.d {
        if used < j {
            return None;
        }
        let s = Subspace { coords: coords.clone(), dim: j };
        return qualifies(c, &s, kind).then_some(s);
    }
    // Remaining coordinates must still be able to open the unused blocks.
    if c.d - coords.len() < j - used {
        return None;
    }
    for v in 0..c.axis_len() {
        coords.push(Coord::Fixed(v));
        if let Some(s) = search(c, j, kind, coords, used) {
            return Some(s);
        }
        coords.pop();
    }
    for b in 0..=used.min(j - 1) {
        coords.push(Coord::Wild(b));
        if let Some(s) = search(c, j, kind, coords, used.max(b + 1)) {
            return Some(s);
        }
        coords.pop();
    }
    None
}

fn qualifies(c: &CubeColouring, s: &Subspace, kind: SubcubeKind) -> bool {
    let l = c.axis_len();
    let (lo, hi) = c.swap_pair();
    let pts = l.pow(s.dim as u32);
    match kind {
        SubcubeKind::Monochromatic => {
            let first = c.colour(&s.point(&vec![0; s.dim]));
            (0..pts).all(|i| c.colour(&s.point(&digits(i, l, s.dim))) == first)
        }
        SubcubeKind::WeaklyMonochromatic => (0..pts).all(|i| {
            let t = digits(i, l, s.dim);
            let col = c.colour(&s.point(&t));
            (0..s.dim).all(|b| {
                let mut u = t.clone();
                u[b] = match t[b] {
                    x if x == lo => hi,
                    x if x == hi => lo,
                    _ => return true,
                };
                c.colour(&s.point(&u)) == col
            })
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShelahWitness {
    pub s: usize,
    pub s_prime: usize,
    pub subspace: Subspace,
}

/// Pigeonhole over the m+1 staircase points: coordinates 1..=s at top−1,
/// s+1..=m+1 at top, the rest at 0. Two share a colour; merging coordinates
/// s+1..=s′ into one wildcard gives a 1-weakly monochromatic line.
pub fn shelah_step(c: &CubeColouring) -> Result<ShelahWitness> {
    let m = c.m as usize;
    if c.d < m + 1 {
        return Err(Error::invalid(format!("Shelah step needs d ≥ m+1, got d = {}, m = {m}", c.d)));
    }
    let (lo, hi) = c.swap_pair();
    let stair = |s: usize| -> Vec<usize> {
        (0..c.d)
            .map(|i| match i {
                i if i < s => lo,
                i if i < m + 1 => hi,
                _ => 0,
            })
            .collect()
    };
    let cols: Vec<u32> = (1..=m + 1).map(|s| c.colour(&stair(s))).collect();
    for s in 1..=m + 1 {
        for s2 in s + 1..=m + 1 {
            if cols[s - 1] == cols[s2 - 1] {
                let coords = (0..c.d)
                    .map(|i| match i {
                        i if i < s => Coord::Fixed(lo),
                        i if i < s2 => Coord::Wild(0),
                        i if i < m + 1 => Coord::Fixed(hi),
                        _ => Coord::Fixed(0),
                    })
                    .collect();
                return Ok(ShelahWitness { s, s_prime: s2, subspace: Subspace { coords, dim: 1 } });
            }
        }
    }
    unreachable!("m+1 staircase points in m colours always collide")
}
