//! Independent witness checkers. Deliberately written from the definitions
//! and sharing nothing with the searches.

use super::cube::{CubeColouring, Subspace};
use super::Colouring;

fn colour(c: &Colouring, x: i64) -> Option<u32> {
    (x >= 1 && x as usize <= c.colours().len()).then(|| c.colours()[x as usize - 1])
}

pub fn is_mono_ap(c: &Colouring, k: usize, a: usize, r: usize) -> bool {
    if r == 0 {
        return false;
    }
    let cols: Vec<Option<u32>> = (0..k).map(|j| colour(c, (a + j * r) as i64)).collect();
    cols.iter().all(|x| x.is_some() && *x == cols[0])
}

/// No monochromatic k-AP anywhere, by brute force over all (a, r).
pub fn avoids_mono_ap(c: &Colouring, k: usize) -> bool {
    let n = c.colours().len();
    !(1..=n).any(|a| (1..=n).any(|r| is_mono_ap(c, k, a, r)))
}

pub fn is_polychromatic_fan(c: &Colouring, base: usize, k: usize, increments: &[usize]) -> bool {
    let Some(c0) = colour(c, base as i64) else { return false };
    let mut seen = vec![c0];
    for &r in increments {
        if r == 0 {
            return false;
        }
        let spoke: Vec<Option<u32>> = (1..k).map(|j| colour(c, (base + j * r) as i64)).collect();
        match spoke.first().copied().flatten() {
            Some(ci) if spoke.iter().all(|x| *x == Some(ci)) && !seen.contains(&ci) => seen.push(ci),
            _ => return false,
        }
    }
    true
}

pub fn is_schur_triple(c: &Colouring, x: usize, y: usize) -> bool {
    match (colour(c, x as i64), colour(c, y as i64), colour(c, (x + y) as i64)) {
        (Some(a), Some(b), Some(s)) => a == b && b == s,
        _ => false,
    }
}

/// True iff every point of the subspace keeps its colour when any one of its
/// wildcard values is exchanged between the top two axis values.
pub fn is_weakly_monochromatic(c: &CubeColouring, s: &Subspace) -> bool {
    let l = c.axis_len();
    let total = l.pow(s.dim as u32);
    let colour_of = |t: &[usize]| c.colour(&s.point(t));
    for idx in 0..total {
        let t: Vec<usize> = (0..s.dim).map(|b| idx / l.pow(b as u32) % l).collect();
        for b in 0..s.dim {
            if t[b] == l - 1 {
                let mut u = t.clone();
                u[b] = l - 2;
                if colour_of(&t) != colour_of(&u) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_monochromatic_subspace(c: &CubeColouring, s: &Subspace) -> bool {
    let l = c.axis_len();
    let total = l.pow(s.dim as u32);
    let cols: Vec<u32> = (0..total)
        .map(|idx| {
            let t: Vec<usize> = (0..s.dim).map(|b| idx / l.pow(b as u32) % l).collect();
            c.colour(&s.point(&t))
        })
        .collect();
    cols.iter().all(|&x| x == cols[0])
}
