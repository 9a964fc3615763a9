use super::{by_mode, Ctx};
use crate::args::{to_ratio, Behrend, Bohr, CountAps, Qrec, Roth};
use crate::report::Outcome;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;
use std::collections::HashSet;
use szlab::constructions::{behrend_auto, behrend_set, bohr_set, quadratic_recurrence_search, random_set, Frequency};
use szlab::progressions::Ambient;
use szlab::regularity::roth_pipeline;
use szlab::scalar::to_json;
use szlab::{count_progressions, ResidueSet, Result, Scalar};

/// Nested-loop recounts are skipped above this ambient size.
const NAIVE_LIMIT: u64 = 2000;
/// Pairwise passes over a set are skipped above this many pairs.
const PAIR_LIMIT: u64 = 50_000_000;
/// Element lists are echoed up to this size.
const LIST_LIMIT: usize = 1000;

fn build_set(n: u64, set: &Option<Vec<i64>>, density: Option<f64>, interval: bool, seed: u64) -> Result<ResidueSet> {
    let shift = interval as i64;
    let elements: Vec<i64> = match (set, density) {
        (Some(s), _) => s.clone(),
        (None, Some(d)) => random_set(n, d, seed)?.elements().iter().map(|x| x + shift).collect(),
        (None, None) => (shift..n as i64 + shift).collect(),
    };
    if interval {
        ResidueSet::interval(1, n as i64, elements)
    } else {
        ResidueSet::cyclic(n, elements)
    }
}

/// Every (start, step) pair, stepping through the ambient space directly.
fn naive_count(a: &ResidueSet, k: usize) -> u64 {
    let members: HashSet<i64> = a.elements().iter().copied().collect();
    let mut total = 0;
    match a.ambient() {
        Ambient::Cyclic { modulus } => {
            let m = modulus as i64;
            for x in 0..m {
                for r in 0..m {
                    total += (0..k as i64).all(|j| members.contains(&((x + j * r) % m))) as u64;
                }
            }
        }
        Ambient::Interval { lo, hi } => {
            let len = hi - lo + 1;
            for x in lo..=hi {
                for r in -(len - 1)..len {
                    total += (0..k as i64).all(|j| members.contains(&(x + j * r))) as u64;
                }
            }
        }
    }
    total
}

fn echo(a: &ResidueSet) -> serde_json::Value {
    if a.len() <= LIST_LIMIT {
        json!(a.elements())
    } else {
        serde_json::Value::Null
    }
}

pub fn count_aps(a: &CountAps, ctx: &Ctx) -> Result<Outcome> {
    let set = build_set(a.n, &a.set, a.density, a.interval, ctx.seed)?;
    let recount = a.n <= NAIVE_LIMIT;
    let mut rows = Vec::new();
    let mut agree = true;
    for &k in &a.k {
        let c = count_progressions(&set, k)?;
        if recount {
            agree &= naive_count(&set, k) == c.total_ordered;
        }
        rows.push(json!({"k": k, "total_ordered": c.total_ordered, "trivial": c.trivial, "nontrivial": c.nontrivial}));
    }
    let mut out = Outcome::new(json!({
        "ambient": set.ambient(),
        "size": set.len(),
        "density": set.density().to_string(),
        "elements": echo(&set),
        "counts": rows,
    }));
    if recount {
        out.check("nested_loop_count", agree);
    } else {
        out.diagnostics.push(format!("nested-loop recount skipped above N = {NAIVE_LIMIT}"));
    }
    out.rows = Some(rows);
    Ok(out)
}

/// Lowest d base-M digits all ≤ ⌊M/10⌋, returning their squared norm.
fn digit_norm(mut x: u64, d: u32, m: u64) -> Option<u64> {
    let mut sq = 0;
    for _ in 0..d {
        let digit = x % m;
        if digit > m / 10 {
            return None;
        }
        sq += digit * digit;
        x /= m;
    }
    Some(sq)
}

pub fn behrend(a: &Behrend) -> Result<Outcome> {
    let (set, params) = match a.delta {
        Some(delta) => behrend_auto(a.n, delta, a.c)?,
        None => behrend_set(a.n, a.d.unwrap_or(1), a.m.unwrap_or(10), a.r)?,
    };
    let els = set.elements();
    let in_sphere = els.iter().all(|&x| x >= 1 && x as u64 <= a.n && digit_norm(x as u64, params.d, params.m) == Some(params.r));
    let complete = (1..=a.n).filter(|&x| digit_norm(x, params.d, params.m) == Some(params.r)).count() == els.len();
    // both the count and the brute-force step check are quadratic in |A|
    let small = (els.len() as u64).pow(2) <= PAIR_LIMIT;
    let nontrivial = if small { Some(count_progressions(&set, 3)?.nontrivial / 2) } else { None };
    let mut out = Outcome::new(json!({
        "params": params,
        "size": els.len(),
        "density": els.len() as f64 / a.n as f64,
        "nontrivial_3aps": nontrivial,
        "elements": if a.elements { json!(els) } else { serde_json::Value::Null },
    }));
    out.check("digit_sphere", in_sphere && complete);
    // no digit carries, so a 3AP inside A repeats its digits: the step is a multiple of M^d
    if small {
        let members: HashSet<i64> = els.iter().copied().collect();
        let block = (params.m as i64).pow(params.d);
        let ok = els.iter().all(|&x| els.iter().filter(|&&y| y > x).all(|&y| !members.contains(&(2 * y - x)) || (y - x) % block == 0));
        out.check("steps_are_block_multiples", ok);
    } else {
        out.diagnostics.push(format!("3AP count and step check skipped above {PAIR_LIMIT} pairs"));
    }
    Ok(out)
}

fn frequency(alpha: &Option<String>, alpha_real: Option<f64>) -> Frequency {
    match alpha {
        Some(s) => Frequency::Rational(to_ratio(s)),
        None => Frequency::Real(alpha_real.unwrap_or(0.0)),
    }
}

fn circle(x: &BigRational) -> BigRational {
    let f = x - x.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

pub fn bohr(a: &Bohr) -> Result<Outcome> {
    let alpha = frequency(&a.alpha, a.alpha_real);
    let theta = to_ratio(&a.theta);
    let b = bohr_set(&alpha, &theta, a.n)?;
    let mut out = Outcome::new(json!({
        "alpha": alpha,
        "size": b.set.len(),
        "density": b.set.density().to_string(),
        "boundary": b.boundary,
        "elements": echo(&b.set),
    }));
    let ok = match &alpha {
        Frequency::Rational(q) => (1..=a.n as i64).all(|x| (circle(&(q * BigInt::from(x))) <= theta) == b.set.contains(x)),
        Frequency::Real(r) => {
            let t: f64 = num_traits::ToPrimitive::to_f64(&theta).unwrap_or(0.5);
            (1..=a.n as i64).filter(|x| !b.boundary.contains(x)).all(|x| {
                let f = (x as f64 * r).rem_euclid(1.0);
                let d = f.min(1.0 - f);
                (d - t).abs() < 1e-9 || (d < t) == b.set.contains(x)
            })
        }
    };
    out.check("membership", ok);
    Ok(out)
}

pub fn qrec(a: &Qrec) -> Result<Outcome> {
    let alpha = frequency(&a.alpha, a.alpha_real);
    let w = quadratic_recurrence_search(&alpha, a.eps, a.r_max)?;
    let exact = match &alpha {
        Frequency::Rational(q) => q.clone(),
        Frequency::Real(r) => BigRational::from_float(*r).unwrap_or_else(BigRational::zero),
    };
    let eps = BigRational::from_float(a.eps).unwrap_or_else(BigRational::zero);
    // real α is searched in double precision: allow a few ulps at the threshold
    let slack = match alpha {
        Frequency::Rational(_) => BigRational::zero(),
        Frequency::Real(_) => BigRational::new(1.into(), BigInt::from(10).pow(12)),
    };
    let dist = |r: u64| circle(&(&exact * BigInt::from(r) * BigInt::from(r)));
    let mut out = Outcome::new(json!({"alpha": alpha, "witness": w}));
    const RECHECK: u64 = 1_000_000;
    match &w {
        Some(w) => {
            out.check("witness_distance", dist(w.r) < &eps + &slack);
            out.check("quadratic_identity", w.identity_verified);
            if w.r <= RECHECK {
                out.check("minimal", (1..w.r).all(|r| dist(r) >= &eps - &slack));
            }
        }
        None if a.r_max <= RECHECK => {
            out.check("none_below_r_max", (1..=a.r_max).all(|r| dist(r) >= &eps - &slack));
        }
        None => {}
    }
    Ok(out)
}

pub fn roth(a: &Roth, ctx: &Ctx) -> Result<Outcome> {
    let set = build_set(a.n, &a.set, a.density, false, ctx.seed)?;
    by_mode!(ctx, roth_with(&set))
}

fn roth_with<S: Scalar>(set: &ResidueSet) -> Result<Outcome> {
    let rep = roth_pipeline::<S>(set)?;
    let n = rep.modulus;
    let mut out = Outcome::new(json!({
        "modulus": n,
        "size": set.len(),
        "lambda3": to_json(&rep.lambda3),
        "ordered_count": rep.ordered_count,
        "nontrivial": rep.ordered_count - set.len() as u64,
    }));
    out.check("lambda3_equals_count_over_n2", rep.identity_holds);
    if n <= NAIVE_LIMIT {
        out.check("nested_loop_count", naive_count(set, 3) == rep.ordered_count);
    }
    if n <= 60 {
        // the triangle form summed over X × Y × Z directly
        let (f, g, h) = (&rep.f, &rep.g, &rep.h);
        let mut sum = S::zero();
        for x in 0..n as usize {
            for y in 0..n as usize {
                for z in 0..n as usize {
                    sum = sum + f.get(x, y).clone() * g.get(y, z).clone() * h.get(z, x).clone();
                }
            }
        }
        let n3 = S::from_u64(n * n * n).unwrap_or_else(S::one);
        out.check("triple_sum", super::close(&(sum / n3), &rep.lambda3));
    }
    if rep.lambda3.is_negative() {
        out.check("nonnegative", false);
    }
    Ok(out)
}
