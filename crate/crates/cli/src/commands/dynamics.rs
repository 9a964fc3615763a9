use super::{by_mode, close, Ctx};
use crate::args::{to_ratio, Ergodic, Recurrence, SystemArgs};
use crate::report::Outcome;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde_json::json;
use szlab::dynamics::{cond_exp, ergodic_average, invariant_factor, l2_norm_sq, multi_recurrence_average, FiniteSystem};
use szlab::scalar::to_json;
use szlab::seed::{self, streams};
use szlab::{Error, Result, Scalar};

/// Direct (orbit-walking) recomputation of 𝔼_{1≤r≤N}, only below this much work.
const DIRECT_WORK: f64 = 5e7;

fn load(a: &SystemArgs, seed_: u64) -> Result<(FiniteSystem, Vec<BigRational>, BigUint)> {
    let sys = match (&a.cycle_type, a.random_states) {
        (Some(ct), _) => FiniteSystem::from_cycle_type(ct)?,
        (None, Some(n)) => FiniteSystem::random(n, seed_)?,
        (None, None) => unreachable!("clap requires a system"),
    };
    let f: Vec<BigRational> = match &a.f {
        Some(v) if v.len() != sys.len() => {
            return Err(Error::ShapeMismatch(format!("{} function values for {} states", v.len(), sys.len())));
        }
        Some(v) => v.iter().map(|s| to_ratio(s)).collect(),
        None => {
            let mut rng = seed::rng(seed_, streams::KERNEL);
            (0..sys.len()).map(|_| BigRational::new(rng.gen_range(0..=4).into(), 4.into())).collect()
        }
    };
    let length = match &a.length {
        Some(s) => s.parse().map_err(|_| Error::InvalidArgument(format!("bad length {s}")))?,
        None => sys.global_period(),
    };
    if length.is_zero() {
        return Err(Error::InvalidArgument("averaging length must be positive".into()));
    }
    Ok((sys, f, length))
}

/// T^s x by walking each orbit once.
struct Orbits {
    cycle: Vec<Vec<usize>>,
    at: Vec<(usize, usize)>,
}

impl Orbits {
    fn new(sys: &FiniteSystem) -> Self {
        let t = sys.shift();
        let mut at = vec![(usize::MAX, 0); t.len()];
        let mut cycle = Vec::new();
        for s in 0..t.len() {
            if at[s].0 != usize::MAX {
                continue;
            }
            let mut c = vec![s];
            at[s] = (cycle.len(), 0);
            let mut x = t[s];
            while x != s {
                at[x] = (cycle.len(), c.len());
                c.push(x);
                x = t[x];
            }
            cycle.push(c);
        }
        Orbits { cycle, at }
    }

    fn step(&self, x: usize, s: u64) -> usize {
        let (c, i) = self.at[x];
        let c = &self.cycle[c];
        c[((i as u64 + s) % c.len() as u64) as usize]
    }
}

fn vec_json<S: Scalar>(v: &[S]) -> serde_json::Value {
    json!(v.iter().map(to_json).collect::<Vec<_>>())
}

pub fn ergodic(a: &Ergodic, ctx: &Ctx) -> Result<Outcome> {
    let (sys, f, n) = load(&a.system, ctx.seed)?;
    by_mode!(ctx, ergodic_with(&sys, &f, &n))
}

fn ergodic_with<S: Scalar>(sys: &FiniteSystem, f: &[BigRational], n: &BigUint) -> Result<Outcome> {
    let f: Vec<S> = f.iter().map(S::from_ratio).collect();
    let period = sys.global_period();
    let avg = ergodic_average(&f, sys, n)?;
    let proj = cond_exp(&f, &invariant_factor(sys), sys)?;
    let diff = |u: &[S], v: &[S]| u.iter().zip(v).map(|(a, b)| a.clone() - b.clone()).collect::<Vec<S>>();
    let dist = l2_norm_sq(&diff(&avg, &proj), sys);
    let mut out = Outcome::new(json!({
        "states": sys.len(),
        "orbits": sys.orbits().len(),
        "global_period": period.to_string(),
        "length": n.to_string(),
        "average": vec_json(&avg),
        "invariant_projection": vec_json(&proj),
        "distance_sq": to_json(&dist),
    }));
    let resid = diff(&f, &proj);
    let pyth = l2_norm_sq(&proj, sys) + l2_norm_sq(&resid, sys);
    out.check("pythagoras", close(&l2_norm_sq(&f, sys), &pyth));
    // on the orbit means the ergodic average is constant, so at any multiple
    // of the period it equals the projection
    if (n % &period).is_zero() {
        out.check("period_multiple_hits_projection", avg.iter().zip(&proj).all(|(a, b)| close(a, b)));
    }
    if let Some(len) = n.to_u64().filter(|&l| l as f64 * sys.len() as f64 <= DIRECT_WORK) {
        let orb = Orbits::new(sys);
        let nn = S::from_u64(len).unwrap_or_else(S::one);
        let direct: Vec<S> = (0..sys.len())
            .map(|x| (1..=len).fold(S::zero(), |acc, s| acc + f[orb.step(x, s)].clone()) / nn.clone())
            .collect();
        out.check("direct_average", direct.iter().zip(&avg).all(|(a, b)| close(a, b)));
    }
    Ok(out)
}

pub fn recurrence(a: &Recurrence, ctx: &Ctx) -> Result<Outcome> {
    let (sys, f, n) = load(&a.system, ctx.seed)?;
    by_mode!(ctx, recurrence_with(&sys, &f, a.k, &n))
}

fn recurrence_with<S: Scalar>(sys: &FiniteSystem, f: &[BigRational], k: usize, n: &BigUint) -> Result<Outcome> {
    let fs: Vec<S> = f.iter().map(S::from_ratio).collect();
    let value = multi_recurrence_average(&fs, sys, k, n)?;
    let period = sys.global_period();
    let mut out = Outcome::new(json!({
        "states": sys.len(),
        "k": k,
        "global_period": period.to_string(),
        "length": n.to_string(),
        "average": to_json(&value),
    }));
    let nonneg = f.iter().all(|v| *v >= BigRational::zero());
    let positive_mass = f.iter().any(|v| *v > BigRational::zero());
    if nonneg && positive_mass && (n % &period).is_zero() {
        out.check("positive_at_period", value > S::zero());
    }
    if let Some(len) = n.to_u64().filter(|&l| l as f64 * (sys.len() * k) as f64 <= DIRECT_WORK) {
        let orb = Orbits::new(sys);
        let w: Vec<S> = sys.weights();
        let mut total = S::zero();
        for r in 1..=len {
            for x in 0..sys.len() {
                let prod = (0..k as u64).fold(w[x].clone(), |acc, j| acc * fs[orb.step(x, j * r)].clone());
                total = total + prod;
            }
        }
        let direct = total / S::from_u64(len).unwrap_or_else(S::one);
        out.check("direct_sum", close(&direct, &value));
    }
    Ok(out)
}
