//! Structured and extremal sets: Behrend, Bohr, random sets, and the
//! quadratic-recurrence search.

use crate::error::{Error, Result};
use crate::progressions::ResidueSet;
use crate::scalar::ratio_from_f64;
use crate::seed::{self, streams};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BehrendParams {
    pub n: u64,
    pub d: u32,
    pub m: u64,
    pub r: u64,
    /// |A_R| for the chosen R.
    pub size: usize,
    /// The construction's guaranteed density scale 10^{-d}/(dM²).
    pub density_lower_bound: f64,
}

/// Base-M digits of n (lowest d of them), or None if any exceeds ⌊M/10⌋.
fn small_digits(mut n: u64, d: u32, m: u64) -> Option<u64> {
    let cap = m / 10;
    let mut sq = 0;
    for _ in 0..d {
        let x = n % m;
        if x > cap {
            return None;
        }
        sq += x * x;
        n /= m;
    }
    Some(sq)
}

/// A_R = φ⁻¹(B_R) ∩ [1, N] where φ reads the lowest d base-M digits and B_R
/// is the digit sphere x₁² + … + x_d² = R inside {0, …, ⌊M/10⌋}^d.
/// Without an explicit R, the largest shell wins (smallest R on ties).
pub fn behrend_set(n: u64, d: u32, m: u64, r: Option<u64>) -> Result<(ResidueSet, BehrendParams)> {
    if m < 10 {
        return Err(Error::invalid(format!("base M = {m} < 10 leaves no admissible digits")));
    }
    if d == 0 {
        return Err(Error::invalid("dimension d must be at least 1"));
    }
    let span = (m as u128).checked_pow(d).filter(|&s| s <= n as u128);
    if span.is_none() {
        return Err(Error::invalid(format!("M^d = {m}^{d} exceeds N = {n}")));
    }
    let r_max = d as u64 * (m / 10) * (m / 10);
    let mut shells = vec![0usize; r_max as usize + 1];
    for x in 1..=n {
        if let Some(s) = small_digits(x, d, m) {
            shells[s as usize] += 1;
        }
    }
    let r = match r {
        Some(r) => r,
        None => (1..=r_max)
            .max_by(|&a, &b| shells[a as usize].cmp(&shells[b as usize]).then(b.cmp(&a)))
            .unwrap_or(0),
    };
    let elements: Vec<i64> = (1..=n).filter(|&x| small_digits(x, d, m) == Some(r)).map(|x| x as i64).collect();
    let params = BehrendParams {
        n,
        d,
        m,
        r,
        size: elements.len(),
        density_lower_bound: 10f64.powi(-(d as i32)) / (d as f64 * (m * m) as f64),
    };
    Ok((ResidueSet::interval(1, n as i64, elements)?, params))
}

pub fn default_behrend_constant() -> f64 {
    1.0 / (2.0 * std::f64::consts::LN_10)
}

/// d = ⌈c·ln(1/δ)⌉ and M = ⌈δ^{−c}⌉, both floored (at 1 and 10) so the digit
/// range is nonempty.
pub fn behrend_auto(n: u64, delta: f64, c: Option<f64>) -> Result<(ResidueSet, BehrendParams)> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("δ = {delta} must lie in (0, 1/2)")));
    }
    let c = c.unwrap_or_else(default_behrend_constant);
    if !(c > 0.0) {
        return Err(Error::invalid("constant c must be positive"));
    }
    let d = ((c * (1.0 / delta).ln()).ceil() as u32).max(1);
    let m = (delta.powf(-c).ceil() as u64).max(10);
    behrend_set(n, d, m, None)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Frequency {
    Rational(BigRational),
    Real(f64),
}

/// Serialized as `{"rational": "p/q"}` or `{"real": x}`.
impl Serialize for Frequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(1))?;
        match self {
            Frequency::Rational(r) => m.serialize_entry("rational", &r.to_string())?,
            Frequency::Real(x) => m.serialize_entry("real", x)?,
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for Frequency {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(rename_all = "snake_case", deny_unknown_fields)]
        enum Repr {
            Rational(String),
            Real(f64),
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Rational(s) => Frequency::Rational(
                crate::scalar::parse_ratio(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}")))?,
            ),
            Repr::Real(x) => Frequency::Real(x),
        })
    }
}

pub const BOHR_BAND: f64 = 1e-12;

/// ‖x‖_{ℝ/ℤ} for an exact rational.
pub fn circle_dist(x: &BigRational) -> BigRational {
    let frac = x - x.floor();
    let other = BigRational::one() - &frac;
    if frac < other {
        frac
    } else {
        other
    }
}

/// ‖n·α‖ in double precision; the product's rounding error is recovered
/// with an FMA so the result is accurate to a few ulps of 1.
pub fn circle_dist_f64(n: f64, alpha: f64) -> f64 {
    let p = n * alpha;
    let err = n.mul_add(alpha, -p);
    let mut frac = (p - p.floor()) + err;
    frac -= frac.floor();
    frac.min(1.0 - frac)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrSet {
    pub set: ResidueSet,
    /// Points within the guard band of the threshold (irrational α only);
    /// excluded from `set`.
    pub boundary: Vec<i64>,
}

/// {n ∈ [1, N] : ‖nα‖ ≤ θ}.
pub fn bohr_set(alpha: &Frequency, theta: &BigRational, n: u64) -> Result<BohrSet> {
    let half = BigRational::new(1.into(), 2.into());
    if !(theta.is_positive() && *theta <= half) {
        return Err(Error::invalid(format!("θ = {theta} must lie in (0, 1/2]")));
    }
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let mut members = Vec::new();
    let mut boundary = Vec::new();
    match alpha {
        Frequency::Rational(a) => {
            for x in 1..=n as i64 {
                if circle_dist(&(a * BigInt::from(x))) <= *theta {
                    members.push(x);
                }
            }
        }
        Frequency::Real(a) => {
            let t = theta.to_f64().unwrap_or(0.5);
            for x in 1..=n as i64 {
                let dist = circle_dist_f64(x as f64, *a);
                if (dist - t).abs() <= BOHR_BAND {
                    boundary.push(x);
                } else if dist < t {
                    members.push(x);
                }
            }
        }
    }
    Ok(BohrSet { set: ResidueSet::interval(1, n as i64, members)?, boundary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QrecWitness {
    pub r: u64,
    pub distance: f64,
    /// αn²/2 − 2α(n+r)²/2 + α(n+2r)²/2 = αr², checked exactly for n in 0..8.
    pub identity_verified: bool,
}

/// Smallest r ≥ 1 with ‖αr²‖ < ε, or None up to `r_max`.
pub fn quadratic_recurrence_search(alpha: &Frequency, eps: f64, r_max: u64) -> Result<Option<QrecWitness>> {
    if !(eps > 0.0) {
        return Err(Error::invalid("ε must be positive"));
    }
    let exact_alpha = match alpha {
        Frequency::Rational(a) => a.clone(),
        Frequency::Real(a) => ratio_from_f64(*a),
    };
    let eps_q = ratio_from_f64(eps);
    for r in 1..=r_max {
        let (hit, distance) = match alpha {
            Frequency::Rational(a) => {
                let d = circle_dist(&(a * BigInt::from(r) * BigInt::from(r)));
                (d < eps_q, d.to_f64().unwrap_or(0.0))
            }
            Frequency::Real(a) => {
                let d = circle_dist_f64((r as f64) * (r as f64), *a);
                (d < eps, d)
            }
        };
        if hit {
            return Ok(Some(QrecWitness { r, distance, identity_verified: quadratic_identity(&exact_alpha, r) }));
        }
    }
    Ok(None)
}

fn quadratic_identity(alpha: &BigRational, r: u64) -> bool {
    let half = BigRational::new(1.into(), 2.into());
    let r = BigInt::from(r);
    (0..8i64).all(|n| {
        let n = BigInt::from(n);
        let sq = |x: BigInt| BigRational::from_integer(&x * &x);
        let lhs = alpha * &half * sq(n.clone()) - alpha * sq(&n + &r) + alpha * &half * sq(&n + &r * 2);
        lhs == alpha * sq(r.clone())
    })
}

/// Each residue of ℤ/Nℤ kept independently with probability `density`.
pub fn random_set(n: u64, density: f64, seed: u64) -> Result<ResidueSet> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::invalid(format!("density {density} outside [0, 1]")));
    }
    let mut rng = seed::rng(seed, streams::RANDOM_SET);
    let elements: Vec<i64> = (0..n as i64).filter(|_| rng.gen::<f64>() < density).collect();
    ResidueSet::cyclic(n.max(1), elements)
}
