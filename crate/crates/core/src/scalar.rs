//! Scalar abstraction: every kernel, norm and decomposition is generic over
//! `S: Scalar`, instantiated as `f64` for performance runs and `BigRational`
//! for oracle-grade exact runs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use std::fmt::{Debug, Display};
use std::str::FromStr;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Send + Sync + 'static
{
    /// True for exact arithmetic; lower-bound comparisons then use no slack.
    const EXACT: bool;

    fn from_ratio(r: &BigRational) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_ratio(&BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// ⌊x⌋, saturating.
    fn floor_i64(&self) -> i64 {
        self.to_f64_lossy().floor() as i64
    }

    /// Shrink a lower bound by floating slack (1e-9 relative); identity when exact.
    fn relax(self) -> Self;

    /// Dense row-major product `a (m×k) · b (k×n)`.
    fn matmul(a: &[Self], b: &[Self], m: usize, k: usize, n: usize) -> Vec<Self> {
        let mut c = vec![Self::zero(); m * n];
        for i in 0..m {
            let row = &mut c[i * n..(i + 1) * n];
            for l in 0..k {
                let ail = &a[i * k + l];
                if ail.is_zero() {
                    continue;
                }
                for (j, cij) in row.iter_mut().enumerate() {
                    *cij = cij.clone() + ail.clone() * b[l * n + j].clone();
                }
            }
        }
        c
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn relax(self) -> Self {
        self - 1e-9 * self.abs().max(1e-300)
    }

    fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
        let mut c = vec![0.0; m * n];
        if m == 0 || n == 0 || k == 0 {
            return c;
        }
        // SAFETY: slices have exactly m*k, k*n and m*n elements, row-major strides.
        unsafe {
            matrixmultiply::dgemm(
                m, k, n, 1.0,
                a.as_ptr(), k as isize, 1,
                b.as_ptr(), n as isize, 1,
                0.0,
                c.as_mut_ptr(), n as isize, 1,
            );
        }
        c
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }

    fn relax(self) -> Self {
        self - 1e-5 * self.abs().max(1e-30)
    }

    fn matmul(a: &[f32], b: &[f32], m: usize, k: usize, n: usize) -> Vec<f32> {
        let mut c = vec![0.0; m * n];
        if m == 0 || n == 0 || k == 0 {
            return c;
        }
        // SAFETY: as for f64.
        unsafe {
            matrixmultiply::sgemm(
                m, k, n, 1.0,
                a.as_ptr(), k as isize, 1,
                b.as_ptr(), n as isize, 1,
                0.0,
                c.as_mut_ptr(), n as isize, 1,
            );
        }
        c
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn relax(self) -> Self {
        self
    }

    /// Clears denominators and multiplies integer matrices, in i128 when
    /// the bound k·max|a|·max|b| fits and in BigInt otherwise.
    fn matmul(a: &[BigRational], b: &[BigRational], m: usize, k: usize, n: usize) -> Vec<BigRational> {
        let (ia, da) = integerize(a);
        let (ib, db) = integerize(b);
        let den = da * db;
        let bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
        let fits = bits(&ia) + bits(&ib) + (usize::BITS - k.leading_zeros()) as u64 + 2 < 127;
        let mut out = Vec::with_capacity(m * n);
        if fits {
            let sa: Vec<i128> = ia.iter().map(|x| x.to_i128().unwrap()).collect();
            let sb: Vec<i128> = ib.iter().map(|x| x.to_i128().unwrap()).collect();
            let mut row = vec![0i128; n];
            for i in 0..m {
                row.iter_mut().for_each(|c| *c = 0);
                for l in 0..k {
                    let ail = sa[i * k + l];
                    if ail != 0 {
                        for (c, bl) in row.iter_mut().zip(&sb[l * n..(l + 1) * n]) {
                            *c += ail * bl;
                        }
                    }
                }
                out.extend(row.iter().map(|&c| BigRational::new(BigInt::from(c), den.clone())));
            }
        } else {
            for i in 0..m {
                let mut row = vec![BigInt::zero(); n];
                for l in 0..k {
                    let ail = &ia[i * k + l];
                    if !ail.is_zero() {
                        for (c, bl) in row.iter_mut().zip(&ib[l * n..(l + 1) * n]) {
                            *c += ail * bl;
                        }
                    }
                }
                out.extend(row.into_iter().map(|c| BigRational::new(c, den.clone())));
            }
        }
        out
    }

    fn floor_i64(&self) -> i64 {
        self.floor().to_integer().to_i64().unwrap_or(if self.is_negative() { i64::MIN } else { i64::MAX })
    }
}

/// (numerators over a common denominator, that denominator).
fn integerize(v: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let nums = v.iter().map(|x| x.numer() * (&den / x.denom())).collect();
    (nums, den)
}

/// Pairwise (cascade) summation with a fixed tree, so float results do not
/// depend on thread scheduling.
pub fn pairwise_sum<S: Scalar>(xs: &[S]) -> S {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(S::zero(), |acc, x| acc + x.clone());
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_by<S: Scalar, T>(xs: &[T], f: impl Fn(&T) -> S + Copy) -> S {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(S::zero(), |acc, x| acc + f(x));
    }
    let mid = xs.len() / 2;
    pairwise_sum_by(&xs[..mid], f) + pairwise_sum_by(&xs[mid..], f)
}

pub fn pow_u<S: Scalar>(x: &S, e: u32) -> S {
    let mut acc = S::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

/// Real root of a nonnegative scalar, via f64.
pub fn nth_root<S: Scalar>(x: &S, n: u32) -> f64 {
    x.to_f64_lossy().max(0.0).powf(1.0 / n as f64)
}

/// Exact rational from a finite float (every double is dyadic).
pub fn ratio_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn is_unit_interval<S: Scalar>(x: &S) -> bool {
    *x >= S::zero() && *x <= S::one()
}

/// JSON rendering: numbers in float mode, exact "p/q" strings in exact mode.
pub fn to_json<S: Scalar>(x: &S) -> serde_json::Value {
    if S::EXACT {
        serde_json::Value::String(x.to_string())
    } else {
        serde_json::json!(x.to_f64_lossy())
    }
}

/// Parse "p/q", an integer, or a decimal literal into an exact rational.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Some(r);
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.')?;
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}


/// Serde adapter writing exact rationals as "p/q" strings.
pub mod ratio_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_ratio(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s}")))
    }
}
