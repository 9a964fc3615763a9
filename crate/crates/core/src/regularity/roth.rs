use crate::boxnorms::{lambda3, Kernel2, MeasuredSpace};
use crate::error::{Error, Result};
use crate::progressions::{count_progressions, Ambient, ResidueSet};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;

/// The tripartite encoding of 3APs in A ⊆ ℤ/Nℤ: with n = −x₂−2x₃ and
/// r = x₁+x₂+x₃ the relations n ∈ A, n+r ∈ A, n+2r ∈ A become
/// −x₂−2x₃ ∈ A (Y×Z), x₁−x₃ ∈ A (Z×X), 2x₁+x₂ ∈ A (X×Y).
#[derive(Clone, Debug)]
pub struct RothReport<S> {
    pub modulus: u64,
    /// 1_A(2x₁+x₂) on X × Y.
    pub f: Kernel2<S>,
    /// 1_A(−x₂−2x₃) on Y × Z.
    pub g: Kernel2<S>,
    /// 1_A(x₁−x₃) on Z × X.
    pub h: Kernel2<S>,
    pub lambda3: S,
    pub ordered_count: u64,
    /// Λ₃ = ordered count / N²: each (n, r) has exactly N preimages.
    pub identity_holds: bool,
}

pub fn roth_pipeline<S: Scalar>(a: &ResidueSet) -> Result<RothReport<S>> {
    let Ambient::Cyclic { modulus } = a.ambient() else {
        return Err(Error::invalid("the Roth pipeline needs a cyclic residue set"));
    };
    let n = modulus as i64;
    let sp = MeasuredSpace::<S>::uniform(modulus as usize);
    let ind = |v: i64| if a.contains(v.rem_euclid(n)) { S::one() } else { S::zero() };
    let f = Kernel2::from_fn(sp.clone(), sp.clone(), |x1, x2| ind(2 * x1 as i64 + x2 as i64));
    let g = Kernel2::from_fn(sp.clone(), sp.clone(), |x2, x3| ind(-(x2 as i64) - 2 * x3 as i64));
    let h = Kernel2::from_fn(sp.clone(), sp, |x3, x1| ind(x1 as i64 - x3 as i64));
    let lam = lambda3(&f, &g, &h)?;
    let ordered_count = count_progressions(a, 3)?.total_ordered;
    let expected = BigRational::new(BigInt::from(ordered_count), BigInt::from(modulus) * BigInt::from(modulus));
    let identity_holds = if S::EXACT {
        lam == S::from_ratio(&expected)
    } else {
        (lam.to_f64_lossy() - S::from_ratio(&expected).to_f64_lossy()).abs() <= 1e-12
    };
    Ok(RothReport { modulus, f, g, h, lambda3: lam, ordered_count, identity_holds })
}
