use super::factor::{atom_table, expand, require_unit, ProductFactor};
use super::increment::shared_increment;
use crate::boxnorms::Kernel2;
use crate::error::{Error, Result};
use crate::partition::Factor;
use crate::scalar::{pow_u, Scalar};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Increasing growth functions F : ℕ → ℕ (F ≥ 1).
#[derive(Clone, Debug)]
pub enum Growth {
    /// F(M) = a·M + b.
    Affine { a: u64, b: u64 },
    /// F(M) = ⌊2^{3M}/τ³⌋ + 1, the removal-lemma choice.
    Removal { tau: BigRational },
    Custom { name: String, f: fn(usize) -> BigUint },
}

impl Growth {
    pub fn eval(&self, m: usize) -> BigUint {
        match self {
            Growth::Affine { a, b } => BigUint::from(*a) * BigUint::from(m) + BigUint::from(*b),
            Growth::Removal { tau } => {
                let t3 = tau * tau * tau;
                let num = (BigUint::one() << (3 * m)) * t3.denom().magnitude();
                num.div_floor(t3.numer().magnitude()) + 1u32
            }
            Growth::Custom { f, .. } => f(m),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Growth::Affine { a, b } => format!("{a}*M+{b}"),
            Growth::Removal { tau } => format!("floor(2^(3M)/tau^3)+1, tau={tau}"),
            Growth::Custom { name, .. } => name.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Growth::Affine { a, b } if *a == 0 || *b == 0 => Err(Error::invalid("affine growth needs a ≥ 1 and b ≥ 1")),
            Growth::Removal { tau } if !tau.is_positive() => Err(Error::invalid("τ must be positive")),
            Growth::Custom { f, .. } if f(0).is_zero() => Err(Error::invalid("F(0) must be at least 1")),
            _ => Ok(()),
        }
    }

    pub(crate) fn reciprocal<S: Scalar>(&self, m: usize) -> S {
        S::from_ratio(&BigRational::new(1.into(), self.eval(m).into()))
    }
}

/// f = f₁ + f₂ + f₃ with f₁ = E(f|B), f₁ + f₂ = E(f|B′) for the coarse
/// factor B (complexity ≤ m) and its refinement B′.
#[derive(Clone, Debug)]
pub struct Decomposition<S> {
    pub f1: Kernel2<S>,
    pub f2: Kernel2<S>,
    pub f3: Kernel2<S>,
    pub m: usize,
    pub factors: ProductFactor,
    pub fine: ProductFactor,
    /// F(m) as a decimal string, and its reciprocal in S.
    pub f_of_m: String,
    pub uniformity_bound: S,
    pub stage: usize,
    /// Float mode only: the last energy-increment run could not certify a
    /// correlation, so the □² bound on f₃ is not guaranteed.
    pub stalled: bool,
}

impl<S: Scalar> Decomposition<S> {
    fn build(f: &Kernel2<S>, coarse: ProductFactor, fine: ProductFactor, s: &Staged, growth: &Growth) -> Result<Self> {
        let m = s.m;
        let f1 = expand(f, &coarse, &atom_table(f, &coarse)?.means);
        let e_fine = expand(f, &fine, &atom_table(f, &fine)?.means);
        let f2 = e_fine.sub(&f1)?;
        let f3 = f.sub(&e_fine)?;
        Ok(Decomposition {
            f1,
            f2,
            f3,
            m,
            factors: coarse,
            fine,
            f_of_m: growth.eval(m).to_string(),
            uniformity_bound: growth.reciprocal(m),
            stage: s.stage,
            stalled: s.stalled,
        })
    }
}

struct Staged {
    coarse: Vec<Factor>,
    fine: Vec<Factor>,
    m: usize,
    stage: usize,
    stalled: bool,
}

/// The double iteration: stage i refines B^{i−1} by energy increments until
/// every residual has □² norm < 1/F(M_{i−1}), and stops at the first stage
/// whose total energy gain is at most τ². With k kernels the pigeonhole
/// gives such a stage among the first ⌈k/τ²⌉.
fn staged<S: Scalar>(kernels: &[(&Kernel2<S>, usize, usize)], sizes: &[usize], tau: &S, growth: &Growth) -> Result<Staged> {
    growth.validate()?;
    if !tau.is_positive() {
        return Err(Error::invalid("τ must be positive"));
    }
    for (k, _, _) in kernels {
        require_unit(k, "each kernel")?;
    }
    let tau2 = tau.clone() * tau.clone();
    let bound = (S::from_usize(kernels.len()).unwrap() / tau2.clone()).to_f64_lossy().ceil();
    let max_stages = if bound.is_finite() && bound < 1e7 { bound as usize + 1 } else { 10_000_000 };
    let mut coarse: Vec<Factor> = sizes.iter().map(|&n| Factor::trivial(n)).collect();
    for stage in 1..=max_stages {
        let m = coarse.iter().map(Factor::complexity).max().unwrap_or(0);
        let eta4 = pow_u(&growth.reciprocal::<S>(m), 4);
        let mut fine = coarse.clone();
        let run = shared_increment(kernels, &mut fine, &eta4)?;
        let gain = run.energies.last().unwrap().clone() - run.energies[0].clone();
        if gain <= tau2 {
            return Ok(Staged { coarse, fine, m, stage, stalled: run.stalled });
        }
        coarse = fine;
    }
    Err(Error::IterationLimit { limit: max_stages, detail: "no stage with energy gain ≤ τ²".into() })
}

/// Szemerédi regularity for f : X × Y → [0,1]: ‖f₂‖₂ ≤ τ, ‖f₃‖_□² < 1/F(M),
/// f₁ and f₁ + f₂ in [0,1].
pub fn regularity_decompose<S: Scalar>(f: &Kernel2<S>, tau: &S, growth: &Growth) -> Result<Decomposition<S>> {
    let s = staged(&[(f, 0, 1)], &[f.nx(), f.ny()], tau, growth)?;
    let pf = |c: &[Factor]| ProductFactor::new(c[0].clone(), c[1].clone());
    Decomposition::build(f, pf(&s.coarse), pf(&s.fine), &s, growth)
}

/// Three decompositions regularized against one shared triple of factors
/// B_X, B_Y, B_Z.
#[derive(Clone, Debug)]
pub struct SimultaneousDecomposition<S> {
    pub bx: Factor,
    pub by: Factor,
    pub bz: Factor,
    pub m: usize,
    pub f: Decomposition<S>,
    pub g: Decomposition<S>,
    pub h: Decomposition<S>,
}

/// f : X × Y, g : Y × Z, h : Z × X, all into [0,1].
pub fn simultaneous_regularity<S: Scalar>(
    f: &Kernel2<S>,
    g: &Kernel2<S>,
    h: &Kernel2<S>,
    tau: &S,
    growth: &Growth,
) -> Result<SimultaneousDecomposition<S>> {
    if f.y() != g.x() || g.y() != h.x() || h.y() != f.x() {
        return Err(Error::ShapeMismatch("f, g, h must live on X×Y, Y×Z, Z×X".into()));
    }
    let s = staged(&[(f, 0, 1), (g, 1, 2), (h, 2, 0)], &[f.nx(), f.ny(), g.ny()], tau, growth)?;
    let pf = |c: &[Factor], i: usize, j: usize| ProductFactor::new(c[i].clone(), c[j].clone());
    let dec = |k: &Kernel2<S>, i, j| Decomposition::build(k, pf(&s.coarse, i, j), pf(&s.fine, i, j), &s, growth);
    Ok(SimultaneousDecomposition {
        f: dec(f, 0, 1)?,
        g: dec(g, 1, 2)?,
        h: dec(h, 2, 0)?,
        bx: s.coarse[0].clone(),
        by: s.coarse[1].clone(),
        bz: s.coarse[2].clone(),
        m: s.m,
    })
}
