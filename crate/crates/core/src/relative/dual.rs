use crate::boxnorms::{row_gram, Kernel2};
use crate::error::{Error, Result};
use crate::partition::Factor;
use crate::scalar::Scalar;
use crate::seed::{rng, streams};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

/// 𝒟f(x,y) = ∫∫ f(x,y′) f(x′,y) f(x′,y′) dμ(x′) dμ(y′), computed as
/// G·W_X·F with G[x,x′] = ∫ f(x,y′) f(x′,y′) dμ(y′).
pub fn dual_function<S: Scalar>(f: &Kernel2<S>) -> Kernel2<S> {
    let (nx, ny) = (f.nx(), f.ny());
    let g = row_gram(f, f);
    let wx = f.x().weights();
    let scaled: Vec<S> = (0..nx * ny).map(|i| wx[i / ny].clone() * f.values()[i].clone()).collect();
    let d = S::matmul(&g, &scaled, nx, nx, ny);
    Kernel2::new(f.x().clone(), f.y().clone(), d).expect("dual of a well-formed kernel")
}

/// The factor of X×Y generated by quantizing each generator into intervals
/// [o + kε, o + (k+1)ε) with a seeded offset o ∈ [0, ε).
#[derive(Clone, Debug)]
pub struct DualFactor<S> {
    pub generators: Vec<Kernel2<S>>,
    pub resolution: S,
    pub offsets: Vec<S>,
    pub nx: usize,
    pub ny: usize,
    /// Atoms of X×Y, cell index x·ny + y; complexity = number of generators.
    pub partition: Factor,
}

impl<S: Scalar> DualFactor<S> {
    pub fn complexity(&self) -> usize {
        self.generators.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.partition.n_atoms()
    }

    pub fn atom_of(&self, x: usize, y: usize) -> usize {
        self.partition.atom_of(x * self.ny + y)
    }

    /// Interval indices of (x,y) under every generator.
    pub fn key(&self, x: usize, y: usize) -> Vec<i64> {
        self.generators.iter().zip(&self.offsets).map(|(d, o)| cell(d.get(x, y), o, &self.resolution)).collect()
    }
}

fn cell<S: Scalar>(v: &S, offset: &S, eps: &S) -> i64 {
    ((v.clone() - offset.clone()) / eps.clone()).floor_i64()
}

/// Offset of the i-th generator: ε·u with u a 32-bit dyadic drawn from the
/// DUAL_SHIFT stream, so the factor is exact in rational mode too.
pub(crate) fn shift_offset<S: Scalar>(eps: &S, seed: u64, i: usize) -> S {
    let u: u32 = rng(seed, streams::DUAL_SHIFT.wrapping_add((i as u64) << 8)).gen();
    eps.clone() * S::from_ratio(&BigRational::new(BigInt::from(u), BigInt::from(1u64 << 32)))
}

pub fn build_dual_factor<S: Scalar>(duals: Vec<Kernel2<S>>, eps: &S, shift_seed: u64) -> Result<DualFactor<S>> {
    if !eps.is_positive() {
        return Err(Error::invalid("resolution ε must be positive"));
    }
    let Some(first) = duals.first() else {
        return Err(Error::invalid("a dual factor needs at least one generator"));
    };
    let (nx, ny) = (first.nx(), first.ny());
    if duals.iter().any(|d| !d.same_spaces(first)) {
        return Err(Error::ShapeMismatch("dual generators must share X × Y".into()));
    }
    let offsets: Vec<S> = (0..duals.len()).map(|i| shift_offset(eps, shift_seed, i)).collect();
    let keys: Vec<Vec<i64>> = (0..nx * ny)
        .map(|c| duals.iter().zip(&offsets).map(|(d, o)| cell(&d.values()[c], o, eps)).collect())
        .collect();
    let partition = Factor::from_keys(&keys, duals.len());
    Ok(DualFactor { generators: duals, resolution: eps.clone(), offsets, nx, ny, partition })
}
