#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use szlab::boxnorms::{Kernel2, MeasuredSpace};
use szlab::partition::Factor;
use szlab::Rational;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Values k/den with k uniform in 0..=den.
pub fn unit_kernel_q(nx: usize, ny: usize, den: i64, seed: u64) -> Kernel2<Q> {
    let mut r = rng(seed);
    let v = (0..nx * ny).map(|_| q(r.gen_range(0..=den), den)).collect();
    Kernel2::uniform(nx, ny, v).unwrap()
}

pub fn unit_kernel_f(nx: usize, ny: usize, seed: u64) -> Kernel2<f64> {
    let mut r = rng(seed);
    let v = (0..nx * ny).map(|_| r.gen::<f64>()).collect();
    Kernel2::uniform(nx, ny, v).unwrap()
}

pub fn sign_kernel_f(nx: usize, ny: usize, seed: u64) -> Kernel2<f64> {
    let mut r = rng(seed);
    let v = (0..nx * ny).map(|_| if r.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    Kernel2::uniform(nx, ny, v).unwrap()
}

pub fn random_measure_q(n: usize, seed: u64) -> MeasuredSpace<Q> {
    let mut r = rng(seed);
    let raw: Vec<i64> = (0..n).map(|_| r.gen_range(1..=5)).collect();
    let total: i64 = raw.iter().sum();
    MeasuredSpace::new(raw.iter().map(|&w| q(w, total)).collect()).unwrap()
}

/// ‖f‖⁴_□² by the defining quadruple sum.
pub fn naive_box2_pow4<S: szlab::Scalar>(f: &Kernel2<S>) -> S {
    let (wx, wy) = (f.x().weights(), f.y().weights());
    let mut s = S::zero();
    for x in 0..f.nx() {
        for xp in 0..f.nx() {
            for y in 0..f.ny() {
                for yp in 0..f.ny() {
                    s = s + wx[x].clone() * wx[xp].clone() * wy[y].clone() * wy[yp].clone()
                        * f.get(x, y).clone() * f.get(x, yp).clone() * f.get(xp, y).clone() * f.get(xp, yp).clone();
                }
            }
        }
    }
    s
}

pub fn naive_lambda3<S: szlab::Scalar>(f: &Kernel2<S>, g: &Kernel2<S>, h: &Kernel2<S>) -> S {
    let (wx, wy, wz) = (f.x().weights(), f.y().weights(), g.y().weights());
    let mut s = S::zero();
    for x in 0..f.nx() {
        for y in 0..f.ny() {
            for z in 0..g.ny() {
                s = s + wx[x].clone() * wy[y].clone() * wz[z].clone() * f.get(x, y).clone() * g.get(y, z).clone() * h.get(z, x).clone();
            }
        }
    }
    s
}

/// E(f | B_X ∨ B_Y) by scanning each point's atom.
pub fn naive_cond_exp(f: &Kernel2<Q>, bx: &Factor, by: &Factor) -> Kernel2<Q> {
    let (wx, wy) = (f.x().weights(), f.y().weights());
    Kernel2::from_fn(f.x().clone(), f.y().clone(), |x, y| {
        let (mut mass, mut total) = (Q::zero(), Q::zero());
        for x2 in 0..f.nx() {
            for y2 in 0..f.ny() {
                if bx.atom_of(x2) == bx.atom_of(x) && by.atom_of(y2) == by.atom_of(y) {
                    let w = wx[x2].clone() * wy[y2].clone();
                    mass += w.clone();
                    total += w * f.get(x2, y2).clone();
                }
            }
        }
        if mass.is_zero() {
            Q::zero()
        } else {
            total / mass
        }
    })
}

pub fn l2_sq_naive(f: &Kernel2<Q>) -> Q {
    let mut s = Q::zero();
    for x in 0..f.nx() {
        for y in 0..f.ny() {
            s += f.x().weight(x).clone() * f.y().weight(y).clone() * f.get(x, y).clone() * f.get(x, y).clone();
        }
    }
    s
}

pub fn in_unit(f: &Kernel2<Q>) -> bool {
    f.values().iter().all(|v| *v >= Q::zero() && *v <= Q::one())
}

/// Ordered (n, r) pairs with n, n+r, …, n+(k−1)r all in A ⊆ ℤ/Nℤ.
pub fn naive_ap_count(n: u64, a: &[i64], k: usize) -> u64 {
    let m = n as i64;
    let inside = |x: i64| a.contains(&x.rem_euclid(m));
    let mut c = 0;
    for s in 0..m {
        for r in 0..m {
            c += (0..k as i64).all(|j| inside(s + j * r)) as u64;
        }
    }
    c
}

/// 𝒟f(x,y) by the defining double sum over (x′, y′).
pub fn naive_dual<S: szlab::Scalar>(f: &Kernel2<S>) -> Kernel2<S> {
    let (wx, wy) = (f.x().weights(), f.y().weights());
    Kernel2::from_fn(f.x().clone(), f.y().clone(), |x, y| {
        let mut t = S::zero();
        for x2 in 0..f.nx() {
            for y2 in 0..f.ny() {
                t = t + wx[x2].clone() * wy[y2].clone() * f.get(x, y2).clone() * f.get(x2, y).clone() * f.get(x2, y2).clone();
            }
        }
        t
    })
}
