mod common;

use common::{q, rng};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use szlab::constructions::random_set;
use szlab::progressions::*;
use szlab::Error;

fn nested_loop_count(a: &ResidueSet, k: usize) -> u64 {
    let Ambient::Cyclic { modulus } = a.ambient() else { unreachable!() };
    let m = modulus as i64;
    let mut t = 0;
    for n in 0..m {
        for r in 0..m {
            if (0..k as i64).all(|j| a.contains((n + j * r) % m)) {
                t += 1;
            }
        }
    }
    t
}

#[test]
fn full_and_empty_sets() {
    let c = count_progressions(&ResidueSet::full_cyclic(5), 3).unwrap();
    assert_eq!((c.total_ordered, c.trivial, c.nontrivial), (25, 5, 20));
    let e = ResidueSet::cyclic(7, []).unwrap();
    assert_eq!(count_progressions(&e, 3).unwrap().total_ordered, 0);
    assert!(matches!(count_progressions(&e, 0), Err(Error::InvalidArgument(_))));
}

#[test]
fn evens_mod_nine() {
    let a = ResidueSet::cyclic(9, [0, 2, 4, 6]).unwrap();
    let c = count_progressions(&a, 3).unwrap();
    // frozen from the double loop: 4 trivial + (0,2,4),(2,4,6),(6,4,2),(4,2,0)
    assert_eq!(c.total_ordered, 8);
    assert_eq!(c.total_ordered, nested_loop_count(&a, 3));
}

#[test]
fn oracle_agreement_random_sets() {
    for seed in 0..60 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=40u64);
        let a = random_set(n, r.gen_range(0.1..0.9), seed).unwrap();
        for k in 1..=5 {
            let c = count_progressions(&a, k).unwrap();
            assert_eq!(c.total_ordered, nested_loop_count(&a, k), "seed {seed} k {k}");
            assert_eq!(c.trivial, a.len() as u64);
            assert!(c.total_ordered <= n * n);
        }
        assert_eq!(count_progressions(&a, 2).unwrap().total_ordered, (a.len() * a.len()) as u64);
    }
}

#[test]
fn counts_are_monotone_under_inclusion() {
    for seed in 0..30 {
        let b = random_set(31, 0.6, seed).unwrap();
        let a = ResidueSet::cyclic(31, b.elements().iter().copied().filter(|x| x % 3 != 0)).unwrap();
        assert!(a.is_subset(&b));
        for k in 2..=4 {
            assert!(count_progressions(&a, k).unwrap().total_ordered <= count_progressions(&b, k).unwrap().total_ordered);
        }
    }
}

#[test]
fn interval_mode_never_wraps() {
    let a = ResidueSet::interval(1, 10, [1, 5, 9, 10]).unwrap();
    let c = count_progressions(&a, 3).unwrap();
    // 1,5,9 both directions
    assert_eq!(c.nontrivial, 2);
    let wrapped = ResidueSet::cyclic(10, [0, 5, 9]).unwrap();
    assert!(count_progressions(&wrapped, 3).unwrap().nontrivial > 0);
}

#[test]
fn parallelogram_examples() {
    let a = ResidueSet::interval(-10, 10, [1, 2, 3, 4]).unwrap();
    let ps = find_parallelograms(&a);
    assert!(ps.contains(&Parallelogram { x: 1, a: 1, b: 2 }));
    assert!(find_parallelograms(&ResidueSet::interval(-10, 10, [1, 2]).unwrap()).is_empty());

    let mut r = rng(7);
    let els: Vec<i64> = (1..=100).filter(|_| r.gen_bool(0.5)).collect();
    let a = ResidueSet::interval(-100, 100, els).unwrap();
    let ps = find_parallelograms(&a);
    assert!(!ps.is_empty());
    for p in &ps {
        assert!(p.a != 0 && p.b != 0);
        assert!(p.corners().iter().all(|&c| a.contains(c)), "{p:?}");
    }
}

#[test]
fn min_density_examples() {
    assert_eq!(min_density_count(5, &q(1, 1), 3, DEFAULT_DENSITY_GUARD).unwrap(), q(1, 1));
    assert_eq!(min_density_count(8, &q(1, 8), 3, DEFAULT_DENSITY_GUARD).unwrap(), q(1, 64));
    let v = min_density_count(12, &q(1, 2), 3, DEFAULT_DENSITY_GUARD).unwrap();
    assert_eq!(v, q(14, 144));
    let mut best = u64::MAX;
    for mask in 0u32..1 << 12 {
        if mask.count_ones() >= 6 {
            let a = ResidueSet::cyclic(12, (0..12).filter(|i| mask >> i & 1 == 1)).unwrap();
            best = best.min(nested_loop_count(&a, 3));
        }
    }
    assert_eq!(v, BigRational::new(BigInt::from(best), BigInt::from(144)));
    assert!(matches!(min_density_count(19, &q(1, 2), 3, DEFAULT_DENSITY_GUARD), Err(Error::ResourceLimit { .. })));
    assert!(min_density_count(19, &q(1, 1), 3, 19).is_ok());
}

fn varnavides_loop(a: &ResidueSet, window: i64, lambda: i64, k: usize) -> BigRational {
    let Ambient::Cyclic { modulus } = a.ambient() else { unreachable!() };
    let m = modulus as i64;
    let mut hits = 0i64;
    for n in 0..m {
        for s in 1..=window {
            for r in 1..=window {
                hits += (0..k as i64).all(|j| a.contains((n + s + j * lambda * r).rem_euclid(m))) as i64;
            }
        }
    }
    BigRational::new(hits.into(), (m * window * window).into())
}

#[test]
fn varnavides_examples() {
    for m in 1..10 {
        assert_eq!(varnavides_count(&ResidueSet::full_cyclic(10), m, 3, 3).unwrap(), q(1, 1));
        assert_eq!(varnavides_count(&ResidueSet::cyclic(10, []).unwrap(), m, 3, 3).unwrap(), q(0, 1));
    }
    let a = ResidueSet::cyclic(11, [0, 1, 5, 9]).unwrap();
    assert_eq!(varnavides_count(&a, 3, 2, 3).unwrap(), q(1, 33));
    assert_eq!(varnavides_loop(&a, 3, 2, 3), q(1, 33));
    assert!(varnavides_count(&a, 11, 2, 3).is_err());
    assert!(varnavides_count(&a, 0, 2, 3).is_err());
}

#[test]
fn varnavides_averages_to_global_density() {
    // for prime N, λr sweeps ℤ/Nℤ uniformly as λ does, whatever r ∈ [1, M]
    for (seed, n) in [(1, 13u64), (2, 17), (3, 23), (4, 29)] {
        let a = random_set(n, 0.5, seed).unwrap();
        for window in [1, 3, 5] {
            let avg: BigRational = (0..n as i64).map(|l| varnavides_count(&a, window, l, 3).unwrap()).sum::<BigRational>()
                / BigRational::from_integer(n.into());
            let total = count_progressions(&a, 3).unwrap().total_ordered;
            assert_eq!(avg, BigRational::new(total.into(), (n * n).into()), "N={n} M={window}");
            assert_eq!(varnavides_count(&a, window, 1, 3).unwrap(), varnavides_loop(&a, window as i64, 1, 3));
        }
    }
}
