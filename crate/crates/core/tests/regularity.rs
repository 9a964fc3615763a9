mod common;

use common::*;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use szlab::boxnorms::{bilinear, box2_pow4, lambda3, Kernel2, MeasuredSpace};
use szlab::constructions::behrend_set;
use szlab::graph::Graph;
use szlab::partition::Factor;
use szlab::regularity::*;
use szlab::scalar::pow_u;
use szlab::{Error, ResidueSet};

#[test]
fn correlate_constant_one() {
    let f = Kernel2::constant(MeasuredSpace::uniform(5), MeasuredSpace::uniform(4), Q::one());
    let c = correlate_with_structure(&f, &Q::one()).unwrap();
    assert!(c.a.iter().all(|&t| t) && c.b.iter().all(|&t| t));
    assert_eq!(c.corr, Q::one());
}

#[test]
fn correlate_recovers_signed_rectangle() {
    // f = s(x) t(y) with s, t = ±1 patterns; the oracle scans all rectangles
    let s = [1, 1, -1, 1, -1, -1, 1, -1];
    let t = [-1, 1, 1, -1, 1, -1, -1, 1];
    let f = Kernel2::from_fn(MeasuredSpace::uniform(8), MeasuredSpace::uniform(8), |x, y| q(s[x] * t[y], 1));
    let eta4 = box2_pow4(&f);
    assert_eq!(eta4, Q::one());
    let c = correlate_with_structure(&f, &Q::one()).unwrap();
    assert!(c.corr.clone() * q(4, 1) >= eta4 || -c.corr.clone() * q(4, 1) >= eta4);
    let mut best = Q::zero();
    for am in 0u32..256 {
        for bm in 0u32..256 {
            let mut v = 0i64;
            for x in 0..8 {
                for y in 0..8 {
                    if am >> x & 1 == 1 && bm >> y & 1 == 1 {
                        v += s[x] * t[y];
                    }
                }
            }
            let v = q(v.abs(), 64);
            if v > best {
                best = v;
            }
        }
    }
    assert!(c.corr.clone().abs() <= best);
    // the extracted sets are level sets of s and t
    let a_on: Vec<i64> = (0..8).filter(|&x| c.a[x]).map(|x| s[x]).collect();
    assert!(a_on.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn correlate_random_signs_meets_bound() {
    for seed in 0..5 {
        let f = sign_kernel_f(16, 16, seed);
        let eta4 = box2_pow4(&f);
        let eta = eta4.powf(0.25);
        let c = correlate_with_structure(&f, &eta).unwrap();
        let recheck = bilinear(
            &f,
            &c.b.iter().map(|&m| m as u8 as f64).collect::<Vec<_>>(),
            &c.a.iter().map(|&m| m as u8 as f64).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!((recheck - c.corr).abs() < 1e-12);
        assert!(c.corr.abs() >= eta4 / 4.0 - 1e-9, "seed {seed}: {} vs {}", c.corr, eta4 / 4.0);
    }
}

#[test]
fn correlate_rejects_unbounded_and_reports_missing_witness() {
    let f = Kernel2::uniform(2, 2, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
    assert!(matches!(correlate_with_structure(&f, &0.5), Err(Error::InvalidArgument(_))));
    let z = Kernel2::uniform(3, 3, vec![0.0; 9]).unwrap();
    assert!(matches!(correlate_with_structure(&z, &0.1), Err(Error::PreconditionViolated(_))));
}

#[test]
fn correlate3_meets_bound() {
    use szlab::boxnorms::{box3_pow8, Kernel3};
    let mut r = rng(3);
    let sp = MeasuredSpace::<f64>::uniform(4);
    let vals: Vec<f64> = (0..64).map(|_| if r.gen::<bool>() { 1.0 } else { -1.0 }).collect();
    let f = Kernel3::new(sp.clone(), sp.clone(), sp, vals).unwrap();
    let e8 = box3_pow8(&f);
    let c = correlate_with_structure3(&f, &e8.powf(0.125)).unwrap();
    assert!(c.corr.abs() >= e8 / 8.0 - 1e-9);
    let mut v = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                if c.a_xy[x * 4 + y] && c.a_yz[y * 4 + z] && c.a_zx[z * 4 + x] {
                    v += f.get(x, y, z) / 64.0;
                }
            }
        }
    }
    assert!((v - c.corr).abs() < 1e-12);
}

#[test]
fn increment_on_rectangle_reaches_full_energy() {
    let a = [true, false, false, true, false, false, false, false];
    let b = [false, false, true, false, false, true, false, false];
    let f = Kernel2::from_fn(MeasuredSpace::uniform(8), MeasuredSpace::uniform(8), |x, y| {
        if a[x] && b[y] {
            Q::one()
        } else {
            Q::zero()
        }
    });
    // residual defect⁴ is 207/65536; η = 47/200 sits just below it, above
    // the off-rectangle witness values 3/1024, so the witness lands in A × B
    let eta = q(47, 200);
    let res = f.sub(&Kernel2::constant(f.x().clone(), f.y().clone(), q(1, 16))).unwrap();
    assert_eq!(naive_box2_pow4(&res), q(207, 65536));
    let step = energy_increment_step(&f, &ProductFactor::trivial(8, 8), &eta).unwrap();
    assert_eq!(step.energy_after, q(1, 16));
    assert_eq!(step.factor.complexity(), (1, 1));
    assert!(step.energy_after.clone() - step.energy_before.clone() >= pow_u(&eta, 8) / q(16, 1));
}

#[test]
fn increment_fails_on_measurable_function() {
    let bx = Factor::from_labels(&[0, 0, 1, 1], 1);
    let by = Factor::from_labels(&[0, 1, 1, 0], 1);
    let f = Kernel2::from_fn(MeasuredSpace::uniform(4), MeasuredSpace::uniform(4), |x, y| {
        q((bx.atom_of(x) * 2 + by.atom_of(y)) as i64, 4)
    });
    let err = energy_increment_step(&f, &ProductFactor::new(bx, by), &q(1, 100)).unwrap_err();
    assert!(matches!(err, Error::PreconditionViolated(_)));
}

#[test]
fn energy_increments_are_exact_in_rationals() {
    let eta = q(1, 5);
    let gain = pow_u(&eta, 8) / q(16, 1);
    for seed in 0..3 {
        let f = unit_kernel_q(12, 12, 6, seed);
        let mut pf = ProductFactor::trivial(12, 12);
        let mut steps = 0;
        while let Ok(step) = energy_increment_step(&f, &pf, &eta) {
            let before = l2_sq_naive(&naive_cond_exp(&f, &pf.x, &pf.y));
            let after = l2_sq_naive(&naive_cond_exp(&f, &step.factor.x, &step.factor.y));
            assert_eq!(before, step.energy_before);
            assert_eq!(after, step.energy_after);
            assert!(after - before >= gain);
            assert_eq!(step.factor.complexity(), (pf.x.complexity() + 1, pf.y.complexity() + 1));
            pf = step.factor;
            steps += 1;
        }
        assert!(steps >= 1);
        let res = f.sub(&cond_exp_product(&f, &pf).unwrap()).unwrap();
        assert!(box2_pow4(&res) < pow_u(&eta, 4));
    }
}

#[test]
fn kvn_constant_and_blocks() {
    let f = Kernel2::constant(MeasuredSpace::uniform(6), MeasuredSpace::uniform(6), q(2, 7));
    let out = kvn_decompose(&f, &q(1, 10), &ProductFactor::trivial(6, 6)).unwrap();
    assert_eq!(out.steps, 0);
    assert_eq!(out.factor, ProductFactor::trivial(6, 6));

    let rows = [0, 1, 1, 0, 1, 0];
    let cols = [1, 1, 0, 0, 1, 0];
    let vals = [[q(1, 5), q(4, 5)], [q(1, 1), q(0, 1)]];
    let f = Kernel2::from_fn(MeasuredSpace::uniform(6), MeasuredSpace::uniform(6), |x, y| vals[rows[x]][cols[y]].clone());
    let eta = q(1, 20);
    let out = kvn_decompose(&f, &eta, &ProductFactor::trivial(6, 6)).unwrap();
    assert!(out.factor.x.refines(&Factor::from_labels(&rows, 1)));
    assert!(out.factor.y.refines(&Factor::from_labels(&cols, 1)));
    let res = f.sub(&naive_cond_exp(&f, &out.factor.x, &out.factor.y)).unwrap();
    assert!(naive_box2_pow4(&res) < pow_u(&eta, 4));
}

#[test]
fn kvn_step_count_within_bound() {
    let eta = 0.9f64;
    let bound = (16.0 / eta.powi(8)).ceil() as usize;
    for seed in 0..5 {
        let f = unit_kernel_f(10, 10, seed);
        let out = kvn_decompose(&f, &eta, &ProductFactor::trivial(10, 10)).unwrap();
        assert!(out.steps <= bound);
        assert!(out.factor.max_complexity() <= bound);
        assert!(out.defect_pow4 < eta.powi(4));
    }
}

fn check_srl(f: &Kernel2<Q>, d: &Decomposition<Q>, tau: &Q) {
    assert_eq!(d.f1.add(&d.f2).unwrap().add(&d.f3).unwrap(), *f);
    assert_eq!(d.f1, naive_cond_exp(f, &d.factors.x, &d.factors.y));
    assert!(in_unit(&d.f1) && in_unit(&d.f1.add(&d.f2).unwrap()));
    assert!(l2_sq_naive(&d.f2) <= tau.clone() * tau.clone());
    assert!(naive_box2_pow4(&d.f3) <= pow_u(&d.uniformity_bound, 4));
    assert!(d.factors.max_complexity() <= d.m);
    let f_of_m: num_bigint::BigInt = d.f_of_m.parse().unwrap();
    assert_eq!(d.uniformity_bound, Q::new(1.into(), f_of_m));
}

#[test]
fn srl_constant() {
    let f = Kernel2::constant(MeasuredSpace::uniform(5), MeasuredSpace::uniform(5), q(3, 8));
    let d = regularity_decompose(&f, &q(1, 4), &Growth::Affine { a: 1, b: 1 }).unwrap();
    assert_eq!(d.m, 0);
    assert!(d.f1.values().iter().all(|v| *v == q(3, 8)));
    assert!(d.f2.values().iter().all(Zero::is_zero));
    assert!(d.f3.values().iter().all(Zero::is_zero));
}

#[test]
fn srl_rectangle_and_random() {
    let f = Kernel2::from_fn(MeasuredSpace::uniform(10), MeasuredSpace::uniform(10), |x, y| {
        if x < 4 && (3..8).contains(&y) {
            Q::one()
        } else {
            Q::zero()
        }
    });
    let tau = q(1, 10);
    let d = regularity_decompose(&f, &tau, &Growth::Affine { a: 1, b: 1 }).unwrap();
    check_srl(&f, &d, &tau);

    let tau = q(1, 4);
    for seed in 0..2 {
        let f = unit_kernel_q(16, 16, 4, 100 + seed);
        let d = regularity_decompose(&f, &tau, &Growth::Affine { a: 2, b: 2 }).unwrap();
        check_srl(&f, &d, &tau);
    }
}

#[test]
fn srl_weighted_spaces() {
    let (x, y) = (random_measure_q(7, 1), random_measure_q(9, 2));
    let mut r = rng(5);
    let vals: Vec<Q> = (0..63).map(|_| q(r.gen_range(0..=3), 3)).collect();
    let f = Kernel2::new(x, y, vals).unwrap();
    let tau = q(1, 3);
    let d = regularity_decompose(&f, &tau, &Growth::Affine { a: 1, b: 2 }).unwrap();
    check_srl(&f, &d, &tau);
}

#[test]
fn growth_functions() {
    let g = Growth::Removal { tau: q(1, 4) };
    assert_eq!(g.eval(0).to_string(), "65");
    assert_eq!(g.eval(1).to_string(), "513");
    assert_eq!(Growth::Affine { a: 2, b: 2 }.eval(3).to_string(), "8");
    let k = Kernel2::constant(MeasuredSpace::uniform(2), MeasuredSpace::uniform(2), q(1, 2));
    assert!(regularity_decompose(&k, &q(1, 4), &Growth::Affine { a: 0, b: 1 }).is_err());
}

#[test]
fn simultaneous_cases() {
    let sp = || MeasuredSpace::<Q>::uniform(6);
    let one = Kernel2::constant(sp(), sp(), Q::one());
    let s = simultaneous_regularity(&one, &one, &one, &q(1, 4), &Growth::Affine { a: 1, b: 1 }).unwrap();
    assert_eq!((s.bx.n_atoms(), s.by.n_atoms(), s.bz.n_atoms()), (1, 1, 1));

    let part = [0, 1, 0, 1, 1, 0];
    let block = |v: [[i64; 2]; 2]| Kernel2::from_fn(sp(), sp(), move |a, b| q(v[part[a]][part[b]], 4));
    let (f, g, h) = (block([[0, 4], [4, 1]]), block([[3, 1], [1, 3]]), block([[4, 0], [2, 2]]));
    let tau = q(1, 5);
    let s = simultaneous_regularity(&f, &g, &h, &tau, &Growth::Affine { a: 8, b: 8 }).unwrap();
    let p = Factor::from_labels(&part, 1);
    for d in [&s.f, &s.g, &s.h] {
        assert!(d.fine.x.refines(&p) && d.fine.y.refines(&p));
    }
    check_srl(&f, &s.f, &tau);
    check_srl(&g, &s.g, &tau);
    check_srl(&h, &s.h, &tau);

    let tau = q(3, 10);
    let (f, g, h) = (unit_kernel_q(7, 8, 3, 1), unit_kernel_q(8, 6, 3, 2), unit_kernel_q(6, 7, 3, 3));
    let s = simultaneous_regularity(&f, &g, &h, &tau, &Growth::Affine { a: 1, b: 1 }).unwrap();
    assert_eq!(s.f.factors.x, s.h.factors.y);
    assert_eq!(s.f.factors.y, s.g.factors.x);
    assert_eq!(s.g.factors.y, s.h.factors.x);
    check_srl(&f, &s.f, &tau);
    check_srl(&g, &s.g, &tau);
    check_srl(&h, &s.h, &tau);
}

fn removed_oracle(k: &Kernel2<Q>, cert: &RemovalCertificate<Q>, which: usize) -> Q {
    let mut s = Q::zero();
    for p in 0..k.nx() {
        for r in 0..k.ny() {
            if !cert.contains(which, p, r) {
                s += k.x().weight(p).clone() * k.y().weight(r).clone() * k.get(p, r).clone();
            }
        }
    }
    s
}

fn pointwise_vanishes(cert: &RemovalCertificate<Q>, nx: usize, ny: usize, nz: usize) -> bool {
    (0..nx).all(|x| (0..ny).all(|y| (0..nz).all(|z| !(cert.contains(0, x, y) && cert.contains(1, y, z) && cert.contains(2, z, x)))))
}

#[test]
fn removal_on_zero_kernels() {
    let z = Kernel2::constant(MeasuredSpace::uniform(4), MeasuredSpace::uniform(4), Q::zero());
    let cert = strong_triangle_removal(&z, &z, &z, &q(1, 100), &RemovalConfig::default()).unwrap();
    assert!(cert.verified);
    assert!((0..3).all(|w| cert.atom_pairs(w).is_empty()));
    assert!(cert.removed_mass.iter().all(Zero::is_zero));
}

#[test]
fn removal_on_atom_disjoint_rectangles() {
    // f on X₀×Y₀, g on Y₀×Z₀, h on Z₁×X₀: every triangle needs z in Z₀ ∩ Z₁ = ∅
    let sp = || MeasuredSpace::<Q>::uniform(8);
    let lo = |i: usize| i < 4;
    let f = Kernel2::from_fn(sp(), sp(), |x, y| if lo(x) && lo(y) { Q::one() } else { Q::zero() });
    let g = Kernel2::from_fn(sp(), sp(), |y, z| if lo(y) && lo(z) { Q::one() } else { Q::zero() });
    let h = Kernel2::from_fn(sp(), sp(), |z, x| if !lo(z) && lo(x) { Q::one() } else { Q::zero() });
    assert!(lambda3(&f, &g, &h).unwrap().is_zero());
    let cfg = RemovalConfig { tau: TauSchedule::Fixed(q(1, 1024)), repair: false };
    let cert = strong_triangle_removal(&f, &g, &h, &q(1, 1000), &cfg).unwrap();
    assert!(cert.verified && pointwise_vanishes(&cert, 8, 8, 8));
    assert_eq!(cert.pruned_atoms, [0, 0, 0]);
    for (w, k) in [&f, &g, &h].into_iter().enumerate() {
        assert!(cert.removed_mass[w].is_zero());
        assert_eq!(removed_oracle(k, &cert, w), cert.removed_mass[w]);
    }
}

#[test]
fn removal_fault_injection_is_loud() {
    let sp = || MeasuredSpace::<Q>::uniform(5);
    let c = Kernel2::constant(sp(), sp(), q(3, 10));
    let broken = RemovalConfig { tau: TauSchedule::Fixed(q(1, 1_000_000)), repair: false };
    match strong_triangle_removal(&c, &c, &c, &q(1, 20), &broken) {
        Err(Error::CertificateFailure(msg)) => assert!(msg.contains("τ")),
        other => panic!("expected a certificate failure, got {other:?}"),
    }
    let repaired = RemovalConfig { repair: true, ..broken };
    let cert = strong_triangle_removal(&c, &c, &c, &q(1, 20), &repaired).unwrap();
    assert!(cert.verified && !cert.repairs.is_empty());
    let ok = strong_triangle_removal(&c, &c, &c, &q(1, 20), &RemovalConfig::default()).unwrap();
    assert!(ok.verified && ok.repairs.is_empty());
    assert!(matches!(
        strong_triangle_removal(&c, &c, &c, &q(1, 100), &RemovalConfig::default()),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn removal_on_behrend_roth_instance() {
    let (b, _) = behrend_set(150, 2, 10, None).unwrap();
    // embed [1, N] into ℤ/(2N+1)ℤ so that no progression wraps around
    let a = ResidueSet::cyclic(301, b.elements().iter().copied()).unwrap();
    let report = roth_pipeline::<f64>(&a).unwrap();
    assert!(report.identity_holds);
    let eps = report.lambda3 * 1.0001;
    let cert = strong_triangle_removal(&report.f, &report.g, &report.h, &eps, &RemovalConfig::default()).unwrap();
    assert!(cert.verified);
    assert!(find_surviving_triple(&cert).is_none());
    let json = cert.to_json();
    assert_eq!(json["verified"], true);
}

#[test]
fn graph_form_removal_is_triangle_free() {
    let mut r = rng(9);
    let n = 60;
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < 0.15 {
                g.add_edge(u, v);
            }
        }
    }
    let t = g.triangle_count() as f64;
    let eps = (6.0 * t / (n as f64).powi(3)).max(1e-6) * 1.0001;
    assert!(matches!(
        graph_triangle_removal::<f64>(&g, &eps, &RemovalConfig::default()),
        Err(Error::CertificateFailure(_))
    ));
    let cfg = RemovalConfig { repair: true, ..Default::default() };
    let out = graph_triangle_removal::<f64>(&g, &eps, &cfg).unwrap();
    assert!(out.certificate.verified);
    assert_eq!(out.triangles_after, 0);
    assert!(out.pruned.is_subgraph_of(&g));
    assert_eq!(out.pruned.edge_count() + out.deleted_edges, g.edge_count());
}

#[test]
fn edge_disjoint_triangles_force_lambda3() {
    // triangles {i, m+i, 2m+((i+j) mod m)}-style packing: vertex classes U,V,W of
    // size m and triangles (u, v, w) with w ≡ u + v (mod m) are edge-disjoint
    let m = 7;
    let n = 3 * m;
    let mut g = Graph::empty(n);
    let mut count = 0;
    for u in 0..m {
        for v in 0..m {
            let w = (u + v) % m;
            g.add_edge(u, m + v);
            g.add_edge(m + v, 2 * m + w);
            g.add_edge(2 * m + w, u);
            count += 1;
        }
    }
    let k: Kernel2<Q> = g.indicator();
    let lam = lambda3(&k, &k, &k).unwrap();
    // every one of the δn² edge-disjoint triangles contributes 6 ordered triples
    assert!(lam >= q(6 * count, (n * n * n) as i64));
    assert_eq!(lam, q(6 * g.triangle_count() as i64, (n * n * n) as i64));
}

#[test]
fn roth_pipeline_identities() {
    let full = ResidueSet::full_cyclic(12);
    let rep = roth_pipeline::<Q>(&full).unwrap();
    assert_eq!(rep.lambda3, Q::one());
    let empty = ResidueSet::cyclic(12, []).unwrap();
    assert!(roth_pipeline::<Q>(&empty).unwrap().lambda3.is_zero());
    let mut r = rng(31);
    let a = ResidueSet::cyclic(31, (0..31).filter(|_| r.gen::<bool>())).unwrap();
    let rep = roth_pipeline::<Q>(&a).unwrap();
    let oracle = naive_ap_count(31, a.elements(), 3);
    assert_eq!(rep.ordered_count, oracle);
    assert_eq!(rep.lambda3, q(oracle as i64, 31 * 31));
    assert_eq!(naive_lambda3(&rep.f, &rep.g, &rep.h), rep.lambda3);
    assert!(rep.identity_holds);
}
