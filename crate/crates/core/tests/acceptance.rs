//! One test per acceptance criterion. Each prints a PASS/FAIL line straight
//! to stderr (bypassing the harness capture) and then asserts.

mod common;

use common::*;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use std::io::Write;
use std::time::{Duration, Instant};
use szlab::boxnorms::*;
use szlab::constructions::{behrend_set, random_set};
use szlab::dynamics::*;
use szlab::graph::Graph;
use szlab::partition::Factor;
use szlab::progressions::{count_progressions, Ambient, ResidueSet};
use szlab::ramsey::verify::*;
use szlab::ramsey::*;
use szlab::regularity::*;
use szlab::relative::*;
use szlab::scalar::pow_u;
use szlab::Rational;

const C1_BUDGET: Duration = Duration::from_secs(5);
const C2_BUDGET: Duration = Duration::from_secs(10);
const C3_BUDGET: Duration = Duration::from_secs(1);
const C4_BUDGET: Duration = Duration::from_secs(1);
const C6_TOL: f64 = 1e-12;
const C7_SLACK: f64 = 1e-9;
const C7_ORACLE_TOL: f64 = 1e-12;
const C8_SLACK: f64 = 1e-9;
const C12_SIGMAS: f64 = 4.0;
const C12_OCTAHEDRAL_TOL: f64 = 0.15;
const C12_DRIFT: f64 = 0.25;
const C12_SUM_TOL: f64 = 1e-9;
/// Seed means at n = 500, p = 3/10, seeds 0..20, default structure config,
/// frozen from a reference run. Regression baselines only.
const BASE_F2_MASS: f64 = 0.98851;
const BASE_F3_BOX: f64 = 0.04753;
const BASE_GVN_SLACK: f64 = 3.03791;

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("{} criterion {n}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {n} failed: {detail}");
}

fn nested_loop_count(a: &ResidueSet, k: usize) -> u64 {
    let Ambient::Cyclic { modulus } = a.ambient() else { unreachable!() };
    let m = modulus as i64;
    let mut t = 0;
    for n in 0..m {
        for r in 0..m {
            t += (0..k as i64).all(|j| a.contains((n + j * r) % m)) as u64;
        }
    }
    t
}

#[test]
fn criterion_01_ap_count_oracle() {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for seed in 0..200u64 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=60u64);
        let a = random_set(n, r.gen_range(0.05..0.95), seed).unwrap();
        for k in 2..=5 {
            let got = count_progressions(&a, k).unwrap().total_ordered;
            if got != nested_loop_count(&a, k) {
                mismatches.push((seed, k));
            }
        }
    }
    let t = start.elapsed();
    report(1, mismatches.is_empty() && t < C1_BUDGET, format!("200 sets × k∈{{2..5}}, mismatches {mismatches:?}, {t:.2?} (budget {C1_BUDGET:?})"));
}

#[test]
fn criterion_02_behrend_sparsity() {
    let start = Instant::now();
    let (a, p) = behrend_set(10_000, 2, 10, None).unwrap();
    let els = a.elements();
    let (mut brute, mut bad_step) = (0u64, 0u64);
    for &x in els {
        for &y in els {
            if x != y && a.contains(2 * y - x) {
                brute += 1;
                bad_step += ((y - x) % 100 != 0) as u64;
            }
        }
    }
    let c = count_progressions(&a, 3).unwrap();
    let t = start.elapsed();
    let pass = c.nontrivial == brute && brute <= 1_000_000 && bad_step == 0 && t < C2_BUDGET;
    report(
        2,
        pass,
        format!("|A| = {}, R = {}, nontrivial 3APs {} (brute {brute}) ≤ 10⁶, steps off 100ℤ: {bad_step}, {t:.2?}", a.len(), p.r, c.nontrivial),
    );
}

/// Independent of the library checker: scan all (a, r).
fn has_mono_3ap(colours: &[u32]) -> bool {
    let n = colours.len();
    (0..n).any(|a| (1..n).any(|r| a + 2 * r < n && colours[a] == colours[a + r] && colours[a] == colours[a + 2 * r]))
}

#[test]
fn criterion_03_van_der_waerden() {
    let start = Instant::now();
    let out = vdw_number(3, 2, 50, DEFAULT_VDW_GUARD).unwrap();
    let (pass, detail) = match out {
        VdwOutcome::Exact { w, certificate, .. } => {
            let cols = certificate.colours().to_vec();
            let indep = !has_mono_3ap(&cols);
            let all_nine = (0..512u32).all(|m| has_mono_3ap(&(0..9).map(|b| m >> b & 1).collect::<Vec<_>>()));
            let t = start.elapsed();
            (
                w == 9 && certificate.len() == 8 && avoids_mono_ap(&certificate, 3) && indep && all_nine && t < C3_BUDGET,
                format!("W(3,2) = {w}, certificate {cols:?}, checker ok {indep}, all 2⁹ colourings hit {all_nine}, {t:.2?}"),
            )
        }
        other => (false, format!("not resolved: {other:?}")),
    };
    report(3, pass, detail);
}

#[test]
fn criterion_04_schur() {
    let start = Instant::now();
    let mut ok = true;
    for idx in 0..32u64 {
        let c = Colouring::from_index(5, 2, idx);
        match schur_witness(&c) {
            Some(w) => {
                let (x, y) = (w.x, w.y);
                ok &= x + y <= 5 && c.at(x) == c.at(y) && c.at(x) == c.at(x + y);
            }
            None => ok = false,
        }
    }
    let avoid = Colouring::new(2, vec![1, 2, 2, 1]).unwrap();
    let none = schur_witness(&avoid).is_none();
    let t = start.elapsed();
    report(4, ok && none && t < C4_BUDGET, format!("32 colourings of [1,5] witnessed: {ok}, {{1,4}}/{{2,3}} free: {none}, {t:.2?}"));
}

#[test]
fn criterion_05_ergodic_exactness() {
    let (mut avg_ok, mut pyth_ok, mut factors) = (0, 0, 0);
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=1000usize);
        let sys = FiniteSystem::random(n, seed).unwrap();
        let f: Vec<Q> = (0..n).map(|_| q(r.gen_range(-6..=6), r.gen_range(1..=5))).collect();
        let y0 = invariant_factor(&sys);
        let target = cond_exp(&f, &y0, &sys).unwrap();
        avg_ok += (ergodic_average(&f, &sys, &sys.global_period()).unwrap() == target) as usize;
        let k = r.gen_range(1..=6);
        let labels: Vec<usize> = (0..n).map(|_| r.gen_range(0..k)).collect();
        for b in [y0, Factor::trivial(n), Factor::from_labels(&labels, k)] {
            let e = cond_exp(&f, &b, &sys).unwrap();
            let resid: Vec<Q> = f.iter().zip(&e).map(|(a, b)| a - b).collect();
            factors += 1;
            pyth_ok += (l2_norm_sq(&f, &sys) == l2_norm_sq(&e, &sys) + l2_norm_sq(&resid, &sys)) as usize;
        }
    }
    report(
        5,
        avg_ok == 100 && pyth_ok == factors,
        format!("average at the global period = E(f|Y₀) on {avg_ok}/100 systems; Pythagoras {pyth_ok}/{factors} factors"),
    );
}

#[test]
fn criterion_06_eigenfunction_recurrence() {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut r = rng(6);
    for n in 1..=64usize {
        let sys = FiniteSystem::cycle(n).unwrap();
        for freq in [0, 1, 2, (n / 2) as i64, n as i64 - 1] {
            let c = Complex64::new(r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5));
            let f: Vec<Complex64> = (0..n)
                .map(|x| c * Complex64::from_polar(1.0, std::f64::consts::TAU * (freq * x as i64) as f64 / n as f64))
                .collect();
            let f2: Vec<Complex64> = f.iter().map(|z| z.conj() * z.conj()).collect();
            let len = BigUint::from(r.gen_range(1..=3 * n as u64));
            let v = multi_recurrence_average_complex(&[f.clone(), f2, f.clone()], &sys, &len).unwrap();
            let l4: f64 = f.iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>() / n as f64;
            worst = worst.max((v - Complex64::new(l4, 0.0)).norm());
            cases += 1;
        }
    }
    report(6, worst <= C6_TOL, format!("{cases} scaled characters, N ≤ 64: max |avg − ∫|f|⁴| = {worst:.2e} (tol {C6_TOL:e})"));
}

fn kernel3(n: (usize, usize, usize), r: &mut impl Rng) -> Kernel3<f64> {
    let (a, b, c) = n;
    let v = (0..a * b * c).map(|_| r.gen_range(-1.0..1.0)).collect();
    Kernel3::new(MeasuredSpace::uniform(a), MeasuredSpace::uniform(b), MeasuredSpace::uniform(c), v).unwrap()
}

fn naive_box3_pow8(f: &Kernel3<f64>) -> f64 {
    let (nx, ny, nz) = f.shape();
    let mut s = 0.0;
    for x in 0..nx {
        for x2 in 0..nx {
            for y in 0..ny {
                for y2 in 0..ny {
                    for z in 0..nz {
                        for z2 in 0..nz {
                            let mut p = 1.0;
                            for (a, b, c) in [(x, y, z), (x, y, z2), (x, y2, z), (x, y2, z2), (x2, y, z), (x2, y, z2), (x2, y2, z), (x2, y2, z2)] {
                                p *= f.get(a, b, c);
                            }
                            s += p;
                        }
                    }
                }
            }
        }
    }
    s / ((nx * nx * ny * ny * nz * nz) as f64)
}

fn signed_kernel(nx: usize, ny: usize, r: &mut impl Rng) -> Kernel2<f64> {
    let scale: f64 = r.gen();
    Kernel2::uniform(nx, ny, (0..nx * ny).map(|_| scale * r.gen_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn criterion_07_norm_inequalities() {
    // worst (lhs − rhs) per inequality, and worst oracle deviation
    let mut worst = [f64::NEG_INFINITY; 4];
    let mut oracle = 0.0f64;
    for seed in 0..1000u64 {
        let mut r = rng(70_000 + seed);
        let (nx, ny) = (r.gen_range(1..=12), r.gen_range(1..=12));
        let fs: Vec<Kernel2<f64>> = (0..4).map(|_| signed_kernel(nx, ny, &mut r)).collect();
        let norms: Vec<f64> = fs.iter().map(box2_norm).collect();
        let inner = gowers_inner(&fs[0], &fs[1], &fs[2], &fs[3]).unwrap();
        worst[0] = worst[0].max(inner.abs() - norms.iter().product::<f64>());

        let g: Vec<f64> = (0..ny).map(|_| r.gen_range(-1.0..1.0)).collect();
        let h: Vec<f64> = (0..nx).map(|_| r.gen_range(-1.0..1.0)).collect();
        worst[1] = worst[1].max(bilinear(&fs[0], &g, &h).unwrap().abs() - norms[0]);

        let nz = r.gen_range(1..=12);
        let f = signed_kernel(nx, ny, &mut r);
        let gk = signed_kernel(ny, nz, &mut r);
        let hk = Kernel2::uniform(nz, nx, (0..nz * nx).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
        let l3 = lambda3(&f, &gk, &hk).unwrap();
        worst[2] = worst[2].max(l3.abs() - box2_norm(&f).min(box2_norm(&gk)).min(box2_norm(&hk)));

        let m = r.gen_range(1..=5);
        let ks: Vec<Kernel3<f64>> = (0..4).map(|_| kernel3((m, m, m), &mut r)).collect();
        let l4 = lambda4(&ks[0], &ks[1], &ks[2], &ks[3]).unwrap();
        worst[3] = worst[3].max(l4.abs() - ks.iter().map(box3_norm).fold(f64::INFINITY, f64::min));

        oracle = oracle.max((box2_pow4(&fs[0]) - naive_box2_pow4(&fs[0])).abs());
        let k3 = kernel3((r.gen_range(1..=5), r.gen_range(1..=5), r.gen_range(1..=5)), &mut r);
        oracle = oracle.max((box3_pow8(&k3) - naive_box3_pow8(&k3)).abs());
    }
    let pass = worst.iter().all(|w| *w <= C7_SLACK) && oracle <= C7_ORACLE_TOL;
    report(
        7,
        pass,
        format!(
            "1000 instances: max excess GCS {:.1e}, bilinear {:.1e}, Λ₃ {:.1e}, Λ₄ {:.1e} (slack {C7_SLACK:e}); box oracles {oracle:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    );
}

/// A rational η ≤ d^{1/4} with η⁴ ≤ d checked exactly.
fn eta_below(d4: &Q) -> Option<Q> {
    let approx = d4.to_f64()?.powf(0.25);
    let mut k = (approx * 1000.0).floor() as i64;
    while k > 0 {
        let eta = q(k, 1000);
        if pow_u(&eta, 4) <= *d4 {
            return Some(eta);
        }
        k -= 1;
    }
    None
}

#[test]
fn criterion_08_constructive_constants() {
    let mut corr_ok = 0;
    let mut worst_corr = f64::INFINITY;
    for seed in 0..100u64 {
        let mut r = rng(80_000 + seed);
        let (nx, ny) = (r.gen_range(1..=12), r.gen_range(1..=12));
        let f = if seed % 2 == 0 { sign_kernel_f(nx, ny, seed) } else { signed_kernel(nx, ny, &mut r) };
        let eta = box2_norm(&f);
        if eta == 0.0 {
            corr_ok += 1;
            continue;
        }
        if let Ok(c) = correlate_with_structure(&f, &eta) {
            let margin = c.corr.abs() - eta.powi(4) / 4.0;
            worst_corr = worst_corr.min(margin);
            corr_ok += (margin >= -C8_SLACK) as usize;
        }
    }

    let (mut inc_ok, mut inc_runs) = (0, 0);
    for seed in 0..100u64 {
        let mut r = rng(81_000 + seed);
        let (nx, ny) = (r.gen_range(2..=8), r.gen_range(2..=8));
        let f = unit_kernel_q(nx, ny, 4, 81_000 + seed);
        let lx: Vec<usize> = (0..nx).map(|_| r.gen_range(0..2)).collect();
        let ly: Vec<usize> = (0..ny).map(|_| r.gen_range(0..2)).collect();
        let pf = ProductFactor::new(Factor::from_labels(&lx, 1), Factor::from_labels(&ly, 1));
        let resid = f.sub(&naive_cond_exp(&f, &pf.x, &pf.y)).unwrap();
        let Some(eta) = eta_below(&naive_box2_pow4(&resid)) else { continue };
        inc_runs += 1;
        if let Ok(step) = energy_increment_step(&f, &pf, &eta) {
            // energies rechecked from the definition ∫ E(f|B)²
            let before = l2_sq_naive(&naive_cond_exp(&f, &pf.x, &pf.y));
            let after = l2_sq_naive(&naive_cond_exp(&f, &step.factor.x, &step.factor.y));
            let ok = before == step.energy_before
                && after == step.energy_after
                && after.clone() - before >= pow_u(&eta, 8) / q(16, 1)
                && step.factor.x.refines(&pf.x)
                && step.factor.y.refines(&pf.y);
            inc_ok += ok as usize;
        }
    }

    let mut kvn_ok = 0;
    for seed in 0..100u64 {
        let mut r = rng(82_000 + seed);
        let (nx, ny) = (r.gen_range(1..=12), r.gen_range(1..=12));
        let eta = [0.5, 0.3, 0.2, 0.1][seed as usize % 4];
        let f = unit_kernel_f(nx, ny, 82_000 + seed);
        if let Ok(out) = kvn_decompose(&f, &eta, &ProductFactor::trivial(nx, ny)) {
            let bound = (16.0 / eta.powi(8)).ceil() as usize;
            kvn_ok += (out.steps <= bound && (out.stalled || out.defect_pow4 < eta.powi(4))) as usize;
        }
    }
    report(
        8,
        corr_ok == 100 && inc_runs == 100 && inc_ok == 100 && kvn_ok == 100,
        format!(
            "correlation ≥ η⁴/4 on {corr_ok}/100 (worst margin {worst_corr:.2e}); exact increment ≥ η⁸/16 on {inc_ok}/{inc_runs}; KvN within ⌈16/η⁸⌉ on {kvn_ok}/100"
        ),
    );
}

fn srl_recheck(f: &Kernel2<Q>, d: &Decomposition<Q>, tau: &Q) -> [bool; 4] {
    let sum = d.f1.add(&d.f2).unwrap().add(&d.f3).unwrap() == *f && d.f1 == naive_cond_exp(f, &d.factors.x, &d.factors.y);
    let positive = in_unit(&d.f1) && in_unit(&d.f1.add(&d.f2).unwrap());
    let small = l2_sq_naive(&d.f2) <= tau.clone() * tau.clone();
    let f_of_m: num_bigint::BigInt = d.f_of_m.parse().unwrap();
    let uniform = d.uniformity_bound == Q::new(1.into(), f_of_m)
        && naive_box2_pow4(&d.f3) <= pow_u(&d.uniformity_bound, 4)
        && d.factors.max_complexity() <= d.m;
    [sum, positive, small, uniform]
}

#[test]
fn criterion_09_regularity_decomposition() {
    let mut counts = [0usize; 4];
    let mut errors = Vec::new();
    for seed in 0..50u64 {
        let mut r = rng(90_000 + seed);
        let (nx, ny) = (r.gen_range(1..=32), r.gen_range(1..=32));
        let den = [1, 2, 4, 8][r.gen_range(0..4)];
        let f = if seed % 5 == 0 {
            let (x, y) = (random_measure_q(nx, seed), random_measure_q(ny, seed + 1));
            let v = (0..nx * ny).map(|_| q(r.gen_range(0..=den), den)).collect();
            Kernel2::new(x, y, v).unwrap()
        } else {
            unit_kernel_q(nx, ny, den, 90_000 + seed)
        };
        let tau = [q(1, 2), q(1, 3), q(1, 4)][seed as usize % 3].clone();
        let growth = [Growth::Affine { a: 1, b: 1 }, Growth::Affine { a: 2, b: 2 }][seed as usize % 2].clone();
        match regularity_decompose(&f, &tau, &growth) {
            Ok(d) => {
                for (c, ok) in counts.iter_mut().zip(srl_recheck(&f, &d, &tau)) {
                    *c += ok as usize;
                }
            }
            Err(e) => errors.push(format!("seed {seed}: {e}")),
        }
    }
    report(
        9,
        counts == [50; 4],
        format!("50 instances ≤ 32×32: sum {}, [0,1] {}, ‖f₂‖₂ ≤ τ {}, ‖f₃‖□² ≤ 1/F(M) {}; errors {errors:?}", counts[0], counts[1], counts[2], counts[3]),
    );
}

fn vanishes_pointwise<S: szlab::Scalar>(cert: &RemovalCertificate<S>, nx: usize, ny: usize, nz: usize) -> bool {
    (0..nx).all(|x| (0..ny).all(|y| (0..nz).all(|z| !(cert.contains(0, x, y) && cert.contains(1, y, z) && cert.contains(2, z, x)))))
}

fn triangles_by_enumeration(g: &Graph) -> u64 {
    let n = g.n();
    let mut t = 0;
    for u in 0..n {
        for v in u + 1..n {
            if g.has_edge(u, v) {
                t += (v + 1..n).filter(|&w| g.has_edge(u, w) && g.has_edge(v, w)).count() as u64;
            }
        }
    }
    t
}

fn gnp_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < p {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Outcome of one removal run: a certificate straight from the τ schedule,
/// or a loud refusal followed by a repaired certificate.
enum Run {
    Direct(bool),
    Repaired(bool),
    Error(String),
}

fn removal_run<S: szlab::Scalar>(f: &Kernel2<S>, g: &Kernel2<S>, h: &Kernel2<S>, eps: &S) -> Run {
    let (nx, ny, nz) = (f.nx(), f.ny(), g.ny());
    match strong_triangle_removal(f, g, h, eps, &RemovalConfig::default()) {
        Ok(c) => Run::Direct(c.verified && c.repairs.is_empty() && vanishes_pointwise(&c, nx, ny, nz)),
        Err(szlab::Error::CertificateFailure(_)) => {
            let cfg = RemovalConfig { repair: true, ..Default::default() };
            match strong_triangle_removal(f, g, h, eps, &cfg) {
                Ok(c) => Run::Repaired(c.verified && !c.repairs.is_empty() && vanishes_pointwise(&c, nx, ny, nz)),
                Err(e) => Run::Error(e.to_string()),
            }
        }
        Err(e) => Run::Error(e.to_string()),
    }
}

#[test]
fn criterion_10_removal_certificates() {
    let mut runs = Vec::new();
    // random dense triples
    for seed in 0..44u64 {
        let mut r = rng(100_000 + seed);
        let (nx, ny, nz) = (r.gen_range(1..=8), r.gen_range(1..=8), r.gen_range(1..=8));
        let base = 100_000 + 3 * seed;
        let (f, g, h) = (unit_kernel_q(nx, ny, 4, base), unit_kernel_q(ny, nz, 4, base + 1), unit_kernel_q(nz, nx, 4, base + 2));
        let eps = lambda3(&f, &g, &h).unwrap() + q(1, 1000);
        runs.push(removal_run(&f, &g, &h, &eps));
    }
    // sparse float triples
    for seed in 0..3u64 {
        let n = 12;
        let mk = |s: u64| {
            let mut r = rng(s);
            Kernel2::uniform(n, n, (0..n * n).map(|_| if r.gen::<f64>() < 0.2 { r.gen::<f64>() } else { 0.0 }).collect()).unwrap()
        };
        let (f, g, h) = (mk(110_000 + seed), mk(111_000 + seed), mk(112_000 + seed));
        let eps = lambda3(&f, &g, &h).unwrap() * 1.0001 + 1e-12;
        runs.push(removal_run(&f, &g, &h, &eps));
    }
    // Behrend sets in [1, N], embedded in ℤ/(2N+1)ℤ so that no progression wraps
    let mut behrend = Vec::new();
    for (n, d, m) in [(100u64, 2u32, 10u64), (130, 2, 11), (150, 2, 10)] {
        let (b, _) = behrend_set(n, d, m, None).unwrap();
        let a = ResidueSet::cyclic(2 * n + 1, b.elements().iter().copied()).unwrap();
        let rep = roth_pipeline::<f64>(&a).unwrap();
        behrend.push(format!("N={n} |A|={}", a.len()));
        runs.push(if rep.identity_holds { removal_run(&rep.f, &rep.g, &rep.h, &(rep.lambda3 * 1.0001)) } else { Run::Error(format!("Roth identity fails at N={n}")) });
    }
    let direct = runs.iter().filter(|r| matches!(r, Run::Direct(_))).count();
    let repaired = runs.iter().filter(|r| matches!(r, Run::Repaired(_))).count();
    let sound = runs.iter().filter(|r| matches!(r, Run::Direct(true) | Run::Repaired(true))).count();
    let errors: Vec<&String> = runs.iter().filter_map(|r| if let Run::Error(e) = r { Some(e) } else { None }).collect();
    // graph form
    let mut graph = Vec::new();
    let mut graph_ok = true;
    for (n, p) in [(100, 0.1), (200, 0.1), (300, 0.08)] {
        let g = gnp_graph(n, p, 120_000 + n as u64);
        let before = triangles_by_enumeration(&g);
        let eps = (6.0 * before as f64 / (n as f64).powi(3)).max(1e-9) * 1.0001;
        let cfg = RemovalConfig { repair: true, ..Default::default() };
        match graph_triangle_removal::<f64>(&g, &eps, &cfg) {
            Ok(out) => {
                let after = triangles_by_enumeration(&out.pruned);
                graph_ok &= after == 0 && out.pruned.is_subgraph_of(&g) && out.certificate.verified;
                graph.push(format!("n={n}: {before}→{after} triangles, {} edges deleted", out.deleted_edges));
            }
            Err(e) => {
                graph_ok = false;
                graph.push(format!("n={n}: {e}"));
            }
        }
    }
    report(
        10,
        runs.len() == 50 && sound == 50 && graph_ok,
        format!(
            "{sound}/{} runs vanish pointwise ({direct} from the τ schedule, {repaired} refused loudly then repaired; Behrend: {}); errors {errors:?}; graph form: {}",
            runs.len(),
            behrend.join(", "),
            graph.join("; ")
        ),
    );
}

#[test]
fn criterion_11_roth_identity() {
    let mut ok = 0;
    for seed in 0..100u64 {
        let mut r = rng(110_000 + seed);
        let n = r.gen_range(1..=50u64);
        let a = random_set(n, r.gen_range(0.0..1.0), seed).unwrap();
        let rep = roth_pipeline::<Q>(&a).unwrap();
        let oracle = naive_ap_count(n, a.elements(), 3);
        let nn = Q::from_integer((n as i64).into());
        ok += (rep.lambda3.clone() * nn.clone() * nn == Q::from_integer((oracle as i64).into()) && rep.identity_holds) as usize;
    }
    report(11, ok == 100, format!("Λ₃·N² = ordered 3AP count on {ok}/100 random sets, N ≤ 50"));
}

fn within_drift(value: f64, base: f64) -> bool {
    (value - base).abs() <= C12_DRIFT * base.abs()
}

#[test]
fn criterion_12_sparse_suite() {
    let n = 500;
    let p = q(3, 10);
    let seeds = 20u64;
    let (mut mean_ok, mut dual_ok, mut inv_ok, mut removal_ok) = (0, 0, 0, 0);
    let mut octa = Vec::new();
    let (mut f2_mass, mut f3_box, mut slack) = (0.0, 0.0, 0.0);
    for seed in 0..seeds {
        let nu = sample_gnp_weight(n, &p, seed).unwrap();
        mean_ok += ((nu.mean::<f64>() - 1.0).abs() <= C12_SIGMAS * nu.mean_sigma()) as usize;

        let lf = linear_forms_check::<f64>(&nu, C12_OCTAHEDRAL_TOL, DEFAULT_OCTAHEDRAL_GUARD).unwrap();
        octa.push(lf.get("octahedral").unwrap().value);

        let h = nu.host();
        let fnu_q: Kernel2<Rational> = h.indicator::<Rational>().mul(&nu.kernel()).unwrap();
        let d = dual_function(&fnu_q);
        dual_ok += (fnu_q.mul(&d).unwrap().integral() == box2_pow4(&fnu_q)) as usize;

        let f: Kernel2<f64> = h.indicator();
        let fnu = f.mul(&nu.kernel()).unwrap();
        let dec = structure_decompose(&f, &nu, &StructureConfig::default()).unwrap();
        let total = dec.f1.add(&dec.f2).unwrap().add(&dec.f3).unwrap();
        let sum = total.values().iter().zip(fnu.values()).all(|(a, b)| (a - b).abs() <= C12_SUM_TOL * b.abs().max(1.0));
        let clip = dec.f1.in_range(&0.0, &1.0);
        let pos = dec.f1.add(&dec.f3).unwrap().values().iter().all(|v| *v >= 0.0) && dec.f2.values().iter().all(|v| *v >= 0.0);
        inv_ok += (sum && clip && pos && dec.invariants.all()) as usize;
        f2_mass += dec.f2_mass;
        f3_box += dec.f3_box;
        slack += relative_gvn_check(&fnu, &fnu, &fnu, &nu).unwrap().margin;

        let rep = relative_removal_experiment(&h, &nu, &0.05, &RelativeRemovalConfig::default()).unwrap();
        removal_ok += (triangles_by_enumeration(&rep.pruned) == 0 && rep.pruned.is_subgraph_of(&h)) as usize;
    }
    let s = seeds as f64;
    let (f2_mass, f3_box, slack) = (f2_mass / s, f3_box / s, slack / s);
    let octa_ok = octa.iter().filter(|v| (*v - 1.0).abs() <= C12_OCTAHEDRAL_TOL).count();
    let octa_mean = octa.iter().sum::<f64>() / s;
    let drift = [within_drift(f2_mass, BASE_F2_MASS), within_drift(f3_box, BASE_F3_BOX), within_drift(slack, BASE_GVN_SLACK)];
    let k = seeds as usize;
    let pass = mean_ok == k && octa_ok == k && dual_ok == k && inv_ok == k && removal_ok == k && drift.iter().all(|d| *d);
    report(
        12,
        pass,
        format!(
            "n=500 p=3/10, 20 seeds: mean within 4σ {mean_ok}/20; octahedral within {C12_OCTAHEDRAL_TOL} {octa_ok}/20 (mean {octa_mean:.4}); \
             dual identity {dual_ok}/20; structure invariants {inv_ok}/20; triangle-free after removal {removal_ok}/20; \
             ∫f₂ {f2_mass:.5} (base {BASE_F2_MASS}), ‖f₃‖□² {f3_box:.5} (base {BASE_F3_BOX}), gvn slack {slack:.5} (base {BASE_GVN_SLACK})"
        ),
    );
}
