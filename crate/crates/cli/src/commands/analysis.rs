use super::{by_mode, close, Ctx};
use crate::args::{to_ratio, Boxnorm, KernelSource, Lambda, Regularize, TriangleRemoval};
use crate::report::Outcome;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde_json::json;
use std::fs::File;
use std::io::BufReader;
use szlab::boxnorms::{read_kernel_binary, read_kernel_csv};
use szlab::boxnorms::{box2_norm, box2_pow4, box3_norm, box3_pow8, lambda3, lambda4, Kernel2, Kernel3, MeasuredSpace};
use szlab::graph::Graph;
use szlab::regularity::{graph_triangle_removal, regularity_decompose, strong_triangle_removal, Growth, RemovalCertificate, RemovalConfig, TauSchedule};
use szlab::relative::sample_gnp_weight;
use szlab::scalar::{pow_u, to_json};
use szlab::seed::{self, streams};
use szlab::{Error, Result, Scalar};

/// Entry ranges for random kernels.
#[derive(Clone, Copy)]
enum Range {
    Signed,
    Unit,
}

fn entry<S: Scalar>(rng: &mut impl Rng, range: Range, den: u64) -> S {
    let den = den as i64;
    let lo = match range {
        Range::Signed => -den,
        Range::Unit => 0,
    };
    if S::EXACT {
        S::from_frac(rng.gen_range(lo..=den), den)
    } else {
        S::from_f64(rng.gen_range(lo as f64 / den as f64..=1.0)).unwrap_or_else(S::zero)
    }
}

fn load_file<S: Scalar>(path: &str) -> Result<Kernel2<S>> {
    let file = File::open(path).map_err(|e| Error::InvalidArgument(format!("{path}: {e}")))?;
    if path.ends_with(".bin") {
        Ok(read_kernel_binary(file)?.convert())
    } else {
        read_kernel_csv(BufReader::new(file))
    }
}

/// `count` 2-kernels from files, or random ones on a uniform n × n grid.
fn kernels2<S: Scalar>(src: &KernelSource, count: usize, range: Range, seed_: u64) -> Result<Vec<Kernel2<S>>> {
    if let Some(n) = src.random {
        let mut rng = seed::rng(seed_, streams::KERNEL);
        let sp = MeasuredSpace::uniform(n);
        return (0..count)
            .map(|_| Kernel2::new(sp.clone(), sp.clone(), (0..n * n).map(|_| entry(&mut rng, range, src.den)).collect()))
            .collect();
    }
    if src.kernels.len() != count {
        return Err(Error::InvalidArgument(format!("expected {count} kernel file(s) or --random, got {}", src.kernels.len())));
    }
    src.kernels.iter().map(|p| load_file(p)).collect()
}

fn kernels3<S: Scalar>(src: &KernelSource, count: usize, seed_: u64) -> Result<Vec<Kernel3<S>>> {
    let n = src.random.ok_or_else(|| Error::InvalidArgument("3-kernels are random only; pass --random".into()))?;
    let mut rng = seed::rng(seed_, streams::KERNEL);
    let sp = MeasuredSpace::uniform(n);
    (0..count)
        .map(|_| Kernel3::new(sp.clone(), sp.clone(), sp.clone(), (0..n * n * n).map(|_| entry(&mut rng, Range::Signed, src.den)).collect()))
        .collect()
}

pub fn boxnorm(a: &Boxnorm, ctx: &Ctx) -> Result<Outcome> {
    if a.order == 3 {
        return by_mode!(ctx, box3_with(&a.source, ctx.seed));
    }
    by_mode!(ctx, box2_with(&a.source, ctx.seed))
}

fn box2_with<S: Scalar>(src: &KernelSource, seed_: u64) -> Result<Outcome> {
    let f = kernels2::<S>(src, 1, Range::Signed, seed_)?.remove(0);
    let pow = box2_pow4(&f);
    let mut out = Outcome::new(json!({"shape": [f.nx(), f.ny()], "pow4": to_json(&pow), "norm": box2_norm(&f)}));
    out.check("nonnegative", pow >= S::zero());
    if f.nx().max(f.ny()) <= 24 {
        let (wx, wy) = (f.x().weights(), f.y().weights());
        let mut sum = S::zero();
        for x in 0..f.nx() {
            for x2 in 0..f.nx() {
                for y in 0..f.ny() {
                    for y2 in 0..f.ny() {
                        let w = wx[x].clone() * wx[x2].clone() * wy[y].clone() * wy[y2].clone();
                        sum = sum + w * f.get(x, y).clone() * f.get(x, y2).clone() * f.get(x2, y).clone() * f.get(x2, y2).clone();
                    }
                }
            }
        }
        out.check("naive_sum", close(&sum, &pow));
    }
    Ok(out)
}

fn box3_with<S: Scalar>(src: &KernelSource, seed_: u64) -> Result<Outcome> {
    let f = kernels3::<S>(src, 1, seed_)?.remove(0);
    let pow = box3_pow8(&f);
    let (n, _, _) = f.shape();
    let mut out = Outcome::new(json!({"shape": [n, n, n], "pow8": to_json(&pow), "norm": box3_norm(&f)}));
    out.check("nonnegative", pow >= S::zero());
    if n <= 6 {
        let mut sum = S::zero();
        let idx = |v: usize, i: usize| v / n.pow(i as u32) % n;
        for t in 0..n.pow(6) {
            let (x, x2, y, y2, z, z2) = (idx(t, 0), idx(t, 1), idx(t, 2), idx(t, 3), idx(t, 4), idx(t, 5));
            let mut p = S::one();
            for (a, b, c) in [(x, y, z), (x, y, z2), (x, y2, z), (x, y2, z2), (x2, y, z), (x2, y, z2), (x2, y2, z), (x2, y2, z2)] {
                p = p * f.get(a, b, c).clone();
            }
            sum = sum + p;
        }
        let scale = S::from_u64((n as u64).pow(6)).unwrap_or_else(S::one);
        out.check("naive_sum", close(&(sum / scale), &pow));
    }
    Ok(out)
}

pub fn lambda(a: &Lambda, ctx: &Ctx) -> Result<Outcome> {
    if a.order == 4 {
        return by_mode!(ctx, lambda4_with(&a.source, ctx.seed));
    }
    by_mode!(ctx, lambda3_with(&a.source, ctx.seed))
}

fn triple_sum<S: Scalar>(f: &Kernel2<S>, g: &Kernel2<S>, h: &Kernel2<S>) -> S {
    let (wx, wy, wz) = (f.x().weights(), f.y().weights(), g.y().weights());
    let mut sum = S::zero();
    for x in 0..f.nx() {
        for y in 0..f.ny() {
            for z in 0..g.ny() {
                sum = sum + wx[x].clone() * wy[y].clone() * wz[z].clone() * f.get(x, y).clone() * g.get(y, z).clone() * h.get(z, x).clone();
            }
        }
    }
    sum
}

fn lambda3_with<S: Scalar>(src: &KernelSource, seed_: u64) -> Result<Outcome> {
    let k = kernels2::<S>(src, 3, Range::Signed, seed_)?;
    let (f, g, h) = (&k[0], &k[1], &k[2]);
    let value = lambda3(f, g, h)?;
    let norms = [box2_norm(f), box2_norm(g), box2_norm(h)];
    let mut out = Outcome::new(json!({"order": 3, "shape": [f.nx(), f.ny(), g.ny()], "value": to_json(&value), "box_norms": norms}));
    if f.nx().max(f.ny()).max(g.ny()) <= 40 {
        out.check("triple_sum", close(&triple_sum(f, g, h), &value));
    }
    // generalised von Neumann: |Λ₃| ≤ min □² once every kernel is 1-bounded
    if k.iter().all(|x| x.max_abs() <= S::one()) {
        let bound = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        out.check("von_neumann_bound", value.to_f64_lossy().abs() <= bound * (1.0 + 1e-9) + 1e-12);
    }
    Ok(out)
}

fn lambda4_with<S: Scalar>(src: &KernelSource, seed_: u64) -> Result<Outcome> {
    let k = kernels3::<S>(src, 4, seed_)?;
    let value = lambda4(&k[0], &k[1], &k[2], &k[3])?;
    let (n, _, _) = k[0].shape();
    let norms: Vec<f64> = k.iter().map(box3_norm).collect();
    let mut out = Outcome::new(json!({"order": 4, "shape": [n, n, n, n], "value": to_json(&value), "box_norms": norms}));
    if n <= 12 {
        let mut sum = S::zero();
        for x1 in 0..n {
            for x2 in 0..n {
                for x3 in 0..n {
                    for x4 in 0..n {
                        sum = sum + k[0].get(x1, x2, x3).clone() * k[1].get(x2, x3, x4).clone() * k[2].get(x3, x4, x1).clone() * k[3].get(x4, x1, x2).clone();
                    }
                }
            }
        }
        out.check("quadruple_sum", close(&(sum / S::from_u64((n as u64).pow(4)).unwrap_or_else(S::one)), &value));
    }
    let bound = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    out.check("von_neumann_bound", value.to_f64_lossy().abs() <= bound * (1.0 + 1e-9) + 1e-12);
    Ok(out)
}

fn parse_growth(s: &str, tau: &BigRational) -> Result<Growth> {
    if s == "removal" {
        return Ok(Growth::Removal { tau: tau.clone() });
    }
    let bad = || Error::InvalidArgument(format!("growth {s:?}: expected `affine:A,B` or `removal`"));
    let (a, b) = s.strip_prefix("affine:").and_then(|r| r.split_once(',')).ok_or_else(bad)?;
    Ok(Growth::Affine { a: a.trim().parse().map_err(|_| bad())?, b: b.trim().parse().map_err(|_| bad())? })
}

pub fn regularize(a: &Regularize, ctx: &Ctx) -> Result<Outcome> {
    let tau = to_ratio(&a.tau);
    let growth = parse_growth(&a.growth, &tau)?;
    by_mode!(ctx, regularize_with(&a.source, &tau, &growth, ctx.seed))
}

fn regularize_with<S: Scalar>(src: &KernelSource, tau: &BigRational, growth: &Growth, seed_: u64) -> Result<Outcome> {
    let f = kernels2::<S>(src, 1, Range::Unit, seed_)?.remove(0);
    let tau_s = S::from_ratio(tau);
    let d = regularity_decompose(&f, &tau_s, growth)?;
    let f2_l2 = d.f2.l2_sq();
    let f3_pow = box2_pow4(&d.f3);
    let mut out = Outcome::new(json!({
        "shape": [f.nx(), f.ny()],
        "growth": growth.describe(),
        "m": d.m,
        "stage": d.stage,
        "coarse_complexity": d.factors.complexity(),
        "fine_complexity": d.fine.complexity(),
        "f_of_m": d.f_of_m,
        "uniformity_bound": to_json(&d.uniformity_bound),
        "f2_l2_sq": to_json(&f2_l2),
        "f3_box_norm": box2_norm(&d.f3),
        "stalled": d.stalled,
    }));
    let total = d.f1.add(&d.f2)?.add(&d.f3)?;
    out.check("sum", total.values().iter().zip(f.values()).all(|(a, b)| close(a, b)));
    out.check("f1_in_unit", d.f1.in_range(&S::zero(), &S::one()));
    out.check("f1_plus_f2_in_unit", d.f1.add(&d.f2)?.in_range(&S::zero(), &S::one()));
    out.check("f2_l2_at_most_tau", f2_l2 <= tau_s.clone() * tau_s.clone() || close(&f2_l2, &(tau_s.clone() * tau_s)));
    if d.stalled {
        out.diagnostics.push("energy increment stalled in float mode; the □² bound on f₃ is not certified".into());
    } else {
        let b4 = pow_u(&d.uniformity_bound, 4);
        out.check("f3_box_within_bound", f3_pow <= b4 || close(&f3_pow, &b4));
    }
    Ok(out)
}

fn removal_config(a: &TriangleRemoval) -> RemovalConfig {
    RemovalConfig { tau: a.tau.as_deref().map_or(TauSchedule::Default, |t| TauSchedule::Fixed(to_ratio(t))), repair: a.repair }
}

/// ε defaults to Λ₃ + 1/1000, just above the input's own triangle density.
fn epsilon<S: Scalar>(a: &TriangleRemoval, lam: &S) -> S {
    match &a.eps {
        Some(e) => S::from_ratio(&to_ratio(e)),
        None => lam.clone() + S::from_frac(1, 1000),
    }
}

pub fn triangle_removal(a: &TriangleRemoval, ctx: &Ctx) -> Result<Outcome> {
    if a.graph.is_some() {
        return by_mode!(ctx, graph_removal_with(a, ctx.seed));
    }
    by_mode!(ctx, kernel_removal_with(a, ctx.seed))
}

/// ∫∫ k·1_{E^c} over the pair `which`, recomputed point by point.
fn outside_mass<S: Scalar>(cert: &RemovalCertificate<S>, k: &Kernel2<S>, which: usize) -> S {
    let (wx, wy) = (k.x().weights(), k.y().weights());
    let mut sum = S::zero();
    for p in 0..k.nx() {
        for q in 0..k.ny() {
            if !cert.contains(which, p, q) {
                sum = sum + wx[p].clone() * wy[q].clone() * k.get(p, q).clone();
            }
        }
    }
    sum
}

fn kernel_removal_with<S: Scalar>(a: &TriangleRemoval, seed_: u64) -> Result<Outcome> {
    let k = kernels2::<S>(&a.source, 3, Range::Unit, seed_)?;
    let (f, g, h) = (&k[0], &k[1], &k[2]);
    let lam = lambda3(f, g, h)?;
    let eps = epsilon(a, &lam);
    let cert = strong_triangle_removal(f, g, h, &eps, &removal_config(a))?;
    let mut out = Outcome::new(json!({"lambda3": to_json(&lam), "certificate": cert.to_json()}));
    out.check("certificate_self_check", cert.verified);
    let (nx, ny, nz) = (f.nx(), f.ny(), g.ny());
    if (nx * ny * nz) as f64 <= 1e9 {
        // E_XY(x,y)·E_YZ(y,z)·E_ZX(z,x) must vanish at every point
        let vanishes = (0..nx).all(|x| {
            (0..ny).filter(|&y| cert.contains(0, x, y)).all(|y| (0..nz).all(|z| !(cert.contains(1, y, z) && cert.contains(2, z, x))))
        });
        out.check("pointwise_vanishing", vanishes);
    } else {
        out.diagnostics.push("pointwise recheck skipped above 10⁹ points".into());
    }
    let masses = [outside_mass(&cert, f, 0), outside_mass(&cert, g, 1), outside_mass(&cert, h, 2)];
    out.check("removed_mass", masses.iter().zip(&cert.removed_mass).all(|(a, b)| close(a, b)));
    if !cert.repairs.is_empty() {
        out.diagnostics.push(format!("{} atom pair(s) dropped by repair", cert.repairs.len()));
    }
    Ok(out)
}

fn enumerate_triangles(g: &Graph) -> u64 {
    let mut count = 0;
    for (u, v) in g.edges() {
        count += (0..g.n()).filter(|&w| w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w)).count() as u64;
    }
    count / 3
}

fn graph_removal_with<S: Scalar>(a: &TriangleRemoval, seed_: u64) -> Result<Outcome> {
    let n = a.graph.unwrap_or(0);
    let p = to_ratio(a.p.as_deref().unwrap_or("1/2"));
    let g = sample_gnp_weight(n, &p, seed_)?.host();
    let before = g.triangle_count();
    let n3 = BigRational::from_integer(BigInt::from(n).pow(3));
    let lam = S::from_ratio(&(BigRational::from_integer(BigInt::from(6 * before)) / n3));
    let eps = epsilon(a, &lam);
    let r = graph_triangle_removal::<S>(&g, &eps, &removal_config(a))?;
    let mut out = Outcome::new(json!({
        "n": n,
        "p": p.to_string(),
        "edges": g.edge_count(),
        "lambda3": to_json(&lam),
        "epsilon": to_json(&eps),
        "deleted_edges": r.deleted_edges,
        "triangles_before": r.triangles_before,
        "triangles_after": r.triangles_after,
        "tau": r.certificate.tau.to_string(),
        "repairs": r.certificate.repairs.len(),
        "certificate_self_check": r.certificate.verified,
    }));
    out.check("subgraph", r.pruned.is_subgraph_of(&g));
    out.check("deleted_count", g.edge_count() - r.pruned.edge_count() == r.deleted_edges);
    out.check("triangle_free", enumerate_triangles(&r.pruned) == 0);
    Ok(out)
}
