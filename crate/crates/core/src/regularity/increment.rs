use super::factor::{atom_table, energy_of, expand, require_unit, ProductFactor};
use crate::boxnorms::{bilinear, box3_pow8, row_gram, weighted_pair_sum, Kernel2, Kernel3};
use crate::error::{Error, Result};
use crate::partition::Factor;
use crate::scalar::{pairwise_sum, pow_u, Scalar};
use std::cmp::Ordering;

/// Sets A ⊆ X, B ⊆ Y with |∫∫ 1_A 1_B f| large, plus the pigeonholed
/// witness (x′, y′) whose row and column produced them.
#[derive(Clone, Debug)]
pub struct Correlation<S> {
    pub a: Vec<bool>,
    pub b: Vec<bool>,
    pub corr: S,
    pub witness: (usize, usize),
    pub witness_value: S,
}

fn require_signed<S: Scalar>(f: &Kernel2<S>) -> Result<()> {
    if !f.in_range(&-S::one(), &S::one()) {
        return Err(Error::invalid("f must take values in [-1,1]"));
    }
    Ok(())
}

/// Level-set chains of `vals`: positive values give the upper sets
/// {v ≥ s} (s descending), negative values the lower sets {v ≤ s}
/// (s ascending). Each chain is a list of index groups added in order.
fn level_chains<S: Scalar>(vals: &[S]) -> [Vec<Vec<usize>>; 2] {
    let group = |mut idx: Vec<usize>, desc: bool| -> Vec<Vec<usize>> {
        idx.sort_by(|&i, &j| {
            let o = vals[i].partial_cmp(&vals[j]).unwrap_or(Ordering::Equal);
            (if desc { o.reverse() } else { o }).then(i.cmp(&j))
        });
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in idx {
            match out.last_mut() {
                Some(g) if vals[g[0]] == vals[i] => g.push(i),
                _ => out.push(vec![i]),
            }
        }
        out
    };
    let pos = (0..vals.len()).filter(|&i| vals[i].is_positive()).collect();
    let neg = (0..vals.len()).filter(|&i| vals[i].is_negative()).collect();
    [group(pos, true), group(neg, false)]
}

fn mask(n: usize, chain: &[Vec<usize>], upto: usize) -> Vec<bool> {
    let mut m = vec![false; n];
    for g in &chain[..=upto] {
        for &i in g {
            m[i] = true;
        }
    }
    m
}

/// Witness table G[x′,y′] = ∫∫ f(x,y) f(x,y′) f(x′,y) from the row Gram H.
fn witness_table<S: Scalar>(f: &Kernel2<S>, h: &[S]) -> Vec<S> {
    let (nx, ny) = (f.nx(), f.ny());
    let wf: Vec<S> = f.values().iter().enumerate().map(|(i, v)| f.x().weight(i / ny).clone() * v.clone()).collect();
    S::matmul(h, &wf, nx, nx, ny)
}

pub(crate) fn correlate_with_gram<S: Scalar>(f: &Kernel2<S>, h: &[S], threshold: &S) -> Result<Correlation<S>> {
    let (nx, ny) = (f.nx(), f.ny());
    let g = witness_table(f, h);
    let need = threshold.clone().relax();
    let Some(idx) = g.iter().position(|v| v.abs() >= need) else {
        let d4 = weighted_pair_sum(f.x().weights(), h, h);
        return Err(Error::PreconditionViolated(format!(
            "no witness row/column pair reaches {threshold}; measured ‖f‖⁴_□² = {d4}"
        )));
    };
    let (xp, yp) = (idx / ny, idx % ny);
    let u: Vec<S> = (0..nx).map(|x| f.get(x, yp).clone()).collect();
    let v: Vec<S> = f.row(xp).to_vec();
    let achains = level_chains(&u);
    let bchains = level_chains(&v);
    let target = (threshold.clone() / S::from_u8(4).unwrap()).relax();
    let wy = f.y().weights();
    for ac in &achains {
        // r(y) = Σ_{x ∈ A} μ(x) f(x,y), grown along the chain
        let mut r = vec![S::zero(); ny];
        for (ai, agroup) in ac.iter().enumerate() {
            for &x in agroup {
                let wx = f.x().weight(x).clone();
                for (ry, fy) in r.iter_mut().zip(f.row(x)) {
                    *ry = ry.clone() + wx.clone() * fy.clone();
                }
            }
            for bc in &bchains {
                let mut s = S::zero();
                for (bi, bgroup) in bc.iter().enumerate() {
                    for &y in bgroup {
                        s = s + wy[y].clone() * r[y].clone();
                    }
                    if s.abs() >= target {
                        let a = mask(nx, ac, ai);
                        let b = mask(ny, bc, bi);
                        let to_s = |m: &[bool]| m.iter().map(|&t| if t { S::one() } else { S::zero() }).collect::<Vec<S>>();
                        let corr = bilinear(f, &to_s(&b), &to_s(&a))?;
                        return Ok(Correlation { a, b, corr, witness: (xp, yp), witness_value: g[idx].clone() });
                    }
                }
            }
        }
    }
    Err(Error::PreconditionViolated(format!("level-set search found no pair reaching {target}")))
}

/// For f : X × Y → [−1,1] with ‖f‖_□² ≥ η, returns A, B with
/// |∫∫ 1_A(x) 1_B(y) f(x,y)| ≥ η⁴/4, following the pigeonhole-then-threshold
/// argument; both searches return the first hit in scan order.
pub fn correlate_with_structure<S: Scalar>(f: &Kernel2<S>, eta: &S) -> Result<Correlation<S>> {
    require_signed(f)?;
    let h = row_gram(f, f);
    correlate_with_gram(f, &h, &pow_u(eta, 4))
}

/// Sets A_XY, A_YZ, A_ZX (row-major masks over X×Y, Y×Z, Z×X) for
/// f : X × Y × Z → [−1,1] with ‖f‖_□³ ≥ η.
#[derive(Clone, Debug)]
pub struct Correlation3<S> {
    pub a_xy: Vec<bool>,
    pub a_yz: Vec<bool>,
    pub a_zx: Vec<bool>,
    pub corr: S,
    pub witness: (usize, usize, usize),
}

/// |∫ 1_{A_XY} 1_{A_YZ} 1_{A_ZX} f| ≥ η⁸/8. Exhaustive over the witness
/// triple and the three level-set chains, so intended for small kernels.
pub fn correlate_with_structure3<S: Scalar>(f: &Kernel3<S>, eta: &S) -> Result<Correlation3<S>> {
    if !f.values().iter().all(|v| *v >= -S::one() && *v <= S::one()) {
        return Err(Error::invalid("f must take values in [-1,1]"));
    }
    let (nx, ny, nz) = f.shape();
    let (xs, ys, zs) = f.spaces();
    let (wx, wy, wz) = (xs.weights(), ys.weights(), zs.weights());
    let fv = |x: usize, y: usize, z: usize| f.get(x, y, z).clone();
    let threshold = pow_u(eta, 8);
    let need = threshold.clone().relax();
    // with (x′,y′,z′) fixed, ∫ f(x,y,z) a(x,y) b(y,z) c(z,x) where the seven
    // remaining copies are grouped into two-variable factors
    let pieces = |xp: usize, yp: usize, zp: usize| {
        let a: Vec<S> = (0..nx * ny).map(|i| fv(i / ny, i % ny, zp) * fv(i / ny, yp, zp) * fv(xp, i % ny, zp)).collect();
        let b: Vec<S> = (0..ny * nz).map(|i| fv(xp, i / nz, i % nz)).collect();
        let c: Vec<S> = (0..nz * nx).map(|i| fv(i % nx, yp, i / nx) * fv(xp, yp, i / nx)).collect();
        (a, b, c)
    };
    let form = |a: &dyn Fn(usize, usize) -> S, b: &dyn Fn(usize, usize) -> S, c: &dyn Fn(usize, usize) -> S| {
        let mut terms = Vec::with_capacity(nx * ny * nz);
        for x in 0..nx {
            for y in 0..ny {
                let axy = a(x, y);
                if axy.is_zero() {
                    continue;
                }
                for z in 0..nz {
                    terms.push(wx[x].clone() * wy[y].clone() * wz[z].clone() * fv(x, y, z) * axy.clone() * b(y, z) * c(z, x));
                }
            }
        }
        pairwise_sum(&terms)
    };
    let mut found = None;
    'scan: for xp in 0..nx {
        for yp in 0..ny {
            for zp in 0..nz {
                let (a, b, c) = pieces(xp, yp, zp);
                let v = form(&|x, y| a[x * ny + y].clone(), &|y, z| b[y * nz + z].clone(), &|z, x| c[z * nx + x].clone());
                if v.abs() >= need {
                    found = Some((xp, yp, zp, a, b, c));
                    break 'scan;
                }
            }
        }
    }
    let Some((xp, yp, zp, a, b, c)) = found else {
        return Err(Error::PreconditionViolated(format!(
            "no witness triple reaches {threshold}; measured ‖f‖⁸_□³ = {}",
            box3_pow8(f)
        )));
    };
    let target = (threshold / S::from_u8(8).unwrap()).relax();
    let (ac, bc, cc) = (level_chains(&a), level_chains(&b), level_chains(&c));
    for ach in &ac {
        for ai in 0..ach.len() {
            let am = mask(nx * ny, ach, ai);
            for bch in &bc {
                for bi in 0..bch.len() {
                    let bm = mask(ny * nz, bch, bi);
                    // φ(z,x) = Σ_y μ(y) f(x,y,z) 1_A(x,y) 1_B(y,z)
                    let phi: Vec<S> = (0..nz * nx)
                        .map(|i| {
                            let (z, x) = (i / nx, i % nx);
                            let t: Vec<S> = (0..ny)
                                .filter(|&y| am[x * ny + y] && bm[y * nz + z])
                                .map(|y| wy[y].clone() * fv(x, y, z))
                                .collect();
                            wz[z].clone() * wx[x].clone() * pairwise_sum(&t)
                        })
                        .collect();
                    for cch in &cc {
                        let mut s = S::zero();
                        for (ci, cg) in cch.iter().enumerate() {
                            for &i in cg {
                                s = s + phi[i].clone();
                            }
                            if s.abs() >= target {
                                let cm = mask(nz * nx, cch, ci);
                                let ind = |m: &[bool], i: usize| if m[i] { S::one() } else { S::zero() };
                                let corr = form(&|x, y| ind(&am, x * ny + y), &|y, z| ind(&bm, y * nz + z), &|z, x| ind(&cm, z * nx + x));
                                return Ok(Correlation3 { a_xy: am, a_yz: bm, a_zx: cm, corr, witness: (xp, yp, zp) });
                            }
                        }
                    }
                }
            }
        }
    }
    Err(Error::PreconditionViolated(format!("level-set search found no triple reaching {target}")))
}

#[derive(Clone, Debug)]
pub struct IncrementStep<S> {
    pub factor: ProductFactor,
    pub correlation: Correlation<S>,
    pub defect_pow4: S,
    pub energy_before: S,
    pub energy_after: S,
}

struct Residual<S> {
    r: Kernel2<S>,
    gram: Vec<S>,
    defect_pow4: S,
    energy: S,
}

fn residual<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor) -> Result<Residual<S>> {
    let t = atom_table(f, pf)?;
    let r = f.sub(&expand(f, pf, &t.means))?;
    let gram = row_gram(&r, &r);
    let defect_pow4 = weighted_pair_sum(r.x().weights(), &gram, &gram);
    Ok(Residual { r, gram, defect_pow4, energy: energy_of(&t) })
}

fn refine(pf: &ProductFactor, c: &Correlation<impl Scalar>) -> Result<ProductFactor> {
    Ok(ProductFactor::new(pf.x.refine(&c.a)?, pf.y.refine(&c.b)?))
}

/// One energy increment: if ‖f − E(f|B)‖_□² ≥ η, adjoin the correlating
/// sets of the residual to each coordinate factor (complexity +1 each).
pub fn energy_increment_step<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor, eta: &S) -> Result<IncrementStep<S>> {
    require_unit(f, "f")?;
    let res = residual(f, pf)?;
    let threshold = pow_u(eta, 4);
    if res.defect_pow4.is_zero() || res.defect_pow4 < threshold.clone().relax() {
        return Err(Error::PreconditionViolated(format!(
            "residual □² defect⁴ {} is below η⁴ = {threshold}",
            res.defect_pow4
        )));
    }
    let correlation = correlate_with_gram(&res.r, &res.gram, &threshold)?;
    let factor = refine(pf, &correlation)?;
    let energy_after = super::factor::energy(f, &factor)?;
    Ok(IncrementStep { factor, correlation, defect_pow4: res.defect_pow4, energy_before: res.energy, energy_after })
}

#[derive(Clone, Debug)]
pub struct KvnOutcome<S> {
    pub factor: ProductFactor,
    pub steps: usize,
    /// Energy before each step and after the last.
    pub energies: Vec<S>,
    pub defect_pow4: S,
    /// Float mode only: a step could not certify its correlation.
    pub stalled: bool,
}

/// Koopman–von Neumann: iterate energy increments until the residual's
/// □² norm drops below η (or vanishes). Each step uses the measured defect
/// as its threshold, so the energy gain is at least defect⁸/16 ≥ η⁸/16.
pub fn kvn_decompose<S: Scalar>(f: &Kernel2<S>, eta: &S, initial: &ProductFactor) -> Result<KvnOutcome<S>> {
    require_unit(f, "f")?;
    if !eta.is_positive() {
        return Err(Error::invalid("η must be positive"));
    }
    let mut coords = vec![initial.x.clone(), initial.y.clone()];
    let run = shared_increment(&[(f, 0, 1)], &mut coords, &pow_u(eta, 4))?;
    Ok(KvnOutcome {
        factor: ProductFactor::new(coords[0].clone(), coords[1].clone()),
        steps: run.steps,
        energies: run.energies,
        defect_pow4: run.defects[0].clone(),
        stalled: run.stalled,
    })
}

pub(crate) struct SharedRun<S> {
    pub steps: usize,
    pub energies: Vec<S>,
    pub defects: Vec<S>,
    pub stalled: bool,
}

fn total_energy<S: Scalar>(kernels: &[(&Kernel2<S>, usize, usize)], coords: &[Factor]) -> Result<S> {
    let mut e = Vec::with_capacity(kernels.len());
    for &(k, i, j) in kernels {
        e.push(super::factor::energy(k, &ProductFactor::new(coords[i].clone(), coords[j].clone()))?);
    }
    Ok(pairwise_sum(&e))
}

/// Energy increment over several kernels sharing coordinate factors:
/// kernel (k, i, j) lives on coordinate i × coordinate j. Repeatedly the
/// first kernel whose residual defect⁴ reaches `threshold` is correlated and
/// its two coordinates refined, until every defect⁴ is below it.
pub(crate) fn shared_increment<S: Scalar>(
    kernels: &[(&Kernel2<S>, usize, usize)],
    coords: &mut [Factor],
    threshold: &S,
) -> Result<SharedRun<S>> {
    // every productive step strictly refines some coordinate factor
    let guard: usize = coords.iter().map(|c| c.len()).sum::<usize>() + 1;
    let mut energies = vec![total_energy(kernels, coords)?];
    let mut steps = 0;
    loop {
        let mut defects = Vec::with_capacity(kernels.len());
        let mut chosen = None;
        for (idx, &(k, i, j)) in kernels.iter().enumerate() {
            let pf = ProductFactor::new(coords[i].clone(), coords[j].clone());
            let res = residual(k, &pf)?;
            let active = !res.defect_pow4.is_zero() && res.defect_pow4 >= *threshold;
            defects.push(res.defect_pow4.clone());
            if active {
                chosen = Some((idx, res));
                break;
            }
        }
        let Some((idx, res)) = chosen else {
            return Ok(SharedRun { steps, energies, defects, stalled: false });
        };
        let (_, i, j) = kernels[idx];
        let stall = |mut defects: Vec<S>| {
            defects.resize(kernels.len(), S::zero());
            Ok(SharedRun { steps, energies: energies.clone(), defects, stalled: true })
        };
        if steps >= guard {
            if S::EXACT {
                return Err(Error::IterationLimit { limit: guard, detail: "energy increment failed to terminate".into() });
            }
            return stall(defects);
        }
        let c = match correlate_with_gram(&res.r, &res.gram, &res.defect_pow4) {
            Ok(c) => c,
            Err(e) if S::EXACT => return Err(e),
            Err(_) => return stall(defects),
        };
        coords[i] = coords[i].refine(&c.a)?;
        coords[j] = coords[j].refine(&c.b)?;
        steps += 1;
        energies.push(total_energy(kernels, coords)?);
    }
}
