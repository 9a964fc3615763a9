use super::dual::{build_dual_factor, dual_function, DualFactor};
use super::weight::{linear_forms_check, SparseWeight, DEFAULT_OCTAHEDRAL_GUARD};
use crate::boxnorms::{box2_norm, box2_pow4, Kernel2};
use crate::error::{Error, Result};
use crate::partition::Factor;
use crate::scalar::{pairwise_sum, pow_u, Scalar};
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct StructureConfig<S> {
    pub sigma: S,
    /// Stopping threshold on ‖fν − E(fν|B)‖_{□²}; defaults to σ.
    pub eta: Option<S>,
    /// Interval length ε of the dual factors.
    pub resolution: S,
    /// Atoms with E(ν|B) > 1 + κ are exceptional.
    pub kappa: S,
    pub max_iter: usize,
    pub shift_seed: u64,
    /// When set, refuse to run unless ν passes the linear forms check at
    /// this tolerance.
    pub linear_forms_tol: Option<f64>,
}

impl<S: Scalar> Default for StructureConfig<S> {
    fn default() -> Self {
        StructureConfig::new(S::from_frac(1, 4))
    }
}

impl<S: Scalar> StructureConfig<S> {
    pub fn new(sigma: S) -> Self {
        StructureConfig {
            sigma,
            eta: None,
            resolution: S::from_frac(1, 20),
            kappa: S::one(),
            max_iter: 16,
            shift_seed: 0,
            linear_forms_tol: None,
        }
    }

    pub fn eta(&self) -> S {
        self.eta.clone().unwrap_or_else(|| self.sigma.clone())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureInvariants {
    /// fν = f₁ + f₂ + f₃ (exactly in rational mode, to 1e−9 relative in float).
    pub sum: bool,
    pub f1_in_unit: bool,
    pub f2_nonnegative: bool,
    pub f1_plus_f3_nonnegative: bool,
}

impl StructureInvariants {
    pub fn all(&self) -> bool {
        self.sum && self.f1_in_unit && self.f2_nonnegative && self.f1_plus_f3_nonnegative
    }
}

/// fν = f₁ + f₂ + f₃ over a dual factor B. Per atom, with E = E(fν|B):
/// bad atoms (E(ν|B) > 1+κ) go wholly into f₂; otherwise f₁ = min(E, 1),
/// and where E > 1 the clipped excess (1 − 1/E)·fν goes into f₂ and
/// f₃ = fν/E − 1, keeping f₁ + f₃ = fν/E ≥ 0.
#[derive(Clone, Debug)]
pub struct StructureDecomposition<S> {
    pub f1: Kernel2<S>,
    pub f2: Kernel2<S>,
    pub f3: Kernel2<S>,
    /// None while B is still trivial.
    pub factor: Option<DualFactor<S>>,
    pub iterations: usize,
    /// ‖fν − E(fν|B)‖_{□²} before each refinement and at the end.
    pub residual_norms: Vec<f64>,
    pub f2_mass: S,
    pub f3_box: f64,
    pub clipped_atoms: usize,
    pub bad_atoms: usize,
    /// max 𝒟(ν+1), and the largest |generator| value, which it must dominate.
    pub dual_bound: f64,
    pub generator_max: f64,
    pub invariants: StructureInvariants,
}

struct Split<S> {
    f1: Kernel2<S>,
    f2: Kernel2<S>,
    f3: Kernel2<S>,
    clipped: usize,
    bad: usize,
}

fn atom_means<S: Scalar>(k: &Kernel2<S>, part: &Factor) -> Vec<S> {
    let (wx, wy) = (k.x().weights(), k.y().weights());
    let ny = k.ny();
    let na = part.n_atoms();
    let mut mass: Vec<Vec<S>> = vec![Vec::new(); na];
    let mut integ: Vec<Vec<S>> = vec![Vec::new(); na];
    for (c, v) in k.values().iter().enumerate() {
        let w = wx[c / ny].clone() * wy[c % ny].clone();
        let a = part.atom_of(c);
        integ[a].push(w.clone() * v.clone());
        mass[a].push(w);
    }
    (0..na)
        .map(|a| {
            let m = pairwise_sum(&mass[a]);
            if m.is_zero() {
                S::zero()
            } else {
                pairwise_sum(&integ[a]) / m
            }
        })
        .collect()
}

fn split<S: Scalar>(fnu: &Kernel2<S>, nu: &Kernel2<S>, part: &Factor, kappa: &S) -> Split<S> {
    let e = atom_means(fnu, part);
    let en = atom_means(nu, part);
    let one = S::one();
    let bad: Vec<bool> = en.iter().map(|v| *v > one.clone() + kappa.clone()).collect();
    let clipped: Vec<bool> = e.iter().zip(&bad).map(|(v, b)| !b && *v > one).collect();
    let ny = fnu.ny();
    let at = |x: usize, y: usize| part.atom_of(x * ny + y);
    let f1 = Kernel2::from_fn(fnu.x().clone(), fnu.y().clone(), |x, y| {
        let a = at(x, y);
        if bad[a] {
            S::zero()
        } else if clipped[a] {
            one.clone()
        } else {
            e[a].clone()
        }
    });
    let f2 = Kernel2::from_fn(fnu.x().clone(), fnu.y().clone(), |x, y| {
        let a = at(x, y);
        let v = fnu.get(x, y).clone();
        if bad[a] {
            v
        } else if clipped[a] {
            (e[a].clone() - one.clone()) / e[a].clone() * v
        } else {
            S::zero()
        }
    });
    let f3 = Kernel2::from_fn(fnu.x().clone(), fnu.y().clone(), |x, y| {
        let a = at(x, y);
        let v = fnu.get(x, y).clone();
        if bad[a] {
            S::zero()
        } else if clipped[a] {
            v / e[a].clone() - one.clone()
        } else {
            v - e[a].clone()
        }
    });
    Split {
        f1,
        f2,
        f3,
        clipped: clipped.iter().filter(|c| **c).count(),
        bad: bad.iter().filter(|b| **b).count(),
    }
}

/// Energy increment over dual factors: while ‖fν − E(fν|B)‖_{□²} ≥ η,
/// adjoin 𝒟(fν − f₁) — a dual of a function bounded by ν + 1 — as a new
/// generator.
pub fn structure_decompose<S: Scalar>(f: &Kernel2<S>, nu: &SparseWeight, cfg: &StructureConfig<S>) -> Result<StructureDecomposition<S>> {
    let n = nu.n();
    if f.nx() != n || f.ny() != n {
        return Err(Error::ShapeMismatch(format!("f is {}×{}, ν lives on {n} vertices", f.nx(), f.ny())));
    }
    if !f.in_range(&S::zero(), &S::one()) {
        return Err(Error::invalid("f must take values in [0,1]"));
    }
    if !cfg.sigma.is_positive() || !cfg.eta().is_positive() {
        return Err(Error::invalid("σ and η must be positive"));
    }
    if let Some(tol) = cfg.linear_forms_tol {
        let lf = linear_forms_check::<f64>(nu, tol, DEFAULT_OCTAHEDRAL_GUARD)?;
        if !lf.pass {
            let worst = lf.correlations.iter().map(|c| format!("{} = {:.4}", c.name, c.value)).collect::<Vec<_>>().join(", ");
            return Err(Error::PreconditionViolated(format!("ν fails the linear forms check at tol {tol}: {worst}")));
        }
    }
    let nu_k: Kernel2<S> = nu.kernel();
    let fnu = f.mul(&nu_k)?;
    let eta4 = pow_u(&cfg.eta(), 4);
    let mut part = Factor::trivial(n * n);
    let mut factor: Option<DualFactor<S>> = None;
    let mut residual_norms = Vec::new();
    let mut generator_max = 0f64;
    let mut iterations = 0;
    loop {
        let e = Kernel2::new(fnu.x().clone(), fnu.y().clone(), {
            let means = atom_means(&fnu, &part);
            (0..n * n).map(|c| means[part.atom_of(c)].clone()).collect()
        })?;
        let residual = fnu.sub(&e)?;
        let r4 = box2_pow4(&residual);
        residual_norms.push(box2_norm(&residual));
        if r4 < eta4 {
            break;
        }
        if iterations == cfg.max_iter {
            return Err(Error::IterationLimit {
                limit: cfg.max_iter,
                detail: format!(
                    "‖fν − E(fν|B)‖_□² = {:.4} ≥ η after {} dual generators; ν may be insufficiently pseudorandom",
                    residual_norms.last().unwrap(),
                    cfg.max_iter
                ),
            });
        }
        let s = split(&fnu, &nu_k, &part, &cfg.kappa);
        let gen = dual_function(&fnu.sub(&s.f1)?);
        generator_max = generator_max.max(gen.max_abs().to_f64_lossy());
        let mut gens = factor.take().map(|d| d.generators).unwrap_or_default();
        gens.push(gen);
        let d = build_dual_factor(gens, &cfg.resolution, cfg.shift_seed)?;
        if d.n_atoms() == part.n_atoms() {
            // the join refines B, so an equal atom count means no change and
            // the residual (hence the next generator) would repeat forever
            return Err(Error::IterationLimit {
                limit: iterations + 1,
                detail: format!(
                    "dual factor stopped refining at resolution {} with ‖fν − E(fν|B)‖_□² = {:.4} ≥ η",
                    cfg.resolution,
                    residual_norms.last().unwrap()
                ),
            });
        }
        part = d.partition.clone();
        factor = Some(d);
        iterations += 1;
    }
    let s = split(&fnu, &nu_k, &part, &cfg.kappa);
    let invariants = check_invariants(&fnu, &s);
    if !invariants.all() {
        return Err(Error::CertificateFailure(format!("structure decomposition invariant breached: {invariants:?}")));
    }
    let dual_bound = dual_function(&nu_k.map(|v| v.clone() + S::one())).max_abs().to_f64_lossy();
    Ok(StructureDecomposition {
        f2_mass: s.f2.integral(),
        f3_box: box2_norm(&s.f3),
        clipped_atoms: s.clipped,
        bad_atoms: s.bad,
        f1: s.f1,
        f2: s.f2,
        f3: s.f3,
        factor,
        iterations,
        residual_norms,
        dual_bound,
        generator_max,
        invariants,
    })
}

fn check_invariants<S: Scalar>(fnu: &Kernel2<S>, s: &Split<S>) -> StructureInvariants {
    let zero = S::zero();
    let sum = fnu.values().iter().enumerate().all(|(c, v)| {
        let t = s.f1.values()[c].clone() + s.f2.values()[c].clone() + s.f3.values()[c].clone();
        if S::EXACT {
            t == *v
        } else {
            (t - v.clone()).abs().to_f64_lossy() <= 1e-9 * (1.0 + v.abs().to_f64_lossy())
        }
    });
    StructureInvariants {
        sum,
        f1_in_unit: s.f1.in_range(&zero, &S::one()),
        f2_nonnegative: s.f2.values().iter().all(|v| *v >= zero),
        f1_plus_f3_nonnegative: s.f1.values().iter().zip(s.f3.values()).all(|(a, b)| a.clone() + b.clone() >= zero),
    }
}
