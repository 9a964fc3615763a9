use super::factor::{atom_table, require_unit, AtomTable};
use super::srl::{simultaneous_regularity, Decomposition, Growth};
use crate::boxnorms::{lambda3, Kernel2};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Factor;
use crate::scalar::{pow_u, ratio_from_f64, to_json, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::json;

/// How τ is chosen from ε.
#[derive(Clone, Debug, Default)]
pub enum TauSchedule {
    /// τ = min(1/4, (ln 1/ε)^{−1/2}).
    #[default]
    Default,
    Fixed(BigRational),
}

impl TauSchedule {
    pub fn tau(&self, eps: f64) -> BigRational {
        match self {
            TauSchedule::Default => ratio_from_f64(0.25f64.min((1.0 / eps).ln().powf(-0.5))),
            TauSchedule::Fixed(t) => t.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TauSchedule::Default => "min(1/4, ln(1/eps)^(-1/2))".into(),
            TauSchedule::Fixed(t) => format!("fixed {t}"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RemovalConfig {
    pub tau: TauSchedule,
    /// On a non-vanishing product, greedily drop the lightest atom pair of
    /// each surviving atom triple instead of failing. The certificate then
    /// records the repairs.
    pub repair: bool,
}

/// Factor-measurable sets E_XY, E_YZ, E_ZX (unions of product atoms) whose
/// indicator product vanishes, with the mass of each kernel left outside.
#[derive(Clone, Debug)]
pub struct RemovalCertificate<S> {
    pub factors: [Factor; 3],
    /// Atom-pair membership tables, row-major over (first, second) atoms of
    /// the pairs (X,Y), (Y,Z), (Z,X).
    pub sets: [Vec<bool>; 3],
    pub removed_mass: [S; 3],
    pub epsilon: S,
    pub lambda3: S,
    pub tau: BigRational,
    pub tau_schedule: String,
    pub f_spec: String,
    pub m: usize,
    pub pruned_atoms: [usize; 3],
    /// (set index, first atom, second atom) dropped by repair.
    pub repairs: Vec<(usize, usize, usize)>,
    pub verified: bool,
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

impl<S: Scalar> RemovalCertificate<S> {
    fn width(&self, which: usize) -> usize {
        self.factors[PAIRS[which].1].n_atoms()
    }

    pub fn contains_atoms(&self, which: usize, a: usize, b: usize) -> bool {
        self.sets[which][a * self.width(which) + b]
    }

    /// Point membership: `which` = 0 for (x,y) ∈ E_XY, 1 for (y,z) ∈ E_YZ,
    /// 2 for (z,x) ∈ E_ZX.
    pub fn contains(&self, which: usize, p: usize, q: usize) -> bool {
        let (i, j) = PAIRS[which];
        self.contains_atoms(which, self.factors[i].atom_of(p), self.factors[j].atom_of(q))
    }

    pub fn atom_pairs(&self, which: usize) -> Vec<(usize, usize)> {
        let w = self.width(which);
        self.sets[which].iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| (i / w, i % w)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "factors": {
                "x": self.factors[0].labels(),
                "y": self.factors[1].labels(),
                "z": self.factors[2].labels(),
            },
            "E_sets": {
                "xy": self.atom_pairs(0),
                "yz": self.atom_pairs(1),
                "zx": self.atom_pairs(2),
            },
            "removed_mass": self.removed_mass.iter().map(to_json).collect::<Vec<_>>(),
            "parameters": {
                "epsilon": to_json(&self.epsilon),
                "tau": self.tau.to_string(),
                "tau_schedule": self.tau_schedule,
                "F_spec": self.f_spec,
                "M": self.m,
            },
            "lambda3": to_json(&self.lambda3),
            "pruned_atoms": self.pruned_atoms,
            "repairs": self.repairs,
            "verified": self.verified,
        })
    }
}

/// Exhaustive loop over atom triples; returns the first (a, b, c) with
/// A×B ⊆ E_XY, B×C ⊆ E_YZ, C×A ⊆ E_ZX. Sound because the E sets are unions
/// of product atoms.
pub fn find_surviving_triple<S: Scalar>(cert: &RemovalCertificate<S>) -> Option<(usize, usize, usize)> {
    let [na, nb, nc] = [0, 1, 2].map(|i| cert.factors[i].n_atoms());
    for a in 0..na {
        for b in 0..nb {
            if !cert.contains_atoms(0, a, b) {
                continue;
            }
            for c in 0..nc {
                if cert.contains_atoms(1, b, c) && cert.contains_atoms(2, c, a) {
                    return Some((a, b, c));
                }
            }
        }
    }
    None
}

fn e0_table<S: Scalar>(table: &AtomTable<S>, dec: &Decomposition<S>, tau: &S) -> Result<Vec<bool>> {
    let var = atom_table(&dec.f2.map(|v| v.clone() * v.clone()), &dec.factors)?;
    Ok((0..table.na * table.nb)
        .map(|i| pow_u(&table.means[i], 10) >= *tau && var.means[i] <= *tau)
        .collect())
}

/// The strong triangle removal lemma, constructively: simultaneous
/// regularity with F(M) = ⌊2^{3M}/τ³⌋ + 1, the E⁰ sets {f₁ ≥ τ^{1/10},
/// E(f₂²|B) ≤ τ}, pruning of atoms lighter than τ/2^M, and an exhaustive
/// check that the product of the three indicators vanishes.
pub fn strong_triangle_removal<S: Scalar>(
    f: &Kernel2<S>,
    g: &Kernel2<S>,
    h: &Kernel2<S>,
    eps: &S,
    cfg: &RemovalConfig,
) -> Result<RemovalCertificate<S>> {
    removal_certificate(f, g, h, eps, cfg, true)
}

/// With `enforce` off, Λ₃ > ε is tolerated: ε then only sets τ, and the
/// certificate is still checked (and repaired if configured).
pub(crate) fn removal_certificate<S: Scalar>(
    f: &Kernel2<S>,
    g: &Kernel2<S>,
    h: &Kernel2<S>,
    eps: &S,
    cfg: &RemovalConfig,
    enforce: bool,
) -> Result<RemovalCertificate<S>> {
    for (k, name) in [(f, "f"), (g, "g"), (h, "h")] {
        require_unit(k, name)?;
    }
    if !eps.is_positive() || *eps >= S::one() {
        return Err(Error::invalid("ε must lie in (0,1)"));
    }
    let lam = lambda3(f, g, h)?;
    if enforce && lam > *eps {
        return Err(Error::PreconditionViolated(format!("Λ₃(f,g,h) = {lam} exceeds ε = {eps}")));
    }
    let tau_q = cfg.tau.tau(eps.to_f64_lossy());
    if !tau_q.is_positive() || tau_q >= BigRational::one() {
        return Err(Error::invalid(format!("τ = {tau_q} must lie in (0,1)")));
    }
    let tau = S::from_ratio(&tau_q);
    let growth = Growth::Removal { tau: tau_q.clone() };
    let sim = simultaneous_regularity(f, g, h, &tau, &growth)?;
    let factors = [sim.bx.clone(), sim.by.clone(), sim.bz.clone()];
    let floor = S::from_ratio(&(tau_q.clone() / BigRational::from_integer(BigInt::one() << sim.m)));
    let weights = [f.x().weights(), f.y().weights(), g.y().weights()];
    let kept: Vec<Vec<bool>> =
        (0..3).map(|i| factors[i].atom_measures(weights[i]).iter().map(|m| *m >= floor).collect()).collect();
    let kernels = [(f, &sim.f), (g, &sim.g), (h, &sim.h)];
    let mut tables = Vec::with_capacity(3);
    let mut sets: Vec<Vec<bool>> = Vec::with_capacity(3);
    for (w, (k, dec)) in kernels.iter().enumerate() {
        let t = atom_table(k, &dec.factors)?;
        let (i, j) = PAIRS[w];
        let mut e = e0_table(&t, dec, &tau)?;
        for (idx, m) in e.iter_mut().enumerate() {
            *m = *m && kept[i][idx / t.nb] && kept[j][idx % t.nb];
        }
        sets.push(e);
        tables.push(t);
    }
    let pruned_atoms = [0, 1, 2].map(|i| kept[i].iter().filter(|k| !**k).count());
    let mut cert = RemovalCertificate {
        factors,
        sets: [sets[0].clone(), sets[1].clone(), sets[2].clone()],
        removed_mass: [S::zero(), S::zero(), S::zero()],
        epsilon: eps.clone(),
        lambda3: lam.clone(),
        tau: tau_q.clone(),
        tau_schedule: cfg.tau.describe(),
        f_spec: growth.describe(),
        m: sim.m,
        pruned_atoms,
        repairs: Vec::new(),
        verified: false,
    };
    if let Some((a, b, c)) = find_surviving_triple(&cert) {
        if !cfg.repair {
            let survivors = count_surviving(&cert);
            return Err(Error::CertificateFailure(format!(
                "indicator product survives on {survivors} atom triple(s), first (A{a}, B{b}, C{c}); \
                 ε = {eps}, Λ₃ = {lam}, τ = {tau_q}, M = {}, F(M) = {}; the τ schedule is too coarse for this ε",
                sim.m,
                growth.eval(sim.m)
            )));
        }
        let masses: Vec<Vec<f64>> = tables.iter().map(|t| t.integrals.iter().map(|v| v.to_f64_lossy()).collect()).collect();
        cert.repairs = greedy_repair(&mut cert, &masses);
    }
    for w in 0..3 {
        let t = &tables[w];
        let outside: Vec<S> = (0..t.na * t.nb).filter(|&i| !cert.sets[w][i]).map(|i| t.integrals[i].clone()).collect();
        cert.removed_mass[w] = crate::scalar::pairwise_sum(&outside);
    }
    cert.verified = find_surviving_triple(&cert).is_none();
    Ok(cert)
}

fn surviving_triples<S: Scalar>(cert: &RemovalCertificate<S>) -> Vec<(usize, usize, usize)> {
    let [na, nb, nc] = [0, 1, 2].map(|i| cert.factors[i].n_atoms());
    let mut out = Vec::new();
    for a in 0..na {
        for b in 0..nb {
            if !cert.contains_atoms(0, a, b) {
                continue;
            }
            for c in 0..nc {
                if cert.contains_atoms(1, b, c) && cert.contains_atoms(2, c, a) {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}

/// Greedy hitting set: repeatedly drop the atom pair lying in the most
/// surviving triples (ties: lighter kernel mass, then lexicographic).
fn greedy_repair<S: Scalar>(cert: &mut RemovalCertificate<S>, masses: &[Vec<f64>]) -> Vec<(usize, usize, usize)> {
    use std::collections::{BinaryHeap, HashMap};
    let triples = surviving_triples(cert);
    let mut members: HashMap<(usize, usize, usize), Vec<usize>> = HashMap::new();
    for (t, &(a, b, c)) in triples.iter().enumerate() {
        for key in [(0, a, b), (1, b, c), (2, c, a)] {
            members.entry(key).or_default().push(t);
        }
    }
    let mut alive = vec![true; triples.len()];
    let mut count: HashMap<(usize, usize, usize), usize> = members.iter().map(|(k, v)| (*k, v.len())).collect();
    let widths = [0, 1, 2].map(|w| cert.width(w));
    let priority = |key: (usize, usize, usize), n: usize| {
        let (w, p, q) = key;
        let mass = masses[w][p * widths[w] + q];
        (n, std::cmp::Reverse(ordered(mass)), std::cmp::Reverse(key))
    };
    let mut heap: BinaryHeap<_> = count.iter().map(|(&k, &n)| priority(k, n)).collect();
    let mut repairs = Vec::new();
    let mut remaining = triples.len();
    while remaining > 0 {
        let Some((n, _, std::cmp::Reverse(key))) = heap.pop() else { break };
        let current = count[&key];
        if current != n {
            if current > 0 {
                heap.push(priority(key, current));
            }
            continue;
        }
        let (w, p, q) = key;
        cert.sets[w][p * widths[w] + q] = false;
        repairs.push(key);
        for &t in &members[&key] {
            if std::mem::take(&mut alive[t]) {
                remaining -= 1;
                let (a, b, c) = triples[t];
                for k in [(0, a, b), (1, b, c), (2, c, a)] {
                    *count.get_mut(&k).unwrap() -= 1;
                }
            }
        }
    }
    repairs
}

/// Total order on finite masses for tie-breaking.
fn ordered(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    if b < 0 {
        b ^ i64::MAX
    } else {
        b
    }
}

fn count_surviving<S: Scalar>(cert: &RemovalCertificate<S>) -> usize {
    let [na, nb, nc] = [0, 1, 2].map(|i| cert.factors[i].n_atoms());
    let mut n = 0;
    for a in 0..na {
        for b in 0..nb {
            for c in 0..nc {
                n += usize::from(cert.contains_atoms(0, a, b) && cert.contains_atoms(1, b, c) && cert.contains_atoms(2, c, a));
            }
        }
    }
    n
}

/// An edge {u,v} survives iff both orientations lie in all three E sets;
/// any triangle of survivors would then give a point of the vanishing
/// product.
pub fn keeps_edge<S: Scalar>(cert: &RemovalCertificate<S>, u: usize, v: usize) -> bool {
    (0..3).all(|w| cert.contains(w, u, v) && cert.contains(w, v, u))
}

#[derive(Clone, Debug)]
pub struct GraphRemoval<S> {
    pub certificate: RemovalCertificate<S>,
    pub pruned: Graph,
    pub deleted_edges: usize,
    pub triangles_before: u64,
    pub triangles_after: u64,
}

/// Graph form: run the removal lemma on three copies of the adjacency
/// indicator (Λ₃ = 6·#triangles/n³), delete every edge outside the
/// certificate, and recount triangles by enumeration.
pub fn graph_triangle_removal<S: Scalar>(g: &Graph, eps: &S, cfg: &RemovalConfig) -> Result<GraphRemoval<S>> {
    let k: Kernel2<S> = g.indicator();
    let certificate = strong_triangle_removal(&k, &k, &k, eps, cfg)?;
    let mut pruned = g.clone();
    let mut deleted_edges = 0;
    for (u, v) in g.edges() {
        if !keeps_edge(&certificate, u, v) {
            pruned.remove_edge(u, v);
            deleted_edges += 1;
        }
    }
    let triangles_after = pruned.triangle_count();
    if triangles_after != 0 {
        return Err(Error::CertificateFailure(format!("{triangles_after} triangles survive deletion")));
    }
    Ok(GraphRemoval { certificate, pruned, deleted_edges, triangles_before: g.triangle_count(), triangles_after })
}
