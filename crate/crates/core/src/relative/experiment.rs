use super::structure::{structure_decompose, StructureConfig, StructureDecomposition};
use super::weight::SparseWeight;
use crate::boxnorms::{lambda3, Kernel2};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::regularity::{keeps_edge, removal_certificate, RemovalCertificate, RemovalConfig};
use crate::scalar::{pairwise_sum, to_json, Scalar};
use serde_json::json;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct RelativeRemovalConfig<S> {
    pub structure: StructureConfig<S>,
    pub removal: RemovalConfig,
}

/// Repair on: at desk scale the τ schedule alone rarely certifies.
impl<S: Scalar> Default for RelativeRemovalConfig<S> {
    fn default() -> Self {
        RelativeRemovalConfig { structure: StructureConfig::default(), removal: RemovalConfig { repair: true, ..Default::default() } }
    }
}

#[derive(Clone, Debug)]
pub struct RelativeRemovalReport<S> {
    pub n: usize,
    pub p: String,
    pub seed: u64,
    pub epsilon: S,
    pub edges_g: usize,
    pub edges_h: usize,
    /// Λ₃(fν, fν, fν) = 6·#triangles(G) / (n³p³), and whether it is ≤ ε.
    pub weighted_lambda3: S,
    pub hypothesis_holds: bool,
    /// Λ₃(f₁, f₁, f₁) of the bounded part fed to the dense lemma.
    pub bounded_lambda3: S,
    pub decomposition: StructureDecomposition<S>,
    pub certificate: RemovalCertificate<S>,
    /// ∫∫ fν 1_{E^c} for E = E_XY, E_YZ, E_ZX.
    pub removed_weighted_mass: [S; 3],
    pub deleted_edges: usize,
    pub p2n2: f64,
    pub triangles_before: u64,
    pub triangles_after: u64,
    pub pruned: Graph,
    /// Float mode only.
    pub runtime_ms: Option<u128>,
}

/// The transference chain for G ⊆ H: f = 1_G, so fν = p⁻¹1_G; decompose
/// fν = f₁ + f₂ + f₃ (the three tripartite copies coincide because G is
/// symmetric and X = Y = Z), run the dense removal lemma on f₁, keep an
/// edge only if all six oriented memberships hold, and verify the result
/// is triangle-free by enumeration.
pub fn relative_removal_experiment<S: Scalar>(
    g: &Graph,
    nu: &SparseWeight,
    eps: &S,
    cfg: &RelativeRemovalConfig<S>,
) -> Result<RelativeRemovalReport<S>> {
    let start = Instant::now();
    let n = nu.n();
    let h = nu.host();
    if g.n() != n || !g.is_subgraph_of(&h) {
        return Err(Error::PreconditionViolated("G must be a subgraph of the host graph H".into()));
    }
    let f: Kernel2<S> = g.indicator();
    let dec = structure_decompose(&f, nu, &cfg.structure)?;
    let fnu = f.mul(&nu.kernel())?;
    let triangles_before = g.triangle_count();
    let p = S::from_ratio(nu.p());
    let nn = S::from_usize(n).unwrap();
    let weighted_lambda3 = S::from_u64(6 * triangles_before).unwrap() / (nn.clone() * nn.clone() * nn * p.clone() * p.clone() * p);
    let bounded_lambda3 = lambda3(&dec.f1, &dec.f1, &dec.f1)?;
    let certificate = removal_certificate(&dec.f1, &dec.f1, &dec.f1, eps, &cfg.removal, false)?;
    if !certificate.verified {
        return Err(Error::CertificateFailure("dense removal certificate on f₁ does not vanish".into()));
    }
    let removed_weighted_mass = [0, 1, 2].map(|w| {
        let outside: Vec<S> = (0..n * n)
            .filter(|&c| !certificate.contains(w, c / n, c % n))
            .map(|c| fnu.values()[c].clone())
            .collect();
        pairwise_sum(&outside) / S::from_usize(n * n).unwrap()
    });
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
        return Err(Error::CertificateFailure(format!("{triangles_after} triangles survive the relative deletion")));
    }
    let pf = S::from_ratio(nu.p()).to_f64_lossy();
    Ok(RelativeRemovalReport {
        n,
        p: nu.p().to_string(),
        seed: nu.seed(),
        epsilon: eps.clone(),
        edges_g: g.edge_count(),
        edges_h: h.edge_count(),
        hypothesis_holds: weighted_lambda3 <= *eps,
        weighted_lambda3,
        bounded_lambda3,
        decomposition: dec,
        certificate,
        removed_weighted_mass,
        deleted_edges,
        p2n2: pf * pf * (n * n) as f64,
        triangles_before,
        triangles_after,
        pruned,
        runtime_ms: (!S::EXACT).then(|| start.elapsed().as_millis()),
    })
}

impl<S: Scalar> RelativeRemovalReport<S> {
    pub fn to_json(&self) -> serde_json::Value {
        let d = &self.decomposition;
        json!({
            "n": self.n,
            "p": self.p,
            "seed": self.seed,
            "epsilon": to_json(&self.epsilon),
            "edges": {"G": self.edges_g, "H": self.edges_h},
            "weighted_lambda3": to_json(&self.weighted_lambda3),
            "hypothesis_holds": self.hypothesis_holds,
            "bounded_lambda3": to_json(&self.bounded_lambda3),
            "decomposition": {
                "iterations": d.iterations,
                "dual_atoms": d.factor.as_ref().map_or(1, |f| f.n_atoms()),
                "residual_norms": d.residual_norms,
                "f2_mass": to_json(&d.f2_mass),
                "f3_box_norm": d.f3_box,
                "clipped_atoms": d.clipped_atoms,
                "bad_atoms": d.bad_atoms,
                "dual_bound": d.dual_bound,
                "generator_max": d.generator_max,
                "invariants": d.invariants,
            },
            "certificate": self.certificate.to_json(),
            "removed_weighted_mass": self.removed_weighted_mass.iter().map(to_json).collect::<Vec<_>>(),
            "deleted_edges": self.deleted_edges,
            "p2n2": self.p2n2,
            "deleted_over_p2n2": self.deleted_edges as f64 / self.p2n2,
            "triangles_before": self.triangles_before,
            "triangle_count_after": self.triangles_after,
            "runtime_ms": self.runtime_ms.map(|v| v as u64),
        })
    }
}
