use super::{by_mode, close, Ctx};
use crate::args::{to_ratio, Gnp, LinearForms, RelativeRemoval, Structure, Subgraph};
use crate::report::Outcome;
use num_traits::ToPrimitive;
use rand::Rng;
use serde_json::json;
use szlab::graph::Graph;
use szlab::relative::{linear_forms_check, relative_removal_experiment, sample_gnp_weight, structure_decompose, RelativeRemovalConfig, SparseWeight, StructureConfig};
use szlab::scalar::to_json;
use szlab::seed;
use szlab::{Result, Scalar};

/// Stream for thinning the host graph into G; the library's streams stop at 6.
const SUBGRAPH_STREAM: u64 = 7;

fn subgraph(host: &Graph, which: Subgraph, seed_: u64) -> Graph {
    match which {
        Subgraph::Host => host.clone(),
        Subgraph::Half => {
            let mut rng = seed::rng(seed_, SUBGRAPH_STREAM);
            let kept: Vec<(usize, usize)> = host.edges().into_iter().filter(|_| rng.gen_bool(0.5)).collect();
            Graph::from_edges(host.n(), &kept)
        }
    }
}

fn triangles(g: &Graph) -> u64 {
    let mut count = 0;
    for (u, v) in g.edges() {
        count += (0..g.n()).filter(|&w| w != u && w != v && g.has_edge(u, w) && g.has_edge(v, w)).count() as u64;
    }
    count / 3
}

pub fn gnp(a: &Gnp, ctx: &Ctx) -> Result<Outcome> {
    let nu = sample_gnp_weight(a.n, &to_ratio(&a.p), ctx.seed)?;
    by_mode!(ctx, gnp_with(&nu))
}

fn gnp_with<S: Scalar>(nu: &SparseWeight) -> Result<Outcome> {
    let host = nu.host();
    let mean = nu.mean::<S>();
    let sigma = nu.mean_sigma();
    let n = nu.n();
    let mut out = Outcome::new(json!({
        "n": n,
        "p": nu.p().to_string(),
        "edges": host.edge_count(),
        "support": nu.support(),
        "triangles": host.triangle_count(),
        "mean": to_json(&mean),
        "mean_sigma": sigma,
        "mean_within_4_sigma": (mean.to_f64_lossy() - 1.0).abs() <= 4.0 * sigma,
        "p_floor": SparseWeight::p_floor(n),
    }));
    let mut support = 0u64;
    let mut symmetric = true;
    for x in 0..n {
        for y in 0..n {
            support += nu.has(x, y) as u64;
            symmetric &= nu.has(x, y) == nu.has(y, x);
        }
    }
    out.check("support_recount", support == nu.support());
    out.check("symmetric", symmetric);
    // ∫ν = support / (n² p)
    let p = nu.p().to_f64().unwrap_or(1.0);
    out.check("mean_recount", (mean.to_f64_lossy() - support as f64 / (n as f64 * n as f64 * p)).abs() <= 1e-9);
    Ok(out)
}

pub fn linear_forms(a: &LinearForms, ctx: &Ctx) -> Result<Outcome> {
    let nu = sample_gnp_weight(a.n, &to_ratio(&a.p), ctx.seed)?;
    let guard = ctx.guard.unwrap_or(szlab::relative::DEFAULT_OCTAHEDRAL_GUARD as u64) as f64;
    by_mode!(ctx, linear_forms_with(&nu, a.tol, guard))
}

fn linear_forms_with<S: Scalar>(nu: &SparseWeight, tol: f64, guard: f64) -> Result<Outcome> {
    let rep = linear_forms_check::<S>(nu, tol, guard)?;
    let mut out = Outcome::new(serde_json::to_value(&rep).expect("report serializes"));
    if let Some(m) = rep.get("mean") {
        out.check("mean_matches_weight", close(&m.value, &nu.mean::<S>()));
    }
    if !rep.pass {
        out.diagnostics.push(format!("correlations outside tolerance {tol}: measured, not a breach"));
    }
    Ok(out)
}

fn structure_config<S: Scalar>(a: &Structure, seed_: u64) -> StructureConfig<S> {
    let mut cfg = StructureConfig::new(S::from_ratio(&to_ratio(&a.sigma)));
    cfg.resolution = S::from_ratio(&to_ratio(&a.resolution));
    cfg.kappa = S::from_ratio(&to_ratio(&a.kappa));
    cfg.max_iter = a.max_iter;
    cfg.shift_seed = seed::derive_seed(seed_, seed::streams::DUAL_SHIFT);
    cfg
}

pub fn structure(a: &Structure, ctx: &Ctx) -> Result<Outcome> {
    let nu = sample_gnp_weight(a.n, &to_ratio(&a.p), ctx.seed)?;
    let g = subgraph(&nu.host(), a.subgraph, ctx.seed);
    by_mode!(ctx, structure_with(a, &nu, &g, ctx.seed))
}

fn structure_with<S: Scalar>(a: &Structure, nu: &SparseWeight, g: &Graph, seed_: u64) -> Result<Outcome> {
    let f = g.indicator::<S>();
    let fnu = f.mul(&nu.kernel())?;
    let d = structure_decompose(&f, nu, &structure_config(a, seed_))?;
    let mut out = Outcome::new(json!({
        "n": nu.n(),
        "edges": g.edge_count(),
        "iterations": d.iterations,
        "dual_atoms": d.factor.as_ref().map_or(1, |x| x.n_atoms()),
        "residual_norms": d.residual_norms,
        "f2_mass": to_json(&d.f2_mass),
        "f3_box_norm": d.f3_box,
        "clipped_atoms": d.clipped_atoms,
        "bad_atoms": d.bad_atoms,
        "invariants": d.invariants,
    }));
    let total = d.f1.add(&d.f2)?.add(&d.f3)?;
    out.check("sum", total.values().iter().zip(fnu.values()).all(|(x, y)| close(x, y)));
    out.check("f1_in_unit", d.f1.in_range(&S::zero(), &S::one()));
    out.check("f2_nonnegative", d.f2.values().iter().all(|v| *v >= S::zero()));
    out.check("f1_plus_f3_nonnegative", d.f1.add(&d.f3)?.values().iter().all(|v| *v >= S::zero()));
    Ok(out)
}

pub fn relative_removal(a: &RelativeRemoval, ctx: &Ctx) -> Result<Outcome> {
    let nu = sample_gnp_weight(a.n, &to_ratio(&a.p), ctx.seed)?;
    let g = subgraph(&nu.host(), a.subgraph, ctx.seed);
    by_mode!(ctx, relative_with(a, &nu, &g, ctx.seed))
}

fn relative_with<S: Scalar>(a: &RelativeRemoval, nu: &SparseWeight, g: &Graph, seed_: u64) -> Result<Outcome> {
    let eps = S::from_ratio(&to_ratio(&a.eps));
    let mut cfg = RelativeRemovalConfig::<S>::default();
    cfg.structure.shift_seed = seed::derive_seed(seed_, seed::streams::DUAL_SHIFT);
    let rep = relative_removal_experiment(g, nu, &eps, &cfg)?;
    let mut out = Outcome::new(rep.to_json());
    out.check("subgraph", rep.pruned.is_subgraph_of(g));
    out.check("triangle_free", triangles(&rep.pruned) == 0);
    out.check("deleted_count", g.edge_count() - rep.pruned.edge_count() == rep.deleted_edges);
    Ok(out)
}
