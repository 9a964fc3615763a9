use super::Ctx;
use crate::args::{HalesJewett, IndexingArg, KindArg, Schur, Vdw};
use crate::report::Outcome;
use rand::Rng;
use serde_json::json;
use szlab::ramsey::verify::{is_monochromatic_subspace, is_weakly_monochromatic};
use szlab::ramsey::{hj_subcube_search, schur_witness, shelah_step, vdw_number, Colouring, CubeColouring, Indexing, SubcubeKind, VdwOutcome};
use szlab::seed::{self, streams};
use szlab::{Error, Result};

pub const DEFAULT_SCHUR_GUARD: u64 = 10_000_000;

/// Colours of 1..=N as a plain slice; `c[x − 1]` is the colour of x.
fn has_mono_ap(c: &[u32], k: usize) -> bool {
    let n = c.len();
    if k <= 1 {
        return n > 0;
    }
    (1..=n).any(|a| (1..=n).any(|r| a + (k - 1) * r <= n && (1..k).all(|j| c[a + j * r - 1] == c[a - 1])))
}

fn has_schur_triple(c: &[u32]) -> bool {
    let n = c.len();
    (1..=n).any(|x| (x..=n).any(|y| x + y <= n && c[x - 1] == c[y - 1] && c[x + y - 1] == c[x - 1]))
}

fn colourings(n: usize, m: u32) -> impl Iterator<Item = Vec<u32>> {
    (0..(m as u64).pow(n as u32)).map(move |idx| Colouring::from_index(n, m, idx).colours().to_vec())
}

pub fn vdw(a: &Vdw, ctx: &Ctx) -> Result<Outcome> {
    let guard = ctx.guard.unwrap_or(szlab::ramsey::DEFAULT_VDW_GUARD);
    let outcome = vdw_number(a.k, a.m, a.limit as usize, guard)?;
    let mut out = match &outcome {
        VdwOutcome::Exact { w, certificate, nodes } => {
            let mut o = Outcome::new(json!({"status": "exact", "W": w, "certificate": certificate.colours(), "nodes": nodes}));
            o.check("certificate_length", certificate.len() + 1 == *w);
            o.check("certificate_avoids", !has_mono_ap(certificate.colours(), a.k));
            // and no colouring of [1, W] escapes, when that is cheap to confirm
            if (a.m as f64).powi(*w as i32) <= (1u64 << 20) as f64 {
                o.check("every_colouring_of_w_contains", colourings(*w, a.m).all(|c| has_mono_ap(&c, a.k)));
            }
            o
        }
        VdwOutcome::LowerBound { limit, witness, nodes } => {
            let mut o = Outcome::new(json!({"status": "lower_bound", "W": null, "lower_bound": limit + 1, "witness": witness.colours(), "nodes": nodes}));
            o.check("witness_avoids", witness.len() == *limit && !has_mono_ap(witness.colours(), a.k));
            o
        }
    };
    out.result["k"] = json!(a.k);
    out.result["m"] = json!(a.m);
    Ok(out)
}

pub fn schur(a: &Schur, ctx: &Ctx) -> Result<Outcome> {
    if let Some(cols) = &a.colouring {
        let m = a.m.unwrap_or_else(|| cols.iter().copied().max().unwrap_or(1));
        let c = Colouring::new(m, cols.clone())?;
        let w = schur_witness(&c);
        let mut out = Outcome::new(json!({"n": c.len(), "m": m, "witness": w}));
        let ok = match &w {
            Some(w) => w.x + w.y <= cols.len() && [w.x, w.y, w.x + w.y].iter().all(|&v| cols[v - 1] == w.colour),
            None => !has_schur_triple(cols),
        };
        out.check("witness", ok);
        return Ok(out);
    }
    let (n, m) = (a.n.unwrap_or(0), a.m.unwrap_or(1));
    let total = (m as f64).powi(n as i32);
    let guard = ctx.guard.unwrap_or(DEFAULT_SCHUR_GUARD);
    if total > guard as f64 {
        return Err(Error::ResourceLimit { what: "Schur enumeration".into(), needed: format!("{total:.3e} colourings"), limit: guard.to_string() });
    }
    let (mut with, mut agree) = (0u64, true);
    let mut first_free: Option<Vec<u32>> = None;
    for cols in colourings(n, m) {
        let c = Colouring::new(m, cols.clone())?;
        match schur_witness(&c) {
            Some(w) => {
                with += 1;
                agree &= [w.x, w.y, w.x + w.y].iter().all(|&v| v <= n && cols[v - 1] == w.colour);
            }
            None => {
                agree &= !has_schur_triple(&cols);
                first_free.get_or_insert(cols);
            }
        }
    }
    let mut out = Outcome::new(json!({
        "n": n,
        "m": m,
        "colourings": total as u64,
        "with_triple": with,
        "every_colouring_has_triple": first_free.is_none(),
        "first_without": first_free,
    }));
    out.check("witnesses", agree);
    Ok(out)
}

pub fn hales_jewett(a: &HalesJewett, ctx: &Ctx) -> Result<Outcome> {
    let ix = match a.indexing {
        IndexingArg::Inclusive => Indexing::Inclusive,
        IndexingArg::HalfOpen => Indexing::HalfOpen,
    };
    let points = (ix.axis_len(a.k) as f64).powi(a.d as i32);
    if points > 1e7 {
        return Err(Error::ResourceLimit { what: "cube colouring".into(), needed: format!("{points:.3e} points"), limit: "1e7".into() });
    }
    let colours = match &a.colouring {
        Some(c) => c.clone(),
        None => {
            let mut rng = seed::rng(ctx.seed, streams::COLOURING);
            (0..points as usize).map(|_| rng.gen_range(1..=a.m)).collect()
        }
    };
    let c = CubeColouring::new(a.d, a.k, a.m, ix, colours.clone())?;
    let guard = ctx.guard.unwrap_or(szlab::ramsey::DEFAULT_CUBE_GUARD);
    let mut out = match a.kind {
        KindArg::Shelah => {
            let w = shelah_step(&c)?;
            let mut o = Outcome::new(json!({"shelah": w}));
            o.check("weakly_monochromatic", is_weakly_monochromatic(&c, &w.subspace));
            o
        }
        KindArg::Mono | KindArg::Weak => {
            let kind = if matches!(a.kind, KindArg::Mono) { SubcubeKind::Monochromatic } else { SubcubeKind::WeaklyMonochromatic };
            let s = hj_subcube_search(&c, a.j, kind, guard)?;
            let mut o = Outcome::new(json!({"kind": kind, "subspace": s}));
            if let Some(s) = &s {
                let ok = match kind {
                    SubcubeKind::Monochromatic => is_monochromatic_subspace(&c, s),
                    SubcubeKind::WeaklyMonochromatic => is_weakly_monochromatic(&c, s),
                };
                o.check("subspace", ok && s.dim == a.j);
            }
            o
        }
    };
    out.result["colouring"] = if colours.len() <= 4096 { json!(colours) } else { json!(null) };
    out.result["points"] = json!(colours.len());
    Ok(out)
}
