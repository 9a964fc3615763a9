use super::weight::SparseWeight;
use crate::boxnorms::{box2_norm, lambda3, Kernel2};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct RelativeGvn {
    pub lambda_abs: f64,
    pub norms: [f64; 3],
    /// 4·min(‖f‖_{□²}, ‖g‖_{□²}, ‖h‖_{□²}).
    pub bound: f64,
    /// bound − |Λ₃|; the o(1) term of the sparse inequality shows up as a
    /// negative margin.
    pub margin: f64,
    /// ν ≡ 1, where the inequality is a theorem with no error term.
    pub dense: bool,
}

/// Both sides of |Λ₃(f,g,h)| ≤ 4·min □² + o(1) for f, g, h bounded in
/// magnitude by ν + 1 (ν read on X×Y, Y×Z and Z×X alike).
pub fn relative_gvn_check<S: Scalar>(f: &Kernel2<S>, g: &Kernel2<S>, h: &Kernel2<S>, nu: &SparseWeight) -> Result<RelativeGvn> {
    let v = nu.value::<S>();
    for (k, name) in [(f, "f"), (g, "g"), (h, "h")] {
        if k.nx() != nu.n() || k.ny() != nu.n() {
            return Err(Error::ShapeMismatch(format!("{name} is {}×{}, ν lives on {} vertices", k.nx(), k.ny(), nu.n())));
        }
        for x in 0..k.nx() {
            for (y, val) in k.row(x).iter().enumerate() {
                let cap = if nu.has(x, y) { v.clone() + S::one() } else { S::one() };
                if val.abs() > cap {
                    return Err(Error::PreconditionViolated(format!("|{name}({x},{y})| = {} exceeds ν+1 = {cap}", val.abs())));
                }
            }
        }
    }
    let lambda_abs = lambda3(f, g, h)?.abs().to_f64_lossy();
    let norms = [box2_norm(f), box2_norm(g), box2_norm(h)];
    let bound = 4.0 * norms.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RelativeGvn { lambda_abs, norms, bound, margin: bound - lambda_abs, dense: nu.support() == (nu.n() * nu.n()) as u64 })
}
