use super::space::{Kernel2, Kernel3, MeasuredSpace};
use crate::error::{Error, Result};
use crate::scalar::{nth_root, pairwise_sum, Scalar};

/// Row-major transpose of an r×c block.
fn transposed<S: Scalar>(v: &[S], r: usize, c: usize) -> Vec<S> {
    (0..r * c).map(|i| v[(i % r) * c + i / r].clone()).collect()
}

/// Σ_{x,x'} μ(x)μ(x') A[x,x'] B[x,x'] for n×n row-major A, B.
pub(crate) fn weighted_pair_sum<S: Scalar>(w: &[S], a: &[S], b: &[S]) -> S {
    let n = w.len();
    let rows: Vec<S> = (0..n)
        .map(|i| {
            let terms: Vec<S> = (0..n).map(|j| w[j].clone() * a[i * n + j].clone() * b[i * n + j].clone()).collect();
            w[i].clone() * pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&rows)
}

/// G[x,x'] = Σ_y μ(y) f(x,y) g(x',y).
pub(crate) fn row_gram<S: Scalar>(f: &Kernel2<S>, g: &Kernel2<S>) -> Vec<S> {
    let (nx, ny) = (f.nx(), f.ny());
    S::matmul(&f.scaled_cols(), &transposed(g.values(), g.nx(), ny), nx, ny, g.nx())
}

/// ‖f‖⁴_{□²} = Σ_{x,x'} μ(x)μ(x') (Σ_y μ(y) f(x,y) f(x',y))², O(n³).
pub fn box2_pow4<S: Scalar>(f: &Kernel2<S>) -> S {
    let g = row_gram(f, f);
    weighted_pair_sum(f.x().weights(), &g, &g)
}

pub fn box2_norm<S: Scalar>(f: &Kernel2<S>) -> f64 {
    nth_root(&box2_pow4(f), 4)
}

/// The Gowers inner product ∫ f₀₀(x,y) f₀₁(x,y') f₁₀(x',y) f₁₁(x',y').
pub fn gowers_inner<S: Scalar>(f00: &Kernel2<S>, f01: &Kernel2<S>, f10: &Kernel2<S>, f11: &Kernel2<S>) -> Result<S> {
    for k in [f01, f10, f11] {
        if !f00.same_spaces(k) {
            return Err(Error::ShapeMismatch("Gowers inner product needs kernels on one X × Y".into()));
        }
    }
    let a = row_gram(f00, f10);
    let b = row_gram(f01, f11);
    Ok(weighted_pair_sum(f00.x().weights(), &a, &b))
}

/// ∫∫ f(x,y) g(y) h(x).
pub fn bilinear<S: Scalar>(f: &Kernel2<S>, g: &[S], h: &[S]) -> Result<S> {
    if g.len() != f.ny() || h.len() != f.nx() {
        return Err(Error::ShapeMismatch("test functions do not match the kernel".into()));
    }
    let rows: Vec<S> = (0..f.nx())
        .map(|i| {
            let r = f.row(i);
            let t: Vec<S> = (0..f.ny()).map(|j| f.y().weight(j).clone() * r[j].clone() * g[j].clone()).collect();
            f.x().weight(i).clone() * h[i].clone() * pairwise_sum(&t)
        })
        .collect();
    Ok(pairwise_sum(&rows))
}

/// ‖f‖⁸_{□³}: for each (x, x'), the □² fourth power of y,z ↦ f(x,y,z) f(x',y,z).
pub fn box3_pow8<S: Scalar>(f: &Kernel3<S>) -> S {
    let (xs, ys, zs) = f.spaces();
    let (nx, ny, nz) = f.shape();
    let slab = |i: usize| &f.values()[i * ny * nz..(i + 1) * ny * nz];
    let rows: Vec<S> = (0..nx)
        .map(|i| {
            let terms: Vec<S> = (0..nx)
                .map(|i2| {
                    let prod: Vec<S> = slab(i).iter().zip(slab(i2)).map(|(a, b)| a.clone() * b.clone()).collect();
                    let h = Kernel2::new(ys.clone(), zs.clone(), prod).expect("shape");
                    xs.weight(i2).clone() * box2_pow4(&h)
                })
                .collect();
            xs.weight(i).clone() * pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&rows)
}

pub fn box3_norm<S: Scalar>(f: &Kernel3<S>) -> f64 {
    nth_root(&box3_pow8(f), 8)
}

fn same_space<S: Scalar>(a: &MeasuredSpace<S>, b: &MeasuredSpace<S>, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{what}: spaces differ")));
    }
    Ok(())
}

/// Λ₃(f,g,h) = ∫ f(x,y) g(y,z) h(z,x). Contraction: P = (f·μ_Y)·g, then
/// Σ_{x,z} μ(x)μ(z) P[x,z] h[z,x].
pub fn lambda3<S: Scalar>(f: &Kernel2<S>, g: &Kernel2<S>, h: &Kernel2<S>) -> Result<S> {
    same_space(f.y(), g.x(), "Λ₃ Y")?;
    same_space(g.y(), h.x(), "Λ₃ Z")?;
    same_space(h.y(), f.x(), "Λ₃ X")?;
    let (nx, ny, nz) = (f.nx(), f.ny(), g.ny());
    let p = S::matmul(&f.scaled_cols(), g.values(), nx, ny, nz);
    let ht = transposed(h.values(), nz, nx);
    let wz = g.y().weights();
    let rows: Vec<S> = (0..nx)
        .map(|x| {
            let t: Vec<S> = (0..nz).map(|z| wz[z].clone() * p[x * nz + z].clone() * ht[x * nz + z].clone()).collect();
            f.x().weight(x).clone() * pairwise_sum(&t)
        })
        .collect();
    Ok(pairwise_sum(&rows))
}

/// Λ₄(f₁₂₃, f₂₃₄, f₃₄₁, f₄₁₂) over X₁ × … × X₄.
pub fn lambda4<S: Scalar>(f123: &Kernel3<S>, f234: &Kernel3<S>, f341: &Kernel3<S>, f412: &Kernel3<S>) -> Result<S> {
    let (x1, x2, x3) = f123.spaces();
    let (a2, a3, x4) = f234.spaces();
    let (b3, b4, b1) = f341.spaces();
    let (c4, c1, c2) = f412.spaces();
    same_space(x2, a2, "Λ₄ X₂")?;
    same_space(x3, a3, "Λ₄ X₃")?;
    same_space(x3, b3, "Λ₄ X₃")?;
    same_space(x4, b4, "Λ₄ X₄")?;
    same_space(x1, b1, "Λ₄ X₁")?;
    same_space(x4, c4, "Λ₄ X₄")?;
    same_space(x1, c1, "Λ₄ X₁")?;
    same_space(x2, c2, "Λ₄ X₂")?;
    let (n1, n2, n3, n4) = (x1.len(), x2.len(), x3.len(), x4.len());
    let mut outer = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            let mut inner = Vec::with_capacity(n3 * n4);
            for k in 0..n3 {
                for l in 0..n4 {
                    inner.push(
                        x3.weight(k).clone()
                            * x4.weight(l).clone()
                            * f123.get(i, j, k).clone()
                            * f234.get(j, k, l).clone()
                            * f341.get(k, l, i).clone()
                            * f412.get(l, i, j).clone(),
                    );
                }
            }
            outer.push(x1.weight(i).clone() * x2.weight(j).clone() * pairwise_sum(&inner));
        }
    }
    Ok(pairwise_sum(&outer))
}
