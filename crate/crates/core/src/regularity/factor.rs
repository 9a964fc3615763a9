use crate::boxnorms::Kernel2;
use crate::error::{Error, Result};
use crate::partition::Factor;
use crate::scalar::{pairwise_sum, Scalar};
use serde::{Deserialize, Serialize};

/// B_X ∨ B_Y: atoms are products A_i × B_j of coordinate atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductFactor {
    pub x: Factor,
    pub y: Factor,
}

impl ProductFactor {
    pub fn new(x: Factor, y: Factor) -> Self {
        ProductFactor { x, y }
    }

    pub fn trivial(nx: usize, ny: usize) -> Self {
        ProductFactor { x: Factor::trivial(nx), y: Factor::trivial(ny) }
    }

    pub fn complexity(&self) -> (usize, usize) {
        (self.x.complexity(), self.y.complexity())
    }

    pub fn max_complexity(&self) -> usize {
        self.x.complexity().max(self.y.complexity())
    }

    pub fn n_atoms(&self) -> usize {
        self.x.n_atoms() * self.y.n_atoms()
    }

    pub(crate) fn check<S: Scalar>(&self, f: &Kernel2<S>) -> Result<()> {
        if self.x.len() != f.nx() || self.y.len() != f.ny() {
            return Err(Error::ShapeMismatch(format!(
                "factors on {}×{} points for a {}×{} kernel",
                self.x.len(),
                self.y.len(),
                f.nx(),
                f.ny()
            )));
        }
        Ok(())
    }
}

/// Per-atom integrals and masses of a kernel over a product factor.
#[derive(Clone, Debug)]
pub struct AtomTable<S> {
    pub na: usize,
    pub nb: usize,
    /// Σ_{(x,y) ∈ A_a × B_b} μ(x)μ(y) f(x,y), index a·nb + b.
    pub integrals: Vec<S>,
    pub means: Vec<S>,
    pub mass_x: Vec<S>,
    pub mass_y: Vec<S>,
}

impl<S: Scalar> AtomTable<S> {
    pub fn mean(&self, a: usize, b: usize) -> &S {
        &self.means[a * self.nb + b]
    }

    pub fn mass(&self, a: usize, b: usize) -> S {
        self.mass_x[a].clone() * self.mass_y[b].clone()
    }
}

pub fn atom_table<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor) -> Result<AtomTable<S>> {
    pf.check(f)?;
    let (na, nb) = (pf.x.n_atoms(), pf.y.n_atoms());
    let (wx, wy) = (f.x().weights(), f.y().weights());
    let xatoms = pf.x.atoms();
    let yatoms = pf.y.atoms();
    // r[x][b] = Σ_{y ∈ B_b} μ(y) f(x,y)
    let r: Vec<Vec<S>> = (0..f.nx())
        .map(|x| {
            let row = f.row(x);
            yatoms
                .iter()
                .map(|b| pairwise_sum(&b.iter().map(|&y| wy[y].clone() * row[y].clone()).collect::<Vec<_>>()))
                .collect()
        })
        .collect();
    let mut integrals = Vec::with_capacity(na * nb);
    for a in &xatoms {
        for b in 0..nb {
            integrals.push(pairwise_sum(&a.iter().map(|&x| wx[x].clone() * r[x][b].clone()).collect::<Vec<_>>()));
        }
    }
    let mass_x = pf.x.atom_measures(wx);
    let mass_y = pf.y.atom_measures(wy);
    let mut means = Vec::with_capacity(na * nb);
    for a in 0..na {
        for b in 0..nb {
            let m = mass_x[a].clone() * mass_y[b].clone();
            means.push(if m.is_zero() {
                S::zero()
            } else if xatoms[a].len() == 1 && yatoms[b].len() == 1 {
                f.get(xatoms[a][0], yatoms[b][0]).clone()
            } else {
                integrals[a * nb + b].clone() / m
            });
        }
    }
    Ok(AtomTable { na, nb, integrals, means, mass_x, mass_y })
}

/// E(f | B_X ∨ B_Y); zero on null atoms, exact on singleton atoms.
pub fn cond_exp_product<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor) -> Result<Kernel2<S>> {
    let t = atom_table(f, pf)?;
    Ok(expand(f, pf, &t.means))
}

pub(crate) fn expand<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor, per_atom: &[S]) -> Kernel2<S> {
    let nb = pf.y.n_atoms();
    Kernel2::from_fn(f.x().clone(), f.y().clone(), |x, y| per_atom[pf.x.atom_of(x) * nb + pf.y.atom_of(y)].clone())
}

/// ‖E(f | B_X ∨ B_Y)‖²₂.
pub fn energy<S: Scalar>(f: &Kernel2<S>, pf: &ProductFactor) -> Result<S> {
    let t = atom_table(f, pf)?;
    Ok(energy_of(&t))
}

pub(crate) fn energy_of<S: Scalar>(t: &AtomTable<S>) -> S {
    let terms: Vec<S> = (0..t.na * t.nb)
        .map(|i| {
            let m = t.means[i].clone();
            t.mass(i / t.nb, i % t.nb) * m.clone() * m
        })
        .collect();
    pairwise_sum(&terms)
}

pub(crate) fn require_unit<S: Scalar>(f: &Kernel2<S>, what: &str) -> Result<()> {
    if !f.in_range(&S::zero(), &S::one()) {
        return Err(Error::invalid(format!("{what} must take values in [0,1]")));
    }
    Ok(())
}
