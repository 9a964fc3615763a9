use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Scalar};
use serde::{Deserialize, Serialize};

/// A finite probability space.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasuredSpace<S> {
    weights: Vec<S>,
}

impl<S: Scalar> MeasuredSpace<S> {
    pub fn uniform(n: usize) -> Self {
        let w = if n == 0 { S::zero() } else { S::one() / S::from_usize(n).unwrap() };
        MeasuredSpace { weights: vec![w; n] }
    }

    /// Weights must be nonnegative and sum to 1 (exactly, or within 1e−12 in float).
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::invalid("negative weight"));
        }
        let total = pairwise_sum(&weights);
        let ok = if S::EXACT { total == S::one() } else { (total.to_f64_lossy() - 1.0).abs() <= 1e-12 };
        if !ok {
            return Err(Error::invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(MeasuredSpace { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn convert<T: Scalar>(&self) -> MeasuredSpace<T> {
        MeasuredSpace { weights: self.weights.iter().map(|w| T::from_f64(w.to_f64_lossy()).unwrap()).collect() }
    }
}

/// Declared range of a kernel's values, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundedMode {
    #[default]
    Unbounded,
    /// Values in [0, 1].
    Unit,
    /// Values in [−1, 1].
    Signed,
}

impl BoundedMode {
    pub fn admits<S: Scalar>(self, v: &S) -> bool {
        match self {
            BoundedMode::Unbounded => true,
            BoundedMode::Unit => *v >= S::zero() && *v <= S::one(),
            BoundedMode::Signed => v.abs() <= S::one(),
        }
    }
}

/// f : X × Y → ℝ, stored row-major (x outer).
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel2<S> {
    x: MeasuredSpace<S>,
    y: MeasuredSpace<S>,
    values: Vec<S>,
    bound: BoundedMode,
}

impl<S: Scalar> Kernel2<S> {
    pub fn new(x: MeasuredSpace<S>, y: MeasuredSpace<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != x.len() * y.len() {
            return Err(Error::ShapeMismatch(format!("{} values for a {}×{} kernel", values.len(), x.len(), y.len())));
        }
        Ok(Kernel2 { x, y, values, bound: BoundedMode::Unbounded })
    }

    pub fn uniform(nx: usize, ny: usize, values: Vec<S>) -> Result<Self> {
        Self::new(MeasuredSpace::uniform(nx), MeasuredSpace::uniform(ny), values)
    }

    pub fn from_fn(x: MeasuredSpace<S>, y: MeasuredSpace<S>, f: impl Fn(usize, usize) -> S) -> Self {
        let ny = y.len();
        let values = (0..x.len() * ny).map(|i| f(i / ny, i % ny)).collect();
        Kernel2 { x, y, values, bound: BoundedMode::Unbounded }
    }

    pub fn constant(x: MeasuredSpace<S>, y: MeasuredSpace<S>, c: S) -> Self {
        Self::from_fn(x, y, |_, _| c.clone())
    }

    /// Declare and validate a value range.
    pub fn with_bound(mut self, bound: BoundedMode) -> Result<Self> {
        if let Some(v) = self.values.iter().find(|v| !bound.admits(*v)) {
            return Err(Error::invalid(format!("value {v} violates bounded mode {bound:?}")));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn bound(&self) -> BoundedMode {
        self.bound
    }

    pub fn x(&self) -> &MeasuredSpace<S> {
        &self.x
    }

    pub fn y(&self) -> &MeasuredSpace<S> {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.values[i * self.ny() + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        let ny = self.ny();
        &self.values[i * ny..(i + 1) * ny]
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Kernel2 { x: self.x.clone(), y: self.y.clone(), values: self.values.iter().map(f).collect(), bound: BoundedMode::Unbounded }
    }

    pub fn same_spaces(&self, other: &Kernel2<S>) -> bool {
        self.x == other.x && self.y == other.y
    }

    pub fn zip_with(&self, other: &Kernel2<S>, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        if !self.same_spaces(other) {
            return Err(Error::ShapeMismatch("kernels live on different spaces".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Ok(Kernel2 { x: self.x.clone(), y: self.y.clone(), values, bound: BoundedMode::Unbounded })
    }

    pub fn sub(&self, other: &Kernel2<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn add(&self, other: &Kernel2<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn mul(&self, other: &Kernel2<S>) -> Result<Self> {
        self.zip_with(other, |a, b| a.clone() * b.clone())
    }

    pub fn transpose(&self) -> Self {
        let (nx, ny) = (self.nx(), self.ny());
        let values = (0..nx * ny).map(|i| self.values[(i % nx) * ny + i / nx].clone()).collect();
        Kernel2 { x: self.y.clone(), y: self.x.clone(), values, bound: self.bound }
    }

    /// ∫∫ f dμ_X dμ_Y.
    pub fn integral(&self) -> S {
        let ny = self.ny();
        let rows: Vec<S> = (0..self.nx())
            .map(|i| {
                let r = self.row(i);
                self.x.weight(i).clone() * pairwise_sum(&(0..ny).map(|j| self.y.weight(j).clone() * r[j].clone()).collect::<Vec<_>>())
            })
            .collect();
        pairwise_sum(&rows)
    }

    /// ‖f‖²_{L²}.
    pub fn l2_sq(&self) -> S {
        self.map(|v| v.clone() * v.clone()).integral()
    }

    pub fn max_abs(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn in_range(&self, lo: &S, hi: &S) -> bool {
        self.values.iter().all(|v| v >= lo && v <= hi)
    }

    /// Values with each column scaled by μ_Y.
    pub(crate) fn scaled_cols(&self) -> Vec<S> {
        let ny = self.ny();
        self.values.iter().enumerate().map(|(i, v)| v.clone() * self.y.weight(i % ny).clone()).collect()
    }

    pub fn convert<T: Scalar>(&self) -> Kernel2<T> {
        Kernel2 {
            x: self.x.convert(),
            y: self.y.convert(),
            values: self.values.iter().map(|v| T::from_f64(v.to_f64_lossy()).unwrap()).collect(),
            bound: self.bound,
        }
    }
}

/// f : X × Y × Z → ℝ, index (i·|Y| + j)·|Z| + k.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel3<S> {
    x: MeasuredSpace<S>,
    y: MeasuredSpace<S>,
    z: MeasuredSpace<S>,
    values: Vec<S>,
    bound: BoundedMode,
}

impl<S: Scalar> Kernel3<S> {
    pub fn new(x: MeasuredSpace<S>, y: MeasuredSpace<S>, z: MeasuredSpace<S>, values: Vec<S>) -> Result<Self> {
        if values.len() != x.len() * y.len() * z.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {}×{}×{} kernel",
                values.len(),
                x.len(),
                y.len(),
                z.len()
            )));
        }
        Ok(Kernel3 { x, y, z, values, bound: BoundedMode::Unbounded })
    }

    pub fn from_fn(x: MeasuredSpace<S>, y: MeasuredSpace<S>, z: MeasuredSpace<S>, f: impl Fn(usize, usize, usize) -> S) -> Self {
        let (ny, nz) = (y.len(), z.len());
        let values = (0..x.len() * ny * nz).map(|i| f(i / (ny * nz), i / nz % ny, i % nz)).collect();
        Kernel3 { x, y, z, values, bound: BoundedMode::Unbounded }
    }

    pub fn with_bound(mut self, bound: BoundedMode) -> Result<Self> {
        if let Some(v) = self.values.iter().find(|v| !bound.admits(*v)) {
            return Err(Error::invalid(format!("value {v} violates bounded mode {bound:?}")));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn bound(&self) -> BoundedMode {
        self.bound
    }

    pub fn spaces(&self) -> (&MeasuredSpace<S>, &MeasuredSpace<S>, &MeasuredSpace<S>) {
        (&self.x, &self.y, &self.z)
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.x.len(), self.y.len(), self.z.len())
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &S {
        &self.values[(i * self.y.len() + j) * self.z.len() + k]
    }
}
