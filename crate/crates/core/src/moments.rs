//! Moment sequences, standardization, and Hankel moment matrices.
//!
//! Moments are stored raw (not central). A scalar moment vector holds
//! `mu_1..mu_order` with `mu_0 = 1` implicit; a [`MultiMomentTable`] holds every
//! joint moment `E[prod V_j^{a_j}]` with total degree up to its order, laid out in
//! the degree-then-reverse-lexicographic monomial order of [`monomial_basis`].

use std::collections::HashMap;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::combin::{binomial, pairwise_sum};
use crate::error::{Error, Result};

/// Relative pivot below which a moment matrix is treated as singular.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Raw moments `mu_1..mu_order` of a scalar random variable.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    /// Builds a moment vector from `mu_1..mu_k`. The order must be even and positive.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "moment order must be even and positive, got {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite moment {v}")));
        }
        Ok(Self { values })
    }

    /// Largest moment index available.
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `E[X^k]`, with `E[X^0] = 1`.
    ///
    /// Panics if `k > order`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }

    /// `mu_1..mu_order`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values[0]
    }

    pub fn variance(&self) -> f64 {
        self.values[1] - self.values[0] * self.values[0]
    }

    /// Keeps only `mu_1..mu_order`.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InsufficientOrder {
                needed: order,
                got: self.order(),
            });
        }
        Self::new(self.values[..order].to_vec())
    }

    /// Moments of `a X + b` by binomial expansion.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let order = self.order();
        let mut out = Vec::with_capacity(order);
        let mut a_pow = vec![1.0; order + 1];
        let mut b_pow = vec![1.0; order + 1];
        for k in 1..=order {
            a_pow[k] = a_pow[k - 1] * a;
            b_pow[k] = b_pow[k - 1] * b;
        }
        for k in 1..=order {
            let v: f64 = (0..=k)
                .map(|j| binomial(k, j) * a_pow[j] * self.get(j) * b_pow[k - j])
                .sum();
            out.push(v);
        }
        Self { values: out }
    }

    /// Moments of the standardized variable `(X - mean) / sd`, with the map used.
    pub fn standardized(&self) -> Result<(Self, Standardization)> {
        let var = self.variance();
        if !(var > 0.0) {
            return Err(Error::DegenerateSupport(format!(
                "variance {var} is not positive"
            )));
        }
        let sd = var.sqrt();
        let mean = self.mean();
        let mut z = self.affine(1.0 / sd, -mean / sd);
        // Pin the first two moments; the binomial expansion leaves O(eps) residue.
        z.values[0] = 0.0;
        z.values[1] = 1.0;
        Ok((z, Standardization::scalar(mean, sd)?))
    }

    /// Moments of the centered variable `X - E[X]`.
    pub fn centered(&self) -> Self {
        let mut c = self.affine(1.0, -self.mean());
        c.values[0] = 0.0;
        c
    }
}

/// Affine map `original = scale * standardized + shift`, per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    shift: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardization {
    pub fn new(shift: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        if shift.len() != scale.len() || shift.is_empty() {
            return Err(Error::InvalidArgument(
                "shift and scale must be nonempty and of equal length".into(),
            ));
        }
        if let Some(s) = scale.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!("scale {s} must be positive")));
        }
        Ok(Self { shift, scale })
    }

    pub fn scalar(shift: f64, scale: f64) -> Result<Self> {
        Self::new(vec![shift], vec![scale])
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            shift: vec![0.0; dim],
            scale: vec![1.0; dim],
        }
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// `sum_j log(scale_j)`: the entropy correction for undoing this map.
    pub fn log_scale_sum(&self) -> f64 {
        self.scale.iter().map(|s| s.ln()).sum()
    }

    /// Composition: first `inner`, then `self` applied to the standardized values.
    ///
    /// If `x = s1 * y + b1` and `y = s2 * z + b2` then `x = s1 s2 z + (s1 b2 + b1)`.
    pub fn compose(&self, inner: &Standardization) -> Self {
        let shift = self
            .shift
            .iter()
            .zip(&self.scale)
            .zip(&inner.shift)
            .map(|((b1, s1), b2)| s1 * b2 + b1)
            .collect();
        let scale = self
            .scale
            .iter()
            .zip(&inner.scale)
            .map(|(a, b)| a * b)
            .collect();
        Self { shift, scale }
    }
}

/// Empirical raw moments `(1/m) sum_j x_j^k` for `k = 1..order`.
pub fn sample_moments(samples: &[f64], order: usize) -> Result<MomentVector> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if order < 2 || !order.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "moment order must be even and >= 2, got {order}"
        )));
    }
    let m = samples.len() as f64;
    let mut columns = vec![Vec::with_capacity(samples.len()); order];
    for &x in samples {
        let mut p = 1.0;
        for col in columns.iter_mut() {
            p *= x;
            col.push(p);
        }
    }
    MomentVector::new(columns.iter().map(|c| pairwise_sum(c) / m).collect())
}

fn mean_and_sd(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let m = samples.len() as f64;
    let mean = pairwise_sum(samples) / m;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / m;
    if !(var > 0.0) || !var.is_finite() {
        return Err(Error::DegenerateSupport(format!(
            "sample variance {var} is not positive"
        )));
    }
    Ok((mean, var.sqrt()))
}

/// Maps samples to empirical mean 0 and (population) variance 1.
pub fn standardize(samples: &[f64]) -> Result<(Vec<f64>, Standardization)> {
    let (mean, sd) = mean_and_sd(samples)?;
    let z = samples.iter().map(|x| (x - mean) / sd).collect();
    Ok((z, Standardization::scalar(mean, sd)?))
}

/// Per-coordinate standardization of row-major `m`-dimensional samples.
pub fn standardize_rows(rows: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, Standardization)> {
    let dim = row_dim(rows)?;
    let mut shift = Vec::with_capacity(dim);
    let mut scale = Vec::with_capacity(dim);
    for j in 0..dim {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let (mean, sd) = mean_and_sd(&col).map_err(|e| match e {
            Error::DegenerateSupport(msg) => {
                Error::DegenerateSupport(format!("coordinate {j}: {msg}"))
            }
            other => other,
        })?;
        shift.push(mean);
        scale.push(sd);
    }
    let z = rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(j, x)| (x - shift[j]) / scale[j])
                .collect()
        })
        .collect();
    Ok((z, Standardization::new(shift, scale)?))
}

fn row_dim(rows: &[Vec<f64>]) -> Result<usize> {
    let first = rows.first().ok_or(Error::EmptySamples)?;
    let dim = first.len();
    if dim == 0 {
        return Err(Error::InvalidArgument("samples have zero dimension".into()));
    }
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::InvalidArgument("ragged sample rows".into()));
    }
    Ok(dim)
}

/// `E[N^k]` for a standard normal `N`: `(k-1)!!` for even `k`, 0 for odd.
pub fn gaussian_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut acc = 1.0;
    let mut j = 1;
    while j < k {
        acc *= j as f64;
        j += 2;
    }
    acc
}

/// `E[prod N_j^{a_j}]` for independent standard normals.
pub fn gaussian_joint_moment(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&a| gaussian_moment(a as usize)).product()
}

/// Hankel moment matrix `M[i][j] = E[Y^{i+j}]`, `0 <= i, j <= n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    n: usize,
    entries: DMatrix<f64>,
}

impl HankelMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

pub fn hankel(mv: &MomentVector, n: usize) -> Result<HankelMatrix> {
    if mv.order() < 2 * n {
        return Err(Error::InsufficientOrder {
            needed: 2 * n,
            got: mv.order(),
        });
    }
    let entries = DMatrix::from_fn(n + 1, n + 1, |i, j| mv.get(i + j));
    Ok(HankelMatrix { n, entries })
}

/// Cholesky factor of a symmetric positive definite matrix, computed after
/// symmetric diagonal equilibration `S = D H D`, `D = diag(H_ii^{-1/2})`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    chol: Cholesky<f64, Dyn>,
    inv_sqrt_diag: DVector<f64>,
    log_det: f64,
    min_pivot: f64,
}

impl SpdFactor {
    /// Factors `h`, rejecting it as degenerate if any equilibrated pivot falls
    /// below `threshold`.
    pub fn with_threshold(h: &DMatrix<f64>, threshold: f64) -> Result<Self> {
        let size = h.nrows();
        if size == 0 || h.ncols() != size {
            return Err(Error::InvalidArgument("matrix must be square and nonempty".into()));
        }
        let mut inv_sqrt_diag = DVector::zeros(size);
        for i in 0..size {
            let d = h[(i, i)];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::DegenerateSupport(format!(
                    "diagonal entry {i} is {d}"
                )));
            }
            inv_sqrt_diag[i] = 1.0 / d.sqrt();
        }
        let scaled = DMatrix::from_fn(size, size, |i, j| {
            h[(i, j)] * inv_sqrt_diag[i] * inv_sqrt_diag[j]
        });
        let chol = Cholesky::new(scaled).ok_or_else(|| {
            Error::DegenerateSupport("matrix is not positive definite".into())
        })?;
        let l = chol.l_dirty();
        let mut min_pivot = f64::INFINITY;
        let mut log_det = 0.0;
        for i in 0..size {
            let pivot = l[(i, i)] * l[(i, i)];
            if !(pivot >= threshold) {
                return Err(Error::DegenerateSupport(format!(
                    "pivot {i} of {size} is {pivot:.3e} (relative), support too small for this degree"
                )));
            }
            min_pivot = min_pivot.min(pivot);
            log_det += pivot.ln() + h[(i, i)].ln();
        }
        Ok(Self {
            chol,
            inv_sqrt_diag,
            log_det,
            min_pivot,
        })
    }

    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        Self::with_threshold(h, DEGENERACY_THRESHOLD)
    }

    pub fn size(&self) -> usize {
        self.inv_sqrt_diag.len()
    }

    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn det(&self) -> f64 {
        self.log_det.exp()
    }

    /// Smallest equilibrated pivot; near zero signals near-singularity.
    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    /// Lower-triangular `L` with `L L^T = H` (undoing the equilibration).
    pub fn lower(&self) -> DMatrix<f64> {
        let l = self.chol.l();
        DMatrix::from_fn(self.size(), self.size(), |i, j| {
            l[(i, j)] / self.inv_sqrt_diag[i]
        })
    }

    /// Solves `H x = b`.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let scaled = b.component_mul(&self.inv_sqrt_diag);
        self.chol.solve(&scaled).component_mul(&self.inv_sqrt_diag)
    }

    /// `b^T H^{-1} b`.
    pub fn quad_form(&self, b: &DVector<f64>) -> f64 {
        let scaled = b.component_mul(&self.inv_sqrt_diag);
        let x = self.chol.solve(&scaled);
        scaled.dot(&x)
    }

    /// `trace(H^{-1} B)`.
    pub fn trace_solve(&self, b: &DMatrix<f64>) -> f64 {
        let size = self.size();
        let scaled = DMatrix::from_fn(size, size, |i, j| {
            b[(i, j)] * self.inv_sqrt_diag[i] * self.inv_sqrt_diag[j]
        });
        self.chol.solve(&scaled).trace()
    }
}

/// Determinant and Cholesky factor of a Hankel moment matrix.
///
/// Fails with [`Error::DegenerateSupport`] when the matrix is numerically
/// singular, which for moment matrices means the support has at most `n` points.
pub fn det_and_factor(h: &HankelMatrix) -> Result<(f64, SpdFactor)> {
    let f = SpdFactor::new(&h.entries)?;
    Ok((f.det(), f))
}

/// Monomial exponents of total degree at most `n` in `m` variables, ordered
/// first by total degree and then reverse-lexicographically
/// (`(1,0,0) < (0,1,0) < (0,0,1)`).
pub fn monomial_basis(n: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for degree in 0..=n {
        let mut cur = vec![0u32; m];
        push_compositions(degree as u32, 0, &mut cur, &mut out);
    }
    out
}

fn push_compositions(rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = rest;
        out.push(cur.clone());
        return;
    }
    for first in (0..=rest).rev() {
        cur[pos] = first;
        push_compositions(rest - first, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Joint moments `E[prod_j V_j^{a_j}]` for all `|a| <= order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiMomentTable {
    dim: usize,
    order: usize,
    indices: Vec<Vec<u32>>,
    values: Vec<f64>,
    lookup: HashMap<Vec<u32>, usize>,
}

impl MultiMomentTable {
    /// Builds a table by evaluating `moment` on every multi-index of total
    /// degree at most `order`. The zero index is forced to 1.
    pub fn from_fn(dim: usize, order: usize, mut moment: impl FnMut(&[u32]) -> f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let indices = monomial_basis(order, dim);
        let mut values = Vec::with_capacity(indices.len());
        for (i, a) in indices.iter().enumerate() {
            let v = if i == 0 { 1.0 } else { moment(a) };
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite joint moment at {a:?}")));
            }
            values.push(v);
        }
        let lookup = indices.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Ok(Self {
            dim,
            order,
            indices,
            values,
            lookup,
        })
    }

    /// Lifts a scalar moment vector to a one-dimensional table.
    pub fn from_scalar(mv: &MomentVector) -> Self {
        Self::from_fn(1, mv.order(), |a| mv.get(a[0] as usize)).expect("finite scalar moments")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Multi-indices in table order.
    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `E[prod V_j^{a_j}]`; `None` if `|a|` exceeds the order or the arity is wrong.
    pub fn get(&self, alpha: &[u32]) -> Option<f64> {
        self.lookup.get(alpha).map(|&i| self.values[i])
    }

    /// Like [`get`](Self::get) but panics on a missing index.
    pub fn at(&self, alpha: &[u32]) -> f64 {
        match self.get(alpha) {
            Some(v) => v,
            None => panic!("multi-index {alpha:?} not in table of order {}", self.order),
        }
    }

    /// Marginal moments of coordinate `j`.
    pub fn marginal(&self, j: usize) -> Result<MomentVector> {
        let mut a = vec![0u32; self.dim];
        let values = (1..=self.order)
            .map(|k| {
                a[j] = k as u32;
                self.at(&a)
            })
            .collect();
        MomentVector::new(values)
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|j| {
                let mut a = vec![0u32; self.dim];
                a[j] = 1;
                self.at(&a)
            })
            .collect()
    }

    /// Joint moments of `(scale_j V_j + shift_j)_j`.
    pub fn affine(&self, scale: &[f64], shift: &[f64]) -> Result<Self> {
        if scale.len() != self.dim || shift.len() != self.dim {
            return Err(Error::InvalidArgument("affine map arity mismatch".into()));
        }
        Self::from_fn(self.dim, self.order, |alpha| {
            let mut total = 0.0;
            for_each_below(alpha, |gamma| {
                let mut w = 1.0;
                for j in 0..alpha.len() {
                    let (a, g) = (alpha[j] as usize, gamma[j] as usize);
                    w *= binomial(a, g) * scale[j].powi(g as i32) * shift[j].powi((a - g) as i32);
                }
                total += w * self.at(gamma);
            });
            total
        })
    }

    /// Joint moments of the per-coordinate centered vector.
    pub fn centered(&self) -> Result<Self> {
        let shift: Vec<f64> = self.means().iter().map(|m| -m).collect();
        let mut c = self.affine(&vec![1.0; self.dim], &shift)?;
        for j in 0..self.dim {
            let mut a = vec![0u32; self.dim];
            a[j] = 1;
            let i = c.lookup[&a];
            c.values[i] = 0.0;
        }
        Ok(c)
    }
}

/// Calls `f` on every multi-index `gamma` with `gamma <= alpha` componentwise.
pub(crate) fn for_each_below(alpha: &[u32], mut f: impl FnMut(&[u32])) {
    let mut gamma = vec![0u32; alpha.len()];
    loop {
        f(&gamma);
        let mut j = 0;
        loop {
            if j == alpha.len() {
                return;
            }
            if gamma[j] < alpha[j] {
                gamma[j] += 1;
                break;
            }
            gamma[j] = 0;
            j += 1;
        }
    }
}

/// Empirical joint moments of row-major samples for every `|a| <= order`.
pub fn joint_sample_moments(rows: &[Vec<f64>], order: usize) -> Result<MultiMomentTable> {
    let dim = row_dim(rows)?;
    let m = rows.len() as f64;
    let indices = monomial_basis(order, dim);
    let mut columns = vec![Vec::with_capacity(rows.len()); indices.len()];
    let mut powers = vec![vec![1.0; order + 1]; dim];
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            for k in 1..=order {
                powers[j][k] = powers[j][k - 1] * x;
            }
        }
        for (col, alpha) in columns.iter_mut().zip(&indices) {
            let v: f64 = alpha
                .iter()
                .enumerate()
                .map(|(j, &a)| powers[j][a as usize])
                .product();
            col.push(v);
        }
    }
    let sums: Vec<f64> = columns.iter().map(|c| pairwise_sum(c) / m).collect();
    let mut it = sums.into_iter().skip(1);
    MultiMomentTable::from_fn(dim, order, |_| it.next().unwrap_or(f64::NAN)).map(|mut t| {
        t.values[0] = 1.0;
        t
    })
}
