//! Dense univariate polynomials and determinants of polynomial matrices.

use std::fmt;

use crate::error::{Error, Result};

/// Default largest matrix size accepted by [`polymat_det`].
pub const DEFAULT_DET_CAP: usize = 13;

/// Relative size below which odd coefficients are treated as rounding residue.
pub const EVEN_PART_TOLERANCE: f64 = 1e-9;

/// The indeterminate a polynomial is written in: `s = sqrt(t)` or the SNR `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variable {
    S,
    T,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::S => write!(f, "s"),
            Variable::T => write!(f, "t"),
        }
    }
}

/// `c_0 + c_1 x + ... + c_d x^d`, with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    var: Variable,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(var: Variable, mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn zero(var: Variable) -> Self {
        Self { var, coeffs: Vec::new() }
    }

    pub fn constant(var: Variable, c: f64) -> Self {
        Self::new(var, vec![c])
    }

    /// `c x^k`.
    pub fn monomial(var: Variable, k: usize, c: f64) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(var, coeffs)
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(
            self.var,
            (0..len).map(|k| self.coeff(k) + other.coeff(k)).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(Self::new(
            self.var,
            (0..len).map(|k| self.coeff(k) - other.coeff(k)).collect(),
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.var));
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self::new(self.var, out))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.var, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.var,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Evaluates `x^{-deg} p(x)` as a polynomial in `1/x`, which stays finite
    /// for large `x` when `p` has high degree.
    pub fn eval_reversed(&self, x: f64) -> f64 {
        let y = 1.0 / x;
        self.coeffs.iter().fold(0.0, |acc, c| acc * y + c)
    }

    /// Drops the coefficients at and above `x^k`.
    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.var, self.coeffs.iter().take(k).copied().collect())
    }

    /// Accumulates `c * a * b` into `self` without intermediate allocation.
    fn add_product(&mut self, a: &Self, b: &Self, c: f64) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let len = a.coeffs.len() + b.coeffs.len() - 1;
        if self.coeffs.len() < len {
            self.coeffs.resize(len, 0.0);
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            let cx = c * x;
            for (j, y) in b.coeffs.iter().enumerate() {
                self.coeffs[i + j] += cx * y;
            }
        }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{}", self.var)?,
                _ => write!(f, "{c}*{}^{k}", self.var)?,
            }
        }
        Ok(())
    }
}

/// Square matrix of polynomials in one shared variable.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    size: usize,
    var: Variable,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    /// Builds a `size x size` matrix from row-major entries.
    pub fn new(size: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != size * size || size == 0 {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {size}x{size} matrix, got {}",
                size * size,
                entries.len()
            )));
        }
        let var = entries[0].var;
        if entries.iter().any(|p| p.var != var) {
            return Err(Error::VariableMismatch);
        }
        Ok(Self { size, var, entries })
    }

    pub fn from_fn(size: usize, var: Variable, mut f: impl FnMut(usize, usize) -> Polynomial) -> Result<Self> {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        let m = Self::new(size, entries)?;
        if m.var != var {
            return Err(Error::VariableMismatch);
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn var(&self) -> Variable {
        self.var
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.size + j]
    }

    /// Numeric matrix obtained by evaluating every entry at `x`.
    pub fn eval(&self, x: f64) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.size, self.size, |i, j| self.get(i, j).eval(x))
    }
}

/// Determinant of a polynomial matrix of size at most `cap`.
///
/// Laplace expansion along rows, memoised over the set of used columns:
/// `D[S]` is the signed sum over bijections from the first `|S|` rows onto the
/// column set `S`. Division-free, `O(2^k k)` polynomial products.
pub fn polymat_det_with_cap(m: &PolyMatrix, cap: usize) -> Result<Polynomial> {
    let k = m.size;
    if k > cap {
        return Err(Error::CapExceeded {
            what: "polynomial matrix",
            size: k,
            cap,
        });
    }
    let var = m.var;
    let full = (1usize << k) - 1;
    let mut dp: Vec<Polynomial> = vec![Polynomial::zero(var); 1 << k];
    dp[0] = Polynomial::constant(var, 1.0);
    for set in 0..full {
        if dp[set].is_zero() {
            continue;
        }
        let row = set.count_ones() as usize;
        let cur = std::mem::replace(&mut dp[set], Polynomial::zero(var));
        for j in 0..k {
            if set & (1 << j) != 0 {
                continue;
            }
            let sign = if (set >> (j + 1)).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            dp[set | (1 << j)].add_product(&cur, m.get(row, j), sign);
        }
    }
    let mut det = std::mem::replace(&mut dp[full], Polynomial::zero(var));
    det.trim();
    Ok(det)
}

pub fn polymat_det(m: &PolyMatrix) -> Result<Polynomial> {
    polymat_det_with_cap(m, DEFAULT_DET_CAP)
}

/// Maps `p(s)` with vanishing odd coefficients to `q(t)`, `q(s^2) = p(s)`.
pub fn even_part(p: &Polynomial) -> Result<Polynomial> {
    if p.var != Variable::S {
        return Err(Error::VariableMismatch);
    }
    let bound = EVEN_PART_TOLERANCE * p.max_abs_coeff();
    for (k, c) in p.coeffs.iter().enumerate().skip(1).step_by(2) {
        if c.abs() > bound {
            return Err(Error::InternalConsistency(format!(
                "odd coefficient s^{k} = {c:e} exceeds tolerance {bound:e}"
            )));
        }
    }
    Ok(Polynomial::new(
        Variable::T,
        p.coeffs.iter().step_by(2).copied().collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(c: &[f64]) -> Polynomial {
        Polynomial::new(Variable::T, c.to_vec())
    }

    fn s(c: &[f64]) -> Polynomial {
        Polynomial::new(Variable::S, c.to_vec())
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(t(&[1.0, 1.0]).mul(&t(&[1.0, -1.0])).unwrap(), t(&[1.0, 0.0, -1.0]));
        assert_eq!(
            t(&[5.0, 15.0, 12.0, 2.0]).derivative(),
            t(&[15.0, 24.0, 6.0])
        );
        assert_eq!(t(&[1.0, 2.5]).eval(0.0), 1.0);
        assert_eq!(t(&[1.0]).add(&s(&[1.0])), Err(Error::VariableMismatch));
        assert_eq!(t(&[1.0, 2.0]).sub(&t(&[1.0, 2.0])).unwrap().degree(), None);
        assert_eq!(t(&[3.0]).derivative(), Polynomial::zero(Variable::T));
    }

    #[test]
    fn reversed_eval_matches_scaled_horner() {
        let p = t(&[2.0, -1.0, 0.5, 3.0]);
        let x: f64 = 7.0;
        assert!((p.eval_reversed(x) - p.eval(x) / x.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn det_examples() {
        let one = PolyMatrix::new(1, vec![s(&[2.0, 1.0])]).unwrap();
        assert_eq!(polymat_det(&one).unwrap(), s(&[2.0, 1.0]));

        let m = PolyMatrix::new(
            2,
            vec![s(&[1.0]), s(&[0.0, 1.0]), s(&[0.0, 1.0]), s(&[1.0, 0.0, 1.0])],
        )
        .unwrap();
        assert_eq!(polymat_det(&m).unwrap(), s(&[1.0]));

        let sigma2 = 2.5;
        let m = PolyMatrix::new(
            2,
            vec![s(&[1.0]), s(&[0.0]), s(&[0.0]), s(&[1.0, 0.0, sigma2])],
        )
        .unwrap();
        assert_eq!(polymat_det(&m).unwrap(), s(&[1.0, 0.0, sigma2]));
    }

    #[test]
    fn det_sign_on_permutation_matrix() {
        let e = |v: f64| t(&[v]);
        let m = PolyMatrix::new(
            3,
            vec![e(0.0), e(1.0), e(0.0), e(0.0), e(0.0), e(1.0), e(1.0), e(0.0), e(0.0)],
        )
        .unwrap();
        assert_eq!(polymat_det(&m).unwrap(), t(&[1.0]));
        let m = PolyMatrix::new(
            3,
            vec![e(0.0), e(1.0), e(0.0), e(1.0), e(0.0), e(0.0), e(0.0), e(0.0), e(1.0)],
        )
        .unwrap();
        assert_eq!(polymat_det(&m).unwrap(), t(&[-1.0]));
    }

    #[test]
    fn det_cap() {
        let m = PolyMatrix::from_fn(3, Variable::T, |i, j| {
            Polynomial::constant(Variable::T, (i == j) as u8 as f64)
        })
        .unwrap();
        assert!(matches!(
            polymat_det_with_cap(&m, 2),
            Err(Error::CapExceeded { size: 3, cap: 2, .. })
        ));
    }

    #[test]
    fn even_part_examples() {
        assert_eq!(even_part(&s(&[1.0, 0.0, 3.0, 0.0, 1.0])).unwrap(), t(&[1.0, 3.0, 1.0]));
        assert_eq!(even_part(&s(&[0.0, 0.0, 1.0])).unwrap(), t(&[0.0, 1.0]));
        assert_eq!(even_part(&s(&[1.0, 1e-15, 1.0])).unwrap(), t(&[1.0, 1.0]));
        assert!(matches!(
            even_part(&s(&[1.0, 0.1, 1.0])),
            Err(Error::InternalConsistency(_))
        ));
        assert_eq!(even_part(&t(&[1.0])), Err(Error::VariableMismatch));
    }
}
