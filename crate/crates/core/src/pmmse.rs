//! Polynomial minimum mean-squared error: the general estimator for a pair
//! `(X, Y)`, and the Gaussian channel `Y = sqrt(t) X + N` both as an exact
//! rational function of `t` and as a pointwise evaluation.

use nalgebra::DVector;

use crate::channel::GaussianChannel;
use crate::combin::{barnes_g, binomial};
use crate::error::{Error, Result};
use crate::moments::{gaussian_moment, HankelMatrix, MomentVector, MultiMomentTable, SpdFactor};
use crate::polyring::{
    even_part, polymat_det_with_cap, PolyMatrix, Polynomial, Variable, DEFAULT_DET_CAP,
};

/// Largest degree accepted by [`channel_rational`].
pub const MAX_RATIONAL_DEGREE: usize = DEFAULT_DET_CAP - 2;

/// Coefficients `c_0..c_n` of the best degree-`n` polynomial estimate
/// `E_n[X | Y] = sum_j c_j Y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmmseEstimate {
    pub n: usize,
    pub coeffs: Vec<f64>,
}

impl PmmseEstimate {
    pub fn eval(&self, y: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * y + c)
    }
}

/// `E[X Y^k]` for `k = 0..n`, and `E[X^2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMoments {
    pub e_xy: Vec<f64>,
    pub e_x2: f64,
}

impl CrossMoments {
    pub fn new(e_xy: Vec<f64>, e_x2: f64) -> Result<Self> {
        if e_xy.is_empty() || e_xy.iter().chain([&e_x2]).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "cross moments must be nonempty and finite".into(),
            ));
        }
        Ok(Self { e_xy, e_x2 })
    }

    /// Empirical cross moments of paired samples.
    pub fn from_samples(x: &[f64], y: &[f64], n: usize) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptySamples);
        }
        if x.len() != y.len() {
            return Err(Error::InvalidArgument("x and y lengths differ".into()));
        }
        let m = x.len() as f64;
        let mut cols = vec![Vec::with_capacity(x.len()); n + 1];
        for (xi, yi) in x.iter().zip(y) {
            let mut p = *xi;
            for col in cols.iter_mut() {
                col.push(p);
                p *= yi;
            }
        }
        let e_xy = cols
            .iter()
            .map(|c| crate::combin::pairwise_sum(c) / m)
            .collect();
        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
        Self::new(e_xy, crate::combin::pairwise_sum(&sq) / m)
    }
}

fn cross_vector(cm: &CrossMoments, h: &HankelMatrix) -> Result<DVector<f64>> {
    if cm.e_xy.len() != h.n() + 1 {
        return Err(Error::InvalidArgument(format!(
            "cross moment length {} does not match degree {}",
            cm.e_xy.len(),
            h.n()
        )));
    }
    Ok(DVector::from_column_slice(&cm.e_xy))
}

/// Solves the normal equations `M_{Y,n} c = E[X Y^{(n)}]`.
pub fn pmmse_estimate(cm: &CrossMoments, h: &HankelMatrix) -> Result<PmmseEstimate> {
    let b = cross_vector(cm, h)?;
    let factor = SpdFactor::new(h.entries())?;
    Ok(PmmseEstimate {
        n: h.n(),
        coeffs: factor.solve(&b).iter().copied().collect(),
    })
}

/// `E[X^2] - E[X Y^{(n)}]^T M_{Y,n}^{-1} E[X Y^{(n)}]`.
pub fn pmmse_value(cm: &CrossMoments, h: &HankelMatrix) -> Result<f64> {
    let b = cross_vector(cm, h)?;
    let factor = SpdFactor::new(h.entries())?;
    Ok(cm.e_x2 - factor.quad_form(&b))
}

/// Moments of `a X + b`.
pub fn affine_transform_moments(mv: &MomentVector, a: f64, b: f64) -> Result<MomentVector> {
    if a == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "affine map needs finite a != 0 and finite b, got a={a}, b={b}"
        )));
    }
    Ok(mv.affine(a, b))
}

/// `E[(sX + N)^k] = sum_p C(k,p) mu_p E[N^{k-p}] s^p` as a polynomial in `s`.
fn channel_moment_poly(mv: &MomentVector, k: usize) -> Polynomial {
    Polynomial::new(
        Variable::S,
        (0..=k)
            .map(|p| binomial(k, p) * mv.get(p) * gaussian_moment(k - p))
            .collect(),
    )
}

/// `E[X (sX + N)^k]` as a polynomial in `s`.
fn channel_cross_poly(mv: &MomentVector, k: usize) -> Polynomial {
    Polynomial::new(
        Variable::S,
        (0..=k)
            .map(|p| binomial(k, p) * mv.get(p + 1) * gaussian_moment(k - p))
            .collect(),
    )
}

/// Moment matrix of `sX + N` with entries `E[(sX+N)^{i+j}]`, polynomials in `s`.
pub fn channel_poly_matrix(mv: &MomentVector, n: usize) -> Result<PolyMatrix> {
    if mv.order() < 2 * n {
        return Err(Error::InsufficientOrder {
            needed: 2 * n,
            got: mv.order(),
        });
    }
    let polys: Vec<Polynomial> = (0..=2 * n).map(|k| channel_moment_poly(mv, k)).collect();
    PolyMatrix::from_fn(n + 1, Variable::S, |i, j| polys[i + j].clone())
}

/// `pmmse_n(X, t) = num(t) / den(t)`, normalized so that `den(0) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PmmseRational {
    pub n: usize,
    /// `C(n+1, 2)`, the nominal degree of the denominator.
    pub d_n: usize,
    pub num: Polynomial,
    pub den: Polynomial,
    /// The coefficient of `t^{d_n}` removed from the numerator, which vanishes
    /// in exact arithmetic.
    pub truncated: f64,
}

impl PmmseRational {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 1.0 {
            return self.num.eval(t) / self.den.eval(t);
        }
        let top = self.den.coeffs().len().max(self.num.coeffs().len());
        scaled_eval(&self.num, t, top) / scaled_eval(&self.den, t, top)
    }

    /// `den'(t) / den(t)`.
    pub fn logdet_derivative(&self, t: f64) -> f64 {
        let dden = self.den.derivative();
        if t <= 1.0 {
            return dden.eval(t) / self.den.eval(t);
        }
        let top = self.den.coeffs().len();
        scaled_eval(&dden, t, top) / scaled_eval(&self.den, t, top)
    }

    /// `(num/den - den'/(d_n den)) / 2`.
    pub fn rho_at(&self, t: f64) -> f64 {
        0.5 * (self.eval(t) - self.logdet_derivative(t) / self.d_n as f64)
    }
}

/// `t^{1-len} p(t)` with `p` padded to `len` coefficients.
fn scaled_eval(p: &Polynomial, t: f64, len: usize) -> f64 {
    let y = 1.0 / t;
    let c = p.coeffs();
    (0..len).fold(0.0, |acc, j| acc * y + c.get(j).copied().unwrap_or(0.0))
}

/// The rational function `pmmse_n(X, t)` for `n <= 11`.
///
/// The denominator is `det M_{sqrt(t)X+N,n}`; the numerator is the determinant
/// of the moment matrix of `(1, Y, ..., Y^n, X)`, which equals the denominator
/// times the PMMSE by the Schur complement. Both are divided by `G(n+2)`.
pub fn channel_rational(mv: &MomentVector, n: usize) -> Result<PmmseRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree n must be at least 1".into()));
    }
    if n > MAX_RATIONAL_DEGREE {
        return Err(Error::CapExceeded {
            what: "rational pmmse degree",
            size: n,
            cap: MAX_RATIONAL_DEGREE,
        });
    }
    if mv.order() < 2 * n {
        return Err(Error::InsufficientOrder {
            needed: 2 * n,
            got: mv.order(),
        });
    }
    if !(mv.variance() > 0.0) {
        return rational_in_place(&mv.centered(), n);
    }
    // Both determinants are shift invariant, and scaling X by sd maps t to sd^2 t.
    let (z, st) = mv.standardized()?;
    let var = st.scale()[0].powi(2);
    let r = rational_in_place(&z, n)?;
    let stretch = |p: &Polynomial, factor: f64| {
        let mut c = factor;
        Polynomial::new(
            Variable::T,
            p.coeffs()
                .iter()
                .map(|a| {
                    let v = a * c;
                    c *= var;
                    v
                })
                .collect(),
        )
    };
    Ok(PmmseRational {
        truncated: r.truncated * var * var.powi(r.d_n as i32),
        num: stretch(&r.num, var),
        den: stretch(&r.den, 1.0),
        ..r
    })
}

fn rational_in_place(mv: &MomentVector, n: usize) -> Result<PmmseRational> {
    let base = channel_poly_matrix(mv, n)?;
    let size = n + 2;
    let bordered = PolyMatrix::from_fn(size, Variable::S, |i, j| match (i <= n, j <= n) {
        (true, true) => base.get(i, j).clone(),
        (true, false) => channel_cross_poly(mv, i),
        (false, true) => channel_cross_poly(mv, j),
        (false, false) => Polynomial::constant(Variable::S, mv.get(2)),
    })?;
    let norm = 1.0 / barnes_g(n);
    let den = even_part(&polymat_det_with_cap(&base, DEFAULT_DET_CAP)?)?.scale(norm);
    let num_full = even_part(&polymat_det_with_cap(&bordered, DEFAULT_DET_CAP)?)?.scale(norm);
    let d_n = n * (n + 1) / 2;
    Ok(PmmseRational {
        n,
        d_n,
        truncated: num_full.coeff(d_n),
        num: num_full.truncate(d_n),
        den,
    })
}

/// `pmmse_n(X, t)` by one linear solve at this `t`.
pub fn channel_pmmse_at(mv: &MomentVector, n: usize, t: f64) -> Result<f64> {
    Ok(GaussianChannel::from_scalar(mv, n)?.evaluate(t)?.pmmse)
}

/// `sum_k pmmse_n(V_k | sqrt(t) V + N)` over the total-degree-`n` monomial basis.
pub fn multivariate_channel_pmmse_at(table: &MultiMomentTable, n: usize, t: f64) -> Result<f64> {
    Ok(GaussianChannel::new(table, n)?.evaluate(t)?.pmmse)
}

/// `d/dt log det M_{sqrt(t) V + N, n}`.
pub fn logdet_derivative_at(table: &MultiMomentTable, n: usize, t: f64) -> Result<f64> {
    Ok(GaussianChannel::new(table, n)?.evaluate(t)?.logdet_derivative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{hankel, sample_moments};
    use approx::assert_relative_eq;

    fn mv(v: &[f64]) -> MomentVector {
        MomentVector::new(v.to_vec()).unwrap()
    }

    fn rademacher(order: usize) -> MomentVector {
        mv(&(1..=order)
            .map(|k| if k % 2 == 0 { 1.0 } else { 0.0 })
            .collect::<Vec<_>>())
    }

    #[test]
    fn n1_is_lmmse() {
        // Y standard normal, X = 2Y + 1 + independent noise of variance 3.
        let y = mv(&[0.0, 1.0]);
        let h = hankel(&y, 1).unwrap();
        let cm = CrossMoments::new(vec![1.0, 2.0], 1.0 + 4.0 + 3.0).unwrap();
        let est = pmmse_estimate(&cm, &h).unwrap();
        assert_relative_eq!(est.coeffs[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(est.coeffs[1], 2.0, epsilon = 1e-14);
        // sigma_X^2 (1 - rho^2) with sigma_X^2 = 7, rho^2 = 4/7.
        assert_relative_eq!(pmmse_value(&cm, &h).unwrap(), 3.0, epsilon = 1e-13);
    }

    #[test]
    fn independent_x_gives_constant() {
        let y = mv(&[0.4, 1.3, 1.1, 4.2, 5.0, 19.0]);
        let h = hankel(&y, 3).unwrap();
        let ex = 2.5;
        let cm = CrossMoments::new((0..=3).map(|k| ex * y.get(k)).collect(), 9.0).unwrap();
        let est = pmmse_estimate(&cm, &h).unwrap();
        assert_relative_eq!(est.coeffs[0], ex, epsilon = 1e-10);
        for c in &est.coeffs[1..] {
            assert!(c.abs() < 1e-10);
        }
        assert_relative_eq!(pmmse_value(&cm, &h).unwrap(), 9.0 - ex * ex, epsilon = 1e-10);
    }

    #[test]
    fn x_equal_y_squared() {
        let y = mv(&[0.0, 1.0, 0.0, 3.0]);
        let h = hankel(&y, 2).unwrap();
        let cm = CrossMoments::new(vec![1.0, 0.0, 3.0], 3.0).unwrap();
        let est = pmmse_estimate(&cm, &h).unwrap();
        assert_relative_eq!(est.coeffs[0], 0.0, epsilon = 1e-14);
        assert_relative_eq!(est.coeffs[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(est.coeffs[2], 1.0, epsilon = 1e-14);
        assert!(pmmse_value(&cm, &h).unwrap().abs() < 1e-14);
    }

    #[test]
    fn cross_moments_from_samples() {
        let x = [1.0, 2.0, 3.0];
        let y = [0.5, -1.0, 2.0];
        let cm = CrossMoments::from_samples(&x, &y, 2).unwrap();
        assert_relative_eq!(cm.e_xy[0], 2.0);
        assert_relative_eq!(cm.e_xy[1], (0.5 - 2.0 + 6.0) / 3.0);
        assert_relative_eq!(cm.e_xy[2], (0.25 + 2.0 + 12.0) / 3.0);
        assert_relative_eq!(cm.e_x2, 14.0 / 3.0);
    }

    #[test]
    fn channel_matrix_examples() {
        let m = channel_poly_matrix(&mv(&[0.0, 1.0]), 1).unwrap();
        assert_eq!(m.get(0, 0).coeffs(), &[1.0]);
        assert!(m.get(0, 1).is_zero());
        assert_eq!(m.get(1, 1).coeffs(), &[1.0, 0.0, 1.0]);
        let m = channel_poly_matrix(&mv(&[1.0, 1.0]), 1).unwrap();
        assert_eq!(m.get(0, 1).coeffs(), &[0.0, 1.0]);
        assert_eq!(m.get(1, 1).coeffs(), &[1.0, 0.0, 1.0]);
        let m = channel_poly_matrix(&rademacher(4), 2).unwrap();
        assert_eq!(m.get(2, 2).coeffs(), &[3.0, 0.0, 6.0, 0.0, 1.0]);
        let m = channel_poly_matrix(&mv(&[3.0, 11.0]), 1).unwrap();
        assert_eq!(m.get(0, 0).coeffs(), &[1.0]);
    }

    #[test]
    fn n1_rational_is_linear_mmse() {
        let x = mv(&[0.5, 2.25]);
        let r = channel_rational(&x, 1).unwrap();
        assert_relative_eq!(r.num.coeff(0), 2.0, max_relative = 1e-14);
        assert_eq!(r.num.degree(), Some(0));
        assert_relative_eq!(r.den.coeff(0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.den.coeff(1), 2.0, max_relative = 1e-14);
        assert!(r.truncated.abs() < 1e-12);
    }

    #[test]
    fn rademacher_n5_at_one() {
        let x = rademacher(10);
        assert_relative_eq!(
            channel_pmmse_at(&x, 5, 1.0).unwrap(),
            1380.0 / 3044.0,
            max_relative = 1e-12
        );
        let r = channel_rational(&x, 5).unwrap();
        assert_relative_eq!(r.eval(1.0), 1380.0 / 3044.0, max_relative = 1e-10);
    }

    #[test]
    fn pmmse_at_zero_is_variance() {
        let x = mv(&[0.3, 1.5, 0.2, 4.0]);
        assert_relative_eq!(channel_pmmse_at(&x, 2, 0.0).unwrap(), x.variance(), max_relative = 1e-13);
    }

    #[test]
    fn rational_eval_large_t() {
        let x = sample_moments(&[-1.3, 0.2, 0.9, 2.2, -0.4, 0.05], 6).unwrap();
        let r = channel_rational(&x, 3).unwrap();
        for &t in &[10.0, 1e3, 1e8] {
            let direct = channel_pmmse_at(&x, 3, t).unwrap();
            assert_relative_eq!(r.eval(t), direct, max_relative = 1e-7);
        }
    }

    #[test]
    fn affine_moments() {
        let g = mv(&[0.0, 1.0, 0.0, 3.0]);
        assert_eq!(affine_transform_moments(&g, 1.0, 0.0).unwrap(), g);
        assert_eq!(
            affine_transform_moments(&g, 1.0, 1.0).unwrap().values(),
            &[1.0, 2.0, 4.0, 10.0]
        );
        let r = affine_transform_moments(&rademacher(4), 2.0, 0.0).unwrap();
        assert_eq!(r.get(2), 4.0);
        assert_eq!(r.get(4), 16.0);
        assert!(affine_transform_moments(&g, 0.0, 1.0).is_err());
    }
}
