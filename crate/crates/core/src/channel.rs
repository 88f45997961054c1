//! Pointwise evaluation of the Gaussian channel `Y = sqrt(t) V + N` over the
//! monomial basis of total degree at most `n`.
//!
//! For `t <= 1` the moment matrix of `Y` is assembled directly in powers of
//! `s = sqrt(t)`. For `t > 1` each basis monomial `Y^a` is rescaled by
//! `t^{-|a|/2}`, so entries become polynomials in `eps = 1/sqrt(t)` that tend to
//! the moment matrix of `V`, and the PMMSE is obtained from the residual of
//! estimating the noise, `pmmse(V | Y) = pmmse(N | Y) / t`. Both forms are exact;
//! the second avoids the `O(t)` cancellation of the first at large SNR.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::moments::{
    for_each_below, gaussian_joint_moment, monomial_basis, MomentVector, MultiMomentTable,
    SpdFactor,
};

/// Default largest monomial basis accepted by the channel evaluator.
pub const DEFAULT_BASIS_CAP: usize = 100;

/// SNR at which evaluation switches to the rescaled form.
const REGIME_SWITCH: f64 = 1.0;

/// `m * C(n+m, m+1)`: the total degree of the basis, and the growth rate of the
/// log-determinant of the channel moment matrix.
pub fn basis_degree_sum(n: usize, m: usize) -> usize {
    m * binomial(n + m, m + 1) as usize
}

/// Values of the channel functionals at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPoint {
    pub t: f64,
    /// `sum_k pmmse_n(V_k | Y)`.
    pub pmmse: f64,
    /// `d/dt log det M_{Y,n}`.
    pub logdet_derivative: f64,
    /// `(pmmse - (m/d) * logdet_derivative) / 2`, the stabilized entropy integrand.
    pub rho: f64,
}

/// Precomputed expansion coefficients of the channel moment matrix for a fixed
/// input and degree.
#[derive(Debug, Clone)]
pub struct GaussianChannel {
    dim: usize,
    n: usize,
    size: usize,
    degree_sum: usize,
    second_moments: Vec<f64>,
    /// Per matrix entry: `c_p` with `E[Y^b] = sum_p c_p s^p`, `b = a_i + a_j`.
    entries: Vec<Vec<f64>>,
    /// Total degree `|a_i + a_j|` per entry.
    entry_degree: Vec<usize>,
    /// Per coordinate and basis element: coefficients in `s` of `E[V_k Y^a]`.
    cross_signal: Vec<Vec<Vec<f64>>>,
    /// Per coordinate and basis element: coefficients in `eps` of
    /// `E[N_k prod (V_j + eps N_j)^{a_j}]`.
    cross_noise: Vec<Vec<Vec<f64>>>,
}

impl GaussianChannel {
    pub fn new(table: &MultiMomentTable, n: usize) -> Result<Self> {
        Self::with_cap(table, n, DEFAULT_BASIS_CAP)
    }

    pub fn from_scalar(mv: &MomentVector, n: usize) -> Result<Self> {
        Self::new(&MultiMomentTable::from_scalar(mv), n)
    }

    pub fn with_cap(table: &MultiMomentTable, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree n must be at least 1".into()));
        }
        let dim = table.dim();
        let size = binomial(n + dim, dim) as usize;
        if size > cap {
            return Err(Error::CapExceeded {
                what: "monomial basis",
                size,
                cap,
            });
        }
        if table.order() < 2 * n {
            return Err(Error::InsufficientOrder {
                needed: 2 * n,
                got: table.order(),
            });
        }
        let v = table.centered()?;
        let basis = monomial_basis(n, dim);

        let mut cache: HashMap<Vec<u32>, Vec<f64>> = HashMap::new();
        let mut entries = Vec::with_capacity(size * size);
        let mut entry_degree = Vec::with_capacity(size * size);
        for ai in &basis {
            for aj in &basis {
                let beta: Vec<u32> = ai.iter().zip(aj).map(|(x, y)| x + y).collect();
                let deg = beta.iter().sum::<u32>() as usize;
                let coeffs = cache
                    .entry(beta.clone())
                    .or_insert_with(|| signal_expansion(&v, &beta, None))
                    .clone();
                entries.push(coeffs);
                entry_degree.push(deg);
            }
        }

        let mut cross_signal = Vec::with_capacity(dim);
        let mut cross_noise = Vec::with_capacity(dim);
        let mut second_moments = Vec::with_capacity(dim);
        for k in 0..dim {
            cross_signal.push(
                basis
                    .iter()
                    .map(|a| signal_expansion(&v, a, Some(k)))
                    .collect(),
            );
            cross_noise.push(basis.iter().map(|a| noise_expansion(&v, a, k)).collect());
            let mut e = vec![0u32; dim];
            e[k] = 2;
            second_moments.push(v.at(&e));
        }

        Ok(Self {
            dim,
            n,
            size,
            degree_sum: basis_degree_sum(n, dim),
            second_moments,
            entries,
            entry_degree,
            cross_signal,
            cross_noise,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of basis monomials, `C(n+m, m)`.
    pub fn basis_size(&self) -> usize {
        self.size
    }

    /// `d_{n,m} = m C(n+m, m+1)`.
    pub fn degree_sum(&self) -> usize {
        self.degree_sum
    }

    /// `sum_k Var(V_k)`, the PMMSE at `t = 0`.
    pub fn total_variance(&self) -> f64 {
        self.second_moments.iter().sum()
    }

    /// Log-determinant of the moment matrix of `V` over the basis.
    ///
    /// Fails with [`Error::DegenerateSupport`] when `V` is supported on the zero
    /// set of a nonzero polynomial of degree at most `n`.
    pub fn log_det_signal(&self) -> Result<f64> {
        let m = self.matrix_from(|c, deg| c[deg]);
        Ok(SpdFactor::new(&m)?.log_det())
    }

    /// Log-determinant of the moment matrix of standard Gaussian noise.
    pub fn log_det_noise(&self) -> Result<f64> {
        let m = self.matrix_from(|c, _| c[0]);
        Ok(SpdFactor::new(&m)?.log_det())
    }

    fn matrix_from(&self, f: impl Fn(&[f64], usize) -> f64) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| {
            let idx = i * self.size + j;
            f(&self.entries[idx], self.entry_degree[idx])
        })
    }

    /// Evaluates the PMMSE, log-determinant derivative and entropy integrand at `t`.
    pub fn evaluate(&self, t: f64) -> Result<ChannelPoint> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("SNR must be finite and >= 0, got {t}")));
        }
        if t <= REGIME_SWITCH {
            self.evaluate_direct(t)
        } else {
            Ok(self.evaluate_rescaled(t)?.0)
        }
    }

    /// `pmmse(t) - m / (c + t)`, the integrand of the direct entropy formula
    /// with `c = 2 pi e`, evaluated without cancellation for large `t`.
    pub fn pmmse_excess(&self, t: f64, c: f64) -> Result<f64> {
        let m = self.dim as f64;
        if t <= REGIME_SWITCH {
            return Ok(self.evaluate(t)?.pmmse - m / (c + t));
        }
        let (_, explained) = self.evaluate_rescaled(t)?;
        Ok(-explained / t + m * c / (t * (c + t)))
    }

    fn ratio(&self) -> f64 {
        self.dim as f64 / self.degree_sum as f64
    }

    fn evaluate_direct(&self, t: f64) -> Result<ChannelPoint> {
        let s = t.sqrt();
        let m = self.matrix_from(|c, _| poly_eval(c, s));
        let dm = self.matrix_from(|c, _| {
            // d/dt s^p = (p/2) s^{p-2}; the p = 1 term vanishes for centered input.
            let mut acc = 0.0;
            for p in (2..c.len()).rev() {
                acc = acc * s + c[p] * p as f64 / 2.0;
            }
            acc
        });
        let factor = channel_factor(&m)?;
        let mut pmmse = 0.0;
        for k in 0..self.dim {
            let u = DVector::from_iterator(
                self.size,
                self.cross_signal[k].iter().map(|c| poly_eval(c, s)),
            );
            pmmse += self.second_moments[k] - factor.quad_form(&u);
        }
        let logdet_derivative = factor.trace_solve(&dm);
        Ok(ChannelPoint {
            t,
            pmmse,
            logdet_derivative,
            rho: 0.5 * (pmmse - self.ratio() * logdet_derivative),
        })
    }

    /// The point, and `sum_k w_k^T M^{-1} w_k` for the rescaled noise cross vectors.
    fn evaluate_rescaled(&self, t: f64) -> Result<(ChannelPoint, f64)> {
        let eps = 1.0 / t.sqrt();
        // Entry (i,j) scaled by eps^{|b|}: sum_p c_p eps^{|b| - p}.
        let m = self.matrix_from(|c, deg| {
            let mut acc = 0.0;
            for p in 0..=deg {
                acc = acc * eps + c[p];
            }
            acc
        });
        // d/dt eps^q = -(q/2) eps^{q+2}.
        let dm = self.matrix_from(|c, deg| {
            let mut acc = 0.0;
            for p in 0..deg {
                acc = acc * eps + c[p] * (deg - p) as f64;
            }
            -0.5 * acc * eps * eps * eps
        });
        let factor = channel_factor(&m)?;
        let mut explained = 0.0;
        for k in 0..self.dim {
            let w = DVector::from_iterator(
                self.size,
                self.cross_noise[k].iter().map(|c| poly_eval(c, eps)),
            );
            explained += factor.quad_form(&w);
        }
        let trace = factor.trace_solve(&dm);
        let pmmse = (self.dim as f64 - explained) / t;
        let point = ChannelPoint {
            t,
            pmmse,
            logdet_derivative: self.degree_sum as f64 / t + trace,
            rho: 0.5 * (-explained / t - self.ratio() * trace),
        };
        Ok((point, explained))
    }
}

fn channel_factor(m: &DMatrix<f64>) -> Result<SpdFactor> {
    SpdFactor::with_threshold(m, 0.0)
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, v| acc * x + v)
}

/// Coefficients in `s` of `E[V^e prod_j (s V_j + N_j)^{b_j}]`, where `V^e` is
/// `V_k` when `extra = Some(k)` and 1 otherwise.
fn signal_expansion(v: &MultiMomentTable, beta: &[u32], extra: Option<usize>) -> Vec<f64> {
    let deg = beta.iter().sum::<u32>() as usize;
    let mut out = vec![0.0; deg + 1];
    let mut shifted = vec![0u32; beta.len()];
    let mut rest = vec![0u32; beta.len()];
    for_each_below(beta, |gamma| {
        let mut w = 1.0;
        for j in 0..beta.len() {
            w *= binomial(beta[j] as usize, gamma[j] as usize);
            rest[j] = beta[j] - gamma[j];
            shifted[j] = gamma[j];
        }
        if let Some(k) = extra {
            shifted[k] += 1;
        }
        let noise = gaussian_joint_moment(&rest);
        if noise != 0.0 {
            let p = gamma.iter().sum::<u32>() as usize;
            out[p] += w * v.at(&shifted) * noise;
        }
    });
    out
}

/// Coefficients in `eps` of `E[N_k prod_j (V_j + eps N_j)^{a_j}]`.
fn noise_expansion(v: &MultiMomentTable, alpha: &[u32], k: usize) -> Vec<f64> {
    let deg = alpha.iter().sum::<u32>() as usize;
    let mut out = vec![0.0; deg + 1];
    let mut rest = vec![0u32; alpha.len()];
    for_each_below(alpha, |a| {
        let mut w = 1.0;
        for j in 0..alpha.len() {
            w *= binomial(alpha[j] as usize, a[j] as usize);
            rest[j] = alpha[j] - a[j];
        }
        rest[k] += 1;
        let noise = gaussian_joint_moment(&rest);
        if noise != 0.0 {
            let q = deg - a.iter().sum::<u32>() as usize;
            out[q] += w * v.at(a) * noise;
        }
    });
    out
}
