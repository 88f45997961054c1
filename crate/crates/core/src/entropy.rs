//! Moment-determined differential entropy `h_n` and its plug-in estimator.
//!
//! `h_n` is computed in its stable split form
//!
//! ```text
//! h_n(V) = (1/2) [ m log(2 pi e) + (m/d) (log det M_V - log det M_N) ] + int_0^inf rho(t) dt
//! ```
//!
//! with `d = m C(n+m, m+1)` and `rho = (pmmse - (m/d) d/dt log det M_{sqrt(t)V+N}) / 2`,
//! which vanishes at `t = 0` and decays like `t^{-2}`.

use std::f64::consts::{E, PI};

use crate::channel::GaussianChannel;
use crate::error::{Error, Result};
use crate::moments::{
    joint_sample_moments, sample_moments, standardize, standardize_rows, MomentVector,
    MultiMomentTable, Standardization,
};
use crate::quadrature::{integrate_halfline_fallible, QuadConfig};

/// Degree used by the entropy estimator unless overridden.
pub const DEFAULT_ENTROPY_DEGREE: usize = 10;

const TWO_PI_E: f64 = 2.0 * PI * E;

/// Largest `|rho(0)|`, relative to the total variance, accepted as zero.
const RHO_ZERO_TOLERANCE: f64 = 1e-6;

/// An entropy value in nats with the pieces that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub n: usize,
    /// `(1/2) [m log(2 pi e) + (m/d) log(det M_V / det M_N)]` for the standardized input.
    pub logdet_part: f64,
    /// `int_0^inf rho(t) dt` for the standardized input.
    pub integral_part: f64,
    pub quad_err: f64,
    /// Map from the standardized variable back to the input.
    pub standardization: Standardization,
}

/// The stabilized entropy integrand of a fixed input at degree `n`.
#[derive(Debug, Clone)]
pub struct Rho {
    channel: GaussianChannel,
}

impl Rho {
    pub fn new(table: &MultiMomentTable, n: usize) -> Result<Self> {
        Ok(Self {
            channel: GaussianChannel::new(table, n)?,
        })
    }

    pub fn from_scalar(mv: &MomentVector, n: usize) -> Result<Self> {
        Ok(Self {
            channel: GaussianChannel::from_scalar(mv, n)?,
        })
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        Ok(self.channel.evaluate(t)?.rho)
    }

    /// `(1/2) [m log(2 pi e) + (m/d) (log det M_V - log det M_N)]`.
    pub fn log_det_constant(&self) -> Result<f64> {
        let ch = &self.channel;
        let m = ch.dim() as f64;
        let ratio = m / ch.degree_sum() as f64;
        Ok(0.5 * (m * TWO_PI_E.ln() + ratio * (ch.log_det_signal()? - ch.log_det_noise()?)))
    }

    pub fn channel(&self) -> &GaussianChannel {
        &self.channel
    }
}

/// The integrand for moments of a scalar variable at degree `n`.
pub fn rho(mv: &MomentVector, n: usize) -> Result<Rho> {
    Rho::from_scalar(mv, n)
}

fn split_entropy(rho: &Rho, n: usize, cfg: &QuadConfig, standardization: Standardization) -> Result<EntropyEstimate> {
    let logdet_part = rho.log_det_constant()?;
    let at_zero = rho.at(0.0)?;
    if at_zero.abs() > RHO_ZERO_TOLERANCE * rho.channel.total_variance().max(1.0) {
        return Err(Error::InternalConsistency(format!(
            "entropy integrand at t = 0 is {at_zero:e}, expected 0"
        )));
    }
    let quad = integrate_halfline_fallible(|t| rho.at(t), cfg)?;
    let value = logdet_part + quad.value + standardization.log_scale_sum();
    Ok(EntropyEstimate {
        value,
        n,
        logdet_part,
        integral_part: quad.value,
        quad_err: quad.error_estimate,
        standardization,
    })
}

/// `h_n` of a scalar variable from its raw moments (order at least `2n`).
pub fn h_n_from_moments(mv: &MomentVector, n: usize) -> Result<EntropyEstimate> {
    h_n_from_moments_with(mv, n, &QuadConfig::default())
}

pub fn h_n_from_moments_with(mv: &MomentVector, n: usize, cfg: &QuadConfig) -> Result<EntropyEstimate> {
    let (z, std) = mv.standardized()?;
    split_entropy(&Rho::from_scalar(&z, n)?, n, cfg, std)
}

/// `h_n` through the direct form `(1/2) int_0^inf pmmse_n(t) - 1/(2 pi e + t) dt`,
/// without the log-determinant rearrangement.
pub fn h_n_direct(mv: &MomentVector, n: usize, cfg: &QuadConfig) -> Result<f64> {
    let (z, std) = mv.standardized()?;
    let ch = GaussianChannel::from_scalar(&z, n)?;
    let quad = integrate_halfline_fallible(|t| Ok(0.5 * ch.pmmse_excess(t, TWO_PI_E)?), cfg)?;
    Ok(quad.value + std.log_scale_sum())
}

fn distinct_count(samples: &[f64]) -> usize {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

/// `h_n` of the empirical distribution of the samples.
pub fn h_hat(samples: &[f64], n: usize) -> Result<EntropyEstimate> {
    h_hat_with(samples, n, &QuadConfig::default())
}

pub fn h_hat_with(samples: &[f64], n: usize, cfg: &QuadConfig) -> Result<EntropyEstimate> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(x) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {x}")));
    }
    let distinct = distinct_count(samples);
    if distinct <= n {
        return Err(Error::DegenerateSupport(format!(
            "{distinct} distinct values, need at least {} for degree {n}",
            n + 1
        )));
    }
    let (z, outer) = standardize(samples)?;
    let mv = sample_moments(&z, 2 * n)?;
    let mut est = h_n_from_moments_with(&mv, n, cfg)?;
    est.value += outer.log_scale_sum();
    est.standardization = outer.compose(&est.standardization);
    Ok(est)
}

/// `h_n` of a random vector from its joint moments. The table is centered but
/// not rescaled, so it should already be standardized per coordinate.
pub fn h_n_multivariate(table: &MultiMomentTable, n: usize) -> Result<EntropyEstimate> {
    h_n_multivariate_with(table, n, &QuadConfig::default())
}

pub fn h_n_multivariate_with(table: &MultiMomentTable, n: usize, cfg: &QuadConfig) -> Result<EntropyEstimate> {
    let means = table.means();
    let std = Standardization::new(means, vec![1.0; table.dim()])?;
    split_entropy(&Rho::new(table, n)?, n, cfg, std)
}

/// `h_n` of the empirical distribution of `m`-dimensional samples, after
/// per-coordinate standardization.
pub fn h_hat_multivariate(rows: &[Vec<f64>], n: usize) -> Result<EntropyEstimate> {
    h_hat_multivariate_with(rows, n, &QuadConfig::default())
}

pub fn h_hat_multivariate_with(rows: &[Vec<f64>], n: usize, cfg: &QuadConfig) -> Result<EntropyEstimate> {
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite sample".into()));
    }
    let (z, outer) = standardize_rows(rows)?;
    let table = joint_sample_moments(&z, 2 * n)?;
    let mut est = h_n_multivariate_with(&table, n, cfg)?;
    est.value += outer.log_scale_sum();
    est.standardization = outer.compose(&est.standardization);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::gaussian_moment;
    use approx::assert_relative_eq;

    fn gaussian(order: usize, sd: f64, mean: f64) -> MomentVector {
        MomentVector::new((1..=order).map(|k| gaussian_moment(k) * sd.powi(k as i32)).collect())
            .unwrap()
            .affine(1.0, mean)
    }

    fn uniform_sqrt3(order: usize) -> MomentVector {
        let a: f64 = 3f64.sqrt();
        MomentVector::new(
            (1..=order)
                .map(|k| if k % 2 == 1 { 0.0 } else { a.powi(k as i32) / (k as f64 + 1.0) })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn n1_is_gaussian_entropy_of_variance() {
        let mv = MomentVector::new(vec![1.5, 4.0]).unwrap();
        let e = h_n_from_moments(&mv, 1).unwrap();
        assert_relative_eq!(e.value, 0.5 * (TWO_PI_E * mv.variance()).ln(), epsilon = 1e-12);
    }

    #[test]
    fn gaussian_fixed_point() {
        for n in 1..=6 {
            let e = h_n_from_moments(&gaussian(2 * n, 2.0, -1.0), n).unwrap();
            assert!((e.value - 0.5 * (TWO_PI_E * 4.0).ln()).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn uniform_n2_rational_integrand() {
        let r = rho(&uniform_sqrt3(4), 2).unwrap();
        for &t in &[0.0, 0.2, 1.0, 3.0, 100.0] {
            let exact = t / (5.0 + 15.0 * t + 12.0 * t * t + 2.0 * t * t * t);
            assert!((r.at(t).unwrap() - exact).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn split_matches_direct() {
        let mv = uniform_sqrt3(8);
        let cfg = QuadConfig::default();
        for n in 1..=4 {
            let split = h_n_from_moments_with(&mv, n, &cfg).unwrap().value;
            let direct = h_n_direct(&mv, n, &cfg).unwrap();
            assert!((split - direct).abs() < 1e-6, "n={n}: {split} vs {direct}");
        }
    }

    #[test]
    fn too_few_distinct_values() {
        assert!(matches!(h_hat(&[1.0, 2.0, 1.0, 2.0], 2), Err(Error::DegenerateSupport(_))));
        assert!(matches!(h_hat(&[], 2), Err(Error::EmptySamples)));
    }

    #[test]
    fn independent_product_adds() {
        let a = gaussian(6, 1.0, 0.0);
        let b = uniform_sqrt3(6);
        let table = MultiMomentTable::from_fn(2, 6, |al| a.get(al[0] as usize) * b.get(al[1] as usize))
            .unwrap();
        for n in 1..=3 {
            let joint = h_n_multivariate(&table, n).unwrap().value;
            let sum = h_n_from_moments(&a, n).unwrap().value + h_n_from_moments(&b, n).unwrap().value;
            assert!((joint - sum).abs() < 1e-7, "n={n}: {joint} vs {sum}");
        }
    }

    #[test]
    fn multivariate_reduces_to_scalar() {
        let b = uniform_sqrt3(8);
        let t = MultiMomentTable::from_scalar(&b);
        for n in 1..=4 {
            let x = h_n_multivariate(&t, n).unwrap().value;
            let y = h_n_from_moments(&b, n).unwrap().value;
            assert!((x - y).abs() < 1e-8);
        }
    }
}
