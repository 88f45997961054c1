//! Moment-determined mutual information `I_n` and the plug-in estimator.

use std::collections::BTreeMap;
use std::fmt::Display;

use crate::channel::GaussianChannel;
use crate::entropy::{h_n_from_moments_with, h_n_multivariate_with};
use crate::error::{Error, Result};
use crate::moments::{sample_moments, standardize, MomentVector, MultiMomentTable};
use crate::quadrature::{integrate_halfline_fallible, QuadConfig};

/// Degree used by the mutual information estimator unless overridden.
pub const DEFAULT_MI_DEGREE: usize = 5;

/// Degree used for two continuous variables unless overridden.
pub const DEFAULT_CONTINUOUS_MI_DEGREE: usize = 3;

const WEIGHT_TOLERANCE: f64 = 1e-12;

/// Moments of `Y` given `X = x` for each value `x` of a discrete `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMoments {
    pub label: String,
    pub weight: f64,
    pub moments: MomentVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteConditionalMoments {
    classes: Vec<ClassMoments>,
    marginal: MomentVector,
}

impl DiscreteConditionalMoments {
    /// Validates the classes and forms the marginal moments of `Y` as their mixture.
    pub fn new(classes: Vec<ClassMoments>) -> Result<Self> {
        let first = classes
            .first()
            .ok_or_else(|| Error::InvalidArgument("no classes".into()))?;
        let order = first.moments.order();
        if classes.iter().any(|c| c.moments.order() != order) {
            return Err(Error::InvalidArgument(
                "class moment vectors differ in order".into(),
            ));
        }
        if let Some(c) = classes.iter().find(|c| !(c.weight > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "class {} has non-positive weight {}",
                c.label, c.weight
            )));
        }
        let total: f64 = classes.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "class weights sum to {total}, not 1"
            )));
        }
        let marginal = MomentVector::new(
            (1..=order)
                .map(|k| classes.iter().map(|c| c.weight * c.moments.get(k)).sum())
                .collect(),
        )?;
        Ok(Self { classes, marginal })
    }

    pub fn classes(&self) -> &[ClassMoments] {
        &self.classes
    }

    pub fn marginal(&self) -> &MomentVector {
        &self.marginal
    }

    /// The same conditional laws after the map `y -> a y + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(
            self.classes
                .iter()
                .map(|c| ClassMoments {
                    label: c.label.clone(),
                    weight: c.weight,
                    moments: c.moments.affine(a, b),
                })
                .collect(),
        )
    }
}

/// Per-class record in an [`MiEstimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDiagnostic {
    pub label: String,
    pub weight: f64,
    pub count: Option<usize>,
    /// Log-determinant of the class moment matrix (after global standardization).
    pub log_det: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    pub n: usize,
    pub logdet_part: f64,
    pub integral_part: f64,
    pub quad_err: f64,
    pub classes: Vec<ClassDiagnostic>,
    /// Share of samples dropped because their label occurred at most `n` times.
    pub filtered_fraction: f64,
}

fn with_label(e: Error, label: &str) -> Error {
    match e {
        Error::DegenerateSupport(msg) => Error::DegenerateSupport(format!("class {label}: {msg}")),
        other => other,
    }
}

/// `I_n(X; Y)` for discrete `X`:
/// `(1/(n(n+1))) log(det M_Y / prod_x det M_{Y|x}^{P(x)}) + int (rho_Y - sum_x P(x) rho_{Y|x})`.
pub fn i_n_discrete(dcm: &DiscreteConditionalMoments, n: usize) -> Result<MiEstimate> {
    i_n_discrete_with(dcm, n, &QuadConfig::default())
}

pub fn i_n_discrete_with(dcm: &DiscreteConditionalMoments, n: usize, cfg: &QuadConfig) -> Result<MiEstimate> {
    let (marginal, global) = dcm.marginal.standardized()?;
    let sd = global.scale()[0];
    let classes = dcm
        .classes
        .iter()
        .map(|c| {
            let (moments, st) = c.moments.standardized().map_err(|e| with_label(e, &c.label))?;
            Ok(StandardizedClass {
                label: c.label.clone(),
                weight: c.weight,
                moments,
                log_scale: (st.scale()[0] / sd).ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    discrete_from_standardized(&marginal, &classes, n, cfg)
}

/// A class law in its own standardized coordinates, with its scale relative to the marginal.
struct StandardizedClass {
    label: String,
    weight: f64,
    moments: MomentVector,
    log_scale: f64,
}

/// Both terms are affine invariant per class up to the scale correction on the
/// log-determinant, so each class is evaluated where its moment matrix is best conditioned.
fn discrete_from_standardized(
    marginal: &MomentVector,
    classes: &[StandardizedClass],
    n: usize,
    cfg: &QuadConfig,
) -> Result<MiEstimate> {
    let marginal = GaussianChannel::from_scalar(marginal, n)?;
    let mut channels = Vec::with_capacity(classes.len());
    let mut diagnostics = Vec::with_capacity(classes.len());
    let mut log_ratio = marginal.log_det_signal()?;
    let degree_sum = (n * (n + 1)) as f64;
    for c in classes {
        let ch = GaussianChannel::from_scalar(&c.moments, n).map_err(|e| with_label(e, &c.label))?;
        let log_det = ch.log_det_signal().map_err(|e| with_label(e, &c.label))? + degree_sum * c.log_scale;
        log_ratio -= c.weight * log_det;
        diagnostics.push(ClassDiagnostic {
            label: c.label.clone(),
            weight: c.weight,
            count: None,
            log_det,
        });
        channels.push((c.weight, ch));
    }
    let logdet_part = log_ratio / degree_sum;
    let quad = integrate_halfline_fallible(
        |t| {
            let mut v = marginal.evaluate(t)?.rho;
            for (w, ch) in &channels {
                v -= w * ch.evaluate(t)?.rho;
            }
            Ok(v)
        },
        cfg,
    )?;
    Ok(MiEstimate {
        value: logdet_part + quad.value,
        n,
        logdet_part,
        integral_part: quad.value,
        quad_err: quad.error_estimate,
        classes: diagnostics,
        filtered_fraction: 0.0,
    })
}

/// `h_n(Y) - sum_x P(x) h_n(Y | X = x)`, the entropy-difference form of `I_n`.
pub fn i_n_discrete_by_entropies(dcm: &DiscreteConditionalMoments, n: usize, cfg: &QuadConfig) -> Result<f64> {
    let mut value = h_n_from_moments_with(&dcm.marginal, n, cfg)?.value;
    for c in &dcm.classes {
        value -= c.weight
            * h_n_from_moments_with(&c.moments, n, cfg)
                .map_err(|e| with_label(e, &c.label))?
                .value;
    }
    Ok(value)
}

/// Keeps the pairs whose label occurs more than `n` times.
pub fn filter_support<L: Ord + Clone>(pairs: &[(L, f64)], n: usize) -> Vec<(L, f64)> {
    let mut counts: BTreeMap<&L, usize> = BTreeMap::new();
    for (l, _) in pairs {
        *counts.entry(l).or_default() += 1;
    }
    pairs
        .iter()
        .filter(|(l, _)| counts[l] > n)
        .cloned()
        .collect()
}

/// `I_n` of the empirical distribution of `(label, y)` pairs, after dropping
/// labels seen at most `n` times and standardizing `y` over the remaining pairs.
pub fn i_hat<L: Ord + Clone + Display>(pairs: &[(L, f64)], n: usize) -> Result<MiEstimate> {
    i_hat_with(pairs, n, &QuadConfig::default())
}

pub fn i_hat_with<L: Ord + Clone + Display>(
    pairs: &[(L, f64)],
    n: usize,
    cfg: &QuadConfig,
) -> Result<MiEstimate> {
    if pairs.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some((_, y)) = pairs.iter().find(|(_, y)| !y.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {y}")));
    }
    let kept = filter_support(pairs, n);
    if kept.is_empty() {
        return Err(Error::EmptyAfterFilter(n));
    }
    let filtered_fraction = 1.0 - kept.len() as f64 / pairs.len() as f64;
    let ys: Vec<f64> = kept.iter().map(|(_, y)| *y).collect();
    let (z, _) = standardize(&ys)?;

    let mut groups: BTreeMap<&L, Vec<f64>> = BTreeMap::new();
    for ((l, _), zi) in kept.iter().zip(&z) {
        groups.entry(l).or_default().push(*zi);
    }
    let total = kept.len() as f64;
    let mut classes = Vec::with_capacity(groups.len());
    let mut counts = Vec::with_capacity(groups.len());
    for (label, values) in &groups {
        let label = label.to_string();
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if distinct.len() <= n {
            return Err(Error::DegenerateSupport(format!(
                "class {label}: {} distinct values, need at least {}",
                distinct.len(),
                n + 1
            )));
        }
        let (w, st) = standardize(values).map_err(|e| with_label(e, &label))?;
        counts.push(values.len());
        classes.push(StandardizedClass {
            label,
            weight: values.len() as f64 / total,
            moments: sample_moments(&w, 2 * n)?,
            log_scale: st.scale()[0].ln(),
        });
    }
    let (marginal, _) = sample_moments(&z, 2 * n)?.standardized()?;
    let mut est = discrete_from_standardized(&marginal, &classes, n, cfg)?;
    for (d, c) in est.classes.iter_mut().zip(counts) {
        d.count = Some(c);
    }
    est.filtered_fraction = filtered_fraction;
    Ok(est)
}

/// `I_n(X; Y) = h_n(X) + h_n(Y) - h_n(X, Y)` for two continuous scalars, each
/// standardized using its own mean and variance.
pub fn i_n_continuous(
    x_mv: &MomentVector,
    y_mv: &MomentVector,
    joint: &MultiMomentTable,
    n: usize,
) -> Result<MiEstimate> {
    i_n_continuous_with(x_mv, y_mv, joint, n, &QuadConfig::default())
}

pub fn i_n_continuous_with(
    x_mv: &MomentVector,
    y_mv: &MomentVector,
    joint: &MultiMomentTable,
    n: usize,
    cfg: &QuadConfig,
) -> Result<MiEstimate> {
    if joint.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "joint table must be two-dimensional, got {}",
            joint.dim()
        )));
    }
    for (j, mv) in [x_mv, y_mv].into_iter().enumerate() {
        let m = joint.marginal(j)?;
        let k = 2 * n;
        if mv.order() < k || m.order() < k {
            return Err(Error::InsufficientOrder {
                needed: k,
                got: mv.order().min(m.order()),
            });
        }
        for i in 1..=k {
            let (a, b) = (mv.get(i), m.get(i));
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "marginal moment {i} of coordinate {j} disagrees with the joint table"
                )));
            }
        }
    }
    let (_, sx) = x_mv.standardized()?;
    let (_, sy) = y_mv.standardized()?;
    let scale = [1.0 / sx.scale()[0], 1.0 / sy.scale()[0]];
    let shift = [-sx.shift()[0] * scale[0], -sy.shift()[0] * scale[1]];
    let w = joint.affine(&scale, &shift)?;

    let hx = h_n_from_moments_with(x_mv, n, cfg)?;
    let hy = h_n_from_moments_with(y_mv, n, cfg)?;
    let hw = h_n_multivariate_with(&w, n, cfg)?;
    let value = (hx.value - sx.log_scale_sum()) + (hy.value - sy.log_scale_sum()) - hw.value;
    Ok(MiEstimate {
        value,
        n,
        logdet_part: hx.logdet_part + hy.logdet_part - hw.logdet_part,
        integral_part: hx.integral_part + hy.integral_part - hw.integral_part,
        quad_err: hx.quad_err + hy.quad_err + hw.quad_err,
        classes: Vec::new(),
        filtered_fraction: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::gaussian_moment;

    fn gaussian(order: usize, sd: f64) -> MomentVector {
        MomentVector::new((1..=order).map(|k| gaussian_moment(k) * sd.powi(k as i32)).collect())
            .unwrap()
    }

    fn class(label: &str, weight: f64, moments: MomentVector) -> ClassMoments {
        ClassMoments {
            label: label.into(),
            weight,
            moments,
        }
    }

    #[test]
    fn identical_classes_give_zero() {
        let m = MomentVector::new(vec![0.2, 1.1, 0.5, 3.0, 2.0, 14.0]).unwrap();
        let dcm = DiscreteConditionalMoments::new(vec![
            class("a", 0.3, m.clone()),
            class("b", 0.7, m.clone()),
        ])
        .unwrap();
        let est = i_n_discrete(&dcm, 3).unwrap();
        assert!(est.value.abs() < 1e-10, "{}", est.value);
        let single = DiscreteConditionalMoments::new(vec![class("a", 1.0, m)]).unwrap();
        assert!(i_n_discrete(&single, 3).unwrap().value.abs() < 1e-10);
    }

    #[test]
    fn n1_two_gaussian_classes() {
        let dcm = DiscreteConditionalMoments::new(vec![
            class("0", 0.5, gaussian(2, 1.0)),
            class("1", 0.5, gaussian(2, 2.0)),
        ])
        .unwrap();
        let expected = 0.5 * 2.5f64.ln() - 0.5 * (0.0 + 2f64.ln());
        let est = i_n_discrete(&dcm, 1).unwrap();
        assert!((est.value - expected).abs() < 1e-10);
        let by_h = i_n_discrete_by_entropies(&dcm, 1, &QuadConfig::default()).unwrap();
        assert!((by_h - expected).abs() < 1e-10);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let g = gaussian(2, 1.0);
        assert!(DiscreteConditionalMoments::new(vec![class("a", 0.5, g.clone()), class("b", 0.4, g)]).is_err());
    }

    #[test]
    fn filtering_boundary() {
        let pairs: Vec<(u32, f64)> = vec![(0, 0.1), (0, 0.5), (0, 0.9), (1, 0.3), (1, 0.2)];
        assert_eq!(filter_support(&pairs, 2).len(), 3);
        assert_eq!(filter_support(&pairs, 1).len(), 5);
        assert_eq!(i_hat(&pairs, 3), Err(Error::EmptyAfterFilter(3)));
    }

    #[test]
    fn all_labels_identical_is_zero() {
        let pairs: Vec<(u32, f64)> = (0..50).map(|i| (7, (i as f64 * 0.37).sin())).collect();
        let est = i_hat(&pairs, 3).unwrap();
        assert!(est.value.abs() < 1e-10);
        assert_eq!(est.filtered_fraction, 0.0);
    }

    #[test]
    fn independent_continuous_pair_is_zero() {
        let a = gaussian(6, 1.0);
        let b = MomentVector::new(vec![0.0, 1.0, 0.0, 1.8, 0.0, 27.0 / 7.0]).unwrap();
        let joint = MultiMomentTable::from_fn(2, 6, |al| a.get(al[0] as usize) * b.get(al[1] as usize)).unwrap();
        let est = i_n_continuous(&a, &b, &joint, 3).unwrap();
        assert!(est.value.abs() < 1e-6, "{}", est.value);
    }
}
