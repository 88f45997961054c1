#![allow(dead_code)]

use moment_info::{gaussian_moment, MomentVector};
use proptest::prelude::*;

/// Raw moments of `sum_i w_i N(mu_i, sd_i^2)`.
pub fn gaussian_mixture(weights: &[f64], means: &[f64], sds: &[f64], order: usize) -> MomentVector {
    let values = (1..=order)
        .map(|k| {
            weights
                .iter()
                .zip(means)
                .zip(sds)
                .map(|((w, mu), sd)| {
                    let mut acc = 0.0;
                    for j in 0..=k {
                        acc += binom(k, j) * mu.powi((k - j) as i32) * sd.powi(j as i32) * gaussian_moment(j);
                    }
                    w * acc
                })
                .sum()
        })
        .collect();
    MomentVector::new(values).unwrap()
}

pub fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Raw moments of a finitely supported distribution.
pub fn discrete(atoms: &[f64], probs: &[f64], order: usize) -> MomentVector {
    MomentVector::new(
        (1..=order)
            .map(|k| atoms.iter().zip(probs).map(|(a, p)| p * a.powi(k as i32)).sum())
            .collect(),
    )
    .unwrap()
}

pub fn gaussian(order: usize, sd: f64) -> MomentVector {
    gaussian_mixture(&[1.0], &[0.0], &[sd], order)
}

pub fn rademacher(order: usize) -> MomentVector {
    discrete(&[-1.0, 1.0], &[0.5, 0.5], order)
}

/// Uniform on `[-a, a]`.
pub fn uniform(a: f64, order: usize) -> MomentVector {
    MomentVector::new(
        (1..=order)
            .map(|k| if k % 2 == 1 { 0.0 } else { a.powi(k as i32) / (k as f64 + 1.0) })
            .collect(),
    )
    .unwrap()
}

/// A two- or three-component Gaussian mixture with moderate parameters.
pub fn mixture_strategy(order: usize) -> impl Strategy<Value = MomentVector> {
    (
        prop::collection::vec(0.2f64..1.0, 2..=3),
        prop::collection::vec(-1.5f64..1.5, 3),
        prop::collection::vec(0.3f64..1.2, 3),
    )
        .prop_map(move |(w, mu, sd)| {
            let total: f64 = w.iter().sum();
            let w: Vec<f64> = w.iter().map(|x| x / total).collect();
            let k = w.len();
            gaussian_mixture(&w, &mu[..k], &sd[..k], order)
        })
}

/// Like [`mixture_strategy`], standardized to mean 0 and variance 1.
pub fn standardized_mixture_strategy(order: usize) -> impl Strategy<Value = MomentVector> {
    mixture_strategy(order).prop_map(|mv| mv.standardized().unwrap().0)
}
