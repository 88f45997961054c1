mod common;

use moment_info::mutual_info::{filter_support, i_n_discrete_by_entropies};
use moment_info::{
    gaussian_moment, i_hat, i_n_continuous, i_n_discrete, ClassMoments,
    DiscreteConditionalMoments, Error, MultiMomentTable, QuadConfig,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

fn classes(parts: &[(f64, moment_info::MomentVector)]) -> DiscreteConditionalMoments {
    DiscreteConditionalMoments::new(
        parts
            .iter()
            .enumerate()
            .map(|(i, (w, mv))| ClassMoments {
                label: i.to_string(),
                weight: *w,
                moments: mv.clone(),
            })
            .collect(),
    )
    .unwrap()
}

fn class_strategy() -> impl Strategy<Value = DiscreteConditionalMoments> {
    (
        prop::collection::vec(common::mixture_strategy(10), 2..=3),
        prop::collection::vec(0.2f64..1.0, 3),
    )
        .prop_map(|(mvs, raw)| {
            let k = mvs.len();
            let total: f64 = raw[..k].iter().sum();
            let parts: Vec<_> = mvs
                .into_iter()
                .zip(&raw[..k])
                .map(|(mv, w)| (w / total, mv))
                .collect();
            classes(&parts)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn two_routes_agree(dcm in class_strategy(), n in 1usize..=5) {
        let a = i_n_discrete(&dcm, n).unwrap().value;
        let b = i_n_discrete_by_entropies(&dcm, n, &QuadConfig::default()).unwrap();
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn affine_invariance(dcm in class_strategy(), n in 1usize..=5, a in 1e-2f64..1e2, neg in any::<bool>(), b in -10.0f64..10.0) {
        let a = if neg { -a } else { a };
        let base = i_n_discrete(&dcm, n).unwrap().value;
        let moved = i_n_discrete(&dcm.affine(a, b).unwrap(), n).unwrap().value;
        prop_assert!((base - moved).abs() <= 1e-9, "{base} vs {moved}");
    }

    #[test]
    fn nonnegative_for_random_classes(dcm in class_strategy(), n in 1usize..=5) {
        prop_assert!(i_n_discrete(&dcm, n).unwrap().value >= -1e-9);
    }

    #[test]
    fn filter_is_monotone_in_degree(
        labels in prop::collection::vec(0u8..6, 0..80),
        n1 in 0usize..6,
        dn in 0usize..4,
    ) {
        let pairs: Vec<(u8, f64)> = labels.iter().enumerate().map(|(i, &l)| (l, i as f64)).collect();
        let loose = filter_support(&pairs, n1);
        let strict = filter_support(&pairs, n1 + dn);
        prop_assert!(strict.len() <= loose.len());
        for p in &strict {
            prop_assert!(loose.contains(p));
        }
        for (l, _) in &loose {
            prop_assert!(labels.iter().filter(|&&x| x == *l).count() > n1);
        }
    }
}

#[test]
fn identical_classes_carry_no_information() {
    let mv = common::gaussian_mixture(&[0.4, 0.6], &[-1.0, 1.0], &[0.5, 0.8], 10);
    let dcm = classes(&[(0.3, mv.clone()), (0.7, mv)]);
    for n in 1..=5 {
        assert!(i_n_discrete(&dcm, n).unwrap().value.abs() < 1e-9);
    }
}

#[test]
fn diagnostics_are_reported_per_class() {
    let dcm = classes(&[
        (0.25, common::gaussian_mixture(&[1.0], &[0.0], &[1.0], 6)),
        (0.75, common::gaussian_mixture(&[1.0], &[2.0], &[1.0], 6)),
    ]);
    let e = i_n_discrete(&dcm, 3).unwrap();
    assert_eq!(e.classes.len(), 2);
    assert_eq!(e.classes[0].label, "0");
    assert!(e.classes.iter().all(|c| c.count.is_none() && c.log_det.is_finite()));
    assert!((e.value - e.logdet_part - e.integral_part).abs() < 1e-14);
}

/// `E[X^a Y^b]` for `X = Z1`, `Y = r Z1 + sqrt(1 - r^2) Z2` with independent standard normals.
fn correlated_normal_moment(a: usize, b: usize, r: f64) -> f64 {
    let s = (1.0 - r * r).sqrt();
    (0..=b)
        .map(|j| {
            common::binom(b, j)
                * r.powi(j as i32)
                * s.powi((b - j) as i32)
                * gaussian_moment(a + j)
                * gaussian_moment(b - j)
        })
        .sum()
}

#[test]
fn correlated_normal_moment_matches_pair_counting() {
    // E[X^2 Y^2] = 1 + 2 r^2 and E[X^3 Y] = 3 r by pair counting.
    let r = 0.5;
    assert!((correlated_normal_moment(2, 2, r) - 1.5).abs() < 1e-15);
    assert!((correlated_normal_moment(3, 1, r) - 1.5).abs() < 1e-15);
    assert!((correlated_normal_moment(1, 3, r) - 1.5).abs() < 1e-15);
}

#[test]
fn gaussian_pair_mutual_information() {
    let r: f64 = 0.5;
    let exact = -0.5 * (1.0 - r * r).ln();
    for n in 1..=3 {
        let k = 2 * n;
        let joint = MultiMomentTable::from_fn(2, k, |al| {
            correlated_normal_moment(al[0] as usize, al[1] as usize, r)
        })
        .unwrap();
        let marg = common::gaussian(k, 1.0);
        let est = i_n_continuous(&marg, &marg, &joint, n).unwrap();
        assert!((est.value - exact).abs() < 1e-5, "n={n}: {} vs {exact}", est.value);
    }
}

#[test]
fn continuous_mi_rejects_inconsistent_marginal() {
    let joint = MultiMomentTable::from_fn(2, 4, |al| correlated_normal_moment(al[0] as usize, al[1] as usize, 0.3)).unwrap();
    let wrong = common::gaussian(4, 2.0);
    let right = common::gaussian(4, 1.0);
    assert!(matches!(
        i_n_continuous(&wrong, &right, &joint, 2),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn i_hat_tracks_population_value() {
    let n = 3;
    let exact = i_n_discrete(
        &classes(&[
            (0.5, common::gaussian_mixture(&[1.0], &[0.0], &[1.0], 2 * n)),
            (0.5, common::gaussian_mixture(&[1.0], &[3.0], &[1.0], 2 * n)),
        ]),
        n,
    )
    .unwrap()
    .value;
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    let pairs: Vec<(u8, f64)> = (0..40_000)
        .map(|_| {
            let x: u8 = rng.random_range(0..2);
            let z: f64 = rng.sample(StandardNormal);
            (x, z + 3.0 * x as f64)
        })
        .collect();
    let est = i_hat(&pairs, n).unwrap();
    assert!((est.value - exact).abs() < 0.02, "{} vs {exact}", est.value);
    assert_eq!(est.filtered_fraction, 0.0);
    let counted: usize = est.classes.iter().map(|c| c.count.unwrap()).sum();
    assert_eq!(counted, pairs.len());
}

#[test]
fn i_hat_near_zero_under_independence() {
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let pairs: Vec<(u8, f64)> = (0..20_000)
        .map(|_| (rng.random_range(0..3), rng.sample(StandardNormal)))
        .collect();
    let est = i_hat(&pairs, 3).unwrap();
    assert!(est.value.abs() < 0.01, "{}", est.value);
}

#[test]
fn i_hat_filters_rare_labels() {
    let mut pairs: Vec<(u8, f64)> = (0..30).map(|i| ((i % 2) as u8, i as f64 * 0.37)).collect();
    pairs.push((9, 1.0));
    pairs.push((9, 2.0));
    let est = i_hat(&pairs, 2).unwrap();
    assert_eq!(est.classes.len(), 2);
    assert!((est.filtered_fraction - 2.0 / 32.0).abs() < 1e-15);
    assert_eq!(i_hat(&[(0u8, 1.0), (1, 2.0)], 1).unwrap_err(), Error::EmptyAfterFilter(1));
}
