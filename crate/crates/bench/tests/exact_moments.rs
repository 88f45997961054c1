use moment_info::sample_moments;
use moment_info_bench::{DistributionSpec, ExactMoments, Kind, Samples};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const M: usize = 1_000_000;
const ORDER: usize = 4;

/// `|mean(f) - exact| <= 5 sqrt((E[f^2] - exact^2) / m)`.
fn within_band(sample: f64, exact: f64, second: f64, what: &str) {
    let sigma = ((second - exact * exact).max(0.0) / M as f64).sqrt();
    assert!((sample - exact).abs() <= 5.0 * sigma + 1e-12, "{what}: {sample} vs {exact} (sigma {sigma:e})");
}

#[test]
fn scalar_kinds_agree_with_draws() {
    let kinds = [Kind::Semicircle, Kind::GaussMix1d, Kind::Gaussian, Kind::RayleighChi2, Kind::Uniform, Kind::Rademacher];
    for (i, kind) in kinds.into_iter().enumerate() {
        let spec = DistributionSpec::standard(kind);
        let ExactMoments::Scalar(exact) = spec.exact_moments(2 * ORDER).unwrap() else { panic!("{kind}") };
        let mut rng = ChaCha20Rng::seed_from_u64(100 + i as u64);
        let Samples::Scalar(x) = spec.sample(M, &mut rng).unwrap() else { panic!("{kind}") };
        let sampled = sample_moments(&x, ORDER).unwrap();
        for k in 1..=ORDER {
            within_band(sampled.get(k), exact.get(k), exact.get(2 * k), &format!("{kind} moment {k}"));
        }
    }
}

#[test]
fn joint_kinds_agree_with_draws() {
    for (i, kind) in [Kind::Semicircle2d, Kind::GaussMix2d].into_iter().enumerate() {
        let spec = DistributionSpec::standard(kind);
        let ExactMoments::Joint(exact) = spec.exact_moments(2 * ORDER).unwrap() else { panic!("{kind}") };
        let mut rng = ChaCha20Rng::seed_from_u64(200 + i as u64);
        let Samples::Vector(rows) = spec.sample(M, &mut rng).unwrap() else { panic!("{kind}") };
        for a in 0..=ORDER as u32 {
            for b in 0..=(ORDER as u32 - a) {
                if a + b == 0 {
                    continue;
                }
                let sampled = rows.iter().map(|r| r[0].powi(a as i32) * r[1].powi(b as i32)).sum::<f64>() / M as f64;
                within_band(sampled, exact.at(&[a, b]), exact.at(&[2 * a, 2 * b]), &format!("{kind} moment ({a}, {b})"));
            }
        }
    }
}

#[test]
fn pair_kinds_have_no_table() {
    for kind in [Kind::ZeroInflatedPoissonPair, Kind::BernoulliUniformPair] {
        assert!(DistributionSpec::standard(kind).exact_moments(4).is_err());
    }
}
