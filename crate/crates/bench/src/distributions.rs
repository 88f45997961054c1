//! Benchmark distributions: samplers, ground-truth entropies and mutual
//! informations, and exact moments where they are available in closed form.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use moment_info::combin::binomial;
use moment_info::quadrature::integrate_halfline;
use moment_info::{gaussian_moment, MomentVector, MultiMomentTable, QuadConfig};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Exp1, Poisson, StandardNormal};

use crate::error::{BenchError, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const WEIGHT_TOLERANCE: f64 = 1e-9;
const BISECTION_STEPS: usize = 64;
/// Labels beyond this count carry less than `2^-200` of the Poisson mass.
const ZIP_MAX_LABEL: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Semicircle,
    Semicircle2d,
    GaussMix1d,
    GaussMix2d,
    ZeroInflatedPoissonPair,
    BernoulliUniformPair,
    Gaussian,
    RayleighChi2,
    Uniform,
    Rademacher,
}

impl Kind {
    pub const ALL: [Kind; 10] = [
        Kind::Semicircle,
        Kind::Semicircle2d,
        Kind::GaussMix1d,
        Kind::GaussMix2d,
        Kind::ZeroInflatedPoissonPair,
        Kind::BernoulliUniformPair,
        Kind::Gaussian,
        Kind::RayleighChi2,
        Kind::Uniform,
        Kind::Rademacher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Semicircle => "semicircle",
            Kind::Semicircle2d => "semicircle2d",
            Kind::GaussMix1d => "gauss_mix_1d",
            Kind::GaussMix2d => "gauss_mix_2d",
            Kind::ZeroInflatedPoissonPair => "zero_inflated_poisson_pair",
            Kind::BernoulliUniformPair => "bernoulli_uniform_pair",
            Kind::Gaussian => "gaussian",
            Kind::RayleighChi2 => "rayleigh_chi2",
            Kind::Uniform => "uniform",
            Kind::Rademacher => "rademacher",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                BenchError::InvalidSpec(format!("unknown kind {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Density `2/(pi R^2) sqrt(R^2 - x^2)` on `[-R, R]`.
    Semicircle { radius: f64 },
    /// Two independent semicircle coordinates.
    Semicircle2d { radius: f64 },
    GaussMix1d { weights: Vec<f64>, means: Vec<f64>, sds: Vec<f64> },
    GaussMix2d { weights: Vec<f64>, means: Vec<[f64; 2]>, covs: Vec<[[f64; 2]; 2]> },
    /// `Y ~ Exp(1)`; `X = 0` with probability `zero_prob`, else `X ~ Poisson(Y)`.
    ZeroInflatedPoissonPair { zero_prob: f64 },
    /// Independent `X ~ Bernoulli(p)` and `Y ~ Unif[0, upper]`.
    BernoulliUniformPair { p: f64, upper: f64 },
    Gaussian { mean: f64, sd: f64 },
    /// Rayleigh with scale `sigma`, the norm of a 2-D normal vector.
    RayleighChi2 { scale: f64 },
    Uniform { low: f64, high: f64 },
    Rademacher,
}

/// Draws from a [`DistributionSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Scalar(Vec<f64>),
    Vector(Vec<Vec<f64>>),
    /// `(x, y)` with discrete label `x`.
    Labeled(Vec<(i64, f64)>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Scalar(v) => v.len(),
            Samples::Vector(v) => v.len(),
            Samples::Labeled(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multiplies every continuous coordinate by `a`.
    pub fn scale(&mut self, a: f64) {
        match self {
            Samples::Scalar(v) => v.iter_mut().for_each(|y| *y *= a),
            Samples::Vector(v) => v.iter_mut().flatten().for_each(|y| *y *= a),
            Samples::Labeled(v) => v.iter_mut().for_each(|(_, y)| *y *= a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthSource {
    ClosedForm,
    DensityQuadrature,
    Independence,
    /// `I(X; Y | B)` given the mixture branch `B`, the customary reference for
    /// zero-inflated pairs. It exceeds `I(X; Y)` because `X = 0` does not reveal `B`.
    BranchConditional,
    None,
}

impl TruthSource {
    pub fn name(self) -> &'static str {
        match self {
            TruthSource::ClosedForm => "closed-form",
            TruthSource::DensityQuadrature => "density-quadrature",
            TruthSource::Independence => "independence",
            TruthSource::BranchConditional => "branch-conditional",
            TruthSource::None => "none",
        }
    }
}

/// True entropy (or mutual information for pair kinds) in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub value: Option<f64>,
    pub source: TruthSource,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExactMoments {
    Scalar(MomentVector),
    Joint(MultiMomentTable),
}

impl DistributionSpec {
    /// The benchmark parameterization of each kind.
    pub fn standard(kind: Kind) -> Self {
        match kind {
            Kind::Semicircle => DistributionSpec::Semicircle { radius: 1.0 },
            Kind::Semicircle2d => DistributionSpec::Semicircle2d { radius: 1.0 },
            Kind::GaussMix1d => DistributionSpec::GaussMix1d {
                weights: vec![0.1, 0.2, 0.3, 0.4],
                means: vec![-2.0, 0.0, 1.0, 5.0],
                sds: vec![1.5, 1.0, 2.0, 1.0],
            },
            Kind::GaussMix2d => DistributionSpec::GaussMix2d {
                weights: vec![0.5, 0.5],
                means: vec![[-1.0, -1.0], [1.0, 1.0]],
                covs: vec![[[1.0, 0.5], [0.5, 1.0]], [[1.0, 0.0], [0.0, 1.0]]],
            },
            Kind::ZeroInflatedPoissonPair => DistributionSpec::ZeroInflatedPoissonPair { zero_prob: 0.15 },
            Kind::BernoulliUniformPair => DistributionSpec::BernoulliUniformPair { p: 0.5, upper: 2.0 },
            Kind::Gaussian => DistributionSpec::Gaussian { mean: 0.0, sd: 1.0 },
            Kind::RayleighChi2 => DistributionSpec::RayleighChi2 { scale: 1.0 },
            Kind::Uniform => DistributionSpec::Uniform {
                low: -3f64.sqrt(),
                high: 3f64.sqrt(),
            },
            Kind::Rademacher => DistributionSpec::Rademacher,
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            DistributionSpec::Semicircle { .. } => Kind::Semicircle,
            DistributionSpec::Semicircle2d { .. } => Kind::Semicircle2d,
            DistributionSpec::GaussMix1d { .. } => Kind::GaussMix1d,
            DistributionSpec::GaussMix2d { .. } => Kind::GaussMix2d,
            DistributionSpec::ZeroInflatedPoissonPair { .. } => Kind::ZeroInflatedPoissonPair,
            DistributionSpec::BernoulliUniformPair { .. } => Kind::BernoulliUniformPair,
            DistributionSpec::Gaussian { .. } => Kind::Gaussian,
            DistributionSpec::RayleighChi2 { .. } => Kind::RayleighChi2,
            DistributionSpec::Uniform { .. } => Kind::Uniform,
            DistributionSpec::Rademacher => Kind::Rademacher,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(BenchError::InvalidSpec(format!("{}: {msg}", self.kind())));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        match self {
            DistributionSpec::Semicircle { radius } | DistributionSpec::Semicircle2d { radius } => {
                if !positive(*radius) {
                    return bad(format!("radius must be positive, got {radius}"));
                }
            }
            DistributionSpec::GaussMix1d { weights, means, sds } => {
                check_weights(weights).or_else(&bad)?;
                if means.len() != weights.len() || sds.len() != weights.len() {
                    return bad("weights, means and sds differ in length".into());
                }
                if means.iter().any(|m| !m.is_finite()) || !sds.iter().all(|s| positive(*s)) {
                    return bad("means must be finite and sds positive".into());
                }
            }
            DistributionSpec::GaussMix2d { weights, means, covs } => {
                check_weights(weights).or_else(&bad)?;
                if means.len() != weights.len() || covs.len() != weights.len() {
                    return bad("weights, means and covariances differ in length".into());
                }
                if means.iter().flatten().any(|m| !m.is_finite()) {
                    return bad("means must be finite".into());
                }
                for c in covs {
                    let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
                    if c[0][1] != c[1][0] || !positive(c[0][0]) || !positive(det) {
                        return bad(format!("covariance {c:?} is not symmetric positive definite"));
                    }
                }
            }
            DistributionSpec::ZeroInflatedPoissonPair { zero_prob } => {
                if !(0.0..1.0).contains(zero_prob) {
                    return bad(format!("zero_prob must lie in [0, 1), got {zero_prob}"));
                }
            }
            DistributionSpec::BernoulliUniformPair { p, upper } => {
                if !(*p > 0.0 && *p < 1.0) || !positive(*upper) {
                    return bad(format!("need 0 < p < 1 and upper > 0, got p={p} upper={upper}"));
                }
            }
            DistributionSpec::Gaussian { mean, sd } => {
                if !mean.is_finite() || !positive(*sd) {
                    return bad(format!("need finite mean and positive sd, got {mean}, {sd}"));
                }
            }
            DistributionSpec::RayleighChi2 { scale } => {
                if !positive(*scale) {
                    return bad(format!("scale must be positive, got {scale}"));
                }
            }
            DistributionSpec::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite() && low < high) {
                    return bad(format!("need finite low < high, got [{low}, {high}]"));
                }
            }
            DistributionSpec::Rademacher => {}
        }
        Ok(())
    }

    /// Number of continuous coordinates per draw.
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::Semicircle2d { .. } | DistributionSpec::GaussMix2d { .. } => 2,
            _ => 1,
        }
    }

    /// Whether a draw carries a discrete label alongside the continuous value.
    pub fn is_pair(&self) -> bool {
        matches!(
            self,
            DistributionSpec::ZeroInflatedPoissonPair { .. } | DistributionSpec::BernoulliUniformPair { .. }
        )
    }

    /// `m` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Samples> {
        self.validate()?;
        if m == 0 {
            return Err(BenchError::Config("sample size must be positive".into()));
        }
        Ok(match self {
            DistributionSpec::Semicircle { radius } => {
                Samples::Scalar((0..m).map(|_| radius * semicircle_quantile(rng.random())).collect())
            }
            DistributionSpec::Semicircle2d { radius } => Samples::Vector(
                (0..m)
                    .map(|_| {
                        let a = radius * semicircle_quantile(rng.random());
                        let b = radius * semicircle_quantile(rng.random());
                        vec![a, b]
                    })
                    .collect(),
            ),
            DistributionSpec::GaussMix1d { weights, means, sds } => {
                let pick = weighted_index(weights)?;
                Samples::Scalar(
                    (0..m)
                        .map(|_| {
                            let i = pick.sample(rng);
                            let z: f64 = rng.sample(StandardNormal);
                            means[i] + sds[i] * z
                        })
                        .collect(),
                )
            }
            DistributionSpec::GaussMix2d { weights, means, covs } => {
                let pick = weighted_index(weights)?;
                let chol: Vec<[f64; 3]> = covs.iter().map(cholesky2).collect();
                Samples::Vector(
                    (0..m)
                        .map(|_| {
                            let i = pick.sample(rng);
                            let z1: f64 = rng.sample(StandardNormal);
                            let z2: f64 = rng.sample(StandardNormal);
                            let [l11, l21, l22] = chol[i];
                            vec![means[i][0] + l11 * z1, means[i][1] + l21 * z1 + l22 * z2]
                        })
                        .collect(),
                )
            }
            DistributionSpec::ZeroInflatedPoissonPair { zero_prob } => {
                let mut out = Vec::with_capacity(m);
                for _ in 0..m {
                    let y: f64 = rng.sample(Exp1);
                    let zero = rng.random::<f64>() < *zero_prob;
                    let x = if zero || y <= 0.0 {
                        0
                    } else {
                        let pois = Poisson::new(y)
                            .map_err(|e| BenchError::InvalidSpec(format!("poisson rate {y}: {e}")))?;
                        pois.sample(rng) as i64
                    };
                    out.push((x, y));
                }
                Samples::Labeled(out)
            }
            DistributionSpec::BernoulliUniformPair { p, upper } => Samples::Labeled(
                (0..m)
                    .map(|_| {
                        let x = i64::from(rng.random::<f64>() < *p);
                        (x, rng.random_range(0.0..*upper))
                    })
                    .collect(),
            ),
            DistributionSpec::Gaussian { mean, sd } => Samples::Scalar(
                (0..m)
                    .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                    .collect(),
            ),
            DistributionSpec::RayleighChi2 { scale } => Samples::Scalar(
                (0..m)
                    .map(|_| scale * (2.0 * rng.sample::<f64, _>(Exp1)).sqrt())
                    .collect(),
            ),
            DistributionSpec::Uniform { low, high } => {
                Samples::Scalar((0..m).map(|_| rng.random_range(*low..*high)).collect())
            }
            DistributionSpec::Rademacher => Samples::Scalar(
                (0..m)
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect(),
            ),
        })
    }

    /// Differential entropy, or `I(X; Y)` for pair kinds, in nats.
    pub fn ground_truth(&self) -> Result<GroundTruth> {
        self.validate()?;
        let closed = |v: f64| GroundTruth {
            value: Some(v),
            source: TruthSource::ClosedForm,
        };
        let cfg = QuadConfig::default();
        Ok(match self {
            DistributionSpec::Semicircle { radius } => closed((PI * radius).ln() - 0.5),
            DistributionSpec::Semicircle2d { radius } => closed(2.0 * ((PI * radius).ln() - 0.5)),
            DistributionSpec::GaussMix1d { weights, means, sds } => GroundTruth {
                value: Some(gauss_mix_1d_entropy(weights, means, sds, &cfg)?),
                source: TruthSource::DensityQuadrature,
            },
            DistributionSpec::GaussMix2d { weights, means, covs } => GroundTruth {
                value: Some(gauss_mix_2d_entropy(weights, means, covs, &cfg)?),
                source: TruthSource::DensityQuadrature,
            },
            DistributionSpec::ZeroInflatedPoissonPair { zero_prob } => GroundTruth {
                value: Some(zip_branch_information(*zero_prob, &cfg)?),
                source: TruthSource::BranchConditional,
            },
            DistributionSpec::BernoulliUniformPair { .. } => GroundTruth {
                value: Some(0.0),
                source: TruthSource::Independence,
            },
            DistributionSpec::Gaussian { sd, .. } => closed(0.5 * (2.0 * PI * E * sd * sd).ln()),
            DistributionSpec::RayleighChi2 { scale } => {
                closed(1.0 + (scale / 2f64.sqrt()).ln() + EULER_GAMMA / 2.0)
            }
            DistributionSpec::Uniform { low, high } => closed((high - low).ln()),
            DistributionSpec::Rademacher => GroundTruth {
                value: None,
                source: TruthSource::None,
            },
        })
    }

    /// Raw moments through `order`.
    pub fn exact_moments(&self, order: usize) -> Result<ExactMoments> {
        self.validate()?;
        let scalar = |f: &dyn Fn(usize) -> f64| -> Result<ExactMoments> {
            Ok(ExactMoments::Scalar(MomentVector::new((1..=order).map(f).collect())?))
        };
        match self {
            DistributionSpec::Semicircle { radius } => scalar(&|k| semicircle_moment(*radius, k)),
            DistributionSpec::Semicircle2d { radius } => Ok(ExactMoments::Joint(MultiMomentTable::from_fn(
                2,
                order,
                |a| semicircle_moment(*radius, a[0] as usize) * semicircle_moment(*radius, a[1] as usize),
            )?)),
            DistributionSpec::GaussMix1d { weights, means, sds } => scalar(&|k| {
                weights
                    .iter()
                    .zip(means)
                    .zip(sds)
                    .map(|((w, mu), sd)| w * shifted_gaussian_moment(*mu, *sd, k))
                    .sum()
            }),
            DistributionSpec::GaussMix2d { weights, means, covs } => {
                let chol: Vec<[f64; 3]> = covs.iter().map(cholesky2).collect();
                Ok(ExactMoments::Joint(MultiMomentTable::from_fn(2, order, |a| {
                    (0..weights.len())
                        .map(|i| {
                            weights[i] * bivariate_gaussian_moment(means[i], chol[i], a[0] as usize, a[1] as usize)
                        })
                        .sum()
                })?))
            }
            DistributionSpec::Gaussian { mean, sd } => scalar(&|k| shifted_gaussian_moment(*mean, *sd, k)),
            DistributionSpec::RayleighChi2 { scale } => scalar(&|k| rayleigh_moment(*scale, k)),
            DistributionSpec::Uniform { low, high } => scalar(&|k| {
                let p = k as i32 + 1;
                (high.powi(p) - low.powi(p)) / (p as f64 * (high - low))
            }),
            DistributionSpec::Rademacher => scalar(&|k| if k % 2 == 0 { 1.0 } else { 0.0 }),
            DistributionSpec::ZeroInflatedPoissonPair { .. } | DistributionSpec::BernoulliUniformPair { .. } => {
                Err(BenchError::InvalidSpec(format!("{} has no exact moment table", self.kind())))
            }
        }
    }
}

fn check_weights(weights: &[f64]) -> std::result::Result<(), String> {
    if weights.is_empty() {
        return Err("no mixture components".into());
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(format!("weights must be positive, got {weights:?}"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(format!("weights sum to {total}, not 1"));
    }
    Ok(())
}

fn weighted_index(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| BenchError::InvalidSpec(format!("weights: {e}")))
}

/// `[l11, l21, l22]` with `L L^T = c`.
fn cholesky2(c: &[[f64; 2]; 2]) -> [f64; 3] {
    let l11 = c[0][0].sqrt();
    let l21 = c[1][0] / l11;
    let l22 = (c[1][1] - l21 * l21).sqrt();
    [l11, l21, l22]
}

/// Semicircle CDF on `[-1, 1]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    0.5 + (x * (1.0 - x * x).sqrt() + x.asin()) / PI
}

/// Inverse of [`semicircle_cdf`] by bisection.
pub fn semicircle_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if semicircle_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `E[X^k]` for the semicircle of radius `r`: `Catalan(k/2) (r/2)^k` for even `k`.
pub fn semicircle_moment(radius: f64, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let j = k / 2;
    let catalan = binomial(2 * j, j) / (j as f64 + 1.0);
    catalan * (radius / 2.0).powi(k as i32)
}

/// `E[X^k] = s^k 2^{k/2} Gamma(1 + k/2)` for the Rayleigh law with scale `s`.
pub fn rayleigh_moment(scale: f64, k: usize) -> f64 {
    // Gamma(1 + k/2) by the recurrence from Gamma(1) or Gamma(3/2).
    let mut g = if k.is_multiple_of(2) { 1.0 } else { PI.sqrt() / 2.0 };
    let mut x = if k.is_multiple_of(2) { 1.0 } else { 1.5 };
    let target = 1.0 + k as f64 / 2.0;
    while x < target - 0.25 {
        g *= x;
        x += 1.0;
    }
    scale.powi(k as i32) * 2f64.powf(k as f64 / 2.0) * g
}

fn shifted_gaussian_moment(mu: f64, sd: f64, k: usize) -> f64 {
    (0..=k)
        .map(|j| binomial(k, j) * mu.powi((k - j) as i32) * sd.powi(j as i32) * gaussian_moment(j))
        .sum()
}

/// `E[X^a Y^b]` for `X = m0 + l11 Z1`, `Y = m1 + l21 Z1 + l22 Z2`.
fn bivariate_gaussian_moment(mean: [f64; 2], chol: [f64; 3], a: usize, b: usize) -> f64 {
    let [l11, l21, l22] = chol;
    let mut total = 0.0;
    for i in 0..=a {
        let xa = binomial(a, i) * mean[0].powi((a - i) as i32) * l11.powi(i as i32);
        for j in 0..=b {
            // Y^b = sum_j C(b, j) m1^{b-j} (l21 Z1 + l22 Z2)^j.
            let yb = binomial(b, j) * mean[1].powi((b - j) as i32);
            for k in 0..=j {
                let l = j - k;
                let term = binomial(j, k) * l21.powi(k as i32) * l22.powi(l as i32);
                total += xa * yb * term * gaussian_moment(i + k) * gaussian_moment(l);
            }
        }
    }
    total
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let top = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// `-p log p` from `log p`.
fn neg_p_log_p(lp: f64) -> f64 {
    if lp == f64::NEG_INFINITY {
        0.0
    } else {
        -lp.exp() * lp
    }
}

fn gauss_mix_1d_log_density(weights: &[f64], means: &[f64], sds: &[f64], x: f64) -> f64 {
    log_sum_exp(weights.iter().zip(means).zip(sds).map(|((w, mu), sd)| {
        let z = (x - mu) / sd;
        w.ln() - sd.ln() - 0.5 * (2.0 * PI).ln() - 0.5 * z * z
    }))
}

/// `h = -int p log p` over the real line, split at the origin.
pub fn gauss_mix_1d_entropy(weights: &[f64], means: &[f64], sds: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let f = |x: f64| gauss_mix_1d_log_density(weights, means, sds, x);
    let r = integrate_halfline(|x| neg_p_log_p(f(x)) + neg_p_log_p(f(-x)), cfg)?;
    Ok(r.value)
}

fn gauss_mix_2d_log_density(weights: &[f64], means: &[[f64; 2]], covs: &[[[f64; 2]; 2]], x: f64, y: f64) -> f64 {
    log_sum_exp((0..weights.len()).map(|i| {
        let c = covs[i];
        let det = c[0][0] * c[1][1] - c[0][1] * c[1][0];
        let (dx, dy) = (x - means[i][0], y - means[i][1]);
        let q = (c[1][1] * dx * dx - 2.0 * c[0][1] * dx * dy + c[0][0] * dy * dy) / det;
        weights[i].ln() - (2.0 * PI).ln() - 0.5 * det.ln() - 0.5 * q
    }))
}

/// `h = -int int p log p` by nested half-line quadrature in each quadrant pair.
pub fn gauss_mix_2d_entropy(
    weights: &[f64],
    means: &[[f64; 2]],
    covs: &[[[f64; 2]; 2]],
    cfg: &QuadConfig,
) -> Result<f64> {
    let f = |x: f64, y: f64| neg_p_log_p(gauss_mix_2d_log_density(weights, means, covs, x, y));
    let inner = |x: f64| -> moment_info::Result<f64> {
        Ok(integrate_halfline(|y| f(x, y) + f(x, -y), cfg)?.value)
    };
    let r = moment_info::quadrature::integrate_halfline_fallible(|x| Ok(inner(x)? + inner(-x)?), cfg)?;
    Ok(r.value)
}

/// `I(X; Y | B) = (1 - q) I(Pois(Y); Y)` for the zero-inflated Poisson pair with branch indicator `B`.
pub fn zip_branch_information(zero_prob: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok((1.0 - zero_prob) * zip_mutual_information(0.0, cfg)?)
}

/// `I(X; Y)` for the zero-inflated Poisson pair, as
/// `sum_k int e^{-y} P(k|y) log(P(k|y) / P(k)) dy`.
pub fn zip_mutual_information(zero_prob: f64, cfg: &QuadConfig) -> Result<f64> {
    let q = zero_prob;
    let mut ln_fact = vec![0.0; ZIP_MAX_LABEL + 1];
    for k in 1..=ZIP_MAX_LABEL {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let marginal = |k: usize| {
        let p = (1.0 - q) * 0.5f64.powi(k as i32 + 1);
        if k == 0 {
            q + p
        } else {
            p
        }
    };
    let integrand = |y: f64| {
        let ly = y.ln();
        let mut acc = 0.0;
        for k in 0..=ZIP_MAX_LABEL {
            let pois = if y == 0.0 {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (k as f64 * ly - y - ln_fact[k]).exp()
            };
            let mut cond = (1.0 - q) * pois;
            if k == 0 {
                cond += q;
            }
            if cond > 0.0 {
                acc += cond * (cond / marginal(k)).ln();
            }
        }
        (-y).exp() * acc
    };
    Ok(integrate_halfline(integrand, cfg)?.value)
}
