//! Repeated-trial experiments: sample, estimate, compare with the ground
//! truth, summarize with bootstrap intervals, and write CSV.

use std::io::{Read, Write};

use moment_info::entropy::{h_hat_multivariate_with, h_hat_with};
use moment_info::mutual_info::i_hat_with;
use moment_info::QuadConfig;
use rayon::prelude::*;

use crate::bootstrap::{mean, mean_interval, MeanInterval, DEFAULT_RESAMPLES};
use crate::distributions::{DistributionSpec, GroundTruth, Samples};
use crate::error::{BenchError, Result};
use crate::rng::{bootstrap_rng, trial_rng, MAX_TRIALS};

pub const DEFAULT_TRIALS: usize = 50;
pub const DEFAULT_SAMPLE_SIZES: [usize; 5] = [800, 1600, 2400, 3200, 4000];
pub const THREADS_ENV: &str = "MOMENT_INFO_THREADS";

pub const CSV_HEADER: [&str; 11] = [
    "estimator",
    "distribution",
    "sample_size",
    "trial",
    "estimate",
    "abs_error",
    "rel_abs_error_pct",
    "ci_low",
    "ci_high",
    "ci_metric",
    "status",
];

/// Bootstrap streams per estimator block.
const BLOCK_STREAMS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    HHat { n: usize },
    HHatMultivariate { n: usize },
    IHat { n: usize },
}

impl Estimator {
    /// `h_hat(10)`, `h_hat_multivariate(10)` or `i_hat(5)` as fits the distribution.
    pub fn default_for(spec: &DistributionSpec) -> Self {
        if spec.is_pair() {
            Estimator::IHat { n: 5 }
        } else if spec.dim() > 1 {
            Estimator::HHatMultivariate { n: 10 }
        } else {
            Estimator::HHat { n: 10 }
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            Estimator::HHat { n } | Estimator::HHatMultivariate { n } | Estimator::IHat { n } => n,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Estimator::HHat { n } => format!("h_hat({n})"),
            Estimator::HHatMultivariate { n } => format!("h_hat_multivariate({n})"),
            Estimator::IHat { n } => format!("i_hat({n})"),
        }
    }

    fn check_compatible(&self, spec: &DistributionSpec) -> Result<()> {
        let ok = match self {
            Estimator::HHat { .. } => !spec.is_pair() && spec.dim() == 1,
            Estimator::HHatMultivariate { .. } => !spec.is_pair() && spec.dim() > 1,
            Estimator::IHat { .. } => spec.is_pair(),
        };
        if !ok {
            return Err(BenchError::Config(format!(
                "estimator {} does not apply to {}",
                self.name(),
                spec.kind()
            )));
        }
        if self.degree() == 0 {
            return Err(BenchError::Config("estimator degree must be positive".into()));
        }
        Ok(())
    }

    pub fn evaluate(&self, samples: &Samples, cfg: &QuadConfig) -> Result<f64> {
        let v = match (self, samples) {
            (Estimator::HHat { n }, Samples::Scalar(v)) => h_hat_with(v, *n, cfg)?.value,
            (Estimator::HHatMultivariate { n }, Samples::Vector(v)) => h_hat_multivariate_with(v, *n, cfg)?.value,
            (Estimator::IHat { n }, Samples::Labeled(v)) => i_hat_with(v, *n, cfg)?.value,
            _ => {
                return Err(BenchError::Config(format!(
                    "estimator {} does not accept these samples",
                    self.name()
                )))
            }
        };
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub estimator: Estimator,
    pub sample_sizes: Vec<usize>,
    pub trials: usize,
    pub bootstrap_resamples: usize,
    pub quad: QuadConfig,
    pub seed: u64,
    /// Multiplier applied to every continuous coordinate after sampling.
    pub scale: f64,
    /// Worker threads; `None` defers to the environment, then to rayon.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(distribution: DistributionSpec) -> Self {
        let estimator = Estimator::default_for(&distribution);
        Self {
            distribution,
            estimator,
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            trials: DEFAULT_TRIALS,
            bootstrap_resamples: DEFAULT_RESAMPLES,
            quad: QuadConfig::default(),
            seed: 0,
            scale: 1.0,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        self.estimator.check_compatible(&self.distribution)?;
        if self.trials == 0 || self.trials as u64 >= MAX_TRIALS {
            return Err(BenchError::Config(format!(
                "trials must lie in 1..{MAX_TRIALS}, got {}",
                self.trials
            )));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(BenchError::Config("sample sizes must be a nonempty list of positive integers".into()));
        }
        if self.sample_sizes.len() >= BLOCK_STREAMS {
            return Err(BenchError::Config("too many sample sizes".into()));
        }
        if !(self.scale.is_finite() && self.scale != 0.0) {
            return Err(BenchError::Config(format!("scale must be finite and nonzero, got {}", self.scale)));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("thread count must be positive".into()));
        }
        self.quad
            .validate()
            .map_err(|e| BenchError::Config(format!("quadrature settings: {e}")))?;
        Ok(())
    }
}

/// What the summary interval is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    /// `100 |estimate / truth - 1|`.
    RelativePercent,
    /// `|estimate - truth|` in nats, used when the truth is zero.
    AbsoluteNats,
    /// The raw estimate, used when no truth is known.
    Estimate,
}

impl ErrorMetric {
    pub fn for_truth(truth: &GroundTruth) -> Self {
        match truth.value {
            Some(v) if v != 0.0 => ErrorMetric::RelativePercent,
            Some(_) => ErrorMetric::AbsoluteNats,
            None => ErrorMetric::Estimate,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorMetric::RelativePercent => "rel_abs_error_pct",
            ErrorMetric::AbsoluteNats => "abs_error",
            ErrorMetric::Estimate => "estimate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub sample_size: usize,
    pub trial: usize,
    pub estimate: Option<f64>,
    pub abs_error: Option<f64>,
    pub rel_abs_error_pct: Option<f64>,
    /// Failure message; `None` for a successful trial.
    pub failure: Option<String>,
}

impl TrialRecord {
    fn new(sample_size: usize, trial: usize, outcome: std::result::Result<f64, String>, truth: Option<f64>) -> Self {
        match outcome {
            Ok(v) => Self {
                sample_size,
                trial,
                estimate: Some(v),
                abs_error: truth.map(|t| (v - t).abs()),
                rel_abs_error_pct: truth.filter(|t| *t != 0.0).map(|t| 100.0 * (v / t - 1.0).abs()),
                failure: None,
            },
            Err(msg) => Self {
                sample_size,
                trial,
                estimate: None,
                abs_error: None,
                rel_abs_error_pct: None,
                failure: Some(msg),
            },
        }
    }

    pub fn metric(&self, metric: ErrorMetric) -> Option<f64> {
        match metric {
            ErrorMetric::RelativePercent => self.rel_abs_error_pct,
            ErrorMetric::AbsoluteNats => self.abs_error,
            ErrorMetric::Estimate => self.estimate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeSummary {
    pub sample_size: usize,
    pub trials: usize,
    pub failed: usize,
    pub mean_estimate: Option<f64>,
    pub mean_abs_error: Option<f64>,
    pub mean_rel_abs_error_pct: Option<f64>,
    /// Mean and bootstrap interval of the report's [`ErrorMetric`].
    pub interval: Option<MeanInterval>,
}

/// Trials and per-size summaries for one estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorBlock {
    pub estimator: String,
    pub trials: Vec<TrialRecord>,
    pub summaries: Vec<SizeSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub distribution: String,
    pub truth: GroundTruth,
    pub metric: ErrorMetric,
    /// The native estimator first, then any merged baselines.
    pub blocks: Vec<EstimatorBlock>,
}

fn optional_mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| mean(&v))
}

fn summarize(
    trials: &[TrialRecord],
    sizes: &[usize],
    metric: ErrorMetric,
    resamples: usize,
    seed: u64,
    block: usize,
) -> Vec<SizeSummary> {
    sizes
        .iter()
        .enumerate()
        .map(|(si, &size)| {
            let rows: Vec<&TrialRecord> = trials.iter().filter(|r| r.sample_size == size).collect();
            let values: Vec<f64> = rows.iter().filter_map(|r| r.metric(metric)).collect();
            let mut rng = bootstrap_rng(seed, block * BLOCK_STREAMS + si);
            SizeSummary {
                sample_size: size,
                trials: rows.len(),
                failed: rows.iter().filter(|r| r.failure.is_some()).count(),
                mean_estimate: optional_mean(rows.iter().map(|r| r.estimate)),
                mean_abs_error: optional_mean(rows.iter().map(|r| r.abs_error)),
                mean_rel_abs_error_pct: optional_mean(rows.iter().map(|r| r.rel_abs_error_pct)),
                interval: mean_interval(&values, resamples, &mut rng),
            }
        })
        .collect()
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn env_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(BenchError::Config(format!("{THREADS_ENV} must be a positive integer, got {s:?}"))),
        },
        Err(_) => Ok(None),
    }
}

fn run_trial(cfg: &ExperimentConfig, size_index: usize, size: usize, trial: usize) -> std::result::Result<f64, String> {
    let mut rng = trial_rng(cfg.seed, size_index, trial);
    let mut samples = cfg.distribution.sample(size, &mut rng).map_err(|e| e.to_string())?;
    if cfg.scale != 1.0 {
        samples.scale(cfg.scale);
    }
    match cfg.estimator.evaluate(&samples, &cfg.quad) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("non-finite estimate {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Runs every `(sample_size, trial)` pair, in parallel, and summarizes.
/// Trials that fail are recorded as such and do not stop the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<TrialReport> {
    cfg.validate()?;
    let truth = cfg.distribution.ground_truth()?;
    let metric = ErrorMetric::for_truth(&truth);
    let jobs: Vec<(usize, usize, usize)> = cfg
        .sample_sizes
        .iter()
        .enumerate()
        .flat_map(|(si, &size)| (0..cfg.trials).map(move |t| (si, size, t)))
        .collect();
    let threads = match cfg.threads {
        Some(n) => Some(n),
        None => env_threads()?,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<_> = pool.install(|| {
        jobs.par_iter()
            .map(|&(si, size, t)| run_trial(cfg, si, size, t))
            .collect()
    });
    let trials: Vec<TrialRecord> = jobs
        .iter()
        .zip(outcomes)
        .map(|(&(_, size, t), outcome)| TrialRecord::new(size, t, outcome, truth.value))
        .collect();
    let summaries = summarize(&trials, &cfg.sample_sizes, metric, cfg.bootstrap_resamples, cfg.seed, 0);
    Ok(TrialReport {
        distribution: cfg.distribution.kind().to_string(),
        truth,
        metric,
        blocks: vec![EstimatorBlock {
            estimator: cfg.estimator.name(),
            trials,
            summaries,
        }],
    })
}

/// Per-trial estimates of a run and of the same run with every continuous coordinate multiplied by `factor`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPair {
    pub sample_size: usize,
    pub trial: usize,
    pub unscaled: Option<f64>,
    pub scaled: Option<f64>,
}

pub fn scaling_companion(cfg: &ExperimentConfig, factor: f64) -> Result<Vec<ScalingPair>> {
    let base = run_experiment(cfg)?;
    let scaled_cfg = ExperimentConfig {
        scale: cfg.scale * factor,
        ..cfg.clone()
    };
    let scaled = run_experiment(&scaled_cfg)?;
    Ok(base.blocks[0]
        .trials
        .iter()
        .zip(&scaled.blocks[0].trials)
        .map(|(a, b)| ScalingPair {
            sample_size: a.sample_size,
            trial: a.trial,
            unscaled: a.estimate,
            scaled: b.estimate,
        })
        .collect())
}

impl TrialReport {
    /// Appends externally computed estimates. The input CSV needs the columns
    /// `estimator`, `sample_size`, `trial` and `estimate`; an empty estimate marks a failed trial.
    pub fn merge_baseline<R: Read>(&mut self, input: R, resamples: usize, seed: u64) -> Result<()> {
        let mut reader = csv::Reader::from_reader(input);
        let headers = reader.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim() == name)
                .ok_or_else(|| BenchError::Config(format!("baseline csv lacks a {name:?} column")))
        };
        let (ce, cs, ct, cv) = (col("estimator")?, col("sample_size")?, col("trial")?, col("estimate")?);
        let mut grouped: Vec<(String, Vec<TrialRecord>)> = Vec::new();
        for (line, row) in reader.records().enumerate() {
            let row = row?;
            let field = |i: usize| row.get(i).unwrap_or("").trim();
            let bad = |what: &str| BenchError::Config(format!("baseline csv row {}: bad {what}", line + 2));
            let name = field(ce).to_string();
            let size: usize = field(cs).parse().map_err(|_| bad("sample_size"))?;
            let trial: usize = field(ct).parse().map_err(|_| bad("trial"))?;
            let outcome = match field(cv) {
                "" => Err("missing estimate".to_string()),
                s => Ok(s.parse::<f64>().map_err(|_| bad("estimate"))?),
            };
            let record = TrialRecord::new(size, trial, outcome, self.truth.value);
            match grouped.iter_mut().find(|(n, _)| *n == name) {
                Some((_, v)) => v.push(record),
                None => grouped.push((name, vec![record])),
            }
        }
        for (name, mut trials) in grouped {
            trials.sort_by_key(|r| (r.sample_size, r.trial));
            let mut sizes: Vec<usize> = trials.iter().map(|r| r.sample_size).collect();
            sizes.dedup();
            let block = self.blocks.len();
            let summaries = summarize(&trials, &sizes, self.metric, resamples, seed, block);
            self.blocks.push(EstimatorBlock {
                estimator: name,
                trials,
                summaries,
            });
        }
        Ok(())
    }

    /// One row per trial followed by one summary row per sample size, for each estimator block.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for b in &self.blocks {
            for r in &b.trials {
                let status = match &r.failure {
                    None => "ok".to_string(),
                    Some(m) => format!("failed: {m}"),
                };
                w.write_record([
                    b.estimator.clone(),
                    self.distribution.clone(),
                    r.sample_size.to_string(),
                    r.trial.to_string(),
                    num(r.estimate),
                    num(r.abs_error),
                    num(r.rel_abs_error_pct),
                    String::new(),
                    String::new(),
                    String::new(),
                    status,
                ])?;
            }
            for s in &b.summaries {
                w.write_record([
                    b.estimator.clone(),
                    self.distribution.clone(),
                    s.sample_size.to_string(),
                    "summary".to_string(),
                    num(s.mean_estimate),
                    num(s.mean_abs_error),
                    num(s.mean_rel_abs_error_pct),
                    num(s.interval.map(|i| i.low)),
                    num(s.interval.map(|i| i.high)),
                    self.metric.name().to_string(),
                    format!("summary: {} of {} trials failed", s.failed, s.trials),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
