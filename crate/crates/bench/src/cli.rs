//! Command-line interface.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use moment_info::entropy::{h_hat_multivariate_with, h_hat_with};
use moment_info::mutual_info::i_hat_with;
use moment_info::{channel_rational, MomentVector, Polynomial, QuadConfig};

use crate::acceptance;
use crate::distributions::{DistributionSpec, ExactMoments, Kind};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, Estimator, ExperimentConfig, DEFAULT_SAMPLE_SIZES, DEFAULT_TRIALS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Largest multiplier tried when looking for integer coefficients.
const MAX_INTEGER_SCALE: u32 = 100_000;

#[derive(Debug, Parser)]
#[command(name = "moment-info", version, about = "Moment-based entropy and mutual information estimates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Absolute tolerance of the entropy integral.
    #[arg(long, global = true)]
    abs_tol: Option<f64>,

    /// Relative tolerance of the entropy integral.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadConfig> {
        let mut cfg = QuadConfig::default();
        if let Some(a) = self.abs_tol {
            cfg.abs_tol = a;
        }
        if let Some(r) = self.rel_tol {
            cfg.rel_tol = r;
        }
        cfg.validate()
            .map_err(|e| BenchError::Config(format!("quadrature settings: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate differential entropy from samples, one row per draw.
    Entropy {
        /// Moment degree.
        #[arg(long, default_value_t = 10)]
        n: usize,

        /// CSV file of samples; a non-numeric first row is taken as a header.
        #[arg(long)]
        input: PathBuf,

        /// Expected number of columns.
        #[arg(long)]
        dim: Option<usize>,
    },

    /// Estimate mutual information from (label, value) rows.
    Mi {
        /// Moment degree.
        #[arg(long, default_value_t = 5)]
        n: usize,

        /// CSV file with a discrete label column followed by a numeric column.
        #[arg(long)]
        input: PathBuf,
    },

    /// Print the rational function pmmse_n(X, t) of the channel sqrt(t) X + N.
    PmmseRational {
        /// Polynomial degree.
        #[arg(long)]
        n: usize,

        /// A distribution name with exact moments, or comma-separated raw moments E[X], E[X^2], ...
        #[arg(long)]
        moments: String,
    },

    /// Run a repeated-trial benchmark and write CSV.
    Experiment(ExperimentArgs),

    /// Run the acceptance checks.
    Selftest {
        /// Run only these criteria.
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorKind {
    HHat,
    HHatMultivariate,
    IHat,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// One of semicircle, semicircle2d, gauss_mix_1d, gauss_mix_2d, zero_inflated_poisson_pair,
    /// bernoulli_uniform_pair, gaussian, rayleigh_chi2, uniform, rademacher.
    #[arg(long)]
    distribution: String,

    /// Defaults to the estimator that fits the distribution.
    #[arg(long, value_enum)]
    estimator: Option<EstimatorKind>,

    /// Moment degree; defaults to 10 for entropy and 5 for mutual information.
    #[arg(long)]
    n: Option<usize>,

    /// Expected dimension of the distribution.
    #[arg(long)]
    dim: Option<usize>,

    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SAMPLE_SIZES.to_vec())]
    sizes: Vec<usize>,

    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Multiplier applied to every continuous coordinate after sampling.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,

    #[arg(long, default_value_t = crate::bootstrap::DEFAULT_RESAMPLES)]
    resamples: usize,

    /// Output CSV; standard output if absent.
    #[arg(long)]
    output: Option<PathBuf>,

    /// CSV of external estimates (estimator, sample_size, trial, estimate) to report alongside.
    #[arg(long)]
    baseline_csv: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let quad = cli.quad.config()?;
    match &cli.command {
        Command::Entropy { n, input, dim } => entropy(*n, input, *dim, &quad, out),
        Command::Mi { n, input } => mutual_information(*n, input, &quad, out),
        Command::PmmseRational { n, moments } => pmmse_rational(*n, moments, out),
        Command::Experiment(args) => experiment(args, &quad, out),
        Command::Selftest { criteria } => selftest(criteria, out),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| BenchError::Config(format!("cannot open {}: {e}", path.display())))
}

fn read_rows<R: Read>(input: R) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for r in reader.records() {
        let r = r?;
        if r.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(r.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

/// Parses numeric rows, skipping a first row that does not parse as numbers.
fn numeric_rows(rows: &[Vec<String>]) -> Result<Vec<Vec<f64>>> {
    let parse = |r: &Vec<String>| r.iter().map(|f| f.parse::<f64>()).collect::<std::result::Result<Vec<f64>, _>>();
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        match parse(r) {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(_) => return Err(BenchError::Config(format!("row {} is not numeric", i + 1))),
        }
    }
    Ok(out)
}

fn entropy(n: usize, input: &Path, dim: Option<usize>, quad: &QuadConfig, out: &mut dyn Write) -> Result<i32> {
    let rows = numeric_rows(&read_rows(open(input)?)?)?;
    let width = rows.first().map(Vec::len).ok_or_else(|| BenchError::Config("no samples".into()))?;
    if rows.iter().any(|r| r.len() != width) {
        return Err(BenchError::Config("rows differ in length".into()));
    }
    if let Some(d) = dim {
        if d != width {
            return Err(BenchError::Config(format!("expected {d} columns, found {width}")));
        }
    }
    let est = if width == 1 {
        let v: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        h_hat_with(&v, n, quad)?
    } else {
        h_hat_multivariate_with(&rows, n, quad)?
    };
    writeln!(out, "h_hat({n}) = {} nats", est.value)?;
    writeln!(out, "samples: {}, dimension: {width}", rows.len())?;
    writeln!(
        out,
        "log-determinant part: {}, integral part: {}, log-scale correction: {}, quadrature error: {:e}",
        est.logdet_part,
        est.integral_part,
        est.standardization.log_scale_sum(),
        est.quad_err
    )?;
    Ok(EXIT_OK)
}

fn mutual_information(n: usize, input: &Path, quad: &QuadConfig, out: &mut dyn Write) -> Result<i32> {
    let rows = read_rows(open(input)?)?;
    let mut pairs: Vec<(String, f64)> = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != 2 {
            return Err(BenchError::Config(format!("row {} must have two columns", i + 1)));
        }
        match r[1].parse::<f64>() {
            Ok(y) => pairs.push((r[0].clone(), y)),
            Err(_) if i == 0 => {}
            Err(_) => return Err(BenchError::Config(format!("row {}: value is not numeric", i + 1))),
        }
    }
    let est = i_hat_with(&pairs, n, quad)?;
    writeln!(out, "i_hat({n}) = {} nats", est.value)?;
    writeln!(
        out,
        "samples: {}, filtered fraction: {}, log-determinant part: {}, integral part: {}, quadrature error: {:e}",
        pairs.len(),
        est.filtered_fraction,
        est.logdet_part,
        est.integral_part,
        est.quad_err
    )?;
    for c in &est.classes {
        writeln!(
            out,
            "class {}: weight {}, count {}, log det {}",
            c.label,
            c.weight,
            c.count.unwrap_or(0),
            c.log_det
        )?;
    }
    Ok(EXIT_OK)
}

fn parse_moments(spec: &str, order: usize) -> Result<MomentVector> {
    if let Ok(kind) = spec.parse::<Kind>() {
        return match DistributionSpec::standard(kind).exact_moments(order)? {
            ExactMoments::Scalar(mv) => Ok(mv),
            ExactMoments::Joint(_) => Err(BenchError::Config(format!("{kind} is not scalar"))),
        };
    }
    let values = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|_| BenchError::Config(format!("--moments: {spec:?} is neither a distribution nor a list of numbers")))?;
    if values.len() < order {
        return Err(BenchError::Config(format!(
            "--moments: need {order} moments, got {}",
            values.len()
        )));
    }
    Ok(MomentVector::new(values)?)
}

/// The smallest multiplier that makes every coefficient an integer, if one is small.
fn integer_scale(polys: &[&Polynomial]) -> Option<u32> {
    (1..=MAX_INTEGER_SCALE).find(|&c| {
        polys.iter().all(|p| {
            p.coeffs().iter().all(|a| {
                let x = a * c as f64;
                (x - x.round()).abs() <= 1e-11 * x.abs().max(1.0)
            })
        })
    })
}

fn pmmse_rational(n: usize, moments: &str, out: &mut dyn Write) -> Result<i32> {
    if n == 0 {
        return Err(BenchError::Config("--n must be positive".into()));
    }
    let mv = parse_moments(moments, 2 * n)?;
    let r = channel_rational(&mv, n)?;
    writeln!(out, "pmmse_{n}(X, t) = numerator / denominator, d_n = {}", r.d_n)?;
    writeln!(out, "numerator: {}", r.num)?;
    writeln!(out, "denominator: {}", r.den)?;
    if let Some(c) = integer_scale(&[&r.num, &r.den]) {
        let ints = |p: &Polynomial| -> Vec<i128> { p.coeffs().iter().map(|a| (a * c as f64).round() as i128).collect() };
        let show = |p: &[i128]| Polynomial::new(r.num.var(), p.iter().map(|&a| a as f64).collect());
        let (num, den) = (ints(&r.num), ints(&r.den));
        let exact = |p: &Polynomial, q: &[i128]| p.coeffs().iter().zip(q).all(|(a, &b)| *a == b as f64);
        if c > 1 || !exact(&r.num, &num) || !exact(&r.den, &den) {
            writeln!(out, "integer coefficients, scaled by {c}:")?;
            writeln!(out, "numerator: {}", show(&num))?;
            writeln!(out, "denominator: {}", show(&den))?;
        }
        if let Some((num, den)) = reduce_fraction(&num, &den).filter(|(n, _)| n.len() < num.len()) {
            writeln!(out, "after cancelling common factors:")?;
            writeln!(out, "numerator: {}", show(&num))?;
            writeln!(out, "denominator: {}", show(&den))?;
        }
    }
    Ok(EXIT_OK)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn trim(mut p: Vec<i128>) -> Vec<i128> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn content(p: &[i128]) -> i128 {
    p.iter().fold(0, |g, &a| gcd(g, a))
}

/// `p` divided by its content, with a positive leading coefficient.
fn primitive(p: Vec<i128>) -> Vec<i128> {
    let p = trim(p);
    let Some(&lead) = p.last() else { return p };
    let c = content(&p) * lead.signum();
    p.into_iter().map(|a| a / c).collect()
}

/// Primitive part of the pseudo-remainder of `a` by `b`; `None` on overflow.
fn pseudo_remainder(mut a: Vec<i128>, b: &[i128]) -> Option<Vec<i128>> {
    let lb = *b.last()?;
    while a.len() >= b.len() {
        let la = *a.last()?;
        let shift = a.len() - b.len();
        for v in a.iter_mut() {
            *v = v.checked_mul(lb)?;
        }
        for (i, &bi) in b.iter().enumerate() {
            a[i + shift] = a[i + shift].checked_sub(la.checked_mul(bi)?)?;
        }
        a = primitive(a);
    }
    Some(a)
}

/// Quotient of exact division in `Z[x]`, or `None` if `d` does not divide `p`.
fn exact_quotient(p: &[i128], d: &[i128]) -> Option<Vec<i128>> {
    let ld = *d.last()?;
    let mut rem = p.to_vec();
    let mut q = vec![0; (p.len() + 1).checked_sub(d.len())?];
    for k in (0..q.len()).rev() {
        let top = rem[k + d.len() - 1];
        if top % ld != 0 {
            return None;
        }
        q[k] = top / ld;
        for (i, &di) in d.iter().enumerate() {
            rem[k + i] = rem[k + i].checked_sub(q[k].checked_mul(di)?)?;
        }
    }
    rem.iter().all(|&v| v == 0).then_some(q)
}

/// `num / den` in lowest terms, with coefficients of joint content one and a positive constant term.
fn reduce_fraction(num: &[i128], den: &[i128]) -> Option<(Vec<i128>, Vec<i128>)> {
    let (mut a, mut b) = (primitive(num.to_vec()), primitive(den.to_vec()));
    if a.is_empty() || b.is_empty() {
        return None;
    }
    while !b.is_empty() {
        let r = pseudo_remainder(a, &b)?;
        a = b;
        b = r;
    }
    let (mut n, mut d) = (exact_quotient(num, &a)?, exact_quotient(den, &a)?);
    let c = gcd(content(&n), content(&d)) * d[0].signum();
    if c == 0 {
        return None;
    }
    n.iter_mut().chain(d.iter_mut()).for_each(|v| *v /= c);
    Some((n, d))
}

fn experiment(args: &ExperimentArgs, quad: &QuadConfig, out: &mut dyn Write) -> Result<i32> {
    let spec = DistributionSpec::standard(args.distribution.parse::<Kind>().map_err(|e| BenchError::Config(e.to_string()))?);
    if let Some(d) = args.dim {
        if d != spec.dim() {
            return Err(BenchError::Config(format!("{} has dimension {}, not {d}", spec.kind(), spec.dim())));
        }
    }
    let mut cfg = ExperimentConfig::new(spec);
    let n = args.n.unwrap_or(cfg.estimator.degree());
    cfg.estimator = match args.estimator {
        None => match cfg.estimator {
            Estimator::HHat { .. } => Estimator::HHat { n },
            Estimator::HHatMultivariate { .. } => Estimator::HHatMultivariate { n },
            Estimator::IHat { .. } => Estimator::IHat { n },
        },
        Some(EstimatorKind::HHat) => Estimator::HHat { n },
        Some(EstimatorKind::HHatMultivariate) => Estimator::HHatMultivariate { n },
        Some(EstimatorKind::IHat) => Estimator::IHat { n },
    };
    cfg.sample_sizes = args.sizes.clone();
    cfg.trials = args.trials;
    cfg.seed = args.seed;
    cfg.scale = args.scale;
    cfg.bootstrap_resamples = args.resamples;
    cfg.quad = *quad;
    let mut report = run_experiment(&cfg)?;
    if let Some(path) = &args.baseline_csv {
        report.merge_baseline(open(path)?, cfg.bootstrap_resamples, cfg.seed)?;
    }
    match &args.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| BenchError::Config(format!("cannot create {}: {e}", path.display())))?;
            report.write_csv(BufWriter::new(file))?;
            for b in &report.blocks {
                for s in &b.summaries {
                    let (mean, low, high) = s.interval.map(|i| (i.mean, i.low, i.high)).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                    writeln!(
                        out,
                        "{} m={}: mean {} = {mean:.6} [{low:.6}, {high:.6}], failed {}/{}",
                        b.estimator,
                        s.sample_size,
                        report.metric.name(),
                        s.failed,
                        s.trials
                    )?;
                }
            }
        }
        None => report.write_csv(&mut *out)?,
    }
    Ok(EXIT_OK)
}

fn selftest(ids: &[u8], out: &mut dyn Write) -> Result<i32> {
    let selected: Vec<_> = if ids.is_empty() {
        acceptance::CRITERIA.iter().collect()
    } else {
        ids.iter()
            .map(|&id| acceptance::criterion(id).ok_or_else(|| BenchError::Config(format!("no criterion {id}"))))
            .collect::<Result<_>>()?
    };
    let mut passed = 0;
    for c in &selected {
        let o = c.run();
        writeln!(out, "{o}")?;
        passed += usize::from(o.passed);
    }
    writeln!(out, "{passed}/{} criteria passed", selected.len())?;
    Ok(if passed == selected.len() { EXIT_OK } else { EXIT_NUMERICAL })
}
