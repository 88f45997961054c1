//! Conditional expectation `f(y) = E[X | X + N = y]` for a finitely supported
//! `X` and standard normal `N`, its derivatives through conditional central
//! moments, and the partition coefficients that appear in them.

use crate::combin::factorial_u128;
use crate::error::{Error, Result};

/// Largest derivative order `r` accepted by [`cond_exp_derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 8;

/// Largest `r` for which partition coefficients fit comfortably in 128 bits.
pub const MAX_PARTITION_ORDER: usize = 20;

const PROB_TOLERANCE: f64 = 1e-12;

/// A partition of `r` into parts of size at least 2, stored by multiplicity:
/// `lambda[i]` counts parts of size `i + 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionMultiplicity {
    pub lambda: Vec<u32>,
    pub r: usize,
    pub parts: usize,
}

impl PartitionMultiplicity {
    /// Builds from multiplicities of sizes 2, 3, ...; trailing zeros are dropped.
    pub fn new(mut lambda: Vec<u32>) -> Result<Self> {
        while lambda.last() == Some(&0) {
            lambda.pop();
        }
        if lambda.is_empty() {
            return Err(Error::InvalidArgument("empty partition".into()));
        }
        let r = lambda.iter().enumerate().map(|(i, &l)| (i + 2) * l as usize).sum();
        let parts = lambda.iter().map(|&l| l as usize).sum();
        Ok(Self { lambda, r, parts })
    }

    /// `(-1)^{parts - 1} c_lambda`.
    pub fn signed_coefficient(&self) -> i128 {
        let c = c_lambda(self) as i128;
        if self.parts % 2 == 1 {
            c
        } else {
            -c
        }
    }
}

/// All partitions of `r` into parts of size at least 2.
pub fn enumerate_partitions(r: usize) -> Result<Vec<PartitionMultiplicity>> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")));
    }
    if r > MAX_PARTITION_ORDER {
        return Err(Error::CapExceeded {
            what: "partition order",
            size: r,
            cap: MAX_PARTITION_ORDER,
        });
    }
    let mut out = Vec::new();
    let mut counts = vec![0u32; r - 1];
    fill_partitions(r, r, &mut counts, &mut out);
    Ok(out)
}

fn fill_partitions(rest: usize, max_part: usize, counts: &mut Vec<u32>, out: &mut Vec<PartitionMultiplicity>) {
    if rest == 0 {
        out.push(PartitionMultiplicity::new(counts.clone()).expect("nonempty"));
        return;
    }
    for part in (2..=max_part.min(rest)).rev() {
        counts[part - 2] += 1;
        fill_partitions(rest - part, part, counts, out);
        counts[part - 2] -= 1;
    }
}

/// `c_lambda = (1/m) multinomial(m; lambda) r! / prod_i (i!)^{lambda_i}`, the
/// number of ways to arrange `r` labelled items into the blocks of `lambda`
/// placed on a cycle.
pub fn c_lambda(p: &PartitionMultiplicity) -> u128 {
    let m = p.parts as u64;
    let mut multinomial = factorial_u128(m);
    for &l in &p.lambda {
        multinomial /= factorial_u128(l as u64);
    }
    let mut blocks = factorial_u128(p.r as u64);
    for (i, &l) in p.lambda.iter().enumerate() {
        let f = factorial_u128(i as u64 + 2);
        for _ in 0..l {
            blocks /= f;
        }
    }
    multinomial * blocks / m as u128
}

/// `C_r = sum_{lambda in Pi_r} c_lambda`.
pub fn c_r_by_partitions(r: usize) -> Result<u128> {
    Ok(enumerate_partitions(r)?.iter().map(c_lambda).sum())
}

/// Stirling numbers of the second kind `S(n, k)`, with `S(0, 0) = 1`.
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

/// `C_r = sum_{k=1}^r (k-1)! sum_{j=0}^k (-1)^j C(r, j) S(r-j, k-j)`.
pub fn c_r_closed_form(r: usize) -> Result<u128> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r must be at least 2, got {r}")));
    }
    if r > MAX_PARTITION_ORDER {
        return Err(Error::CapExceeded {
            what: "partition order",
            size: r,
            cap: MAX_PARTITION_ORDER,
        });
    }
    let mut total: i128 = 0;
    for k in 1..=r {
        let mut inner: i128 = 0;
        for j in 0..=k.min(r) {
            let term = crate::combin::binomial_u128(r as u64, j as u64) as i128
                * stirling2(r - j, k - j) as i128;
            inner += if j % 2 == 0 { term } else { -term };
        }
        total += factorial_u128(k as u64 - 1) as i128 * inner;
    }
    u128::try_from(total).map_err(|_| Error::InternalConsistency(format!("negative C_{r}")))
}

/// A finitely supported distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteInput {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscreteInput {
    pub fn new(atoms: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::InvalidArgument(
                "atoms and probabilities must be nonempty and of equal length".into(),
            ));
        }
        if atoms.iter().any(|a| !a.is_finite()) || probs.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::InvalidArgument(
                "atoms must be finite and probabilities positive".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        let mut sorted = atoms.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("atoms must be distinct".into()));
        }
        Ok(Self { atoms, probs })
    }

    /// Uniform on `{-1, 1}`.
    pub fn rademacher() -> Self {
        Self::new(vec![-1.0, 1.0], vec![0.5, 0.5]).expect("valid")
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `f(y) = E[X | Y = y]` and `g_k(y) = E[(X - f(y))^k | Y = y]` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalMoments {
    pub f: f64,
    pub g: Vec<f64>,
}

pub fn cond_exp_and_central_moments(input: &DiscreteInput, y: f64, k_max: usize) -> ConditionalMoments {
    let logs: Vec<f64> = input
        .atoms
        .iter()
        .zip(&input.probs)
        .map(|(x, p)| p.ln() - 0.5 * (x - y) * (x - y))
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let f: f64 = w.iter().zip(&input.atoms).map(|(w, x)| w * x).sum();
    let mut g = vec![0.0; k_max + 1];
    for (wi, x) in w.iter().zip(&input.atoms) {
        let d = x - f;
        let mut p = *wi;
        for gk in g.iter_mut() {
            *gk += p;
            p *= d;
        }
    }
    g[0] = 1.0;
    ConditionalMoments { f, g }
}

/// `f^{(r-1)}(y) = sum_{lambda in Pi_r} (-1)^{parts-1} c_lambda prod_i g_i(y)^{lambda_i}`.
pub fn cond_exp_derivative(input: &DiscreteInput, y: f64, r: usize) -> Result<f64> {
    if !(2..=MAX_DERIVATIVE_ORDER).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "derivative order r must lie in 2..={MAX_DERIVATIVE_ORDER}, got {r}"
        )));
    }
    let cm = cond_exp_and_central_moments(input, y, r);
    let mut total = 0.0;
    for p in enumerate_partitions(r)? {
        let mut term = p.signed_coefficient() as f64;
        for (i, &l) in p.lambda.iter().enumerate() {
            term *= cm.g[i + 2].powi(l as i32);
        }
        total += term;
    }
    Ok(total)
}
