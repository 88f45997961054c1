//! Small combinatorial helpers shared by the moment code.

/// Binomial coefficient as a float. Exact for n <= 50.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Binomial coefficient in exact integer arithmetic.
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn factorial_u128(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// Natural log of the Barnes G value G(n+2) = 1!·2!···n!.
pub fn ln_barnes_g(n: usize) -> f64 {
    let mut acc = 0.0;
    let mut ln_fact = 0.0;
    for k in 1..=n {
        ln_fact += (k as f64).ln();
        acc += ln_fact;
    }
    acc
}

/// G(n+2) = 1!·2!···n! as a float.
pub fn barnes_g(n: usize) -> f64 {
    let mut acc = 1.0;
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
        acc *= fact;
    }
    acc
}

/// Pairwise summation: deterministic and with O(log n) error growth.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
