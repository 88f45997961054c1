use std::collections::BTreeMap;

use moment_info::condexp::{stirling2, MAX_DERIVATIVE_ORDER};
use moment_info::{
    c_lambda, c_r_by_partitions, c_r_closed_form, cond_exp_and_central_moments,
    cond_exp_derivative, enumerate_partitions, DiscreteInput, Error, PartitionMultiplicity,
};
use proptest::prelude::*;

/// Block-size multiplicities of every set partition of `r` labelled items into
/// blocks of size at least 2, with each partition weighted by `(blocks - 1)!`.
fn set_partition_census(r: usize) -> BTreeMap<Vec<u32>, u128> {
    let mut out = BTreeMap::new();
    let mut assign = vec![0usize; r];
    fn rec(i: usize, used: usize, assign: &mut [usize], out: &mut BTreeMap<Vec<u32>, u128>) {
        let r = assign.len();
        if i == r {
            let mut sizes = vec![0usize; used];
            for &b in assign.iter() {
                sizes[b] += 1;
            }
            if sizes.iter().any(|&s| s < 2) {
                return;
            }
            let mut lambda = vec![0u32; r - 1];
            for s in sizes {
                lambda[s - 2] += 1;
            }
            while lambda.last() == Some(&0) {
                lambda.pop();
            }
            let cyc: u128 = (1..used as u128).product();
            *out.entry(lambda).or_insert(0) += cyc;
            return;
        }
        for b in 0..=used {
            assign[i] = b;
            rec(i + 1, used.max(b + 1), assign, out);
        }
    }
    rec(0, 0, &mut assign, &mut out);
    out
}

#[test]
fn coefficients_match_set_partition_census() {
    for r in 2..=10 {
        let census = set_partition_census(r);
        let parts = enumerate_partitions(r).unwrap();
        assert_eq!(parts.len(), census.len(), "r={r}");
        for p in &parts {
            assert_eq!(p.r, r);
            assert_eq!(Some(&c_lambda(p)), census.get(&p.lambda), "r={r} {:?}", p.lambda);
        }
        let total: u128 = census.values().sum();
        assert_eq!(c_r_by_partitions(r).unwrap(), total);
        assert_eq!(c_r_closed_form(r).unwrap(), total);
    }
}

#[test]
fn two_routes_agree_up_to_cap() {
    for r in 2..=20 {
        assert_eq!(c_r_by_partitions(r).unwrap(), c_r_closed_form(r).unwrap(), "r={r}");
    }
    assert!(matches!(c_r_closed_form(21), Err(Error::CapExceeded { .. })));
    assert!(matches!(enumerate_partitions(21), Err(Error::CapExceeded { .. })));
}

#[test]
fn stirling_row_sums_are_bell_numbers() {
    let bell = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
    for (n, b) in bell.iter().enumerate() {
        assert_eq!((0..=n).map(|k| stirling2(n, k)).sum::<u128>(), *b);
    }
}

#[test]
fn signs_alternate_with_block_count() {
    for r in 2..=10 {
        for p in enumerate_partitions(r).unwrap() {
            let s = p.signed_coefficient();
            assert_eq!(s.signum(), if p.parts % 2 == 1 { 1 } else { -1 });
            assert_eq!(s.unsigned_abs(), c_lambda(&p));
        }
    }
}

/// Coefficients of `P_k` with `tanh^{(k-1)} = P_k(tanh)`, from `P_{k+1} = P_k' (1 - T^2)`.
fn tanh_derivative_poly(k: usize) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for _ in 1..k {
        let dp: Vec<f64> = (1..p.len()).map(|i| i as f64 * p[i]).collect();
        let mut next = vec![0.0; dp.len() + 2];
        for (i, c) in dp.iter().enumerate() {
            next[i] += c;
            next[i + 2] -= c;
        }
        p = next;
    }
    p
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[test]
fn rademacher_matches_tanh_derivatives() {
    let input = DiscreteInput::rademacher();
    for &y in &[-2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 3.0] {
        let t = f64::tanh(y);
        assert!((cond_exp_and_central_moments(&input, y, 2).f - t).abs() < 1e-15);
        for r in 2..=MAX_DERIVATIVE_ORDER {
            let exact = horner(&tanh_derivative_poly(r), t);
            let got = cond_exp_derivative(&input, y, r).unwrap();
            assert!((got - exact).abs() < 1e-10 * exact.abs().max(1.0), "y={y} r={r}: {got} vs {exact}");
        }
    }
}

fn derivative_of_order(input: &DiscreteInput, y: f64, k: usize) -> f64 {
    if k == 0 {
        cond_exp_and_central_moments(input, y, 0).f
    } else {
        cond_exp_derivative(input, y, k + 1).unwrap()
    }
}

/// Fourth-order central difference, taking the best agreement over a step sweep.
fn fd_error(g: impl Fn(f64) -> f64, y: f64, target: f64) -> f64 {
    [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
        .iter()
        .map(|&h| {
            let d = (-g(y + 2.0 * h) + 8.0 * g(y + h) - 8.0 * g(y - h) + g(y - 2.0 * h)) / (12.0 * h);
            (d - target).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn derivatives_match_finite_differences() {
    let inputs = [
        DiscreteInput::rademacher(),
        DiscreteInput::new(vec![-1.0, 0.5, 2.0], vec![0.2, 0.5, 0.3]).unwrap(),
    ];
    for input in &inputs {
        for &y in &[-2.0, -1.0, 0.0, 1.0, 3.0] {
            for r in 2..=6 {
                let target = cond_exp_derivative(input, y, r).unwrap();
                let err = fd_error(|z| derivative_of_order(input, z, r - 2), y, target);
                assert!(err < 1e-5, "y={y} r={r}: {err}");
            }
        }
    }
}

#[test]
fn central_moments_obey_recurrence() {
    let input = DiscreteInput::new(vec![-2.0, 0.0, 1.0, 1.5], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
    for &y in &[-1.5, 0.0, 0.7, 2.5] {
        let cm = cond_exp_and_central_moments(&input, y, 8);
        for r in 2..=6 {
            let target = cm.g[r + 1] - r as f64 * cm.g[2] * cm.g[r - 1];
            let err = fd_error(|z| cond_exp_and_central_moments(&input, z, r).g[r], y, target);
            assert!(err < 1e-7, "y={y} r={r}: {err}");
        }
    }
}

#[test]
fn stable_far_in_the_tails() {
    let input = DiscreteInput::new(vec![-3.0, 0.0, 4.0], vec![0.3, 0.3, 0.4]).unwrap();
    for &y in &[-80.0, 80.0] {
        let cm = cond_exp_and_central_moments(&input, y, 4);
        assert!(cm.f.is_finite() && cm.g.iter().all(|g| g.is_finite()));
        assert!((cm.f - if y < 0.0 { -3.0 } else { 4.0 }).abs() < 1e-12);
    }
}

#[test]
fn rejects_out_of_range_orders() {
    let input = DiscreteInput::rademacher();
    assert!(cond_exp_derivative(&input, 0.0, 1).is_err());
    assert!(cond_exp_derivative(&input, 0.0, MAX_DERIVATIVE_ORDER + 1).is_err());
    assert!(PartitionMultiplicity::new(vec![0, 0]).is_err());
}

fn input_strategy() -> impl Strategy<Value = DiscreteInput> {
    (
        prop::collection::btree_set(-20i32..20, 2..=5),
        prop::collection::vec(0.05f64..1.0, 5),
    )
        .prop_map(|(grid, raw)| {
            let atoms: Vec<f64> = grid.iter().map(|&g| g as f64 * 0.25).collect();
            let total: f64 = raw[..atoms.len()].iter().sum();
            let probs = raw[..atoms.len()].iter().map(|p| p / total).collect();
            DiscreteInput::new(atoms, probs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_derivative_is_conditional_variance(input in input_strategy(), y in -5.0f64..5.0) {
        let cm = cond_exp_and_central_moments(&input, y, 2);
        let d = cond_exp_derivative(&input, y, 2).unwrap();
        prop_assert_eq!(d, cm.g[2]);
        prop_assert!(d >= 0.0);
        prop_assert!(cm.g[1].abs() < 1e-12);
    }

    #[test]
    fn conditional_mean_is_nondecreasing(input in input_strategy(), y in -5.0f64..5.0, dy in 0.0f64..1.0) {
        let a = cond_exp_and_central_moments(&input, y, 0).f;
        let b = cond_exp_and_central_moments(&input, y + dy, 0).f;
        prop_assert!(b >= a - 1e-12);
        let lo = input.atoms().iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = input.atoms().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(a >= lo - 1e-12 && a <= hi + 1e-12);
    }
}
