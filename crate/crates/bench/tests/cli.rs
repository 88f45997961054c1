use std::io::Write;

use moment_info_bench::cli::{run, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use tempfile::NamedTempFile;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("moment-info").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn file_with(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn value_after(text: &str, prefix: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
    line[prefix.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn rademacher_rational_in_lowest_terms() {
    let (code, out, _) = invoke(&["pmmse-rational", "--n", "5", "--moments", "rademacher"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("numerator: 45 + 360*t + 675*t^2 + 300*t^3\n"), "{out}");
    assert!(out.contains("denominator: 45 + 405*t + 1035*t^2 + 1005*t^3 + 450*t^4 + 96*t^5 + 8*t^6\n"), "{out}");
}

#[test]
fn explicit_moment_list() {
    let (code, out, _) = invoke(&["pmmse-rational", "--n", "1", "--moments", "0,2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("numerator: 2\n"), "{out}");
    assert!(out.contains("denominator: 1 + 2*t\n"), "{out}");
}

#[test]
fn entropy_of_normal_draws() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let normal = Normal::new(3.0, 2.0).unwrap();
    let mut text = String::from("y\n");
    for _ in 0..4000 {
        text.push_str(&format!("{}\n", normal.sample(&mut rng)));
    }
    let f = file_with(&text);
    let (code, out, err) = invoke(&["entropy", "--n", "10", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let h = value_after(&out, "h_hat(10) = ");
    let exact = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * 4.0).ln();
    assert!((h - exact).abs() < 0.05, "{h} vs {exact}");
    assert!(out.contains("log-scale correction"));
}

#[test]
fn mutual_information_of_labeled_rows() {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let mut text = String::from("x,y\n");
    for i in 0..6000 {
        let label = i % 2;
        text.push_str(&format!("{label},{}\n", normal.sample(&mut rng) + 2.0 * label as f64));
    }
    let f = file_with(&text);
    let (code, out, err) = invoke(&["mi", "--input", f.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let i = value_after(&out, "i_hat(5) = ");
    assert!(i > 0.3 && i < 2f64.ln(), "{i}");
    assert!(out.contains("class 0: weight 0.5, count 3000"), "{out}");
}

#[test]
fn experiment_writes_csv_and_merges_baselines() {
    let out_file = NamedTempFile::new().unwrap();
    let baseline = file_with("estimator,sample_size,trial,estimate\nksg,200,0,0.5\n");
    let (code, out, err) = invoke(&[
        "experiment",
        "--distribution",
        "semicircle",
        "--sizes",
        "200",
        "--trials",
        "2",
        "--resamples",
        "50",
        "--output",
        out_file.path().to_str().unwrap(),
        "--baseline-csv",
        baseline.path().to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("h_hat(10) m=200"), "{out}");
    assert!(out.contains("ksg m=200"), "{out}");
    let csv = std::fs::read_to_string(out_file.path()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 + 1 + 1 + 1);
    assert!(csv.starts_with("estimator,distribution,sample_size,trial,estimate,"));
}

#[test]
fn experiment_to_stdout_is_deterministic() {
    let args = ["experiment", "--distribution", "gaussian", "--sizes", "100,200", "--trials", "3", "--seed", "9", "--resamples", "20"];
    let (c1, a, _) = invoke(&args);
    let (c2, b, _) = invoke(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 1 + 6 + 2);
}

#[test]
fn selftest_runs_selected_criteria() {
    let (code, out, _) = invoke(&["selftest", "--criterion", "1", "--criterion", "11"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("[PASS]  1 "), "{out}");
    assert!(out.ends_with("2/2 criteria passed\n"), "{out}");
}

#[test]
fn configuration_errors_exit_with_two() {
    let missing = "/nonexistent/samples.csv";
    let cases: Vec<Vec<&str>> = vec![
        vec!["entropy", "--input", missing],
        vec!["entropy"],
        vec!["frobnicate"],
        vec!["experiment", "--distribution", "cauchy"],
        vec!["experiment", "--distribution", "gaussian", "--trials", "0"],
        vec!["experiment", "--distribution", "gaussian", "--dim", "2"],
        vec!["pmmse-rational", "--n", "3", "--moments", "0,1"],
        vec!["pmmse-rational", "--n", "0", "--moments", "gaussian"],
        vec!["selftest", "--criterion", "14"],
        vec!["--rel-tol", "-1", "pmmse-rational", "--n", "1", "--moments", "0,1"],
    ];
    for args in cases {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_CONFIG, "{args:?}: {err}");
        assert!(!err.is_empty(), "{args:?}");
    }
}

#[test]
fn numerical_failures_exit_with_three() {
    let two_atoms = file_with("1\n-1\n1\n-1\n1\n-1\n1\n-1\n");
    let (code, _, err) = invoke(&["entropy", "--n", "3", "--input", two_atoms.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_NUMERICAL, "{err}");
    assert!(err.starts_with("error: "), "{err}");
}

#[test]
fn help_and_version_succeed() {
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("pmmse-rational"));
    assert_eq!(invoke(&["--version"]).0, EXIT_OK);
}
