use std::process::{Command, Output};

fn gapprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapprob"))
        .args(args)
        .env_remove("GAPPROB_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn finite_lue_two_by_two() {
    let rows = csv_rows(&gapprob(&["finite", "--ensemble", "lue", "--alpha", "0", "--n", "2", "--t", "0.5,0"]));
    assert_eq!(rows[0][1], "-1");
    assert_eq!(rows[1][1], "0");
}

#[test]
fn finite_range_tokens_expand_in_order() {
    let rows = csv_rows(&gapprob(&["finite", "--ensemble", "gue", "--n", "3", "--a", "0:0.4:5"]));
    let a: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    assert_eq!(a, vec![0.0, 0.1, 0.2, 0.30000000000000004, 0.4]);
    let lp: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert!(lp.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn asympt_leading_terms() {
    let rows = csv_rows(&gapprob(&["asympt", "--kind", "lue", "--alpha", "0", "--s", "40"]));
    assert_eq!(num(&rows[0][1]), -10.0);
}

#[test]
fn json_output_and_precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gapprob"))
        .args(["--format", "json", "finite", "--ensemble", "lue", "--n", "2", "--t", "0.5"])
        .env("GAPPROB_PRECISION_BITS", "64")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = v[0]["p"].as_str().unwrap();
    assert!(p.starts_with("3.6787944117144232") && p.ends_with("e-1"), "{p}");
}

#[test]
fn fredholm_small_sine_gap() {
    let b = 1e-4;
    let rows = csv_rows(&gapprob(&["fredholm", "--kernel", "sine", "--b", "1e-4"]));
    let last = rows.last().unwrap();
    assert_eq!(last[4], "true");
    let want = (1.0 - 2.0 * b / std::f64::consts::PI).ln();
    assert!((num(&last[2]) - want).abs() < 1e-12);
}

#[test]
fn fredholm_bessel_at_zero_and_product_check() {
    let rows = csv_rows(&gapprob(&["fredholm", "--kernel", "bessel", "--alpha", "0", "--s", "0"]));
    assert_eq!(rows[0][2], "0");
    let rows = csv_rows(&gapprob(&["fredholm", "--kernel", "sine", "--b", "0.7", "--check-product"]));
    assert!(num(&rows.last().unwrap()[7]) < 1e-10);
}

#[test]
fn residual_sources() {
    let rows = csv_rows(&gapprob(&["residual", "--eq", "jmms", "--source", "series", "--tau", "0"]));
    assert_eq!(num(&rows[0][3]), 0.0);
    let rows = csv_rows(&gapprob(&["residual", "--eq", "pv_sigma", "--source", "finite", "--n", "3", "--alpha", "0.5", "--t", "1"]));
    assert!(num(&rows[0][5]) < 1e-25);
    let rows = csv_rows(&gapprob(&["residual", "--eq", "piii_sigma", "--source", "fredholm", "--alpha", "1", "--s", "2"]));
    assert!(num(&rows[0][5]) < 1e-12);
}

#[test]
fn exit_codes() {
    // domain errors
    assert_eq!(gapprob(&["finite", "--ensemble", "lue", "--alpha", "-2", "--n", "2", "--t", "1"]).status.code(), Some(2));
    assert_eq!(gapprob(&["residual", "--eq", "r_ode", "--source", "finite", "--s", "1"]).status.code(), Some(2));
    assert_eq!(gapprob(&["residual", "--eq", "nope", "--source", "series"]).status.code(), Some(2));
    // an unreachable tolerance is a convergence failure, with the trace still printed
    let out = gapprob(&["fredholm", "--kernel", "sine", "--b", "3", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).lines().count() > 2);
}

#[test]
fn verify_identities_passes() {
    let out = gapprob(&["verify", "--suite", "identities"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 22);
    assert!(rows.iter().all(|r| r[4] == "PASS"));
}
