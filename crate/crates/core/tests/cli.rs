use std::process::{Command, Output};

use serde_json::Value;

fn gefp_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gefp-lab"))
        .args(args)
        .env_remove("GEFP_LAB_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is json");
    assert_eq!(v["schema"], "gefp-lab/1");
    v
}

fn first(out: &Output) -> Value {
    json(out)["results"][0].clone()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn residue_agrees_with_oracle_through_cli() {
    let base = ["gefp", "--N", "3", "--r", "2,3", "--delta", "1/2", "--t", "1", "--backend", "exact"];
    let residue = gefp_lab(&[&base[..], &["--engine", "residue"]].concat());
    let oracle = gefp_lab(&[&base[..], &["--engine", "oracle"]].concat());
    assert!(residue.status.success(), "{}", stderr(&residue));
    let (r, o) = (first(&residue), first(&oracle));
    assert_eq!(r["engine"], "residue");
    assert_eq!(r["backend"], "exact");
    assert_eq!(r["r"], serde_json::json!([2, 3]));
    assert_eq!(r["value"], o["value"]);
    assert!(r["value"].as_str().unwrap().contains('/'));
}

#[test]
fn vanishing_profile_prints_zero_over_one() {
    let out = gefp_lab(&["gefp", "--N", "2", "--r", "1,1", "--delta", "1/2", "--t", "1"]);
    assert!(out.status.success());
    assert_eq!(first(&out)["value"], "0/1");
}

#[test]
fn single_site_partition_is_c() {
    let out = gefp_lab(&[
        "partition", "--N", "1", "--lambda", "1.5707963", "--eta", "0.5235987", "--engine", "ik-hom",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rec = first(&out);
    let v: f64 = rec["value"].as_str().unwrap().parse().unwrap();
    assert!((v - 3f64.sqrt() / 2.0).abs() < 1e-6);
    assert_eq!(rec["precision"], 128);
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gefp-lab"))
        .args(["partition", "--N", "2", "--lambda", "1.2", "--eta", "0.4"])
        .env("GEFP_LAB_PRECISION", "256")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(first(&out)["precision"], 256);
}

#[test]
fn invalid_profile_exits_two_and_quotes_the_rule() {
    let out = gefp_lab(&["gefp", "--N", "3", "--r", "3,1", "--delta", "1/2", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("r must be weakly increasing, r_1 <= r_2 <= ... <= r_s"));
    assert!(out.stdout.is_empty());
}

#[test]
fn engine_backend_mismatch_exits_two() {
    let out = gefp_lab(&[
        "gefp", "--N", "3", "--r", "2,3", "--delta", "1/2", "--t", "1", "--engine", "jets", "--backend", "exact",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("float backend"));
    let out = gefp_lab(&["gefp", "--N", "2", "--r", "2", "--lambda", "1.2", "--eta", "0.4", "--backend", "exact"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_error_exits_three_with_its_name() {
    let out = gefp_lab(&[
        "gefp", "--r", "1,2", "--lambdas", "0.5,0.5", "--nus", "0,0.3", "--eta", "0.3", "--engine", "recurrence",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("DuplicateRapidity"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["table", "--N", "1,2,3", "--delta", "1/2,0", "--t", "1,2/3", "--format", "csv"];
    let a = gefp_lab(&args);
    let b = gefp_lab(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    // 2 * 2 points times 1 + (2 + 3) + (3 + 6 + 10) profiles, plus the header
    assert_eq!(text.lines().count(), 1 + 4 * 25);
    // sorted by N first
    let ns: Vec<usize> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert!(ns.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn timing_is_opt_in() {
    let plain = gefp_lab(&["efp", "--N", "3", "--s", "2", "--r", "3", "--delta", "0", "--t", "1"]);
    assert!(json(&plain).get("wall_time_s").is_none());
    let timed = gefp_lab(&["efp", "--N", "3", "--s", "2", "--r", "3", "--delta", "0", "--t", "1", "--timing"]);
    assert!(json(&timed)["wall_time_s"].is_number());
    assert_eq!(first(&timed)["quantity"], "efp");
}

#[test]
fn hfun_and_cutdomain() {
    let out = gefp_lab(&["hfun", "--N", "3", "--delta", "1/2", "--t", "1"]);
    let values: Vec<String> = json(&out)["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(values, ["2/7", "3/7", "2/7"]);
    let out = gefp_lab(&["cutdomain", "--N", "2", "--r", "2", "--delta", "1/2", "--t", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    // nothing removed: Z_2 = 2 at the ice point
    assert_eq!(first(&out)["value"], "2/1");
}

#[test]
fn verify_quick_passes() {
    let out = gefp_lab(&["verify", "--level", "quick", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS] criterion")).count(), 9);
}
