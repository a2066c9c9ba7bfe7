//! End-to-end tests of the `swistab` binary: exit codes, JSON reports,
//! CSV export and report determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn swistab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swistab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json_result(out: &Output) -> Value {
    let report: Value = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    report["result"].clone()
}

#[test]
fn verify_exit_codes() {
    let ok = swistab(&["verify", &fixture("marginal_shear_pair.json")]);
    assert_eq!(
        code(&ok),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&ok.stderr)
    );

    let bad = swistab(&["verify", &fixture("expansion.json")]);
    assert_eq!(code(&bad), 1);

    let malformed = swistab(&["verify", &fixture("malformed.json")]);
    assert_eq!(code(&malformed), 64);

    let missing = swistab(&["verify", "no-such-file.json"]);
    assert_eq!(code(&missing), 64);

    let usage = swistab(&["verify"]);
    assert_eq!(code(&usage), 64);
}

#[test]
fn verify_reports_margins_and_norms() {
    let out = swistab(&["verify", &fixture("marginal_shear_pair.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["valid"], Value::Bool(true));
    let norms = result["p_norms"].as_array().unwrap();
    for n in norms {
        assert!((n.as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn decide_stable_pair_exits_zero() {
    let out = swistab(&["decide", &fixture("stable_pair.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["status"], "ABSOLUTELY_STABLE");
}

#[test]
fn decide_marginal_pair_exits_one_with_witness() {
    let out = swistab(&["decide", &fixture("marginal_shear_pair.json"), "--json"]);
    assert_eq!(code(&out), 1);
    let result = json_result(&out);
    assert_eq!(result["status"], "NOT_ABSOLUTELY_STABLE");
    assert_eq!(result["witness"], "1 2");
    assert!((result["witness_value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn decide_near_boundary_is_undetermined() {
    let out = swistab(&[
        "decide",
        &fixture("marginal_shear_pair_shrunk.json"),
        "--json",
    ]);
    assert_eq!(code(&out), 2);
    let result = json_result(&out);
    assert_eq!(result["status"], "UNDETERMINED");
}

#[test]
fn decide_rejects_unsupported_shapes() {
    // K = 3: outside the proved decision procedures
    let out = swistab(&["decide", &fixture("rotation_block_triple.json")]);
    assert_eq!(code(&out), 64);

    // d = 4: points the user at the word-scan probe
    let dir = std::env::temp_dir().join(format!("swistab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d4.json");
    std::fs::write(
        &path,
        r#"{"d":4,"K":2,"matrices":[
            [[0.9,0,0,0],[0,0.9,0,0],[0,0,0.9,0],[0,0,0,0.9]],
            [[0.5,0,0,0],[0,0.5,0,0],[0,0,0.5,0],[0,0,0,0.5]]]}"#,
    )
    .unwrap();
    let out = swistab(&["decide", path.to_str().unwrap()]);
    assert_eq!(code(&out), 64);
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("gsr"), "hint missing from: {msg}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn ksub_reports_match_geometry() {
    let out = swistab(&["ksub", &fixture("axis_isometry_pair.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["iv1_holds"], Value::Bool(true));
    assert_eq!(result["invariant_flags"][0], Value::Bool(true));
    assert_eq!(result["invariant_flags"][1], Value::Bool(true));

    let out = swistab(&["ksub", &fixture("tilted_shear_pair.json"), "--json"]);
    let result = json_result(&out);
    assert_eq!(result["iv1_holds"], Value::Bool(true));
    assert_eq!(result["invariant_flags"][0], Value::Bool(false));
    assert_eq!(result["exception_words"][0], "1 2");

    // K = 3: per-matrix data and pairwise intersections, no IV.1 flag
    let out = swistab(&["ksub", &fixture("rotation_block_triple.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["iv1_holds"], Value::Null);
    let dims: Vec<u64> = result["per_matrix"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["k_set"]["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(dims, vec![2, 1, 1]);
}

#[test]
fn simulate_writes_csv_profile() {
    let dir = std::env::temp_dir().join(format!("swistab-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("profile.csv");
    let out = swistab(&[
        "simulate",
        &fixture("marginal_shear_pair.json"),
        "--signal",
        "periodic:1,2",
        "--horizon",
        "100",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,norm"));
    let first = lines.next().unwrap();
    let (idx, val) = first.split_once(',').unwrap();
    assert_eq!(idx, "1");
    assert!((val.parse::<f64>().unwrap() - 1.0).abs() < 1e-8);
    // 17 significant digits: one leading digit plus 16 after the point
    let mantissa = val.split('e').next().unwrap();
    let digits: usize = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
    assert_eq!(digits, 17, "unexpected rendering {val}");
    assert_eq!(text.lines().count(), 101);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn simulate_accepts_markov_and_constantrun_specs() {
    let markov_spec = format!("markov:{}", fixture("markov_uniform.json"));
    let out = swistab(&[
        "simulate",
        &fixture("stable_pair.json"),
        "--signal",
        &markov_spec,
        "--horizon",
        "500",
        "--seed",
        "3",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert!(result["final_norm"].as_f64().unwrap() < 1e-6);

    let out = swistab(&[
        "simulate",
        &fixture("tilted_shear_pair.json"),
        "--signal",
        "constantrun:1",
        "--horizon",
        "900",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn simulate_rejects_bad_signal_specs() {
    for spec in ["periodic:1,7", "bernoulli:0.9,0.2", "wavelet:1", "periodic"] {
        let out = swistab(&["simulate", &fixture("stable_pair.json"), "--signal", spec]);
        assert_eq!(code(&out), 64, "spec {spec} should be a usage error");
    }
}

#[test]
fn omega_converges_and_reports_limit_data() {
    let out = swistab(&[
        "omega",
        &fixture("rotation_block_triple.json"),
        "--signal",
        "periodic:2",
        "--horizon",
        "150",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert!((result["r_exterior"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(result["r_interior"].as_f64().unwrap() < 1e-9);
    assert_eq!(result["q"][2][2].as_f64().unwrap(), 1.0);
    assert_eq!(result["stable_manifold"]["dim"], 2);
    assert_eq!(result["probe_mode"], "Product");

    // rotation block: products cycle, Gram probes settle
    let out = swistab(&[
        "omega",
        &fixture("rotation_block_triple.json"),
        "--signal",
        "periodic:1",
        "--horizon",
        "200",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["probe_mode"], "Gram");
}

#[test]
fn omega_short_horizon_exits_not_converged() {
    let out = swistab(&[
        "omega",
        &fixture("marginal_shear_pair.json"),
        "--signal",
        "periodic:1,2",
        "--horizon",
        "3",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn montecarlo_fraction_and_determinism() {
    let run = || {
        swistab(&[
            "montecarlo",
            &fixture("marginal_shear_pair.json"),
            "--signal",
            "bernoulli:0.5,0.5",
            "--trials",
            "50",
            "--horizon",
            "2000",
            "--seed",
            "11",
            "--json",
        ])
    };
    let a = run();
    assert_eq!(code(&a), 0);
    let report_a: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report_a["result"]["fraction"].as_f64().unwrap(), 1.0);
    assert_eq!(report_a["result"]["measure_atomic"], Value::Bool(false));
    assert_eq!(report_a["rng"], "chacha8");

    let b = run();
    let report_b: Value = serde_json::from_slice(&b.stdout).unwrap();
    // byte-stable up to timing: the digests agree
    assert_eq!(report_a["report_digest"], report_b["report_digest"]);
    assert_eq!(report_a["result"], report_b["result"]);
}

#[test]
fn montecarlo_atomic_measure_on_marginal_pair_never_decays() {
    let out = swistab(&[
        "montecarlo",
        &fixture("marginal_shear_pair.json"),
        "--signal",
        "periodic:1,2",
        "--trials",
        "10",
        "--horizon",
        "2000",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    assert_eq!(result["fraction"].as_f64().unwrap(), 0.0);
    assert_eq!(result["measure_atomic"], Value::Bool(true));
}

#[test]
fn gsr_scan_and_budget() {
    let out = swistab(&[
        "gsr",
        &fixture("unit_shear_singleton.json"),
        "--nmax",
        "4",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let result = json_result(&out);
    let alpha = ((3.0 - 5.0f64.sqrt()) / 2.0).sqrt();
    assert!((result["lower_bound"].as_f64().unwrap() - alpha).abs() < 1e-9);
    assert_eq!(result["witness"], "1");

    let out = swistab(&[
        "gsr",
        &fixture("unit_shear_with_transpose.json"),
        "--nmax",
        "2",
        "--json",
    ]);
    let result = json_result(&out);
    assert!((result["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(result["witness"], "1 2");

    let out = swistab(&["gsr", &fixture("marginal_shear_pair.json"), "--nmax", "40"]);
    assert_eq!(code(&out), 65);
}

#[test]
fn tolerance_flags_override_file_defaults() {
    // an absurdly wide decision band pushes the stable pair (worst averaged
    // radius ≈ 0.786) into the undetermined zone
    let out = swistab(&[
        "decide",
        &fixture("stable_pair.json"),
        "--band",
        "0.5",
        "--json",
    ]);
    assert_eq!(code(&out), 2);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["status"], "UNDETERMINED");
    assert_eq!(report["tolerances"]["band"].as_f64().unwrap(), 0.5);
}

#[test]
fn reports_are_stable_for_fixed_inputs() {
    let run = || swistab(&["decide", &fixture("stable_pair.json"), "--json"]);
    let a: Value = serde_json::from_slice(&run().stdout).unwrap();
    let b: Value = serde_json::from_slice(&run().stdout).unwrap();
    assert_eq!(a["report_digest"], b["report_digest"]);
    assert_eq!(a["input_digest"], b["input_digest"]);
    // everything except timing is identical
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn thread_cap_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_swistab"))
        .args([
            "montecarlo",
            &fixture("marginal_shear_pair.json"),
            "--signal",
            "bernoulli:0.5,0.5",
            "--trials",
            "16",
            "--horizon",
            "200",
            "--json",
        ])
        .env("SWISTAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    // same analysis unrestricted: identical digest (schedule independence)
    let free = swistab(&[
        "montecarlo",
        &fixture("marginal_shear_pair.json"),
        "--signal",
        "bernoulli:0.5,0.5",
        "--trials",
        "16",
        "--horizon",
        "200",
        "--json",
    ]);
    let a: Value = serde_json::from_slice(&out.stdout).unwrap();
    let b: Value = serde_json::from_slice(&free.stdout).unwrap();
    assert_eq!(a["report_digest"], b["report_digest"]);
}
