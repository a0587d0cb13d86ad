use std::path::Path;
use std::process::Command;

use jumplab::theory::{self, PlateauParams};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Output {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("{e}\nstdout: {}\nstderr: {}", self.stdout, self.stderr))
    }
}

fn jumplab(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_jumplab"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_reports_every_field() {
    let out = jumplab(&[
        "predict", "--n", "50", "--k", "5", "--mu", "20", "--chi", "1", "--pc", "0.01", "--eps",
        "0.0125",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let report = &out.json()["report"];
    for field in [
        "p_ell",
        "beta",
        "gamma",
        "s0",
        "c1",
        "c2",
        "alpha",
        "delta",
        "alpha_over_delta",
        "alpha_over_delta_bound",
        "tau0",
        "lambda_c",
        "precondition_flags",
        "opt_hit_bounds",
        "jump_offset_success",
        "lower_bound_runtime",
    ] {
        assert!(
            report.get(field).is_some_and(|v| !v.is_null()),
            "missing {field}"
        );
    }
    let params = PlateauParams::new(50, 5, 20, 1.0, 0.01).unwrap();
    let s0 = theory::equilibrium_s0(&params, &theory::p_ell_table(&params)).unwrap();
    assert_eq!(report["s0"].as_f64().unwrap(), s0);
    assert_eq!(report["p_ell"].as_array().unwrap().len(), 6);
}

#[test]
fn specialized_preset_flags() {
    let out = jumplab(&[
        "predict",
        "--n",
        "50",
        "--k",
        "5",
        "--preset",
        "specialized",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    let eps = doc["preset"]["eps"].as_f64().unwrap();
    assert_eq!(eps, 1.0 / 80.0);
    let flags = &doc["report"]["precondition_flags"]["specialized"];
    assert_eq!(flags["eps"].as_f64().unwrap(), eps);
    assert_eq!(flags["floor_term_vanishes"], Value::Bool(true));
    assert_eq!(flags["population_size"], Value::Bool(true));
    // 5^2 > 45/48.
    assert_eq!(flags["gap_size"], Value::Bool(false));

    let clash = jumplab(&[
        "predict", "--n", "50", "--k", "5", "--mu", "9", "--preset", "search",
    ]);
    assert_eq!(clash.code, 2);
    assert!(clash.stderr.contains("`mu` is derived"), "{}", clash.stderr);
}

#[test]
fn validation_failures_exit_2() {
    let out = jumplab(&["predict", "--n", "50", "--k", "0", "--mu", "20"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("1 <= k < n"), "{}", out.stderr);

    let out = jumplab(&[
        "predict", "--n", "50", "--k", "5", "--mu", "20", "--bogus", "1",
    ]);
    assert_eq!(out.code, 2);

    let out = jumplab(&["predict", "--n", "50", "--k", "5"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("`mu`"), "{}", out.stderr);

    let out = jumplab(&[
        "drift",
        "--n",
        "4",
        "--k",
        "2",
        "--mu",
        "2",
        "--samples",
        "10",
    ]);
    assert_eq!(out.code, 2);

    let out = jumplab(&[
        "equilibrium",
        "--n",
        "30",
        "--k",
        "3",
        "--mu",
        "10",
        "--algorithm",
        "ga",
        "--pc",
        "0.1",
        "--strict",
        "true",
        "--seed",
        "1",
    ]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("violated hypotheses"), "{}", out.stderr);
    assert!(out.stderr.contains("k <= (n-k) eps/3"), "{}", out.stderr);
}

#[test]
fn config_file_grammar_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("predict.cfg");
    std::fs::write(&cfg, "# base\nn = 50\nk = 5\nmu = 20\npc = 0.01\n").unwrap();
    let out = jumplab(&["predict", "--config", path_str(&cfg), "--mu", "30"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    assert_eq!(doc["config"]["mu"], "30");
    assert_eq!(doc["config"]["n"], "50");
    assert_eq!(doc["report"]["params"]["mu"], 30);

    std::fs::write(&cfg, "n = 50\nk = 5\nmu = 20\nsamples = 9\n").unwrap();
    let out = jumplab(&["predict", "--config", path_str(&cfg)]);
    assert_eq!(out.code, 2);
    assert!(
        out.stderr.contains("unknown keys: samples"),
        "{}",
        out.stderr
    );

    std::fs::write(&cfg, "n = 50\nk 5\n").unwrap();
    let out = jumplab(&["predict", "--config", path_str(&cfg)]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);

    let missing = dir.path().join("absent.cfg");
    let out = jumplab(&["predict", "--config", path_str(&missing)]);
    assert_eq!(out.code, 1);
}

#[test]
fn drift_on_four_bit_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.txt");
    let csv = dir.path().join("drift.csv");
    std::fs::write(&pop, "0011\n0101\n").unwrap();
    let out = jumplab(&[
        "drift",
        "--n",
        "4",
        "--k",
        "2",
        "--population",
        "file",
        "--population-file",
        path_str(&pop),
        "--mutation",
        "paired",
        "--ell",
        "1",
        "--samples",
        "100000",
        "--exact",
        "true",
        "--seed",
        "7",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    let r = &doc["results"];
    let measured = r["measured"].as_f64().unwrap();
    let stderr = r["stderr"].as_f64().unwrap();
    assert_eq!(r["predicted"].as_f64(), Some(4.0));
    assert_eq!(r["exact"].as_f64(), Some(4.0));
    assert!((measured - 4.0).abs() <= 3.0 * stderr);
    assert_eq!(doc["pass"], Value::Bool(true));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "lambda_c,initial_s,samples,mean_next_s,stderr,change,conditioning,acceptance_rate,predicted,lower_bound,exact"
    );
    assert!(lines.next().unwrap().starts_with("1,4,100000,"));
}

#[test]
fn logged_config_replays_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let first = jumplab(&[
        "drift",
        "--n",
        "20",
        "--k",
        "4",
        "--mu",
        "6",
        "--algorithm",
        "ga",
        "--pc",
        "0.3",
        "--samples",
        "20000",
        "--population",
        "cluster",
    ]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert!(first.stderr.contains("randomly chosen"));
    let doc = first.json();
    let text: String = doc["config"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| format!("{k} = {}\n", v.as_str().unwrap()))
        .collect();
    let cfg = dir.path().join("replay.cfg");
    std::fs::write(&cfg, text).unwrap();
    for threads in ["1", "3"] {
        let again = jumplab(&["drift", "--config", path_str(&cfg), "--threads", threads]);
        assert_eq!(again.code, 0, "{}", again.stderr);
        assert_eq!(again.json()["results"], doc["results"]);
    }
}

#[test]
fn runtime_baseline_ea() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("runs.csv");
    let out = jumplab(&[
        "runtime",
        "--algorithm",
        "ea",
        "--mu",
        "1",
        "--n",
        "12",
        "--k",
        "3",
        "--repetitions",
        "40",
        "--seed",
        "5",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    assert_eq!(doc["pass"], Value::Bool(true), "{doc}");
    assert_eq!(doc["results"]["campaign"]["successes"], 40);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 41);
    assert!(rows.starts_with("config_hash,seed,replicate,evaluations,spent_evaluations,"));
}

#[test]
fn counterexample_contrast() {
    let out = jumplab(&[
        "counterexample",
        "--n",
        "400",
        "--k",
        "16",
        "--mu",
        "8",
        "--samples",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    assert_eq!(doc["results"]["diversity"], 192);
    assert_eq!(doc["checks"]["diversity_exact"], Value::Bool(true));
    assert_eq!(
        doc["checks"]["single_offspring_drift_negative"],
        Value::Bool(true)
    );

    let bad = jumplab(&[
        "counterexample",
        "--n",
        "400",
        "--k",
        "15",
        "--mu",
        "8",
        "--seed",
        "1",
    ]);
    assert_eq!(bad.code, 2);
}

#[test]
fn hitprob_modes() {
    let out = jumplab(&[
        "hitprob",
        "--n",
        "12",
        "--k",
        "3",
        "--samples",
        "200000",
        "--seed",
        "2",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    assert_eq!(doc["pass"], Value::Bool(true), "{doc}");
    assert_eq!(doc["results"]["d"], 3);

    let out = jumplab(&[
        "hitprob",
        "--mode",
        "offset",
        "--n",
        "20",
        "--k",
        "5",
        "--deltas",
        "1,5",
        "--samples",
        "100000",
        "--seed",
        "2",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.json();
    assert_eq!(doc["results"].as_array().unwrap().len(), 2);
    assert_eq!(doc["pass"], Value::Bool(true), "{doc}");
}

#[test]
fn equilibrium_ea_matches_s0() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("eq.json");
    let out = jumplab(&[
        "equilibrium",
        "--n",
        "20",
        "--k",
        "2",
        "--mu",
        "6",
        "--burn-in",
        "10000",
        "--horizon",
        "200000",
        "--trials",
        "2",
        "--seed",
        "1",
        "--summary",
        path_str(&summary),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(doc["checks"]["within_5_percent_of_s0"], Value::Bool(true));
    assert_eq!(doc["results"]["trials"].as_array().unwrap().len(), 2);
}

#[test]
fn unwritable_output_exits_1() {
    let out = jumplab(&[
        "hitprob",
        "--n",
        "12",
        "--k",
        "3",
        "--samples",
        "1000",
        "--seed",
        "2",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.code, 1, "{}", out.stderr);
}

#[test]
fn help_lists_flags() {
    let out = jumplab(&["drift", "--help"]);
    assert_eq!(out.code, 0);
    for flag in [
        "--seed",
        "--threads",
        "--config",
        "--conditioning",
        "--population-file",
    ] {
        assert!(out.stdout.contains(flag), "{flag}");
    }
}
