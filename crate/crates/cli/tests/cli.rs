use g2rm_core::cmorder::{CMField, CMFieldJson, CMFixture};
use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root().join("fixtures").join(name).display().to_string()
}

fn g2rm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2rm")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = g2rm(&a);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2rm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn field_info_reports_the_first_generator() {
    let v = json(&["field-info", "--fixture", &fixture("p211.json")]);
    assert_eq!(v["schema"], "g2rm-report/1");
    let r = &v["report"];
    assert_eq!(r["d"], 1837);
    assert_eq!(r["splitting"], "split");
    assert_eq!(r["primes"][0]["generator"], "21 + 1*w");
    assert_eq!(r["narrow_class_trivial"], false);
    assert_eq!(r["depth"], serde_json::json!([1, 1]));

    let text = String::from_utf8(g2rm(&["field-info", "--fixture", &fixture("p211.json")]).stdout).unwrap();
    assert!(text.contains("l1 = (3, 1*w) = (21 + 1*w), split in K"));
}

#[test]
fn field_info_json_round_trips() {
    let v = json(&["field-info", "--fixture", &fixture("p85201.json")]);
    let fj: CMFieldJson = serde_json::from_value(v["report"]["field"].clone()).unwrap();
    let back = CMField::from_json(&fj).unwrap();
    let fx = CMFixture::parse(&std::fs::read_to_string(fixture("p85201.json")).unwrap()).unwrap();
    assert_eq!(back, fx.field);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(g2rm(&["field-info", "--fixture", "/nonexistent/fixture.json"]).status.code(), Some(2));
    let bad = tmp("bad.json");
    std::fs::write(&bad, "{\"field\": 3}").unwrap();
    let out = g2rm(&["field-info", "--fixture", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(g2rm(&["graph"]).status.code(), Some(2));
    assert_eq!(g2rm(&["field-info", "--fixture", &fixture("p211.json"), "--ell", "9"]).status.code(), Some(2));
}

#[test]
fn graph_dot_matches_golden_files() {
    for name in ["p211_h11", "p85201_h21", "rim_only"] {
        let out = tmp(&format!("{name}.dot"));
        let spec = fixture(&format!("graphs/{name}.json"));
        let r = g2rm(&["graph", "--spec", &spec, "--dot", out.to_str().unwrap()]);
        assert!(r.status.success(), "{name}");
        let got = std::fs::read_to_string(&out).unwrap();
        let want = std::fs::read_to_string(fixture(&format!("golden/{name}.dot"))).unwrap();
        assert_eq!(got, want, "{name}");
    }
}

#[test]
fn graph_levels_and_audit() {
    let v = json(&["graph", "--spec", &fixture("graphs/p211_h11.json")]);
    assert_eq!(v["report"]["vertices"], 15);
    assert_eq!(v["report"]["audit"]["mismatches"], serde_json::json!([]));
    assert_eq!(v["seed"], 0);

    let v = json(&["graph", "--spec", &fixture("graphs/rim_only.json")]);
    let levels = v["report"]["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 1);
    assert_eq!((levels[0]["nu1"].as_u64(), levels[0]["nu2"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn endoring_on_the_inert_split_model() {
    let v = json(&["endoring", "--fixture", &fixture("p85201.json"), "--audit"]);
    let r = &v["report"]["report"];
    assert_eq!((r["l1"]["nu"].as_u64(), r["l2"]["nu"].as_u64()), (Some(2), Some(1)));
    assert_eq!(r["conductor_valuations"], serde_json::json!([0, 0]));
    assert_eq!(v["report"]["audit"]["agrees"], true);
    assert!(r.get("path_trace").is_none());
    let traced = json(&["endoring", "--fixture", &fixture("p85201.json"), "-v"]);
    assert!(traced["report"]["report"]["path_trace"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn endoring_is_deterministic_in_the_seed() {
    let args = ["endoring", "--spec", &fixture("graphs/p85201_h21.json"), "--random", "--seed", "9", "--audit"];
    let a = g2rm(&args);
    let b = g2rm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("# g2rm-report/1 endoring seed=9"));
}

#[test]
fn pairing_check_on_p211() {
    let v = json(&["pairing-check", "--fixture", &fixture("p211_curve.json"), "--seed", "7"]);
    assert_eq!(v["ok"], true);
    assert_eq!(v["seed"], 7);
    let r = &v["report"];
    assert_eq!(r["torsion_degrees"], serde_json::json!([6, 1]));
    assert_eq!(r["isotropy"]["trivial"], 16);
    assert_eq!(r["nu"][0]["nu"], 0);
    assert_eq!(r["nu"][1]["nu"], 1);
    for i in 0..2 {
        assert_eq!(r["self_pairing"][i]["measured_k"], r["self_pairing"][i]["predicted_k"]);
    }
    assert_eq!(r["numerator_test"][0]["member"], false);
    assert_eq!(r["numerator_test"][1]["member"], true);
}

#[test]
fn pairing_check_guards() {
    // CM fixtures carry no curve
    assert_eq!(g2rm(&["pairing-check", "--fixture", &fixture("p211.json")]).status.code(), Some(2));
    assert_eq!(g2rm(&["pairing-check", "--fixture", &fixture("p211_curve.json"), "--ell", "5"]).status.code(), Some(2));
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("p211_curve.json")).unwrap()).unwrap();
    v["slow"] = Value::Bool(true);
    let slow = tmp("slow_curve.json");
    std::fs::write(&slow, v.to_string()).unwrap();
    assert_eq!(g2rm(&["pairing-check", "--fixture", slow.to_str().unwrap()]).status.code(), Some(2));
    assert!(g2rm(&["pairing-check", "--fixture", slow.to_str().unwrap(), "--slow"]).status.success());
}

#[test]
fn output_file_receives_the_report() {
    let out = tmp("report.json");
    let r = g2rm(&["field-info", "--fixture", &fixture("p211.json"), "--json", "-o", out.to_str().unwrap()]);
    assert!(r.status.success());
    assert!(r.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["command"], "field-info");
}
