use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn qpdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpdlab"))
        .args(args)
        .env("QPDLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

#[test]
fn classify_complete_intersection() {
    let out = qpdlab(&["ring", "classify", &fixture("ci_ring.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["classification"]["ci"], true);
    assert_eq!(r["result"]["classification"]["hypersurface"], false);
    assert_eq!(r["engine"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn two_term_complex_has_qpd_zero() {
    let out = qpdlab(&["qpd", &fixture("two_term.json"), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let q = &r["result"]["qpd"];
    assert_eq!(q["verdict"], "certified");
    assert_eq!(q["value"], 0);
    assert_eq!(q["exact"], true);
    assert_eq!(q["ab_check"], serde_json::json!({"depth_R": 2, "depth_M": 1, "hsup": 1}));
    assert_eq!(r["command"]["seed"], 7);
}

#[test]
fn tiny_search_budget_exits_two() {
    let out = qpdlab(&["qpd", &fixture("golod_cyclic.json"), "--search-rank", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["result"]["qpd"]["verdict"], "not_found_within_bounds");
    let w = r["warnings"].as_array().unwrap();
    assert!(w.iter().any(|s| s.as_str().unwrap().contains("not found")), "{w:?}");
}

#[test]
fn malformed_document_exits_one_with_position() {
    let out = qpdlab(&["ring", "classify", &fixture("malformed.json")]);
    assert_eq!(out.status.code(), Some(1));
    let msg = report(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("ring.ideal[0]") && msg.contains("position"), "{msg}");

    let dir = std::env::temp_dir().join(format!("qpdlab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("truncated.json");
    std::fs::write(&bad, "{\"field\":{\"p\":101},\n\"ring\":{\"vars\":[\"x\"]").unwrap();
    let out = qpdlab(&["depth", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = report(&out)["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("line 2"), "{msg}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_flags_are_input_errors() {
    assert_eq!(qpdlab(&["qpd", &fixture("two_term.json"), "--trials", "0"]).status.code(), Some(1));
    assert_eq!(qpdlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qpdlab(&["minimize", &fixture("ci_cyclic.json")]).status.code(), Some(1));
}

#[test]
fn lower_bounds_are_warned() {
    let out = qpdlab(&["resolve", &fixture("ci_cyclic.json"), "--hmax", "3", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["pd"]["verdict"], "at_least");
    assert!(r["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("lower bound")));
}

#[test]
fn report_echo_reruns() {
    let out = qpdlab(&["homology", &fixture("two_term.json")]);
    let r = report(&out);
    let dir = std::env::temp_dir().join(format!("qpdlab-echo-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let again = dir.join("echo.json");
    std::fs::write(&again, r["command"]["inputs"][0]["document"].to_string()).unwrap();
    let r2 = report(&qpdlab(&["homology", again.to_str().unwrap()]));
    assert_eq!(r["result"], r2["result"]);
    std::fs::remove_dir_all(&dir).ok();
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v["result"].as_object_mut().unwrap().remove("timing_ms");
    v
}

#[test]
fn suite_is_deterministic_and_passes() {
    let a = qpdlab(&["verify-paper-suite", "--seed", "0"]);
    let b = qpdlab(&["verify-paper-suite", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let (ra, rb) = (without_timing(report(&a)), without_timing(report(&b)));
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
    let items = ra["result"]["items"].as_array().unwrap();
    let discrepancy = items.iter().find(|i| i["id"] == "ci-discrepancy").unwrap();
    assert_eq!(discrepancy["status"], "EXPECTED-DISCREPANCY");
}

#[test]
fn suite_without_search_skips() {
    let out = qpdlab(&["verify-paper-suite", "--no-search"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let items = r["result"]["items"].as_array().unwrap();
    let s = items.iter().find(|i| i["id"] == "search-oracle").unwrap();
    assert_eq!(s["status"], "SKIPPED");
}
