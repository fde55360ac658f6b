use std::process::{Command, Output};

fn tanaka(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanaka")).args(args).env_remove("TANAKA_OUT_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn prolong_skn_dimension() {
    let o = tanaka(&["prolong", "--family", "skn", "--k", "0", "--n", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("dim 11\n"));
}

#[test]
fn prolong_symp_json() {
    let o = tanaka(&["prolong", "--family", "symp", "--n", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.get("levels").is_some(), "{v}");
}

#[test]
fn normcheck_existence_and_nonexistence() {
    let yes = stdout(&tanaka(&["normcheck", "--family", "skn", "--k", "2", "--n", "6"]));
    assert!(yes.starts_with("exists: true"), "{yes}");
    assert!(yes.contains("complement dimensions by weight"));
    let no = stdout(&tanaka(&["normcheck", "--family", "skn", "--k", "1", "--n", "6"]));
    assert!(no.starts_with("exists: false"), "{no}");
    for step in ["(a)", "(b)", "(c)", "(d)"] {
        assert!(no.contains(step), "{no}");
    }
    let no7 = tanaka(&["normcheck", "--family", "skn", "--k", "0", "--n", "7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&no7.stdout).unwrap();
    assert_eq!(v["exists"], serde_json::json!(false));
}

#[test]
fn vf_examples() {
    let g = tanaka(&["vf", "growth", "--family", "monge1", "--n", "6", "--seed", "0"]);
    assert_eq!(stdout(&g), "(2,3,5,6)\n");
    let s = tanaka(&["vf", "symbol", "--family", "flat-skn", "--k", "0", "--n", "6", "--prolong", "1", "--recognize", "1,6"]);
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).contains("recognized as s^{1,6}: true"));
    let i = tanaka(&["vf", "involutivity", "--family", "flat-skn", "--k", "0", "--n", "6", "--prolong", "2"]);
    assert_eq!(i.status.code(), Some(0));
    assert!(stdout(&i).ends_with("all pass: true\n"));
}

#[test]
fn growth_at_given_point() {
    let o = tanaka(&["vf", "growth", "--family", "flat-skn", "--k", "0", "--n", "6", "--point", "x_X=1/2,x_eta=-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bad = tanaka(&["vf", "growth", "--family", "flat-skn", "--k", "0", "--n", "6", "--point", "nope=1"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("unknown coordinate"));
}

#[test]
fn verify_paper_report() {
    let o = tanaka(&["verify-paper", "--n", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["id"] == "c2-g2-prolongation" && c["status"] == "pass"));
    assert!(checks.iter().any(|c| c["status"] == "skipped" && c["witness"] == "n=5 parabolic case out of scope"));
    let ids: Vec<&str> = checks.iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    for c in checks {
        let mut keys: Vec<&str> = c.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort();
        assert_eq!(keys, ["anchor", "id", "ms", "status", "witness"]);
    }
    let raw = stdout(&o);
    let pos = |k: &str| raw.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("id") < pos("anchor") && pos("anchor") < pos("status") && pos("status") < pos("witness") && pos("witness") < pos("ms"));
}

#[test]
fn verify_paper_n6_fails_only_on_the_literal_witness() {
    let o = tanaka(&["verify-paper", "--n", "6", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let failing: Vec<&str> = v["checks"].as_array().unwrap().iter().filter(|c| c["status"] != "pass").map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(failing, ["c4-witness-k0"]);
}

#[test]
fn range_and_usage_errors_exit_3() {
    assert_eq!(tanaka(&["verify-paper", "--n", "9"]).status.code(), Some(3));
    assert_eq!(tanaka(&["prolong"]).status.code(), Some(3));
    assert_eq!(tanaka(&["prolong", "--family", "skn"]).status.code(), Some(3));
    assert_eq!(tanaka(&["bogus"]).status.code(), Some(3));
    assert_eq!(tanaka(&["--format", "xml", "prolong"]).status.code(), Some(3));
    assert_eq!(tanaka(&["vf", "symbol", "--family", "monge1", "--n", "6", "--recognize", "1"]).status.code(), Some(3));
    assert_eq!(tanaka(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_algebra_file_reports_position() {
    let dir = std::env::temp_dir().join(format!("tanaka-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("bad.json");
    std::fs::write(&p, "{\n  \"basis\": [\n    oops\n  ]\n}\n").unwrap();
    let o = tanaka(&["prolong", "--input", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn family_round_trip_through_input() {
    let dir = std::env::temp_dir().join(format!("tanaka-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tanaka"))
        .args(["family", "skn", "--k", "1", "--n", "6", "--out", "s16.json"])
        .env("TANAKA_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = dir.join("s16.json");
    let p_str = p.to_str().unwrap();
    assert!(stdout(&tanaka(&["prolong", "--input", p_str])).starts_with("dim 11\n"));
    let f = dir.join("monge.json");
    tanaka(&["family", "monge2", "--n", "6", "--out", f.to_str().unwrap()]);
    let g = tanaka(&["vf", "growth", "--input", f.to_str().unwrap()]);
    assert_eq!(stdout(&g), "(2,3,5,6)\n", "{}", stderr(&g));
    std::fs::remove_dir_all(&dir).unwrap();
}
