use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_noohi")).args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json)
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const CIRCLE: &str = r#"{"E0":["v"],"E1":[{"id":"e","d0":"v","d1":"v"}]}"#;

#[test]
fn matrices_reports_the_obstruction() {
    let (code, r) = run(&["counterexample", "matrices", "--ell", "3", "--p", "5", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["summary"], "obstruction found, v=-1");
    assert_eq!(r["details"]["twisted_valuation"], -1);
}

#[test]
fn picture_reports_both_paths() {
    let (code, r) = run(&["counterexample", "picture", "--ell", "3", "--q", "19", "--depth", "3"]);
    assert_eq!(code, 0);
    let c = &r["details"]["outcome"];
    assert_eq!(c["status"], "conflict");
    assert_eq!((c["first"]["label"].as_u64(), c["second"]["label"].as_u64()), (Some(1), Some(19)));
}

#[test]
fn free_rank_two_into_s3() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "free.json", r#"{"vertex_groups":{},"edges":["x","y"]}"#);
    let (code, r) = run(&["homcount", "--presentation", p.to_str().unwrap(), "--group", "S3"]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["homcounts"]["S3"]["count"], 36);
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn small_budget_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let p = file(&dir, "free.json", r#"{"vertex_groups":{},"edges":["x","y"]}"#);
    let (code, _) = run(&["homcount", "--presentation", p.to_str().unwrap(), "--group", "S3", "--budget", "2"]);
    assert_eq!(code, 3);
}

#[test]
fn malformed_complex_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.json", r#"{"E0":["v"],"E1":[{"id":"e","d0":"w","d1":"v"}]}"#);
    assert_eq!(run(&["present", "--complex", bad.to_str().unwrap()]).0, 2);
    let junk = file(&dir, "junk.json", "{not json");
    assert_eq!(run(&["present", "--complex", junk.to_str().unwrap()]).0, 2);
    assert_eq!(run(&["present", "--complex", "/nonexistent/file.json"]).0, 2);
}

#[test]
fn circle_presents_the_integers() {
    let dir = TempDir::new().unwrap();
    let c = file(&dir, "circle.json", CIRCLE);
    let (code, r) = run(&["present", "--complex", c.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["edges"], serde_json::json!(["e"]));
    let (_, h) = run(&["homcount", "--complex", c.to_str().unwrap(), "--group", "S3", "--group", "Z/5"]);
    assert_eq!(h["details"]["homcounts"]["S3"]["count"], 6);
    assert_eq!(h["details"]["homcounts"]["Z/5"]["count"], 5);
}

#[test]
fn equivalence_by_hom_counts() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.json", r#"{"vertex_groups":{},"edges":["x"]}"#);
    let b = file(&dir, "b.json", r#"{"vertex_groups":{},"edges":["y"]}"#);
    let z2 = file(&dir, "z2.json", r#"{"vertex_groups":{"v":"Z/2"},"edges":[]}"#);
    assert_eq!(run(&["equiv", "--left", a.to_str().unwrap(), "--right", b.to_str().unwrap()]).0, 0);
    let (code, r) = run(&["equiv", "--left", a.to_str().unwrap(), "--right", z2.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(r["summary"].as_str().unwrap().contains("differ"));
}

#[test]
fn dictionary_for_an_embedding() {
    let dir = TempDir::new().unwrap();
    let h = file(
        &dir,
        "h.json",
        r#"{"map":{"source":{"group":"Z/2"},"target":{"group":"Z/4"},"levels":[{"table":[0,2]}]},
            "second":{"source":{"group":"Z/4"},"target":{"group":"Z/2"},"levels":[{"table":[0,1,0,1]}]}}"#,
    );
    let (code, r) = run(&["dict-check", "--input", h.to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    let items: Vec<u64> = r["details"].as_array().unwrap().iter().map(|x| x["item"].as_u64().unwrap()).collect();
    assert_eq!(items, vec![1, 2, 3, 4, 5]);
}

#[test]
fn lcs_components_match_orbits() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"complex":{CIRCLE},"data":null,
            "action":{{"points":4,"vertex":{{"v":{{"group":"1","generators":[]}}}},"edges":{{"e":[1,2,0,3]}}}}}}"#
    );
    let p = file(&dir, "lcs.json", &body);
    let (code, r) = run(&["lcs", "--input", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["details"]["orbits"], 2);
}

#[test]
fn descent_round_trips() {
    let dir = TempDir::new().unwrap();
    let d = file(&dir, "d.json", &format!(r#"{{"complex":{CIRCLE},"datum":{{"fibers":{{"v":3}},"phi":{{"e":[1,2,0]}}}}}}"#));
    assert_eq!(run(&["descent", "--datum", d.to_str().unwrap()]).0, 0);
    let o = file(
        &dir,
        "o.json",
        r#"{"fibers":[2,2],"phi":[{"i":0,"j":0,"map":[0,1]},{"i":0,"j":1,"map":[1,0]},
            {"i":1,"j":0,"map":[1,0]},{"i":1,"j":1,"map":[0,1]}]}"#,
    );
    let (code, r) = run(&["descent", "--ordered", o.to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["details"]["ordered_maps"], 1);
}

#[test]
fn looplike_words_from_a_file() {
    let dir = TempDir::new().unwrap();
    let body = format!(
        r#"{{"complex":{CIRCLE},"depth":4,
            "action":{{"points":6,"vertex":{{"v":{{"group":"Z/3","generators":[[1,2,0,4,5,3]]}}}},"edges":{{"e":[3,4,5,0,1,2]}}}},
            "words":[[{{"kind":"vertex","group":"v","elem":"0"}}],
                     [{{"kind":"vertex","group":"v","elem":"1"}}],
                     [{{"kind":"edge","edge":"e","exp":-1}},{{"kind":"vertex","group":"v","elem":"0"}},{{"kind":"edge","edge":"e","exp":1}}]]}}"#
    );
    let p = file(&dir, "w.json", &body);
    let (code, r) = run(&["looplike", "--input", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    let verdicts: Vec<Value> = r["details"]["words"].as_array().unwrap().iter().map(|w| w["verdict"]["looplike"].clone()).collect();
    assert_eq!(verdicts, vec![Value::Bool(true), Value::Bool(false), Value::Bool(true)]);
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = run(&["looplike", "--cyclotomic", "9", "--seed", "11", "--samples", "3"]);
    let b = run(&["looplike", "--cyclotomic", "9", "--seed", "11", "--samples", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    assert_eq!(a.1["seed"], 11);
}

#[test]
fn nodal_and_wedge_examples() {
    let (code, r) = run(&["counterexample", "nodal", "--gal", "Z/2", "--group", "Z/4", "--group", "S3"]);
    assert_eq!(code, 0, "{r}");
    for row in r["details"]["rows"].as_array().unwrap() {
        assert_eq!(row["count"]["count"], row["expected"]);
    }
    assert_eq!(run(&["counterexample", "wedge", "--loops", "1", "--group", "Z/2"]).0, 0);
}

#[test]
fn text_format_prints_status() {
    let out = Command::new(env!("CARGO_BIN_EXE_noohi"))
        .args(["counterexample", "matrices", "--format", "text"])
        .output()
        .unwrap();
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("status: ok"));
    assert!(s.contains("seed: 0"));
}
