use coxeter_subgroups::json;
use coxeter_subgroups::subgroups::{exceptional_subgroups, homothety_subgroup};
use std::path::PathBuf;
use std::process::{Command, Output};

fn coxsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coxsub")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coxsub-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn classify_cycle_and_f4() {
    let o = coxsub(&["classify", "1 2 3; 2 3 3; 3 1 3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{1,2,3}: parabolic tA2\n");

    let p = scratch("f4.txt", "# affine F4\n1 2 3\n2 3 4\n3 4 3\n4 5 3\n");
    let o = coxsub(&["classify", "--file", p.to_str().unwrap(), "--json"]);
    assert!(o.status.success());
    let (d, classes, special) = json::parse_diagram(&stdout(&o)).unwrap();
    assert_eq!(d.len(), 5);
    assert_eq!(classes.iter().map(|c| c.to_string()).collect::<Vec<_>>(), ["tF4"]);
    assert_eq!(special.len(), 1);
}

#[test]
fn classify_unknown_warns() {
    let o = coxsub(&["classify", "1 2 5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("neither/unknown"));
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn classify_parse_error_names_position() {
    let o = coxsub(&["classify", "1 2 3\n2 x 3"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("line 2, column 3"), "{}", stderr(&o));
}

#[test]
fn enumerate_affine() {
    let o = coxsub(&["enumerate", "tG2", "--max-index", "6"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let (last, body) = out.trim_end().lines().collect::<Vec<_>>().split_last().map(|(l, b)| (l.to_string(), b.to_vec())).unwrap();
    let idx: Vec<u32> = body.iter().filter_map(|l| l.split_whitespace().next()?.parse().ok()).collect();
    assert!(idx.len() >= 4);
    for i in [2, 3, 4, 6] {
        assert!(idx.contains(&i), "{out}");
    }
    assert_eq!(last, "6 subgroups of index <= 6 (index:count 1:1, 2:1, 3:1, 4:1, 6:2)");

    let o = coxsub(&["enumerate", "tA1", "--max-index", "5"]);
    let idx: Vec<u32> = stdout(&o).lines().filter(|l| !l.contains("subgroups")).filter_map(|l| l.split_whitespace().next()?.parse().ok()).collect();
    assert_eq!(idx, [1, 2, 3, 4, 5]);
}

#[test]
fn enumerate_finite_f4() {
    let o = coxsub(&["enumerate", "F4", "--up-to-aut"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.split_whitespace().nth(1) == Some("B2+B2")));
}

#[test]
fn enumerate_json_round_trips_and_is_deterministic() {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_coxsub"))
            .args(["enumerate", "tC2", "--max-index", "8", "--json"])
            .env("COXETER_SUBGROUPS_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let items: Vec<serde_json::Value> = serde_json::from_str(&one).unwrap();
    assert!(items.len() >= 5);
    for v in items {
        let r = json::parse_subgroup(&v.to_string()).unwrap();
        let again: serde_json::Value = serde_json::from_str(&json::emit_subgroup(&r)).unwrap();
        assert_eq!(again, v);
    }
}

#[test]
fn enumerate_dot() {
    let o = coxsub(&["enumerate", "tC2", "--max-index", "2", "--dot"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("graph \""));
}

#[test]
fn bad_inputs() {
    assert_eq!(coxsub(&["enumerate", "tX3"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_coxsub")).args(["enumerate", "tA1"]).env("COXETER_SUBGROUPS_THREADS", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("COXETER_SUBGROUPS_THREADS"));
}

#[test]
fn verify_selected_suites() {
    let o = coxsub(&["verify", "--tables", "2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for (h, i) in [("tC2", 2), ("tG2", 3), ("tF4", 4)] {
        assert!(out.contains(&format!("PASS        [table2] {h} self-similar: computed {i} expected {i}")), "{out}");
    }

    let o = coxsub(&["verify", "--fig1", "--lemmas", "kn", "--json"]);
    assert!(o.status.success());
    let rep = json::parse_report(&stdout(&o)).unwrap();
    assert!(rep.passed());
    assert!(rep.checks.iter().any(|c| c.suite == "fig1"));
}

#[test]
fn verify_discrepancy_does_not_fail() {
    let o = coxsub(&["verify", "--tables", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("DISCREPANCY") && l.contains("E6 > 3A2")), "{out}");
    assert!(out.ends_with("0 fail, 1 discrepancy\n"));
}

#[test]
fn index_with_oracle() {
    let c2 = scratch("c2.json", &json::emit_subgroup(&exceptional_subgroups("C2".parse().unwrap()).unwrap()));
    let o = coxsub(&["index", "tC2", c2.to_str().unwrap(), "--oracle"]);
    assert_eq!(stdout(&o), "2 2 AGREE\n");

    let a2 = homothety_subgroup("A2".parse().unwrap(), 3).unwrap();
    let p = scratch("a2.json", &json::emit_chamber(&a2.chamber));
    let o = coxsub(&["index", "tA2", p.to_str().unwrap(), "--oracle"]);
    assert_eq!(stdout(&o), "9 9 AGREE\n");
}

#[test]
fn index_rejects_non_integer_ratio() {
    let r = homothety_subgroup("C2".parse().unwrap(), 2).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&json::emit_chamber(&r.chamber)).unwrap();
    // move the far wall off the host's mirrors
    let hs = v["payload"]["components"][0]["halfspaces"].as_array_mut().unwrap();
    let far = hs.iter_mut().find(|h| h["offset"] != "0/1").unwrap();
    far["offset"] = "7/5".into();
    let p = scratch("bad.json", &v.to_string());
    let o = coxsub(&["index", "tC2", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("not an integer"), "{}", stderr(&o));
}
