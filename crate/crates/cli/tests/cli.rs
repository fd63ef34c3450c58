use std::path::PathBuf;
use std::process::{Command, Output};

fn grafting(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grafting"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name);
    root.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn torus_commands() {
    let out = grafting(&["torus", "resolve", "--mode", "flat", "0,2", "2,-2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "2,0\n");

    let out = grafting(&["torus", "twist", "--about", "0,1", "-k", "2", "1,0"]);
    assert_eq!(stdout(&out), "1,2\n");

    let out = grafting(&["torus", "intersect", "1,0", "0,1"]);
    assert_eq!(stdout(&out), "geometric=1 algebraic=1\n");

    let out = grafting(&["torus", "twist", "--about", "0,1", "-k", "-3", "-1,0"]);
    assert_eq!(stdout(&out), "-1,3\n");
}

#[test]
fn torus_parse_errors_exit_two() {
    let out = grafting(&["torus", "intersect", "1,x", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = grafting(&["torus", "resolve", "--mode", "round", "1,0", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = grafting(&["torus", "twist", "--about", "0,0", "-k", "1", "1,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graft_disjoint_and_spiraling() {
    let out = grafting(&["graft", &config("standard.json"), "--curve", "gamma@beta=1,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"key\": \"1*(gamma^2,lambda)[beta:4,0]\""));

    let out = grafting(&["graft", &config("standard.json"), "--curve", "gamma@beta=1,-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("[beta:4,-2]"));
}

#[test]
fn graft_errors() {
    let out = grafting(&["graft", &config("standard.json"), "--curve", "gamma@beta=2,1"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = std::env::temp_dir().join("grafting-cli-malformed.json");
    std::fs::write(&bad, "{\"schema\": 1,").unwrap();
    let out = grafting(&["graft", bad.to_str().unwrap(), "--curve", "gamma"]);
    assert_eq!(out.status.code(), Some(2));

    let out = grafting(&["graft", &config("standard.json"), "--curve", "gamma@beta"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn complex_depth_zero() {
    let out = grafting(&["complex", &config("standard.json"), "--depth", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("vertices=1 edges=0 rank=0"), "{stderr}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["vertices"].as_array().unwrap().len(), 1);
}

#[test]
fn complex_dot_to_file_and_rank_sweep() {
    let dir = std::env::temp_dir();
    let mut last = 0u64;
    for m in 1..=3 {
        let path = dir.join(format!("grafting-cli-complex-{m}.dot"));
        let out = grafting(&[
            "complex",
            &config("standard.json"),
            "--depth",
            "2",
            "--twist-bound",
            &m.to_string(),
            "--format",
            "dot",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        let summary = stdout(&out);
        let rank: u64 = summary
            .split_whitespace()
            .find_map(|w| w.strip_prefix("rank="))
            .unwrap()
            .parse()
            .unwrap();
        assert!(rank >= last);
        last = rank;
        let dot = std::fs::read_to_string(&path).unwrap();
        assert!(dot.starts_with("digraph complex {"));
        assert!(dot.trim_end().ends_with('}'));
        assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    }
}

#[test]
fn complex_bad_flag_exits_two() {
    let out = grafting(&["complex", &config("standard.json"), "--depth", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = grafting(&["verify", "--suite", "sharp_flat", "--k-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sharp_flat: 85/85 passed"));

    let out = grafting(&["verify", "--suite", "oracle", "--range", "2"]);
    assert_eq!(out.status.code(), Some(0));

    let json = std::env::temp_dir().join("grafting-cli-goldman.json");
    let a = grafting(&[
        "verify",
        "--suite",
        "goldman",
        "--trials",
        "100",
        "--seed",
        "7",
        "--json",
        json.to_str().unwrap(),
    ]);
    let b = grafting(&["verify", "--suite", "goldman", "--trials", "100", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["passed"], true);

    let out = grafting(&["verify", "--suite", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decompose_config() {
    let out = grafting(&["decompose", &config("goldman.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1*(alpha) + 2*(delta) + 1*(lambda)[beta:1,0]\n");
}
