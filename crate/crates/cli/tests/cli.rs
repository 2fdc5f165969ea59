use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_forge")).args(args).env_remove("FORGE_SEED").output().expect("spawn forge")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

fn petersen_text() -> String {
    let mut s = String::from("graph 10 15\n");
    for i in 0..5 {
        s += &format!("{} {}\n{} {}\n{} {}\n", i, (i + 1) % 5, i, i + 5, 5 + i, 5 + (i + 2) % 5);
    }
    s
}

/// `K_5` with a pendant path: `2 e(S) = 20` on `S = {0..4}`.
fn planted_text() -> String {
    let mut edges: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    edges.extend((4..19).map(|i| (i, i + 1)));
    let mut s = format!("graph 20 {}\n", edges.len());
    for (u, v) in edges {
        s += &format!("{u} {v}\n");
    }
    s
}

#[test]
fn valid_spectral_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "petersen.txt", &petersen_text());
    let out = forge(&["spectral", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(check(&r, "psd_duality")["status"], "pass");
    assert_eq!(check(&r, "ihara_bass")["status"], "pass");
    let rho = r["results"]["rho_b"]["rho"].as_f64().unwrap();
    assert!((rho - 2.0).abs() < 1e-9);
}

#[test]
fn missing_input_exits_two() {
    let out = forge(&["spectral", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "bad.txt", "graph 3 2\n0 1\n");
    assert_eq!(forge(&["spectral", g.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_two() {
    assert_eq!(forge(&["spectral", "--no-such-flag", "x"]).status.code(), Some(2));
    assert_eq!(forge(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn planted_dense_set_fails_and_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "planted.txt", &planted_text());
    let out = forge(&["check", "density", g.to_str().unwrap(), "--gamma", "2.5"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let c = check(&r, "density");
    assert_eq!(c["status"], "fail");
    let set: Vec<u64> = c["payload"]["violating_set"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(set, vec![0, 1, 2, 3, 4]);
    let pass = forge(&["check", "density", g.to_str().unwrap(), "--gamma", "4.5"]);
    assert_eq!(pass.status.code(), Some(0));
}

#[test]
fn csv_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "petersen.txt", &petersen_text());
    let g = g.to_str().unwrap();
    let out = forge(&["--csv", "t,min_ratio,unique,size", "profile", g, "--tmax", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["t", "min_ratio", "unique", "size"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    let full = json(&forge(&["profile", g, "--tmax", "4"]));
    let table = full["table"].as_array().unwrap();
    assert_eq!(rows.len(), table.len());
    for (row, t) in rows.iter().zip(table) {
        assert_eq!(row[0].parse::<u64>().unwrap(), t["t"].as_u64().unwrap());
        assert_eq!(row[1].parse::<f64>().unwrap(), t["min_ratio"].as_f64().unwrap());
        assert_eq!(row[2].parse::<u64>().unwrap(), t["unique"].as_u64().unwrap());
    }
    // Each vertex has three private neighbors.
    assert_eq!(&rows[0][1], "3.0");
}

#[test]
fn csv_of_empty_table_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "petersen.txt", &petersen_text());
    let out = forge(&["--csv", "a,b", "spectral", g.to_str().unwrap(), "--nb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim_end(), "a,b");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    let many = dir.path().join("many.json");
    for (t, p) in [("1", &one), ("8", &many)] {
        let out = forge(&["--threads", t, "--seed", "7", "--out", p.to_str().unwrap(), "gadget", "--D1", "6", "--D2", "6", "--d1", "3", "--d2", "3", "--tmax", "3", "--scale", "0.5"]);
        assert!(out.status.code().unwrap() <= 1);
    }
    let a: Value = serde_json::from_slice(&std::fs::read(&one).unwrap()).unwrap();
    let b: Value = serde_json::from_slice(&std::fs::read(&many).unwrap()).unwrap();
    assert_eq!(a["report_digest"], b["report_digest"]);
    assert_eq!(without_timing(a), without_timing(b));
}

#[test]
fn env_seed_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_forge"));
        c.args(["--seed", seed, "gen", "biregular", "--n1", "20", "--n2", "30", "--d1", "3", "--d2", "2"]);
        match env {
            Some(s) => c.env("FORGE_SEED", s),
            None => c.env_remove("FORGE_SEED"),
        };
        without_timing(serde_json::from_slice(&c.output().unwrap().stdout).unwrap())
    };
    assert_eq!(run(Some("5"), "1"), run(None, "5"));
    assert_ne!(run(None, "1"), run(None, "5"));
    assert_eq!(run(None, "3")["seed"], 3);
}
