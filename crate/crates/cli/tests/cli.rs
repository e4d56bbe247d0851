use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;
use tritile_cli::{exit, run};

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn tritile(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("tritile").chain(args.iter().copied()), &mut o, &mut e);
    Out { code, stdout: String::from_utf8(o).unwrap(), stderr: String::from_utf8(e).unwrap() }
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_g3_then_solve_finds_no_factor() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g3.txt");
    let out = tritile(&["generate", "g3", "--h", "3", "--q", "1", "--r", "1", "--out", s(&g)]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let meta = out.json();
    assert_eq!(meta["N"], 12);
    assert_eq!(meta["bar_min_degree"], 9);
    assert!(path(&dir, "g3.txt.meta.json").exists());

    let out = tritile(&["solve", s(&g)]);
    assert_eq!(out.code, exit::NO_FACTOR, "{}", out.stderr);
    let report = out.json();
    let reason = report["report"]["certificate"]["reason"].as_str().unwrap();
    assert!(reason == "column_argument" || reason == "exhausted");
    assert_eq!(report["report"]["outcome"], "no_factor");
    for key in ["seed", "config_hash", "config", "graph_sha256"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    // the report itself is accepted as a certificate
    let rep = path(&dir, "report.json");
    std::fs::write(&rep, &out.stdout).unwrap();
    let out = tritile(&["verify", s(&g), s(&rep)]);
    assert_eq!(out.code, exit::OK, "{}", out.stdout);
    assert_eq!(out.json()["kind"], "no_factor");
}

#[test]
fn g3_sidecar_certificate_verifies() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g.txt");
    assert_eq!(tritile(&["generate", "g3", "--h", "3", "--q", "1", "--r", "1", "--out", s(&g)]).code, 0);
    let out = tritile(&["verify", s(&g), s(&path(&dir, "g.txt.cert.json"))]);
    assert_eq!(out.code, exit::OK);
    assert_eq!(out.json()["valid"], true);
}

#[test]
fn empty_qgraph() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "q.txt");
    assert_eq!(tritile(&["generate", "qgraph", "--n", "7", "--d", "0", "--out", s(&g)]).code, 0);
    assert_eq!(std::fs::read_to_string(&g).unwrap(), "tripartite N=7 h=0\n");
}

#[test]
fn infeasible_qgraph_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = tritile(&["generate", "qgraph", "--n", "7", "--d", "4", "--out", s(&path(&dir, "q.txt"))]);
    assert_eq!(out.code, exit::INFEASIBLE);
    assert_eq!(out.stderr.lines().count(), 1);
}

#[test]
fn planted_sidecar_verifies_and_tampering_is_caught() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "p.txt");
    assert_eq!(tritile(&["generate", "planted", "--N", "6", "--h", "2", "--p", "0", "--out", s(&g)]).code, 0);
    let cert = path(&dir, "p.txt.cert.json");
    assert_eq!(tritile(&["verify", s(&g), s(&cert)]).code, exit::OK);

    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let copies = c["copies"].as_array_mut().unwrap();
    let first = copies[0][0][0].clone();
    copies[0][0][0] = copies[1][0][0].clone();
    copies[1][0][0] = first;
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, c.to_string()).unwrap();
    let out = tritile(&["verify", s(&g), s(&bad)]);
    assert_eq!(out.code, exit::INVALID);
    assert_eq!(out.json()["valid"], false);
}

#[test]
fn solve_planted_writes_certificate() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "p.txt");
    assert_eq!(tritile(&["generate", "planted", "--N", "9", "--h", "3", "--p", "0.3", "--seed", "4", "--out", s(&g)]).code, 0);
    let cert = path(&dir, "found.json");
    let report = path(&dir, "r.json");
    let out = tritile(&["solve", s(&g), "--cert-out", s(&cert), "--out", s(&report)]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    assert!(out.stdout.is_empty());
    assert_eq!(tritile(&["verify", s(&g), s(&cert)]).code, exit::OK);
}

#[test]
fn detect_theta33() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "t.txt");
    assert_eq!(tritile(&["generate", "theta33", "--m", "4", "--out", s(&g)]).code, 0);
    let out = tritile(&["detect", s(&g), "--pattern", "theta33", "--tolerance", "0.01"]);
    assert_eq!(out.code, exit::OK);
    let w = out.json();
    assert_eq!(w["found"], true);
    assert_eq!(w["tolerance"], "1/100");
    for d in w["witness"]["densities"].as_array().unwrap() {
        assert_eq!(d["edges"], 0);
    }
    let out = tritile(&["detect", s(&g), "--pattern", "extreme", "--tolerance", "1/100"]);
    assert_eq!(out.code, exit::OK);
}

#[test]
fn detect_nothing_in_complete_graph() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "c.txt");
    std::fs::write(&g, tritile_core_complete(6)).unwrap();
    let out = tritile(&["detect", s(&g), "--pattern", "gamma3", "--tolerance", "1/10"]);
    assert_eq!(out.code, exit::UNKNOWN);
    assert_eq!(out.json()["witness"], Value::Null);
}

fn tritile_core_complete(n: usize) -> String {
    tritile::format::write(&tritile::graph::TripartiteGraph::complete(n), None)
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(tritile(&["frobnicate"]).code, exit::USAGE);
    assert_eq!(tritile(&["--help"]).code, exit::OK);
    assert_eq!(tritile(&["--version"]).code, exit::OK);
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "broken.txt");
    std::fs::write(&g, "tripartite N=2 h=1\ne 1 0 1 1\n").unwrap();
    let out = tritile(&["solve", s(&g)]);
    assert_eq!(out.code, exit::PARSE);
    assert!(out.stderr.contains("line 2"));
    assert_eq!(tritile(&["solve", s(&path(&dir, "missing.txt"))]).code, exit::IO);

    let ok = path(&dir, "ok.txt");
    std::fs::write(&ok, tritile_core_complete(3)).unwrap();
    // no tile size anywhere
    assert_eq!(tritile(&["solve", s(&ok)]).code, exit::USAGE);
    assert_eq!(tritile(&["solve", s(&ok), "--h", "2"]).code, exit::DATA);
    assert_eq!(tritile(&["solve", s(&ok), "--h", "1", "--gamma", "3/2"]).code, exit::USAGE);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = path(&dir, "run.toml");
    std::fs::write(&cfg, "seed = 11\ndelta = \"1/20\"\n").unwrap();
    let g = path(&dir, "k.txt");
    std::fs::write(&g, tritile_core_complete(3)).unwrap();
    let a = tritile(&["solve", s(&g), "--h", "1", "--config", s(&cfg)]).json();
    assert_eq!(a["seed"], 11);
    assert_eq!(a["config"]["delta"], "1/20");
    let b = tritile(&["solve", s(&g), "--h", "1", "--config", s(&cfg), "--seed", "12"]).json();
    assert_eq!(b["seed"], 12);
    assert_ne!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["graph_sha256"], b["graph_sha256"]);

    std::fs::write(&cfg, "sed = 11\n").unwrap();
    assert_eq!(tritile(&["solve", s(&g), "--h", "1", "--config", s(&cfg)]).code, exit::PARSE);
}

#[test]
fn scan_saves_exemplars() {
    let dir = TempDir::new().unwrap();
    let exemplars = path(&dir, "ex");
    let out = tritile(&[
        "scan", "--h", "1", "--N", "3", "--levels", "2,3", "--samples", "300", "--workers", "2", "--out-dir",
        s(&exemplars),
    ]);
    assert_eq!(out.code, exit::OK, "{}", out.stderr);
    let r = out.json();
    let levels = r["report"]["levels"].as_array().unwrap();
    assert_eq!(levels[1]["factor"], 300);
    let saved = levels[0]["exemplars"].as_array().unwrap();
    assert!(!saved.is_empty());
    for e in saved {
        let graph = e["path"].as_str().unwrap();
        let cert = e["certificate_path"].as_str().unwrap();
        assert_eq!(tritile(&["verify", graph, cert]).code, exit::OK);
    }
    assert_eq!(tritile(&["scan", "--h", "2", "--N", "5", "--levels", "3", "--samples", "1"]).code, exit::DATA);
}

#[test]
fn generate_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    for args in [
        vec!["gamma3", "--m", "2"],
        vec!["theta22", "--m", "3"],
        vec!["theta32", "--m", "2"],
        vec!["random", "--N", "7", "--level", "4"],
        vec!["planted", "--N", "8", "--h", "2", "--p", "0.2", "--noise", "0.05"],
    ] {
        let g = path(&dir, &format!("{}.txt", args[0]));
        let mut full = vec!["generate"];
        full.extend(&args);
        full.extend(["--out", s(&g)]);
        assert_eq!(tritile(&full).code, 0, "{args:?}");
        let text = std::fs::read_to_string(&g).unwrap();
        let parsed = tritile::format::parse(&text).unwrap();
        assert_eq!(tritile::format::write(&parsed.graph, parsed.h), text);
    }
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(format!("{name}.schema.json"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::draft202012::new(&doc).unwrap()
}

fn assert_valid(name: &str, value: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{name}: {errors:#?}");
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn outputs_match_the_shipped_schemas() {
    let dir = TempDir::new().unwrap();
    let g3 = path(&dir, "g3.txt");
    let planted = path(&dir, "p.txt");
    let gamma = path(&dir, "gm.txt");
    assert_valid("graph-meta", &tritile(&["generate", "g3", "--h", "3", "--q", "1", "--r", "1", "--out", s(&g3)]).json());
    assert_valid("graph-meta", &tritile(&["generate", "planted", "--N", "6", "--h", "2", "--p", "0.2", "--out", s(&planted)]).json());
    assert_valid("graph-meta", &tritile(&["generate", "gamma3", "--m", "3", "--out", s(&gamma)]).json());
    for cert in ["g3.txt.cert.json", "p.txt.cert.json"] {
        assert_valid("certificate", &read_json(&path(&dir, cert)));
    }
    assert_valid("solve-report", &tritile(&["solve", s(&g3)]).json());
    assert_valid("solve-report", &tritile(&["solve", s(&planted)]).json());
    assert_valid("solve-report", &tritile(&["solve", s(&gamma), "--h", "1", "--no-exact"]).json());
    assert_valid("solve-report", &tritile(&["solve", s(&gamma), "--h", "1"]).json());
    assert_valid("verify", &tritile(&["verify", s(&planted), s(&path(&dir, "p.txt.cert.json"))]).json());
    for p in ["gamma3", "theta22", "extreme"] {
        assert_valid("detect-witness", &tritile(&["detect", s(&gamma), "--pattern", p]).json());
    }
    let ex = path(&dir, "ex");
    let scan = tritile(&["scan", "--h", "1", "--N", "3", "--levels", "1,2", "--samples", "40", "--out-dir", s(&ex)]).json();
    assert_valid("scan-report", &scan);
    for entry in std::fs::read_dir(&ex).unwrap() {
        let p = entry.unwrap().path();
        if p.to_str().unwrap().ends_with(".cert.json") {
            assert_valid("certificate", &read_json(&p));
        }
    }
}
