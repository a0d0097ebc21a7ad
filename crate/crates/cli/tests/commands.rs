use std::path::PathBuf;
use std::process::Command;

use floppy_cli::run;
use floppy_metric::extension::{full_extend, one_step_extend, ChoicePolicy, Mode, OrderPolicy};
use floppy_metric::generators::random_patchwork;
use floppy_metric::glue::floppy_certificate;
use floppy_metric::metric::validate;
use floppy_metric::{cantor_tree, GenKind, GenSpec, PartialMetric, Rational};
use serde_json::{json, Value};

const PATH: &str =
    r#"{"vertices":["a","b","c"],"edges":[{"u":"a","v":"b","w":"1"},{"u":"b","v":"c","w":"1"}]}"#;
const HGRAPH: &str = r#"{"vertices":["a","b","x","y"],"edges":[{"u":"a","v":"b","w":"10"},{"u":"a","v":"x","w":"1"},{"u":"b","v":"y","w":"1"}]}"#;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("floppy-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn ok(args: &[&str]) -> Value {
    let o = run(std::iter::once("floppy").chain(args.iter().copied()));
    assert_eq!(o.code, 0, "{args:?}: {}{}", o.stdout, o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn fails(args: &[&str]) -> (i32, Value) {
    let o = run(std::iter::once("floppy").chain(args.iter().copied()));
    (
        o.code,
        serde_json::from_str(&o.stdout).unwrap_or(Value::Null),
    )
}

fn canonical<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap()
}

#[test]
fn validate_reports_path_as_non_full_graph_metric() {
    let s = Scratch::new("validate");
    let v = ok(&["validate", &s.file("path.json", PATH)]);
    assert_eq!(v["graph_metric"], json!(true));
    assert_eq!(v["full"], json!(false));
}

#[test]
fn query_values() {
    let s = Scratch::new("query");
    let path = s.file("path.json", PATH);
    let h = s.file("h.json", HGRAPH);
    assert_eq!(
        ok(&["query", "--hat", "a", "c", &path]),
        json!({"value": "2"})
    );
    assert_eq!(
        ok(&["query", &h, "--hat", "x", "y"]),
        json!({"value": "12"})
    );
    assert_eq!(
        ok(&["query", &h, "--check", "x", "y"]),
        json!({"value": "8"})
    );
    assert_eq!(
        ok(&["query", &h, "--ddot", "a,b", "x,y"]),
        json!({"value": "2"})
    );
    let iv = ok(&["query", &h, "--interval", "x,y"]);
    assert_eq!((&iv["lo"], &iv["hi"]), (&json!("32/3"), &json!("12")));
}

#[test]
fn step_matches_library_extension() {
    let s = Scratch::new("step");
    let h = s.file("h.json", HGRAPH);
    let got = ok(&["step", "--pair", "x,y", "--r", "11", &h]);
    let m = PartialMetric::from_json(HGRAPH).unwrap();
    let want = one_step_extend(
        &m,
        &"x,y".parse().unwrap(),
        &Rational::from_integer(11),
        Mode::Theorem,
    )
    .unwrap();
    assert_eq!(got, canonical(&want));
    assert_eq!(got["edges"][3], json!({"u": "x", "v": "y", "w": "11"}));
}

#[test]
fn extend_with_choice_file() {
    let s = Scratch::new("extend");
    let path = s.file("path.json", PATH);
    let sets = s.file(
        "sets.json",
        r#"{"a,c": {"points": ["3/2"], "intervals": []}}"#,
    );
    let got = ok(&["extend", &path, "--choice", &format!("set-file:{sets}")]);
    assert_eq!(
        got["result"]["edges"][1],
        json!({"u": "a", "v": "c", "w": "3/2"})
    );

    let m = PartialMetric::from_json(HGRAPH).unwrap();
    let h = s.file("h.json", HGRAPH);
    let want = full_extend(&m, OrderPolicy::Random(7), &ChoicePolicy::Midpoint).unwrap();
    assert_eq!(ok(&["extend", &h, "--order", "random:7"]), canonical(&want));
}

#[test]
fn domain_and_malformed_errors() {
    let s = Scratch::new("errors");
    let path = s.file("path.json", PATH);
    let (code, v) = fails(&["step", &path, "--pair", "a,c", "--r", "1"]);
    assert_eq!((code, &v["error"]), (1, &json!("R_OUT_OF_RANGE")));
    let (code, v) = fails(&["query", &path, "--interval", "a,b"]);
    assert_eq!((code, &v["error"]), (1, &json!("ALREADY_EDGE")));
    let (code, _) = fails(&["step", &path, "--pair", "a,c", "--r", "one"]);
    assert_eq!(code, 2);
    let bad = s.file("bad.json", "{\"vertices\": [\"a\"], \"edges\": 3}");
    assert_eq!(fails(&["validate", &bad]).0, 2);
    assert_eq!(fails(&["validate", "/nonexistent/metric.json"]).0, 2);
    assert_eq!(fails(&["extend", &path, "--order", "sideways"]).0, 2);
    assert_eq!(fails(&["frobnicate"]).0, 2);
    assert_eq!(fails(&["validate", &path, "--dot"]).0, 2);
}

#[test]
fn game_play_winning_strategy_wins() {
    let s = Scratch::new("game");
    let h = s.file("h.json", HGRAPH);
    for p2 in ["least", "random:11"] {
        let t = ok(&["game", "play", &h, "--p1", "winning", "--p2", p2]);
        assert_eq!(t["verdict"], json!("PLAYER_I_WINS"));
        assert_eq!(t["moves"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn game_sabotage_defeats_player_one() {
    let s = Scratch::new("sabotage");
    let path4 = GenSpec::new(GenKind::Path { n: 4 }).generate().unwrap();
    let path = s.file("path4.json", &path4.to_json());
    let unbounded = r#"{"points": [], "intervals": [["0", "inf"]]}"#;
    let family = s.file(
        "family.json",
        &format!(r#"{{"v0,v2": {unbounded}, "v0,v3": {unbounded}, "v1,v3": {unbounded}}}"#),
    );
    let v = ok(&["game", "sabotage", &path, "--family", &family, "--replay"]);
    assert!(!v["plan"].is_null());
    assert_eq!(v["transcript"]["verdict"], json!("PLAYER_II_WINS"));
}

#[test]
fn glue_commands_match_library() {
    let s = Scratch::new("glue");
    let pw = random_patchwork(3, 4, 5).unwrap();
    let file = s.file("pw.json", &pw.to_json());
    assert_eq!(
        ok(&["glue", "certify", &file]),
        canonical(&floppy_certificate(&pw).unwrap())
    );
    assert_eq!(ok(&["glue", "validate", &file])["valid"], json!(true));
    let glued = ok(&["glue", "build", &file]);
    let m: PartialMetric = serde_json::from_value(glued).unwrap();
    assert!(validate(&m).graph_pseudometric);
}

#[test]
fn gen_matches_library() {
    assert_eq!(
        ok(&["gen", "cantor", "--depth", "2"]),
        canonical(&cantor_tree(2).unwrap())
    );
    let scaled = ok(&["gen", "path", "--n", "3", "--scale", "3/2"]);
    assert!(scaled["edges"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["w"] == json!("3/2")));
}

#[test]
fn binary_exit_codes_and_stdin() {
    let bin = env!("CARGO_BIN_EXE_floppy");
    let s = Scratch::new("bin");
    let path = s.file("path.json", PATH);
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let o = status(&["query", "--hat", "a", "c", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        serde_json::from_slice::<Value>(&o.stdout).unwrap(),
        json!({"value": "2"})
    );
    assert_eq!(
        status(&["step", &path, "--pair", "a,c", "--r", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        status(&["validate", "/nonexistent/metric.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(status(&["--no-such-flag"]).status.code(), Some(2));

    let mut child = Command::new(bin)
        .args(["floppy", "-", "--dot"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    std::io::Write::write_all(child.stdin.as_mut().unwrap(), PATH.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(2), "floppy report is not a metric");

    let mut child = Command::new(bin)
        .args(["floppy", "--minimal", "-", "--dot"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    std::io::Write::write_all(child.stdin.as_mut().unwrap(), PATH.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("graph metric {"));
}
