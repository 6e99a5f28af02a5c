use std::fs;
use std::path::PathBuf;

use bratteli::SymbolSpec;
use bratteli_cli::{run, EXIT_INPUT, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION};
use serde_json::Value;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }
}

fn invoke(args: &[&str]) -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("bratteli").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn spec_file(name: &str, json: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-specs");
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

fn f_family(n: u32) -> String {
    spec_file(
        &format!("f{n}.json"),
        &format!(r#"{{"generator":{{"kind":"FFamily","N":{n}}}}}"#),
    )
}

#[test]
fn eval_matches_the_library() {
    let path = f_family(2);
    let run = invoke(&["symbol", "eval", "--spec", &path, "--depth", "4"]);
    assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
    let lib = SymbolSpec::f_family(2).unwrap().level(4).unwrap();
    assert_eq!(run.stdout, format!("{}\n", serde_json::to_string(&lib).unwrap()));
    assert_eq!(run.stdout.trim(), r#"["576","576","576","576"]"#);
}

#[test]
fn extract_prints_the_e_matrix() {
    let run = invoke(&["model", "extract", "-p", "1", "-q", "2"]);
    assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
    let v = run.json();
    assert_eq!(v["display"], "[[2,0],[1,1]]");
    assert_eq!(v["e_matrix"], serde_json::json!([["2", "0"], ["1", "1"]]));
    assert_eq!(v["multiplicities"]["small"], serde_json::json!(["3", "1"]));

    let wrong_s = invoke(&["model", "extract", "-p", "1", "-q", "2", "-s", "3"]);
    assert_eq!(wrong_s.code, EXIT_INPUT);
    assert!(wrong_s.stderr.contains("resolution"));
}

#[test]
fn render_formats() {
    let k1 = spec_file("k1.json", r#"{"generator":{"kind":"KOne"}}"#);
    let root = invoke(&["render", "--spec", &k1, "--depth", "0", "--format", "text"]);
    assert_eq!((root.code, root.stdout.as_str()), (EXIT_OK, "1\n"));

    let f1 = f_family(1);
    let text = invoke(&["render", "--spec", &f1, "--depth", "4", "--format", "text"]);
    let rows: Vec<&str> = text.stdout.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[4].starts_with("24 24"));

    let dot = invoke(&["render", "--spec", &f1, "--depth", "3", "--format", "dot"]);
    assert!(dot.stdout.starts_with("digraph bratteli {"));
    assert!(!dot.stdout.contains("[label=\"1\"];\n"));
    let shown = invoke(&[
        "render",
        "--spec",
        &f1,
        "--depth",
        "3",
        "--format",
        "dot",
        "--show-unit",
    ]);
    assert!(shown.stdout.contains("\"L1_1\" -> \"L2_1\" [label=\"1\"];"));
    assert_eq!(
        dot.stdout,
        invoke(&["render", "--spec", &f1, "--depth", "3", "--format", "dot"]).stdout
    );
}

#[test]
fn model_verify_exit_codes() {
    let good = invoke(&["model", "verify", "-p", "2", "-q", "2", "-s", "2"]);
    assert_eq!(good.code, EXIT_OK, "{}", good.stderr);
    let suites: Vec<String> = good
        .json()
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["suite"].to_string())
        .collect();
    assert!(suites.iter().any(|s| s.contains("bemb")));

    let bad = invoke(&[
        "model",
        "verify",
        "-p",
        "2",
        "-q",
        "2",
        "-s",
        "2",
        "--convention",
        "truncated",
    ]);
    assert_eq!(bad.code, EXIT_VERIFICATION);
    assert!(bad.stdout.contains("\"fail\""));

    let bemb = invoke(&["model", "bemb", "-p", "1", "-q", "2"]);
    assert_eq!(bemb.code, EXIT_OK);
    assert!(bemb.stdout.contains("unverifiable"));

    assert_eq!(
        invoke(&["model", "verify", "-p", "1", "-q", "1", "-s", "1"]).code,
        EXIT_INPUT
    );
}

#[test]
fn certify_and_equiv() {
    let (f1, f2) = (f_family(1), f_family(2));
    let cert = invoke(&["certify", "--a", &f1, "--b", &f2]);
    assert_eq!(cert.code, EXIT_OK);
    assert_eq!(cert.json()["certificate"]["verdict"], "NonIsomorphic");

    let tails = invoke(&[
        "certify", "--a", &f1, "--b", &f1, "--tail-a", "inf,2", "--tail-b", "inf,3",
    ]);
    assert_eq!(tails.code, EXIT_OK, "{}", tails.stderr);
    assert_eq!(tails.json()["unitary"]["reason"]["kind"], "DimensionVector");

    let moving = invoke(&[
        "certify", "--a", &f1, "--b", &f1, "--tail-a", "1,2", "--tail-b", "inf,3",
    ]);
    assert_eq!(moving.code, EXIT_INPUT);

    let car_a = spec_file(
        "car-a.json",
        r#"{"generator":{"kind":"UHF","supernatural":{"primes":{"2":"inf"}}}}"#,
    );
    let car_b = spec_file(
        "car-b.json",
        r#"{"initial_column":[["1"],["1"]],"generator":{"kind":"Explicit","factors":[[["1","1"],["1","1"]]],"periodic":true}}"#,
    );
    let eq = invoke(&["symbol", "equiv", "--a", &car_a, "--b", &car_b, "--depth", "4"]);
    assert_eq!(eq.code, EXIT_OK, "{}{}", eq.stdout, eq.stderr);
    assert_eq!(eq.json()["verdict"], "EquivalentWitness");
    assert_eq!(eq.json()["replay"]["verified"], true);

    let none = invoke(&["symbol", "equiv", "--a", &f1, "--b", &f2, "--depth", "2"]);
    assert_eq!(none.code, EXIT_VERIFICATION);
}

#[test]
fn invariants_report() {
    let run = invoke(&["symbol", "invariants", "--spec", &f_family(1)]);
    assert_eq!(run.code, EXIT_OK);
    let v = run.json();
    assert_eq!(v["triangular_profile"]["profile"], "Pair");
    assert_eq!(v["triangular_profile"]["pair"]["a"]["others"], "inf");
    assert_eq!(v["first_index"], 2);
}

#[test]
fn input_and_usage_errors() {
    let broken = spec_file("broken.json", "{ not json");
    assert_eq!(
        invoke(&["symbol", "eval", "--spec", &broken, "--depth", "1"]).code,
        EXIT_INPUT
    );
    let unknown = spec_file("unknown.json", r#"{"generator":{"kind":"Nope"}}"#);
    assert_eq!(
        invoke(&["symbol", "eval", "--spec", &unknown, "--depth", "1"]).code,
        EXIT_INPUT
    );
    assert_eq!(
        invoke(&["symbol", "eval", "--spec", "/nonexistent/x.json", "--depth", "1"]).code,
        EXIT_INPUT
    );

    let usage = invoke(&["symbol", "eval", "--bogus"]);
    assert_eq!(usage.code, EXIT_USAGE);
    assert!(!usage.stderr.is_empty());
    assert_eq!(
        invoke(&["render", "--spec", "x", "--depth", "1", "--format", "svg"]).code,
        EXIT_USAGE
    );
    assert_eq!(invoke(&["--help"]).code, EXIT_OK);
}
