// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TRIANGLE: &str = r#"{"version":1,"dimension":2,"model":"unipoint","points":[
    {"color":"red","coords":[0,0],"prob":"1/2"},
    {"color":"blue","coords":[2,0],"prob":"1/2"},
    {"color":"blue","coords":[1,1],"prob":"1/2"}]}"#;

const COLLINEAR: &str = r#"{"version":1,"dimension":2,"model":"unipoint","points":[
    {"color":"red","coords":[0,0],"prob":"1/2"},
    {"color":"blue","coords":["1/2","1/2"],"prob":"1/2"},
    {"color":"blue","coords":[3,3],"prob":"1/2"}]}"#;

const HULL: &str = r#"{"version":1,"dimension":2,"model":"unipoint","points":[
    {"color":"blue","coords":[0,0],"prob":"1/2"},
    {"color":"blue","coords":[4,1],"prob":"1/2"},
    {"color":"blue","coords":[1,4],"prob":"1/2"}]}"#;

const DISKS: &str = r#"{"version":1,"dimension":2,"model":"unipoint","objects":[
    {"color":"red","prob":"1","shape":{"type":"ball","center":[0,0],"radius":"1/2"}},
    {"color":"blue","prob":"1/2","shape":{"type":"ball","center":[3,"1/3"],"radius":"1/2"}}]}"#;

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.stdout))
    }
}

fn stochsep(args: &[&str]) -> Run {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_stochsep")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
    }
}

fn file(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/report.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn conforms(v: &Value) {
    let errors: Vec<String> = schema().iter_errors(v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:?}\n{v:#}");
}

#[test]
fn triangle_sp_and_oracle_agree() {
    let dir = TempDir::new().unwrap();
    let tri = file(&dir, "tri.json", TRIANGLE);
    let sp = stochsep(&["sp", "--input", s(&tri), "--mode", "exact"]);
    assert_eq!(sp.code, 0);
    assert_eq!(sp.json()["results"]["sp"], "1/1");
    let oracle = stochsep(&["oracle", "--input", s(&tri)]);
    assert_eq!(oracle.code, 0);
    assert_eq!(oracle.json()["results"], sp.json()["results"]);
    let scan = stochsep(&["sp", "--input", s(&tri), "--strategy", "scan", "--format", "text"]);
    assert!(scan.stdout.starts_with("sp: 1/1\n"));
}

#[test]
fn collinear_input_exits_two_with_the_tuple() {
    let dir = TempDir::new().unwrap();
    let col = file(&dir, "collinear.json", COLLINEAR);
    let v = stochsep(&["validate", "--input", s(&col)]);
    assert_eq!(v.code, 2);
    let doc = v.json();
    conforms(&doc);
    assert_eq!(doc["results"]["violations"][0]["tuple"], serde_json::json!([1, 2, 3]));
    let sp = stochsep(&["sp", "--input", s(&col)]);
    assert_eq!(sp.code, 2);
    let doc = sp.json();
    conforms(&doc);
    assert_eq!(doc["violations"][0]["tuple"], serde_json::json!([1, 2, 3]));
}

fn points_json(d: usize, reds: usize, blues: usize) -> String {
    // distinct coordinates are enough: guard rails fire before any validation
    let pts: Vec<String> = (0..reds + blues)
        .map(|i| {
            let coords: Vec<String> = (0..d).map(|k| ((i * 7 + k * 13) % 97 + i * 101).to_string()).collect();
            let color = if i < reds { "red" } else { "blue" };
            format!(r#"{{"color":"{color}","coords":[{}],"prob":"1/2"}}"#, coords.join(","))
        })
        .collect();
    format!(r#"{{"version":1,"dimension":{d},"model":"unipoint","points":[{}]}}"#, pts.join(","))
}

#[test]
fn guard_rails_exit_three() {
    let dir = TempDir::new().unwrap();
    let high = file(&dir, "d7.json", &points_json(7, 2, 2));
    assert_eq!(stochsep(&["sp", "--input", s(&high)]).code, 3);
    assert_eq!(stochsep(&["esm", "--input", s(&high)]).code, 3);
    let wide = file(&dir, "wide.json", &points_json(6, 60, 60));
    let r = stochsep(&["sp", "--input", s(&wide)]);
    assert_eq!(r.code, 3);
    conforms(&r.json());
    let many = file(&dir, "many.json", &points_json(2, 12, 11));
    assert_eq!(stochsep(&["oracle", "--input", s(&many)]).code, 3);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(stochsep(&["frobnicate"]).code, 1);
    assert_eq!(stochsep(&["sp"]).code, 1);
    assert_eq!(stochsep(&["sp", "--input", "/nonexistent/file.json"]).code, 1);
    assert_eq!(stochsep(&["--help"]).code, 0);
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.json", r#"{"version":1,"dimension":2}"#);
    assert_eq!(stochsep(&["sp", "--input", s(&bad)]).code, 1);
    let tri = file(&dir, "tri.json", TRIANGLE);
    assert_eq!(stochsep(&["sch", "--input", s(&tri), "--kind", "membership"]).code, 1);
}

#[test]
fn gen_is_byte_identical_for_equal_seeds() {
    let dir = TempDir::new().unwrap();
    for kind in ["random", "multipoint", "cluster", "balls"] {
        let args = |seed: &'static str| -> Vec<&str> {
            vec!["gen", "--kind", kind, "--reds", "2", "--blues", "4", "--dim", "2", "--seed", seed]
        };
        let a = stochsep(&args("11"));
        let b = stochsep(&args("11"));
        assert_eq!(a.code, 0, "{kind}");
        assert_eq!(a.stdout, b.stdout, "{kind}");
        let c = stochsep(&args("12"));
        assert_ne!(a.stdout, c.stdout, "{kind}");
        let out = dir.path().join(format!("{kind}.json"));
        let mut with_file = args("11");
        with_file.extend(["--output", s(&out)]);
        let w = stochsep(&with_file);
        assert_eq!(w.code, 0);
        conforms(&w.json());
        assert_eq!(std::fs::read_to_string(&out).unwrap(), a.stdout);
    }
}

#[test]
fn exact_output_is_independent_of_threads() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("d3.json");
    let g = stochsep(&["gen", "--kind", "random", "--reds", "4", "--blues", "6", "--dim", "3", "--seed", "5", "--output", s(&out)]);
    assert_eq!(g.code, 0);
    let one = stochsep(&["--threads", "1", "sp", "--input", s(&out)]);
    let four = stochsep(&["--threads", "4", "sp", "--input", s(&out)]);
    assert_eq!(one.code, 0);
    assert_eq!(one.stdout, four.stdout);
    let e1 = stochsep(&["--threads", "1", "esm", "--input", s(&out), "--mode", "exact"]);
    let e4 = stochsep(&["--threads", "3", "esm", "--input", s(&out), "--mode", "exact"]);
    assert_eq!(e1.stdout, e4.stdout);
    let o = stochsep(&["oracle", "--input", s(&out)]);
    assert_eq!(o.json()["results"]["sp"], one.json()["results"]["sp"]);
}

#[test]
fn bench_counts_match_closed_forms() {
    let r = stochsep(&["bench", "--dim", "2", "--reds", "4", "--blues", "16,32,64"]);
    assert_eq!(r.code, 0);
    let doc = r.json();
    conforms(&doc);
    for row in doc["results"]["rows"].as_array().unwrap() {
        assert_eq!(row["candidates"].as_u64().unwrap(), 4 * row["N"].as_u64().unwrap());
    }
    let exp: f64 = doc["results"]["growth_exponent"].as_str().unwrap().parse().unwrap();
    assert!((exp - 1.0).abs() < 1e-12);

    let r = stochsep(&["bench", "--dim", "3", "--reds", "3", "--blues", "10", "--compare"]);
    assert_eq!(r.code, 0);
    let doc = r.json();
    // C(13,3) - C(3,3) - C(10,3)
    assert_eq!(doc["results"]["rows"][0]["candidates"], 286 - 1 - 120);
    assert_eq!(doc["results"]["strategies_agree"], true);

    let csv = stochsep(&["bench", "--blues", "8,16", "--csv", "--strategy", "scan"]);
    assert_eq!(csv.code, 0);
    let lines: Vec<&str> = csv.stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("2,4,8,32,32,"));
}

#[test]
fn transform_output_is_in_sgpp() {
    let dir = TempDir::new().unwrap();
    // the first two points share their last coordinate, so the projection onto it is degenerate
    let axis = file(
        &dir,
        "axis.json",
        r#"{"version":1,"dimension":3,"model":"unipoint","points":[
            {"color":"red","coords":[0,0,5],"prob":"1/2"},{"color":"blue","coords":[1,0,5],"prob":"1/2"},
            {"color":"blue","coords":[0,1,2],"prob":"1/3"},{"color":"red","coords":[3,2,1],"prob":"3/4"}]}"#,
    );
    assert_eq!(stochsep(&["validate", "--input", s(&axis)]).code, 2);
    assert_eq!(stochsep(&["validate", "--input", s(&axis), "--level", "gp"]).code, 0);
    let moved = dir.path().join("moved.json");
    let t = stochsep(&["transform", "--input", s(&axis), "--output", s(&moved)]);
    assert_eq!(t.code, 0);
    conforms(&t.json());
    assert_eq!(t.json()["results"]["identity"], false);
    assert_eq!(stochsep(&["validate", "--input", s(&moved)]).code, 0);
    let before = stochsep(&["sp", "--input", s(&axis)]);
    let after = stochsep(&["sp", "--input", s(&moved)]);
    assert_eq!(before.json()["results"], after.json()["results"]);
    assert_eq!(before.json()["warnings"].as_array().unwrap().len(), 1);

    let col = file(&dir, "collinear.json", COLLINEAR);
    let fixed = dir.path().join("fixed.json");
    let j = stochsep(&["transform", "--input", s(&col), "--jitter", "1/100", "--seed", "3", "--output", s(&fixed)]);
    assert_eq!(j.code, 0);
    assert_eq!(stochsep(&["validate", "--input", s(&fixed)]).code, 0);
}

#[test]
fn hull_queries() {
    let dir = TempDir::new().unwrap();
    let a = file(&dir, "a.json", HULL);
    let m = stochsep(&["sch", "--input", s(&a), "--kind", "membership", "--query", "1,1"]);
    assert_eq!(m.code, 0);
    conforms(&m.json());
    assert_eq!(m.json()["results"]["membership"], "1/8");
    let far = stochsep(&["sch", "--input", s(&a), "--kind", "eps-distant", "--query", "1,1", "--eps", "0"]);
    let p: f64 = far.json()["results"]["eps_distant"].as_str().unwrap().parse().unwrap();
    assert!((p - 0.875).abs() < 1e-15);
    let i = stochsep(&["sch", "--input", s(&a), "--kind", "intersection", "--polytope", "1,1;9,-3"]);
    assert_eq!(i.code, 0);
    conforms(&i.json());
    let d = stochsep(&["sch", "--input", s(&a), "--kind", "expected-distance", "--query=-3,-4"]);
    let v: f64 = d.json()["results"]["expected_distance"].as_str().unwrap().parse().unwrap();
    // the nearest point of any nonempty hull that contains (0,0) is (0,0)
    assert!(v > 5.0 * 0.5 - 1e-12);
    conforms(&d.json());
}

#[test]
fn object_commands_match_their_oracles() {
    let dir = TempDir::new().unwrap();
    let disks = file(&dir, "disks.json", DISKS);
    let sp = stochsep(&["sp-objects", "--input", s(&disks)]);
    assert_eq!(sp.code, 0);
    conforms(&sp.json());
    let f = |r: &Run, k: &str| -> f64 { r.json()["results"][k].as_str().unwrap().parse().unwrap() };
    assert!((f(&sp, "sp") - 1.0).abs() < 1e-12);
    let esm = stochsep(&["esm-objects", "--input", s(&disks)]);
    conforms(&esm.json());
    let o = stochsep(&["oracle", "--input", s(&disks), "--what", "esm"]);
    assert!((f(&esm, "esm") - f(&o, "esm")).abs() < 1e-9);
    assert_eq!(stochsep(&["oracle", "--input", s(&disks), "--what", "margins"]).code, 1);
}

#[test]
fn every_point_report_conforms() {
    let dir = TempDir::new().unwrap();
    let tri = file(&dir, "tri.json", TRIANGLE);
    for args in [
        vec!["validate", "--input", s(&tri)],
        vec!["transform", "--input", s(&tri)],
        vec!["sp", "--input", s(&tri), "--mode", "float"],
        vec!["esm", "--input", s(&tri)],
        vec!["esm", "--input", s(&tri), "--mode", "exact"],
        vec!["oracle", "--input", s(&tri), "--what", "margins"],
        vec!["oracle", "--input", s(&tri), "--what", "esm", "--mode", "float"],
        vec!["--timings", "sp", "--input", s(&tri)],
    ] {
        let r = stochsep(&args);
        assert_eq!(r.code, 0, "{args:?}");
        conforms(&r.json());
    }
}
