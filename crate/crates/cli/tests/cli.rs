use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const A2: &str = r#"{"cartan":"A2","sigma":"(1 2)","M":2,"omega_power":1,"points":[],"site_weights":[],"lambda0":["1/2","1/2"]}"#;
const A2_TUPLE: &str = r#"{"polys":[{"denom":1,"terms":{"0":"-1","3":"1"}},{"denom":1,"terms":{"0":"1","3":"1"}}]}"#;

fn write(name: &str, body: &str) -> PathBuf {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclopop")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn fold_a4_involution() {
    let o = run(&["fold", "--cartan", "A4", "--sigma", "(1 4)(2 3)"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["linking"], serde_json::json!([1, 2, 2, 1]));
    assert_eq!(v["admissible"], true);
}

#[test]
fn verify_generated_a2_tuple() {
    let inst = write("cli_a2.json", A2);
    let tup = write("cli_a2_tuple.json", A2_TUPLE);
    let o = run(&["verify", "--instance", inst.to_str().unwrap(), "--tuple", tup.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for key in ["generic", "cyclotomic", "critical"] {
        assert_eq!(v[key], true, "{key}");
    }
    assert_eq!(v["lambda_infinity"], serde_json::json!(["-5/2", "-5/2"]));
}

#[test]
fn generate_then_verify() {
    let inst = write("cli_gen_a2.json", A2);
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_gen_out.json");
    let o = run(&["generate", "--instance", inst.to_str().unwrap(), "--direction", "1", "--c", "-1/2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["tuple"]["polys"][0]["terms"]["0"], "3/2");
}

#[test]
fn populate_depth_zero_is_the_seed() {
    let inst = write("cli_pop_a2.json", A2);
    let o = run(&["populate", "--instance", inst.to_str().unwrap(), "--depth", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["parent"], Value::Null);
}

#[test]
fn exit_codes() {
    let inst = write("cli_codes_a2.json", A2);
    let bad = write("cli_codes_bad.json", r#"{"polys":[{"denom":1,"terms":{"0":"-1","1":"1"}},{"denom":1,"terms":{"0":"1","1":"1"}}]}"#);
    let o = run(&["verify", "--instance", inst.to_str().unwrap(), "--tuple", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["critical"], false);
    let o = run(&["verify", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["class"], "input");
    let o = run(&["fold", "--cartan", "A3^(1)", "--sigma", "(1 2 3 4)"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}
