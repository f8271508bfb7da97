use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const RULES: [&str; 6] = ["fibonacci", "thue_morse", "period_doubling", "solenoid", "chair", "thue_morse_2d"];

fn rule(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("rules").join(format!("{name}.json"))
}

fn hulltool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hulltool")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = hulltool(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_rule(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let p = dir.path().join("rule.json");
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn fibonacci_homology_is_z_squared() {
    let h = json(&["homology", rule("fibonacci").to_str().unwrap()]);
    for side in ["uncollared", "collared"] {
        let top = &h[side][1];
        assert_eq!(top["homology"]["display"], "Z^2");
        assert_eq!(top["cohomology"]["rank"], 2);
    }
}

#[test]
fn one_third_is_not_a_solenoid_gap_label() {
    let g = json(&["gap-labels", rule("solenoid").to_str().unwrap(), "--depth", "3", "--contains", "1/3", "--contains", "3/8"]);
    let q = g["queries"].as_array().unwrap();
    assert_eq!(q[0]["member"], false);
    assert!(q[0]["certificate"].is_null());
    assert_eq!(q[1]["member"], true);
}

#[test]
fn golden_ratio_query_carries_a_certificate() {
    let g = json(&["gap-labels", rule("fibonacci").to_str().unwrap(), "--depth", "2", "--contains", "3 - lambda"]);
    let q = &g["queries"][0];
    assert_eq!(q["member"], true);
    assert!(!q["certificate"].as_array().unwrap().is_empty());
}

#[test]
fn undeclared_label_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_rule(&dir, r#"{"dimension":1,"tiles":[{"label":"a"}],"images":{"a":"ab"}}"#);
    let out = hulltool(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undeclared label"));
}

#[test]
fn exit_codes_by_category() {
    let dir = tempfile::tempdir().unwrap();
    let missing = hulltool(&["validate", dir.path().join("nope.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));

    let p = write_rule(&dir, r#"{"dimension":1,"tiles":[{"label":"a"},{"label":"b"}],"images":{"a":"aa","b":"bb"}}"#);
    let out = hulltool(&["measure", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let out = hulltool(&["oracle", rule("thue_morse").to_str().unwrap(), "--budget", "100"]);
    assert_eq!(out.status.code(), Some(4));

    assert_eq!(hulltool(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hulltool(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("measure.json");
    let r = rule("period_doubling");
    let printed = hulltool(&["measure", r.to_str().unwrap()]);
    let written = hulltool(&["measure", r.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), printed.stdout);
}

#[test]
fn text_format_is_readable() {
    let out = hulltool(&["homology", rule("fibonacci").to_str().unwrap(), "--format", "text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("collared H_1 = Z^2"));
    let out = hulltool(&["validate", rule("chair").to_str().unwrap(), "--format", "text"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("dimension 2"));
}

#[test]
fn every_subcommand_runs_on_fibonacci() {
    let r = rule("fibonacci");
    for cmd in ["validate", "collar", "complex", "homology", "measure", "gap-labels", "oracle", "report"] {
        for fmt in ["json", "text"] {
            let out = hulltool(&[cmd, r.to_str().unwrap(), "--format", fmt]);
            assert!(out.status.success(), "{cmd} {fmt}: {}", String::from_utf8_lossy(&out.stderr));
            assert!(!out.stdout.is_empty());
        }
    }
}

#[test]
fn reports_match_the_schema() {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    for name in RULES {
        let report = json(&["report", rule(name).to_str().unwrap()]);
        let errors: Vec<String> = validator.iter_errors(&report).map(|e| format!("{} at {}", e, e.instance_path())).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
    }
}

#[test]
fn report_is_deterministic_across_flags() {
    let r = rule("thue_morse");
    let args = ["report", r.to_str().unwrap(), "--depth", "2", "--precision", "20", "--contains", "1/12"];
    assert_eq!(hulltool(&args).stdout, hulltool(&args).stdout);
}

#[test]
fn precision_zero_is_rejected() {
    let out = hulltool(&["measure", rule("fibonacci").to_str().unwrap(), "--precision", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn translate_walks_a_point() {
    let walk = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("walks/fibonacci.json");
    let w = json(&["translate", rule("fibonacci").to_str().unwrap(), walk.to_str().unwrap()]);
    let steps = w["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 6);
    assert_eq!(w["start"]["cells"].as_array().unwrap().len(), 7);
    // Two half steps land where one full step would.
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    std::fs::write(&one, r#"{"depth":6,"cell":"a[a,b]","position":["lambda/3"],"steps":[["1"]]}"#).unwrap();
    let v = json(&["translate", rule("fibonacci").to_str().unwrap(), one.to_str().unwrap()]);
    assert_eq!(v["steps"][0]["point"], steps[1]["point"]);
    // A long jump leaves the deepest cell and is reported, not fatal.
    assert!(steps[4]["point"].is_null());
    assert!(steps[4]["error"].as_str().unwrap().contains("truncation depth 6"));
}

#[test]
fn translate_in_two_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let walk = dir.path().join("walk.json");
    let r = rule("chair");
    let label = json(&["collar", r.to_str().unwrap()])["labels"][0].as_str().unwrap().to_string();
    let body = format!(r#"{{"depth":3,"cell":"{label}","position":["1/2","1/2"],"steps":[["1","0"],["0","3/2"],["-1","-3/2"]]}}"#);
    std::fs::write(&walk, body).unwrap();
    let w = json(&["translate", r.to_str().unwrap(), walk.to_str().unwrap()]);
    assert_eq!(w["steps"][2]["point"], w["start"]);

    std::fs::write(&walk, r#"{"depth":3,"cell":"nope","position":["0","0"],"steps":[]}"#).unwrap();
    assert_eq!(hulltool(&["translate", r.to_str().unwrap(), walk.to_str().unwrap()]).status.code(), Some(2));
}
