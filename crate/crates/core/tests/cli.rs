use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn sqd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqd"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_validate_and_set_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let report = schema("report.schema.json");
    let spec = schema("spec.schema.json");
    let cases = [
        ("unipotent.json", r#"{"d": 2, "n": 1, "generators": [[[1, 1], [0, 1]]]}"#, "virtually_nilpotent_sqd", 0),
        ("cat.json", r#"{"d": 2, "n": 1, "generators": [[[2, 1], [1, 1]]]}"#, "not_sqd", 0),
        // a generator and its square: dependent, not virtually nilpotent
        ("pair.json", r#"{"d": 2, "n": 2, "generators": [[[2, 1], [1, 1]], [[5, 3], [3, 2]]]}"#, "inconclusive", 2),
    ];
    for (file, text, verdict, code) in cases {
        write(dir, file, text);
        assert_valid(&spec, &serde_json::from_str(text).unwrap());
        let out = sqd(dir, &["classify", "--input", file, "--witness"]);
        assert_eq!(out.status.code(), Some(code), "{file}: {}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert_eq!(v["verdict"], verdict);
        assert_valid(&report, &v);
    }
}

#[test]
fn cat_map_witness_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "cat.json", r#"{"d": 2, "n": 1, "generators": [[[2, 1], [1, 1]]]}"#);
    let out = sqd(tmp.path(), &["classify", "--input", "cat.json", "--witness", "--horizon", "120"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["witness"]["passed"], true);
    let tags: Vec<&str> = v["citations"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert!(tags.contains(&"Thm3.5"));
}

#[test]
fn schema_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "bad.json", r#"{"d": 2, "n": 1, "generators": [[[1, 2], [3, 4]]]}"#);
    let out = sqd(dir, &["classify", "--input", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["error"].is_string());

    write(dir, "ragged.json", r#"{"d": 2, "n": 1, "generators": [[[1, 1], [0]]]}"#);
    let out = sqd(dir, &["classify", "--input", "ragged.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["field"].as_str().unwrap().starts_with("generators"), "{err}");

    let out = sqd(dir, &["badly-approx", "--sequence", "fib"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["field"], "sequence");
}

#[test]
fn missing_input_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sqd(tmp.path(), &["berend-check", "--input", "nope.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn construct_example_writes_a_loadable_spec() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = sqd(dir, &["construct-example", "--poly", "-1,-2,1,1", "--output", "spec.json", "--report", "r.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let spec_text = std::fs::read_to_string(dir.join("spec.json")).unwrap();
    assert_valid(&schema("spec.schema.json"), &serde_json::from_str(&spec_text).unwrap());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["verified"], true);
    assert_eq!(r["berend"]["all_conditions"], "satisfied");

    let out = sqd(dir, &["classify", "--input", "spec.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "berend_sqd");
    assert_valid(&schema("report.schema.json"), &v);

    // t^3 + t^2 - 2t + 1 has complex roots
    let out = sqd(dir, &["construct-example", "--poly", "1,-2,1,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn orbit_reports_rational_and_density_parts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "cat.json", r#"{"d": 2, "n": 1, "generators": [[[2, 1], [1, 1]]]}"#);
    let out = sqd(dir, &["orbit", "--input", "cat.json", "--theta", "1/5,2/5", "--iters", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["rational_orbit"]["finite"], true);
    // (1,2) -> (4,3) -> (11,7) = (1,2) mod 5
    assert_eq!(v["rational_orbit"]["size"], 2);

    let out = sqd(
        dir,
        &["orbit", "--input", "cat.json", "--theta", "sqrt(2),sqrt(3)", "--mode", "float", "--iters", "100000", "--csv", "o.csv", "--csv-steps", "5"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["rational_orbit"].is_null());
    assert!(v["density"]["coverage"].as_f64().unwrap() > 0.99);
    let csv = std::fs::read_to_string(dir.join("o.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);
}

#[test]
fn cook_and_badly_approx_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write(dir, "p.json", r#"{"polys": [["0", "sqrt(2)"]]}"#);
    let out = sqd(dir, &["cook-search", "--polys", "p.json", "--N", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["n_star"], 70);

    write(dir, "const.json", r#"{"polys": [["1", "sqrt(2)"]]}"#);
    let out = sqd(dir, &["cook-search", "--polys", "const.json"]);
    assert_eq!(out.status.code(), Some(1));

    let out = sqd(dir, &["badly-approx", "--sequence", "pow:2", "--ratio", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["verified_to"], 200);
    assert!(v["certificate"]["epsilon_decimal"].as_f64().unwrap() >= 0.2);
}

#[test]
fn reproduce_paper_passes_and_validates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sqd(tmp.path(), &["reproduce-paper"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_valid(&schema("reproduce.schema.json"), &v);
}

#[test]
fn seeds_make_runs_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let a = sqd(dir, &["--seed", "9", "badly-approx", "--sequence", "random", "--N", "60"]);
    let b = sqd(dir, &["--seed", "9", "badly-approx", "--sequence", "random", "--N", "60"]);
    let c = sqd(dir, &["--seed", "10", "badly-approx", "--sequence", "random", "--N", "60"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}
