use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn fedosov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedosov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("spec.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("every line is a JSON record"))
        .collect()
}

fn spec(potential: &str, lambda_order: u32, jet_order: u32, kappa: &str, rest: &str) -> String {
    format!(
        r#"{{"schema_version": 1, "chart": {{"dim": 1, "potential": "{potential}"}},
            "truncation": {{"lambda_order": {lambda_order}, "jet_order": {jet_order}}},
            "kappa": {kappa}{rest}}}"#
    )
}

/// Text of the `λ^m` coefficient of task `index`.
fn coefficient(recs: &[Value], index: usize, m: usize) -> String {
    recs[index]["orders"][m]["value"]["text"].as_str().unwrap().to_string()
}

#[test]
fn star_output_matches_the_golden_file() {
    let out = fedosov(&["star", "--spec", data("flat_star.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let golden = std::fs::read_to_string(data("flat_star.jsonl")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
}

#[test]
fn flat_products_follow_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = r#", "tasks": [{"op": "star", "f": "z", "g": "zbar"}, {"op": "star", "f": "1", "g": "z*zbar^2 - 3"}]"#;
    let path = write_spec(&dir, &spec("flat", 2, 6, "1", tasks));
    let recs = records(&fedosov(&["star", "--spec", path.to_str().unwrap()]));
    assert_eq!(coefficient(&recs, 0, 0), "1*z1*zbar1");
    assert_eq!(coefficient(&recs, 0, 1), "2");
    assert_eq!(coefficient(&recs, 0, 2), "0");
    assert_eq!(coefficient(&recs, 1, 0), "-3 + 1*z1*zbar1^2");
    assert_eq!(coefficient(&recs, 1, 1), "0");
    assert_eq!(coefficient(&recs, 1, 2), "0");

    let path = write_spec(&dir, &spec("flat", 2, 6, "0", tasks));
    let recs = records(&fedosov(&["star", "--spec", path.to_str().unwrap()]));
    assert_eq!(coefficient(&recs, 0, 1), "1");
    assert_eq!(recs[0]["kappa"], "0");
}

#[test]
fn output_file_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data("bundle_tasks.json");
    let mut outputs = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let target = dir.path().join(name);
        let out = fedosov(&[
            "star",
            "--spec",
            spec.to_str().unwrap(),
            "--output",
            target.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
        outputs.push(std::fs::read(target).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let ops: Vec<&str> = recs.iter().filter_map(|r| r["op"].as_str()).collect();
    assert_eq!(
        ops,
        [
            "star_prime",
            "module_left",
            "module_right",
            "deformed_metric",
            "morita_left",
            "morita_right"
        ]
    );
    assert!(recs[4].get("kappa").is_none());
    // classical limit of the deformed metric with H = [[1 + z zbar, z], [zbar, 2]]
    assert_eq!(coefficient(&recs, 3, 0), "3*zbar1 + 1*z1 + 1*zbar1^3 + 1*z1*zbar1^2");
    assert_eq!(recs.last().unwrap()["record"], "summary");
}

#[test]
fn verify_passes_on_the_flat_chart() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, &spec("flat", 2, 6, "1", ""));
    let out = fedosov(&["verify", "--spec", path.to_str().unwrap()]);
    let recs = records(&out);
    let failures: Vec<&Value> = recs.iter().filter(|r| r["status"] == "fail").collect();
    assert!(failures.is_empty(), "{failures:?}");
    assert_eq!(out.status.code(), Some(0));
    let suites: std::collections::BTreeSet<&str> = recs.iter().filter_map(|r| r["suite"].as_str()).collect();
    assert_eq!(suites.len(), 6);
}

#[test]
fn verify_passes_on_fubini_study() {
    let dir = tempfile::tempdir().unwrap();
    let omega = r#", "omega": [{"lambda_power": 1, "potential": "z*zbar"}]"#;
    let path = write_spec(&dir, &spec("fubini_study", 2, 6, "1", omega));
    let out = fedosov(&[
        "verify",
        "--spec",
        path.to_str().unwrap(),
        "--suite",
        "graded,geometry,fedosov,wick,morita",
        "--seed",
        "7",
    ]);
    let recs = records(&out);
    let failures: Vec<&Value> = recs.iter().filter(|r| r["status"] == "fail").collect();
    assert!(failures.is_empty(), "{failures:?}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn flipped_christoffel_symbols_fail_the_curvature_checks() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, &spec("fubini_study", 2, 6, "1", ""));
    let args = ["verify", "--spec", path.to_str().unwrap(), "--suite", "geometry"];
    assert_eq!(fedosov(&args).status.code(), Some(0));
    let mut flipped = args.to_vec();
    flipped.push("--debug-flip-christoffel");
    let out = fedosov(&flipped);
    assert_eq!(out.status.code(), Some(1));
    let recs = records(&out);
    let laplacian = recs
        .iter()
        .find(|r| r["id"] == "geometry.fibre_laplacian_of_curvature")
        .unwrap();
    assert_eq!(laplacian["status"], "fail");
    assert!(laplacian["witness"].as_str().unwrap().contains("dz1^dzbar1"));
}

#[test]
fn dump_r_listings() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(&dir, &spec("flat", 2, 6, "1", ""));
    let recs = records(&fedosov(&["dump-r", "--spec", path.to_str().unwrap()]));
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["items"], 0);

    let omega = r#", "omega": [{"lambda_power": 1, "potential": "z*zbar"}]"#;
    let path = write_spec(&dir, &spec("fubini_study", 2, 6, "1", omega));
    let out = fedosov(&["dump-r", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let forms: Vec<Value> = records(&out).into_iter().filter(|r| r["record"] == "form").collect();
    assert!(!forms.is_empty());
    assert_eq!(forms[0]["total_degree"], 3);
    let degrees: Vec<u64> = forms.iter().map(|r| r["total_degree"].as_u64().unwrap()).collect();
    assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
    for f in &forms {
        let key = &f["key"];
        let sum = |field: &str| -> u64 { key[field].as_array().unwrap().iter().map(|e| e.as_u64().unwrap()).sum() };
        let forms = key["forms"].as_array().unwrap();
        let holo_forms = forms
            .iter()
            .filter(|g| !g.as_str().unwrap().starts_with("dzbar"))
            .count() as u64;
        let anti_forms = forms.len() as u64 - holo_forms;
        let holo = sum("z") + holo_forms;
        let anti = sum("zbar") + anti_forms;
        assert!(holo > 0 && anti > 0, "purely one-sided key {}", f["label"]);
    }
}

#[test]
fn invalid_specifications_exit_with_setup_errors() {
    let dir = tempfile::tempdir().unwrap();
    let run = |text: &str| {
        let path = write_spec(&dir, text);
        let out = fedosov(&["star", "--spec", path.to_str().unwrap()]);
        (out.status.code(), String::from_utf8_lossy(&out.stderr).to_string())
    };

    let (code, err) = run(&spec("fubini_study", 2, 5, "1", ""));
    assert_eq!(code, Some(2));
    assert!(
        err.contains("truncation.jet_order") && err.contains("required minimum 6"),
        "{err}"
    );

    let two_dim = r#"{"schema_version": 1, "chart": {"dim": 2, "potential": "flat"},
        "truncation": {"lambda_order": 1, "jet_order": 5}, "kappa": 1,
        "omega": [{"lambda_power": 1, "components": [{"forms": ["dz1", "dz2"], "coeff": "1"}]}]}"#;
    let (code, err) = run(two_dim);
    assert_eq!(code, Some(2));
    assert!(err.contains("omega") && err.contains("not of type (1,1)"), "{err}");

    let (code, err) = run(&spec("flat", 2, 6, "\"x\"", ""));
    assert_eq!(code, Some(2));
    assert!(err.contains("kappa"), "{err}");

    let (code, err) = run("{ not json");
    assert_eq!(code, Some(2));
    assert!(!err.is_empty());

    let out = fedosov(&["star", "--spec", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let path = write_spec(&dir, &spec("flat", 1, 5, "1", ""));
    let out = fedosov(&["verify", "--spec", path.to_str().unwrap(), "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_tasks_are_reported_in_place() {
    let dir = tempfile::tempdir().unwrap();
    // the deformed metric needs Wick ordering
    let rest = r#", "bundle": {"kind": "holomorphic", "fibre_metric": [["1"]]},
        "tasks": [{"op": "star", "f": "z", "g": "z"}, {"op": "deformed_metric", "s": ["1"], "t": ["1"]}]"#;
    let path = write_spec(&dir, &spec("flat", 1, 5, "-1", rest));
    let out = fedosov(&["star", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let recs = records(&out);
    assert_eq!(recs[0]["record"], "task");
    assert_eq!(recs[1]["record"], "error");
    assert_eq!(recs[1]["index"], 1);
    assert_eq!(recs[2]["failed"], 1);
}
