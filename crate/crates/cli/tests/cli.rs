use std::path::{Path, PathBuf};

use jsonschema::JSONSchema;
use polyopt_cli::{run, Outcome, ProblemFile};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn problem(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/problems")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn corpus() -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/problems");
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn schema(name: &str) -> JSONSchema {
    let text = std::fs::read_to_string(root().join("docs").join(name)).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft7)
        .compile(&value)
        .unwrap()
}

fn polyopt(args: &[&str]) -> Outcome {
    run(std::iter::once("polyopt").chain(args.iter().copied()))
}

fn assert_valid(schema: &JSONSchema, value: &Value, what: &str) {
    if let Err(errors) = schema.validate(value) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{what}: schema violations:\n{}", msgs.join("\n"));
    }
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {}", out.stdout))
}

/// Subcommand invocations that make sense for a problem file.
fn invocations(name: &str, file: &str) -> Vec<Vec<String>> {
    let constrained = ["disk", "interval", "sphere_slice", "stengle"].contains(&name);
    let mut v: Vec<Vec<&str>> = vec![
        vec!["analyze", file],
        vec!["compactness", file],
        vec!["morse", file],
        vec!["zeros", file],
        vec!["probe", file, "--mode", "sos"],
        vec!["export-sdpa", file, "--order", "2", "-o", "-"],
    ];
    if constrained {
        v.push(vec!["minimize", file, "--mode", "lasserre", "--order", "1..3"]);
        v.push(vec!["minimize", file, "--mode", "kkt", "--order", "2"]);
        v.push(vec!["probe", file, "--mode", "qm", "--order", "1..2"]);
        v.push(vec!["probe", file, "--mode", "preordering", "--order", "2"]);
    } else {
        v.push(vec!["minimize", file, "--mode", "gradient", "--order", "1..3", "--both-sides"]);
    }
    v.into_iter().map(|a| a.into_iter().map(String::from).collect()).collect()
}

#[test]
fn problem_files_match_the_problem_schema() {
    let schema = schema("problem.schema.json");
    for name in corpus() {
        let text = std::fs::read_to_string(problem(&name)).unwrap();
        assert_valid(&schema, &serde_json::from_str(&text).unwrap(), &name);
        ProblemFile::from_json(&text).unwrap().parse().unwrap();
    }
}

#[test]
fn every_subcommand_on_the_corpus_matches_the_result_schema_and_is_deterministic() {
    let schema = schema("result.schema.json");
    let dir = std::env::temp_dir().join(format!("polyopt-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in corpus() {
        let file = problem(&name);
        for mut args in invocations(&name, &file) {
            if let Some(slot) = args.iter_mut().find(|a| *a == "-") {
                *slot = dir.join(format!("{name}.dat-s")).display().to_string();
            }
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let first = polyopt(&argv);
            let second = polyopt(&argv);
            let what = format!("{name}: {}", args.join(" "));
            assert_eq!(first, second, "{what}: output differs between runs");
            let value = json(&first);
            assert_valid(&schema, &value, &what);
            assert_eq!(value["exit_code"], first.code, "{what}");
            assert_ne!(first.code, 2, "{what}: {}", first.stdout);
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["analyze", "cubic_curve"], 0),
        (&["compactness", "circle"], 0),
        (&["compactness", "diagonal"], 3),
        (&["morse", "double_well"], 0),
        (&["morse", "cube"], 3),
        (&["probe", "double_well"], 0),
        (&["probe", "motzkin", "--order", "3"], 3),
        (&["probe", "stengle", "--mode", "qm"], 3),
        (&["minimize", "interval", "--mode", "lasserre"], 0),
        (&["minimize", "interval", "--mode", "gradient"], 2),
        (&["minimize", "cube", "--order", "0"], 2),
        (&["minimize", "cube", "--order", "3..1"], 2),
        (&["frobnicate", "cube"], 2),
    ];
    for (args, code) in cases {
        let mut argv = args.to_vec();
        let file = problem(argv[1]);
        argv[1] = &file;
        let out = polyopt(&argv);
        assert_eq!(out.code, *code, "{args:?}: {}", out.stdout);
        assert_eq!(json(&out)["exit_code"], *code);
    }
}

#[test]
fn malformed_inputs_are_json_diagnostics() {
    let schema = schema("result.schema.json");
    let dir = std::env::temp_dir().join(format!("polyopt-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = [
        r#"{"variables": ["x"], "objective": "x +* 1"}"#,
        r#"{"variables": ["x"], "objective": "y"}"#,
        r#"{"variables": ["x"], "objective": "x", "constraints": [{"poly": "x", "sense": "<0"}]}"#,
        r#"{"variables": ["x"], "objective": "x", "options": {"order": "0..2"}}"#,
        r#"{"version": 7, "variables": ["x"], "objective": "x"}"#,
        r#"{"variables": ["x"], "objective": "x""#,
        "",
    ];
    for (i, text) in bad.iter().enumerate() {
        let path = dir.join(format!("bad{i}.json"));
        std::fs::write(&path, text).unwrap();
        for cmd in ["analyze", "minimize", "probe"] {
            let out = polyopt(&[cmd, path.to_str().unwrap()]);
            let v = json(&out);
            assert_eq!(out.code, 2, "{text}");
            assert_eq!(v["error"]["kind"], "parse", "{text}");
            assert_valid(&schema, &v, text);
        }
    }
    let out = polyopt(&["analyze", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(out.code, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn documented_examples() {
    let v = json(&polyopt(&["minimize", &problem("cube"), "--mode", "gradient", "--order", "1..4"]));
    let bounds: Vec<f64> = v["result"]["bounds"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).collect();
    assert_eq!(bounds.len(), 4);
    assert!(bounds.iter().all(|b| b.abs() <= 1e-6), "{bounds:?}");
    let warnings = v["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w == "minimum not attained on searched region"));

    let v = json(&polyopt(&["minimize", &problem("interval"), "--mode", "lasserre", "--order", "1"]));
    let step = &v["result"]["steps"][0]["result"];
    assert!((step["lower_bound"].as_f64().unwrap() + 1.0).abs() <= 1e-6);
    let extraction = &step["extraction"];
    assert_eq!(extraction["rank_one"], true);
    assert!((extraction["candidates"][0]["point"][0].as_f64().unwrap() + 1.0).abs() <= 1e-4);

    let v = json(&polyopt(&["analyze", &problem("cubic_curve")]));
    assert_eq!(v["result"]["convenient"], true);
    let vertices: Vec<Value> = v["result"]["vertices"].as_array().unwrap().clone();
    for e in [[0, 0], [3, 0], [0, 3]] {
        assert!(vertices.contains(&serde_json::json!(e)), "{vertices:?}");
    }
}

#[test]
fn ladders_are_nondecreasing() {
    for (name, mode, order) in [
        ("cube", "gradient", "1..4"),
        ("quartic_2d", "gradient", "2..3"),
        ("stengle", "lasserre", "1..4"),
        ("disk", "lasserre", "1..3"),
    ] {
        let v = json(&polyopt(&["minimize", &problem(name), "--mode", mode, "--order", order]));
        assert_eq!(v["result"]["monotone"], true, "{name}");
        let bounds: Vec<f64> = v["result"]["bounds"].as_array().unwrap().iter().map(|b| b.as_f64().unwrap()).collect();
        for w in bounds.windows(2) {
            assert!(w[1] >= w[0] - 1e-7, "{name}: {bounds:?}");
        }
    }
}

#[test]
fn tolerance_flags_reach_the_output() {
    // M_2(y) at the optimum mixes the two minimizers ±1: eigenvalue ratio 1/2.
    let file = problem("double_well");
    let rank = |tol: &str| {
        let v = json(&polyopt(&["minimize", &file, "--order", "2", "--tol-rank", tol]));
        v["result"]["steps"][0]["result"]["extraction"].clone()
    };
    assert_eq!(rank("1e-5")["rank_one"], false);
    let loose = rank("0.9");
    assert_eq!(loose["rank_one"], true);
    assert!(loose["candidates"][0]["bound_gap"].as_f64().unwrap() > 0.5);
    assert_eq!(polyopt(&["minimize", &file, "--tol-rank", "-1"]).code, 2);
}

#[test]
fn sdpa_export_to_stdout_and_file() {
    let out = polyopt(&["export-sdpa", &problem("interval"), "--order", "1"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines[0].starts_with('"'));
    assert_eq!(lines[1], "2 = mDIM");
    assert_eq!(lines[2], "2 = nBLOCK");
    let parsed = polyopt::sdp::parse_sdpa(&out.stdout).unwrap();
    assert_eq!(polyopt::sdp::write_sdpa(&parsed).unwrap(), out.stdout);

    let split = polyopt(&["export-sdpa", &problem("sphere_slice"), "--order", "1", "--equalities", "split"]);
    assert_eq!(split.code, 0);
    polyopt::sdp::parse_sdpa(&split.stdout).unwrap();
}

#[test]
fn external_solver_round_trip() {
    let exe = env!("CARGO_BIN_EXE_polyopt");
    let external = format!("{exe} solve-sdpa");
    for (name, mode, order) in [("interval", "lasserre", "1"), ("double_well", "gradient", "2"), ("disk", "kkt", "2")] {
        let out = std::process::Command::new(exe)
            .args(["minimize", &problem(name), "--mode", mode, "--order", order])
            .args(["--solver", "external", "--external-command", &external])
            .output()
            .unwrap();
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(out.status.code(), Some(0), "{v}");
        for check in v["result"]["external"]["checks"].as_array().unwrap() {
            assert_eq!(check["agrees"], true, "{name}: {check}");
            assert!(check["difference"].as_f64().unwrap() <= 1e-6, "{name}: {check}");
        }
    }
}

#[test]
fn binary_exit_status_matches_envelope() {
    let exe = env!("CARGO_BIN_EXE_polyopt");
    let out = std::process::Command::new(exe).args(["compactness", &problem("diagonal")]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["conclusion"], "witness_noncompact_hint");
}
