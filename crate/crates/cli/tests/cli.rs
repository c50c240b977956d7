use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_eqcohom");

fn run(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "report differs from {}", path.display());
}

fn analysis_args(name: &str) -> Vec<String> {
    match name {
        "shear" | "double-shear" => vec!["analyze".into(), format!("{name}.instance.json")],
        "hex" | "torus-2" | "torus-3" | "square-index2" => vec![
            "periodic".into(),
            format!("{name}.pgraph.json"),
            format!("{name}.w.json"),
        ],
        _ => vec![
            "graph".into(),
            format!("{name}.graph.json"),
            format!("{name}.action.json"),
        ],
    }
}

#[test]
fn golden_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (name, code) in [
        ("shear", 0),
        ("double-shear", 0),
        ("c4-rotation", 0),
        ("p2-swap", 0),
        ("k3-s3", 0),
        ("two-triangles-swap", 0),
        ("hex", 0),
        ("torus-2", 0),
        ("torus-3", 0),
        ("square-index2", 3),
    ] {
        assert_eq!(run(dir.path(), &["fixtures", name]).0, 0, "{name}");
        let args = analysis_args(name);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, text, _) = run(dir.path(), &args);
        assert_eq!(got, code, "{name}: {text}");
        golden(&format!("{name}.txt"), &text);
        let mut json_args = args.clone();
        json_args.push("--json");
        let (_, json, _) = run(dir.path(), &json_args);
        golden(&format!("{name}.json"), &json);
    }
}

#[test]
fn unknown_fixture_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(dir.path(), &["fixtures", "octahedron"]);
    assert_eq!(code, 2);
    assert!(err.contains("hex") && err.contains("torus-d"), "{err}");
    let (code, out, _) = run(dir.path(), &["fixtures", "--json"]);
    assert_eq!(code, 0);
    assert!(out.contains("two-triangles-swap"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("broken.json"), "{\"dim_U\": 2,").unwrap();
    let (code, out, _) = run(p, &["analyze", "broken.json", "--json"]);
    assert_eq!(code, 2);
    assert!(
        out.contains("\"kind\": \"parse\"") && out.contains("\"line\""),
        "{out}"
    );

    fs::write(
        p.join("not-equivariant.json"),
        r#"{"dim_U":1,"dim_W":1,"pi":[["1"]],"generators":[{"gU":[["2"]],"gW":[["3"]]}]}"#,
    )
    .unwrap();
    let (code, out, _) = run(p, &["analyze", "not-equivariant.json", "--json"]);
    assert_eq!(code, 2);
    assert!(out.contains("not_equivariant"), "{out}");

    let (code, _, _) = run(p, &["analyze", "missing.json"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(p, &["verify", "--max-dim", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(p, &["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(p, &["--json", "--text", "fixtures"]);
    assert_eq!(code, 2);

    assert_eq!(run(p, &["fixtures", "c4-rotation"]).0, 0);
    fs::write(p.join("bad-action.json"), r#"{"generators":[[1,0,2,3]]}"#).unwrap();
    let (code, out, _) = run(p, &["graph", "c4-rotation.graph.json", "bad-action.json"]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn keyed_cochain_and_radius() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(run(p, &["fixtures", "hex"]).0, 0);
    fs::write(p.join("keyed.json"), r#"{"2": "-2", "0": "1/2", "1": 3}"#).unwrap();
    let (code, keyed, _) = run(
        p,
        &[
            "periodic",
            "hex.pgraph.json",
            "keyed.json",
            "--radius",
            "3",
            "--json",
        ],
    );
    assert_eq!(code, 0);
    assert!(keyed.contains("\"checks\": 147"), "{keyed}");
    let (_, positional, _) = run(
        p,
        &[
            "periodic",
            "hex.pgraph.json",
            "hex.w.json",
            "--radius",
            "3",
            "--json",
        ],
    );
    let result = |s: &str| {
        let v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["result"].clone()
    };
    assert_eq!(result(&keyed), result(&positional));
}

#[test]
fn loop_voltage_refused() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("loop.pgraph.json"),
        r#"{"vertices":1,"edges":[{"id":0,"o":0,"t":0}],"d":2,"voltages":{"0":[2,0]}}"#,
    )
    .unwrap();
    fs::write(p.join("loop.w.json"), "[\"1\"]").unwrap();
    let (code, out, err) = run(p, &["periodic", "loop.pgraph.json", "loop.w.json"]);
    assert_eq!(code, 3, "{out}");
    assert!(
        err.contains("period lattice not full: rank 1 of 2"),
        "{err}"
    );
}

#[test]
fn verify_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--seed",
        "3",
        "--count",
        "60",
        "--max-dim",
        "5",
        "--json",
    ];
    let (code, first, _) = run(dir.path(), &args);
    assert_eq!(code, 0, "{first}");
    assert_eq!(run(dir.path(), &args).1, first);
    assert_eq!(
        fs::read_dir(dir.path()).unwrap().count(),
        0,
        "no reproducer on success"
    );
}

fn json_result(out: &str) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(out).unwrap();
    v["result"].clone()
}

#[test]
fn spec_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();

    let (_, out, _) = run(p, &["fixtures", "shear"]);
    assert!(out.contains("shear.instance.json"));
    let r = json_result(&run(p, &["analyze", "shear.instance.json", "--json"]).1);
    assert_eq!(
        (r["dim"].as_u64(), r["iff_holds"].as_bool()),
        (Some(1), Some(true))
    );

    let identity = serde_json::to_string(&eqcohom::fixtures::identity()).unwrap();
    fs::write(p.join("identity.json"), identity).unwrap();
    let (code, out, _) = run(p, &["analyze", "identity.json", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(json_result(&out)["dim"], 0);

    run(p, &["fixtures", "c4-rotation"]);
    let r = json_result(
        &run(
            p,
            &[
                "graph",
                "c4-rotation.graph.json",
                "c4-rotation.action.json",
                "--json",
            ],
        )
        .1,
    );
    assert_eq!(r["dim"], 0);

    run(p, &["fixtures", "torus-2"]);
    fs::write(p.join("w.json"), r#"["5", "-3"]"#).unwrap();
    let r = json_result(&run(p, &["periodic", "torus-2.pgraph.json", "w.json", "--json"]).1);
    assert_eq!(r["decomposition"]["a"], serde_json::json!([["5"], ["-3"]]));
    assert_eq!(r["decomposition"]["f"], serde_json::json!(["0"]));
    assert_eq!(r["truncation"]["radius"], 2);

    run(p, &["fixtures", "torus-3"]);
    let pg: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(p.join("torus-3.pgraph.json")).unwrap()).unwrap();
    assert_eq!(
        (pg["vertices"].as_u64(), pg["d"].as_u64()),
        (Some(1), Some(3))
    );
    assert_eq!(pg["edges"].as_array().unwrap().len(), 3);

    let (code, out, _) = run(p, &["verify", "--count", "0", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(json_result(&out)["violations"], 0);
}
