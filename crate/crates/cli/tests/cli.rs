use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vspk(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vspk"))
        .args(args)
        .env("VSPK_OUTPUT_ROOT", root)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], root: &Path) -> Output {
    let out = vspk(args, root);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dir_contents(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().into(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn small_orbits(root: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![
        "generate-orbits",
        "--orbits-per-label",
        "2",
        "--points",
        "60",
        "--seed",
        "5",
        "--out",
        s(out),
    ];
    args.extend_from_slice(extra);
    ok(&args, root);
}

#[test]
fn generate_orbits_counts_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    small_orbits(tmp.path(), &a, &["--top-k", "3"]);
    small_orbits(tmp.path(), &b, &["--top-k", "3"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["entries"].as_array().unwrap().len(), 10);
    let diagrams = fs::read_dir(&a)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("orbit_"))
        .count();
    assert_eq!(diagrams, 10);
    for e in manifest["entries"].as_array().unwrap() {
        let text = fs::read_to_string(a.join(e["file"].as_str().unwrap())).unwrap();
        assert!(text.lines().count() - 1 <= 3);
    }
    assert_eq!(dir_contents(&a), dir_contents(&b));
}

#[test]
fn compute_diagrams_of_the_square() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("clouds");
    fs::create_dir_all(&input).unwrap();
    fs::write(input.join("square.csv"), "0,0\n1,0\n1,1\n0,1\n").unwrap();
    fs::write(input.join("broken.csv"), "0,0\n1,x\n").unwrap();
    fs::write(tmp.path().join("labels.csv"), "file,label\nsquare.csv,box\n").unwrap();
    let out = tmp.path().join("diagrams");
    ok(
        &[
            "compute-diagrams",
            "--input",
            s(&input),
            "--labels",
            s(&tmp.path().join("labels.csv")),
            "--threshold-rule",
            "none",
            "--out",
            s(&out),
        ],
        tmp.path(),
    );
    let text = fs::read_to_string(out.join("square_h1.csv")).unwrap();
    assert_eq!(text, format!("dim,birth,death\n1,1,{}\n", 2f64.sqrt()));
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"box\""));
    assert!(manifest.contains("\"error\""));

    let small = tmp.path().join("small");
    ok(
        &["compute-diagrams", "--input", s(&input), "--threshold", "0.5", "--out", s(&small)],
        tmp.path(),
    );
    assert_eq!(fs::read_to_string(small.join("square_h1.csv")).unwrap(), "dim,birth,death\n");
}

#[test]
fn empty_input_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("empty");
    fs::create_dir_all(&input).unwrap();
    ok(&["compute-diagrams", "--input", s(&input)], tmp.path());
    let manifest = fs::read_to_string(tmp.path().join("diagrams/manifest.json")).unwrap();
    assert!(manifest.contains("\"entries\": []"));
}

#[test]
fn gram_shapes_and_identity_scaling() {
    let tmp = tempfile::tempdir().unwrap();
    let orbits = tmp.path().join("orbits");
    small_orbits(tmp.path(), &orbits, &["--top-k", "4"]);
    let none = tmp.path().join("none.csv");
    let comp = tmp.path().join("comp.csv");
    let again = tmp.path().join("again.csv");
    let base = ["gram", "--diagrams", s(&orbits), "--kernel", "pss", "--sigma", "0.1"];
    ok(&[&base[..], &["--out", s(&none)]].concat(), tmp.path());
    ok(&[&base[..], &["--out", s(&again)]].concat(), tmp.path());
    ok(
        &[&base[..], &["--scaling", "compress", "--rho", "4", "--out", s(&comp)]].concat(),
        tmp.path(),
    );
    let text = fs::read_to_string(&none).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.split(',').count() == 10));
    assert_eq!(text, fs::read_to_string(&comp).unwrap());
    assert_eq!(fs::read(&none).unwrap(), fs::read(&again).unwrap());
    let sidecar = fs::read_to_string(tmp.path().join("none.json")).unwrap();
    assert!(sidecar.contains("\"diagram_set\""));
    for kernel in ["pwg", "sw"] {
        ok(&["gram", "--diagrams", s(&orbits), "--kernel", kernel], tmp.path());
    }
}

#[test]
fn cross_validate_writes_a_report() {
    let tmp = tempfile::tempdir().unwrap();
    let orbits = tmp.path().join("orbits");
    ok(
        &[
            "generate-orbits",
            "--labels",
            "2.5,4.3",
            "--orbits-per-label",
            "6",
            "--points",
            "50",
            "--out",
            s(&orbits),
        ],
        tmp.path(),
    );
    ok(
        &["cross-validate", "--diagrams", s(&orbits), "--kernel", "sw", "--folds", "3"],
        tmp.path(),
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("cv_report.json")).unwrap()).unwrap();
    assert_eq!(report["grid"].as_array().unwrap().len(), 5 * 7);
    assert!(report["validation_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn run_experiment_rows_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("config.json");
    fs::write(
        &config,
        r#"{
            "dataset": {"orbits": {"labels": [2.5, 4.3], "orbits_per_label": 6, "points_per_orbit": 50}},
            "kernels": [{"kernel": "pss", "sigmas": [0.001, 0.01]}],
            "scalings": [null, {"scaling": {"compress": {"rho": 3}}, "auxiliary": "persistence"}],
            "top_k": 3,
            "n_folds": 3,
            "repetitions": 2,
            "zetas": [1.0, 10.0]
        }"#,
    )
    .unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        ok(
            &["run-experiment", "--config", s(&config), "--seed", "3", "--out", s(out)],
            tmp.path(),
        );
    }
    let report = fs::read_to_string(a.join("report.json")).unwrap();
    assert_eq!(report, fs::read_to_string(b.join("report.json")).unwrap());
    let table = fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(table.contains("none") && table.contains("compress(3)"));

    let parsed: serde_json::Value = serde_json::from_str(&report).unwrap();
    let scores = fs::read_to_string(a.join("scores.csv")).unwrap();
    for row in parsed["rows"].as_array().unwrap() {
        let per_run: Vec<f64> = scores
            .lines()
            .skip(1)
            .filter(|l| l.starts_with(&format!("PSS,{},", row["scaling"].as_str().unwrap())))
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect();
        assert_eq!(per_run.len(), 2);
        let mean = per_run.iter().sum::<f64>() / 2.0;
        assert!((mean - row["accuracy"].as_f64().unwrap()).abs() < 1e-12);
    }
    let predictions = fs::read_dir(a.join("predictions")).unwrap().count();
    assert_eq!(predictions, 4);
}

#[test]
fn oracle_check_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&["oracle-check", "--random", "7", "--seed", "2", "--max-dim", "2"], tmp.path());
    assert!(String::from_utf8_lossy(&out.stdout).contains("agree"));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(vspk(&["oracle-check", "--random", "13"], tmp.path()).status.code(), Some(1));
    assert_eq!(vspk(&["no-such-command"], tmp.path()).status.code(), Some(1));
    let missing = tmp.path().join("missing");
    assert_eq!(
        vspk(&["gram", "--diagrams", s(&missing), "--kernel", "pss"], tmp.path()).status.code(),
        Some(1)
    );
    let orbits = tmp.path().join("orbits");
    small_orbits(tmp.path(), &orbits, &[]);
    // a bandwidth this small overflows the normalising constant
    let out = vspk(
        &["gram", "--diagrams", s(&orbits), "--kernel", "pss", "--sigma", "1e-320"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(vspk(&["--help"], tmp.path()).status.code(), Some(0));
}
