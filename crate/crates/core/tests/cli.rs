use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn scone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scone"))
        .args(args)
        .env_remove("SCONE_THREADS")
        .output()
        .expect("run scone")
}

fn ok(args: &[&str]) -> String {
    let out = scone(args);
    assert!(
        out.status.success(),
        "scone {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Value of `column` in the row whose first field is `key`, from `--format rows` output.
fn field(rows: &str, key: &str, column: &str) -> String {
    let mut lines = rows.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == column).unwrap();
    lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| f[0] == key)
        .map(|f| f[col].to_string())
        .unwrap_or_else(|| panic!("no row '{key}' in\n{rows}"))
}

#[test]
fn generate_fit_evaluate_reaches_high_auc() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    ok(&[
        "generate",
        "--mode",
        "varied",
        "--seed",
        "0",
        "--out",
        p(&data),
    ]);
    let manifest = data.join("manifest.txt");
    let scores = dir.path().join("scores.csv");
    ok(&[
        "fit-score",
        "--manifest",
        p(&manifest),
        "--psi",
        "8",
        "--k",
        "3",
        "--t",
        "200",
        "--out",
        p(&scores),
    ]);
    assert_eq!(fs::read_to_string(&scores).unwrap().lines().count(), 1001);
    let roc = dir.path().join("roc.csv");
    let rows = ok(&[
        "--format",
        "rows",
        "evaluate",
        "--scores",
        p(&scores),
        "--roc",
        p(&roc),
    ]);
    let auc: f64 = field(&rows, "overall", "auc").parse().unwrap();
    assert!(auc >= 0.99, "auc {auc}");
    let roc_text = fs::read_to_string(&roc).unwrap();
    assert!(roc_text.starts_with("fpr,tpr\n0,0\n"));
    assert!(roc_text.ends_with("1,1\n"));
}

#[test]
fn psi_one_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["generate", "--seed", "1", "--out", p(dir.path())]);
    let out = scone(&[
        "fit-score",
        "--manifest",
        p(&dir.path().join("manifest.txt")),
        "--psi",
        "1",
        "--out",
        p(&dir.path().join("s.csv")),
    ]);
    assert_ne!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("PSI_TOO_SMALL"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.txt");
    assert_eq!(
        scone(&["fit-score", "--manifest", p(&missing), "--out", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(scone(&["fit-score"]).status.code(), Some(1));
    assert_eq!(scone(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(scone(&["--help"]).status.code(), Some(0));
}

#[test]
fn model_from_another_dataset_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["generate", "--seed", "1", "--out", p(&a)]);
    ok(&["generate", "--seed", "2", "--out", p(&b)]);
    let model = dir.path().join("model.txt");
    let s1 = dir.path().join("s1.csv");
    ok(&[
        "fit-score",
        "--manifest",
        p(&a.join("manifest.txt")),
        "--t",
        "20",
        "--out",
        p(&s1),
        "--model",
        p(&model),
    ]);
    let s2 = dir.path().join("s2.csv");
    ok(&[
        "score",
        "--model",
        p(&model),
        "--manifest",
        p(&a.join("manifest.txt")),
        "--out",
        p(&s2),
    ]);
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());

    let out = scone(&[
        "score",
        "--model",
        p(&model),
        "--manifest",
        p(&b.join("manifest.txt")),
        "--out",
        p(&s2),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FINGERPRINT_MISMATCH"));

    fs::write(&model, "scone-model 9\n").unwrap();
    let out = scone(&[
        "score",
        "--model",
        p(&model),
        "--manifest",
        p(&a.join("manifest.txt")),
        "--out",
        p(&s2),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("VERSION_MISMATCH"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&[
        "generate",
        "--mode",
        "uniform",
        "--seed",
        "4",
        "--out",
        p(&a),
    ]);
    ok(&[
        "generate",
        "--mode",
        "uniform",
        "--seed",
        "4",
        "--out",
        p(&b),
    ]);
    for f in ["view1.csv", "view2.csv", "labels.txt"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let model = dir.path().join(format!("{name}.model"));
        ok(&[
            "--threads",
            threads,
            "fit-score",
            "--manifest",
            p(&a.join("manifest.txt")),
            "--t",
            "50",
            "--out",
            p(&out),
            "--model",
            p(&model),
        ]);
        (fs::read(out).unwrap(), fs::read(model).unwrap())
    };
    let first = run("x", "1");
    assert_eq!(first, run("y", "1"));
    assert_eq!(first, run("z", "3"));
}

#[test]
fn thread_count_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_scone"))
        .args(["theorems", "--draws", "1", "--trials", "10"])
        .env("SCONE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("USAGE"));
}

#[test]
fn several_seeds_get_their_own_directories() {
    let dir = tempfile::tempdir().unwrap();
    let rows = ok(&[
        "--format",
        "rows",
        "generate",
        "--seed",
        "3,5",
        "--normal",
        "60",
        "--attribute",
        "2",
        "--class",
        "2",
        "--class-attribute",
        "2",
        "--out",
        p(dir.path()),
    ]);
    assert_eq!(field(&rows, "5", "instances"), "66");
    for s in [3, 5] {
        assert!(dir.path().join(format!("seed-{s}/manifest.txt")).exists());
    }
}

#[test]
fn grid_search_needs_labels() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "generate",
        "--normal",
        "150",
        "--attribute",
        "4",
        "--class",
        "4",
        "--class-attribute",
        "4",
        "--out",
        p(dir.path()),
    ]);
    let scores = dir.path().join("s.csv");
    let rows = ok(&[
        "--format",
        "rows",
        "fit-score",
        "--manifest",
        p(&dir.path().join("manifest.txt")),
        "--t",
        "20",
        "--grid",
        "--out",
        p(&scores),
    ]);
    // one row per admissible (psi, k) pair, psi up to 128 for 162 instances
    let grid_rows = rows
        .lines()
        .take_while(|l| !l.starts_with("instances"))
        .count()
        - 1;
    assert_eq!(grid_rows, 1 + 2 + 4 + 5 + 6 + 7 + 8);

    fs::write(
        dir.path().join("unlabelled.txt"),
        "view = view1.csv\nview = view2.csv\n",
    )
    .unwrap();
    let out = scone(&[
        "fit-score",
        "--manifest",
        p(&dir.path().join("unlabelled.txt")),
        "--grid",
        "--out",
        p(&scores),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ablation_table_is_ordered() {
    let rows = ok(&[
        "--format", "rows", "ablate", "--mode", "varied", "--seeds", "0..5",
    ]);
    let auc = |v: &str| field(&rows, v, "mean_auc").parse::<f64>().unwrap();
    let (sph, nn1, vd) = (auc("spherical"), auc("spherical-1nn"), auc("voronoi"));
    assert!(sph >= nn1 && nn1 >= vd, "{sph} {nn1} {vd}");
}

#[test]
fn table_output_is_aligned() {
    let out = ok(&["theorems", "--draws", "2", "--trials", "1000"]);
    let header = out.lines().next().unwrap();
    assert_eq!(header, "view  mean_normals_in_sphere");
    assert!(out.contains("sparse above dense"));
}
