use std::path::Path;
use std::process::{Command, Output};

fn iids(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iids"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path) -> std::path::PathBuf {
    let data = dir.join("data.csv");
    let out = iids(&[
        "generate",
        "--counts",
        "200,80,20",
        "--informative",
        "3",
        "--noise",
        "3",
        "--separation",
        "2.0",
        "--seed",
        "4",
        "--out",
        path(&data),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    data
}

const CONFIG: &str = "\
hierarchy = none
levels = fine34
frameworks = ALL+ROS, CFS+BRFC
forest.num_trees = 20
";

#[test]
fn run_report_and_predict() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path());
    let config = tmp.path().join("batch.conf");
    std::fs::write(&config, CONFIG).unwrap();
    let out_dir = tmp.path().join("out");

    let out = iids(&["run", "--config", path(&config), "--data", path(&data), "--out", path(&out_dir), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 3, "{stdout}");
    assert!(stdout.contains("FW4:CFS+BRFC"));

    let table = std::fs::read_to_string(out_dir.join("metrics_table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(out_dir.join("per_class_f1.csv").exists());
    assert!(out_dir.join("usc_gains.txt").exists());
    assert!(out_dir.join("results/00-FW1-Base-fine34.result").exists());
    assert!(out_dir.join("features/02-FW4-CFS+BRFC-fine34.txt").exists());

    // Merging the result files reproduces the same tables.
    let merged = tmp.path().join("merged");
    let out = iids(&["report", "--out", path(&merged), path(&out_dir.join("results"))]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["metrics_table.csv", "per_class_f1.csv", "usc_gains.txt"] {
        assert_eq!(
            std::fs::read(out_dir.join(name)).unwrap(),
            std::fs::read(merged.join(name)).unwrap(),
            "{name}"
        );
    }

    let preds = tmp.path().join("pred.csv");
    let model = out_dir.join("models/02-FW4-CFS+BRFC-fine34.iids");
    let out = iids(&["predict", "--model", path(&model), "--input", path(&data), "--out", path(&preds)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&preds).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("prediction,label"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 300);
    let correct = rows
        .iter()
        .filter(|r| {
            let (p, l) = r.split_once(',').unwrap();
            p == l
        })
        .count();
    assert!(correct > 240, "{correct}/300");
}

#[test]
fn runs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path());
    let config = tmp.path().join("batch.conf");
    std::fs::write(&config, CONFIG).unwrap();
    let mut tables = Vec::new();
    for run in ["a", "b"] {
        let dir = tmp.path().join(run);
        let out = iids(&["run", "--config", path(&config), "--data", path(&data), "--out", path(&dir)]);
        assert!(out.status.success());
        tables.push(std::fs::read(dir.join("usc_gains.txt")).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn exit_codes_distinguish_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(tmp.path());
    let out_dir = tmp.path().join("out");

    // Unknown config key: configuration error.
    let out = iids(&["run", "--data", path(&data), "--out", path(&out_dir), "--set", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));

    // Missing flag: usage error.
    assert_eq!(iids(&["run", "--data", path(&data)]).status.code(), Some(2));

    // Non-numeric cell: data error.
    let bad = tmp.path().join("bad.csv");
    std::fs::write(&bad, "a,label\n1,x\noops,y\n").unwrap();
    let out = iids(&["run", "--data", path(&bad), "--out", path(&out_dir), "--set", "hierarchy=none"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    // Synthetic labels are not in the built-in hierarchy: relabel stage fails.
    let out = iids(&["run", "--data", path(&data), "--out", path(&out_dir), "--set", "forest.num_trees=5"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));

    // Missing input file: i/o error.
    let out = iids(&["run", "--data", path(&tmp.path().join("none.csv")), "--out", path(&out_dir), "--set", "hierarchy=none"]);
    assert_eq!(out.status.code(), Some(1));

    // Corrupt model file: data error.
    let model = tmp.path().join("junk.iids");
    std::fs::write(&model, b"not a model").unwrap();
    let out = iids(&["predict", "--model", path(&model), "--input", path(&data), "--out", path(&out_dir.join("p.csv"))]);
    assert_eq!(out.status.code(), Some(3));

    assert_eq!(iids(&["--help"]).status.code(), Some(0));
}
