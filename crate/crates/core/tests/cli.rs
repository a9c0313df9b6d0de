use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gnnbench(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnnbench"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |out: &str| vec!["generate", "--preset", "cora-like", "--seed", "7", "--nodes", "600", "--edges", "1000", "--out", out].into_iter().map(String::from).collect::<Vec<_>>();
    for out in ["a", "b"] {
        let a = args(out);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let stdout = ok(&gnnbench(&refs, tmp.path()));
        assert!(stdout.starts_with("effective configuration:"));
        assert!(stdout.contains("\"master_seed\": 7"));
    }
    let a = dir_bytes(&tmp.path().join("a"));
    assert_eq!(a.len(), 4);
    assert_eq!(a, dir_bytes(&tmp.path().join("b")));
}

#[test]
fn extract_then_identity_transform() {
    let tmp = tempfile::tempdir().unwrap();
    ok(&gnnbench(&["generate", "--preset", "planted", "--nodes", "200", "--edges", "400", "--attrs", "10", "--classes", "3", "--out", "data"], tmp.path()));
    ok(&gnnbench(&["extract", "data", "--out", "feat"], tmp.path()));
    ok(&gnnbench(&["transform", "feat/features.json", "--beta", "0", "--out", "same"], tmp.path()));
    assert_eq!(
        fs::read(tmp.path().join("feat/features.json")).unwrap(),
        fs::read(tmp.path().join("same/features.json")).unwrap()
    );
    ok(&gnnbench(&["transform", "feat/features.json", "--beta", "8", "--out", "het"], tmp.path()));
    assert_ne!(
        fs::read(tmp.path().join("feat/features.json")).unwrap(),
        fs::read(tmp.path().join("het/features.json")).unwrap()
    );
}

#[test]
fn beta_sweep_bench_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"{
        "version": 1,
        "preset": "planted",
        "nodes": 150, "edges": 300, "attrs": 12, "classes": 3,
        "sweep": {"kind": "preference", "values": [0, 2, 4, 6, 8]},
        "models": ["mlp", "gcn"],
        "protocol": {"record_timing": false},
        "grids": {
            "mlp": {"weight_decay": [0.0005], "learning_rate": [0.01], "patience": [20], "hidden_size": [16], "max_epochs": 60},
            "gcn": {"weight_decay": [0.0005], "learning_rate": [0.01], "patience": [20], "hidden_size": [16], "max_epochs": 60}
        },
        "out": "run"
    }"#;
    fs::write(tmp.path().join("beta_sweep.json"), config).unwrap();
    let stdout = ok(&gnnbench(&["bench", "--config", "beta_sweep.json"], tmp.path()));
    assert!(stdout.contains("\"graphs_per_setting\": 3"));

    let mut reader = csv::Reader::from_path(tmp.path().join("run/report.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (value, model, agg) = (col("axis_value"), col("model"), col("agg"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    for m in ["mlp", "gcn"] {
        let aggregates = rows.iter().filter(|r| &r[model] == m && &r[agg] == "1").count();
        assert_eq!(aggregates, 5, "{m}");
        for beta in ["0", "2", "4", "6", "8"] {
            let records = rows
                .iter()
                .filter(|r| &r[model] == m && &r[agg] == "0" && &r[value] == beta)
                .count();
            assert_eq!(records, 9, "{m} beta={beta}");
        }
    }
    assert_eq!(rows.len(), 2 * 5 * 10);
    assert!(tmp.path().join("run/config.json").exists());
    assert!(tmp.path().join("run/plotdata/preference_f1_macro.tsv").exists());

    // the resolved config reruns to the same report
    ok(&gnnbench(&["bench", "--config", "run/config.json", "--out", "rerun"], tmp.path()));
    assert_eq!(
        fs::read(tmp.path().join("run/report.csv")).unwrap(),
        fs::read(tmp.path().join("rerun/report.csv")).unwrap()
    );

    let table = ok(&gnnbench(&["report", "run/report.csv"], tmp.path()));
    assert!(table.contains("gcn") && table.contains("±"));
}

#[test]
fn malformed_config_exits_one_and_names_key() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("bad.json"), r#"{"version": 1, "nodez": 10}"#).unwrap();
    let out = gnnbench(&["generate", "--config", "bad.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodez"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(gnnbench(&["generate", "--nodes", "many"], tmp.path()).status.code(), Some(1));
    assert_eq!(gnnbench(&["generate", "--beta", "-1"], tmp.path()).status.code(), Some(1));
    assert_eq!(gnnbench(&["extract", "missing"], tmp.path()).status.code(), Some(2));
    assert_eq!(gnnbench(&["--help"], tmp.path()).status.code(), Some(0));
}

#[test]
fn gradcheck_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let stdout = ok(&gnnbench(&["gradcheck"], tmp.path()));
    assert_eq!(stdout.lines().filter(|l| l.ends_with("\tok")).count(), 3);
    assert!(fs::read_dir(tmp.path()).unwrap().next().is_none());
}
