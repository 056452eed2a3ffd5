//! Command behaviour through the built binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::json;

fn cfml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfml"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, config: serde_json::Value) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_vec_pretty(&config).unwrap()).unwrap();
    p
}

fn itemrec_config(count: usize) -> serde_json::Value {
    json!({
        "synthetic": {"count": count, "seed": 5},
        "task": "item-recommendation",
        "baselearners": [
            {"algorithm": "MostPopular"},
            {"algorithm": "BPRMF", "epochs": 5},
            {"algorithm": "WBPRMF", "epochs": 5}
        ],
        "folds": 2,
        "metafeatures": ["RM", "GR"],
        "meta_features": ["RM"],
        "metalearners": [{"kind": "KNN", "grid": [{"k": 2}]}],
    })
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(p)
        .unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn extract_writes_schema_sized_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), itemrec_config(3));
    let out = cfml(&["extract", "--config", path_arg(&cfg)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let gr = csv_rows(&dir.path().join("out/gr.csv"));
    assert_eq!(gr.len(), 4);
    assert!(gr.iter().all(|r| r.len() == 762));
    let rm = csv_rows(&dir.path().join("out/rm.csv"));
    assert_eq!(rm[0].len(), 74);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/manifest-extract.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["complete"], true);
    assert_eq!(manifest["timings_ms"].as_object().unwrap().len(), 6);
}

#[test]
fn failed_extraction_keeps_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    // Too few ratings for a landmarker sample.
    let tiny = dir.path().join("tiny.csv");
    fs::write(&tiny, "u1,i1,5\nu1,i2,3\nu2,i1,4\nu2,i3,2\nu3,i2,3\n").unwrap();
    let mut config = itemrec_config(2);
    config["corpus"] = json!([{"path": "tiny.csv"}]);
    config["metafeatures"] = json!(["RM", "SL"]);
    let cfg = write_config(dir.path(), config);
    let out = cfml(&["extract", "--config", path_arg(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tiny"));
    let partial = csv_rows(&dir.path().join("out/rm.csv.partial"));
    assert_eq!(partial.len(), 3);
    assert!(!dir.path().join("out/rm.csv").exists());
}

#[test]
fn baselevel_grid_dry_run_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), itemrec_config(2));
    let cfg_s = path_arg(&cfg);

    let out = cfml(&["baselevel", "--config", cfg_s, "--dry-run"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("6 cells to run"));
    assert!(!dir.path().join("out").exists());

    let out = cfml(&["baselevel", "--config", cfg_s]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let perf = dir.path().join("out/performance.csv");
    let rows = csv_rows(&perf);
    assert_eq!(rows.len(), 1 + 12);
    let fresh = fs::read(&perf).unwrap();

    // A checkpoint with one doctored finished cell: resume must keep it.
    let mut partial = String::from("dataset,algorithm,measure,value,orientation\n");
    partial.push_str("synth-00,MostPopular,NDCG,0.123,higher-better\n");
    partial.push_str("synth-00,MostPopular,AUC,0.456,higher-better\n");
    fs::write(dir.path().join("out/performance.csv.partial"), partial).unwrap();
    let out = cfml(&["baselevel", "--config", cfg_s, "--resume", "--dry-run"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("5 cells to run"));
    let out = cfml(&["baselevel", "--config", cfg_s, "--resume"]);
    assert!(out.status.success());
    let resumed = fs::read_to_string(&perf).unwrap();
    assert!(resumed.contains("synth-00,MostPopular,NDCG,0.123,higher-better"));
    assert!(!dir.path().join("out/performance.csv.partial").exists());

    // Without --resume the checkpoint is ignored.
    let out = cfml(&["baselevel", "--config", cfg_s]);
    assert!(out.status.success());
    assert_eq!(fs::read(&perf).unwrap(), fresh);
}

fn performance_csv(rows: &[(&str, &str, &str, f64)]) -> String {
    let mut s = String::from("dataset,algorithm,measure,value,orientation\n");
    for (d, a, m, v) in rows {
        s.push_str(&format!("{d},{a},{m},{v},higher-better\n"));
    }
    s
}

fn metatarget_config(dir: &Path) -> PathBuf {
    let mut config = itemrec_config(2);
    config["synthetic"] = json!(null);
    config["corpus"] = json!([{"id": "d1", "path": "r.csv"}, {"id": "d2", "path": "r.csv"}]);
    fs::write(dir.join("r.csv"), "u,i,1\n").unwrap();
    write_config(dir, config)
}

#[test]
fn metatarget_alignment_of_agreeing_and_antagonistic_measures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = metatarget_config(dir.path());
    let algs = ["MostPopular", "BPRMF", "WBPRMF"];
    let mut agree = Vec::new();
    let mut oppose = Vec::new();
    for d in ["d1", "d2"] {
        for (a, alg) in algs.iter().enumerate() {
            let v = 0.5 + 0.1 * a as f64 + if d == "d2" { 0.05 } else { 0.0 };
            agree.push((d, *alg, "NDCG", v));
            agree.push((d, *alg, "AUC", v * v));
            oppose.push((d, *alg, "NDCG", v));
            oppose.push((d, *alg, "AUC", 1.0 - v));
        }
    }
    let perf = dir.path().join("agree.csv");
    fs::write(&perf, performance_csv(&agree)).unwrap();
    let out = cfml(&[
        "metatarget",
        "--config",
        path_arg(&cfg),
        "--performance",
        path_arg(&perf),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = csv_rows(&dir.path().join("out/alignment.csv"));
    assert_eq!(rows[0], ["dataset", "measure", "correlation"]);
    assert!(rows[1..].iter().all(|r| r[2] == "1"), "{rows:?}");
    assert_eq!(
        csv_rows(&dir.path().join("out/alignment_flagged.csv")).len(),
        1
    );

    fs::write(&perf, performance_csv(&oppose)).unwrap();
    let out = cfml(&[
        "metatarget",
        "--config",
        path_arg(&cfg),
        "--performance",
        path_arg(&perf),
    ]);
    assert!(out.status.success());
    let flagged = csv_rows(&dir.path().join("out/alignment_flagged.csv"));
    assert_eq!(
        flagged[0],
        [
            "Dataset",
            "M1",
            "M2",
            "corr(M1, Multicriteria)",
            "corr(M2, Multicriteria)"
        ]
    );
    assert_eq!(flagged.len(), 3);
    assert_eq!(&flagged[1][..3], ["d1", "NDCG", "AUC"]);
}

#[test]
fn incomplete_performance_table_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = metatarget_config(dir.path());
    let perf = dir.path().join("holes.csv");
    let rows = [
        ("d1", "MostPopular", "NDCG", 0.5),
        ("d1", "MostPopular", "AUC", 0.5),
        ("d2", "MostPopular", "NDCG", 0.5),
    ];
    fs::write(&perf, performance_csv(&rows)).unwrap();
    let out = cfml(&[
        "metatarget",
        "--config",
        path_arg(&cfg),
        "--performance",
        path_arg(&perf),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(d2, MostPopular, AUC)"), "{err}");
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = itemrec_config(2);
    config["measures"] = json!(["RMSE"]);
    let cfg = write_config(dir.path(), config);
    let out = cfml(&["extract", "--config", path_arg(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(cfml(&["extract"]).status.code(), Some(1));
    assert_eq!(cfml(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(cfml(&["--help"]).status.code(), Some(0));
}

#[test]
fn meta_reports_include_baseline_and_full_impact_curves() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = itemrec_config(6);
    config["metalearners"] =
        json!([{"kind": "KNN", "grid": [{"k": 2}]}, {"kind": "RF", "grid": [{"trees": 10}]}]);
    config["svg"] = json!(true);
    let cfg = write_config(dir.path(), config);
    let out = cfml(&["run", "--config", path_arg(&cfg)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out_dir = dir.path().join("out");
    let summary = csv_rows(&out_dir.join("scores_summary.csv"));
    let learners: Vec<&str> = summary[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(learners, ["AVG", "KNN", "RF"]);
    let impact = csv_rows(&out_dir.join("impact.csv"));
    for learner in ["AVG", "KNN", "RF", "oracle"] {
        let n = impact[1..].iter().filter(|r| r[1] == learner).count();
        assert_eq!(n, 3, "{learner}");
    }
    assert!(csv_rows(&out_dir.join("importance_rm.csv")).len() <= 11);
    let sidecar = fs::read_to_string(out_dir.join("cd.txt")).unwrap();
    assert!(sidecar.starts_with("cd="));
    for svg in ["scores.svg", "impact.svg", "cd.svg"] {
        assert!(fs::read_to_string(out_dir.join(svg))
            .unwrap()
            .starts_with("<svg"));
    }
    let out = cfml(&["report", "--config", path_arg(&cfg)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("KNN"));
}

#[test]
fn synth_writes_a_runnable_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfml(&[
        "synth",
        "--out",
        path_arg(dir.path()),
        "--count",
        "4",
        "--seed",
        "2",
    ]);
    assert!(out.status.success());
    let cfg = dir.path().join("config.json");
    let out = cfml(&["extract", "--config", path_arg(&cfg), "--dry-run"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("synth-03"));
}
