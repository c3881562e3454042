use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn edited(name: &str, dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(config(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn cli(args: &[&str], cfg: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bifluid-lab"));
    cmd.args(args).arg("--quiet").arg("--out").arg(out);
    if let Some(c) = cfg {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn homogeneous_run_has_a_flat_ledger() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = cli(&["run"], Some(&config("run_homogeneous.json")), &out);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let (header, rows) = csv_rows(&out.join("ledger.csv"));
    let res = column(&header, "residual");
    assert_eq!(rows.len(), 21);
    for r in &rows {
        assert_eq!(r[res].parse::<f64>().unwrap(), 0.0);
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "completed");
    assert!(out.join("checkpoints/trajectory.json").exists());
}

#[test]
fn band_violating_data_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = edited("run_homogeneous.json", tmp.path(), |v| {
        v["initial"]["z"] = json!([{ "fraction": { "profile": "constant", "value": 1.5 } }]);
    });
    let o = cli(&["run"], Some(&cfg), &tmp.path().join("run"));
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("leaves the band"), "{}", text(&o.stderr));

    let cfg = edited("run_homogeneous.json", tmp.path(), |v| {
        v["region"] = json!({ "a_lower": [0.6], "a_upper": [0.4] });
    });
    let o = cli(&["run"], Some(&cfg), &tmp.path().join("run2"));
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("admissible band"), "{}", text(&o.stderr));
}

#[test]
fn unstable_run_exits_with_blow_up() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = cli(&["run"], Some(&config("run_stiff.json")), &out);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "blow_up");
    assert!(out.join("ledger.csv").exists());
}

#[test]
fn audits_report_through_the_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = tmp.path().join("ok");
    assert_eq!(cli(&["audit"], Some(&config("audit_separable.json")), &ok).status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(ok.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");

    let bad = tmp.path().join("bad");
    let o = cli(&["audit"], Some(&config("audit_bifluid_bad.json")), &bad);
    assert_eq!(o.status.code(), Some(3));
    let report = fs::read_to_string(bad.join("report.json")).unwrap();
    assert!(report.contains("\"bifluid.gamma_bar\""), "{report}");
    assert!(report.contains("Gamma_bar = 74/5"), "{report}");

    let broken = tmp.path().join("broken.json");
    fs::write(&broken, "{ \"law\": ").unwrap();
    assert_eq!(cli(&["audit"], Some(&broken), &tmp.path().join("x")).status.code(), Some(1));
    assert_eq!(cli(&["audit"], None, &tmp.path().join("y")).status.code(), Some(1));
}

#[test]
fn bifluid_table_has_one_row_per_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let o = cli(&["bifluid-table"], Some(&config("bifluid_table.json")), &out);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let (_, rows) = csv_rows(&out.join("table.csv"));
    assert!(!rows.is_empty());
    for r in &rows {
        for cell in r {
            assert!(cell.parse::<f64>().map_or(true, f64::is_finite), "{cell}");
        }
    }
}

#[test]
fn dt_study_fits_a_first_order_residual() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = Command::new(env!("CARGO_BIN_EXE_bifluid-lab"))
        .args(["study", "--quiet", "--jobs", "3", "--config"])
        .arg(config("study_dt.json"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let (header, rows) = csv_rows(&out.join("study.csv"));
    assert_eq!(rows.len(), 3);
    let slope: f64 = rows[0][column(&header, "residual_slope")].parse().unwrap();
    assert!(slope >= 0.9, "residual slope {slope}");
    for i in 0..3 {
        assert!(out.join(format!("run_{i}/ledger.csv")).exists());
    }

    // rebuilding from the stored runs reproduces the table byte for byte
    let again = tmp.path().join("again");
    let cfg = edited("study_dt.json", tmp.path(), |v| {
        v["reuse"] = json!(out);
    });
    let o = cli(&["study"], Some(&cfg), &again);
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert_eq!(
        fs::read(out.join("study.csv")).unwrap(),
        fs::read(again.join("study.csv")).unwrap()
    );
}

#[test]
fn study_is_reproducible_and_handles_edge_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let single = edited("study_delta.json", tmp.path(), |v| {
        v["values"] = json!([0.001]);
    });
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(cli(&["study"], Some(&single), &a).status.code(), Some(0));
    assert_eq!(cli(&["study"], Some(&single), &b).status.code(), Some(0));
    let csv_a = fs::read(a.join("study.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("study.csv")).unwrap());
    let (header, rows) = csv_rows(&a.join("study.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][column(&header, "residual_slope")], "");
    assert_eq!(rows[0][column(&header, "penalty_slope")], "");

    let missing = edited("study_delta.json", tmp.path(), |v| {
        v["reuse"] = json!("/nonexistent/study/dir");
    });
    let o = cli(&["study"], Some(&missing), &tmp.path().join("c"));
    assert_eq!(o.status.code(), Some(1));

    let dup = edited("study_delta.json", tmp.path(), |v| {
        v["values"] = json!([0.001, 0.001]);
    });
    assert_eq!(cli(&["study"], Some(&dup), &tmp.path().join("d")).status.code(), Some(1));
}

#[test]
fn in_process_entry_point_matches_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let code = bifluid_lab::cli::main_with_args([
        "bifluid-lab",
        "run",
        "--quiet",
        "--config",
        config("run_homogeneous.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(bifluid_lab::cli::main_with_args(["bifluid-lab", "nonsense"]), 1);
}
