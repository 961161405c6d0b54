use std::path::Path;
use std::process::{Command, Output};

fn pmetric(dir: &Path, command: &str, config: &str, extra: &[&str]) -> Output {
    let path = dir.join(format!("{command}.conf"));
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .arg(command)
        .arg("--config")
        .arg(&path)
        .args(extra)
        .output()
        .unwrap()
}

fn csv_rows(out: &Output) -> Vec<csv::StringRecord> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(out.stdout.as_slice());
    r.records().map(|x| x.unwrap()).collect()
}

fn header(out: &Output) -> Vec<String> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(out.stdout.as_slice());
    r.headers().unwrap().iter().map(String::from).collect()
}

#[test]
fn identity_ubdl_suite_measures_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(
        dir.path(),
        "ubdl",
        "suite=identity\ncount=4\nstages=3\ngrid_points=64\nd1_samples=50\n",
        &["--no-timestamp"],
    );
    assert_eq!(out.status.code(), Some(0));
    let h = header(&out);
    let measured = h.iter().position(|c| c == "measured").unwrap();
    for c in ["grid", "eps_guard", "seed", "code_version"] {
        assert!(h.iter().any(|x| x == c));
    }
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[measured].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn cancel_suites_pass_with_bound_above_gap() {
    let dir = tempfile::tempdir().unwrap();
    for config in [
        "suite=identity\ncount=3\ngrid_points=128\n",
        "suite=alternating\ncount=3\nstages=12\ndelta=0.25\ngrid_points=256\n",
        "suite=random\ncount=8\ngrid_points=256\nseed=5\n",
    ] {
        let out = pmetric(dir.path(), "cancel", config, &["--no-timestamp"]);
        assert_eq!(out.status.code(), Some(0), "{config}");
        let h = header(&out);
        let (gap, bound) = (
            h.iter().position(|c| c == "gap").unwrap(),
            h.iter().position(|c| c == "bound").unwrap(),
        );
        for r in csv_rows(&out) {
            assert!(r[bound].parse::<f64>().unwrap() + 1e-6 >= r[gap].parse::<f64>().unwrap());
        }
    }
}

#[test]
fn rigid_puresing_is_all_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(
        dir.path(),
        "puresing",
        "family=rigid\ndepth=10\nlambda=2\nkappa_min=3\nkappa_max=6\ngrid_points=256\n",
        &["--no-timestamp"],
    );
    assert_eq!(out.status.code(), Some(0));
    let h = header(&out);
    let gap = h.iter().position(|c| c == "gap").unwrap();
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[gap].parse::<f64>().unwrap().abs() < 1e-9));
}

#[test]
fn kappa_not_above_lambda_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(dir.path(), "puresing", "family=rigid\nlambda=3\nkappa_min=3\n", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rigid_partition_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(dir.path(), "partition", "family=rigid\ndepth=10\nk=3\n", &["--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let (body, footer) = rows.split_at(rows.len() - 1);
    // q_3 + q_2 elements
    assert_eq!(body.len(), 5);
    assert!(body.iter().all(|r| &r[2] == "lengthy" || &r[2] == "short"));
    let total: f64 = body.iter().map(|r| r[6].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(&footer[0][2], "tiling_defect");
    assert!(footer[0][6].parse::<f64>().unwrap() < 1e-8);
}

#[test]
fn deep_partition_needs_acknowledgement() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(dir.path(), "partition", "family=rigid\ndepth=14\nk=11\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    let out = pmetric(
        dir.path(),
        "partition",
        "family=rigid\ndepth=14\nk=11\nacknowledge_depth=true\n",
        &["--no-timestamp"],
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn configuration_errors_report_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = pmetric(dir.path(), "cancel", "count=3\n\nbogus=1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let missing = Command::new(env!("CARGO_BIN_EXE_pmetric"))
        .args(["cancel", "--config", "/nonexistent/run.conf"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = "suite=random\ncount=6\ngrid_points=256\n";
    let a = pmetric(dir.path(), "cancel", config, &["--no-timestamp", "--seed", "42"]);
    let b = pmetric(dir.path(), "cancel", config, &["--no-timestamp", "--seed", "42"]);
    let c = pmetric(dir.path(), "cancel", config, &["--no-timestamp", "--seed", "43"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let stamped = pmetric(dir.path(), "cancel", config, &["--seed", "42"]);
    assert!(stamped.stdout.starts_with(b"# generated_unix="));
}

#[test]
fn json_mirror_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("p.json");
    let out = pmetric(
        dir.path(),
        "partition",
        "family=rigid\ndepth=10\nk=2\n",
        &["--json", "--no-timestamp", "--out", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["columns"][2], "kind");
    assert!(v.get("generated_unix").is_none());
    // q_2 + q_1 elements and the footer
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}
