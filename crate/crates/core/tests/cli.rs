//! End-to-end runs of the `helmsweep` binary on tiny grids.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use helmsweep::config::RunConfig;
use helmsweep::Field2D;

fn helmsweep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helmsweep")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("run.ini");
    let text = format!(
        "# small smoke run\n[run]\nomega = 4pi\nmode = two-way\n\n[medium]\nmedium = homogeneous\nppw_x = 8\nppw_y = 6\n\n[pade]\npade_terms = 3\n\n[output]\ndir = {}\n{extra}",
        dir.join("out").display()
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn pade_prints_csv() {
    let out = helmsweep(&["pade", "--gamma", "-0.5", "--order", "3", "--theta-deg", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,M,theta_deg,m,re_a,im_a,re_b,im_b");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 8));
}

#[test]
fn pade_rejects_unknown_exponent() {
    let out = helmsweep(&["pade", "--gamma", "0.3", "--order", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = helmsweep(&["pade", "--gamma", "0.5", "--order", "6", "--provider", "table"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_residual_and_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "csv = true\n");
    let out = helmsweep(&["solve", "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("u_two residual"));

    let run = dir.path().join("out");
    for name in ["config.ini", "medium.csv", "u_one.cfld", "u_two.cfld", "u_one.csv", "u_two.csv", "residual.csv"] {
        assert!(run.join(name).exists(), "{name} missing");
    }
    let echoed = RunConfig::load(&run.join("config.ini")).unwrap();
    assert_eq!(echoed, RunConfig::load(&cfg_path).unwrap());
    let residual_csv = fs::read_to_string(run.join("residual.csv")).unwrap();
    assert_eq!(residual_csv.lines().count(), 3);

    let (u_two, omega) = Field2D::read(&run.join("u_two.cfld")).unwrap();
    assert_eq!(omega, 4.0 * std::f64::consts::PI);
    assert!(u_two.values.iter().all(|v| v.is_finite()));

    let out = helmsweep(&["residual", run.join("u_two.cfld").to_str().unwrap(), "--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let stored = residual_csv.lines().nth(2).unwrap();
    assert_eq!(Some(row), stored.strip_prefix("u_two,"));

    let pgm = dir.path().join("u.pgm");
    let out = helmsweep(&["render", run.join("u_two.cfld").to_str().unwrap(), "--mode", "abs", "--out", pgm.to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = fs::read(&pgm).unwrap();
    let header = format!("P5\n{} {}\n255\n", u_two.domain.nx, u_two.domain.ny);
    assert!(bytes.starts_with(header.as_bytes()));
    assert_eq!(bytes.len(), header.len() + u_two.domain.len());
}

#[test]
fn one_way_mode_override_writes_single_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "");
    let other = dir.path().join("elsewhere");
    let out = helmsweep(&[
        "solve",
        "--config",
        cfg_path.to_str().unwrap(),
        "--mode",
        "one-way",
        "--out",
        other.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(other.join("u_one.cfld").exists());
    assert!(!other.join("u_two.cfld").exists());
    assert!(!other.join("u_one.csv").exists());
}

#[test]
fn convergence_writes_table_and_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "");
    let study = dir.path().join("study");
    let out = helmsweep(&[
        "convergence",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        study.to_str().unwrap(),
        "--omegas",
        "4pi,8pi",
        "--orders",
        "2,3",
        "--jobs",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(study.join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.starts_with("M,omega="));
    assert_eq!(fs::read_to_string(study.join("convergence.csv")).unwrap().lines().count(), 5);
    assert_eq!(fs::read_dir(study.join("cells")).unwrap().count(), 4);
    assert!(study.join("config.ini").exists());
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    fs::write(&path, "[run]\nomega = 20pi\n[pade]\npade_terms = 5\npade_provider = table\n").unwrap();
    let out = helmsweep(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pade_terms"));

    fs::write(&path, "[run]\nomega 20pi\n").unwrap();
    let out = helmsweep(&["solve", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn corrupt_field_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "");
    let field = dir.path().join("junk.cfld");
    fs::write(&field, b"CFLD\x01\x00\x00\x00short").unwrap();
    let out = helmsweep(&["residual", field.to_str().unwrap(), "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("junk.cfld"));
}

#[test]
fn residual_rejects_mismatched_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "");
    let out = helmsweep(&["solve", "--config", cfg_path.to_str().unwrap(), "--mode", "one-way"]);
    assert!(out.status.success());
    let other = dir.path().join("other.ini");
    fs::write(&other, fs::read_to_string(&cfg_path).unwrap().replace("ppw_y = 6", "ppw_y = 10")).unwrap();
    let field = dir.path().join("out").join("u_one.cfld");
    let out = helmsweep(&["residual", field.to_str().unwrap(), "--config", other.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
