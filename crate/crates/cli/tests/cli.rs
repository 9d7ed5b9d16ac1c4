use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use drharmonic::radial::import_spectral;
use drharmonic::{derive_params, CheckReport};
use drharmonic_cli::{emit_plot_data, load_config, CheckName, ConfigError};
use tempfile::TempDir;

const SPACE: &str = "[space]\nm = 2\nk = 1\n";

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn drharmonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drharmonic"))
        .args(args)
        .env_remove("DRHARMONIC_OUT_DIR")
        .output()
        .unwrap()
}

fn check(config: &Path, out: &Path) -> Output {
    drharmonic(&[
        "check",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

fn data_rows(csv: &str) -> usize {
    csv.lines().count() - 1
}

#[test]
fn minimal_config_gets_defaults() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), &format!("checks = [\"thm-forward\"]\n{SPACE}"));
    let cfg = load_config(&p).unwrap();
    assert_eq!(cfg.checks, vec![CheckName::Forward]);
    assert_eq!(cfg.params.d(), 4);
    assert_eq!(cfg.t_grid.len(), 32);
    assert_eq!(cfg.file.output_dir, None);
    assert_eq!(cfg.file.seed, None);
}

#[test]
fn unknown_key_is_named() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), &format!("{SPACE}alpha_jacobi = 1.5\n"));
    let e = load_config(&p).unwrap_err();
    assert!(matches!(e, ConfigError::Parse { .. }));
    let msg = e.to_string();
    assert!(msg.contains("alpha_jacobi"), "{msg}");
    assert!(msg.contains("line"), "{msg}");

    let out = check(&p, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_jacobi"));
}

#[test]
fn odd_m_is_rejected_with_context() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "[space]\nm = 3\nk = 1\n");
    let msg = load_config(&p).unwrap_err().to_string();
    assert!(msg.contains("`space`"), "{msg}");
    assert!(msg.contains("(m, k) = (3, 1)"), "{msg}");
    assert!(msg.contains("even"), "{msg}");
}

#[test]
fn phi_bounds_audit_passes() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), &format!("checks = [\"phi_bounds_audit\"]\n{SPACE}"));
    let out_dir = dir.path().join("out");
    let out = check(&p, &out_dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("lemma-phi-bounds.csv")).unwrap();
    assert!(data_rows(&csv) > 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], 0);
    assert_eq!(summary["checks"][0]["name"], "lemma-phi-bounds");
    assert_eq!(summary["checks"][0]["verdict"], "pass");
}

#[test]
fn converse_with_failed_zygmund_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        &format!(
            "checks = [\"converse_titchmarsh\"]\n{SPACE}\
             [modulus]\nkind = \"monomial\"\nalpha = 2.0\norder_k = 2.0\n"
        ),
    );
    let out_dir = dir.path().join("out");
    let out = check(&p, &out_dir);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(out_dir.join("thm-converse.txt")).unwrap();
    assert!(table.contains("verdict = inconclusive"), "{table}");
}

#[test]
fn empty_check_list_warns_and_passes() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), SPACE);
    let out_dir = dir.path().join("out");
    let out = check(&p, &out_dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("no checks requested"));
}

#[test]
fn forward_csv_shape_and_rerun_identity() {
    let dir = TempDir::new().unwrap();
    let p = write_config(
        dir.path(),
        &format!("checks = [\"thm-forward\", \"lem-dyadic\"]\n{SPACE}"),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(check(&p, &a).status.code(), Some(0));
    let out = drharmonic(&[
        "check",
        "--config",
        p.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let csv = fs::read_to_string(a.join("thm-forward.csv")).unwrap();
    assert!(csv.starts_with("grid,lhs,rhs,ratio\n"));
    assert!(csv.ends_with('\n'));
    assert_eq!(data_rows(&csv), 32);
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').count(), 4);
        assert!(line.split(',').all(|x| x.contains('e')), "{line}");
    }
    for f in ["thm-forward.csv", "thm-forward.txt", "lem-dyadic.csv", "lem-dyadic.txt", "summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_report_is_header_only() {
    let dir = TempDir::new().unwrap();
    let r = CheckReport::new("empty", &derive_params(2, 1).unwrap());
    let path = dir.path().join("empty.csv");
    emit_plot_data(&r, &path).unwrap();
    assert_eq!(fs::read_to_string(path).unwrap(), "grid,lhs,rhs,ratio\n");
}

#[test]
fn unwritable_output_is_io_status() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), &format!("checks = [\"converse-hypotheses\"]\n{SPACE}"));
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = check(&p, &blocker.join("sub"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn output_dir_precedence() {
    let dir = TempDir::new().unwrap();
    let env_dir = dir.path().join("from-env");
    let p = write_config(dir.path(), SPACE);
    let out = Command::new(env!("CARGO_BIN_EXE_drharmonic"))
        .args(["check", "--config", p.to_str().unwrap()])
        .env("DRHARMONIC_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("summary.json").exists());

    let cfg_dir = dir.path().join("from-config");
    let p = write_config(
        dir.path(),
        &format!("output_dir = {:?}\n{SPACE}", cfg_dir.to_str().unwrap()),
    );
    let out = Command::new(env!("CARGO_BIN_EXE_drharmonic"))
        .args(["check", "--config", p.to_str().unwrap()])
        .env("DRHARMONIC_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(cfg_dir.join("summary.json").exists());
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), SPACE);
    let out = drharmonic(&["check", "--config", p.to_str().unwrap(), "--tol-scale", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(drharmonic(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(drharmonic(&["check"]).status.code(), Some(1));
    assert_eq!(drharmonic(&["--help"]).status.code(), Some(0));
}

#[test]
fn phi_subcommand_tabulates() {
    let out = drharmonic(&["phi", "--m", "2", "--k", "1", "--lambda", "1", "--t", "0,0.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,phi,method,est_error");
    assert_eq!(lines.len(), 4);
    let phi0: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((phi0 - 1.0).abs() < 1e-14);
}

#[test]
fn params_subcommand_reads_config() {
    let dir = TempDir::new().unwrap();
    let p = write_config(dir.path(), "[space]\nm = 4\nk = 3\n");
    let out = drharmonic(&["params", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["m"], 4);
    assert_eq!(v["k"], 3);
}

#[test]
fn transform_output_feeds_file_profile() {
    let dir = TempDir::new().unwrap();
    let spec = dir.path().join("gauss.txt");
    let out = drharmonic(&[
        "transform",
        "--m",
        "2",
        "--k",
        "1",
        "--profile",
        "gauss",
        "--output",
        spec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&spec).unwrap();
    let g = import_spectral(&derive_params(2, 1).unwrap(), &text).unwrap();
    assert!(g.eval(0.0) > 0.0);

    let p = write_config(
        dir.path(),
        &format!("{SPACE}[profile]\nkind = \"file\"\npath = \"gauss.txt\"\n"),
    );
    let cfg = load_config(&p).unwrap();
    assert_eq!(cfg.fhat.eval(0.5), g.eval(0.5));
}
