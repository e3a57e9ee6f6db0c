use std::fs;
use std::path::Path;
use std::process::Command;

use kcc_cli::{parse_config, run_experiment, Case, Group};

fn kcc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kcc")).args(args).output().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    fs::write(&config, "[sweep]\nomega_c = logspace(0.5, 10, 4)\n[numerics]\ngrid_steps = 600\n").unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let o = kcc(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(fa.len(), 13);
    assert_eq!(fa, fb);
}

#[test]
fn default_sweep_reproduces_figure_trends() {
    let cfg = parse_config("outputs = viol, rates").unwrap();
    let r = run_experiment(&cfg, None).unwrap();
    assert_eq!(r.exit_code(), 0);
    let summary = r.file("summary.csv").unwrap();
    let viol = column(summary, "viol");
    assert_eq!(viol.len(), 20);
    assert!(viol.windows(2).all(|w| w[1] < w[0]));
    let (m, n) = (column(summary, "M"), column(summary, "N"));
    assert!(m.iter().zip(&n).all(|(m, n)| m > n));
    let area: Vec<f64> = m.iter().zip(&n).map(|(m, n)| m + n).collect();
    assert!(area.windows(2).all(|w| w[1] > w[0]));
    let csv = r.file("viol.csv").unwrap();
    assert!(csv.starts_with("omega_c,t1,t2,viol,S_factor,M,N,bound\n"));
}

#[test]
fn case2_sweep_decreases() {
    let cfg = parse_config("case = case2\nOmega = 0.5\nomega_c = logspace(0.5, 10, 6)\noutputs = viol\n").unwrap();
    assert_eq!(cfg.case, Case::Case2);
    assert_eq!(cfg.outputs, vec![Group::Viol]);
    let r = run_experiment(&cfg, None).unwrap();
    let viol = column(r.file("viol.csv").unwrap(), "viol");
    assert!(viol.windows(2).all(|w| w[1] < w[0]), "{viol:?}");
}

#[test]
fn invalid_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    fs::write(&config, "t1 = 40\n").unwrap();
    let o = kcc(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1") && err.contains("t1"), "{err}");
    let o = kcc(&["viol", "--set", "horizon=-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn group_subcommand_accepts_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let o = kcc(&[
        "witnesses",
        "--set",
        "omega_c=1,2",
        "--set",
        "grid_steps=600",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("witnesses.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(column(&csv, "residual").iter().all(|&r| r < 1e-10));
    assert!(!out.join("viol.csv").exists());
}

#[test]
fn check_runs_selected_criteria() {
    let o = kcc(&["check", "--only", "4,11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 2, "{text}");
}
