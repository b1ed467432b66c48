use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mlspin::grid::{gradient, ScalarField};
use mlspin::snapshot::{read_snapshot, write_snapshot};

const SMALL: &str = r#"{
  "grid": {"L": 16, "N": 24},
  "fields": {"envelope_radius": 3.5, "amplitude": 0.05},
  "run": {"T": 0.4, "observe_every": 2, "snapshot_every": 5}
}"#;

fn mlspin(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mlspin"));
    cmd.args(args).env_remove("MLSPIN_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn mlspin")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_default_config_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "default.json", "{}");
    let out = mlspin(&["check", s(&cfg), "--quiet"], &[]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{table}");
    assert_eq!(table.matches("PASS").count(), 13);
    assert!(out.stderr.is_empty());
}

#[test]
fn check_zero_field_state_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.json", r#"{"grid": {"N": 32}, "fields": {"init": "zero"}}"#);
    let out = mlspin(&["check", s(&cfg)], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn check_corrupted_gauge_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"run": {"T": 0, "snapshot_every": 1}}"#);
    let run = dir.path().join("run");
    assert_eq!(mlspin(&["simulate", s(&cfg), "--out", s(&run), "--quiet"], &[]).status.code(), Some(0));
    let snap = run.join("snapshot_000000.bin");
    let mut y = read_snapshot(&mut fs::File::open(&snap).unwrap()).unwrap();
    assert_eq!(mlspin(&["check", s(&cfg), "--state", s(&snap)], &[]).status.code(), Some(0));

    let chi = ScalarField::from_fn(*y.grid(), |x| 0.05 * (-x.norm_squared() / 3.0).exp());
    y.a = y.a.add_scaled(&gradient(&chi), 1.0).unwrap();
    let bad = dir.path().join("bad.bin");
    write_snapshot(&mut fs::File::create(&bad).unwrap(), &y).unwrap();
    let out = mlspin(&["check", s(&cfg), "--state", s(&bad)], &[]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{table}");
    let gauge = table.lines().find(|l| l.starts_with("gauge")).unwrap();
    assert!(gauge.ends_with("FAIL"), "{gauge}");
}

#[test]
fn invalid_config_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\n  \"grid\": {\"N\": 32},\n  \"run\": {\"dtt\": 0.1}\n}");
    for args in [vec!["check", s(&cfg)], vec!["simulate", s(&cfg), "--out", s(dir.path())]] {
        let out = mlspin(&args, &[]);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("bad.json:3:") && err.contains("dtt"), "{err}");
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(mlspin(&["check", s(&missing)], &[]).status.code(), Some(2));
    let ok = write(dir.path(), "ok.json", "{}");
    assert_eq!(mlspin(&["check", s(&ok)], &[("MLSPIN_THREADS", "zero")]).status.code(), Some(2));
}

#[test]
fn unstable_step_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "hot.json",
        r#"{"grid": {"N": 16}, "fields": {"envelope_radius": 3}, "run": {"dt": 2.0, "T": 400}}"#,
    );
    let out = mlspin(&["simulate", s(&cfg), "--out", s(&dir.path().join("o")), "--quiet"], &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blow-up"));
}

#[test]
fn simulate_output_format_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let run = |name: &str, threads: &str, extra: &[&str]| {
        let out_dir = dir.path().join(name);
        let mut args = vec!["simulate", s(&cfg), "--out", s(&out_dir), "--quiet"];
        args.extend_from_slice(extra);
        let out = mlspin(&args, &[("MLSPIN_THREADS", threads)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (fs::read_to_string(out_dir.join("invariants.csv")).unwrap(), out_dir)
    };
    let (one, dir1) = run("t1", "1", &[]);
    let (three, _) = run("t3", "3", &[]);
    assert_eq!(one, three, "output depends on thread count");

    let lines: Vec<&str> = one.lines().collect();
    assert_eq!(lines[0], "t,H,P1,P2,P3,Pc1,Pc2,Pc3,J1,J2,J3,Jc1,Jc2,Jc3,pi_norm,div_A_max,div_Pi_max,gauss_residual");
    // dt = 0.1 h = 1/15, T = 0.4: 6 steps, rows at 0, 2, 4, 6
    assert_eq!(lines.len(), 5);
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 18);
        for c in cells {
            let mantissa = c.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{c} lacks 17 significant digits");
            c.parse::<f64>().unwrap();
        }
    }
    let h: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(h.iter().all(|v| ((v - h[0]) / h[0]).abs() < 1e-5));

    let mut snaps: Vec<String> =
        fs::read_dir(&dir1).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    snaps.sort();
    assert_eq!(snaps, ["invariants.csv", "snapshot_000000.bin", "snapshot_000005.bin", "snapshot_000006.bin"]);
    let last = read_snapshot(&mut fs::File::open(dir1.join("snapshot_000006.bin")).unwrap()).unwrap();
    assert_eq!(last.grid().n(), 24);

    let (reseeded, _) = run("seed", "2", &["--seed", "99"]);
    assert_ne!(reseeded, one);
}
