use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multiphase"))
        .args(args)
        .env_remove("MULTIPHASE_THREADS")
        .output()
        .expect("spawn multiphase")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

const HEAT: &str = r#"[model]
name = "heat"
n = 2
eta = 0.05
analysis_only = false

[drag]
law = "unit"

[pressure_q]
law = "constant"
size = 3
values = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]

[pressure_r]
size = 3
values = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
"#;

#[test]
fn lists_presets() {
    let o = bin(&["presets"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for name in ["tumor-jb", "vf-busenberg-travis", "vf-skt", "multiphase-skt", "maxwell-stefan", "thin-film"] {
        assert!(s.contains(name), "{name} missing:\n{s}");
    }
}

#[test]
fn shows_tumor_parameters() {
    let o = bin(&["presets", "--show", "tumor-jb"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("beta_c = 0.2"), "{s}");
    assert!(s.contains("beta_m = 0.0015"), "{s}");
    assert!(s.contains("theta = 30"), "{s}");
}

#[test]
fn unknown_preset_is_a_config_error() {
    assert_eq!(code(&bin(&["presets", "--show", "nope"])), 2);
}

#[test]
fn scan_finds_counterexample_violations() {
    let o = bin(&["analyze", "--preset", "vf-skt", "--scan", "--resolution", "8"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("violation at"), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cx.toml");
    let text = r#"[model]
name = "cx"
n = 2
eta = 0.0
analysis_only = false

[drag]
law = "constant"
size = 3
k = [0.0, 1.0, 1.0, 1.0, 0.0, 10.0, 1.0, 10.0, 0.0]

[pressure_q]
law = "constant"
size = 3
values = [0.0, 0.0, 0.0, 0.0, 1.0, 10.0, 0.0, 10.0, 1.0]

[pressure_r]
size = 3
values = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
"#;
    fs::write(&cfg, text).unwrap();
    let o = bin(&["analyze", "--config", cfg.to_str().unwrap(), "--scan", "--resolution", "16", "--region", "0.1,0.25,0.55,0.75"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("violation at"), "{}", stdout(&o));
}

#[test]
fn classify_verdicts() {
    let o = bin(&["classify", "--k", "1,2,1.9", "--q", "1,0.2,0.2,1"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("verdict: certified"), "{s}");
    assert_eq!(s.matches("verdict:").count(), 1, "{s}");

    let o = bin(&["classify", "--k", "1,1,2", "--q", "1,0.1,0.1,1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("unclassified"), "{}", stdout(&o));

    assert_eq!(code(&bin(&["classify", "--k", "1,2", "--q", "1,0,0,1"])), 2);
}

#[test]
fn zero_horizon_dumps_initial_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bin(&["simulate", "--preset", "tumor-jb", "--N", "50", "--T", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = traj.lines().collect();
    assert_eq!(lines[0], "t,x,u1,u2,u0");
    assert_eq!(lines.len(), 51);
    assert!(out.join("run.meta").exists());
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--N", "40", "--T", "0.02", "--sample-every", "5", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    bin(&args)
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = small_run(&a, &["--preset", "vf-skt", "--snapshots", "0.01"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let meta = a.join("run.meta");
    let o = small_run(&b, &["--manifest", meta.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "diagnostics.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(meta).unwrap()).unwrap();
    assert_eq!(m["schema_version"], 1);
    assert_eq!(m["artifacts"].as_array().unwrap().len(), 2);
}

#[test]
fn repeated_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(code(&small_run(&a, &["--preset", "tumor-jb"])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_multiphase"))
        .args(["simulate", "--preset", "tumor-jb", "--N", "40", "--T", "0.02", "--sample-every", "5", "--out"])
        .arg(&b)
        .env("MULTIPHASE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(b.join("trajectory.csv")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    // wrong pressure law for the override
    assert_eq!(code(&small_run(&out, &["--preset", "vf-skt", "--theta", "3"])), 2);
    // analysis-only model
    assert_eq!(code(&small_run(&out, &["--preset", "maxwell-stefan"])), 2);
    assert_eq!(code(&bin(&["simulate"])), 2);
    assert_eq!(code(&bin(&["no-such-command"])), 2);
    assert_eq!(code(&bin(&["--help"])), 0);
    // backward-parabolic regime: Newton fails on the first step
    let o = bin(&[
        "simulate", "--preset", "tumor-jb", "--beta-c", "1", "--beta-m", "1", "--theta", "100", "--N", "600", "--T", "0.002",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let o = Command::new(env!("CARGO_BIN_EXE_multiphase"))
        .args(["presets"])
        .env("MULTIPHASE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn converge_needs_three_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "converge", "--preset", "tumor-jb", "--meshes", "50", "--reference", "200", "--T", "0",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn heat_converges_at_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("heat.toml");
    fs::write(&cfg, HEAT).unwrap();
    let o = bin(&[
        "converge", "--config", cfg.to_str().unwrap(), "--meshes", "25,50,100,200", "--reference", "1600",
        "--T", "0.05", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let rate: f64 = s
        .lines()
        .find_map(|l| l.strip_prefix("fitted L1 rate: "))
        .and_then(|l| l.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .expect("rate line");
    assert!(rate >= 1.9, "{s}");
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn matrix_dump_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("m.json");
    let o = bin(&["matrix", "--preset", "vf-skt", "--u", "0.3,0.4", "--json", json.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("eig(K^-1 A)"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["model"], "vf-skt");
    assert!(code(&bin(&["matrix", "--preset", "vf-skt", "--u", "0.3"])) == 2);
}
