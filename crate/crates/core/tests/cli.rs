use std::process::Command;

fn nco() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nco"));
    c.env_remove("NCO_SEED");
    c
}

fn config(name: &str) -> String {
    format!("{}/configs/{name}.cfg", env!("CARGO_MANIFEST_DIR"))
}

fn short_config(dir: &std::path::Path, extra: &str) -> std::path::PathBuf {
    let text = std::fs::read_to_string(config("fig2_topleft")).unwrap().replace("T = 100000", "T = 2000");
    let path = dir.join("short.cfg");
    std::fs::write(&path, format!("{text}{extra}")).unwrap();
    path
}

#[test]
fn classify_region_prints_reasons() {
    let out = nco().args(["classify-region", "--mu", "0.2", "--nu", "0.3"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "Outside(mu <= 1/2, nu <= (1+mu)/2)");
    let out = nco().args(["classify-region", "--mu", "0.75", "--nu", "1"]).output().unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "InR1");
}

#[test]
fn run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "");
    let csv = dir.path().join("out/run.csv");
    let out = nco().args(["run", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("final delta") && stdout.contains("region"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,delta,std_max,xbar_norm,f_gap,dist_opt,sum_alpha_delta,x_1_1"));
    assert_eq!(text.lines().count(), 1 + 1 + 20);
}

#[test]
fn seed_flag_beats_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "");
    let run = |seed: Option<&str>, env: Option<&str>, name: &str| {
        let csv = dir.path().join(name);
        let mut c = nco();
        c.args(["run", "--quiet", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        if let Some(e) = env {
            c.env("NCO_SEED", e);
        }
        assert!(c.status().unwrap().success());
        std::fs::read(csv).unwrap()
    };
    let file = run(None, None, "a.csv");
    assert_eq!(file, run(None, Some("99"), "b.csv"));
    assert_eq!(run(Some("99"), None, "c.csv"), run(Some("99"), Some("5"), "d.csv"));
    assert_ne!(file, run(Some("99"), None, "e.csv"));
}

#[test]
fn env_seed_fills_missing_seed() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(short_config(dir.path(), "")).unwrap().replace("seed = 1\n", "");
    let cfg = dir.path().join("noseed.cfg");
    std::fs::write(&cfg, text).unwrap();
    let csv = dir.path().join("x.csv");
    let out = nco().args(["run", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
    let status = nco()
        .env("NCO_SEED", "1")
        .args(["run", "--quiet", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "graph.colour = red\n");
    let out = nco().args(["run", "--config", cfg.to_str().unwrap(), "--out", "/dev/null"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 17") && err.contains("graph.colour"), "{err}");
}

#[test]
fn non_finite_initial_state_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "x0 = 0; 0; NaN; 0; 0; 0\n");
    let csv = dir.path().join("a.csv");
    let out = nco().args(["run", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-finite"));
    assert!(!csv.exists());
}

#[test]
fn validate_schedule_prints_both_forms() {
    let out = nco().args(["validate-schedule", "--config", &config("fig2_topleft")]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(c) sum alpha^2/beta < inf       FAIL"));
    assert!(text.lines().any(|l| l == "cond_c=fail"));
    assert!(text.lines().any(|l| l == "all_pass=false"));
}

#[test]
fn sweep_writes_cells_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(dir.path(), "");
    let out_dir = dir.path().join("sweep");
    let status = nco()
        .args(["sweep", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
        .args(["--mu", "0.2,0.75", "--nu", "0.3,1.0"])
        .status()
        .unwrap();
    assert!(status.success());
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
    assert!(summary.contains("0.75,1.0,true"));
    assert!(summary.contains("0.2,0.3,false"));
    assert!(out_dir.join("mu0.2_nu0.3.csv").exists());

    let empty = dir.path().join("empty");
    let status = nco().args(["sweep", "--config", cfg.to_str().unwrap(), "--out", empty.to_str().unwrap()]).status().unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(empty.join("summary.csv")).unwrap(), "mu,nu,in_r1,final_delta,final_dist\n");
}

#[test]
fn check_lemmas_rejects_unknown_suite() {
    let out = nco().args(["check-lemmas", "--suite", "weekly"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
