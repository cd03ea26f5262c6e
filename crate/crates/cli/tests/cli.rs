use std::path::Path;
use std::process::{Command, Output};

fn predlearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_predlearn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_then_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# small run\nT = 40\nn = 6\nC = 4\n");
    let out = dir.path().join("m.csv");
    let o = predlearn(&["matching", "--config", &cfg, "--trials", "2", "--seed", "9", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 81);
    let side = std::fs::read_to_string(dir.path().join("m.csv.cfg")).unwrap();
    assert!(side.contains("seed = 9"));

    let s = predlearn(&["summarize", out.to_str().unwrap()]);
    assert!(s.status.success());
    let text = String::from_utf8_lossy(&s.stdout);
    assert!(text.contains("pass rate 1.000000"), "{text}");
    assert!(text.contains("audited"));
}

#[test]
fn stdout_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "n = 4\n");
    let args = ["perm", "--config", cfg.as_str(), "--T", "25", "--trials", "3"];
    let a = predlearn(&args);
    let b = predlearn(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).starts_with("trial,t,loss,cum_loss,comparator_loss,regret,bound,action_digest\n"));
}

#[test]
fn failing_trials_set_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(
        &csv,
        "trial,t,loss,cum_loss,comparator_loss,regret,bound,action_digest\n0,1,9,9,0,9,1,0011223344556677\n",
    )
    .unwrap();
    let s = predlearn(&["summarize", csv.to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&s.stdout).contains("FAIL"));
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "T = 10\nwindow = 3\n");
    let o = predlearn(&["matching", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key \"window\""));

    let missing = predlearn(&["summarize", dir.path().join("nope.csv").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.csv"));

    let o = predlearn(&["matching", "--config", &cfg, "--set", "oops"]);
    assert_eq!(o.status.code(), Some(2));
}
