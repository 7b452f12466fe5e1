use std::path::Path;
use std::process::{Command, Output};

fn arsel(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arsel"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn figure_mdep_writes_csv_and_png() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "f.toml",
        "experiment = \"figure_mdep\"\nt_grid = [41, 141]\nm_values = [1, 5]\n",
    );
    let out = arsel(&["figure", "mdep", &cfg, "--reps", "50", "--out", "./out"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/fig_mdep.csv")).unwrap();
    assert!(csv.starts_with("m,t,mean_order,stderr,count\n"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",50")));
    assert!(dir.path().join("out/fig_mdep.png").exists());
    assert!(dir.path().join("out/manifest.json").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = arsel(&["bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn nonstationary_garch_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "e.toml",
        r#"experiment = "efficiency"
[process]
innovation = { kind = "garch", omega = 0.1, alpha = 0.5, beta = 0.5 }
ma = { kind = "identity" }
"#,
    );
    let out = arsel(&["efficiency", &cfg, "--out", "./out"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let line = stderr.lines().last().unwrap();
    let err: serde_json::Value = serde_json::from_str(line).unwrap();
    assert_eq!(err["kind"], "validation");
    assert_eq!(err["field"], "process.innovation.alpha+beta");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn config_for_another_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "experiment = \"clt\"\n");
    let out = arsel(&["efficiency", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(err["field"], "experiment");
}

#[test]
fn malformed_config_is_a_single_line_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "experiment = \"clt\"\nreplications = \"many\"\n",
    );
    let out = arsel(&["clt", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1);
    let err: serde_json::Value = serde_json::from_str(stderr.trim_end()).unwrap();
    assert_eq!(err["kind"], "config");
}

#[test]
fn simulate_fit_select_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = arsel(&["simulate", "--out", "sim", "--seed", "3"], dir.path());
    assert!(out.status.success());
    let path = std::fs::read_to_string(dir.path().join("sim/path.csv")).unwrap();
    assert!(path.starts_with("t,x\n"));
    assert_eq!(path.lines().count(), 1 + 1000);
    let cfg = write(
        dir.path(),
        "s.toml",
        "experiment = \"select\"\ninput_path = \"sim/path.csv\"\ncriteria = [\"aic_log\", \"fpe\"]\n",
    );
    let out = arsel(&["select", &cfg, "--out", "sel"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sel = std::fs::read_to_string(dir.path().join("sel/selection.csv")).unwrap();
    assert!(sel.starts_with("criterion,k_hat\n"));
    assert_eq!(sel.lines().count(), 3);
    let out = arsel(&["fit", &cfg, "--out", "fit"], dir.path());
    assert_eq!(out.status.code(), Some(1), "select config must not drive fit");
}

#[test]
fn same_seed_same_bytes_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "g.toml",
        "experiment = \"figure_garch\"\nt_grid = [41, 241]\np_values = [2.0, 4.0]\n",
    );
    for (threads, out) in [("1", "a"), ("3", "b")] {
        let o = arsel(
            &[
                "figure",
                "garch",
                &cfg,
                "--reps",
                "20",
                "--threads",
                threads,
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success());
    }
    let a = std::fs::read(dir.path().join("a/fig_garch.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/fig_garch.csv")).unwrap();
    assert_eq!(a, b);
}
