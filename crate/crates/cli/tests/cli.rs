use std::path::Path;
use std::process::{Command, Output};

fn qb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qb")).args(args).output().unwrap()
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn fig(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_string_lossy().into_owned()
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let cfg = fig("fig4.toml");
    let a = qb(&["sweep", "--config", &cfg, "--jobs", "1"]);
    let b = qb(&["sweep", "--config", &cfg, "--jobs", "4"]);
    let c = qb(&["sweep", "--config", &cfg]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert!(!a.stdout.contains(&b'\r'));
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let cfg = fig("fig2.toml");
    let to_file = qb(&["discharge", "--config", &cfg, "--out", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let to_stdout = qb(&["discharge", "--config", &cfg]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn config_hash_tracks_content() {
    let dir = tempfile::tempdir().unwrap();
    let a = config(dir.path(), "a.toml", "samples = 4\n");
    let b = config(dir.path(), "b.toml", "samples = 4\nout = \"ignored-by-hash.csv\"\n");
    let c = config(dir.path(), "c.toml", "samples = 5\n");
    let first = |s: &str| s.lines().next().unwrap().to_string();
    let ha = first(&String::from_utf8(qb(&["discharge", "--config", &a]).stdout).unwrap());
    let out = dir.path().join("x.csv");
    assert!(qb(&["discharge", "--config", &b, "--out", out.to_str().unwrap()]).status.success());
    let hb = first(&std::fs::read_to_string(&out).unwrap());
    let hc = first(&String::from_utf8(qb(&["discharge", "--config", &c]).stdout).unwrap());
    assert!(ha.starts_with("# config_hash="));
    assert_eq!(ha, hb);
    assert_ne!(ha, hc);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text, cmd) in [
        ("unknown.toml", "omgea = 1.0\n", "recharge"),
        ("levels.toml", "omega_f = 0.5\n", "recharge"),
        ("syntax.toml", "omega = \n", "recharge"),
        ("wrong_cmd.toml", "command = \"discharge\"\n", "sweep"),
        ("no_axis.toml", "samples = 3\n", "sweep"),
        ("bad_variant.toml", "variants = [\"sine_sta\"]\n", "sweep"),
    ] {
        let path = config(dir.path(), name, text);
        let out = qb(&[cmd, "--config", &path]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(qb(&["recharge", "--config", "/nonexistent/qb.toml"]).status.code(), Some(2));
    assert_eq!(qb(&["sweep", "--config", &fig("fig4.toml"), "--jobs", "0"]).status.code(), Some(2));
}

#[test]
fn divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = config(dir.path(), "coarse.toml", "t_max = 50.0\nsamples = 1\nsteps = 5\n");
    let out = qb(&["discharge", "--config", &path, "--numeric"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn extraction_past_first_crossing_warns() {
    let dir = tempfile::tempdir().unwrap();
    let path = config(dir.path(), "late.toml", "gamma_f_tau = 1.5\nsamples = 2\n");
    let out = qb(&["recharge", "--config", &path]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("warning:"));
    let quiet = qb(&["recharge", "--config", &fig("fig3a.toml")]);
    assert!(quiet.stderr.is_empty());
}

#[test]
fn cost_reports_both_paths() {
    let out = qb(&["cost", "--config", &fig("cost.toml")]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["direct"]["eta"].as_f64().unwrap() - 0.9971).abs() < 5e-4);
    assert!((v["postselected"]["eta"].as_f64().unwrap() - 0.9812).abs() < 5e-4);
    let cm = v["postselected"]["measurement_cost"].as_f64().unwrap() / 1.7;
    assert!((cm - 0.0176).abs() < 1e-3);
}

#[test]
fn numeric_flag_matches_closed_form_recharge() {
    let cfg = fig("fig3a_marked.toml");
    let exact = String::from_utf8(qb(&["recharge", "--config", &cfg]).stdout).unwrap();
    let numeric = String::from_utf8(qb(&["recharge", "--config", &cfg, "--numeric"]).stdout).unwrap();
    assert!(numeric.contains("# integration=rk4"));
    let last = |s: &str| -> Vec<f64> { s.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect() };
    for (a, b) in last(&exact).iter().zip(last(&numeric)) {
        assert!((a - b).abs() < 1e-8);
    }
}
