use std::path::Path;
use std::process::{Command, Output};

use ris_fading::cli::csv::SWEEP_HEADER;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ris-fading"))
        .args(args)
        .output()
        .expect("spawn ris-fading")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

#[test]
fn selftest_passes() {
    let o = bin(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("identity,argument,method"));
    assert!(column(&text, "pass").iter().all(|p| p == "true"));
}

#[test]
fn metrics_point_matches_library() {
    let o = bin(&[
        "metrics", "--n-cells", "8", "--m", "1", "--m-s", "5", "--eta-db", "10", "--metric", "capacity,ber,outage",
        "--variant", "exact,quadrature",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER);
    assert_eq!(text.lines().count(), 1 + 6);
    let values: Vec<f64> = column(&text, "value").iter().map(|v| v.parse().unwrap()).collect();
    let cap = values[0];
    assert!((cap - 6.2684291853587638).abs() < 1e-9, "{cap}");
    assert!((values[0] / values[1] - 1.0).abs() < 1e-6);
    assert!((values[2] / 8.128322647026787e-10 - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_writes_families_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "[sweep]\naxis = \"eta_db\"\nstart = 0\nstop = 30\nsteps = 4\nmetrics = [\"ber\", \"outage\"]\n\
         variants = [\"exact\", \"asymptotic\", \"mc\"]\n[link]\nn_cells = [1, 8]\nlambda = [1, 0.5]\ngamma_th_db = 3\n\
         [mc]\nsamples = 20000\nseed = 7\n",
    );
    let out = dir.path().join("rows.csv");
    let o = bin(&["sweep", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 2 * 3 * 4);
    assert!(column(&text, "variant").iter().any(|v| v == "mc"));
}

#[test]
fn sweep_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "[sweep]\naxis = \"p_s_dbm\"\nstart = -5\nstop = 25\nsteps = 7\nmetrics = [\"capacity\", \"ber\", \"outage\"]\n\
         variants = [\"mc\"]\n[link]\nn_cells = [2, 4]\n",
    );
    let a = bin(&["sweep", &cfg, "--threads", "1", "--seed", "11", "--mc-samples", "10000"]);
    let b = bin(&["sweep", &cfg, "--threads", "4", "--seed", "11", "--mc-samples", "10000"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = bin(&["sweep", &cfg, "--threads", "4", "--seed", "12", "--mc-samples", "10000"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn physical_mode_is_accepted() {
    let o = bin(&[
        "metrics", "--n-cells", "4", "--eta-db", "10", "--variant", "mc", "--mc-mode", "physical", "--mc-samples", "10000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: f64 = column(&stdout(&o), "value")[0].parse().unwrap();
    assert!(v > 1.0 && v < 10.0, "{v}");
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[sweep]\naxis = \"eta_db\"\nstart = 0\nstop = 1\nsteps = 2\n\n[link]\nm_s = 0.5\n");
    let o = bin(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("m_s") && e.contains("line 8"), "{e}");

    let cfg = write(dir.path(), "typo.toml", "[sweep]\naxis = \"eta_db\"\nstart = 0\nstop = 1\nsteps = 2\nmetric = [\"ber\"]\n");
    let o = bin(&["sweep", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("metric"), "{}", stderr(&o));

    let o = bin(&["sweep", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(bin(&["metrics", "--m-s", "1"]).status.code(), Some(2));
    assert_eq!(bin(&["metrics", "--variant", "mc", "--mc-samples", "10"]).status.code(), Some(2));
    assert_eq!(bin(&["metrics", "--metric", "snr"]).status.code(), Some(2));
    assert_eq!(bin(&["validate", "--preset", "huge"]).status.code(), Some(2));
}
