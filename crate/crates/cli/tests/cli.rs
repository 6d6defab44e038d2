use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kpp(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpp"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(k).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn means_for_fisher() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(dir.path(), &["means"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "means.csv");
    assert_eq!(
        csv.lines().next().unwrap(),
        "a_arith,a_harm,mu_arith,p0,c_star_hom"
    );
    assert_eq!(column(&csv, "c_star_hom"), vec![2.0]);
    assert!(dir.path().join("manifest.toml").exists());
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(dir.path(), &["--preset", "no-such-preset", "means"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn period_outside_unit_interval_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for l in ["0", "-0.5", "1.5"] {
        let out = kpp(dir.path(), &["speed-sweep", "--L", l]);
        assert_eq!(out.status.code(), Some(2), "L = {l}");
    }
    assert!(!dir.path().join("speed_sweep.csv").exists());
}

#[test]
fn oversized_time_step_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(dir.path(), &["simulate", "--dt", "0.7", "--T", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constant_speed_sweep_has_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(dir.path(), &["speed-sweep", "--L", "0.25", "--L", "0.0625"]);
    assert!(out.status.success());
    let csv = read(dir.path(), "speed_sweep.csv");
    assert_eq!(column(&csv, "L"), vec![0.25, 0.0625]);
    for g in column(&csv, "gap") {
        assert!(g.abs() < 1e-8, "{g}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "--preset",
        "cos-diffusion-09",
        "steady-sweep",
        "--L",
        "0.125",
        "--L",
        "0.03125",
        "--grid-n",
        "64",
    ];
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(kpp(d1.path(), &args).status.success());
    assert!(kpp(d2.path(), &args).status.success());
    let csv = "steady_sweep.csv";
    assert_eq!(
        fs::read(d1.path().join(csv)).unwrap(),
        fs::read(d2.path().join(csv)).unwrap()
    );
    // the manifests differ only in the output directory they record
    let manifest = |d: &Path| -> String {
        read(d, "manifest.toml")
            .lines()
            .filter(|l| !l.starts_with("out = "))
            .collect()
    };
    assert_eq!(manifest(d1.path()), manifest(d2.path()));
}

#[test]
fn heterogeneous_growth_is_refused_for_fronts() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(
        dir.path(),
        &["--preset", "het-mu", "speed-sweep", "--L", "0.25"],
    );
    assert_eq!(out.status.code(), Some(2));
    let out = kpp(
        dir.path(),
        &["--preset", "het-mu", "steady-sweep", "--L", "0.25"],
    );
    assert!(out.status.success());
}

#[test]
fn short_simulation_writes_its_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(
        dir.path(),
        &[
            "simulate", "--L", "0.25", "--grid-n", "16", "--X", "20", "--T", "8", "--format",
            "binary",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = fs::read(dir.path().join("space_time.bin")).unwrap();
    let (times, xs, values) = kpp_core::io::read_grid_binary(&bytes).unwrap();
    assert_eq!(values.len(), times.len());
    assert!(values.iter().all(|row| row.len() == xs.len()));
    let trace = read(dir.path(), "trace.csv");
    assert_eq!(trace.lines().next().unwrap(), "t,x_theta");
    let summary = read(dir.path(), "simulate.csv");
    assert!(summary.starts_with("L,c_star,c_measured,rel_gap,pulsating_residual,monotone_in_t\n"));
}

#[test]
fn small_compare_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = kpp(dir.path(), &["compare", "--L", "0.125"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "convergence.csv");
    let d = column(&csv, "distance");
    assert_eq!(d.len(), 1);
    assert!(d[0] < 2e-2, "{d:?}");
    assert!(read(dir.path(), "profile.csv").starts_with("x,U0\n"));
}
