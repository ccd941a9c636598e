use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkd-decoy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cutoff(stdout: &str, protocol: &str) -> f64 {
    let line = stdout
        .lines()
        .find(|l| l.starts_with(protocol))
        .unwrap_or_else(|| panic!("no line for {protocol} in {stdout}"));
    line.split("distance ")
        .nth(1)
        .and_then(|s| s.trim_end_matches(" km").parse().ok())
        .unwrap_or_else(|| panic!("bad line {line}"))
}

fn rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn gys_all_protocols() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["--preset", "gys", "--protocol", "all", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!((cutoff(&stdout, "bb84-decoy") - 142.0).abs() <= 5.0);
    assert!((cutoff(&stdout, "sarg04-no-decoy") - 97.0).abs() <= 5.0);
    assert!(cutoff(&stdout, "nonorthogonal-decoy") > 142.0);

    for name in ["bb84-decoy", "sarg04-no-decoy", "nonorthogonal-decoy"] {
        let r = rows(&dir.path().join(format!("{name}.csv")));
        assert_eq!(r[0], "distance_km,mu,rate");
        assert_eq!(r.len(), 252);
        let cols: Vec<f64> = r[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[0], 0.0);
        assert!(cols[2] > 0.0);
    }
    let raw = fs::read(dir.path().join("bb84-decoy.csv")).unwrap();
    assert!(!raw.contains(&b'\r'));
}

#[test]
fn degenerate_range_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "--protocol",
        "bb84-decoy",
        "--distance",
        "0:0:1",
        "--out",
        out,
    ]);
    assert!(o.status.success());
    assert_eq!(rows(&dir.path().join("bb84-decoy.csv")).len(), 2);
}

#[test]
fn fixed_mu_curve_d() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&[
        "--mu",
        "0.30",
        "--protocol",
        "nonorthogonal-decoy",
        "--out",
        out,
    ]);
    assert!(o.status.success());
    let r = rows(&dir.path().join("nonorthogonal-decoy.csv"));
    assert!(r[1..]
        .iter()
        .all(|l| l.split(',').nth(1) == Some("3.00000000000e-1")));
    assert!(!dir.path().join("bb84-decoy.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&[
            "--protocol",
            "all",
            "--distance",
            "0:200:0.5",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    for name in ["bb84-decoy", "sarg04-no-decoy", "nonorthogonal-decoy"] {
        let file = format!("{name}.csv");
        assert_eq!(
            fs::read(a.path().join(&file)).unwrap(),
            fs::read(b.path().join(&file)).unwrap()
        );
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# two signal intensities\npreset = gys\nprotocol = nonorthogonal-decoy\nmu = 0.30,0.48\ndistance = 0:10:5\nalpha = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("csv");
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "0.21",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("nonorthogonal-decoy.csv"));
    assert_eq!(r.len(), 1 + 2 * 3);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 2);
    // alpha = 0.21 from the flag, not 0.5 from the file
    assert!(cutoff(&stdout, "nonorthogonal-decoy mu=0.3:") > 140.0);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "wavelength = 1550\n").unwrap();
    let o = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));

    let o = run(&["--edet", "0.9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--distance", "5:1:1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "--protocol",
        "bb84-decoy",
        "--mu",
        "optimal",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn constraint_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "--protocol",
        "nonorthogonal-decoy",
        "--nu3",
        "0.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("nu3 < nu2"), "{err}");
}
