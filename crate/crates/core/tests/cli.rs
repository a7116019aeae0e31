use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "mass_u = 38.96370668\nradius_um = 5.9\nomega_perp_krad_s = 6.4\n";

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("scenario.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_oam-ring"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

/// Data rows of a CSV output, header comments and column names dropped.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|x| x.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect()
}

#[test]
fn missing_mass_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        "radius_um = 5.9\nomega_perp_krad_s = 6.4\n",
        &["spectrum"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("mass_u"));
}

#[test]
fn unknown_key_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &format!("{BASE}radius_mm = 1\n"), &["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius_mm"));
}

#[test]
fn missing_config_file_is_config_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_oam-ring"))
        .args(["spectrum", "--config", "/nonexistent/scenario.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = dir.path().join("scenario.cfg");
    fs::write(&cfg, BASE).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_oam-ring"))
        .args(["spectrum", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectrum_without_corrections_is_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), BASE, &["spectrum"]);
    assert!(out.status.success());
    let table = rows(&dir.path().join("out/spectrum.csv"));
    assert_eq!(table.len(), 65);
    // ħ²/2mR² for potassium-39 on the 5.9 μm ring
    let hbar = 1.054_571_817e-34;
    let m = 38.963_706_68 * 1.660_539_066_60e-27;
    let unit = hbar * hbar / (2.0 * m * 5.9e-6 * 5.9e-6);
    for r in &table {
        let expected = unit * r[0] * r[0];
        assert!(
            (r[1] - expected).abs() <= 1e-14 * expected.max(unit),
            "{r:?}"
        );
        assert_eq!(r[1], r[2]);
    }
}

#[test]
fn sweep_rows_sorted_by_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}sweep_points = 13\nsweep_variants = ideal\n");
    let out = run(dir.path(), &cfg, &["sweep-phase"]);
    assert!(out.status.success());
    let table = rows(&dir.path().join("out/sweep_ideal.csv"));
    assert_eq!(table.len(), 13);
    assert!(table.windows(2).all(|w| w[0][0] < w[1][0]));
    for r in &table {
        assert!((r[1] + r[0].cos()).abs() < 1e-6);
    }
}

#[test]
fn sense_reports_flux_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), BASE, &["sense"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("out/sense_flux.csv")).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("charged-magnetic"))
        .unwrap();
    let rotation: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
    assert!((rotation - 1.7e-2).abs() < 5e-4, "{rotation}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("charged-magnetic"));
}

#[test]
fn neutral_sensing_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &format!("{BASE}sense_charge_e = 0\n"),
        &["sense"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ideal_revival_time_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), BASE, &["revival", "--snapshots", "2"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let ms: f64 = stdout
        .trim()
        .trim_start_matches("T_rev = ")
        .trim_end_matches(" ms")
        .parse()
        .unwrap();
    let hbar = 1.054_571_817e-34;
    let m = 38.963_706_68 * 1.660_539_066_60e-27;
    let exact = std::f64::consts::TAU * m * 5.9e-6 * 5.9e-6 / hbar * 1e3;
    assert!((ms - exact).abs() < 1e-5, "{ms} vs {exact}");

    let series = rows(&dir.path().join("out/revival.csv"));
    assert_eq!(series.len(), 201);
    let last = series.last().unwrap();
    assert!(last[1] > 1.0 - 1e-9);
    let snaps = rows(&dir.path().join("out/revival_snapshots.csv"));
    assert_eq!(snaps.len(), 2 * 512);
}

#[test]
fn timing_degrades_monotonically() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &format!("{BASE}corrections = centrifugal\n"),
        &["timing"],
    );
    assert!(out.status.success());
    let table = rows(&dir.path().join("out/timing.csv"));
    assert_eq!(table.len(), 4);
    assert!(table.windows(2).all(|w| w[1][1] < w[0][1]), "{table:?}");
}

#[test]
fn headers_carry_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), BASE, &["timing"]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("out/timing.csv")).unwrap();
    for key in ["config_sha256", "omega_perp", "coupling", "solver", "grid"] {
        assert!(
            text.lines().any(|l| l.starts_with('#') && l.contains(key)),
            "{key}"
        );
    }
}
