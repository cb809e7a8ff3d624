use std::path::Path;
use std::process::{Command, Output};

fn uav3d(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uav3d"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read_csv(path: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let (first, rest) = text.split_once('\n').unwrap();
    let mut reader = csv::Reader::from_reader(rest.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (first.to_string(), header, rows)
}

#[test]
fn coverage_writes_one_row_with_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = uav3d(&["coverage", "--bound"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (provenance, header, rows) = read_csv(&dir.path().join("coverage.csv"));
    assert!(provenance.starts_with("# config_hash="));
    assert_eq!(header[..2], ["p_cov_analytic", "p_cov_lower_bound"]);
    assert!(header.contains(&"lambda".to_string()) && header.contains(&"theta_bar_deg".to_string()));
    assert_eq!(rows.len(), 1);
    let p: f64 = rows[0][0].parse().unwrap();
    let lb: f64 = rows[0][1].parse().unwrap();
    assert!((0.0..=1.0).contains(&p) && lb <= p);
}

#[test]
fn sweep_with_monte_carlo_is_deterministic_across_threads() {
    let args = ["sweep", "--axis", "theta_bar", "--grid", "10,30", "--method", "both", "--drops", "2000", "--seed", "7"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut four = args.to_vec();
    four.extend(["--threads", "4"]);
    assert_eq!(uav3d(&one, a.path()).status.code(), Some(0));
    assert_eq!(uav3d(&four, b.path()).status.code(), Some(0));
    let ta = std::fs::read(a.path().join("sweep_theta_bar_deg.csv")).unwrap();
    let tb = std::fs::read(b.path().join("sweep_theta_bar_deg.csv")).unwrap();
    assert_eq!(ta, tb);
    let (_, header, rows) = read_csv(&a.path().join("sweep_theta_bar_deg.csv"));
    assert_eq!(header[..5], ["theta_bar_deg", "p_cov_analytic", "p_cov_mc", "ci_low", "ci_high"]);
    assert_eq!(rows.len(), 2);
    for row in rows {
        let v: Vec<f64> = row[1..5].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[1] && v[1] <= v[3]);
    }
}

#[test]
fn analytic_figure_has_long_format_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = uav3d(&["figure", "fig4b"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, header, rows) = read_csv(&dir.path().join("fig4b.csv"));
    assert_eq!(header[..3], ["lambda", "h_bar_m", "p_cov_analytic"]);
    assert_eq!(rows.len(), 9 * 15);
    assert!(rows.iter().all(|r| r[3].is_empty()));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "lambda = -1.0\n").unwrap();
    assert_eq!(uav3d(&["--config", bad.to_str().unwrap(), "coverage"], dir.path()).status.code(), Some(2));
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    assert_eq!(uav3d(&["--config", bad.to_str().unwrap(), "coverage"], dir.path()).status.code(), Some(2));
    assert_eq!(uav3d(&["figure", "fig9z"], dir.path()).status.code(), Some(2));
    assert_eq!(uav3d(&["--tol", "2", "coverage"], dir.path()).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("many.toml");
    std::fs::write(&cfg, "n_antennas = 100\nbeta_db = 40.0\n").unwrap();
    let out = uav3d(&["--config", cfg.to_str().unwrap(), "coverage"], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn failed_validation_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = uav3d(&["validate", "--drops", "100"], dir.path());
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(uav3d(&["selftest"], dir.path()).status.code(), Some(0));
}
