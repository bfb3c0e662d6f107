use std::path::Path;
use std::process::{Command, Output};

fn leobeam(args: &[&str], out_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_leobeam"));
    cmd.args(args).env_remove("LEOBEAM_OUT_DIR");
    if let Some(dir) = out_env {
        cmd.env("LEOBEAM_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn closedform_prints_table() {
    let o = leobeam(&["closedform"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("12.04") && text.contains("9.03") && text.contains("10.79"), "{text}");
}

#[test]
fn budget_prints_bottom_line() {
    let o = leobeam(&["budget"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-101.19"));
}

#[test]
fn map_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = leobeam(&["map", "--preset", "four_parallel", "--grid-res", "61", "--out", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["enhancement_grid.csv", "enhancement_heatmap.pgm", "summary.json"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let csv = std::fs::read_to_string(out.join("enhancement_grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61 * 61 + 1);
}

#[test]
fn quiet_suppresses_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = leobeam(&["map", "--quiet", "--grid-res", "5", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn environment_sets_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = leobeam(&["map", "--quiet", "--grid-res", "5"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("summary.json").is_file());
}

#[test]
fn config_file_drives_map() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("out");
    std::fs::write(
        &config,
        format!(r#"{{"scenario": {{"preset": "two_parallel", "grid_resolution": 41}}, "outputs": ["summary_json"], "out_dir": {:?}}}"#, out),
    )
    .unwrap();
    let o = leobeam(&["map", "--quiet", "--config", config.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!((summary["max_db"].as_f64().unwrap() - 6.02).abs() < 0.01);
    assert!(!out.join("enhancement_grid.csv").exists());
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = leobeam(&["map", "--preset", "nine_parallel", "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nine_parallel"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": {"preset": "four_parallel", "altitude_km": -3, "grid_resolution": 0}}"#).unwrap();
    let o = leobeam(&["map", "--config", bad.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("scenario.altitude_km") && err.contains("scenario.grid_resolution"), "{err}");

    assert_eq!(leobeam(&["map", "--no-such-flag"], None).status.code(), Some(1));
    assert_eq!(leobeam(&["map", "--config", "/nonexistent/run.json"], None).status.code(), Some(1));
}

#[test]
fn computation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // A satellite 80 degrees around the Earth is below the UE horizon.
    let config = dir.path().join("below.json");
    std::fs::write(
        &config,
        r#"{"scenario": {"preset": "custom", "grid_resolution": 3, "satellites": [
            {"altitude_km": 550, "polar_angle_deg": 80, "heading": [1, 0, 0], "amplitude_v_per_m": 1}]}}"#,
    )
    .unwrap();
    let o = leobeam(&["map", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let file = dir.path().join("not-a-dir");
    std::fs::write(&file, "x").unwrap();
    let o = leobeam(&["map", "--grid-res", "3", "--out", file.join("sub").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn doppler_writes_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"doppler_sweep": {"carrier_hz": 3.5e9, "window_cycles": 2000, "df_min_hz": 0, "df_max_hz": 2e6, "df_step_hz": 1e5}}"#,
    )
    .unwrap();
    let o = leobeam(&["doppler", "--config", config.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("doppler_sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("df_hz,enhancement_db"));
    assert_eq!(csv.lines().count(), 22);
}
