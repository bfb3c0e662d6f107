use leobeam::coverage::{build_scenario, CaseId, ScenarioParams};
use leobeam::io::config::parse_config;
use leobeam::io::run::run_map;

#[test]
fn repeat_runs_are_byte_identical() {
    let req = parse_config(r#"{"scenario": {"preset": "four_intersecting", "grid_resolution": 101}}"#).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_map(&req, a.path()).unwrap();
    run_map(&req, b.path()).unwrap();
    for name in ["enhancement_grid.csv", "enhancement_heatmap.pgm", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn pgm_dimensions_match_grid() {
    let req = parse_config(r#"{"scenario": {"preset": "two_perpendicular", "grid_resolution": 37}, "outputs": ["heatmap_pgm"]}"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_map(&req, dir.path()).unwrap();
    assert_eq!(report.written.len(), 1);
    let pgm = std::fs::read_to_string(&report.written[0]).unwrap();
    let tokens: Vec<&str> = pgm.split_whitespace().collect();
    assert_eq!(&tokens[..4], &["P2", "37", "37", "65535"]);
    assert_eq!(tokens.len() - 4, 37 * 37);
}

#[test]
fn case_four_summary_reports_peak() {
    let req = parse_config(r#"{"scenario": {"preset": "four_parallel", "cutoff_db": 6}, "outputs": ["summary_json"]}"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_map(&req, dir.path()).unwrap();
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!((summary["max_db"].as_f64().unwrap() - 12.04).abs() < 0.01);
    assert_eq!(summary["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(summary["scenario"]["case_id"], "four_parallel");
    assert!(summary["spot"]["area_m2"].as_f64().unwrap() > 0.0);
}

#[test]
fn emitted_defaults_parse_back_to_the_same_run() {
    let first = parse_config(r#"{"scenario": {"preset": "two_parallel", "separation_deg": 0.2}}"#).unwrap();
    let text = serde_json::to_string(&first.to_document()).unwrap();
    let second = parse_config(&text).unwrap();
    assert!(first.equivalent(&second));
    let direct = build_scenario(CaseId::TwoParallel, &ScenarioParams::default()).unwrap();
    assert_eq!(second.scenario, direct);
}
