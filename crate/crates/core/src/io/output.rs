//! Output files. Every file is written to a temporary sibling and renamed
//! into place, so readers never observe a partial file.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::config::{OutputKind, RunRequest};
use crate::coverage::{EnhancementMap, FringeMetrics, ScenarioEcho, SpotMetrics};
use crate::impairments::SweepPoint;
use crate::DB_FLOOR;

pub const GRID_CSV: &str = "enhancement_grid.csv";
pub const HEATMAP_PGM: &str = "enhancement_heatmap.pgm";
pub const SUMMARY_JSON: &str = "summary.json";
pub const DOPPLER_CSV: &str = "doppler_sweep.csv";
pub const PGM_MAXVAL: u32 = 65535;
/// Keeps plain-PGM lines under the 70-character limit.
const PGM_VALUES_PER_LINE: usize = 10;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot serialize {what}: {source}")]
    Serialize { what: &'static str, source: serde_json::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkSummary {
    pub fspl_db: f64,
    pub received_power_dbm: f64,
    pub enhancement_db: f64,
    pub sensitivity_dbm: f64,
    pub margin_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DopplerSummary {
    pub carrier_hz: f64,
    pub window_cycles: u32,
    /// First offset at which the enhancement drops to the 3.01 dB
    /// no-beamforming level.
    pub half_power_crossing_hz: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapSummary {
    pub tool: &'static str,
    pub version: &'static str,
    pub scenario: ScenarioEcho,
    pub max_db: f64,
    pub min_db: f64,
    pub center_db: f64,
    pub closed_form_max_db: f64,
    pub spot: Option<SpotMetrics>,
    pub fringe: Option<FringeMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fringe_note: Option<String>,
    pub link: Option<LinkSummary>,
    pub doppler: Option<DopplerSummary>,
}

pub fn tool_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Writes `bytes` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let io = |source| OutputError::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Fails early when `dir` cannot be created or written.
pub fn ensure_writable(dir: &Path) -> Result<(), OutputError> {
    let io = |source| OutputError::Io { path: dir.to_path_buf(), source };
    std::fs::create_dir_all(dir).map_err(io)?;
    tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    Ok(())
}

/// Values that print as zero at 6 decimals lose their sign.
fn unsigned_zero(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

pub fn grid_csv(map: &EnhancementMap) -> String {
    let n = map.resolution;
    let mut out = String::with_capacity(40 * (n * n + 1));
    out.push_str("x_m,y_m,enhancement_db\n");
    for r in 0..n {
        let y = map.y_at(r);
        for c in 0..n {
            writeln!(out, "{:.6},{:.6},{:.6}", unsigned_zero(map.x_at(c)), unsigned_zero(y), unsigned_zero(map.get(r, c))).expect("writing to a String");
        }
    }
    out
}

/// Plain PGM; gray levels span `[DB_FLOOR, top_db]` linearly.
pub fn heatmap_pgm(map: &EnhancementMap, top_db: f64) -> String {
    let n = map.resolution;
    let span = top_db - DB_FLOOR;
    let mut out = format!("P2\n{n} {n}\n{PGM_MAXVAL}\n");
    for r in (0..n).rev() {
        // Top image row is the largest y.
        for (i, c) in (0..n).enumerate() {
            let v = map.get(r, c).clamp(DB_FLOOR, top_db.max(DB_FLOOR));
            let level = if span > 0.0 { ((v - DB_FLOOR) / span * f64::from(PGM_MAXVAL)).round() as u32 } else { PGM_MAXVAL };
            let sep = if i + 1 == n || (i + 1) % PGM_VALUES_PER_LINE == 0 { "\n" } else { " " };
            write!(out, "{level}{sep}").expect("writing to a String");
        }
    }
    out
}

pub fn doppler_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("df_hz,enhancement_db\n");
    for p in points {
        writeln!(out, "{:.6},{:.6}", unsigned_zero(p.df_hz), unsigned_zero(p.enhancement_db)).expect("writing to a String");
    }
    out
}

pub fn to_json<T: Serialize>(what: &'static str, value: &T) -> Result<String, OutputError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|source| OutputError::Serialize { what, source })
}

/// Writes the outputs `req` selects; returns the paths written, in order.
pub fn emit_outputs(
    req: &RunRequest,
    out_dir: &Path,
    map: &EnhancementMap,
    summary: &MapSummary,
) -> Result<Vec<PathBuf>, OutputError> {
    let mut written = Vec::new();
    for kind in &req.outputs {
        let (name, body) = match kind {
            OutputKind::GridCsv => (GRID_CSV, grid_csv(map)),
            OutputKind::HeatmapPgm => (HEATMAP_PGM, heatmap_pgm(map, summary.closed_form_max_db)),
            OutputKind::SummaryJson => (SUMMARY_JSON, to_json("summary", summary)?),
        };
        let path = out_dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{build_scenario, enhancement_map, CaseId, ScenarioParams};

    fn flat_map(n: usize) -> EnhancementMap {
        let cfg = build_scenario(CaseId::Single, &ScenarioParams { grid_resolution: n, ..Default::default() }).unwrap();
        enhancement_map(&cfg).unwrap()
    }

    #[test]
    fn csv_has_header_and_one_row_per_cell() {
        let csv = grid_csv(&flat_map(7));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7 * 7 + 1);
        assert_eq!(lines[0], "x_m,y_m,enhancement_db");
        assert_eq!(lines[1], "-24.000000,-24.000000,0.000000");
        assert_eq!(lines[2].split(',').next().unwrap(), "-16.000000");
    }

    #[test]
    fn flat_map_gives_single_gray_level() {
        let pgm = heatmap_pgm(&flat_map(15), 0.0);
        let mut tokens = pgm.split_whitespace();
        assert_eq!(tokens.next(), Some("P2"));
        assert_eq!((tokens.next(), tokens.next(), tokens.next()), (Some("15"), Some("15"), Some("65535")));
        let levels: std::collections::BTreeSet<&str> = tokens.collect();
        assert_eq!(levels.len(), 1);
        assert!(pgm.lines().all(|l| l.len() <= 70));
    }

    #[test]
    fn pgm_maps_floor_and_top() {
        let mut map = flat_map(3);
        map.values_db = vec![-60.0, 0.0, 6.0, -80.0, 3.0, 10.0, -30.0, 6.0, 6.0];
        let pgm = heatmap_pgm(&map, 6.0);
        let levels: Vec<u32> = pgm.split_whitespace().skip(4).map(|t| t.parse().unwrap()).collect();
        assert_eq!(levels.len(), 9);
        // Rows are emitted top (largest y) first.
        assert_eq!(&levels[6..], &[0, 59577, 65535]);
        assert_eq!(levels[3], 0);
        assert_eq!(levels[5], 65535);
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested").join("a.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn unwritable_target_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        std::fs::write(&file, "x").unwrap();
        let err = write_atomic(&file.join("child.csv"), b"x").unwrap_err();
        assert!(err.to_string().contains("plain"), "{err}");
    }
}
