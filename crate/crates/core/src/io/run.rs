//! Command runners shared by the binary and the examples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::config::{ConfigError, RunRequest};
use super::output::{self, DopplerSummary, LinkSummary, MapSummary, OutputError};
use crate::coverage::{self, CoverageError, EnhancementMap};
use crate::fields::{self, FieldError};
use crate::impairments::{self, DopplerSweepConfig, ImpairmentError, SweepPoint};
use crate::link_budget::{self, LinkBudget, LinkBudgetError, SensitivityRef};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "LEOBEAM_OUT_DIR";

/// Enhancement of two beams with no coherent gain: each adds its own power.
pub const INCOHERENT_PAIR_DB: f64 = 3.010_299_956_639_812;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Coverage(#[from] CoverageError),
    #[error(transparent)]
    Impairment(#[from] ImpairmentError),
    #[error(transparent)]
    LinkBudget(#[from] LinkBudgetError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunError {
    /// 1 for bad input, 2 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Validation(_) => 1,
            RunError::LinkBudget(_) => 1,
            _ => 2,
        }
    }
}

/// Output directory by precedence: explicit argument, environment, config.
pub fn resolve_out_dir(explicit: Option<&Path>, req_dir: &Path) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => req_dir.to_path_buf(),
    }
}

#[derive(Debug, Clone)]
pub struct MapReport {
    pub map: EnhancementMap,
    pub summary: MapSummary,
    pub written: Vec<PathBuf>,
}

/// Computes the map, its metrics and optional budget, then writes the outputs.
pub fn run_map(req: &RunRequest, out_dir: &Path) -> Result<MapReport, RunError> {
    output::ensure_writable(out_dir)?;
    let map = match &req.time_offsets {
        Some(o) => coverage::misaligned_map(&req.scenario, o)?,
        None => coverage::enhancement_map(&req.scenario)?,
    };
    let summary = summarize_map(req, &map)?;
    let written = output::emit_outputs(req, out_dir, &map, &summary)?;
    Ok(MapReport { map, summary, written })
}

pub fn summarize_map(req: &RunRequest, map: &EnhancementMap) -> Result<MapSummary, RunError> {
    let max_db = map.max_db();
    let spot = match req.scenario.cutoff_db {
        Some(cut) => Some(coverage::spot_metrics(map, cut)?),
        None => None,
    };
    let (fringe, fringe_note) = match coverage::fringe_metrics(map) {
        Ok(f) => (Some(f), None),
        Err(e @ (CoverageError::NoFringes(_) | CoverageError::UnderSampledFringes { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let link = match &req.budget {
        Some(b) => Some(link_summary(b, &req.sensitivity, max_db)?),
        None => None,
    };
    let doppler = match &req.sweep {
        Some(s) => Some(doppler_summary(s, &impairments::doppler_enhancement_sweep(s)?)),
        None => None,
    };
    Ok(MapSummary {
        tool: "leobeam",
        version: output::tool_version(),
        scenario: map.metadata.clone(),
        max_db,
        min_db: map.min_db(),
        center_db: map.center_db(),
        closed_form_max_db: req.scenario.closed_form_max_db(),
        spot,
        fringe,
        fringe_note,
        link,
        doppler,
    })
}

pub fn link_summary(b: &LinkBudget, sens: &SensitivityRef, enhancement_db: f64) -> Result<LinkSummary, LinkBudgetError> {
    let p = link_budget::received_power_dbm(b)?;
    Ok(LinkSummary {
        fspl_db: link_budget::fspl_db(b.distance_km, b.frequency_hz)?,
        received_power_dbm: p,
        enhancement_db,
        sensitivity_dbm: sens.threshold_dbm,
        margin_db: link_budget::margin_db(p, sens, enhancement_db),
    })
}

pub fn doppler_summary(cfg: &DopplerSweepConfig, points: &[SweepPoint]) -> DopplerSummary {
    DopplerSummary {
        carrier_hz: cfg.carrier_hz,
        window_cycles: cfg.window_cycles,
        half_power_crossing_hz: impairments::first_crossing_below(points, INCOHERENT_PAIR_DB),
        points: points.len(),
    }
}

/// 3.5 GHz, 0 to 400 kHz in 2 kHz steps over 12000 carrier cycles.
pub fn default_sweep() -> DopplerSweepConfig {
    DopplerSweepConfig::new(3.5e9, 0.0, 400e3, 2e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct DopplerReport {
    pub summary: DopplerSummary,
    pub points: Vec<SweepPoint>,
    pub written: Vec<PathBuf>,
}

pub fn run_doppler(cfg: &DopplerSweepConfig, out_dir: &Path) -> Result<DopplerReport, RunError> {
    cfg.validate()?;
    output::ensure_writable(out_dir)?;
    let points = impairments::doppler_enhancement_sweep(cfg)?;
    let summary = doppler_summary(cfg, &points);
    let csv = out_dir.join(output::DOPPLER_CSV);
    output::write_atomic(&csv, output::doppler_csv(&points).as_bytes())?;
    let json = out_dir.join("doppler_summary.json");
    output::write_atomic(&json, output::to_json("doppler summary", &summary)?.as_bytes())?;
    Ok(DopplerReport { summary, points, written: vec![csv, json] })
}

#[derive(Debug, Clone, Serialize)]
pub struct BudgetReport {
    pub budget: LinkBudget,
    pub fspl_db: f64,
    pub received_power_dbm: f64,
    pub sensitivity_dbm: f64,
    /// Margin with N parallel satellites, `(n, enhancement_db, margin_db)`.
    pub margins: Vec<(usize, f64, f64)>,
}

pub fn run_budget(b: &LinkBudget, sens: &SensitivityRef) -> Result<BudgetReport, RunError> {
    let p = link_budget::received_power_dbm(b)?;
    let margins = [1usize, 2, 4, 8]
        .into_iter()
        .map(|n| {
            let e = fields::ratio_to_db(fields::closed_form_parallel_max(n)?);
            Ok((n, e, link_budget::margin_db(p, sens, e)))
        })
        .collect::<Result<_, FieldError>>()?;
    Ok(BudgetReport {
        budget: b.clone(),
        fspl_db: link_budget::fspl_db(b.distance_km, b.frequency_hz)?,
        received_power_dbm: p,
        sensitivity_dbm: sens.threshold_dbm,
        margins,
    })
}

impl BudgetReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let b = &self.budget;
        let _ = writeln!(s, "distance            {:>10.1} km", b.distance_km);
        let _ = writeln!(s, "frequency           {:>10.3} GHz", b.frequency_hz / 1e9);
        let _ = writeln!(s, "EIRP                {:>10.2} dBW", b.eirp_dbw);
        let _ = writeln!(s, "free-space loss     {:>10.2} dB", self.fspl_db);
        let _ = writeln!(s, "received power      {:>10.2} dBm", self.received_power_dbm);
        let _ = writeln!(s, "sensitivity         {:>10.2} dBm", self.sensitivity_dbm);
        for (n, e, m) in &self.margins {
            let _ = writeln!(s, "margin, {n} sat(s)    {:>10.2} dB  (enhancement {e:.2} dB)", m);
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormRow {
    pub n: usize,
    pub parallel_db: f64,
    pub perpendicular_db: f64,
    pub intersecting_db: f64,
    pub miso_db: f64,
}

/// Peak enhancement of each polarization layout for the given group sizes.
/// The intersecting column splits the group into two equal halves.
pub fn closed_form_table(ns: &[usize], xi_rad: f64) -> Result<Vec<ClosedFormRow>, RunError> {
    ns.iter()
        .map(|&n| {
            Ok(ClosedFormRow {
                n,
                parallel_db: fields::ratio_to_db(fields::closed_form_parallel_max(n)?),
                perpendicular_db: fields::ratio_to_db(fields::closed_form_perpendicular_max(n)?),
                intersecting_db: fields::ratio_to_db(fields::closed_form_intersecting_max(n, n / 2, xi_rad)?),
                miso_db: fields::ratio_to_db(fields::miso_gain(n)?),
            })
        })
        .collect()
}

pub fn render_closed_form(rows: &[ClosedFormRow], xi_rad: f64) -> String {
    let mut s = format!(
        "{:>4} {:>12} {:>16} {:>18} {:>10}\n",
        "N",
        "parallel_db",
        "perpendicular_db",
        format!("intersect{:.0}_db", xi_rad.to_degrees()),
        "miso_db"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:>4} {:>12.2} {:>16.2} {:>18.2} {:>10.2}",
            r.n, r.parallel_db, r.perpendicular_db, r.intersecting_db, r.miso_db
        );
    }
    s
}
