//! JSON run configuration.
//!
//! Angles are degrees in the document and radians everywhere else. Every
//! missing optional field is filled in and listed in `defaults_applied`.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coverage::{self, CaseId, ScenarioConfig, ScenarioParams};
use crate::fields::{EnhancementMetric, DEFAULT_STEPS_PER_PERIOD, MIN_STEPS_PER_PERIOD, SPEED_OF_LIGHT};
use crate::geometry::{EarthModel, SatelliteBeamSpec, Vec3};
use crate::impairments::{DopplerSweepConfig, TimeOffsetSpec};
use crate::link_budget::{LinkBudget, SensitivityRef};

pub const DEFAULT_OUT_DIR: &str = "leobeam-out";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    GridCsv,
    HeatmapPgm,
    SummaryJson,
}

impl OutputKind {
    pub const ALL: [OutputKind; 3] = [OutputKind::GridCsv, OutputKind::HeatmapPgm, OutputKind::SummaryJson];
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<OutputKind>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doppler_sweep: Option<DopplerSweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_budget: Option<LinkBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub altitude_km: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersect_angle_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e0_v_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satellites: Option<Vec<SatelliteSection>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_amplitude_v_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_side_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<EnhancementMetric>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_offsets_s: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSection {
    pub altitude_km: f64,
    pub polar_angle_deg: f64,
    #[serde(default)]
    pub azimuth_deg: f64,
    /// Polarization heading; need not be normalized.
    pub heading: [f64; 3],
    #[serde(default)]
    pub initial_phase_deg: f64,
    pub amplitude_v_per_m: f64,
}

/// A validated run, ready for the command runners.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub scenario: ScenarioConfig,
    pub time_offsets: Option<TimeOffsetSpec>,
    pub outputs: BTreeSet<OutputKind>,
    pub sweep: Option<DopplerSweepConfig>,
    pub budget: Option<LinkBudget>,
    pub sensitivity: SensitivityRef,
    pub out_dir: PathBuf,
    pub defaults_applied: Vec<String>,
    document: ConfigDocument,
}

impl RunRequest {
    /// The document with every default written out; parsing it again yields
    /// an equivalent request.
    pub fn to_document(&self) -> ConfigDocument {
        self.document.clone()
    }

    /// Same run, ignoring which values came from defaults.
    pub fn equivalent(&self, other: &RunRequest) -> bool {
        RunRequest { defaults_applied: Vec::new(), ..self.clone() } == RunRequest { defaults_applied: Vec::new(), ..other.clone() }
    }
}

pub fn parse_document(text: &str) -> Result<ConfigDocument, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn parse_config(text: &str) -> Result<RunRequest, ConfigError> {
    from_document(parse_document(text)?)
}

struct Filler {
    applied: Vec<String>,
}

impl Filler {
    fn take<T: std::fmt::Debug + Clone>(&mut self, slot: &mut Option<T>, name: &str, default: T) -> T {
        if slot.is_none() {
            self.applied.push(format!("{name} = {default:?}"));
            *slot = Some(default);
        }
        slot.clone().expect("filled above")
    }
}

pub fn from_document(mut doc: ConfigDocument) -> Result<RunRequest, ConfigError> {
    let mut fill = Filler { applied: Vec::new() };
    let mut problems = Vec::new();
    let defaults = ScenarioParams::default();

    let mut sc = doc.scenario.take().unwrap_or_default();
    let preset = fill.take(&mut sc.preset, "scenario.preset", CaseId::Single.to_string());
    let case = match preset.parse::<CaseId>() {
        Ok(c) => Some(c),
        Err(e) => {
            problems.push(format!("scenario.preset: {e}"));
            None
        }
    };
    let frequency_hz = fill.take(&mut sc.frequency_hz, "scenario.frequency_hz", 3.5e9);
    let grid_side_m = fill.take(&mut sc.grid_side_m, "scenario.grid_side_m", defaults.grid_side_m);
    let grid_resolution = fill.take(&mut sc.grid_resolution, "scenario.grid_resolution", defaults.grid_resolution);
    let steps = fill.take(&mut sc.steps_per_period, "scenario.steps_per_period", DEFAULT_STEPS_PER_PERIOD);
    let metric = fill.take(&mut sc.metric, "scenario.metric", EnhancementMetric::Magnitude);

    positive(&mut problems, "scenario.frequency_hz", frequency_hz);
    positive(&mut problems, "scenario.grid_side_m", grid_side_m);
    if grid_resolution < 2 {
        problems.push(format!("scenario.grid_resolution must be at least 2, got {grid_resolution}"));
    }
    if steps < MIN_STEPS_PER_PERIOD {
        problems.push(format!("scenario.steps_per_period must be at least {MIN_STEPS_PER_PERIOD}, got {steps}"));
    }
    if let Some(c) = sc.cutoff_db {
        if !c.is_finite() {
            problems.push("scenario.cutoff_db must be finite".to_string());
        }
    }
    let wavelength_m = SPEED_OF_LIGHT / frequency_hz;
    let cutoff_db = sc.cutoff_db;

    let scenario = match case {
        Some(CaseId::Custom) => custom_scenario(&mut sc, &mut fill, &mut problems).map(|(satellites, reference_amplitude)| ScenarioConfig {
            case_id: CaseId::Custom,
            satellites,
            separation_rad: None,
            intersect_angle_rad: None,
            grid_side_m,
            grid_resolution,
            wavelength_m,
            cutoff_db,
            reference_amplitude,
            steps_per_period: steps,
            metric,
            earth: EarthModel::default(),
        }),
        Some(case) => preset_scenario(case, &mut sc, &mut fill, &mut problems, ScenarioParams {
            grid_side_m,
            grid_resolution,
            wavelength_m,
            cutoff_db,
            ..defaults
        })
        .map(|cfg| ScenarioConfig { steps_per_period: steps, metric, ..cfg }),
        None => None,
    };

    let time_offsets = sc.time_offsets_s.clone().map(TimeOffsetSpec::new);
    if let (Some(o), Some(s)) = (&time_offsets, &scenario) {
        if o.per_beam_offset_s.len() != s.satellites.len() {
            problems.push(format!(
                "scenario.time_offsets_s has {} entries for {} satellites",
                o.per_beam_offset_s.len(),
                s.satellites.len()
            ));
        }
        if o.per_beam_offset_s.iter().any(|t| !t.is_finite()) {
            problems.push("scenario.time_offsets_s must be finite".to_string());
        }
    }
    if let Some(s) = &scenario {
        if problems.is_empty() {
            problems.extend(s.violations().into_iter().map(|v| format!("scenario: {v}")));
        }
    }
    doc.scenario = Some(sc);

    let outputs: BTreeSet<OutputKind> = fill.take(&mut doc.outputs, "outputs", OutputKind::ALL.to_vec()).into_iter().collect();
    if outputs.is_empty() {
        problems.push("outputs must select at least one of grid_csv, heatmap_pgm, summary_json".to_string());
    }
    if let Some(sweep) = &doc.doppler_sweep {
        if let Err(e) = sweep.validate() {
            problems.push(format!("doppler_sweep: {e}"));
        }
    }
    if let Some(budget) = &doc.link_budget {
        problems.extend(budget.violations().into_iter().map(|v| format!("link_budget.{v}")));
    }
    let sensitivity = fill.take(&mut doc.sensitivity_dbm, "sensitivity_dbm", SensitivityRef::default().threshold_dbm);
    if !sensitivity.is_finite() {
        problems.push("sensitivity_dbm must be finite".to_string());
    }
    let out_dir = fill.take(&mut doc.out_dir, "out_dir", PathBuf::from(DEFAULT_OUT_DIR));
    if out_dir.as_os_str().is_empty() {
        problems.push("out_dir must not be empty".to_string());
    }

    match (scenario, problems.is_empty()) {
        (Some(scenario), true) => Ok(RunRequest {
            scenario,
            time_offsets,
            outputs,
            sweep: doc.doppler_sweep.clone(),
            budget: doc.link_budget.clone(),
            sensitivity: SensitivityRef { threshold_dbm: sensitivity },
            out_dir,
            defaults_applied: fill.applied,
            document: doc,
        }),
        _ => Err(ConfigError::Invalid(problems)),
    }
}

fn positive(problems: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0) || !v.is_finite() {
        problems.push(format!("{name} must be positive, got {v}"));
    }
}

fn preset_scenario(
    case: CaseId,
    sc: &mut ScenarioSection,
    fill: &mut Filler,
    problems: &mut Vec<String>,
    base: ScenarioParams,
) -> Option<ScenarioConfig> {
    if sc.satellites.is_some() {
        problems.push(format!("scenario.satellites only applies to the custom preset, not {case}"));
    }
    if sc.reference_amplitude_v_per_m.is_some() {
        problems.push(format!("scenario.reference_amplitude_v_per_m only applies to the custom preset, not {case}"));
    }
    let altitude_km = fill.take(&mut sc.altitude_km, "scenario.altitude_km", base.altitude_km);
    let separation_deg = fill.take(&mut sc.separation_deg, "scenario.separation_deg", base.separation_rad.to_degrees());
    let e0 = fill.take(&mut sc.e0_v_per_m, "scenario.e0_v_per_m", base.e0_v_per_m);
    let intersect = if case == CaseId::FourIntersecting {
        Some(fill.take(&mut sc.intersect_angle_deg, "scenario.intersect_angle_deg", ScenarioParams::DEFAULT_INTERSECT_ANGLE_DEG))
    } else {
        if sc.intersect_angle_deg.is_some() {
            problems.push(format!("scenario.intersect_angle_deg only applies to four_intersecting, not {case}"));
        }
        None
    };
    positive(problems, "scenario.altitude_km", altitude_km);
    positive(problems, "scenario.e0_v_per_m", e0);
    if !(separation_deg > 0.0 && separation_deg < 180.0) {
        problems.push(format!("scenario.separation_deg must lie in (0, 180), got {separation_deg}"));
    }
    if let Some(xi) = intersect {
        if !(0.0..=90.0).contains(&xi) {
            problems.push(format!("scenario.intersect_angle_deg must lie in [0, 90], got {xi}"));
        }
    }
    if !problems.is_empty() {
        return None;
    }
    let params = ScenarioParams {
        altitude_km,
        separation_rad: separation_deg.to_radians(),
        intersect_angle_rad: intersect.map(f64::to_radians),
        e0_v_per_m: e0,
        ..base
    };
    match coverage::build_scenario(case, &params) {
        Ok(cfg) => Some(cfg),
        Err(e) => {
            problems.push(format!("scenario: {e}"));
            None
        }
    }
}

fn custom_scenario(
    sc: &mut ScenarioSection,
    fill: &mut Filler,
    problems: &mut Vec<String>,
) -> Option<(Vec<SatelliteBeamSpec>, f64)> {
    for (field, set) in [
        ("altitude_km", sc.altitude_km.is_some()),
        ("separation_deg", sc.separation_deg.is_some()),
        ("intersect_angle_deg", sc.intersect_angle_deg.is_some()),
        ("e0_v_per_m", sc.e0_v_per_m.is_some()),
    ] {
        if set {
            problems.push(format!("scenario.{field} only applies to presets; custom satellites carry their own geometry"));
        }
    }
    let Some(sats) = sc.satellites.clone().filter(|s| !s.is_empty()) else {
        problems.push("scenario.satellites must list at least one satellite for the custom preset".to_string());
        return None;
    };
    let mut out = Vec::with_capacity(sats.len());
    for (i, s) in sats.iter().enumerate() {
        let name = |f: &str| format!("scenario.satellites[{i}].{f}");
        let before = problems.len();
        positive(problems, &name("altitude_km"), s.altitude_km);
        positive(problems, &name("amplitude_v_per_m"), s.amplitude_v_per_m);
        if !(0.0..90.0).contains(&s.polar_angle_deg) {
            problems.push(format!("{} must lie in [0, 90), got {}", name("polar_angle_deg"), s.polar_angle_deg));
        }
        for (f, v) in [("azimuth_deg", s.azimuth_deg), ("initial_phase_deg", s.initial_phase_deg)] {
            if !v.is_finite() {
                problems.push(format!("{} must be finite", name(f)));
            }
        }
        let heading = Vec3::new(s.heading[0], s.heading[1], s.heading[2]);
        let norm = heading.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            problems.push(format!("{} must be a nonzero finite vector", name("heading")));
        }
        if problems.len() > before {
            continue;
        }
        let spec = SatelliteBeamSpec {
            altitude_km: s.altitude_km,
            polar_angle_rad: s.polar_angle_deg.to_radians(),
            azimuth_rad: s.azimuth_deg.to_radians(),
            heading_unit: heading / norm,
            initial_phase_rad: s.initial_phase_deg.to_radians(),
            amplitude_at_receiver: s.amplitude_v_per_m,
        };
        match spec.validate() {
            Ok(()) => out.push(spec),
            Err(e) => problems.push(format!("scenario.satellites[{i}]: {e}")),
        }
    }
    let first = sats[0].amplitude_v_per_m;
    let reference = fill.take(&mut sc.reference_amplitude_v_per_m, "scenario.reference_amplitude_v_per_m", first);
    positive(problems, "scenario.reference_amplitude_v_per_m", reference);
    (out.len() == sats.len()).then_some((out, reference))
}
