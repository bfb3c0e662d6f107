//! Ground coverage of a cooperating satellite group.
//!
//! A scenario fixes the satellites and a square ground patch centered on the
//! UE. [`enhancement_map`] evaluates the time-averaged Poynting vector at every
//! grid point and reports it in dB relative to one satellite at zenith.

mod metrics;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{self, EnhancementMetric, FieldError, PlaneWave, PlaneWaveSet, DEFAULT_STEPS_PER_PERIOD, MIN_STEPS_PER_PERIOD, SPEED_OF_LIGHT};
use crate::geometry::{self, EarthModel, GeometryError, GroundPoint, SatelliteBeamSpec};
use crate::impairments::{self, ImpairmentError, TimeOffsetSpec};
use crate::DB_FLOOR;

pub use metrics::{fringe_metrics, single_sat_cell_radius, spot_metrics, FringeMetrics, SpotMetrics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoverageError {
    #[error("unknown scenario case `{0}`")]
    UnknownCase(String),
    #[error("inconsistent scenario parameters: {0}")]
    InconsistentParams(String),
    #[error("invalid scenario: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("no fringes: {0}")]
    NoFringes(String),
    #[error("fringe period {period_m:.3} m spans fewer than 8 grid samples (pitch {pitch_m:.3} m)")]
    UnderSampledFringes { period_m: f64, pitch_m: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Impairment(#[from] ImpairmentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    Single,
    TwoParallel,
    TwoPerpendicular,
    FourParallel,
    FourPerpendicular,
    FourIntersecting,
    Custom,
}

impl CaseId {
    pub const PRESETS: [CaseId; 6] = [
        CaseId::Single,
        CaseId::TwoParallel,
        CaseId::TwoPerpendicular,
        CaseId::FourParallel,
        CaseId::FourPerpendicular,
        CaseId::FourIntersecting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::Single => "single",
            CaseId::TwoParallel => "two_parallel",
            CaseId::TwoPerpendicular => "two_perpendicular",
            CaseId::FourParallel => "four_parallel",
            CaseId::FourPerpendicular => "four_perpendicular",
            CaseId::FourIntersecting => "four_intersecting",
            CaseId::Custom => "custom",
        }
    }

    /// Satellite count a preset expects; `None` for custom.
    pub fn satellite_count(self) -> Option<usize> {
        match self {
            CaseId::Single => Some(1),
            CaseId::TwoParallel | CaseId::TwoPerpendicular => Some(2),
            CaseId::FourParallel | CaseId::FourPerpendicular | CaseId::FourIntersecting => Some(4),
            CaseId::Custom => None,
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = CoverageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseId::PRESETS
            .into_iter()
            .chain([CaseId::Custom])
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CoverageError::UnknownCase(s.to_string()))
    }
}

/// Free parameters of the preset geometries.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub altitude_km: f64,
    /// Angle between the beams of two mirrored satellites, seen from the UE.
    pub separation_rad: f64,
    /// Crossing angle of the second orbit family; only for `four_intersecting`.
    pub intersect_angle_rad: Option<f64>,
    pub wavelength_m: f64,
    /// Effective (rms) field of one satellite at the receiver, V/m.
    pub e0_v_per_m: f64,
    pub grid_side_m: f64,
    pub grid_resolution: usize,
    pub cutoff_db: Option<f64>,
    pub earth: EarthModel,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            altitude_km: 550.0,
            separation_rad: 0.2f64.to_radians(),
            intersect_angle_rad: None,
            wavelength_m: SPEED_OF_LIGHT / 3.5e9,
            e0_v_per_m: 1.0,
            grid_side_m: 48.0,
            grid_resolution: 481,
            cutoff_db: None,
            earth: EarthModel::default(),
        }
    }
}

impl ScenarioParams {
    pub const DEFAULT_INTERSECT_ANGLE_DEG: f64 = 60.0;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub case_id: CaseId,
    pub satellites: Vec<SatelliteBeamSpec>,
    pub separation_rad: Option<f64>,
    pub intersect_angle_rad: Option<f64>,
    pub grid_side_m: f64,
    pub grid_resolution: usize,
    pub wavelength_m: f64,
    pub cutoff_db: Option<f64>,
    /// Amplitude a lone satellite delivers; the 0 dB reference.
    pub reference_amplitude: f64,
    pub steps_per_period: usize,
    pub metric: EnhancementMetric,
    pub earth: EarthModel,
}

impl ScenarioConfig {
    pub fn angular_frequency(&self) -> f64 {
        TAU * SPEED_OF_LIGHT / self.wavelength_m
    }

    pub fn carrier_hz(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength_m
    }

    pub fn carrier_period_s(&self) -> f64 {
        self.wavelength_m / SPEED_OF_LIGHT
    }

    pub fn grid_pitch_m(&self) -> f64 {
        self.grid_side_m / (self.grid_resolution - 1) as f64
    }

    /// Every violated invariant.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(expected) = self.case_id.satellite_count() {
            if self.satellites.len() != expected {
                out.push(format!("case {} needs {expected} satellites, got {}", self.case_id, self.satellites.len()));
            }
        } else if self.satellites.is_empty() {
            out.push("custom scenario needs at least one satellite".to_string());
        }
        for (i, sat) in self.satellites.iter().enumerate() {
            if let Err(e) = sat.validate() {
                out.push(format!("satellites[{i}]: {e}"));
            }
        }
        if self.grid_resolution < 2 {
            out.push(format!("grid_resolution must be at least 2, got {}", self.grid_resolution));
        }
        if !(self.grid_side_m > 0.0) || !self.grid_side_m.is_finite() {
            out.push(format!("grid_side_m must be positive, got {}", self.grid_side_m));
        }
        if !(self.wavelength_m > 0.0) || !self.wavelength_m.is_finite() {
            out.push(format!("wavelength_m must be positive, got {}", self.wavelength_m));
        }
        if !(self.reference_amplitude > 0.0) || !self.reference_amplitude.is_finite() {
            out.push(format!("reference_amplitude must be positive, got {}", self.reference_amplitude));
        }
        if self.steps_per_period < MIN_STEPS_PER_PERIOD {
            out.push(format!("steps_per_period must be at least {MIN_STEPS_PER_PERIOD}, got {}", self.steps_per_period));
        }
        if let Some(c) = self.cutoff_db {
            if !c.is_finite() {
                out.push("cutoff_db must be finite".to_string());
            }
        }
        if let Err(e) = self.earth.validate() {
            out.push(e.to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<(), CoverageError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CoverageError::InvalidScenario(v))
        }
    }

    /// Largest attainable power ratio for this satellite group.
    pub fn closed_form_max(&self) -> f64 {
        match self.case_id {
            CaseId::Single => 1.0,
            CaseId::TwoParallel => 4.0,
            CaseId::TwoPerpendicular => 2.0,
            CaseId::FourParallel => 16.0,
            CaseId::FourPerpendicular => 8.0,
            CaseId::FourIntersecting => fields::closed_form_intersecting_max(
                4,
                2,
                self.intersect_angle_rad.unwrap_or(ScenarioParams::DEFAULT_INTERSECT_ANGLE_DEG.to_radians()),
            )
            .unwrap_or(16.0),
            CaseId::Custom => {
                let sum: f64 = self.satellites.iter().map(|s| s.amplitude_at_receiver).sum();
                (sum / self.reference_amplitude).powi(2)
            }
        }
    }

    pub fn closed_form_max_db(&self) -> f64 {
        fields::ratio_to_db(self.closed_form_max())
    }
}

/// Concrete satellite placement for one of the preset cases.
///
/// Satellites are mirrored about the UE: each sits at incidence
/// `separation / 2` on its own azimuth. Parallel cases share one heading;
/// perpendicular cases split headings by 90 degrees; the intersecting case
/// rotates the second pair (position and heading) by the crossing angle.
pub fn build_scenario(case_id: CaseId, params: &ScenarioParams) -> Result<ScenarioConfig, CoverageError> {
    if case_id == CaseId::Custom {
        return Err(CoverageError::InconsistentParams("custom scenarios list their satellites explicitly".into()));
    }
    if params.intersect_angle_rad.is_some() && case_id != CaseId::FourIntersecting {
        return Err(CoverageError::InconsistentParams(format!("an intersection angle only applies to four_intersecting, not {case_id}")));
    }
    if !(params.separation_rad > 0.0) || params.separation_rad >= PI {
        return Err(CoverageError::InconsistentParams(format!(
            "beam separation must lie in (0, pi), got {} rad",
            params.separation_rad
        )));
    }
    let xi = match case_id {
        CaseId::FourIntersecting => {
            let xi = params.intersect_angle_rad.unwrap_or(ScenarioParams::DEFAULT_INTERSECT_ANGLE_DEG.to_radians());
            if !(0.0..=FRAC_PI_2).contains(&xi) {
                return Err(CoverageError::InconsistentParams(format!("intersection angle {xi} rad outside [0, pi/2]")));
            }
            Some(xi)
        }
        _ => None,
    };

    let half = params.separation_rad / 2.0;
    let alpha = geometry::polar_angle_for_incidence(half, params.altitude_km, &params.earth)?;
    let amplitude = 2f64.sqrt() * params.e0_v_per_m;
    let sat = |polar: f64, azimuth: f64, heading_angle: f64| SatelliteBeamSpec {
        altitude_km: params.altitude_km,
        polar_angle_rad: polar,
        azimuth_rad: azimuth,
        heading_unit: geometry::horizontal_heading(heading_angle),
        initial_phase_rad: 0.0,
        amplitude_at_receiver: amplitude,
    };

    let satellites = match case_id {
        CaseId::Single => vec![sat(0.0, 0.0, 0.0)],
        CaseId::TwoParallel => vec![sat(alpha, 0.0, 0.0), sat(alpha, PI, 0.0)],
        CaseId::TwoPerpendicular => vec![sat(alpha, 0.0, 0.0), sat(alpha, FRAC_PI_2, FRAC_PI_2)],
        CaseId::FourParallel => vec![
            sat(alpha, 0.0, 0.0),
            sat(alpha, PI, 0.0),
            sat(alpha, FRAC_PI_2, 0.0),
            sat(alpha, 3.0 * FRAC_PI_2, 0.0),
        ],
        CaseId::FourPerpendicular => vec![
            sat(alpha, 0.0, 0.0),
            sat(alpha, PI, 0.0),
            sat(alpha, FRAC_PI_2, FRAC_PI_2),
            sat(alpha, 3.0 * FRAC_PI_2, FRAC_PI_2),
        ],
        CaseId::FourIntersecting => {
            let xi = xi.expect("set above");
            vec![sat(alpha, 0.0, 0.0), sat(alpha, PI, 0.0), sat(alpha, xi, xi), sat(alpha, xi + PI, xi)]
        }
        CaseId::Custom => unreachable!(),
    };

    let cfg = ScenarioConfig {
        case_id,
        satellites,
        separation_rad: Some(params.separation_rad),
        intersect_angle_rad: xi,
        grid_side_m: params.grid_side_m,
        grid_resolution: params.grid_resolution,
        wavelength_m: params.wavelength_m,
        cutoff_db: params.cutoff_db,
        reference_amplitude: amplitude,
        steps_per_period: DEFAULT_STEPS_PER_PERIOD,
        metric: EnhancementMetric::Magnitude,
        earth: params.earth,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Distance between the two satellites of a mirrored pair, km.
pub fn pair_spacing_km(cfg: &ScenarioConfig, a: usize, b: usize) -> f64 {
    (cfg.satellites[a].position_m(&cfg.earth) - cfg.satellites[b].position_m(&cfg.earth)).norm() / 1e3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatelliteEcho {
    pub altitude_km: f64,
    pub polar_angle_deg: f64,
    pub azimuth_deg: f64,
    pub heading: [f64; 3],
    pub initial_phase_deg: f64,
    pub amplitude_v_per_m: f64,
}

impl From<&SatelliteBeamSpec> for SatelliteEcho {
    fn from(s: &SatelliteBeamSpec) -> Self {
        Self {
            altitude_km: s.altitude_km,
            polar_angle_deg: s.polar_angle_rad.to_degrees(),
            azimuth_deg: s.azimuth_rad.to_degrees(),
            heading: [s.heading_unit.x, s.heading_unit.y, s.heading_unit.z],
            initial_phase_deg: s.initial_phase_rad.to_degrees(),
            amplitude_v_per_m: s.amplitude_at_receiver,
        }
    }
}

/// Scenario as recorded alongside a map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioEcho {
    pub case_id: CaseId,
    pub satellites: Vec<SatelliteEcho>,
    pub separation_deg: Option<f64>,
    pub intersect_angle_deg: Option<f64>,
    pub wavelength_m: f64,
    pub carrier_hz: f64,
    pub grid_side_m: f64,
    pub grid_resolution: usize,
    pub cutoff_db: Option<f64>,
    pub steps_per_period: usize,
    pub metric: EnhancementMetric,
    pub closed_form_max_db: f64,
    pub time_offsets_s: Option<Vec<f64>>,
}

impl ScenarioEcho {
    pub fn new(cfg: &ScenarioConfig, offsets: Option<&TimeOffsetSpec>) -> Self {
        Self {
            case_id: cfg.case_id,
            satellites: cfg.satellites.iter().map(SatelliteEcho::from).collect(),
            separation_deg: cfg.separation_rad.map(f64::to_degrees),
            intersect_angle_deg: cfg.intersect_angle_rad.map(f64::to_degrees),
            wavelength_m: cfg.wavelength_m,
            carrier_hz: cfg.carrier_hz(),
            grid_side_m: cfg.grid_side_m,
            grid_resolution: cfg.grid_resolution,
            cutoff_db: cfg.cutoff_db,
            steps_per_period: cfg.steps_per_period,
            metric: cfg.metric,
            closed_form_max_db: cfg.closed_form_max_db(),
            time_offsets_s: offsets.map(|o| o.per_beam_offset_s.clone()),
        }
    }
}

/// Square grid of enhancement values. Row `r` holds `y = y_at(r)`, column `c`
/// holds `x = x_at(c)`; the UE sits at the grid center.
#[derive(Debug, Clone, PartialEq)]
pub struct EnhancementMap {
    pub values_db: Vec<f64>,
    pub resolution: usize,
    pub extent_m: f64,
    pub metadata: ScenarioEcho,
}

impl EnhancementMap {
    pub fn pitch_m(&self) -> f64 {
        self.extent_m / (self.resolution - 1) as f64
    }

    /// Coordinate of grid index `i` along either axis; symmetric about 0.
    pub fn coordinate(&self, i: usize) -> f64 {
        grid_coordinate(i, self.resolution, self.pitch_m())
    }

    pub fn x_at(&self, col: usize) -> f64 {
        self.coordinate(col)
    }

    pub fn y_at(&self, row: usize) -> f64 {
        self.coordinate(row)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values_db[row * self.resolution + col]
    }

    pub fn max_db(&self) -> f64 {
        self.values_db.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_db(&self) -> f64 {
        self.values_db.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Value at the grid point nearest `(x, y)`.
    pub fn value_near(&self, x_m: f64, y_m: f64) -> f64 {
        let (row, col) = (self.index_near(y_m), self.index_near(x_m));
        self.get(row, col)
    }

    fn index_near(&self, coord: f64) -> usize {
        let center = (self.resolution - 1) as f64 / 2.0;
        (coord / self.pitch_m() + center).round().clamp(0.0, (self.resolution - 1) as f64) as usize
    }

    pub fn center_db(&self) -> f64 {
        self.value_near(0.0, 0.0)
    }
}

fn grid_coordinate(i: usize, resolution: usize, pitch: f64) -> f64 {
    (i as f64 - (resolution - 1) as f64 / 2.0) * pitch
}

/// Enhancement over the scenario's ground patch, evaluated in parallel.
pub fn enhancement_map(cfg: &ScenarioConfig) -> Result<EnhancementMap, CoverageError> {
    compute_map(cfg, None, Execution::Parallel)
}

/// [`enhancement_map`] with the beams delayed by `offsets` before they combine.
pub fn misaligned_map(cfg: &ScenarioConfig, offsets: &TimeOffsetSpec) -> Result<EnhancementMap, CoverageError> {
    compute_map(cfg, Some(offsets), Execution::Parallel)
}

/// Shared pipeline; `exec` only changes how rows are scheduled, never the result.
pub fn compute_map(
    cfg: &ScenarioConfig,
    offsets: Option<&TimeOffsetSpec>,
    exec: Execution,
) -> Result<EnhancementMap, CoverageError> {
    cfg.validate()?;
    if let Some(o) = offsets {
        if o.per_beam_offset_s.len() != cfg.satellites.len() {
            return Err(ImpairmentError::LengthMismatch { offsets: o.per_beam_offset_s.len(), beams: cfg.satellites.len() }.into());
        }
    }
    let omega = cfg.angular_frequency();
    let period = cfg.carrier_period_s();
    let reference = fields::single_beam_reference(cfg.reference_amplitude, omega, period, cfg.steps_per_period)?;
    let n = cfg.grid_resolution;
    let pitch = cfg.grid_pitch_m();

    let row = |r: usize| -> Result<Vec<f64>, CoverageError> {
        let y = grid_coordinate(r, n, pitch);
        (0..n)
            .map(|c| {
                let p = GroundPoint::new(grid_coordinate(c, n, pitch), y);
                point_enhancement(cfg, &p, omega, period, &reference, offsets)
            })
            .collect()
    };
    let rows: Vec<Vec<f64>> = match exec {
        Execution::Sequential => (0..n).map(row).collect::<Result<_, _>>()?,
        Execution::Parallel => (0..n).into_par_iter().map(row).collect::<Result<_, _>>()?,
    };
    Ok(EnhancementMap {
        values_db: rows.into_iter().flatten().collect(),
        resolution: n,
        extent_m: cfg.grid_side_m,
        metadata: ScenarioEcho::new(cfg, offsets),
    })
}

/// Plane waves from every satellite of `cfg` at ground point `p`.
pub fn plane_waves_at(cfg: &ScenarioConfig, p: &GroundPoint) -> Result<PlaneWaveSet, CoverageError> {
    let omega = cfg.angular_frequency();
    let beams = cfg
        .satellites
        .iter()
        .map(|sat| {
            let beam = geometry::beam_at_point(sat, p, &cfg.earth, cfg.wavelength_m)?;
            Ok(PlaneWave::new(beam, sat.amplitude_at_receiver, omega))
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(PlaneWaveSet::new(beams, cfg.reference_amplitude)?)
}

fn point_enhancement(
    cfg: &ScenarioConfig,
    p: &GroundPoint,
    _omega: f64,
    period: f64,
    reference: &fields::PoyntingResult,
    offsets: Option<&TimeOffsetSpec>,
) -> Result<f64, CoverageError> {
    let mut set = plane_waves_at(cfg, p)?;
    if let Some(o) = offsets {
        set = impairments::apply_time_offsets(&set, o)?;
    }
    let combined = fields::time_avg_poynting(&set, period, cfg.steps_per_period)?;
    let db = fields::enhancement_db_with(cfg.metric, &combined, reference)?;
    // NaN cannot occur (reference > 0); -inf from an exact null clamps here.
    Ok(db.max(DB_FLOOR))
}

/// Offsets that stagger the scenario's satellites by half a carrier period each.
pub fn staggered_half_period_offsets(cfg: &ScenarioConfig) -> TimeOffsetSpec {
    TimeOffsetSpec::staggered_half_periods(cfg.satellites.len(), cfg.carrier_hz())
}
