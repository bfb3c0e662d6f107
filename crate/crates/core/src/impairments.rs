//! Frequency and timing impairments: the LEO pass Doppler model, the
//! enhancement lost when two cooperating beams sit `df` apart in frequency,
//! and arrival-time offsets folded into carrier phase.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::{self, FieldError, PlaneWave, PlaneWaveSet, MIN_STEPS_PER_PERIOD, SPEED_OF_LIGHT};
use crate::geometry::{BeamAtPoint, EarthModel, Vec3};
use crate::DB_FLOOR;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImpairmentError {
    #[error("angular offset {offset} rad is outside the visible pass (|offset| <= {limit} rad)")]
    OutOfPass { offset: f64, limit: f64 },
    #[error("invalid pass configuration: {0}")]
    InvalidPass(String),
    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),
    #[error("{offsets} time offsets given for {beams} beams")]
    LengthMismatch { offsets: usize, beams: usize },
    #[error("time offset {0} s is not finite")]
    NonFiniteOffset(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One satellite pass over a ground point, for the Doppler model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerPassConfig {
    pub carrier_hz: f64,
    pub altitude_km: f64,
    /// Elevation at closest approach.
    pub max_elevation_rad: f64,
    /// Orbit inclination relative to the equator. Earth rotation is projected
    /// onto the orbit plane as `w_sat - w_earth cos(i)`; `pi` (retrograde
    /// equatorial) gives the largest ground-relative rate.
    pub inclination_rad: f64,
    pub earth: EarthModel,
}

impl DopplerPassConfig {
    /// Overhead pass with the largest ground-relative angular rate.
    pub fn worst_case(carrier_hz: f64, altitude_km: f64) -> Self {
        Self {
            carrier_hz,
            altitude_km,
            max_elevation_rad: FRAC_PI_2,
            inclination_rad: PI,
            earth: EarthModel::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ImpairmentError> {
        if !(self.carrier_hz > 0.0) || !self.carrier_hz.is_finite() {
            return Err(ImpairmentError::InvalidPass(format!("carrier_hz must be positive, got {}", self.carrier_hz)));
        }
        if !(self.altitude_km > 0.0) || !self.altitude_km.is_finite() {
            return Err(ImpairmentError::InvalidPass(format!("altitude_km must be positive, got {}", self.altitude_km)));
        }
        if !(self.max_elevation_rad > 0.0 && self.max_elevation_rad <= FRAC_PI_2) {
            return Err(ImpairmentError::InvalidPass(format!(
                "max_elevation_rad must lie in (0, pi/2], got {}",
                self.max_elevation_rad
            )));
        }
        if !self.inclination_rad.is_finite() {
            return Err(ImpairmentError::InvalidPass("inclination_rad must be finite".into()));
        }
        self.earth.validate().map_err(|e| ImpairmentError::InvalidPass(e.to_string()))
    }

    fn orbit_radius_km(&self) -> f64 {
        self.earth.radius_km + self.altitude_km
    }

    /// Angular rate of the satellite relative to the rotating Earth, rad/s.
    pub fn ground_relative_rate(&self) -> f64 {
        let r = self.orbit_radius_km();
        (self.earth.gravitational_parameter / (r * r * r)).sqrt() - self.earth.rotation_rate * self.inclination_rad.cos()
    }

    /// Earth-central angle between the ground point and the satellite at
    /// closest approach.
    fn closest_approach_angle(&self) -> f64 {
        let ratio = self.earth.radius_km / self.orbit_radius_km();
        (ratio * self.max_elevation_rad.cos()).acos() - self.max_elevation_rad
    }

    /// Angular offset along the pass at which the satellite sets.
    pub fn horizon_offset(&self) -> f64 {
        let ratio = self.earth.radius_km / self.orbit_radius_km();
        (ratio / self.closest_approach_angle().cos()).clamp(-1.0, 1.0).acos()
    }
}

/// `df / f` seen from the ground when the satellite is `angular_offset` along
/// its pass from the closest-approach point (negative before, positive after).
pub fn normalized_doppler(cfg: &DopplerPassConfig, angular_offset: f64) -> Result<f64, ImpairmentError> {
    cfg.validate()?;
    let limit = cfg.horizon_offset();
    if !angular_offset.is_finite() || angular_offset.abs() > limit || angular_offset.abs() >= FRAC_PI_2 {
        return Err(ImpairmentError::OutOfPass { offset: angular_offset, limit });
    }
    let r_e = cfg.earth.radius_km;
    let r = cfg.orbit_radius_km();
    let cos_gamma0 = cfg.closest_approach_angle().cos();
    let range = (r_e * r_e + r * r - 2.0 * r_e * r * angular_offset.cos() * cos_gamma0).sqrt();
    let c_km_s = SPEED_OF_LIGHT / 1e3;
    Ok(-(r_e * r * angular_offset.sin() * cos_gamma0 * cfg.ground_relative_rate()) / (c_km_s * range))
}

/// Largest `|df|` in Hz over the visible pass (reached at the horizon).
pub fn max_doppler_hz(cfg: &DopplerPassConfig) -> Result<f64, ImpairmentError> {
    Ok(normalized_doppler(cfg, cfg.horizon_offset())?.abs() * cfg.carrier_hz)
}

/// Frequency-offset sweep between two otherwise identical zenith beams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopplerSweepConfig {
    pub carrier_hz: f64,
    /// Integration window expressed in carrier periods.
    pub window_cycles: u32,
    pub df_min_hz: f64,
    pub df_max_hz: f64,
    pub df_step_hz: f64,
    #[serde(default = "default_sweep_steps")]
    pub steps_per_period: usize,
}

fn default_sweep_steps() -> usize {
    MIN_STEPS_PER_PERIOD
}

impl DopplerSweepConfig {
    /// 12000 carrier periods, about one 1500-byte frame at one bit per period.
    pub const DEFAULT_WINDOW_CYCLES: u32 = 12_000;

    pub fn new(carrier_hz: f64, df_min_hz: f64, df_max_hz: f64, df_step_hz: f64) -> Self {
        Self {
            carrier_hz,
            window_cycles: Self::DEFAULT_WINDOW_CYCLES,
            df_min_hz,
            df_max_hz,
            df_step_hz,
            steps_per_period: MIN_STEPS_PER_PERIOD,
        }
    }

    pub fn window_s(&self) -> f64 {
        f64::from(self.window_cycles) / self.carrier_hz
    }

    pub fn validate(&self) -> Result<(), ImpairmentError> {
        let mut problems = Vec::new();
        if !(self.carrier_hz > 0.0) || !self.carrier_hz.is_finite() {
            problems.push(format!("carrier_hz must be positive, got {}", self.carrier_hz));
        }
        if self.window_cycles < 1 {
            problems.push("window_cycles must be at least 1".to_string());
        }
        if !(self.df_step_hz > 0.0) || !self.df_step_hz.is_finite() {
            problems.push(format!("df_step_hz must be positive, got {}", self.df_step_hz));
        }
        if !self.df_min_hz.is_finite() || !self.df_max_hz.is_finite() || self.df_max_hz < self.df_min_hz {
            problems.push(format!("need finite df_min_hz <= df_max_hz, got [{}, {}]", self.df_min_hz, self.df_max_hz));
        }
        if self.carrier_hz + self.df_min_hz <= 0.0 {
            problems.push("carrier_hz + df_min_hz must stay positive".to_string());
        }
        if self.steps_per_period < MIN_STEPS_PER_PERIOD {
            problems.push(format!("steps_per_period must be at least {MIN_STEPS_PER_PERIOD}"));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ImpairmentError::InvalidSweep(problems.join("; ")))
        }
    }

    /// Offsets visited, ascending; the end point is included when it falls on the grid.
    pub fn offsets(&self) -> Vec<f64> {
        let count = ((self.df_max_hz - self.df_min_hz) / self.df_step_hz + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.df_min_hz + i as f64 * self.df_step_hz).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub df_hz: f64,
    pub enhancement_db: f64,
}

/// Enhancement of a beam pair whose second member is shifted by `df_hz`,
/// relative to the first beam alone, over `window_cycles` carrier periods.
pub fn doppler_enhancement(cfg: &DopplerSweepConfig, df_hz: f64) -> Result<f64, ImpairmentError> {
    let omega = TAU * cfg.carrier_hz;
    let shifted = TAU * (cfg.carrier_hz + df_hz);
    let amplitude = 2f64.sqrt();
    let window = cfg.window_s();
    let f_max = cfg.carrier_hz.max(cfg.carrier_hz + df_hz);
    let steps = (cfg.steps_per_period as f64 * window * f_max).ceil() as usize;

    let beam = BeamAtPoint::zenith(Vec3::x(), 0.0).expect("zenith beam is well-formed");
    let pair = PlaneWaveSet::new(
        vec![PlaneWave::new(beam.clone(), amplitude, omega), PlaneWave::new(beam, amplitude, shifted)],
        amplitude,
    )?;
    let combined = fields::time_avg_poynting(&pair, window, steps)?;
    let reference = fields::single_beam_reference(amplitude, omega, window, steps)?;
    Ok(fields::enhancement_db(&combined, &reference)?.max(DB_FLOOR))
}

/// Enhancement versus frequency offset, ascending in `df`.
pub fn doppler_enhancement_sweep(cfg: &DopplerSweepConfig) -> Result<Vec<SweepPoint>, ImpairmentError> {
    cfg.validate()?;
    cfg.offsets()
        .into_par_iter()
        .map(|df_hz| Ok(SweepPoint { df_hz, enhancement_db: doppler_enhancement(cfg, df_hz)? }))
        .collect()
}

/// First offset at which the sweep falls to `level_db`, linearly interpolated
/// between neighboring points.
pub fn first_crossing_below(points: &[SweepPoint], level_db: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.enhancement_db >= level_db && b.enhancement_db < level_db {
            let frac = (a.enhancement_db - level_db) / (a.enhancement_db - b.enhancement_db);
            Some(a.df_hz + frac * (b.df_hz - a.df_hz))
        } else {
            None
        }
    })
}

/// Per-beam arrival delays, seconds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeOffsetSpec {
    pub per_beam_offset_s: Vec<f64>,
}

impl TimeOffsetSpec {
    pub fn new(per_beam_offset_s: Vec<f64>) -> Self {
        Self { per_beam_offset_s }
    }

    pub fn negated(&self) -> Self {
        Self { per_beam_offset_s: self.per_beam_offset_s.iter().map(|t| -t).collect() }
    }

    /// Offsets of `0, T/2, T, 3T/2, ...` for `beams` beams at `carrier_hz`.
    pub fn staggered_half_periods(beams: usize, carrier_hz: f64) -> Self {
        Self { per_beam_offset_s: (0..beams).map(|m| m as f64 * 0.5 / carrier_hz).collect() }
    }
}

/// Offsets below this many carrier cycles away from a whole number of periods
/// leave the phase untouched.
const WHOLE_CYCLE_TOLERANCE: f64 = 1e-9;

/// Delaying beam `m` by `offset_m` is a phase lag of `w_m offset_m`.
pub fn apply_time_offsets(set: &PlaneWaveSet, offsets: &TimeOffsetSpec) -> Result<PlaneWaveSet, ImpairmentError> {
    if offsets.per_beam_offset_s.len() != set.len() {
        return Err(ImpairmentError::LengthMismatch { offsets: offsets.per_beam_offset_s.len(), beams: set.len() });
    }
    let mut shifted = set.clone();
    for (wave, &offset) in shifted.beams_mut().iter_mut().zip(&offsets.per_beam_offset_s) {
        if !offset.is_finite() {
            return Err(ImpairmentError::NonFiniteOffset(offset));
        }
        shift_phase(wave, offset);
    }
    Ok(shifted)
}

fn shift_phase(wave: &mut PlaneWave, offset_s: f64) {
    let cycles = wave.frequency_hz() * offset_s;
    let fractional = cycles - cycles.round();
    if fractional.abs() < WHOLE_CYCLE_TOLERANCE {
        return;
    }
    wave.beam.arrival_phase_rad = crate::geometry::wrap_phase(wave.beam.arrival_phase_rad - TAU * fractional);
}
