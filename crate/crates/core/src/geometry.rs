//! Satellite / Earth-center / ground-point geometry.
//!
//! Two frames are in play. Satellites are placed by their polar angle at the
//! Earth's center (measured from the UE radial) and an azimuth around that
//! radial. Ground points live in a flat local tangent plane with the UE at the
//! origin and `+z` pointing away from the Earth's center. All path lengths are
//! exact Euclidean distances; no far-field simplification is applied.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// Tolerance for the unit-norm checks on user supplied direction vectors.
const UNIT_TOLERANCE: f64 = 1e-12;

/// Below this `|heading x propagation|` the polarization basis is undefined.
const DEGENERATE_CROSS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polar angle {0} rad is outside [0, pi/2)")]
    PolarAngleOutOfRange(f64),
    #[error("altitude must be positive, got {0} km")]
    NonPositiveAltitude(f64),
    #[error("wavelength must be positive, got {0} m")]
    NonPositiveWavelength(f64),
    #[error("{name} is not a unit vector (|v| = {norm})")]
    NotUnit { name: &'static str, norm: f64 },
    #[error("heading is parallel to the propagation direction; polarization is undefined")]
    DegeneratePolarization,
    #[error("satellite is below the local horizon of ground point ({x_m} m, {y_m} m)")]
    BelowHorizon { x_m: f64, y_m: f64 },
    #[error("invalid earth model: {0}")]
    InvalidEarth(String),
    #[error("invalid satellite: {0}")]
    InvalidSatellite(String),
    #[error("ground point has non-finite coordinates")]
    NonFinitePoint,
}

/// Spherical Earth used for slant ranges and orbital rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    pub radius_km: f64,
    /// km^3/s^2
    pub gravitational_parameter: f64,
    /// rad/s
    pub rotation_rate: f64,
}

impl EarthModel {
    pub const MEAN_RADIUS_KM: f64 = 6371.0;
    pub const MU_KM3_S2: f64 = 398_600.441_8;
    pub const ROTATION_RATE: f64 = 7.292_115_0e-5;

    pub fn new(radius_km: f64, gravitational_parameter: f64, rotation_rate: f64) -> Result<Self, GeometryError> {
        let earth = Self { radius_km, gravitational_parameter, rotation_rate };
        earth.validate()?;
        Ok(earth)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.radius_km > 0.0) || !self.radius_km.is_finite() {
            return Err(GeometryError::InvalidEarth(format!("radius_km must be positive, got {}", self.radius_km)));
        }
        if !(self.gravitational_parameter > 0.0) || !self.gravitational_parameter.is_finite() {
            return Err(GeometryError::InvalidEarth(format!(
                "gravitational_parameter must be positive, got {}",
                self.gravitational_parameter
            )));
        }
        if !self.rotation_rate.is_finite() {
            return Err(GeometryError::InvalidEarth("rotation_rate must be finite".into()));
        }
        Ok(())
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_km * 1e3
    }
}

impl Default for EarthModel {
    fn default() -> Self {
        Self {
            radius_km: Self::MEAN_RADIUS_KM,
            gravitational_parameter: Self::MU_KM3_S2,
            rotation_rate: Self::ROTATION_RATE,
        }
    }
}

/// One cooperating satellite: where it is, which way it moves and how its
/// beam arrives at the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteBeamSpec {
    pub altitude_km: f64,
    /// Angle at the Earth's center between the satellite and the UE.
    pub polar_angle_rad: f64,
    /// Direction of the sub-satellite point as seen from the UE, from `+x` toward `+y`.
    pub azimuth_rad: f64,
    /// Orbit motion direction in the local frame; sets the linear polarization.
    pub heading_unit: Vec3,
    pub initial_phase_rad: f64,
    /// Field amplitude at the receiver, V/m.
    pub amplitude_at_receiver: f64,
}

impl SatelliteBeamSpec {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.altitude_km > 0.0) || !self.altitude_km.is_finite() {
            return Err(GeometryError::NonPositiveAltitude(self.altitude_km));
        }
        check_polar_angle(self.polar_angle_rad)?;
        if !self.azimuth_rad.is_finite() || !self.initial_phase_rad.is_finite() {
            return Err(GeometryError::InvalidSatellite("azimuth and initial phase must be finite".into()));
        }
        check_unit("heading_unit", &self.heading_unit)?;
        if !(self.amplitude_at_receiver > 0.0) || !self.amplitude_at_receiver.is_finite() {
            return Err(GeometryError::InvalidSatellite(format!(
                "amplitude_at_receiver must be positive, got {}",
                self.amplitude_at_receiver
            )));
        }
        Ok(())
    }

    /// Satellite position in the UE-centered local frame, meters.
    pub fn position_m(&self, earth: &EarthModel) -> Vec3 {
        let orbit_radius = earth.radius_m() + self.altitude_km * 1e3;
        let (sin_az, cos_az) = quadrant_exact_sin_cos(self.azimuth_rad);
        let (sin_a, cos_a) = self.polar_angle_rad.sin_cos();
        Vec3::new(
            orbit_radius * sin_a * cos_az,
            orbit_radius * sin_a * sin_az,
            orbit_radius * cos_a - earth.radius_m(),
        )
    }
}

/// Offset from the UE in the local tangent plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundPoint {
    pub x_m: f64,
    pub y_m: f64,
}

impl GroundPoint {
    pub const ORIGIN: GroundPoint = GroundPoint { x_m: 0.0, y_m: 0.0 };

    pub fn new(x_m: f64, y_m: f64) -> Self {
        Self { x_m, y_m }
    }

    pub fn position_m(&self) -> Vec3 {
        Vec3::new(self.x_m, self.y_m, 0.0)
    }
}

/// Plane-wave description of one satellite's beam at one ground point.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamAtPoint {
    /// Satellite toward point.
    pub propagation_unit: Vec3,
    pub path_length_m: f64,
    pub e_pol_unit: Vec3,
    pub h_pol_unit: Vec3,
    /// `initial_phase - k R`, reduced to `[0, 2pi)`.
    pub arrival_phase_rad: f64,
    /// Angle between the arriving ray and the local vertical.
    pub incidence_theta_rad: f64,
}

impl BeamAtPoint {
    /// Builds a beam from its direction of travel and the transmitter heading,
    /// bypassing satellite placement.
    pub fn from_direction(
        propagation_unit: Vec3,
        heading_unit: Vec3,
        path_length_m: f64,
        arrival_phase_rad: f64,
    ) -> Result<Self, GeometryError> {
        let (e_pol_unit, h_pol_unit) = polarization_basis(&heading_unit, &propagation_unit)?;
        Ok(Self {
            incidence_theta_rad: propagation_unit.xy().norm().atan2(-propagation_unit.z),
            propagation_unit,
            path_length_m,
            e_pol_unit,
            h_pol_unit,
            arrival_phase_rad: wrap_phase(arrival_phase_rad),
        })
    }

    /// Beam arriving straight down at the UE.
    pub fn zenith(heading_unit: Vec3, arrival_phase_rad: f64) -> Result<Self, GeometryError> {
        Self::from_direction(-Vec3::z(), heading_unit, 0.0, arrival_phase_rad)
    }
}

/// Satellite to UE distance from the Earth-center triangle (law of cosines).
pub fn slant_range(alpha: f64, h_km: f64, earth: &EarthModel) -> Result<f64, GeometryError> {
    check_polar_angle(alpha)?;
    if !(h_km > 0.0) || !h_km.is_finite() {
        return Err(GeometryError::NonPositiveAltitude(h_km));
    }
    let r_e = earth.radius_km;
    let r_orbit = r_e + h_km;
    // (r+h)^2 + r^2 - 2r(r+h)cos(a), rearranged so that small angles do not
    // cancel catastrophically.
    let half_sin = (0.5 * alpha).sin();
    let squared = h_km * h_km + 4.0 * r_e * r_orbit * half_sin * half_sin;
    Ok(squared.sqrt().max(h_km))
}

/// Propagation phase difference `|R1 - R2| 2pi / lambda`, not wrapped.
pub fn path_phase_difference(r1: f64, r2: f64, wavelength: f64) -> Result<f64, GeometryError> {
    if !(wavelength > 0.0) {
        return Err(GeometryError::NonPositiveWavelength(wavelength));
    }
    Ok((r1 - r2).abs() * TAU / wavelength)
}

/// Zenith angle of the arriving beam at the UE, `alpha + beta` with `beta`
/// the angle at the satellite from the law of sines.
pub fn incidence_theta(alpha: f64, h_km: f64, earth: &EarthModel) -> Result<f64, GeometryError> {
    let range = slant_range(alpha, h_km, earth)?;
    let beta = (earth.radius_km * alpha.sin() / range).clamp(-1.0, 1.0).asin();
    Ok(alpha + beta)
}

/// Inverse of [`incidence_theta`]: the polar angle that makes the beam arrive
/// at zenith angle `theta`.
pub fn polar_angle_for_incidence(theta: f64, h_km: f64, earth: &EarthModel) -> Result<f64, GeometryError> {
    if !(0.0..FRAC_PI_2).contains(&theta) {
        return Err(GeometryError::PolarAngleOutOfRange(theta));
    }
    if !(h_km > 0.0) {
        return Err(GeometryError::NonPositiveAltitude(h_km));
    }
    let beta = (earth.radius_km * theta.sin() / (earth.radius_km + h_km)).asin();
    Ok(theta - beta)
}

/// E/H directions for a beam whose E field follows the satellite heading.
pub fn polarization_basis(heading_unit: &Vec3, propagation_unit: &Vec3) -> Result<(Vec3, Vec3), GeometryError> {
    check_unit("heading_unit", heading_unit)?;
    check_unit("propagation_unit", propagation_unit)?;
    if heading_unit.cross(propagation_unit).norm() < DEGENERATE_CROSS {
        return Err(GeometryError::DegeneratePolarization);
    }
    let transverse = heading_unit - propagation_unit * heading_unit.dot(propagation_unit);
    let e_pol = transverse / transverse.norm();
    let h_raw = propagation_unit.cross(&e_pol);
    let h_pol = h_raw / h_raw.norm();
    Ok((e_pol, h_pol))
}

/// Full plane-wave description of `sat`'s beam at ground point `p`.
pub fn beam_at_point(
    sat: &SatelliteBeamSpec,
    p: &GroundPoint,
    earth: &EarthModel,
    wavelength: f64,
) -> Result<BeamAtPoint, GeometryError> {
    sat.validate()?;
    if !(wavelength > 0.0) {
        return Err(GeometryError::NonPositiveWavelength(wavelength));
    }
    if !p.x_m.is_finite() || !p.y_m.is_finite() {
        return Err(GeometryError::NonFinitePoint);
    }
    let sat_pos = sat.position_m(earth);
    let ground = p.position_m();
    let to_ground = ground - sat_pos;
    if -to_ground.z <= 0.0 {
        return Err(GeometryError::BelowHorizon { x_m: p.x_m, y_m: p.y_m });
    }
    let path_length_m = to_ground.norm();
    let propagation_unit = to_ground / path_length_m;
    let (e_pol_unit, h_pol_unit) = polarization_basis(&sat.heading_unit, &propagation_unit)?;
    let cycles = path_length_m / wavelength;
    let arrival_phase_rad = wrap_phase(sat.initial_phase_rad - TAU * cycles.fract());
    let incidence_theta_rad = propagation_unit.xy().norm().atan2(-propagation_unit.z);
    Ok(BeamAtPoint {
        propagation_unit,
        path_length_m,
        e_pol_unit,
        h_pol_unit,
        arrival_phase_rad,
        incidence_theta_rad,
    })
}

/// Heading along azimuth `angle` in the horizontal plane.
pub fn horizontal_heading(angle: f64) -> Vec3 {
    let (s, c) = quadrant_exact_sin_cos(angle);
    Vec3::new(c, s, 0.0)
}

/// `sin_cos` that returns exact values on multiples of pi/2, so that mirrored
/// placements produce bit-identical coordinates.
pub(crate) fn quadrant_exact_sin_cos(angle: f64) -> (f64, f64) {
    let quarter_turns = angle / FRAC_PI_2;
    let nearest = quarter_turns.round();
    if (quarter_turns - nearest).abs() < 1e-12 {
        match (nearest as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        angle.sin_cos()
    }
}

fn check_polar_angle(alpha: f64) -> Result<(), GeometryError> {
    if !(0.0..FRAC_PI_2).contains(&alpha) {
        return Err(GeometryError::PolarAngleOutOfRange(alpha));
    }
    Ok(())
}

fn check_unit(name: &'static str, v: &Vec3) -> Result<(), GeometryError> {
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(GeometryError::NotUnit { name, norm });
    }
    Ok(())
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2pi for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}
