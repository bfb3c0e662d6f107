//! Plane-wave superposition at the receiver.
//!
//! Every beam is a linearly polarized plane wave
//! `E_m(t) = A_m sin(w_m t + phi_m) e_m`, `H_m(t) = (A_m / Z0) sin(w_m t + phi_m) h_m`.
//! The received power density is the time average of `E x H`, computed here by
//! composite midpoint quadrature over a finite window. The closed-form
//! enhancement bounds for parallel, perpendicular and intersecting orbit
//! families live alongside so the two routes can be checked against each other.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{BeamAtPoint, Vec3};

/// Free-space wave impedance, ohms.
pub const Z0: f64 = 376.730;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Quadrature density used when none is requested.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 256;
/// Fewest samples per carrier period the quadrature accepts.
pub const MIN_STEPS_PER_PERIOD: usize = 64;

/// How often the oscillator recurrence is re-anchored to a direct evaluation.
const RESYNC_INTERVAL: usize = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("plane-wave set is empty")]
    EmptySet,
    #[error("beam {index}: {reason}")]
    InvalidBeam { index: usize, reason: String },
    #[error("reference amplitude must be positive, got {0}")]
    InvalidReference(f64),
    #[error("integration window must be positive, got {0} s")]
    InvalidWindow(f64),
    #[error("quadrature under-resolved: {steps} steps for {periods:.3} carrier periods (need >= {MIN_STEPS_PER_PERIOD} per period)")]
    UnderResolved { steps: usize, periods: f64 },
    #[error("beams carry different frequencies; give an explicit integration window")]
    MixedFrequencies,
    #[error("reference power is zero or not finite")]
    DegenerateReference,
    #[error("{0}")]
    Domain(String),
}

/// One beam at the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave {
    pub beam: BeamAtPoint,
    /// Peak field amplitude at the receiver, V/m.
    pub amplitude: f64,
    /// rad/s
    pub angular_frequency: f64,
}

impl PlaneWave {
    pub fn new(beam: BeamAtPoint, amplitude: f64, angular_frequency: f64) -> Self {
        Self { beam, amplitude, angular_frequency }
    }

    pub fn frequency_hz(&self) -> f64 {
        self.angular_frequency / TAU
    }
}

/// Beams superposed at one receiver position.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveSet {
    beams: Vec<PlaneWave>,
    reference_amplitude: f64,
}

impl PlaneWaveSet {
    /// `reference_amplitude` is the per-beam amplitude that a lone satellite
    /// delivers, `sqrt(2) E0` under the equal-energy convention.
    pub fn new(beams: Vec<PlaneWave>, reference_amplitude: f64) -> Result<Self, FieldError> {
        if beams.is_empty() {
            return Err(FieldError::EmptySet);
        }
        for (index, wave) in beams.iter().enumerate() {
            if !(wave.amplitude > 0.0) || !wave.amplitude.is_finite() {
                return Err(FieldError::InvalidBeam { index, reason: format!("amplitude {} is not positive", wave.amplitude) });
            }
            if !(wave.angular_frequency > 0.0) || !wave.angular_frequency.is_finite() {
                return Err(FieldError::InvalidBeam {
                    index,
                    reason: format!("angular frequency {} is not positive", wave.angular_frequency),
                });
            }
        }
        if !(reference_amplitude > 0.0) || !reference_amplitude.is_finite() {
            return Err(FieldError::InvalidReference(reference_amplitude));
        }
        Ok(Self { beams, reference_amplitude })
    }

    pub fn beams(&self) -> &[PlaneWave] {
        &self.beams
    }

    pub(crate) fn beams_mut(&mut self) -> &mut [PlaneWave] {
        &mut self.beams
    }

    pub fn reference_amplitude(&self) -> f64 {
        self.reference_amplitude
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn max_frequency_hz(&self) -> f64 {
        self.beams.iter().map(PlaneWave::frequency_hz).fold(0.0, f64::max)
    }

    /// Common carrier period, if all beams share one frequency.
    pub fn common_period(&self) -> Option<f64> {
        let omega = self.beams[0].angular_frequency;
        self.beams.iter().all(|b| b.angular_frequency == omega).then(|| TAU / omega)
    }

    /// `sum_m A_m`, the fully coherent field amplitude.
    pub fn coherent_amplitude(&self) -> f64 {
        self.beams.iter().map(|b| b.amplitude).sum()
    }
}

/// Time-averaged Poynting vector over `[0, window_s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoyntingResult {
    /// W/m^2
    pub s_avg: Vec3,
    pub magnitude: f64,
    pub window_s: f64,
    pub integration_steps: usize,
}

impl PoyntingResult {
    /// Downward (toward the ground) component.
    pub fn vertical(&self) -> f64 {
        -self.s_avg.z
    }
}

/// Which scalar of `S_avg` an enhancement ratio compares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnhancementMetric {
    #[default]
    Magnitude,
    Vertical,
}

impl EnhancementMetric {
    pub fn of(self, p: &PoyntingResult) -> f64 {
        match self {
            EnhancementMetric::Magnitude => p.magnitude,
            EnhancementMetric::Vertical => p.vertical(),
        }
    }
}

/// Total E and H at time `t`.
pub fn instantaneous_fields(set: &PlaneWaveSet, t: f64) -> (Vec3, Vec3) {
    set.beams.iter().fold((Vec3::zeros(), Vec3::zeros()), |(e, h), wave| {
        let s = wave.amplitude * (wave.angular_frequency * t + wave.beam.arrival_phase_rad).sin();
        (e + wave.beam.e_pol_unit * s, h + wave.beam.h_pol_unit * (s / Z0))
    })
}

/// `(1/T) int_0^T E(t) x H(t) dt` by the composite midpoint rule with `steps`
/// equal sub-intervals.
pub fn time_avg_poynting(set: &PlaneWaveSet, window: f64, steps: usize) -> Result<PoyntingResult, FieldError> {
    if !(window > 0.0) || !window.is_finite() {
        return Err(FieldError::InvalidWindow(window));
    }
    let periods = window * set.max_frequency_hz();
    // A window of exactly n periods may come out a hair above n in floating point.
    if (steps as f64) < MIN_STEPS_PER_PERIOD as f64 * periods * (1.0 - 1e-9) || steps == 0 {
        return Err(FieldError::UnderResolved { steps, periods });
    }

    let dt = window / steps as f64;

    // Beams sharing a carrier share one oscillator.
    let mut omegas: Vec<f64> = Vec::new();
    let terms: Vec<BeamTerm> = set
        .beams
        .iter()
        .map(|wave| {
            let group = match omegas.iter().position(|&w| w == wave.angular_frequency) {
                Some(g) => g,
                None => {
                    omegas.push(wave.angular_frequency);
                    omegas.len() - 1
                }
            };
            let (sin_phi, cos_phi) = wave.beam.arrival_phase_rad.sin_cos();
            BeamTerm {
                group,
                cos_phi,
                sin_phi,
                e: wave.beam.e_pol_unit * wave.amplitude,
                h: wave.beam.h_pol_unit * (wave.amplitude / Z0),
            }
        })
        .collect();
    let rotors: Vec<Complex64> = omegas.iter().map(|&w| Complex64::from_polar(1.0, w * dt)).collect();
    let mut phasors: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); omegas.len()];

    let mut accum = Vec3::zeros();
    for j in 0..steps {
        if j % RESYNC_INTERVAL == 0 {
            let t = (j as f64 + 0.5) * dt;
            for (z, &w) in phasors.iter_mut().zip(&omegas) {
                *z = Complex64::from_polar(1.0, w * t);
            }
        }
        let mut e = Vec3::zeros();
        let mut h = Vec3::zeros();
        for term in &terms {
            let z = phasors[term.group];
            // sin(wt + phi) = sin(wt) cos(phi) + cos(wt) sin(phi)
            let s = z.im * term.cos_phi + z.re * term.sin_phi;
            e += term.e * s;
            h += term.h * s;
        }
        accum += e.cross(&h);
        for (z, r) in phasors.iter_mut().zip(&rotors) {
            *z *= r;
        }
    }
    let s_avg = accum / steps as f64;
    Ok(PoyntingResult { magnitude: s_avg.norm(), s_avg, window_s: window, integration_steps: steps })
}

struct BeamTerm {
    group: usize,
    cos_phi: f64,
    sin_phi: f64,
    e: Vec3,
    h: Vec3,
}

/// Average over exactly one common carrier period.
pub fn period_average(set: &PlaneWaveSet, steps_per_period: usize) -> Result<PoyntingResult, FieldError> {
    let period = set.common_period().ok_or(FieldError::MixedFrequencies)?;
    time_avg_poynting(set, period, steps_per_period)
}

/// Power density of one beam of amplitude `amplitude` arriving from zenith:
/// the 0 dB reference for enhancement ratios.
pub fn single_beam_reference(
    amplitude: f64,
    angular_frequency: f64,
    window: f64,
    steps: usize,
) -> Result<PoyntingResult, FieldError> {
    let beam = BeamAtPoint::zenith(Vec3::x(), 0.0).expect("zenith beam with x heading is well-formed");
    let set = PlaneWaveSet::new(vec![PlaneWave::new(beam, amplitude, angular_frequency)], amplitude)?;
    time_avg_poynting(&set, window, steps)
}

/// `10 log10(|S_combined| / |S_ref|)`.
pub fn enhancement_db(combined: &PoyntingResult, single_ref: &PoyntingResult) -> Result<f64, FieldError> {
    enhancement_db_with(EnhancementMetric::Magnitude, combined, single_ref)
}

pub fn enhancement_db_with(
    metric: EnhancementMetric,
    combined: &PoyntingResult,
    single_ref: &PoyntingResult,
) -> Result<f64, FieldError> {
    let reference = metric.of(single_ref);
    if !(reference > 0.0) || !reference.is_finite() {
        return Err(FieldError::DegenerateReference);
    }
    Ok(ratio_to_db(metric.of(combined) / reference))
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// N satellites on parallel orbits, all in phase at zenith: `N^2`.
pub fn closed_form_parallel_max(n: usize) -> Result<f64, FieldError> {
    if n == 0 {
        return Err(FieldError::Domain("need at least one satellite".into()));
    }
    Ok((n * n) as f64)
}

/// Half of N satellites on one orbit family, half on the perpendicular one: `N^2 / 2`.
pub fn closed_form_perpendicular_max(n: usize) -> Result<f64, FieldError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(FieldError::Domain(format!("perpendicular split needs an even count >= 2, got {n}")));
    }
    Ok((n * n) as f64 / 2.0)
}

/// `N^2 - M N (1 - cos xi)` for M of N satellites on an orbit crossing the
/// others at angle `xi`.
///
/// This is the closed-form bound. It coincides with the coherent vector sum
/// `|(N-M) e1 + M e2|^2 = N^2 - 2M(N-M)(1 - cos xi)` when `M = N/2`; for other
/// splits the two differ (see [`coherent_split_max`]).
pub fn closed_form_intersecting_max(n: usize, m: usize, xi: f64) -> Result<f64, FieldError> {
    if m < 1 || m >= n {
        return Err(FieldError::Domain(format!("need 1 <= m < n, got n = {n}, m = {m}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&xi) {
        return Err(FieldError::Domain(format!("intersection angle {xi} rad outside [0, pi/2]")));
    }
    let (n, m) = (n as f64, m as f64);
    Ok(n * n - m * n * (1.0 - xi.cos()))
}

/// Power ratio of the in-phase sum of `n - m` co-polarized beams with `m`
/// beams polarized at angle `xi` to them.
pub fn coherent_split_max(n: usize, m: usize, xi: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    n * n - 2.0 * m * (n - m) * (1.0 - xi.cos())
}

/// Diversity-only gain of N transmitters and one receive antenna.
pub fn miso_gain(n: usize) -> Result<f64, FieldError> {
    if n == 0 {
        return Err(FieldError::Domain("need at least one transmitter".into()));
    }
    Ok(n as f64)
}

/// Two-element array response `1 + exp(j (phase_offset + k d sin(theta) cos(phi)))`
/// using the far-field approximations (equal `1/r`, parallel rays).
pub fn phased_array_field(
    d: f64,
    phase_offset: f64,
    theta: f64,
    phi: f64,
    wavelength: f64,
) -> Result<Complex64, FieldError> {
    phased_array_field_with_element(d, phase_offset, theta, phi, wavelength, |_, _| 1.0)
}

/// [`phased_array_field`] scaled by an element pattern `f_e(theta, phi)`.
pub fn phased_array_field_with_element(
    d: f64,
    phase_offset: f64,
    theta: f64,
    phi: f64,
    wavelength: f64,
    element: impl Fn(f64, f64) -> f64,
) -> Result<Complex64, FieldError> {
    if !(d > 0.0) {
        return Err(FieldError::Domain(format!("element spacing must be positive, got {d}")));
    }
    if !(wavelength > 0.0) {
        return Err(FieldError::Domain(format!("wavelength must be positive, got {wavelength}")));
    }
    let k = TAU / wavelength;
    let cos_gamma = theta.sin() * phi.cos();
    let af = Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, phase_offset + k * d * cos_gamma);
    Ok(af * element(theta, phi))
}

/// Two isotropic point sources (at the origin and at `d` on the x axis) summed
/// exactly at `target`, normalized so that one source at range `r` gives `1/r`.
/// Unlike [`phased_array_field`] this keeps both `1/r` terms and true ranges,
/// which is what matters once the sources are kilometers apart.
pub fn two_source_field_exact(d: f64, phase_offset: f64, target: &Vec3, wavelength: f64) -> Complex64 {
    let k = TAU / wavelength;
    let r1 = target.norm();
    let r2 = (target - Vec3::new(d, 0.0, 0.0)).norm();
    Complex64::from_polar(1.0 / r1, -k * r1) + Complex64::from_polar(1.0 / r2, phase_offset - k * r2)
}
