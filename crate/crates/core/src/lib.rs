//! Coherent downlink beamforming from cooperating LEO satellites.
//!
//! Beams are modelled as plane waves at the receiver. The crate computes the
//! time-averaged power they deliver relative to a single satellite and maps
//! that enhancement over the ground. Doppler and timing impairments sit in
//! [`impairments`]; the downlink budget in [`link_budget`].

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coverage;
pub mod fields;
pub mod geometry;
pub mod impairments;
pub mod io;
pub mod link_budget;

/// Lowest enhancement reported, dB. Exact nulls are clamped here.
pub const DB_FLOOR: f64 = -60.0;

pub use coverage::{build_scenario, enhancement_map, CaseId, EnhancementMap, ScenarioConfig, ScenarioParams};
pub use fields::{PlaneWave, PlaneWaveSet, PoyntingResult};
pub use geometry::{EarthModel, GroundPoint, SatelliteBeamSpec, Vec3};
