//! Additive dB link budget for a satellite-to-handset downlink.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fields::SPEED_OF_LIGHT;

/// 5G NR band n78 minimum reference sensitivity, dBm.
pub const N78_REFERENCE_SENSITIVITY_DBM: f64 = -96.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkBudgetError {
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative, got {value}")]
    NegativeLoss { field: &'static str, value: f64 },
    #[error("{field} must be finite")]
    NonFinite { field: &'static str },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub distance_km: f64,
    pub frequency_hz: f64,
    pub eirp_dbw: f64,
    /// Informational: EIRP already contains the transmit antenna gain.
    pub tx_antenna_gain_dbi: f64,
    pub rx_antenna_gain_dbi: f64,
    pub atmospheric_rain_loss_db: f64,
    pub tx_loss_db: f64,
    pub rx_loss_db: f64,
}

impl LinkBudget {
    /// 600 km, 3.5 GHz downlink to a 0 dBi handset antenna.
    pub fn handset_600km_3g5() -> Self {
        Self {
            distance_km: 600.0,
            frequency_hz: 3.5e9,
            eirp_dbw: 36.7,
            tx_antenna_gain_dbi: 37.1,
            rx_antenna_gain_dbi: 0.0,
            atmospheric_rain_loss_db: 5.0,
            tx_loss_db: 2.0,
            rx_loss_db: 2.0,
        }
    }

    /// Every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<LinkBudgetError> {
        let mut out = Vec::new();
        for (field, value) in [("distance_km", self.distance_km), ("frequency_hz", self.frequency_hz)] {
            if !value.is_finite() {
                out.push(LinkBudgetError::NonFinite { field });
            } else if value <= 0.0 {
                out.push(LinkBudgetError::NonPositive { field, value });
            }
        }
        for (field, value) in [
            ("atmospheric_rain_loss_db", self.atmospheric_rain_loss_db),
            ("tx_loss_db", self.tx_loss_db),
            ("rx_loss_db", self.rx_loss_db),
        ] {
            if !value.is_finite() {
                out.push(LinkBudgetError::NonFinite { field });
            } else if value < 0.0 {
                out.push(LinkBudgetError::NegativeLoss { field, value });
            }
        }
        for (field, value) in [
            ("eirp_dbw", self.eirp_dbw),
            ("tx_antenna_gain_dbi", self.tx_antenna_gain_dbi),
            ("rx_antenna_gain_dbi", self.rx_antenna_gain_dbi),
        ] {
            if !value.is_finite() {
                out.push(LinkBudgetError::NonFinite { field });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), LinkBudgetError> {
        match self.violations().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRef {
    pub threshold_dbm: f64,
}

impl Default for SensitivityRef {
    fn default() -> Self {
        Self { threshold_dbm: N78_REFERENCE_SENSITIVITY_DBM }
    }
}

/// Free-space path loss `20 log10(4 pi d f / c)`, distance in km.
pub fn fspl_db(distance_km: f64, frequency_hz: f64) -> Result<f64, LinkBudgetError> {
    if !(distance_km > 0.0) {
        return Err(LinkBudgetError::NonPositive { field: "distance_km", value: distance_km });
    }
    if !(frequency_hz > 0.0) {
        return Err(LinkBudgetError::NonPositive { field: "frequency_hz", value: frequency_hz });
    }
    Ok(20.0 * (4.0 * PI * distance_km * 1e3 * frequency_hz / SPEED_OF_LIGHT).log10())
}

pub fn dbw_to_dbm(dbw: f64) -> f64 {
    dbw + 30.0
}

pub fn received_power_dbm(b: &LinkBudget) -> Result<f64, LinkBudgetError> {
    b.validate()?;
    Ok(dbw_to_dbm(b.eirp_dbw) - fspl_db(b.distance_km, b.frequency_hz)? - b.atmospheric_rain_loss_db - b.tx_loss_db
        - b.rx_loss_db
        + b.rx_antenna_gain_dbi)
}

/// Received power plus beamforming enhancement, measured against the
/// sensitivity threshold. Positive means the link closes.
pub fn margin_db(p_rx_dbm: f64, sens: &SensitivityRef, enhancement_db: f64) -> f64 {
    p_rx_dbm + enhancement_db - sens.threshold_dbm
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn fspl_examples() {
        assert!((fspl_db(600.0, 3.5e9).unwrap() - 158.9).abs() < 0.05);
        assert_relative_eq!(fspl_db(6000.0, 3.5e9).unwrap() - fspl_db(600.0, 3.5e9).unwrap(), 20.0, epsilon = 1e-10);
        assert!((fspl_db(550.0, 2e9).unwrap() - 153.28).abs() < 0.01);
        assert!(fspl_db(0.0, 1e9).is_err());
        assert!(fspl_db(1.0, -1.0).is_err());
    }

    #[test]
    fn reference_budget_bottom_line() {
        let p = received_power_dbm(&LinkBudget::handset_600km_3g5()).unwrap();
        assert!((p - (-101.2)).abs() < 0.05, "{p}");
    }

    #[test]
    fn lossless_budget_is_minus_fspl() {
        let b = LinkBudget {
            eirp_dbw: -30.0,
            tx_antenna_gain_dbi: 0.0,
            rx_antenna_gain_dbi: 0.0,
            atmospheric_rain_loss_db: 0.0,
            tx_loss_db: 0.0,
            rx_loss_db: 0.0,
            ..LinkBudget::handset_600km_3g5()
        };
        assert_relative_eq!(received_power_dbm(&b).unwrap(), -fspl_db(600.0, 3.5e9).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn two_satellite_enhancement_closes_the_link() {
        let p = received_power_dbm(&LinkBudget::handset_600km_3g5()).unwrap();
        let enhanced = p + 10.0 * 4f64.log10();
        assert!((enhanced - (-95.2)).abs() < 0.05);
        assert!(enhanced > N78_REFERENCE_SENSITIVITY_DBM);
    }

    #[test]
    fn margin_examples() {
        let sens = SensitivityRef::default();
        assert_relative_eq!(margin_db(-101.2, &sens, 0.0), -4.7, epsilon = 1e-9);
        assert_relative_eq!(margin_db(-101.2, &sens, 6.02), 1.32, epsilon = 1e-9);
        assert_eq!(margin_db(-80.0, &SensitivityRef { threshold_dbm: -80.0 }, 0.0), 0.0);
    }

    #[test]
    fn violations_are_all_reported() {
        let b = LinkBudget { distance_km: -1.0, tx_loss_db: -2.0, rx_loss_db: f64::NAN, ..LinkBudget::handset_600km_3g5() };
        let v = b.violations();
        assert_eq!(v.len(), 3, "{v:?}");
        assert!(received_power_dbm(&b).is_err());
    }

    proptest! {
        #[test]
        fn fspl_depends_only_on_distance_frequency_product(d in 1.0f64..40000.0, f in 1e8f64..1e11) {
            prop_assert!((fspl_db(2.0 * d, f).unwrap() - fspl_db(d, 2.0 * f).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn received_power_falls_with_every_loss(extra in 0.01f64..20.0, which in 0usize..4) {
            let base = LinkBudget::handset_600km_3g5();
            let mut worse = base.clone();
            match which {
                0 => worse.atmospheric_rain_loss_db += extra,
                1 => worse.tx_loss_db += extra,
                2 => worse.rx_loss_db += extra,
                _ => worse.distance_km += extra * 10.0,
            }
            prop_assert!(received_power_dbm(&worse).unwrap() < received_power_dbm(&base).unwrap());
        }

        #[test]
        fn margin_is_linear_in_enhancement(p in -150.0f64..-50.0, s in -120.0f64..-60.0, e in -10.0f64..30.0) {
            let sens = SensitivityRef { threshold_dbm: s };
            prop_assert!((margin_db(p, &sens, e) - e - margin_db(p, &sens, 0.0)).abs() < 1e-9);
        }
    }
}
