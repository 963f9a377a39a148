//! Accident-risk quantification.
//!
//! Two observable contexts feed the risk model: the absolute deviation of a
//! vehicle's speed from the road limit, and the ratio of its minimum
//! inter-vehicle distance to its safe stopping distance. Each context maps
//! through a closed-form weight function (tanh for speed, a falling sigmoid
//! for distance) to a danger weight in [0, 1]; the accident risk is the sum
//! of the weights and is mapped linearly onto a CSMA backoff counter, high
//! risk getting the smallest (highest-priority) counters.
//!
//! All speeds inside the library are km/h. The stopping-distance formula
//! forces that unit; callers holding mph convert with [`MPH_TO_KMH`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Conversion factor from miles per hour to kilometers per hour.
pub const MPH_TO_KMH: f64 = 1.609344;

/// Number of contexts in the risk model (speed deviation, distance ratio).
pub const N_CONTEXTS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("invalid risk parameters: {0}")]
    InvalidParams(String),
    #[error("accident risk {value} outside [0, {max}]")]
    RiskOutOfRange { value: f64, max: f64 },
    #[error("contention window must be at least 2, got {0}")]
    ContentionWindowTooSmall(u32),
}

/// Coefficients of the risk model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskParams {
    /// Steepness of the speed weight tanh.
    pub k_v: f64,
    /// Steepness of the distance weight sigmoid.
    pub k_d: f64,
    /// Driver reaction time in seconds.
    pub reaction_time_s: f64,
    /// Braking coefficient (dry, level pavement).
    pub braking_coeff: f64,
    /// Road speed limit in km/h.
    pub v_ref_kmh: f64,
    /// Distance-ratio context assigned when no neighbor exists or the
    /// stopping distance is zero; also a sensible binning upper bound.
    pub c_d_max: f64,
}

impl Default for RiskParams {
    fn default() -> Self {
        Self {
            k_v: 2.0 / 3.0,
            k_d: 5.0,
            reaction_time_s: 1.5,
            braking_coeff: 170.0,
            v_ref_kmh: 60.0 * MPH_TO_KMH,
            c_d_max: 4.0,
        }
    }
}

impl RiskParams {
    pub fn validate(&self) -> Result<(), RiskError> {
        let mut issues = Vec::new();
        if !(self.k_v > 0.0) {
            issues.push(format!("k_v must be > 0, got {}", self.k_v));
        }
        if !(self.k_d > 0.0) {
            issues.push(format!("k_d must be > 0, got {}", self.k_d));
        }
        if !(self.reaction_time_s > 0.0) {
            issues.push(format!(
                "reaction_time_s must be > 0, got {}",
                self.reaction_time_s
            ));
        }
        if !(self.braking_coeff > 0.0) {
            issues.push(format!(
                "braking_coeff must be > 0, got {}",
                self.braking_coeff
            ));
        }
        if !(self.v_ref_kmh > 0.0) {
            issues.push(format!("v_ref_kmh must be > 0, got {}", self.v_ref_kmh));
        }
        if !(self.c_d_max > 0.0) {
            issues.push(format!("c_d_max must be > 0, got {}", self.c_d_max));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(RiskError::InvalidParams(issues.join("; ")))
        }
    }
}

/// One round's observed context pair for one vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContextVector {
    /// Absolute speed deviation from the limit, km/h.
    pub c_v: f64,
    /// Minimum inter-vehicle distance over safe stopping distance.
    pub c_d: f64,
}

/// Danger weights, one per context, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub w_v: f64,
    pub w_d: f64,
}

impl WeightVector {
    pub fn accident_risk(&self) -> AccidentRisk {
        accident_risk(&[self.w_v, self.w_d])
    }
}

/// Sum of per-context danger weights, in [0, number of contexts].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct AccidentRisk(f64);

impl AccidentRisk {
    pub fn new(value: f64) -> Self {
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sum the per-context weights. The context set is open-ended; this crate
/// populates exactly two entries (speed, distance).
pub fn accident_risk(weights: &[f64]) -> AccidentRisk {
    AccidentRisk(weights.iter().sum())
}

/// Speed-deviation context: absolute difference between the current speed
/// and the road limit, both in km/h.
pub fn context_speed_variance(v_kmh: f64, v_ref_kmh: f64) -> f64 {
    (v_kmh - v_ref_kmh).abs()
}

/// Speed danger weight, tanh(k_v * c_v). Zero at the limit, saturating
/// toward 1 as the deviation grows.
pub fn weight_speed(c_v: f64, k_v: f64) -> f64 {
    (k_v * c_v).tanh()
}

/// Safe stopping distance in meters for a speed in km/h: reaction distance
/// plus braking distance, d_ref = r * v * 10/36 + v^2 / b.
pub fn safe_stopping_distance(v_kmh: f64, reaction_time_s: f64, braking_coeff: f64) -> f64 {
    reaction_time_s * v_kmh * (10.0 / 36.0) + v_kmh * v_kmh / braking_coeff
}

/// Distance-ratio context c_d = d_min / d_ref.
///
/// `d_min_m` is `None` when the vehicle has no neighbor; that and a zero
/// stopping distance (a stationary vehicle cannot rear-end anyone) both map
/// to the safe cap `c_d_max`.
pub fn context_distance_ratio(d_min_m: Option<f64>, d_ref_m: f64, c_d_max: f64) -> f64 {
    match d_min_m {
        Some(d_min) if d_ref_m > 0.0 => d_min / d_ref_m,
        _ => c_d_max,
    }
}

/// Distance danger weight, the falling sigmoid 1 / (1 + e^(k_d (c_d - 1))).
/// Neutral (0.5) exactly when the headway equals the stopping distance.
pub fn weight_distance(c_d: f64, k_d: f64) -> f64 {
    1.0 / (1.0 + (k_d * (c_d - 1.0)).exp())
}

/// Backoff counter for an accident risk level: the linear map that sends
/// risk 0 to CW-1 and risk `n_ctx` to 0, rounded half away from zero.
pub fn backoff_from_risk(ar: AccidentRisk, cw: u32, n_ctx: usize) -> Result<u32, RiskError> {
    if cw < 2 {
        return Err(RiskError::ContentionWindowTooSmall(cw));
    }
    let max = n_ctx as f64;
    let value = ar.value();
    if !(0.0..=max).contains(&value) {
        return Err(RiskError::RiskOutOfRange { value, max });
    }
    let cw = f64::from(cw);
    // f64::round ties away from zero, which is the rounding rule fixed here.
    let bo = ((1.0 - cw) / max * value + cw - 1.0).round();
    Ok(bo as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_variance_is_symmetric_deviation() {
        assert_eq!(context_speed_variance(96.5606, 96.5606), 0.0);
        assert!((context_speed_variance(80.0, 96.5606) - 16.5606).abs() < 1e-9);
        assert!((context_speed_variance(110.0, 96.5606) - 13.4394).abs() < 1e-9);
    }

    #[test]
    fn speed_weight_matches_tanh_oracle() {
        assert_eq!(weight_speed(0.0, 2.0 / 3.0), 0.0);
        // tanh(1), evaluated independently to full precision.
        assert!((weight_speed(1.5, 2.0 / 3.0) - 0.7615941559557649).abs() < 1e-15);
        assert!(weight_speed(1e6, 2.0 / 3.0) > 1.0 - 1e-12);
    }

    #[test]
    fn stopping_distance_examples() {
        assert_eq!(safe_stopping_distance(0.0, 1.5, 170.0), 0.0);
        let d36 = safe_stopping_distance(36.0, 1.5, 170.0);
        assert!((d36 - (15.0 + 1296.0 / 170.0)).abs() < 1e-12);
        assert!((d36 - 22.6235).abs() < 1e-3);
        let d60mph = safe_stopping_distance(96.5606, 1.5, 170.0);
        assert!((d60mph - 95.08).abs() < 0.01);
    }

    #[test]
    fn stopping_distance_strictly_increasing() {
        let mut prev = safe_stopping_distance(0.0, 1.5, 170.0);
        for i in 1..=1000 {
            let d = safe_stopping_distance(i as f64 * 0.2, 1.5, 170.0);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn distance_ratio_handles_sentinels() {
        assert_eq!(context_distance_ratio(Some(95.08), 95.08, 4.0), 1.0);
        assert_eq!(context_distance_ratio(Some(47.54), 95.08, 4.0), 0.5);
        assert_eq!(context_distance_ratio(None, 95.08, 4.0), 4.0);
        // Stationary vehicle: d_ref = 0 but a neighbor exists.
        assert_eq!(context_distance_ratio(Some(10.0), 0.0, 4.0), 4.0);
    }

    #[test]
    fn distance_weight_matches_sigmoid_oracle() {
        assert!((weight_distance(1.0, 5.0) - 0.5).abs() < 1e-15);
        // 1 / (1 + e^-5), evaluated independently to full precision.
        assert!((weight_distance(0.0, 5.0) - 0.9933071490757153).abs() < 1e-15);
        assert!(weight_distance(1e3, 5.0) < 1e-12);
    }

    #[test]
    fn accident_risk_sums_weights() {
        assert_eq!(accident_risk(&[0.0, 0.0]).value(), 0.0);
        assert_eq!(accident_risk(&[1.0, 1.0]).value(), 2.0);
        let ar = WeightVector {
            w_v: 0.761594,
            w_d: 0.5,
        }
        .accident_risk();
        assert!((ar.value() - 1.261594).abs() < 1e-12);
    }

    #[test]
    fn backoff_endpoints_and_midpoint() {
        let cw = 15;
        assert_eq!(backoff_from_risk(AccidentRisk::new(0.0), cw, 2), Ok(14));
        assert_eq!(backoff_from_risk(AccidentRisk::new(2.0), cw, 2), Ok(0));
        assert_eq!(backoff_from_risk(AccidentRisk::new(1.0), cw, 2), Ok(7));
    }

    #[test]
    fn backoff_rounds_ties_away_from_zero() {
        // CW = 6, AR = 1, n_ctx = 2: -2.5 + 5 = 2.5, which must round to 3.
        assert_eq!(backoff_from_risk(AccidentRisk::new(1.0), 6, 2), Ok(3));
    }

    #[test]
    fn backoff_rejects_out_of_range_risk() {
        assert!(matches!(
            backoff_from_risk(AccidentRisk::new(2.5), 15, 2),
            Err(RiskError::RiskOutOfRange { .. })
        ));
        assert!(matches!(
            backoff_from_risk(AccidentRisk::new(-0.1), 15, 2),
            Err(RiskError::RiskOutOfRange { .. })
        ));
        assert_eq!(
            backoff_from_risk(AccidentRisk::new(1.0), 1, 2),
            Err(RiskError::ContentionWindowTooSmall(1))
        );
    }

    #[test]
    fn params_validate_rejects_bad_fields() {
        let mut p = RiskParams::default();
        assert!(p.validate().is_ok());
        p.k_v = 0.0;
        p.braking_coeff = -1.0;
        let err = p.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("k_v"));
        assert!(msg.contains("braking_coeff"));
    }

    #[test]
    fn mph_conversion_matches_table_reference() {
        assert!((60.0 * MPH_TO_KMH - 96.56064).abs() < 1e-9);
    }
}
