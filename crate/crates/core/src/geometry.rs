//! Vehicle geometry: Poisson point process layouts, free-direction
//! mobility, and neighborhood queries.
//!
//! Vehicles live on a rectangular region with no lane structure. The count
//! is Poisson in the region area times the density, positions are uniform
//! per axis, headings are uniform, and speeds are normal around the road
//! limit truncated at zero. Mobility is a random-direction walk with
//! toroidal wrap, which keeps the spatial density stationary.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::stream_rng;

/// Densities used by the bundled experiment setups, in vehicles per m^2.
/// `DENSITY_DESK_SCALE` is the default (100 vehicles per km^2);
/// `DENSITY_DENSE` (15 000 per km^2) reproduces a saturated layout and is
/// expensive at full region size.
pub const DENSITY_DESK_SCALE: f64 = 1e-4;
pub const DENSITY_DENSE: f64 = 15e-3;

/// Largest expected vehicle count `sample_ppp` will attempt.
pub const MAX_EXPECTED_VEHICLES: f64 = 1e8;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("region dimensions must be positive finite meters, got {length_m} x {width_m}")]
    InvalidRegion { length_m: f64, width_m: f64 },
    #[error("invalid geometry parameters: {0}")]
    InvalidParams(String),
    #[error("expected vehicle count {0} must be positive, finite, and at most {MAX_EXPECTED_VEHICLES}")]
    BadExpectedCount(f64),
}

/// Rectangular simulation region, `length_m` x `width_m` meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    length_m: f64,
    width_m: f64,
}

impl Region {
    pub fn new(length_m: f64, width_m: f64) -> Result<Self, GeometryError> {
        if length_m > 0.0 && length_m.is_finite() && width_m > 0.0 && width_m.is_finite() {
            Ok(Self { length_m, width_m })
        } else {
            Err(GeometryError::InvalidRegion { length_m, width_m })
        }
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn width_m(&self) -> f64 {
        self.width_m
    }

    pub fn area_m2(&self) -> f64 {
        self.length_m * self.width_m
    }
}

/// One vehicle's kinematic state.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleState {
    pub id: u64,
    pub x_m: f64,
    pub y_m: f64,
    /// Heading in radians, kept in [0, 2pi).
    pub heading_rad: f64,
    pub speed_kmh: f64,
    /// Road speed limit applying to this vehicle, km/h.
    pub v_ref_kmh: f64,
}

/// Parameters for sampling and evolving a vehicle population.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryParams {
    /// Vehicle density in vehicles per m^2.
    pub density_per_m2: f64,
    /// Carrier-sense radius in meters.
    pub cs_range_m: f64,
    /// Standard deviation of the truncated-normal speed draw, km/h.
    pub speed_sigma_kmh: f64,
    /// Road speed limit used as the speed-draw mean, km/h.
    pub v_ref_kmh: f64,
    /// Half-width of the per-step uniform heading perturbation, radians.
    pub heading_jitter_rad: f64,
    pub rng_seed: u64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        Self {
            density_per_m2: DENSITY_DESK_SCALE,
            cs_range_m: 100.0,
            speed_sigma_kmh: 8.0,
            v_ref_kmh: 60.0 * crate::risk::MPH_TO_KMH,
            heading_jitter_rad: std::f64::consts::FRAC_PI_8,
            rng_seed: 0,
        }
    }
}

impl GeometryParams {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let mut issues = Vec::new();
        if !(self.density_per_m2 > 0.0 && self.density_per_m2.is_finite()) {
            issues.push(format!(
                "density_per_m2 must be > 0, got {}",
                self.density_per_m2
            ));
        }
        if !(self.cs_range_m > 0.0) {
            issues.push(format!("cs_range_m must be > 0, got {}", self.cs_range_m));
        }
        if !(self.speed_sigma_kmh >= 0.0) {
            issues.push(format!(
                "speed_sigma_kmh must be >= 0, got {}",
                self.speed_sigma_kmh
            ));
        }
        if !(self.v_ref_kmh > 0.0) {
            issues.push(format!("v_ref_kmh must be > 0, got {}", self.v_ref_kmh));
        }
        if !(self.heading_jitter_rad >= 0.0) {
            issues.push(format!(
                "heading_jitter_rad must be >= 0, got {}",
                self.heading_jitter_rad
            ));
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(GeometryError::InvalidParams(issues.join("; ")))
        }
    }
}

/// Draw one homogeneous-PPP vehicle population (realization 0 of the seed).
pub fn sample_ppp(region: &Region, params: &GeometryParams) -> Result<Vec<VehicleState>, GeometryError> {
    sample_ppp_realization(region, params, 0)
}

/// Draw realization `realization` of the PPP for this seed. Distinct
/// realization indices use independent RNG streams of the same seed.
pub fn sample_ppp_realization(
    region: &Region,
    params: &GeometryParams,
    realization: u64,
) -> Result<Vec<VehicleState>, GeometryError> {
    params.validate()?;
    let mean = params.density_per_m2 * region.area_m2();
    if !mean.is_finite() || mean <= 0.0 || mean > MAX_EXPECTED_VEHICLES {
        return Err(GeometryError::BadExpectedCount(mean));
    }
    let mut rng = stream_rng(params.rng_seed, realization);
    let poisson =
        Poisson::new(mean).map_err(|_| GeometryError::BadExpectedCount(mean))?;
    let count = poisson.sample(&mut rng) as usize;
    let mut vehicles = Vec::with_capacity(count);
    for id in 0..count {
        vehicles.push(VehicleState {
            id: id as u64,
            x_m: rng.gen_range(0.0..region.length_m()),
            y_m: rng.gen_range(0.0..region.width_m()),
            heading_rad: rng.gen_range(0.0..std::f64::consts::TAU),
            speed_kmh: truncated_normal_speed(params.v_ref_kmh, params.speed_sigma_kmh, &mut rng),
            v_ref_kmh: params.v_ref_kmh,
        });
    }
    Ok(vehicles)
}

/// Normal(v_ref, sigma) truncated at zero by rejection.
fn truncated_normal_speed<R: Rng>(v_ref_kmh: f64, sigma_kmh: f64, rng: &mut R) -> f64 {
    if sigma_kmh == 0.0 {
        return v_ref_kmh;
    }
    let dist = Normal::new(v_ref_kmh, sigma_kmh).expect("validated sigma");
    loop {
        let speed = dist.sample(rng);
        if speed >= 0.0 {
            return speed;
        }
    }
}

/// Advance one vehicle by `dt_s` seconds: straight-line displacement along
/// the heading, toroidal wrap into the region, then a uniform heading
/// jitter in [-jitter, +jitter].
pub fn step_mobility<R: Rng>(
    state: &VehicleState,
    region: &Region,
    dt_s: f64,
    heading_jitter_rad: f64,
    rng: &mut R,
) -> VehicleState {
    assert!(dt_s > 0.0, "dt_s must be positive");
    let dist_m = state.speed_kmh / 3.6 * dt_s;
    let x_m = wrap(state.x_m + dist_m * state.heading_rad.cos(), region.length_m());
    let y_m = wrap(state.y_m + dist_m * state.heading_rad.sin(), region.width_m());
    let jitter = if heading_jitter_rad > 0.0 {
        rng.gen_range(-heading_jitter_rad..=heading_jitter_rad)
    } else {
        0.0
    };
    let heading_rad = (state.heading_rad + jitter).rem_euclid(std::f64::consts::TAU);
    VehicleState {
        x_m,
        y_m,
        heading_rad,
        ..state.clone()
    }
}

fn wrap(v: f64, len: f64) -> f64 {
    let w = v.rem_euclid(len);
    if w == len {
        0.0
    } else {
        w
    }
}

/// Euclidean distance to the nearest other vehicle, or `None` when the
/// vehicle has no neighbor. The neighbor set is every other vehicle in the
/// region; carrier-sense membership is a separate query.
///
/// Panics if `self_id` is not present in `vehicles`.
pub fn min_neighbor_distance(self_id: u64, vehicles: &[VehicleState]) -> Option<f64> {
    let me = vehicles
        .iter()
        .find(|v| v.id == self_id)
        .expect("self_id must be in the vehicle list");
    vehicles
        .iter()
        .filter(|v| v.id != self_id)
        .map(|v| ((v.x_m - me.x_m).powi(2) + (v.y_m - me.y_m).powi(2)).sqrt())
        .fold(None, |acc: Option<f64>, d| {
            Some(acc.map_or(d, |m| m.min(d)))
        })
}

/// Number of other vehicles within the carrier-sense radius (closed ball,
/// a neighbor exactly at the radius counts).
pub fn count_in_cs_range(self_id: u64, vehicles: &[VehicleState], cs_range_m: f64) -> usize {
    assert!(cs_range_m > 0.0, "cs_range_m must be positive");
    let me = vehicles
        .iter()
        .find(|v| v.id == self_id)
        .expect("self_id must be in the vehicle list");
    vehicles
        .iter()
        .filter(|v| v.id != self_id)
        .filter(|v| {
            let d2 = (v.x_m - me.x_m).powi(2) + (v.y_m - me.y_m).powi(2);
            d2 <= cs_range_m * cs_range_m
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vehicle(id: u64, x: f64, y: f64) -> VehicleState {
        VehicleState {
            id,
            x_m: x,
            y_m: y,
            heading_rad: 0.0,
            speed_kmh: 50.0,
            v_ref_kmh: 96.56064,
        }
    }

    #[test]
    fn zero_area_region_is_rejected() {
        assert!(matches!(
            Region::new(0.0, 1000.0),
            Err(GeometryError::InvalidRegion { .. })
        ));
        assert!(Region::new(1000.0, 1000.0).is_ok());
    }

    #[test]
    fn dense_preset_expected_count() {
        let region = Region::new(1e3, 1e3).unwrap();
        assert_eq!(DENSITY_DENSE * region.area_m2(), 15000.0);
    }

    #[test]
    fn identical_seed_reproduces_the_population() {
        let region = Region::new(500.0, 400.0).unwrap();
        let params = GeometryParams {
            rng_seed: 99,
            ..GeometryParams::default()
        };
        let a = sample_ppp(&region, &params).unwrap();
        let b = sample_ppp(&region, &params).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
        for v in &a {
            assert!(v.x_m >= 0.0 && v.x_m <= region.length_m());
            assert!(v.y_m >= 0.0 && v.y_m <= region.width_m());
            assert!(v.speed_kmh >= 0.0);
            assert!(v.heading_rad >= 0.0 && v.heading_rad < std::f64::consts::TAU);
        }
    }

    #[test]
    fn zero_speed_does_not_move() {
        let region = Region::new(100.0, 100.0).unwrap();
        let mut v = vehicle(0, 42.0, 17.0);
        v.speed_kmh = 0.0;
        let mut rng = stream_rng(1, 0);
        let after = step_mobility(&v, &region, 1.0, std::f64::consts::FRAC_PI_8, &mut rng);
        assert_eq!(after.x_m, 42.0);
        assert_eq!(after.y_m, 17.0);
    }

    #[test]
    fn mobility_wraps_toroidally() {
        let region = Region::new(1000.0, 1000.0).unwrap();
        let mut v = vehicle(0, 999.0, 500.0);
        v.speed_kmh = 36.0;
        v.heading_rad = 0.0;
        let mut rng = stream_rng(1, 0);
        let after = step_mobility(&v, &region, 1.0, 0.0, &mut rng);
        assert!((after.x_m - 9.0).abs() < 1e-9);
        assert!((after.y_m - 500.0).abs() < 1e-9);
    }

    #[test]
    fn min_distance_examples() {
        let vs = vec![vehicle(0, 0.0, 0.0), vehicle(1, 3.0, 4.0)];
        assert_eq!(min_neighbor_distance(0, &vs), Some(5.0));

        let vs = vec![vehicle(0, 0.0, 0.0), vehicle(1, 10.0, 0.0), vehicle(2, 2.0, 0.0)];
        assert_eq!(min_neighbor_distance(0, &vs), Some(2.0));

        let vs = vec![vehicle(0, 0.0, 0.0)];
        assert_eq!(min_neighbor_distance(0, &vs), None);
    }

    #[test]
    fn cs_range_boundary_is_closed() {
        let vs = vec![vehicle(0, 0.0, 0.0), vehicle(1, 100.0, 0.0), vehicle(2, 100.1, 0.0)];
        assert_eq!(count_in_cs_range(0, &vs, 100.0), 1);
        let lone = vec![vehicle(0, 0.0, 0.0)];
        assert_eq!(count_in_cs_range(0, &lone, 100.0), 0);
    }
}
