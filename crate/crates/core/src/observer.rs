//! Ground station position, velocity and acceleration in the inertial
//! equatorial frame, for a spherical Earth rotating uniformly about +z.

use serde::{Deserialize, Serialize};

use crate::time::Epoch;
use crate::{Error, Result, Vec3, EARTH_ROTATION_RATE};

/// Epoch at which the station's longitude coincides with its inertial right
/// ascension (zero reference rotation angle).
pub const ROTATION_REFERENCE_MJD: f64 = 54127.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationSpec {
    pub name: String,
    /// Geocentric latitude, rad.
    pub latitude: f64,
    /// Longitude east of the reference meridian, rad.
    pub longitude: f64,
    /// Geocentric radius, km.
    pub radius: f64,
}

impl StationSpec {
    pub fn from_degrees(name: &str, lat_deg: f64, lon_deg: f64, radius_km: f64) -> Result<Self> {
        let s = StationSpec {
            name: name.to_string(),
            latitude: lat_deg.to_radians(),
            longitude: lon_deg.to_radians(),
            radius: radius_km,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(6300.0..=6400.0).contains(&self.radius) {
            return Err(Error::InvalidInput(format!(
                "station '{}' radius {} km outside [6300, 6400]",
                self.name, self.radius
            )));
        }
        if !self.latitude.is_finite()
            || self.latitude.abs() > std::f64::consts::FRAC_PI_2
            || !self.longitude.is_finite()
        {
            return Err(Error::InvalidInput(format!("station '{}' has invalid coordinates", self.name)));
        }
        Ok(())
    }

    /// The station whose geometry reproduces the published two-track
    /// example: both passes of the reference LEO object are visible from it.
    pub fn reference() -> Self {
        StationSpec {
            name: "REF".to_string(),
            latitude: (-18.03f64).to_radians(),
            longitude: (-15.37f64).to_radians(),
            radius: 6376.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObserverState {
    pub q: Vec3,
    pub q_dot: Vec3,
    pub q_ddot: Vec3,
    pub epoch: Epoch,
}

pub fn station_state(spec: &StationSpec, epoch: Epoch) -> ObserverState {
    let w = EARTH_ROTATION_RATE;
    let theta = spec.longitude + w * epoch.seconds_since(&Epoch::from_mjd(ROTATION_REFERENCE_MJD));
    let (st, ct) = theta.sin_cos();
    let (sl, cl) = spec.latitude.sin_cos();
    let rho_xy = spec.radius * cl;
    let q = Vec3::new(rho_xy * ct, rho_xy * st, spec.radius * sl);
    let q_dot = Vec3::new(-w * q.y, w * q.x, 0.0);
    let q_ddot = Vec3::new(-w * w * q.x, -w * w * q.y, 0.0);
    ObserverState { q, q_dot, q_ddot, epoch }
}
