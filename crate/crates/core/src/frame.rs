//! Topocentric line-of-sight directions and the orthonormal frame attached to
//! them.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Below this `|cos δ|` the frame's `e_alpha` is undefined.
pub const POLAR_COS_DELTA_MIN: f64 = 1e-9;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_two_pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = wrap_two_pi(x);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

/// Right ascension and declination of a line of sight, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalDirection {
    pub alpha: f64,
    pub delta: f64,
}

impl SphericalDirection {
    /// Normalises `alpha` into `[0, 2π)`; `delta` must already lie in
    /// `[−π/2, π/2]`.
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !alpha.is_finite() || !delta.is_finite() || delta.abs() > FRAC_PI_2 + 1e-15 {
            return Err(Error::InvalidInput(format!(
                "direction out of range: alpha={alpha}, delta={delta}"
            )));
        }
        Ok(Self {
            alpha: wrap_two_pi(alpha),
            delta: delta.clamp(-FRAC_PI_2, FRAC_PI_2),
        })
    }

    /// Direction of a non-zero vector.
    pub fn from_vector(v: &Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidInput("zero direction vector".into()));
        }
        let delta = (v.z / n).clamp(-1.0, 1.0).asin();
        let alpha = v.y.atan2(v.x);
        Self::new(alpha, delta)
    }

    pub fn unit_vector(&self) -> Vec3 {
        let (sa, ca) = self.alpha.sin_cos();
        let (sd, cd) = self.delta.sin_cos();
        Vec3::new(cd * ca, cd * sa, sd)
    }
}

/// The line of sight `e_rho` and its partner vectors.
///
/// `e_alpha = ∂e_rho/∂α / cos δ`, `e_delta = ∂e_rho/∂δ`, and
/// `e_perp = ∂e_alpha/∂α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionFrame {
    pub e_rho: Vec3,
    pub e_alpha: Vec3,
    pub e_delta: Vec3,
    pub e_perp: Vec3,
    pub sin_delta: f64,
    pub cos_delta: f64,
}

/// Builds the frame at `(α, δ)`.
pub fn direction_frame(dir: SphericalDirection) -> Result<DirectionFrame> {
    frame_at(dir.alpha, dir.delta)
}

/// Same as [`direction_frame`] without the range normalisation of `α`; the
/// linkage solver evaluates frames at `ᾱ + Δα` directly.
pub fn frame_at(alpha: f64, delta: f64) -> Result<DirectionFrame> {
    let (sa, ca) = alpha.sin_cos();
    let (sd, cd) = delta.sin_cos();
    if cd.abs() < POLAR_COS_DELTA_MIN {
        return Err(Error::PolarSingularity { cos_delta: cd });
    }
    Ok(DirectionFrame {
        e_rho: Vec3::new(cd * ca, cd * sa, sd),
        e_alpha: Vec3::new(-sa, ca, 0.0),
        e_delta: Vec3::new(-sd * ca, -sd * sa, cd),
        e_perp: Vec3::new(-ca, -sa, 0.0),
        sin_delta: sd,
        cos_delta: cd,
    })
}

impl DirectionFrame {
    /// Derivatives of `(e_rho, e_alpha, e_delta)` with respect to `α` and `δ`,
    /// returned as `[[∂/∂α; 3], [∂/∂δ; 3]]`.
    pub fn angle_partials(&self) -> [[Vec3; 3]; 2] {
        [
            [self.cos_delta * self.e_alpha, self.e_perp, -self.sin_delta * self.e_alpha],
            [self.e_delta, Vec3::zeros(), -self.e_rho],
        ]
    }
}
