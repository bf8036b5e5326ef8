//! Osculating Keplerian elements, Cartesian states and two-body propagation.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::frame::{wrap_pi, wrap_two_pi};
use crate::time::Epoch;
use crate::{Error, Result, Vec3};

/// Residual target for Kepler's equation, rad.
pub const KEPLER_TOLERANCE: f64 = 1e-13;
pub const KEPLER_MAX_ITERATIONS: usize = 50;

const CIRCULAR_E: f64 = 1e-12;
const EQUATORIAL_SIN_I: f64 = 1e-12;

/// Elliptic osculating elements. Angles in radians, `a` in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerianElements {
    pub a: f64,
    pub e: f64,
    pub inc: f64,
    pub raan: f64,
    pub argp: f64,
    pub mean_anomaly: f64,
    pub epoch: Epoch,
}

/// Geocentric inertial position (km) and velocity (km/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub r: Vec3,
    pub v: Vec3,
    pub epoch: Epoch,
}

impl CartesianState {
    pub fn energy(&self, mu: f64) -> f64 {
        0.5 * self.v.norm_squared() - mu / self.r.norm()
    }

    pub fn angular_momentum(&self) -> Vec3 {
        self.r.cross(&self.v)
    }

    /// Dimensionless Laplace-Lenz (eccentricity) vector.
    pub fn laplace_lenz(&self, mu: f64) -> Vec3 {
        let r = self.r.norm();
        ((self.v.norm_squared() - mu / r) * self.r - self.r.dot(&self.v) * self.v) / mu
    }
}

impl KeplerianElements {
    /// The LEO reference object of the two-track example (MJD 54127.155035).
    pub fn reference() -> Self {
        KeplerianElements {
            a: 7818.10,
            e: 0.066,
            inc: 65.81f64.to_radians(),
            raan: 216.25f64.to_radians(),
            argp: 357.16f64.to_radians(),
            mean_anomaly: 202.08f64.to_radians(),
            epoch: Epoch::from_parts(54127, 0.155035),
        }
    }

    pub fn mean_motion(&self, mu: f64) -> f64 {
        (mu / (self.a * self.a * self.a)).sqrt()
    }

    pub fn period(&self, mu: f64) -> f64 {
        TAU / self.mean_motion(mu)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.e, self.inc, self.raan, self.argp, self.mean_anomaly]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.a <= 0.0 || !(0.0..1.0).contains(&self.e) {
            return Err(Error::InvalidInput(format!(
                "elements must be elliptic with a > 0 (a={}, e={})",
                self.a, self.e
            )));
        }
        Ok(())
    }
}

/// Solves `E − e sin E = ℓ` for the eccentric anomaly.
///
/// Newton from `E₀ = ℓ + e sin ℓ`, falling back to bisection whenever a step
/// leaves the bracket `[ℓ − e, ℓ + e]`.
pub fn solve_kepler(mean_anomaly: f64, e: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&e) {
        return Err(Error::HyperbolicOrbit { energy: f64::NAN });
    }
    let ell = wrap_two_pi(mean_anomaly);
    if e == 0.0 {
        return Ok(ell);
    }
    let f = |x: f64| x - e * x.sin() - ell;
    let (mut lo, mut hi) = (ell - e, ell + e);
    let mut x = ell + e * ell.sin();
    for _ in 0..KEPLER_MAX_ITERATIONS {
        let fx = f(x);
        if fx.abs() < KEPLER_TOLERANCE {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = fx / (1.0 - e * x.cos());
        let next = x - step;
        x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
    }
    if f(x).abs() < KEPLER_TOLERANCE {
        Ok(x)
    } else {
        Err(Error::NonConvergence {
            what: "Kepler equation",
            iterations: KEPLER_MAX_ITERATIONS,
        })
    }
}

/// Perifocal-to-inertial rotation columns `(P, Q, W)`.
fn perifocal_basis(inc: f64, raan: f64, argp: f64) -> (Vec3, Vec3) {
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    let (sw, cw) = argp.sin_cos();
    let p = Vec3::new(co * cw - so * sw * ci, so * cw + co * sw * ci, sw * si);
    let q = Vec3::new(-co * sw - so * cw * ci, -so * sw + co * cw * ci, cw * si);
    (p, q)
}

pub fn elements_to_cartesian(el: &KeplerianElements, mu: f64) -> Result<CartesianState> {
    el.validate()?;
    let ecc_anom = solve_kepler(el.mean_anomaly, el.e)?;
    let (se, ce) = ecc_anom.sin_cos();
    let b_over_a = (1.0 - el.e * el.e).sqrt();
    let r = el.a * (1.0 - el.e * ce);
    let sqrt_mu_a = (mu * el.a).sqrt();
    let (p, q) = perifocal_basis(el.inc, el.raan, el.argp);
    let pos = el.a * (ce - el.e) * p + el.a * b_over_a * se * q;
    let vel = (sqrt_mu_a / r) * (-se * p + b_over_a * ce * q);
    Ok(CartesianState { r: pos, v: vel, epoch: el.epoch })
}

pub fn cartesian_to_elements(state: &CartesianState, mu: f64) -> Result<KeplerianElements> {
    let r = state.r;
    let v = state.v;
    let rn = r.norm();
    if !(rn > 0.0) || !v.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("state must have finite, non-zero position".into()));
    }
    let h = r.cross(&v);
    let hn = h.norm();
    if hn <= 1e-12 * rn * v.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateAngularMomentum);
    }
    let energy = 0.5 * v.norm_squared() - mu / rn;
    if energy >= 0.0 {
        return Err(Error::HyperbolicOrbit { energy });
    }
    let a = -mu / (2.0 * energy);
    let e_vec = ((v.norm_squared() - mu / rn) * r - r.dot(&v) * v) / mu;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(Error::HyperbolicOrbit { energy });
    }
    let h_hat = h / hn;
    let inc = (h_hat.x.hypot(h_hat.y)).atan2(h_hat.z);

    let node = Vec3::new(-h.y, h.x, 0.0);
    let equatorial = inc.sin().abs() < EQUATORIAL_SIN_I;
    // Reference direction in the orbit plane from which ω is measured.
    let (raan, node_hat) = if equatorial {
        (0.0, Vec3::new(1.0, 0.0, 0.0))
    } else {
        let n = node.norm();
        (node.y.atan2(node.x), node / n)
    };
    let in_plane_angle = |from: &Vec3, to: &Vec3| h_hat.dot(&from.cross(to)).atan2(from.dot(to));

    let (argp, true_anom) = if e < CIRCULAR_E {
        (0.0, in_plane_angle(&node_hat, &r))
    } else {
        (in_plane_angle(&node_hat, &e_vec), in_plane_angle(&e_vec, &r))
    };
    let ecc_anom = 2.0
        * ((1.0 - e).sqrt() * (0.5 * true_anom).sin()).atan2((1.0 + e).sqrt() * (0.5 * true_anom).cos());
    let mean_anomaly = ecc_anom - e * ecc_anom.sin();
    Ok(KeplerianElements {
        a,
        e,
        inc,
        raan: wrap_two_pi(raan),
        argp: wrap_two_pi(argp),
        mean_anomaly: wrap_two_pi(mean_anomaly),
        epoch: state.epoch,
    })
}

/// Advances the mean anomaly by `n·dt`; the other elements are copied.
pub fn propagate_kepler(el: &KeplerianElements, dt: f64, mu: f64) -> Result<KeplerianElements> {
    el.validate()?;
    let n = el.mean_motion(mu);
    Ok(KeplerianElements {
        mean_anomaly: wrap_two_pi(el.mean_anomaly + n * dt),
        epoch: el.epoch.add_seconds(dt),
        ..*el
    })
}

/// Two-body state at `epoch` on the orbit described by `el`.
pub fn state_at(el: &KeplerianElements, epoch: Epoch, mu: f64) -> Result<CartesianState> {
    let dt = epoch.seconds_since(&el.epoch);
    elements_to_cartesian(&propagate_kepler(el, dt, mu)?, mu)
}

/// Signed element differences `computed − reference` with angles wrapped to
/// `(−π, π]`: `[Δa, Δe, ΔI, ΔΩ, Δω, Δℓ]`.
pub fn element_errors(computed: &KeplerianElements, reference: &KeplerianElements) -> [f64; 6] {
    [
        computed.a - reference.a,
        computed.e - reference.e,
        computed.inc - reference.inc,
        wrap_pi(computed.raan - reference.raan),
        wrap_pi(computed.argp - reference.argp),
        wrap_pi(computed.mean_anomaly - reference.mean_anomaly),
    ]
}
