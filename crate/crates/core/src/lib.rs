//! Preliminary orbit determination for Earth satellites from pairs of short
//! radar tracks.
//!
//! A radar track is a handful of `(t, ρ, α, δ)` measurements taken a few
//! seconds apart during one pass over a station. Ranges are precise, pointing
//! angles are not. Each track is reduced to an [`Attributable`]
//! `(t̄, ᾱ, δ̄, ρ, ρ̇, ρ̈)` and two attributables are linked into one or more
//! Keplerian orbits by solving the conservation laws of the two-body problem
//! together with Lambert's equation, while simultaneously solving for small
//! corrections to the mean pointing angles.
//!
//! The crate is organised bottom-up:
//!
//! * [`time`], [`frame`], [`elements`] – epochs, topocentric direction frames,
//!   Cartesian/Keplerian conversion and Kepler propagation.
//! * [`observer`] – rigid-rotation ground station model.
//! * [`radar`] – track simulation, noise injection, interpolation and the
//!   plain-text track format.
//! * [`integrals`] – angular momentum, energy, Laplace-Lenz projection and the
//!   line-of-sight radial equation as functions of the transverse unknowns.
//! * [`lambert`] – the four-branch multi-revolution Lambert equation.
//! * [`linkage`] – the angle-correcting linkage solver (linear and quadratic
//!   reductions, analytic Jacobian, Newton iteration).
//! * [`classical`] – Gibbs' method and the Keplerian-integrals linkage.
//! * [`coplanar`] – plane fit and line-of-sight correction for one track.
//! * [`scenario`] – the Monte Carlo comparison harness driven by the CLI.
//!
//! [`Attributable`]: radar::Attributable

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod coplanar;
pub mod elements;
pub mod error;
pub mod frame;
pub mod integrals;
pub mod lambert;
pub mod linalg;
pub mod linkage;
pub mod observer;
pub mod radar;
pub mod scenario;
pub mod time;

pub use error::{Error, Result};

/// Geocentric gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;

/// Earth sidereal rotation rate, rad/s.
pub const EARTH_ROTATION_RATE: f64 = 7.292_115_0e-5;

/// Seconds per day.
pub const SECONDS_PER_DAY: f64 = 86_400.0;

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Vec4 = nalgebra::Vector4<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Mat4 = nalgebra::Matrix4<f64>;
