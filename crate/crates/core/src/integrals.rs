//! Keplerian first integrals written in the attributable variables
//! `(ρ, α, δ, ρ̇)` plus the transverse unknowns `ξ = ρ α̇ cos δ`, `ζ = ρ δ̇`.
//!
//! With `r = q + ρ e^ρ` and `ṙ = ξ e^α + ζ e^δ + ρ̇ e^ρ + q̇`:
//!
//! * `c = A ξ + B ζ + C` with `A = r × e^α`, `B = r × e^δ`,
//!   `C = r × q̇ + ρ̇ q × e^ρ`;
//! * `ℰ = ½|ṙ|² − μ/|r|`;
//! * `μL = (|ṙ|² − μ/|r|) r − (ṙ·r) ṙ`;
//! * `𝒦 = ρ̈ − (ξ² + ζ²)/ρ + q̈·e^ρ + μ (r·e^ρ)/|r|³`, the line-of-sight
//!   component of the equation of motion.
//!
//! Every quantity that depends on the line of sight also has a tangent
//! ([`EpochTangent`]) for a given variation of `(e^ρ, e^α, e^δ)`; the linkage
//! Jacobian is assembled from these.

use serde::{Deserialize, Serialize};

use crate::frame::{frame_at, DirectionFrame};
use crate::observer::ObserverState;
use crate::radar::Attributable;
use crate::time::Epoch;
use crate::{Error, Result, Vec3, Vec4};

/// Guard band on each angle correction, rad.
pub const DELTA_GUARD: f64 = 0.1;

/// `Δ = (Δα₁, Δδ₁, Δα₂, Δδ₂)`, rad.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeltaCorrections {
    pub d_alpha1: f64,
    pub d_delta1: f64,
    pub d_alpha2: f64,
    pub d_delta2: f64,
}

impl DeltaCorrections {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn to_vec(&self) -> Vec4 {
        Vec4::new(self.d_alpha1, self.d_delta1, self.d_alpha2, self.d_delta2)
    }

    pub fn from_vec(v: &Vec4) -> Self {
        DeltaCorrections { d_alpha1: v[0], d_delta1: v[1], d_alpha2: v[2], d_delta2: v[3] }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().amax()
    }

    pub fn check_guard(&self) -> Result<()> {
        let m = self.max_abs();
        if !(m < DELTA_GUARD) {
            return Err(Error::DeltaOutOfRange { max_abs: m });
        }
        Ok(())
    }
}

/// `X = (ξ₁, ζ₁, ξ₂, ζ₂)`, km/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UnknownsX {
    pub xi1: f64,
    pub zeta1: f64,
    pub xi2: f64,
    pub zeta2: f64,
}

impl UnknownsX {
    pub fn to_vec(&self) -> Vec4 {
        Vec4::new(self.xi1, self.zeta1, self.xi2, self.zeta2)
    }

    pub fn from_vec(v: &Vec4) -> Self {
        UnknownsX { xi1: v[0], zeta1: v[1], xi2: v[2], zeta2: v[3] }
    }

    pub fn epoch1(&self) -> (f64, f64) {
        (self.xi1, self.zeta1)
    }

    pub fn epoch2(&self) -> (f64, f64) {
        (self.xi2, self.zeta2)
    }
}

/// Everything the linkage equations need at one epoch once the line of
/// sight `(ᾱ + Δα, δ̄ + Δδ)` is fixed.
#[derive(Debug, Clone, Copy)]
pub struct EpochGeometry {
    pub t_bar: Epoch,
    pub alpha: f64,
    pub delta: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub rho_ddot: f64,
    pub frame: DirectionFrame,
    pub observer: ObserverState,
    pub r: Vec3,
    pub r_norm: f64,
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    pub q_alpha: f64,
    pub q_delta: f64,
    pub qdot_alpha: f64,
    pub qdot_delta: f64,
    /// `ρ̇ e^ρ + q̇`, the part of `ṙ` not carried by `(ξ, ζ)`.
    pub w: Vec3,
    /// `ρ̈ + q̈·e^ρ + μ (r·e^ρ)/|r|³`.
    pub radial: f64,
    pub eta_sq: f64,
    pub d: f64,
    pub frak_d: f64,
    pub mu: f64,
}

/// Builds the geometry at `α = ᾱ + d_alpha`, `δ = δ̄ + d_delta`.
pub fn epoch_geometry(att: &Attributable, d_alpha: f64, d_delta: f64, mu: f64) -> Result<EpochGeometry> {
    if !(att.rho > 0.0) {
        return Err(Error::InvalidInput(format!("range must be positive, got {}", att.rho)));
    }
    let alpha = att.alpha_bar + d_alpha;
    let delta = att.delta_bar + d_delta;
    let frame = frame_at(alpha, delta)?;
    let obs = att.observer;
    let e = frame.e_rho;
    let r = obs.q + att.rho * e;
    let r_norm = r.norm();
    let r3 = r_norm * r_norm * r_norm;
    let radial = att.rho_ddot + obs.q_ddot.dot(&e) + mu * r.dot(&e) / r3;
    let eta_sq = radial / att.rho;
    if eta_sq < 0.0 {
        return Err(Error::NegativeEtaSquared { eta_sq });
    }
    let w = att.rho_dot * e + obs.q_dot;
    let w2 = w.norm_squared();
    let d = 0.5 * (att.rho * att.rho * eta_sq + w2) - mu / r_norm;
    Ok(EpochGeometry {
        t_bar: att.t_bar,
        alpha,
        delta,
        rho: att.rho,
        rho_dot: att.rho_dot,
        rho_ddot: att.rho_ddot,
        frame,
        observer: obs,
        r,
        r_norm,
        a: r.cross(&frame.e_alpha),
        b: r.cross(&frame.e_delta),
        c: r.cross(&obs.q_dot) + att.rho_dot * obs.q.cross(&e),
        q_alpha: obs.q.dot(&frame.e_alpha),
        q_delta: obs.q.dot(&frame.e_delta),
        qdot_alpha: obs.q_dot.dot(&frame.e_alpha),
        qdot_delta: obs.q_dot.dot(&frame.e_delta),
        w,
        radial,
        eta_sq,
        d,
        frak_d: w2 - 2.0 * mu / r_norm,
        mu,
    })
}

impl EpochGeometry {
    pub fn velocity(&self, xi: f64, zeta: f64) -> Vec3 {
        xi * self.frame.e_alpha + zeta * self.frame.e_delta + self.w
    }

    pub fn tangent(&self, de_rho: &Vec3, de_alpha: &Vec3, de_delta: &Vec3) -> EpochTangent {
        let mu = self.mu;
        let obs = &self.observer;
        let e = self.frame.e_rho;
        let rn = self.r_norm;
        let dr = self.rho * de_rho;
        let dr_norm = self.r.dot(&dr) / rn;
        let r_dot_e = self.r.dot(&e);
        let d_r_dot_e = dr.dot(&e) + self.r.dot(de_rho);
        let d_radial = obs.q_ddot.dot(de_rho) + mu * (d_r_dot_e / rn.powi(3) - 3.0 * r_dot_e * dr_norm / rn.powi(4));
        let dw = self.rho_dot * de_rho;
        let dw2 = 2.0 * self.w.dot(&dw);
        let d_eta_sq = d_radial / self.rho;
        EpochTangent {
            de_rho: *de_rho,
            de_alpha: *de_alpha,
            de_delta: *de_delta,
            dr,
            dr_norm,
            da: dr.cross(&self.frame.e_alpha) + self.r.cross(de_alpha),
            db: dr.cross(&self.frame.e_delta) + self.r.cross(de_delta),
            dc: dr.cross(&obs.q_dot) + self.rho_dot * obs.q.cross(de_rho),
            dqdot_alpha: obs.q_dot.dot(de_alpha),
            dqdot_delta: obs.q_dot.dot(de_delta),
            dw,
            d_radial,
            d_eta_sq,
            dd: 0.5 * (self.rho * self.rho * d_eta_sq + dw2) + mu * dr_norm / (rn * rn),
            dfrak_d: dw2 + 2.0 * mu * dr_norm / (rn * rn),
        }
    }

    /// Tangent for a unit change of `α` (`which = 0`) or `δ` (`which = 1`).
    pub fn angle_tangent(&self, which: usize) -> EpochTangent {
        let p = self.frame.angle_partials()[which];
        self.tangent(&p[0], &p[1], &p[2])
    }
}

/// First-order variation of an [`EpochGeometry`] along a change of
/// `(e^ρ, e^α, e^δ)` with the attributable held fixed.
#[derive(Debug, Clone, Copy)]
pub struct EpochTangent {
    pub de_rho: Vec3,
    pub de_alpha: Vec3,
    pub de_delta: Vec3,
    pub dr: Vec3,
    pub dr_norm: f64,
    pub da: Vec3,
    pub db: Vec3,
    pub dc: Vec3,
    pub dqdot_alpha: f64,
    pub dqdot_delta: f64,
    pub dw: Vec3,
    pub d_radial: f64,
    pub d_eta_sq: f64,
    pub dd: f64,
    pub dfrak_d: f64,
}

impl EpochTangent {
    pub fn zero() -> Self {
        let z = Vec3::zeros();
        EpochTangent {
            de_rho: z,
            de_alpha: z,
            de_delta: z,
            dr: z,
            dr_norm: 0.0,
            da: z,
            db: z,
            dc: z,
            dqdot_alpha: 0.0,
            dqdot_delta: 0.0,
            dw: z,
            d_radial: 0.0,
            d_eta_sq: 0.0,
            dd: 0.0,
            dfrak_d: 0.0,
        }
    }

    /// Variation of `ṙ` at fixed `(ξ, ζ)`.
    pub fn velocity(&self, xi: f64, zeta: f64) -> Vec3 {
        xi * self.de_alpha + zeta * self.de_delta + self.dw
    }
}

/// `c = A ξ + B ζ + C`.
pub fn angular_momentum(g: &EpochGeometry, xi: f64, zeta: f64) -> Vec3 {
    g.a * xi + g.b * zeta + g.c
}

/// `ℰ = ½|ṙ|² − μ/|r|`.
pub fn energy(g: &EpochGeometry, xi: f64, zeta: f64) -> f64 {
    let w = &g.w;
    let speed_sq = xi * xi + zeta * zeta + 2.0 * g.qdot_alpha * xi + 2.0 * g.qdot_delta * zeta + w.norm_squared();
    0.5 * speed_sq - g.mu / g.r_norm
}

/// Gradient of `ℰ` with respect to `(ξ, ζ)`: `(ṙ·e^α, ṙ·e^δ)`.
pub fn energy_gradient(g: &EpochGeometry, xi: f64, zeta: f64) -> (f64, f64) {
    (xi + g.qdot_alpha, zeta + g.qdot_delta)
}

/// Variation of `ℰ` along a geometry tangent at fixed `(ξ, ζ)`.
pub fn energy_tangent(g: &EpochGeometry, t: &EpochTangent, xi: f64, zeta: f64) -> f64 {
    g.velocity(xi, zeta).dot(&t.velocity(xi, zeta)) + g.mu * t.dr_norm / (g.r_norm * g.r_norm)
}

/// `𝒦` evaluated with `η² = (ξ² + ζ²)/ρ²`.
pub fn kcal(g: &EpochGeometry, xi: f64, zeta: f64) -> f64 {
    g.radial - (xi * xi + zeta * zeta) / g.rho
}

/// `v₂ = e^ρ₂ × q₂`.
pub fn v2(g2: &EpochGeometry) -> Vec3 {
    g2.frame.e_rho.cross(&g2.observer.q)
}

/// `μL` at one epoch.
pub fn mu_laplace_lenz(g: &EpochGeometry, xi: f64, zeta: f64) -> Vec3 {
    let v = g.velocity(xi, zeta);
    (v.norm_squared() - g.mu / g.r_norm) * g.r - v.dot(&g.r) * v
}

/// `(L₁ − L₂)·v₂`, km (L dimensionless).
///
/// The epoch-2 term uses `r₂·v₂ = 0`, which holds for every line of sight
/// because `v₂` is orthogonal to both `e^ρ₂` and `q₂`.
pub fn laplace_lenz_diff_dot_v2(g1: &EpochGeometry, g2: &EpochGeometry, x: &UnknownsX) -> f64 {
    let mu = g1.mu;
    let v2 = v2(g2);
    let rd1 = g1.velocity(x.xi1, x.zeta1);
    let rd2 = g2.velocity(x.xi2, x.zeta2);
    let l1 = (rd1.norm_squared() - mu / g1.r_norm) * g1.r.dot(&v2) - rd1.dot(&g1.r) * rd1.dot(&v2);
    let l2 = -rd2.dot(&g2.r) * rd2.dot(&v2);
    (l1 - l2) / mu
}

/// Gradient of `(L₁ − L₂)·v₂` with respect to `X`.
pub fn laplace_lenz_gradient(g1: &EpochGeometry, g2: &EpochGeometry, x: &UnknownsX) -> Vec4 {
    let mu = g1.mu;
    let v2 = v2(g2);
    let rd1 = g1.velocity(x.xi1, x.zeta1);
    let rd2 = g2.velocity(x.xi2, x.zeta2);
    let (r1v2, rd1v2, rd1r1) = (g1.r.dot(&v2), rd1.dot(&v2), rd1.dot(&g1.r));
    let (rd2v2, rd2r2) = (rd2.dot(&v2), rd2.dot(&g2.r));
    let (s1a, s1d) = energy_gradient(g1, x.xi1, x.zeta1);
    let f = g1.frame;
    let h = g2.frame;
    Vec4::new(
        (2.0 * s1a * r1v2 - g1.q_alpha * rd1v2 - rd1r1 * f.e_alpha.dot(&v2)) / mu,
        (2.0 * s1d * r1v2 - g1.q_delta * rd1v2 - rd1r1 * f.e_delta.dot(&v2)) / mu,
        (g2.q_alpha * rd2v2 + rd2r2 * h.e_alpha.dot(&v2)) / mu,
        (g2.q_delta * rd2v2 + rd2r2 * h.e_delta.dot(&v2)) / mu,
    )
}

/// Variation of `(L₁ − L₂)·v₂` along geometry tangents at fixed `X`.
pub fn laplace_lenz_tangent(
    g1: &EpochGeometry,
    t1: &EpochTangent,
    g2: &EpochGeometry,
    t2: &EpochTangent,
    x: &UnknownsX,
) -> f64 {
    let mu = g1.mu;
    let v2 = v2(g2);
    let dv2 = t2.de_rho.cross(&g2.observer.q);
    let rd1 = g1.velocity(x.xi1, x.zeta1);
    let drd1 = t1.velocity(x.xi1, x.zeta1);
    let rd2 = g2.velocity(x.xi2, x.zeta2);
    let drd2 = t2.velocity(x.xi2, x.zeta2);
    let energy_like = rd1.norm_squared() - mu / g1.r_norm;
    let d_energy_like = 2.0 * rd1.dot(&drd1) + mu * t1.dr_norm / (g1.r_norm * g1.r_norm);
    let r1v2 = g1.r.dot(&v2);
    let d_r1v2 = t1.dr.dot(&v2) + g1.r.dot(&dv2);
    let rd1r1 = rd1.dot(&g1.r);
    let d_rd1r1 = drd1.dot(&g1.r) + rd1.dot(&t1.dr);
    let rd1v2 = rd1.dot(&v2);
    let d_rd1v2 = drd1.dot(&v2) + rd1.dot(&dv2);
    let rd2r2 = rd2.dot(&g2.r);
    let d_rd2r2 = drd2.dot(&g2.r) + rd2.dot(&t2.dr);
    let rd2v2 = rd2.dot(&v2);
    let d_rd2v2 = drd2.dot(&v2) + rd2.dot(&dv2);
    let dl1 = d_energy_like * r1v2 + energy_like * d_r1v2 - d_rd1r1 * rd1v2 - rd1r1 * d_rd1v2;
    let dl2 = -(d_rd2r2 * rd2v2 + rd2r2 * d_rd2v2);
    (dl1 - dl2) / mu
}
