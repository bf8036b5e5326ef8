//! The reduced system `𝒢(Δ) = G(X(Δ), Δ)` with
//! `G = (𝒦₁, 𝒦₂, (L₁ − L₂)·v₂, ℒ)` and its analytic Jacobian.
//!
//! The Jacobian is assembled column by column: for each angle in `Δ` the
//! line-of-sight frame derivative gives an [`EpochTangent`], the chosen route
//! propagates it to `dX`, and `dG = (∂G/∂X) dX + (∂G/∂E) dE`.

use crate::integrals::{
    energy, energy_gradient, energy_tangent, epoch_geometry, kcal, laplace_lenz_diff_dot_v2, laplace_lenz_gradient,
    laplace_lenz_tangent, DeltaCorrections, EpochGeometry, EpochTangent, UnknownsX,
};
use crate::lambert::{lambert_from_energy, LambertBranch, LambertEval};
use crate::linkage::linear::{assemble_linear, linear_tangent, solve_x_linear, x_tangent_linear};
use crate::linkage::quadratic::{assemble_quadratic, QuadraticSystemNW};
use crate::radar::Attributable;
use crate::{Error, Mat4, Result, Vec4};

/// How `X(Δ)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Route {
    Linear,
    /// Quadratic root with index `0` (smaller `|ζ₂|`) or `1`.
    QuadraticIndex(usize),
    /// Quadratic root nearest to the given `ζ₂` (lineage tracking).
    QuadraticNearest(f64),
}

/// Characteristic sizes of the four residual components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualScale(pub Vec4);

impl ResidualScale {
    /// `μ/ρ̄²` for the two `𝒦`, `|q₂|` for the Laplace-Lenz projection
    /// (dimensionless `L` against `v₂`), `2π` for `ℒ`.
    pub fn new(att1: &Attributable, att2: &Attributable, mu: f64) -> Self {
        let rho_bar = 0.5 * (att1.rho + att2.rho);
        let k = mu / (rho_bar * rho_bar);
        ResidualScale(Vec4::new(k, k, att2.observer.q.norm(), std::f64::consts::TAU))
    }

    pub fn norm(&self, g: &Vec4) -> f64 {
        g.component_div(&self.0).amax()
    }
}

#[derive(Debug, Clone)]
pub struct ReducedResidual {
    pub g: Vec4,
    pub j: Mat4,
    /// `∂G/∂X` at the current point.
    pub g_x: Mat4,
    pub x: UnknownsX,
    pub geoms: [EpochGeometry; 2],
    pub lambert: LambertEval,
    /// Both roots of the energy quadratic (quadratic route only).
    pub roots: Vec<f64>,
}

pub struct LinkageProblem<'a> {
    pub att1: &'a Attributable,
    pub att2: &'a Attributable,
    pub dt: f64,
    pub mu: f64,
}

impl<'a> LinkageProblem<'a> {
    pub fn new(att1: &'a Attributable, att2: &'a Attributable, mu: f64) -> Self {
        LinkageProblem { att1, att2, dt: att2.t_bar.seconds_since(&att1.t_bar), mu }
    }

    pub fn geometries(&self, delta: &DeltaCorrections) -> Result<[EpochGeometry; 2]> {
        Ok([
            epoch_geometry(self.att1, delta.d_alpha1, delta.d_delta1, self.mu)?,
            epoch_geometry(self.att2, delta.d_alpha2, delta.d_delta2, self.mu)?,
        ])
    }

    /// `X(Δ)` and, for the quadratic route, the assembled system, chosen root
    /// and both roots.
    pub fn unknowns(&self, geoms: &[EpochGeometry; 2], route: Route) -> Result<(UnknownsX, Option<QuadraticSystemNW>, Vec<f64>)> {
        let [g1, g2] = geoms;
        if route == Route::Linear {
            return Ok((solve_x_linear(&assemble_linear(g1, g2))?, None, Vec::new()));
        }
        let sys = assemble_quadratic(g1, g2)?;
        let roots = sys.roots()?;
        let z = match route {
            Route::QuadraticNearest(target) => roots.iter().copied().min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs())),
            Route::QuadraticIndex(i) => roots.get(i).copied(),
            Route::Linear => None,
        }
        .ok_or(Error::NoRealRoot { discriminant: sys.discriminant() })?;
        Ok((sys.x_at(z), Some(sys), roots))
    }

    /// `G(X, Δ)` for a given `X`.
    pub fn g_value(&self, geoms: &[EpochGeometry; 2], x: &UnknownsX, branch: LambertBranch) -> Result<(Vec4, LambertEval)> {
        let [g1, g2] = geoms;
        let chord = g2.r - g1.r;
        let lam = lambert_from_energy(energy(g1, x.xi1, x.zeta1), g1.r_norm, g2.r_norm, chord.norm(), branch, self.dt, self.mu)?;
        Ok((
            Vec4::new(kcal(g1, x.xi1, x.zeta1), kcal(g2, x.xi2, x.zeta2), laplace_lenz_diff_dot_v2(g1, g2, x), lam.value),
            lam,
        ))
    }

    /// `𝒢(Δ)` only.
    pub fn residual_value(&self, delta: &DeltaCorrections, route: Route, branch: LambertBranch) -> Result<(Vec4, UnknownsX)> {
        let geoms = self.geometries(delta)?;
        let (x, _, _) = self.unknowns(&geoms, route)?;
        Ok((self.g_value(&geoms, &x, branch)?.0, x))
    }

    /// `𝒢(Δ)` and `∂𝒢/∂Δ`.
    pub fn reduced_residual(&self, delta: &DeltaCorrections, route: Route, branch: LambertBranch) -> Result<ReducedResidual> {
        let geoms = self.geometries(delta)?;
        let [g1, g2] = &geoms;
        let (x, quad, roots) = self.unknowns(&geoms, route)?;
        let (g, lam) = self.g_value(&geoms, &x, branch)?;

        let mut g_x = Mat4::zeros();
        g_x[(0, 0)] = -2.0 / g1.rho * x.xi1;
        g_x[(0, 1)] = -2.0 / g1.rho * x.zeta1;
        g_x[(1, 2)] = -2.0 / g2.rho * x.xi2;
        g_x[(1, 3)] = -2.0 / g2.rho * x.zeta2;
        g_x.set_row(2, &laplace_lenz_gradient(g1, g2, &x).transpose());
        let (e_a, e_d) = energy_gradient(g1, x.xi1, x.zeta1);
        g_x[(3, 0)] = lam.d_energy * e_a;
        g_x[(3, 1)] = lam.d_energy * e_d;

        let linear = if quad.is_none() { Some(assemble_linear(g1, g2)) } else { None };
        let chord = g2.r - g1.r;
        let d = chord.norm();
        let zero = EpochTangent::zero();
        let mut j = Mat4::zeros();
        for col in 0..4 {
            let tan = if col < 2 { g1.angle_tangent(col) } else { g2.angle_tangent(col - 2) };
            let (t1, t2) = if col < 2 { (tan, zero) } else { (zero, tan) };
            let dx = match (&linear, &quad) {
                (Some(sys), _) => {
                    let (dm, dv) = linear_tangent(&t1, &t2);
                    x_tangent_linear(sys, &x, &dm, &dv)?
                }
                (None, Some(q)) => q.x_tangent(&t1, &t2, x.zeta2)?,
                (None, None) => unreachable!(),
            };
            let d_chord = chord.dot(&(t2.dr - t1.dr)) / d;
            let explicit = Vec4::new(
                t1.d_radial,
                t2.d_radial,
                laplace_lenz_tangent(g1, &t1, g2, &t2, &x),
                lam.d_energy * energy_tangent(g1, &t1, x.xi1, x.zeta1)
                    + lam.d_r1 * t1.dr_norm
                    + lam.d_r2 * t2.dr_norm
                    + lam.d_chord * d_chord,
            );
            j.set_column(col, &(g_x * dx + explicit));
        }
        Ok(ReducedResidual { g, j, g_x, x, geoms, lambert: lam, roots })
    }
}
