//! Linkage of two attributables with simultaneous correction of the mean
//! pointing angles.
//!
//! The unknowns are the transverse velocities `X = (ξ₁, ζ₁, ξ₂, ζ₂)` and the
//! angle corrections `Δ = (Δα₁, Δδ₁, Δα₂, Δδ₂)`. `X` is eliminated through
//! either the linear or the quadratic reduction and the remaining 4×4 system
//! `𝒢(Δ) = 0` is solved by Newton's method from `Δ = 0`.

pub mod linear;
pub mod newton;
pub mod quadratic;
pub mod residual;

use serde::Serialize;

use crate::elements::{cartesian_to_elements, CartesianState, KeplerianElements};
use crate::frame::wrap_pi;
use crate::integrals::{laplace_lenz_diff_dot_v2, DeltaCorrections, EpochGeometry, UnknownsX};
use crate::lambert::LambertBranch;
use crate::{Result, MU_EARTH};

pub use linear::{assemble_linear, solve_x_linear, LinearSystemMV};
pub use newton::{guess_revolutions, newton_solve, Candidate};
pub use quadratic::{assemble_quadratic, solve_x_quadratic, QuadraticSystemNW};
pub use residual::{LinkageProblem, ReducedResidual, ResidualScale, Route};

/// Shortest accepted gap between the two mean epochs, s.
pub const MIN_GAP_S: f64 = 60.0;

/// Reduction used to eliminate `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Linear,
    Quadratic,
}

/// Where a solution came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionMethod {
    Linear,
    QuadraticRoot1,
    QuadraticRoot2,
    /// Keplerian integrals at `Δ = 0`.
    Ki,
}

impl SolutionMethod {
    pub fn name(self) -> &'static str {
        match self {
            SolutionMethod::Linear => "linear",
            SolutionMethod::QuadraticRoot1 => "quadratic-root-1",
            SolutionMethod::QuadraticRoot2 => "quadratic-root-2",
            SolutionMethod::Ki => "ki",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkageOptions {
    pub max_iterations: usize,
    /// On `‖ΔΔ‖∞`, rad.
    pub step_tolerance: f64,
    /// On the scaled residual, see [`ResidualScale`].
    pub residual_tolerance: f64,
    pub mu: f64,
}

impl Default for LinkageOptions {
    fn default() -> Self {
        LinkageOptions { max_iterations: 25, step_tolerance: 1e-10, residual_tolerance: 1e-9, mu: MU_EARTH }
    }
}

/// One preliminary orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkageSolution {
    pub delta: DeltaCorrections,
    pub x: UnknownsX,
    pub states: [CartesianState; 2],
    pub elements: [KeplerianElements; 2],
    /// `None` for the Keplerian-integrals method, which does not use Lambert.
    pub branch: Option<LambertBranch>,
    pub iterations: usize,
    pub residual_norm: f64,
    pub method: SolutionMethod,
    /// Scaled residual norm at each Newton iterate.
    pub trace: Vec<f64>,
    /// Iterates at which `Γ±` had to be clamped.
    pub lambert_clamps: usize,
    /// `|c₁ − c₂| / |c₁|`.
    pub momentum_mismatch: f64,
    /// `|ℰ₁ − ℰ₂| / |ℰ₁|`.
    pub energy_mismatch: f64,
    /// Largest difference of `(a, e, I, Ω, ω)` between the two epochs, with
    /// `a` relative and angles in radians.
    pub consistency: f64,
    /// `|(L₁ − L₂)·v₂|`.
    pub l_score: f64,
    /// Marked on the best-scoring solution of a set.
    pub preferred: bool,
}

/// A candidate that did not produce a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchFailure {
    pub method: SolutionMethod,
    pub branch: Option<LambertBranch>,
    pub error: crate::Error,
}

/// All solutions of one linkage run, best first, plus the failed candidates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinkageOutcome {
    pub solutions: Vec<LinkageSolution>,
    pub failures: Vec<BranchFailure>,
}

impl LinkageOutcome {
    pub fn best(&self) -> Option<&LinkageSolution> {
        self.solutions.first()
    }
}

/// Cartesian states at both epochs for the given `X`.
pub fn states_from(geoms: &[EpochGeometry; 2], x: &UnknownsX) -> [CartesianState; 2] {
    let (xi1, z1) = x.epoch1();
    let (xi2, z2) = x.epoch2();
    let [g1, g2] = geoms;
    [
        CartesianState { r: g1.r, v: g1.velocity(xi1, z1), epoch: g1.t_bar },
        CartesianState { r: g2.r, v: g2.velocity(xi2, z2), epoch: g2.t_bar },
    ]
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_solution(
    geoms: &[EpochGeometry; 2],
    x: UnknownsX,
    delta: DeltaCorrections,
    branch: Option<LambertBranch>,
    method: SolutionMethod,
    iterations: usize,
    residual_norm: f64,
    trace: Vec<f64>,
    lambert_clamps: usize,
    mu: f64,
) -> Result<LinkageSolution> {
    let states = states_from(geoms, &x);
    let elements = [cartesian_to_elements(&states[0], mu)?, cartesian_to_elements(&states[1], mu)?];
    let c1 = states[0].angular_momentum();
    let c2 = states[1].angular_momentum();
    let e1 = states[0].energy(mu);
    let e2 = states[1].energy(mu);
    let [p, q] = &elements;
    let consistency = [
        ((p.a - q.a) / p.a).abs(),
        (p.e - q.e).abs(),
        (p.inc - q.inc).abs(),
        wrap_pi(p.raan - q.raan).abs(),
        wrap_pi(p.argp - q.argp).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(LinkageSolution {
        delta,
        x,
        states,
        elements,
        branch,
        iterations,
        residual_norm,
        method,
        trace,
        lambert_clamps,
        momentum_mismatch: (c1 - c2).norm() / c1.norm(),
        energy_mismatch: ((e1 - e2) / e1).abs(),
        consistency,
        l_score: laplace_lenz_diff_dot_v2(&geoms[0], &geoms[1], &x).abs(),
        preferred: false,
    })
}
