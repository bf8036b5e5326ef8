//! Baselines: Gibbs' velocity from three positions of one pass, and the
//! Keplerian-integrals linkage (`c₁ = c₂`, `ℰ₁ = ℰ₂` at `Δ = 0`).

use crate::elements::{cartesian_to_elements, CartesianState, KeplerianElements};
use crate::integrals::DeltaCorrections;
use crate::linkage::newton::check_pair;
use crate::linkage::{build_solution, LinkageProblem, LinkageSolution, ResidualScale, Route, SolutionMethod};
use crate::radar::{Attributable, RadarTrack};
use crate::time::Epoch;
use crate::{Error, Result, Vec3};

/// Smallest accepted angle between two of the three positions, rad.
const MIN_SEPARATION: f64 = 1e-9;

/// Three geocentric positions (km) of one pass at increasing epochs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsInput {
    pub r: [Vec3; 3],
    pub t: [Epoch; 3],
}

impl GibbsInput {
    /// Angle between `r₂` and the plane of `r₁, r₃`, rad.
    pub fn coplanarity(&self) -> f64 {
        let n = self.r[0].cross(&self.r[2]);
        (n.dot(&self.r[1]) / (n.norm() * self.r[1].norm())).clamp(-1.0, 1.0).asin()
    }

    fn validate(&self) -> Result<(f64, f64)> {
        let t21 = self.t[1].seconds_since(&self.t[0]);
        let t32 = self.t[2].seconds_since(&self.t[1]);
        if t21 == 0.0 || t32 == 0.0 {
            return Err(Error::DegenerateTimes);
        }
        if t21 < 0.0 || t32 < 0.0 {
            return Err(Error::InvalidInput("Gibbs epochs must increase".into()));
        }
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let (a, b) = (self.r[i], self.r[j]);
            if a.cross(&b).norm().atan2(a.dot(&b)) < MIN_SEPARATION {
                return Err(Error::CollinearPositions);
            }
        }
        Ok((t21, t32))
    }
}

/// `(G₁, G₂, G₃)` and `(H₁, H₂, H₃)` for the spacings `t₂₁`, `t₃₂`.
pub fn gibbs_coefficients(t21: f64, t32: f64, mu: f64) -> ([f64; 3], [f64; 3]) {
    let t31 = t21 + t32;
    let den = t21 * t32 * t31;
    let g1 = t32 * t32 / den;
    let g3 = t21 * t21 / den;
    let h1 = mu * t32 / 12.0;
    let h3 = mu * t21 / 12.0;
    ([g1, g1 - g3, g3], [h1, h1 - h3, h3])
}

/// Velocity at the middle epoch, `ṙ₂ = −d₁r₁ + d₂r₂ + d₃r₃` with
/// `d_j = G_j + H_j/|r_j|³`.
pub fn gibbs_velocity(input: &GibbsInput, mu: f64) -> Result<Vec3> {
    let (t21, t32) = input.validate()?;
    let (g, h) = gibbs_coefficients(t21, t32, mu);
    let d = |j: usize| g[j] + h[j] / input.r[j].norm().powi(3);
    Ok(-d(0) * input.r[0] + d(1) * input.r[1] + d(2) * input.r[2])
}

/// Gibbs orbit from a track, using observations 1, 2 and 4 (all three when
/// the track has exactly three).
pub fn gibbs_from_track(track: &RadarTrack, mu: f64) -> Result<(CartesianState, KeplerianElements)> {
    let idx = match track.obs.len() {
        n if n < 3 => return Err(Error::TooFewObservations { n, min: 3 }),
        3 => [0, 1, 2],
        _ => [0, 1, 3],
    };
    let pos = track.positions();
    let input = GibbsInput { r: idx.map(|i| pos[i]), t: idx.map(|i| track.obs[i].epoch) };
    log::debug!("Gibbs coplanarity angle {:e} rad", input.coplanarity());
    let v = gibbs_velocity(&input, mu)?;
    let state = CartesianState { r: input.r[1], v, epoch: input.t[1] };
    Ok((state, cartesian_to_elements(&state, mu)?))
}

/// The Keplerian-integrals linkage: both roots of the shared-energy
/// quadratic at `Δ = 0`, each scored by `|(L₁ − L₂)·v₂|`, smallest score
/// first and flagged as preferred.
pub fn keplerian_integrals_link(att1: &Attributable, att2: &Attributable, mu: f64) -> Result<Vec<LinkageSolution>> {
    check_pair(att1, att2)?;
    let problem = LinkageProblem::new(att1, att2, mu);
    let scale = ResidualScale::new(att1, att2, mu);
    let delta = DeltaCorrections::zero();
    let geoms = problem.geometries(&delta)?;
    let (_, _, roots) = problem.unknowns(&geoms, Route::QuadraticIndex(0))?;
    let mut out = Vec::with_capacity(roots.len());
    for i in 0..roots.len() {
        let (x, _, _) = problem.unknowns(&geoms, Route::QuadraticIndex(i))?;
        match build_solution(&geoms, x, delta, None, SolutionMethod::Ki, 0, 0.0, Vec::new(), 0, mu) {
            Ok(mut sol) => {
                sol.residual_norm = sol.l_score / scale.0[2];
                out.push(sol);
            }
            // An unbound root is not an orbit.
            Err(Error::HyperbolicOrbit { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    out.sort_by(|a, b| a.l_score.total_cmp(&b.l_score));
    if let Some(first) = out.first_mut() {
        first.preferred = true;
    }
    Ok(out)
}
