//! Plane fit through the geocentre for the positions of one track, and the
//! range-preserving rotation of each line of sight onto that plane.

use std::f64::consts::TAU;

use crate::frame::SphericalDirection;
use crate::radar::{RadarObservation, RadarTrack};
use crate::{Error, Mat3, Result, Vec3};

/// Two eigenvalues closer than this (relative to the largest) make the
/// plane non-unique.
const COLLINEAR_TOL: f64 = 1e-10;
const PARALLEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneFit {
    /// Unit normal, oriented so that `ν·(r₁ × r₂) ≥ 0`.
    pub nu: Vec3,
    /// `Σ (r_j·ν)²`, km².
    pub lambda_min: f64,
    /// `r_j·ν`, km.
    pub residuals: Vec<f64>,
    /// Eigenvalues of `Σ r_j r_jᵀ`, ascending.
    pub eigenvalues: [f64; 3],
}

/// Eigenvalues of a symmetric 3×3 matrix from its characteristic cubic,
/// ascending.
pub fn symmetric_eigenvalues(a: &Mat3) -> [f64; 3] {
    let p1 = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    let p2 = (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * p1;
    if p2 == 0.0 {
        return [q; 3];
    }
    let p = (p2 / 6.0).sqrt();
    let b = (a - Mat3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + TAU / 3.0).cos();
    [lo, 3.0 * q - hi - lo, hi]
}

/// Null vector of `A − λI` from the largest cross product of its rows.
fn eigenvector(a: &Mat3, lambda: f64) -> Option<Vec3> {
    let m = a - Mat3::identity() * lambda;
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let best = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| rows[i].cross(&rows[j]))
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))?;
    let scale = m.norm_squared();
    (best.norm_squared() > 1e-20 * scale * scale).then(|| best.normalize())
}

/// Cyclic Jacobi rotations; returns eigenvalues and eigenvectors (columns).
fn jacobi(a: &Mat3) -> ([f64; 3], Mat3) {
    let mut m = *a;
    let mut v = Mat3::identity();
    for _ in 0..50 {
        let off = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
        if off <= 1e-30 * m.norm_squared() {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if m[(p, q)] == 0.0 {
                continue;
            }
            let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            let mut g = Mat3::identity();
            g[(p, p)] = c;
            g[(q, q)] = c;
            g[(p, q)] = s;
            g[(q, p)] = -s;
            m = g.transpose() * m * g;
            v *= g;
        }
    }
    ([m[(0, 0)], m[(1, 1)], m[(2, 2)]], v)
}

/// Best plane through the origin for `positions` (at least three).
pub fn fit_plane(positions: &[Vec3]) -> Result<PlaneFit> {
    if positions.len() < 3 {
        return Err(Error::TooFewObservations { n: positions.len(), min: 3 });
    }
    let a = positions.iter().fold(Mat3::zeros(), |acc, r| acc + r * r.transpose());
    let mut ev = symmetric_eigenvalues(&a);
    let lmax = ev[2].abs().max(f64::MIN_POSITIVE);
    let mut nu = eigenvector(&a, ev[0]);
    if nu.is_none() || (ev[1] - ev[0]) < 1e-6 * lmax {
        let (vals, vecs) = jacobi(&a);
        let mut order = [0, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        ev = order.map(|i| vals[i]);
        nu = Some(vecs.column(order[0]).normalize());
    }
    if ev[1] - ev[0] <= COLLINEAR_TOL * lmax {
        return Err(Error::CollinearPositions);
    }
    let mut nu = nu.ok_or(Error::CollinearPositions)?;
    if nu.dot(&positions[0].cross(&positions[1])) < 0.0 {
        nu = -nu;
    }
    let residuals: Vec<f64> = positions.iter().map(|r| r.dot(&nu)).collect();
    let lambda_min = residuals.iter().map(|x| x * x).sum();
    ev[0] = lambda_min;
    Ok(PlaneFit { nu, lambda_min, residuals, eigenvalues: ev })
}

/// Rotates the line of sight `e_rho` so that `q + 𝓡ρ` lies on the plane
/// with normal `nu` while `|𝓡ρ| = rho`. The result is `A ν + B e_rho` with
/// `B ≥ 0`.
pub fn rotate_to_plane(rho: f64, e_rho: &Vec3, q: &Vec3, nu: &Vec3) -> Result<Vec3> {
    let q_cos_theta = nu.dot(q);
    let cos_phi = nu.dot(e_rho);
    let s = rho * rho - q_cos_theta * q_cos_theta;
    if s < 0.0 {
        return Err(Error::InfeasibleCorrection { rho, q_cos_theta: q_cos_theta.abs() });
    }
    let sin_phi = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    if sin_phi < PARALLEL_TOL {
        return Err(Error::ParallelToNormal);
    }
    let root = s.sqrt();
    let b = root / sin_phi;
    let a = -(q_cos_theta + cos_phi / sin_phi * root);
    Ok(a * nu + b * e_rho)
}

/// Fits the plane to a track and moves every observation onto it, keeping
/// the measured ranges. Returns the corrected track and the fit used.
pub fn correct_track(track: &RadarTrack) -> Result<(RadarTrack, PlaneFit)> {
    let fit = fit_plane(&track.positions())?;
    let mut obs = Vec::with_capacity(track.obs.len());
    for o in &track.obs {
        let q = crate::observer::station_state(&track.station, o.epoch).q;
        let v = rotate_to_plane(o.rho, &o.dir.unit_vector(), &q, &fit.nu)?;
        obs.push(RadarObservation { epoch: o.epoch, rho: o.rho, dir: SphericalDirection::from_vector(&v)? });
    }
    Ok((RadarTrack { station: track.station.clone(), obs }, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{state_at, KeplerianElements};
    use crate::observer::{station_state, StationSpec};
    use crate::radar::{add_noise, simulate_track, NoiseSpec};
    use crate::time::Epoch;
    use crate::MU_EARTH;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_in_the_equator() {
        let pts = [Vec3::new(7000.0, 0.0, 0.0), Vec3::new(0.0, 7100.0, 0.0), Vec3::new(-5000.0, 5000.0, 0.0), Vec3::new(3.0, -6800.0, 0.0)];
        let fit = fit_plane(&pts).unwrap();
        assert_eq!(fit.nu, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(fit.lambda_min, 0.0);
    }

    #[test]
    fn keplerian_positions_are_coplanar() {
        let el = KeplerianElements::reference();
        let pts: Vec<Vec3> = (0..6).map(|k| state_at(&el, el.epoch.add_seconds(10.0 * k as f64), MU_EARTH).unwrap().r).collect();
        let fit = fit_plane(&pts).unwrap();
        assert!(fit.lambda_min / pts[0].norm_squared() < 1e-18, "{}", fit.lambda_min);
        assert!((fit.nu.norm() - 1.0).abs() < 1e-13);
    }

    fn noisy_points(seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let el = KeplerianElements::reference();
        (0..5)
            .map(|k| {
                let r = state_at(&el, el.epoch.add_seconds(10.0 * k as f64), MU_EARTH).unwrap().r;
                r + Vec3::from_fn(|_, _| rng.random_range(-3.0..3.0))
            })
            .collect()
    }

    #[test]
    fn normal_minimises_the_quadratic_form() {
        let pts = noisy_points(3);
        let fit = fit_plane(&pts).unwrap();
        let form = |n: &Vec3| pts.iter().map(|r| r.dot(n).powi(2)).sum::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let n = Vec3::from_fn(|_, _| rng.random_range(-1.0..1.0)).normalize();
            assert!(fit.lambda_min <= form(&n) * (1.0 + 1e-12));
        }
        assert!(fit.eigenvalues[0] <= fit.eigenvalues[1] && fit.eigenvalues[1] <= fit.eigenvalues[2]);
    }

    #[test]
    fn eigen_decomposition_matches_nalgebra() {
        for seed in 0..50 {
            let pts = noisy_points(seed);
            let a = pts.iter().fold(Mat3::zeros(), |acc, r| acc + r * r.transpose());
            let fit = fit_plane(&pts).unwrap();
            let reference = a.symmetric_eigen();
            let mut vals: Vec<f64> = reference.eigenvalues.iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            let ours = symmetric_eigenvalues(&a);
            for k in 1..3 {
                assert!((ours[k] - vals[k]).abs() < 1e-9 * vals[2]);
            }
            // The reference smallest eigenvalue is only good to ~ε·λmax.
            assert!((fit.lambda_min - vals[0]).abs() < 1e-14 * vals[2], "{} vs {}", fit.lambda_min, vals[0]);
            let imin = reference.eigenvalues.imin();
            let n_ref = reference.eigenvectors.column(imin).into_owned();
            assert!(fit.nu.cross(&n_ref).norm() < 1e-9);
        }
    }

    #[test]
    fn jacobi_agrees_with_the_cubic() {
        let pts = noisy_points(9);
        let a = pts.iter().fold(Mat3::zeros(), |acc, r| acc + r * r.transpose());
        let (mut vals, vecs) = jacobi(&a);
        for (k, &val) in vals.iter().enumerate() {
            let v = vecs.column(k).into_owned();
            assert!((a * v - val * v).norm() < 1e-9 * a.norm());
        }
        vals.sort_by(f64::total_cmp);
        let cubic = symmetric_eigenvalues(&a);
        assert!((vals[2] - cubic[2]).abs() < 1e-9 * vals[2]);
    }

    #[test]
    fn collinear_points_are_rejected() {
        let d = Vec3::new(1.0, 2.0, 3.0);
        let pts = [d, 2.0 * d, -3.0 * d, 5.0 * d];
        assert_eq!(fit_plane(&pts), Err(Error::CollinearPositions));
    }

    #[test]
    fn in_plane_line_of_sight_is_unchanged() {
        let nu = Vec3::new(0.0, 0.0, 1.0);
        let e = Vec3::new(0.6, 0.8, 0.0);
        let q = Vec3::new(6000.0, -1000.0, 0.0);
        let out = rotate_to_plane(1500.0, &e, &q, &nu).unwrap();
        assert!((out - 1500.0 * e).norm() < 1e-12 * 1500.0);
    }

    #[test]
    fn infeasible_and_parallel_cases() {
        let nu = Vec3::new(0.0, 0.0, 1.0);
        let q = Vec3::new(0.0, 0.0, 6400.0);
        let e = Vec3::new(1.0, 0.0, 0.0);
        assert!(matches!(rotate_to_plane(1000.0, &e, &q, &nu), Err(Error::InfeasibleCorrection { .. })));
        assert_eq!(rotate_to_plane(8000.0, &nu, &q, &nu), Err(Error::ParallelToNormal));
    }

    proptest! {
        #[test]
        fn defining_conditions_hold(
            nu in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            e in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            q in (-6400.0..6400.0f64, -6400.0..6400.0f64, -6400.0..6400.0f64),
            rho in 500.0..3000.0f64,
        ) {
            let nu = Vec3::new(nu.0, nu.1, nu.2);
            let e = Vec3::new(e.0, e.1, e.2);
            prop_assume!(nu.norm() > 0.1 && e.norm() > 0.1);
            let (nu, e, q) = (nu.normalize(), e.normalize(), Vec3::new(q.0, q.1, q.2));
            match rotate_to_plane(rho, &e, &q, &nu) {
                Ok(v) => {
                    prop_assert!((v.norm() - rho).abs() <= 1e-12 * rho);
                    prop_assert!((q + v).dot(&nu).abs() <= 1e-12 * q.norm().max(rho));
                    // Non-negative coefficient on e^ρ: the in-plane part of
                    // e^ρ is never reversed.
                    let c = e.dot(&nu);
                    prop_assert!(v.dot(&(e - c * nu)) >= -1e-12 * rho);
                    let again = rotate_to_plane(rho, &(v / rho), &q, &nu).unwrap();
                    prop_assert!((again - v).norm() <= 1e-12 * rho);
                }
                Err(Error::InfeasibleCorrection { .. }) => prop_assert!(rho < nu.dot(&q).abs()),
                Err(other) => prop_assert!(false, "unexpected {other}"),
            }
        }
    }

    #[test]
    fn corrected_track_lies_on_the_plane() {
        let el = KeplerianElements::reference();
        let st = StationSpec::reference();
        let track = simulate_track(&el, &st, Epoch::from_mjd(54127.155035), 4, 10.0, MU_EARTH).unwrap();
        let noisy = add_noise(&track, &NoiseSpec { sigma_alpha_deg: 0.2, sigma_delta_deg: 0.2, sigma_rho_km: 0.0, seed: 7 });
        let before = fit_plane(&noisy.positions()).unwrap();
        let (fixed, fit) = correct_track(&noisy).unwrap();
        assert_eq!(fit, before);
        for (o, r) in fixed.obs.iter().zip(fixed.positions()) {
            assert!(r.dot(&fit.nu).abs() < 1e-9 * r.norm());
            let q = station_state(&st, o.epoch).q;
            assert!(((r - q).norm() - o.rho).abs() <= 1e-12 * o.rho);
        }
        let after = fit_plane(&fixed.positions()).unwrap();
        assert!(after.lambda_min * 1e3 <= before.lambda_min, "{} -> {}", before.lambda_min, after.lambda_min);
    }
}
