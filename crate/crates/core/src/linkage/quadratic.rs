//! `X(Δ)` from angular momentum and energy conservation: `c₁ = c₂` is
//! linear in `Y = (ξ₁, ζ₁, ξ₂)` for fixed `ζ₂`, and `ℰ₁ = ℰ₂` then becomes a
//! quadratic `F₂ζ₂² + F₁ζ₂ + F₀ = 0` (the coefficients are those of
//! `2(ℰ₁ − ℰ₂)`).

use crate::integrals::{EpochGeometry, EpochTangent, UnknownsX};
use crate::linalg::{det3, det3_derivative, max_abs3, with_column3};
use crate::{Error, Mat3, Result, Vec3, Vec4};

pub const EPS_DET: f64 = 1e-12;

/// Below this `|F₂|` the energy equation is treated as linear in `ζ₂`.
pub const DEGENERATE_F2: f64 = 1e-14;

/// `N Y = ζ₂ W¹ + W⁰` plus the energy quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticSystemNW {
    pub n: Mat3,
    pub w0: Vec3,
    pub w1: Vec3,
    pub f2: f64,
    pub f1: f64,
    pub f0: f64,
    pub det_n: f64,
    /// `|N_k^(0)|`, `k = 1..3`.
    pub minors0: [f64; 3],
    /// `|N_k^(1)|`, `k = 1..3`.
    pub minors1: [f64; 3],
    qdot: [f64; 4],
}

fn build_n(g1: &EpochGeometry, g2: &EpochGeometry) -> (Mat3, Vec3, Vec3) {
    let n = Mat3::from_columns(&[g1.a, g1.b, -g2.a]);
    (n, g2.c - g1.c, g2.b)
}

pub fn assemble_quadratic(g1: &EpochGeometry, g2: &EpochGeometry) -> Result<QuadraticSystemNW> {
    let (n, w0, w1) = build_n(g1, g2);
    let det_n = det3(&n);
    let threshold = EPS_DET * max_abs3(&n).powi(3);
    if !(det_n.abs() > threshold) {
        return Err(Error::SingularGeometry { det: det_n.abs(), threshold });
    }
    let minors0 = [0, 1, 2].map(|k| det3(&with_column3(&n, k, &w0)));
    let minors1 = [0, 1, 2].map(|k| det3(&with_column3(&n, k, &w1)));
    let qdot = [g1.qdot_alpha, g1.qdot_delta, g2.qdot_alpha, g2.qdot_delta];
    let (f2, f1, f0) = f_coefficients(det_n, &minors0, &minors1, &qdot, g1.frak_d - g2.frak_d);
    Ok(QuadraticSystemNW { n, w0, w1, f2, f1, f0, det_n, minors0, minors1, qdot })
}

fn f_coefficients(det: f64, m0: &[f64; 3], m1: &[f64; 3], qd: &[f64; 4], frak_diff: f64) -> (f64, f64, f64) {
    let det2 = det * det;
    let f2 = (m1[0] * m1[0] + m1[1] * m1[1] - m1[2] * m1[2]) / det2 - 1.0;
    let f1 = 2.0 / det2 * (m1[0] * m0[0] + m1[1] * m0[1] - m1[2] * m0[2])
        + 2.0 / det * (qd[0] * m1[0] + qd[1] * m1[1] - qd[2] * m1[2] - qd[3] * det);
    let f0 = (m0[0] * m0[0] + m0[1] * m0[1] - m0[2] * m0[2]) / det2
        + 2.0 / det * (qd[0] * m0[0] + qd[1] * m0[1] - qd[2] * m0[2])
        + frak_diff;
    (f2, f1, f0)
}

impl QuadraticSystemNW {
    /// `X` on the curve `c₁ = c₂` at the given `ζ₂`.
    pub fn x_at(&self, zeta2: f64) -> UnknownsX {
        let y = |k: usize| (zeta2 * self.minors1[k] + self.minors0[k]) / self.det_n;
        UnknownsX { xi1: y(0), zeta1: y(1), xi2: y(2), zeta2 }
    }

    pub fn energy_poly(&self, zeta2: f64) -> f64 {
        (self.f2 * zeta2 + self.f1) * zeta2 + self.f0
    }

    pub fn discriminant(&self) -> f64 {
        self.f1 * self.f1 - 4.0 * self.f2 * self.f0
    }

    /// Real roots `ζ₂`, ordered by `|ζ₂|`.
    pub fn roots(&self) -> Result<Vec<f64>> {
        if self.f2.abs() < DEGENERATE_F2 {
            log::warn!("energy equation degenerates to linear (F2 = {:e})", self.f2);
            if self.f1 == 0.0 {
                return Err(Error::NoRealRoot { discriminant: 0.0 });
            }
            return Ok(vec![-self.f0 / self.f1]);
        }
        let disc = self.discriminant();
        if disc < 0.0 {
            return Err(Error::NoRealRoot { discriminant: disc });
        }
        // Cancellation-free pair.
        let s = disc.sqrt();
        let qv = -0.5 * (self.f1 + self.f1.signum() * s);
        let mut roots = if qv == 0.0 { vec![0.0, 0.0] } else { vec![qv / self.f2, self.f0 / qv] };
        roots.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
        Ok(roots)
    }

    /// Variation of `X` at root `zeta2` along the epoch tangents, with
    /// `∂ζ₂` from the implicit function theorem on the energy quadratic.
    pub fn x_tangent(&self, t1: &EpochTangent, t2: &EpochTangent, zeta2: f64) -> Result<Vec4> {
        let (n, w0, w1) = (self.n, self.w0, self.w1);
        let dn = Mat3::from_columns(&[t1.da, t1.db, -t2.da]);
        let dw0 = t2.dc - t1.dc;
        let dw1 = t2.db;
        let d_det = det3_derivative(&n, &dn);
        let dm0 = [0, 1, 2].map(|k| det3_derivative(&with_column3(&n, k, &w0), &with_column3(&dn, k, &dw0)));
        let dm1 = [0, 1, 2].map(|k| det3_derivative(&with_column3(&n, k, &w1), &with_column3(&dn, k, &dw1)));
        let dqd = [t1.dqdot_alpha, t1.dqdot_delta, t2.dqdot_alpha, t2.dqdot_delta];
        let (df2, df1, df0) = self.f_tangent(d_det, &dm0, &dm1, &dqd, t1.dfrak_d - t2.dfrak_d);
        let slope = 2.0 * self.f2 * zeta2 + self.f1;
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::JacobianSingular);
        }
        let dz = -(df2 * zeta2 * zeta2 + df1 * zeta2 + df0) / slope;
        let x = self.x_at(zeta2);
        let y = [x.xi1, x.zeta1, x.xi2];
        let dy = [0, 1, 2].map(|k| {
            let d_minor = dz * self.minors1[k] + zeta2 * dm1[k] + dm0[k];
            (d_minor - y[k] * d_det) / self.det_n
        });
        Ok(Vec4::new(dy[0], dy[1], dy[2], dz))
    }

    fn f_tangent(&self, d_det: f64, dm0: &[f64; 3], dm1: &[f64; 3], dqd: &[f64; 4], dfrak: f64) -> (f64, f64, f64) {
        let (det, m0, m1, qd) = (self.det_n, &self.minors0, &self.minors1, &self.qdot);
        let det2 = det * det;
        let s11 = m1[0] * m1[0] + m1[1] * m1[1] - m1[2] * m1[2];
        let s10 = m1[0] * m0[0] + m1[1] * m0[1] - m1[2] * m0[2];
        let s00 = m0[0] * m0[0] + m0[1] * m0[1] - m0[2] * m0[2];
        let ds11 = 2.0 * (m1[0] * dm1[0] + m1[1] * dm1[1] - m1[2] * dm1[2]);
        let ds10 = m1[0] * dm0[0] + dm1[0] * m0[0] + m1[1] * dm0[1] + dm1[1] * m0[1] - m1[2] * dm0[2] - dm1[2] * m0[2];
        let ds00 = 2.0 * (m0[0] * dm0[0] + m0[1] * dm0[1] - m0[2] * dm0[2]);
        let p1 = qd[0] * m1[0] + qd[1] * m1[1] - qd[2] * m1[2];
        let dp1 = dqd[0] * m1[0] + qd[0] * dm1[0] + dqd[1] * m1[1] + qd[1] * dm1[1] - dqd[2] * m1[2] - qd[2] * dm1[2];
        let p0 = qd[0] * m0[0] + qd[1] * m0[1] - qd[2] * m0[2];
        let dp0 = dqd[0] * m0[0] + qd[0] * dm0[0] + dqd[1] * m0[1] + qd[1] * dm0[1] - dqd[2] * m0[2] - qd[2] * dm0[2];
        // d(1/det²) = −2 d_det/det³, d(1/det) = −d_det/det².
        let inv2 = -2.0 * d_det / (det2 * det);
        let inv1 = -d_det / det2;
        let df2 = ds11 / det2 + s11 * inv2;
        let df1 = 2.0 * (ds10 / det2 + s10 * inv2) + 2.0 * (dp1 / det + p1 * inv1) - 2.0 * dqd[3];
        let df0 = ds00 / det2 + s00 * inv2 + 2.0 * (dp0 / det + p0 * inv1) + dfrak;
        (df2, df1, df0)
    }
}

/// Candidate solutions `X` of the quadratic route.
pub fn solve_x_quadratic(sys: &QuadraticSystemNW) -> Result<Vec<UnknownsX>> {
    Ok(sys.roots()?.into_iter().map(|z| sys.x_at(z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::KeplerianElements;
    use crate::integrals::{angular_momentum, energy, epoch_geometry};
    use crate::observer::StationSpec;
    use crate::radar::{exact_attributable, topocentric_truth, Attributable};
    use crate::time::Epoch;
    use crate::MU_EARTH;

    fn epochs() -> [Epoch; 2] {
        [Epoch::from_mjd(54127.155035), Epoch::from_mjd(54127.582118)]
    }

    fn attributables() -> [Attributable; 2] {
        let el = KeplerianElements::reference();
        epochs().map(|t| exact_attributable(&el, &StationSpec::reference(), t, MU_EARTH).unwrap())
    }

    fn truth_x() -> UnknownsX {
        let el = KeplerianElements::reference();
        let [a, b] = epochs().map(|t| topocentric_truth(&el, &StationSpec::reference(), t, MU_EARTH).unwrap());
        UnknownsX { xi1: a.xi, zeta1: a.zeta, xi2: b.xi, zeta2: b.zeta }
    }

    fn system() -> (EpochGeometry, EpochGeometry, QuadraticSystemNW) {
        let [a1, a2] = attributables();
        let g1 = epoch_geometry(&a1, 0.0, 0.0, MU_EARTH).unwrap();
        let g2 = epoch_geometry(&a2, 0.0, 0.0, MU_EARTH).unwrap();
        let sys = assemble_quadratic(&g1, &g2).unwrap();
        (g1, g2, sys)
    }

    #[test]
    fn coefficients_match_direct_substitution() {
        let (g1, g2, sys) = system();
        for z in [-3.0, -1.2, 0.0, 0.7, 4.5] {
            let x = sys.x_at(z);
            let phi = 2.0 * (energy(&g1, x.xi1, x.zeta1) - energy(&g2, x.xi2, x.zeta2));
            let poly = sys.energy_poly(z);
            let size = sys.f2.abs() * z * z + sys.f1.abs() * z.abs() + sys.f0.abs();
            assert!((poly - phi).abs() <= 1e-9 * size, "z={z}: {poly} vs {phi}");
        }
    }

    #[test]
    fn true_zeta2_is_a_root() {
        let (_, _, sys) = system();
        let t = truth_x();
        let size = sys.f2.abs() * t.zeta2 * t.zeta2 + sys.f1.abs() * t.zeta2.abs() + sys.f0.abs();
        assert!(sys.energy_poly(t.zeta2).abs() < 1e-6 * size);
        let candidates = solve_x_quadratic(&sys).unwrap();
        let best = candidates.iter().map(|x| (x.to_vec() - t.to_vec()).amax()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-5, "closest candidate off by {best} km/s");
        assert!(candidates.windows(2).all(|w| w[0].zeta2.abs() <= w[1].zeta2.abs()));
    }

    #[test]
    fn w1_is_the_zeta2_coefficient() {
        let (_, g2, sys) = system();
        assert_eq!(sys.w1, g2.b);
        let rhs = |z: f64| z * sys.w1 + sys.w0;
        assert!((rhs(1.0) - rhs(0.0) - g2.b).amax() <= 1e-12 * g2.b.amax());
    }

    #[test]
    fn candidates_share_angular_momentum_and_energy() {
        let (g1, g2, sys) = system();
        for x in solve_x_quadratic(&sys).unwrap() {
            let c1 = angular_momentum(&g1, x.xi1, x.zeta1);
            let c2 = angular_momentum(&g2, x.xi2, x.zeta2);
            assert!((c1 - c2).norm() < 1e-9 * c1.norm());
            let (e1, e2) = (energy(&g1, x.xi1, x.zeta1), energy(&g2, x.xi2, x.zeta2));
            assert!(((e1 - e2) / e1).abs() < 1e-9);
        }
    }

    #[test]
    fn range_acceleration_does_not_enter() {
        let [a1, mut a2] = attributables();
        let (_, _, sys) = system();
        a2.rho_ddot *= 1.5;
        let g1 = epoch_geometry(&a1, 0.0, 0.0, MU_EARTH).unwrap();
        let g2 = epoch_geometry(&a2, 0.0, 0.0, MU_EARTH).unwrap();
        let other = assemble_quadratic(&g1, &g2).unwrap();
        assert_eq!((sys.f2, sys.f1, sys.f0), (other.f2, other.f1, other.f0));
    }

    #[test]
    fn corrupted_range_rate_has_no_real_root() {
        let [a1, a2] = attributables();
        let g1 = epoch_geometry(&a1, 0.0, 0.0, MU_EARTH).unwrap();
        let mut found = None;
        for step in -400..=400 {
            let mut bad = a2.clone();
            bad.rho_dot = a2.rho_dot + 0.05 * step as f64;
            let g2 = epoch_geometry(&bad, 0.0, 0.0, MU_EARTH).unwrap();
            let Ok(sys) = assemble_quadratic(&g1, &g2) else { continue };
            if sys.discriminant() < 0.0 {
                found = Some(sys);
                break;
            }
        }
        let sys = found.expect("no corruption drove the discriminant negative");
        assert!(matches!(solve_x_quadratic(&sys), Err(Error::NoRealRoot { .. })));
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let [a1, a2] = attributables();
        let (g1, g2, sys) = system();
        let z = sys.roots().unwrap()[0];
        let h = 1e-7;
        for col in 0..4 {
            let tan = if col < 2 { g1.angle_tangent(col) } else { g2.angle_tangent(col - 2) };
            let zero = EpochTangent::zero();
            let (t1, t2) = if col < 2 { (tan, zero) } else { (zero, tan) };
            let dx = sys.x_tangent(&t1, &t2, z).unwrap();
            let at = |s: f64| {
                let mut d = [0.0; 4];
                d[col] = s;
                let g1 = epoch_geometry(&a1, d[0], d[1], MU_EARTH).unwrap();
                let g2 = epoch_geometry(&a2, d[2], d[3], MU_EARTH).unwrap();
                let q = assemble_quadratic(&g1, &g2).unwrap();
                let r = q.roots().unwrap().into_iter().min_by(|a, b| (a - z).abs().total_cmp(&(b - z).abs())).unwrap();
                q.x_at(r).to_vec()
            };
            let fd = (at(h) - at(-h)) / (2.0 * h);
            assert!((dx - fd).amax() <= 1e-5 * fd.amax(), "column {col}: {dx} vs {fd}");
        }
    }
}
