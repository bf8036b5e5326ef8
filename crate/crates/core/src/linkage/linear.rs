//! `X(Δ)` from angular momentum conservation plus the energy/radial
//! combination `2ℰ₁ + ρ₁𝒦₁ = 2ℰ₂ + ρ₂𝒦₂`, which is linear in `X`.

use crate::integrals::{EpochGeometry, EpochTangent, UnknownsX};
use crate::linalg::{det4, det4_derivative, max_abs4, with_column4};
use crate::{Error, Mat4, Result, Vec4};

/// Relative determinant threshold: `|M|` must exceed `EPS_DET · ‖M‖⁴`.
pub const EPS_DET: f64 = 1e-12;

/// `M X = V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSystemMV {
    pub m: Mat4,
    pub v: Vec4,
}

pub fn assemble_linear(g1: &EpochGeometry, g2: &EpochGeometry) -> LinearSystemMV {
    let mut m = Mat4::zeros();
    for i in 0..3 {
        m[(i, 0)] = g1.a[i];
        m[(i, 1)] = g1.b[i];
        m[(i, 2)] = -g2.a[i];
        m[(i, 3)] = -g2.b[i];
    }
    m[(3, 0)] = g1.qdot_alpha;
    m[(3, 1)] = g1.qdot_delta;
    m[(3, 2)] = -g2.qdot_alpha;
    m[(3, 3)] = -g2.qdot_delta;
    let dc = g2.c - g1.c;
    LinearSystemMV { m, v: Vec4::new(dc.x, dc.y, dc.z, g2.d - g1.d) }
}

/// Variation of `(M, V)` along the two epoch tangents.
pub fn linear_tangent(t1: &EpochTangent, t2: &EpochTangent) -> (Mat4, Vec4) {
    let mut dm = Mat4::zeros();
    for i in 0..3 {
        dm[(i, 0)] = t1.da[i];
        dm[(i, 1)] = t1.db[i];
        dm[(i, 2)] = -t2.da[i];
        dm[(i, 3)] = -t2.db[i];
    }
    dm[(3, 0)] = t1.dqdot_alpha;
    dm[(3, 1)] = t1.dqdot_delta;
    dm[(3, 2)] = -t2.dqdot_alpha;
    dm[(3, 3)] = -t2.dqdot_delta;
    let dc = t2.dc - t1.dc;
    (dm, Vec4::new(dc.x, dc.y, dc.z, t2.dd - t1.dd))
}

impl LinearSystemMV {
    pub fn determinant(&self) -> f64 {
        det4(&self.m)
    }

    fn check(&self) -> Result<f64> {
        let det = self.determinant();
        let threshold = EPS_DET * max_abs4(&self.m).powi(4);
        if !(det.abs() > threshold) {
            return Err(Error::SingularGeometry { det: det.abs(), threshold });
        }
        Ok(det)
    }
}

/// Cramer's rule: `X_k = |M_k| / |M|` with `M_k` the matrix whose `k`-th
/// column is replaced by `V`.
pub fn solve_x_linear(sys: &LinearSystemMV) -> Result<UnknownsX> {
    let det = sys.check()?;
    let x = Vec4::from_fn(|k, _| det4(&with_column4(&sys.m, k, &sys.v)) / det);
    Ok(UnknownsX::from_vec(&x))
}

/// Variation of `X` given `(dM, dV)`, by differentiating the Cramer
/// quotients with the column-replacement rule for determinants.
pub fn x_tangent_linear(sys: &LinearSystemMV, x: &UnknownsX, dm: &Mat4, dv: &Vec4) -> Result<Vec4> {
    let det = sys.check()?;
    let d_det = det4_derivative(&sys.m, dm);
    let xv = x.to_vec();
    Ok(Vec4::from_fn(|k, _| {
        let mk = with_column4(&sys.m, k, &sys.v);
        let dmk = with_column4(dm, k, dv);
        (det4_derivative(&mk, &dmk) - xv[k] * d_det) / det
    }))
}
