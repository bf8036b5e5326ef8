//! Closed-form determinants and Cramer solves for 3×3 and 4×4 systems.
//!
//! The linkage reductions are written in terms of determinants of matrices
//! with one column replaced, and their derivatives use the column-by-column
//! rule `d|A| = Σ_h |A with column h replaced by dA_h|`. Both are done here by
//! cofactor expansion.

use crate::{Mat3, Mat4, Vec3, Vec4};

pub fn det3(m: &Mat3) -> f64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

pub fn det4(m: &Mat4) -> f64 {
    // Laplace expansion along the first row via 2×2 minors of the lower rows.
    let s0 = m[(2, 0)] * m[(3, 1)] - m[(2, 1)] * m[(3, 0)];
    let s1 = m[(2, 0)] * m[(3, 2)] - m[(2, 2)] * m[(3, 0)];
    let s2 = m[(2, 0)] * m[(3, 3)] - m[(2, 3)] * m[(3, 0)];
    let s3 = m[(2, 1)] * m[(3, 2)] - m[(2, 2)] * m[(3, 1)];
    let s4 = m[(2, 1)] * m[(3, 3)] - m[(2, 3)] * m[(3, 1)];
    let s5 = m[(2, 2)] * m[(3, 3)] - m[(2, 3)] * m[(3, 2)];

    let c0 = m[(1, 1)] * s5 - m[(1, 2)] * s4 + m[(1, 3)] * s3;
    let c1 = m[(1, 0)] * s5 - m[(1, 2)] * s2 + m[(1, 3)] * s1;
    let c2 = m[(1, 0)] * s4 - m[(1, 1)] * s2 + m[(1, 3)] * s0;
    let c3 = m[(1, 0)] * s3 - m[(1, 1)] * s1 + m[(1, 2)] * s0;

    m[(0, 0)] * c0 - m[(0, 1)] * c1 + m[(0, 2)] * c2 - m[(0, 3)] * c3
}

pub fn with_column3(m: &Mat3, col: usize, v: &Vec3) -> Mat3 {
    let mut out = *m;
    out.set_column(col, v);
    out
}

pub fn with_column4(m: &Mat4, col: usize, v: &Vec4) -> Mat4 {
    let mut out = *m;
    out.set_column(col, v);
    out
}

/// Derivative of `|A|` given `dA`.
pub fn det3_derivative(a: &Mat3, da: &Mat3) -> f64 {
    (0..3).map(|h| det3(&with_column3(a, h, &da.column(h).into_owned()))).sum()
}

pub fn det4_derivative(a: &Mat4, da: &Mat4) -> f64 {
    (0..4).map(|h| det4(&with_column4(a, h, &da.column(h).into_owned()))).sum()
}

/// Max-abs entry, used to scale singularity thresholds.
pub fn max_abs4(m: &Mat4) -> f64 {
    m.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

pub fn max_abs3(m: &Mat3) -> f64 {
    m.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}
