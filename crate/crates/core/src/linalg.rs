//! Small dense vector/matrix helpers for n ≤ 3 geometry. Matrices are
//! row-major `Vec<Vec<f64>>`.

use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<f64>>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], f: f64) -> Vec<f64> {
    a.iter().map(|x| x * f).collect()
}

/// `a + f b`
pub fn axpy(a: &[f64], f: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + f * y).collect()
}

pub fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

pub fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// `mᵀ v`
pub fn mat_t_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().zip(v).map(|(row, x)| row[j] * x).sum()).collect()
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Matrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
        .collect()
}

pub fn transpose(m: &[Vec<f64>]) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

pub fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => panic!("det only implemented for n <= 3"),
    }
}

/// Max entry of `|MᵀM - I|`.
pub fn orthogonality_error(m: &[Vec<f64>]) -> f64 {
    let mtm = mat_mul(&transpose(m), m);
    let mut err: f64 = 0.0;
    for (i, row) in mtm.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            err = err.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    err
}

/// Rotation by `angle` about coordinate axis `axis` (0-based) in ℝ³, or
/// the planar rotation in ℝ² (axis ignored).
pub fn axis_rotation(dim: usize, axis: usize, angle: f64) -> Result<Matrix> {
    let (s, c) = angle.sin_cos();
    match dim {
        2 => Ok(vec![vec![c, -s], vec![s, c]]),
        3 => {
            if axis > 2 {
                return Err(Error::OutOfRange(format!("rotation axis {axis} in dimension 3")));
            }
            let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut m = identity(3);
            m[i][i] = c;
            m[i][j] = -s;
            m[j][i] = s;
            m[j][j] = c;
            Ok(m)
        }
        _ => Err(Error::Unsupported(format!("rotations in dimension {dim}"))),
    }
}

/// Eigen-decomposition of a symmetric 2×2 matrix: ascending eigenvalues and
/// the matching unit eigenvectors.
pub fn sym2_eigen(a: f64, b: f64, d: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let half_tr = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let (l0, l1) = (half_tr - r, half_tr + r);
    if r == 0.0 {
        return ([l0, l1], [[1.0, 0.0], [0.0, 1.0]]);
    }
    // eigenvector of the larger eigenvalue; the other is its rotation
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let v1 = [theta.cos(), theta.sin()];
    let v0 = [-v1[1], v1[0]];
    ([l0, l1], [v0, v1])
}
