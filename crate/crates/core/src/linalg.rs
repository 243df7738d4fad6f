//! Fixed-size 4x4 helpers for the cubic local fits.

use crate::{Error, Result};

pub(crate) type Mat4 = [[f64; 4]; 4];

fn det3(a: [[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

fn minor(a: &Mat4, row: usize, col: usize) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (ri, r) in (0..4).filter(|&r| r != row).enumerate() {
        for (ci, c) in (0..4).filter(|&c| c != col).enumerate() {
            out[ri][ci] = a[r][c];
        }
    }
    out
}

/// Cofactor expansion along the first column.
pub(crate) fn det4(a: &Mat4) -> f64 {
    (0..4)
        .map(|r| {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * a[r][0] * det3(minor(a, r, 0))
        })
        .sum()
}

/// Copy of `a` with its first column replaced by `col`.
pub(crate) fn replace_first_column(a: &Mat4, col: [f64; 4]) -> Mat4 {
    let mut out = *a;
    for (row, value) in out.iter_mut().zip(col) {
        row[0] = value;
    }
    out
}

pub(crate) fn transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for (r, row) in a.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            out[c][r] = v;
        }
    }
    out
}

/// Gaussian elimination with partial pivoting.
pub(crate) fn solve4(a: &Mat4, b: [f64; 4]) -> Result<[f64; 4]> {
    let mut m = *a;
    let mut rhs = b;
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Err(Error::SingularSystem(4));
    }
    for k in 0..4 {
        let pivot = (k..4)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .unwrap_or(k);
        if m[pivot][k].abs() <= scale * 1e-14 {
            return Err(Error::SingularSystem(4));
        }
        m.swap(k, pivot);
        rhs.swap(k, pivot);
        for i in k + 1..4 {
            let factor = m[i][k] / m[k][k];
            let pivot_row = m[k];
            for (a, b) in m[i][k..].iter_mut().zip(&pivot_row[k..]) {
                *a -= factor * b;
            }
            rhs[i] -= factor * rhs[k];
        }
    }
    let mut x = [0.0; 4];
    for k in (0..4).rev() {
        let tail: f64 = (k + 1..4).map(|j| m[k][j] * x[j]).sum();
        x[k] = (rhs[k] - tail) / m[k][k];
    }
    Ok(x)
}
