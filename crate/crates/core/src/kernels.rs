//! Biweight density, its moments and the order-4 reproducing kernel.
//!
//! The kernel is `K4(t) = det(H[1, t]) / det(H) * f(t)` where `H` is the 4x4
//! Hankel matrix of the biweight moments `mu_0..mu_6` and `H[1, t]` is `H`
//! with its first column replaced by `(1, t, t^2, t^3)`. Because the odd
//! moments vanish the ratio collapses to
//! `(mu_4 - mu_2 t^2) / (mu_0 mu_4 - mu_2^2)`; both forms are exposed.

use crate::linalg::{det4, replace_first_column, Mat4};
use crate::{Error, Result};

/// Normalizing constant of the biweight, `15/16`.
pub const BIWEIGHT_SCALE: f64 = 15.0 / 16.0;

/// `mu_0..mu_6` of the biweight on `[-1, 1]`, exact rationals.
pub const BIWEIGHT_MOMENTS: [f64; 7] = [1.0, 0.0, 1.0 / 7.0, 0.0, 1.0 / 21.0, 0.0, 5.0 / 231.0];

/// Biweight density `(15/16)(1 - t^2)^2`, zero outside `[-1, 1]`.
#[inline]
pub fn biweight_density(t: f64) -> f64 {
    if t.abs() > 1.0 {
        return 0.0;
    }
    let s = 1.0 - t * t;
    BIWEIGHT_SCALE * s * s
}

/// Moments and Hankel matrix of the order-4 biweight kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub density_order: usize,
    pub moments: [f64; 7],
    /// `hankel[r][c] = mu_{r+c}`.
    pub hankel: [[f64; 4]; 4],
}

impl KernelSpec {
    pub fn mu(&self, r: usize) -> f64 {
        self.moments[r]
    }

    /// Denominator of the simplified kernel, `mu_0 mu_4 - mu_2^2`.
    pub fn reduced_determinant(&self) -> f64 {
        self.mu(0) * self.mu(4) - self.mu(2) * self.mu(2)
    }

    pub(crate) fn hankel_with_first_column(&self, col: [f64; 4]) -> Mat4 {
        replace_first_column(&self.hankel, col)
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        continuous_moments()
    }
}

pub fn continuous_moments() -> KernelSpec {
    let moments = BIWEIGHT_MOMENTS;
    let mut hankel = [[0.0; 4]; 4];
    for (r, row) in hankel.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = moments[r + c];
        }
    }
    KernelSpec {
        density_order: 4,
        moments,
        hankel,
    }
}

/// Moments `mu_0..mu_3` of the biweight restricted to `[-1, q_star]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedMoments {
    pub q_star: f64,
    pub values: [f64; 4],
}

// Antiderivative of t^r (1 - 2t^2 + t^4), without the 15/16 factor.
fn biweight_antiderivative(r: i32, x: f64) -> f64 {
    let p = |k: i32| libm::pow(x, f64::from(k)) / f64::from(k);
    p(r + 1) - 2.0 * p(r + 3) + p(r + 5)
}

pub fn truncated_moments(q_star: f64) -> Result<TruncatedMoments> {
    if !(q_star > -1.0 && q_star <= 1.0) {
        return Err(Error::TruncationOutOfRange(q_star));
    }
    let mut values = [0.0; 4];
    for (r, v) in values.iter_mut().enumerate() {
        let r = r as i32;
        *v = BIWEIGHT_SCALE
            * (biweight_antiderivative(r, q_star) - biweight_antiderivative(r, -1.0));
    }
    if q_star == 1.0 {
        // the antiderivative differences are exact up to rounding; pin the
        // untruncated values so both code paths agree bit for bit
        values.copy_from_slice(&BIWEIGHT_MOMENTS[..4]);
    }
    Ok(TruncatedMoments { q_star, values })
}

/// `K4(t)` evaluated through the Hankel determinant ratio.
pub fn kernel_k4(t: f64, spec: &KernelSpec) -> f64 {
    let f = biweight_density(t);
    if f == 0.0 {
        return 0.0;
    }
    let numerator = det4(&spec.hankel_with_first_column([1.0, t, t * t, t * t * t]));
    numerator / det4(&spec.hankel) * f
}

/// `K4(t)` evaluated through the simplified polynomial factor.
pub fn kernel_k4_reduced(t: f64, spec: &KernelSpec) -> f64 {
    (spec.mu(4) - spec.mu(2) * t * t) / spec.reduced_determinant() * biweight_density(t)
}
