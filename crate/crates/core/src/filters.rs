//! Weight systems: exact Henderson, symmetric and asymmetric RKHS biweight
//! filters, and Musgrave surrogate boundary filters.
//!
//! Weights are stored in offset order `j = -m..=q`; offset 0 is the target
//! point, negative offsets are past observations.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::kernels::{biweight_density, continuous_moments};
use crate::linalg::{solve4, transpose, Mat4};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterKind {
    HendersonExact,
    RkhsSymmetric,
    RkhsAsymmetric,
    Musgrave,
    /// Caller-supplied weights.
    Custom,
}

impl FilterKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterKind::HendersonExact => "henderson",
            FilterKind::RkhsSymmetric => "rkhs_symmetric",
            FilterKind::RkhsAsymmetric => "rkhs_asymmetric",
            FilterKind::Musgrave => "musgrave",
            FilterKind::Custom => "custom",
        }
    }
}

/// A finite moving average over offsets `-m..=q`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterWeights {
    m: usize,
    q: usize,
    weights: Vec<f64>,
    bandwidth: Option<f64>,
    kind: FilterKind,
}

impl FilterWeights {
    /// Wraps arbitrary weights over `-m..=q`. Panics if the length is not
    /// `m + q + 1`.
    pub fn custom(m: usize, q: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), m + q + 1, "weights must cover -m..=q");
        FilterWeights {
            m,
            q,
            weights,
            bandwidth: None,
            kind: FilterKind::Custom,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bandwidth(&self) -> Option<f64> {
        self.bandwidth
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.q == self.m
    }

    /// Weight at offset `j`, zero outside the support.
    pub fn weight(&self, j: isize) -> f64 {
        let idx = j + self.m as isize;
        if idx < 0 {
            return 0.0;
        }
        self.weights.get(idx as usize).copied().unwrap_or(0.0)
    }

    pub fn offsets(&self) -> impl Iterator<Item = isize> + '_ {
        let m = self.m as isize;
        (0..self.weights.len()).map(move |i| i as isize - m)
    }

    pub fn iter(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        self.offsets().zip(self.weights.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_j j^r w_j`.
    pub fn moment(&self, r: i32) -> f64 {
        self.iter()
            .map(|(j, w)| libm::pow(j as f64, f64::from(r)) * w)
            .sum()
    }

    /// Estimate at position `t` of `values`; `None` when the window
    /// `t - m ..= t + q` does not fit.
    pub fn apply_at(&self, values: &[f64], t: usize) -> Option<f64> {
        let start = t.checked_sub(self.m)?;
        let window = values.get(start..=t + self.q)?;
        Some(dot(&self.weights, window))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_half_length(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::HalfLengthTooSmall { m, min: 2 });
    }
    Ok(())
}

fn check_bandwidth(m: usize, b: f64) -> Result<()> {
    if !(b.is_finite() && b > m as f64) {
        return Err(Error::InadmissibleBandwidth { m, bandwidth: b });
    }
    Ok(())
}

/// Henderson weights: first row of `(X'WX)^{-1} X'W` for the cubic fit with
/// `W_j ∝ ((m+1)^2 - j^2)((m+2)^2 - j^2)((m+3)^2 - j^2)`.
pub fn henderson_exact(m: usize) -> Result<FilterWeights> {
    check_half_length(m)?;
    let mi = m as f64;
    // powers of j/(m+1) span the same cubic space and keep X'WX well scaled
    let scale = mi + 1.0;
    let a2 = (mi + 1.0) * (mi + 1.0);
    let b2 = (mi + 2.0) * (mi + 2.0);
    let c2 = (mi + 3.0) * (mi + 3.0);
    let norm = a2 * b2 * c2;
    let rows: Vec<([f64; 4], f64)> = (-(m as isize)..=m as isize)
        .map(|j| {
            let jf = j as f64;
            let j2 = jf * jf;
            let w = (a2 - j2) * (b2 - j2) * (c2 - j2) / norm;
            let u = jf / scale;
            ([1.0, u, u * u, u * u * u], w)
        })
        .collect();
    let mut normal: Mat4 = [[0.0; 4]; 4];
    for (x, w) in &rows {
        for r in 0..4 {
            for c in 0..4 {
                normal[r][c] += w * x[r] * x[c];
            }
        }
    }
    let z = solve4(&normal, [1.0, 0.0, 0.0, 0.0])?;
    let mut weights: Vec<f64> = rows.iter().map(|(x, w)| dot(&z, x) * w).collect();
    symmetrize(&mut weights);
    Ok(FilterWeights {
        m,
        q: m,
        weights,
        bandwidth: None,
        kind: FilterKind::HendersonExact,
    })
}

// rounding in the elimination can break w_j = w_{-j} in the last bit
fn symmetrize(weights: &mut [f64]) {
    let n = weights.len();
    for i in 0..n / 2 {
        let avg = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = avg;
        weights[n - 1 - i] = avg;
    }
}

/// Cut-and-normalize biweight weights over `-m..=q` with bandwidth `b`.
fn rkhs_cut(m: usize, q: usize, b: f64) -> Vec<f64> {
    let spec = continuous_moments();
    let (mu2, mu4) = (spec.mu(2), spec.mu(4));
    let terms: Vec<(f64, f64)> = (-(m as isize)..=q as isize)
        .map(|j| {
            let t = j as f64 / b;
            (t * t, biweight_density(t) / b)
        })
        .collect();
    let s0: f64 = terms.iter().map(|(_, f)| f).sum();
    let s2: f64 = terms.iter().map(|(t2, f)| t2 * f).sum();
    let denom = s0 * mu4 - s2 * mu2;
    terms
        .iter()
        .map(|(t2, f)| (mu4 - mu2 * t2) / denom * f)
        .collect()
}

/// Symmetric RKHS biweight weights in scalar form.
pub fn rkhs_symmetric(m: usize, b: f64) -> Result<FilterWeights> {
    check_half_length(m)?;
    check_bandwidth(m, b)?;
    Ok(FilterWeights {
        m,
        q: m,
        weights: rkhs_cut(m, m, b),
        bandwidth: Some(b),
        kind: FilterKind::RkhsSymmetric,
    })
}

/// Symmetric RKHS weights as `e1' H_s^{-1} X_b' F_b`, where `H_s` is the
/// moment Hankel matrix with first column `(S_0, 0, S_2, 0)`.
pub fn rkhs_symmetric_matrix(m: usize, b: f64) -> Result<FilterWeights> {
    check_half_length(m)?;
    check_bandwidth(m, b)?;
    let spec = continuous_moments();
    let design: Vec<([f64; 4], f64)> = (-(m as isize)..=m as isize)
        .map(|j| {
            let t = j as f64 / b;
            ([1.0, t, t * t, t * t * t], biweight_density(t) / b)
        })
        .collect();
    let moments = discrete_moments(&design);
    let h_s = spec.hankel_with_first_column([moments[0], 0.0, moments[2], 0.0]);
    // e1' H^{-1} is the solution of H' z = e1
    let z = solve4(&transpose(&h_s), [1.0, 0.0, 0.0, 0.0])?;
    let weights = design.iter().map(|(x, f)| dot(&z, x) * f).collect();
    Ok(FilterWeights {
        m,
        q: m,
        weights,
        bandwidth: Some(b),
        kind: FilterKind::RkhsSymmetric,
    })
}

/// `S_r = sum_j (j/b)^r f(j/b) / b` for `r = 0..=3`.
fn discrete_moments(design: &[([f64; 4], f64)]) -> [f64; 4] {
    let mut s = [0.0; 4];
    for (x, f) in design {
        for r in 0..4 {
            s[r] += x[r] * f;
        }
    }
    s
}

/// Asymmetric RKHS weights over `-m..=q` with local bandwidth `b_q`.
pub fn rkhs_asymmetric(m: usize, q: usize, b_q: f64) -> Result<FilterWeights> {
    check_half_length(m)?;
    if q >= m {
        return Err(Error::FutureReachOutOfRange { m, q });
    }
    check_bandwidth(m, b_q)?;
    Ok(FilterWeights {
        m,
        q,
        weights: rkhs_cut(m, q, b_q),
        bandwidth: Some(b_q),
        kind: FilterKind::RkhsAsymmetric,
    })
}

/// Slope-to-noise variance ratio `4 / (pi R^2)` implied by an I/C ratio.
pub fn slope_noise_ratio(ic_ratio: f64) -> f64 {
    4.0 / (PI * ic_ratio * ic_ratio)
}

/// Musgrave surrogate of the exact Henderson filter for `q` future points.
///
/// The truncated Henderson mass is spread evenly over the available support
/// and tilted linearly so the mean squared revision under a local linear
/// trend plus white noise is minimal, given `sum v = 1`.
pub fn musgrave(m: usize, q: usize, ic_ratio: f64) -> Result<FilterWeights> {
    if !(ic_ratio.is_finite() && ic_ratio > 0.0) {
        return Err(Error::NonPositiveIcRatio(ic_ratio));
    }
    if q > m {
        return Err(Error::FutureReachOutOfRange { m, q });
    }
    let henderson = henderson_exact(m)?;
    let w = henderson.weights();
    let n = m + q + 1;
    let nf = n as f64;
    let centre = (q as f64 - m as f64) / 2.0;
    let spread = nf * (nf * nf - 1.0) / 12.0;
    let ratio = slope_noise_ratio(ic_ratio);
    let dropped = &w[n..];
    let dropped_mass: f64 = dropped.iter().sum();
    let dropped_tilt: f64 = dropped
        .iter()
        .enumerate()
        .map(|(k, wj)| ((q + 1 + k) as f64 - centre) * wj)
        .sum();
    let slope = dropped_tilt / (1.0 / ratio + spread);
    let weights = w[..n]
        .iter()
        .enumerate()
        .map(|(k, wi)| {
            let i = k as f64 - m as f64;
            wi + dropped_mass / nf + (i - centre) * slope
        })
        .collect();
    Ok(FilterWeights {
        m,
        q,
        weights,
        bandwidth: None,
        kind: FilterKind::Musgrave,
    })
}

/// X-11 default I/C ratio for Musgrave filters of a given half-length.
pub fn default_musgrave_ic(m: usize) -> f64 {
    match m {
        0..=4 => 1.0,
        5..=8 => 3.5,
        _ => 4.5,
    }
}
