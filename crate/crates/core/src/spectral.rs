//! Frequency-domain characterization of filters.
//!
//! Frequencies are in cycles per unit of time on `[0, 1/2]`. The transfer
//! function is `Γ(ω) = Σ_j w_j exp(-i 2π ω j)` for weights over offsets `j`
//! (negative offsets are past observations). Phase is stored in radians as
//! the unwrapped argument of `Γ`, so a filter that lags its input has a
//! positive phase and `phase / (2πω)` is its delay in time units.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::filters::FilterWeights;
use crate::quadrature::simpson;
use crate::{Error, Result};

pub const DEFAULT_GRID_SIZE: usize = 2001;
/// Smallest grid accepted for revision integrals.
pub const MIN_REVISION_GRID: usize = 201;
/// Upper edge of the monthly signal band (cycles of 16 months or longer).
pub const MONTHLY_SIGNAL_CUTOFF: f64 = 0.06;
pub const QUARTERLY_SIGNAL_CUTOFF: f64 = 0.18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Band {
    /// `[0, 1/2]`
    Full,
    /// `[0, cutoff]`
    Signal { cutoff: f64 },
}

impl Band {
    pub const MONTHLY_SIGNAL: Band = Band::Signal {
        cutoff: MONTHLY_SIGNAL_CUTOFF,
    };
    pub const QUARTERLY_SIGNAL: Band = Band::Signal {
        cutoff: QUARTERLY_SIGNAL_CUTOFF,
    };

    pub fn upper(self) -> f64 {
        match self {
            Band::Full => 0.5,
            Band::Signal { cutoff } => cutoff,
        }
    }
}

/// Uniform grid on `[0, 1/2]` with cached `cos(2πωk)` and `sin(2πωk)` for
/// `k = 0..=max_lag`.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    omegas: Vec<f64>,
    step: f64,
    max_lag: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(size: usize, max_lag: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::GridTooCoarse { got: size, min: 2 });
        }
        let step = 0.5 / (size - 1) as f64;
        let omegas: Vec<f64> = (0..size).map(|i| i as f64 * step).collect();
        let stride = max_lag + 1;
        let mut cos = Vec::with_capacity(size * stride);
        let mut sin = Vec::with_capacity(size * stride);
        for &w in &omegas {
            for k in 0..stride {
                let arg = TAU * w * k as f64;
                cos.push(libm::cos(arg));
                sin.push(libm::sin(arg));
            }
        }
        Ok(FrequencyGrid {
            omegas,
            step,
            max_lag,
            cos,
            sin,
        })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    /// Number of leading grid points inside `band`.
    pub fn band_len(&self, band: Band) -> usize {
        let upper = band.upper() + 1e-12;
        self.omegas.partition_point(|&w| w <= upper)
    }

    /// Transfer function at grid index `i`, as `(re, im)`.
    ///
    /// Offsets `±k` are paired so that the imaginary part of a symmetric
    /// filter is exactly zero.
    pub fn transfer_at(&self, filter: &FilterWeights, i: usize) -> (f64, f64) {
        let reach = filter.m().max(filter.q());
        assert!(reach <= self.max_lag, "grid built for shorter filters");
        let row = i * (self.max_lag + 1);
        let mut re = filter.weight(0);
        let mut im = 0.0;
        for k in 1..=reach {
            let ahead = filter.weight(k as isize);
            let behind = filter.weight(-(k as isize));
            re += (ahead + behind) * self.cos[row + k];
            im += (behind - ahead) * self.sin[row + k];
        }
        (re, im)
    }

    /// Transfer function on the first `count` grid points.
    pub fn transfer_prefix(&self, filter: &FilterWeights, count: usize) -> Vec<(f64, f64)> {
        (0..count).map(|i| self.transfer_at(filter, i)).collect()
    }
}

/// Unwraps `atan2` values by continuing each point to the nearest multiple
/// of `2π` from its predecessor, starting from the raw value at `ω = 0`.
pub fn unwrap_phase(transfer: &[(f64, f64)]) -> Vec<f64> {
    let mut out = Vec::with_capacity(transfer.len());
    let mut prev = 0.0;
    for (i, &(re, im)) in transfer.iter().enumerate() {
        let raw = libm::atan2(im, re);
        let value = if i == 0 {
            raw
        } else {
            raw + TAU * libm::round((prev - raw) / TAU)
        };
        out.push(value);
        prev = value;
    }
    out
}

/// Sampled transfer function with gain and phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub frequencies: Vec<f64>,
    pub transfer_real: Vec<f64>,
    pub transfer_imag: Vec<f64>,
    pub gain: Vec<f64>,
    /// Unwrapped `arg Γ(ω)` in radians.
    pub phase: Vec<f64>,
    /// Delay in the limit `ω → 0`, `-Σ j w_j`.
    pub zero_frequency_delay: f64,
}

impl SpectralCurve {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn on_grid(grid: &FrequencyGrid, filter: &FilterWeights) -> Self {
        let transfer = grid.transfer_prefix(filter, grid.len());
        let phase = unwrap_phase(&transfer);
        let gain = transfer
            .iter()
            .map(|&(re, im)| libm::hypot(re, im))
            .collect();
        let (transfer_real, transfer_imag) = transfer.into_iter().unzip();
        SpectralCurve {
            frequencies: grid.omegas().to_vec(),
            transfer_real,
            transfer_imag,
            gain,
            phase,
            zero_frequency_delay: -filter.moment(1),
        }
    }
}

pub fn transfer(filter: &FilterWeights, grid_size: usize) -> Result<SpectralCurve> {
    let grid = FrequencyGrid::new(grid_size, filter.m().max(filter.q()))?;
    Ok(SpectralCurve::on_grid(&grid, filter))
}

/// Phase delay `θ(ω) / (2πω)` in time units, with the group-delay limit at
/// `ω = 0`.
pub fn phase_delay(curve: &SpectralCurve) -> Vec<f64> {
    curve
        .frequencies
        .iter()
        .zip(&curve.phase)
        .map(|(&w, &theta)| {
            if w == 0.0 {
                curve.zero_frequency_delay
            } else {
                theta / (TAU * w)
            }
        })
        .collect()
}

/// Revision between an asymmetric filter and its symmetric target,
/// integrated over a band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevisionSpectrum {
    /// `sqrt(2 ∫ |Γ_q - Γ|^2 dω)`
    pub total: f64,
    /// `2 ∫ (G_q - G)^2 dω`
    pub gain_part: f64,
    /// `8 ∫ G_q G sin^2((θ_q - θ)/2) dω`
    pub phase_part: f64,
    pub band: Band,
}

fn check_pair(asym: &FilterWeights, sym: &FilterWeights) -> Result<()> {
    if !sym.is_symmetric() {
        return Err(Error::ReferenceNotSymmetric);
    }
    if asym.m() != sym.m() {
        return Err(Error::HalfLengthMismatch {
            left: asym.m(),
            right: sym.m(),
        });
    }
    Ok(())
}

impl RevisionSpectrum {
    pub fn on_grid(
        grid: &FrequencyGrid,
        asym: &FilterWeights,
        sym: &FilterWeights,
        band: Band,
    ) -> Result<Self> {
        check_pair(asym, sym)?;
        if grid.len() < MIN_REVISION_GRID {
            return Err(Error::GridTooCoarse {
                got: grid.len(),
                min: MIN_REVISION_GRID,
            });
        }
        let count = grid.band_len(band);
        let ta = grid.transfer_prefix(asym, count);
        let ts = grid.transfer_prefix(sym, count);
        let pa = unwrap_phase(&ta);
        let ps = unwrap_phase(&ts);
        let mut total = Vec::with_capacity(count);
        let mut gain = Vec::with_capacity(count);
        let mut phase = Vec::with_capacity(count);
        for i in 0..count {
            let (ar, ai) = ta[i];
            let (sr, si) = ts[i];
            let ga = libm::hypot(ar, ai);
            let gs = libm::hypot(sr, si);
            let (dr, di) = (ar - sr, ai - si);
            total.push(dr * dr + di * di);
            gain.push((ga - gs) * (ga - gs));
            let s = libm::sin(0.5 * (pa[i] - ps[i]));
            phase.push(ga * gs * s * s);
        }
        let h = grid.step();
        Ok(RevisionSpectrum {
            total: libm::sqrt(2.0 * simpson(&total, h)),
            gain_part: 2.0 * simpson(&gain, h),
            phase_part: 8.0 * simpson(&phase, h),
            band,
        })
    }
}

pub fn revision_distance(
    asym: &FilterWeights,
    sym: &FilterWeights,
    band: Band,
) -> Result<RevisionSpectrum> {
    check_pair(asym, sym)?;
    let grid = FrequencyGrid::new(DEFAULT_GRID_SIZE, sym.m())?;
    RevisionSpectrum::on_grid(&grid, asym, sym, band)
}

/// Phase delay `θ / (2πω)`, taking the supplied limit at `ω = 0`.
pub(crate) fn delay_from_phase(theta: f64, omega: f64, zero_limit: f64) -> f64 {
    if omega == 0.0 {
        zero_limit
    } else {
        theta / (2.0 * PI * omega)
    }
}
