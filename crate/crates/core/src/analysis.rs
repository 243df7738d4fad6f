//! Revision metrics, turning points, detection lags and porcupine paths.

use alloc::vec::Vec;
use core::fmt;

use crate::filters::dot;
use crate::series::{smooth_values, FilterBank, Period, TimeSeries, TrendEstimate};
use crate::{Error, Result};

/// Non-decreasing run required before a downturn (non-increasing before an upturn).
pub const TURNING_BACK: usize = 3;
/// Points after the turn that must confirm it.
pub const TURNING_FORWARD: usize = 1;
/// Vintages examined beyond the turning point are capped at `m + DETECTION_SLACK`.
pub const DETECTION_SLACK: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevisionPoint {
    pub index: usize,
    pub final_value: f64,
    pub realtime: f64,
    /// `(S - A) / S`; `None` where the final value is zero.
    pub relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevisionReport {
    pub points: Vec<RevisionPoint>,
    /// Mean squared relative revision, in percent squared.
    pub mspe: f64,
    pub excluded: usize,
    pub mspe_ratio_vs_reference: Option<f64>,
}

impl RevisionReport {
    pub fn defined(&self) -> usize {
        self.points.len() - self.excluded
    }

    /// MSPE of `self` divided by that of `reference`, also stored on `self`.
    pub fn compare_to(&mut self, reference: &RevisionReport) -> Result<f64> {
        let ratio = mspe_ratio(self, reference)?;
        self.mspe_ratio_vs_reference = Some(ratio);
        Ok(ratio)
    }
}

pub fn mspe_ratio(report: &RevisionReport, reference: &RevisionReport) -> Result<f64> {
    if !reference.mspe.is_finite() || reference.mspe <= 0.0 {
        return Err(Error::DegenerateRatio);
    }
    Ok(report.mspe / reference.mspe)
}

/// Relative revisions of `realtime[k]` against `final_values[first + k]`.
pub fn relative_revisions(
    final_values: &[f64],
    realtime: &[f64],
    first: usize,
) -> Result<RevisionReport> {
    if first + realtime.len() > final_values.len() {
        return Err(Error::LengthMismatch {
            left: final_values.len(),
            right: first + realtime.len(),
        });
    }
    let points: Vec<RevisionPoint> = realtime
        .iter()
        .enumerate()
        .map(|(k, &a)| {
            let s = final_values[first + k];
            RevisionPoint {
                index: first + k,
                final_value: s,
                realtime: a,
                relative: (s != 0.0).then(|| (s - a) / s),
            }
        })
        .collect();
    let defined: Vec<f64> = points.iter().filter_map(|p| p.relative).collect();
    if defined.is_empty() {
        return Err(Error::DegenerateRatio);
    }
    let mspe = defined.iter().map(|r| r * r).sum::<f64>() / defined.len() as f64 * 1e4;
    Ok(RevisionReport {
        excluded: points.len() - defined.len(),
        points,
        mspe,
        mspe_ratio_vs_reference: None,
    })
}

/// Last point of every vintage ending at `first..N`, i.e. the concurrent
/// filter applied at each date. `first >= m`.
pub fn realtime_last_points(values: &[f64], bank: &FilterBank, first: usize) -> Result<Vec<f64>> {
    let m = bank.m();
    if first < m || first >= values.len() {
        return Err(Error::IndexOutOfRange {
            index: first,
            len: values.len(),
        });
    }
    let concurrent = bank
        .asymmetric(0)
        .expect("bank has m >= 1 asymmetric filters");
    Ok((first..values.len())
        .map(|t| dot(concurrent.weights(), &values[t - m..=t]))
        .collect())
}

/// Concurrent estimates against final symmetric estimates on every date that
/// has `m` observations on each side.
pub fn revision_study(values: &[f64], bank: &FilterBank) -> Result<RevisionReport> {
    let m = bank.m();
    let final_estimate = smooth_values(values, bank)?;
    let last_interior = values.len() - 1 - m;
    let realtime = realtime_last_points(&values[..=last_interior], bank, m)?;
    relative_revisions(&final_estimate.values, &realtime, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TurnKind {
    Upturn,
    Downturn,
}

impl fmt::Display for TurnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TurnKind::Upturn => "upturn",
            TurnKind::Downturn => "downturn",
        })
    }
}

/// `index` is the first point after the peak (downturn) or trough (upturn).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TurningPoint {
    pub index: usize,
    pub kind: TurnKind,
}

fn turn_at(x: &[f64], t: usize) -> Option<TurnKind> {
    let back = &x[t - TURNING_BACK..t];
    let fwd = &x[t..=t + TURNING_FORWARD];
    let rising = back.windows(2).all(|w| w[0] <= w[1]);
    let falling = back.windows(2).all(|w| w[0] >= w[1]);
    let after_down = fwd.windows(2).all(|w| w[0] >= w[1]);
    let after_up = fwd.windows(2).all(|w| w[0] <= w[1]);
    let prev = back[TURNING_BACK - 1];
    if rising && prev > x[t] && after_down {
        Some(TurnKind::Downturn)
    } else if falling && prev < x[t] && after_up {
        Some(TurnKind::Upturn)
    } else {
        None
    }
}

/// Downturns `x[t-3] <= x[t-2] <= x[t-1] > x[t] >= x[t+1]` and the mirrored
/// upturns.
pub fn detect_turning_points(x: &[f64]) -> Vec<TurningPoint> {
    if x.len() < TURNING_BACK + TURNING_FORWARD + 1 {
        return Vec::new();
    }
    (TURNING_BACK..x.len() - TURNING_FORWARD)
        .filter_map(|t| turn_at(x, t).map(|kind| TurningPoint { index: t, kind }))
        .collect()
}

/// Turning point of the given kind at `index`, if the chain holds there.
pub fn turning_point_at(x: &[f64], index: usize) -> Option<TurningPoint> {
    if index < TURNING_BACK || index + TURNING_FORWARD >= x.len() {
        return None;
    }
    turn_at(x, index).map(|kind| TurningPoint { index, kind })
}

/// Turning points of the full-sample trend.
pub fn final_turning_points(values: &[f64], bank: &FilterBank) -> Result<Vec<TurningPoint>> {
    Ok(detect_turning_points(&smooth_values(values, bank)?.values))
}

/// Number of observations past `turning` after which the real-time trend
/// first shows the same turn at the same date. `Ok(None)` when it does not
/// within `m + 6` observations or before the data run out.
pub fn detection_lag(values: &[f64], bank: &FilterBank, turning: usize) -> Result<Option<usize>> {
    let final_trend = smooth_values(values, bank)?;
    let Some(target) = turning_point_at(&final_trend.values, turning) else {
        return Err(Error::NotATurningPoint { index: turning });
    };
    let horizon = bank.m() + DETECTION_SLACK;
    let lo = turning - TURNING_BACK;
    for d in 0..=horizon {
        let len = turning + d + 1;
        if len > values.len() {
            break;
        }
        if len < bank.min_length() || turning + TURNING_FORWARD >= len {
            continue;
        }
        let vintage = &values[..len];
        let local: Vec<f64> = (lo..=turning + TURNING_FORWARD)
            .map(|t| bank.estimate_at(vintage, t).0)
            .collect();
        if turn_at(&local, TURNING_BACK) == Some(target.kind) {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

pub fn detection_lag_at(
    series: &TimeSeries,
    bank: &FilterBank,
    date: Period,
) -> Result<Option<usize>> {
    let index = series.index_of(date).ok_or(Error::IndexOutOfRange {
        index: series.start().periods_until(date).unwrap_or(-1).max(0) as usize,
        len: series.len(),
    })?;
    detection_lag(series.values(), bank, index)
}

/// One vintage of a porcupine chart: estimates for dates `start..=end`
/// computed from observations `0..=end`.
#[derive(Debug, Clone, PartialEq)]
pub struct PorcupineRow {
    pub end: usize,
    pub start: usize,
    pub estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Porcupine {
    pub target: usize,
    pub rows: Vec<PorcupineRow>,
    /// The requested horizon ran past the end of the data.
    pub truncated: bool,
}

impl Porcupine {
    /// Estimate for `target` in each vintage.
    pub fn target_path(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.estimates[self.target - r.start])
            .collect()
    }
}

/// Vintages ending at `target, target + 1, ..., target + horizon`, each
/// reporting the `window` dates before `target` as well as everything up to
/// its own end.
pub fn porcupine(
    values: &[f64],
    bank: &FilterBank,
    target: usize,
    horizon: usize,
    window: usize,
) -> Result<Porcupine> {
    let min = bank.min_length();
    if target + 1 < min {
        return Err(Error::SeriesTooShort {
            len: target + 1,
            min,
        });
    }
    if target >= values.len() {
        return Err(Error::IndexOutOfRange {
            index: target,
            len: values.len(),
        });
    }
    let last = (target + horizon).min(values.len() - 1);
    let start = target - window.min(target);
    let rows = (target..=last)
        .map(|end| {
            let vintage = &values[..=end];
            PorcupineRow {
                end,
                start,
                estimates: (start..=end)
                    .map(|t| bank.estimate_at(vintage, t).0)
                    .collect(),
            }
        })
        .collect();
    Ok(Porcupine {
        target,
        rows,
        truncated: target + horizon > last,
    })
}

pub fn porcupine_at(
    series: &TimeSeries,
    bank: &FilterBank,
    date: Period,
    horizon: usize,
    window: usize,
) -> Result<Porcupine> {
    let target = series.index_of(date).ok_or(Error::IndexOutOfRange {
        index: series.start().periods_until(date).unwrap_or(-1).max(0) as usize,
        len: series.len(),
    })?;
    porcupine(series.values(), bank, target, horizon, window)
}

/// Final estimate paired with the concurrent estimate at every date.
pub fn realtime_and_final(values: &[f64], bank: &FilterBank) -> Result<(TrendEstimate, Vec<f64>)> {
    let final_estimate = smooth_values(values, bank)?;
    let realtime = realtime_last_points(values, bank, bank.m())?;
    Ok((final_estimate, realtime))
}
