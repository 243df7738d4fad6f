//! Seeded comparisons of kernel and Musgrave boundary filters.

use rand::Rng;
use trendcycle_core::analysis::{detection_lag, final_turning_points, revision_study};
use trendcycle_core::bandwidth::{builtin_or_optimize, Criterion};
use trendcycle_core::filters::default_musgrave_ic;
use trendcycle_core::series::{ic_ratio, select_length, FilterBank};
use trendcycle_core::Result;

use crate::simulate::{self, CycleConfig, TrendNoiseConfig};

pub fn kernel_bank(m: usize, criterion: Criterion) -> Result<FilterBank> {
    FilterBank::rkhs(builtin_or_optimize(m, criterion)?)
}

pub fn musgrave_bank(m: usize) -> Result<FilterBank> {
    FilterBank::musgrave(m, default_musgrave_ic(m))
}

/// Half-length picked from the series' own I/C ratio.
pub fn auto_length(values: &[f64]) -> Result<usize> {
    Ok(select_length(ic_ratio(values)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RevisionTrial {
    pub target_ic: f64,
    pub m: usize,
    pub mspe_gain: f64,
    pub mspe_total: f64,
    pub mspe_musgrave: f64,
}

impl RevisionTrial {
    pub fn gain_ratio(&self) -> f64 {
        self.mspe_gain / self.mspe_musgrave
    }

    pub fn total_ratio(&self) -> f64 {
        self.mspe_total / self.mspe_musgrave
    }
}

/// Concurrent-versus-final MSPE of the gain- and total-criterion kernel
/// filters and of Musgrave filters on `count` simulated series with I/C
/// ratios drawn from `ic_range`.
pub fn revision_trials(
    seed: u64,
    count: usize,
    ic_range: (f64, f64),
) -> Result<Vec<RevisionTrial>> {
    let mut rng = simulate::rng(seed);
    (0..count)
        .map(|_| {
            let cfg = TrendNoiseConfig {
                target_ic: rng.random_range(ic_range.0..=ic_range.1),
                ar_coef: rng.random_range(0.0..0.5),
                ..Default::default()
            };
            let sim = simulate::trend_plus_noise(&mut rng, &cfg);
            let m = auto_length(&sim.values)?;
            let mspe = |bank: FilterBank| revision_study(&sim.values, &bank).map(|r| r.mspe);
            Ok(RevisionTrial {
                target_ic: cfg.target_ic,
                m,
                mspe_gain: mspe(kernel_bank(m, Criterion::GainDistance)?)?,
                mspe_total: mspe(kernel_bank(m, Criterion::TotalDistance)?)?,
                mspe_musgrave: mspe(musgrave_bank(m)?)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagTrial {
    pub m: usize,
    pub turning: usize,
    pub lag_gain: Option<usize>,
    pub lag_musgrave: Option<usize>,
}

/// Detection lags on simulated cycles. Each trial uses the latest turning
/// point shared by both final trends, away from either end of the sample.
pub fn lag_trials(seed: u64, count: usize, cfg: &CycleConfig) -> Result<Vec<LagTrial>> {
    let mut rng = simulate::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let y = simulate::cycle(&mut rng, cfg);
        let m = auto_length(&y)?;
        let gain = kernel_bank(m, Criterion::GainDistance)?;
        let musgrave = musgrave_bank(m)?;
        let kernel_tps = final_turning_points(&y, &gain)?;
        let shared = final_turning_points(&y, &musgrave)?
            .into_iter()
            .filter(|tp| tp.index > 2 * m + 4 && tp.index + m + 8 < y.len())
            .rfind(|tp| kernel_tps.contains(tp));
        let Some(tp) = shared else { continue };
        out.push(LagTrial {
            m,
            turning: tp.index,
            lag_gain: detection_lag(&y, &gain, tp.index)?,
            lag_musgrave: detection_lag(&y, &musgrave, tp.index)?,
        });
    }
    Ok(out)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Mean lag, counting undetected turns as one past the horizon.
pub fn mean_lag(lags: impl Iterator<Item = (usize, Option<usize>)>) -> f64 {
    let (sum, n) = lags.fold((0.0, 0usize), |(s, n), (m, lag)| {
        let l = lag.unwrap_or(m + trendcycle_core::analysis::DETECTION_SLACK + 1);
        (s + l as f64, n + 1)
    });
    sum / n as f64
}
