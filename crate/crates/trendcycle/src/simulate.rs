//! Seeded synthetic series for revision and turning-point studies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use trendcycle_core::series::ic_ratio;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Local linear trend plus AR(1) noise scaled to a target I/C ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendNoiseConfig {
    pub length: usize,
    pub level: f64,
    pub slope_sd: f64,
    pub level_sd: f64,
    pub ar_coef: f64,
    pub target_ic: f64,
}

impl Default for TrendNoiseConfig {
    fn default() -> Self {
        TrendNoiseConfig {
            length: 240,
            level: 100.0,
            slope_sd: 0.05,
            level_sd: 0.0,
            ar_coef: 0.3,
            target_ic: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub trend: Vec<f64>,
    pub values: Vec<f64>,
    /// Scale applied to the unit-innovation noise.
    pub noise_scale: f64,
    pub ic: f64,
}

fn standard_normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn local_linear_trend<R: Rng>(rng: &mut R, cfg: &TrendNoiseConfig) -> Vec<f64> {
    let slope_shocks = standard_normals(rng, cfg.length);
    let level_shocks = standard_normals(rng, cfg.length);
    let mut slope = 0.0;
    let mut level = cfg.level;
    slope_shocks
        .iter()
        .zip(&level_shocks)
        .map(|(zs, zl)| {
            let out = level;
            slope += cfg.slope_sd * zs;
            level += slope + cfg.level_sd * zl;
            out
        })
        .collect()
}

/// Stationary AR(1) with unit innovation variance.
pub fn ar1<R: Rng>(rng: &mut R, n: usize, phi: f64) -> Vec<f64> {
    let shocks = standard_normals(rng, n);
    let mut x = shocks[0] / (1.0 - phi * phi).sqrt();
    let mut out = Vec::with_capacity(n);
    out.push(x);
    for z in &shocks[1..] {
        x = phi * x + z;
        out.push(x);
    }
    out
}

/// Draws trend and noise, then finds the noise scale giving `target_ic` by
/// bisection on the log scale.
pub fn trend_plus_noise<R: Rng>(rng: &mut R, cfg: &TrendNoiseConfig) -> Simulated {
    let trend = local_linear_trend(rng, cfg);
    let noise = ar1(rng, cfg.length, cfg.ar_coef);
    let combine =
        |s: f64| -> Vec<f64> { trend.iter().zip(&noise).map(|(t, e)| t + s * e).collect() };
    let ic_at = |s: f64| ic_ratio(&combine(s)).unwrap_or(f64::INFINITY);
    let (mut lo, mut hi) = (1e-6f64, 1.0f64);
    while ic_at(hi) < cfg.target_ic && hi < 1e6 {
        lo = hi;
        hi *= 4.0;
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if ic_at(mid) < cfg.target_ic {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let scale = (lo * hi).sqrt();
    let values = combine(scale);
    Simulated {
        ic: ic_ratio(&values).unwrap_or(f64::NAN),
        trend,
        values,
        noise_scale: scale,
    }
}

/// Drifting sinusoidal cycle with white noise; used for turning-point studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    pub length: usize,
    pub level: f64,
    pub drift: f64,
    pub amplitude: f64,
    pub period_range: (f64, f64),
    pub noise_range: (f64, f64),
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig {
            length: 120,
            level: 100.0,
            drift: 0.05,
            amplitude: 3.0,
            period_range: (36.0, 72.0),
            noise_range: (0.1, 0.3),
        }
    }
}

pub fn cycle<R: Rng>(rng: &mut R, cfg: &CycleConfig) -> Vec<f64> {
    let period = rng.random_range(cfg.period_range.0..cfg.period_range.1);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let sd = rng.random_range(cfg.noise_range.0..=cfg.noise_range.1);
    let noise = Normal::new(0.0, sd).expect("finite sd");
    (0..cfg.length)
        .map(|t| {
            let t = t as f64;
            cfg.level
                + cfg.drift * t
                + cfg.amplitude * (std::f64::consts::TAU * t / period + phase).sin()
                + noise.sample(rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_series() {
        let cfg = TrendNoiseConfig::default();
        let a = trend_plus_noise(&mut rng(5), &cfg);
        let b = trend_plus_noise(&mut rng(5), &cfg);
        assert_eq!(a, b);
        let c = trend_plus_noise(&mut rng(6), &cfg);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn calibration_hits_target() {
        for target in [0.2, 0.8, 2.0] {
            let cfg = TrendNoiseConfig {
                target_ic: target,
                ..Default::default()
            };
            let s = trend_plus_noise(&mut rng(11), &cfg);
            assert!(
                (s.ic - target).abs() < 1e-6 * target,
                "{} vs {target}",
                s.ic
            );
        }
    }

    #[test]
    fn heavy_noise_has_large_ratio() {
        let mut r = rng(2);
        let trend: Vec<f64> = (0..120).map(|t| 50.0 + 0.01 * t as f64).collect();
        let noise = ar1(&mut r, 120, 0.0);
        let y: Vec<f64> = trend.iter().zip(&noise).map(|(a, b)| a + 2.0 * b).collect();
        assert!(ic_ratio(&y).unwrap() > 1.0);
    }

    #[test]
    fn cycle_length() {
        let y = cycle(&mut rng(1), &CycleConfig::default());
        assert_eq!(y.len(), 120);
        assert!(y.iter().all(|v| v.is_finite()));
    }
}
