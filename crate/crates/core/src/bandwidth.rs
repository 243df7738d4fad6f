//! Local bandwidth selection for the asymmetric RKHS filters.
//!
//! For each future reach `q = 0..m-1` the bandwidth `b_q` minimizes a
//! distance between the asymmetric filter and the symmetric reference
//! `rkhs_symmetric(m, m + 1)`:
//!
//! * [`Criterion::TotalDistance`]: `sqrt(2 ∫_0^{1/2} |Γ_q - Γ|^2)`
//! * [`Criterion::GainDistance`]: `sqrt(2 ∫_0^{1/2} (G_q - G)^2)`
//! * [`Criterion::PhaseCos`]: `sqrt(2 ∫_{Ω_S} G_q G (1 - cos(θ_q - θ)))`
//! * [`Criterion::PhaseDelay`]: `(1/0.06) ∫_{Ω_S} |θ_q(ω) / (2πω)|`, the
//!   mean absolute phase delay over the signal band
//!
//! The search scans `b` on a fixed step and refines the selected bracket by
//! golden-section search. The selected bracket is the lowest strict interior
//! local minimum of the scan; the scan edges are used only when the scan is
//! monotone. Near `b = m` the oldest weight vanishes and the filter
//! degenerates into a shorter one, which can produce spurious edge minima for
//! the phase criteria.

use alloc::vec::Vec;

use crate::filters::{rkhs_asymmetric, rkhs_symmetric, FilterWeights};
use crate::quadrature::simpson;
use crate::spectral::{delay_from_phase, unwrap_phase, Band, FrequencyGrid, DEFAULT_GRID_SIZE};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    TotalDistance,
    GainDistance,
    PhaseCos,
    PhaseDelay,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [
        Criterion::TotalDistance,
        Criterion::GainDistance,
        Criterion::PhaseCos,
        Criterion::PhaseDelay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::TotalDistance => "total",
            Criterion::GainDistance => "gain",
            Criterion::PhaseCos => "phase-cos",
            Criterion::PhaseDelay => "phase",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Criterion::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

impl core::fmt::Display for Criterion {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Local bandwidths `b_0..b_{m-1}` for one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthSet {
    pub m: usize,
    pub criterion: Criterion,
    pub values: Vec<f64>,
}

impl BandwidthSet {
    pub fn new(m: usize, criterion: Criterion, values: Vec<f64>) -> Result<Self> {
        if values.len() != m {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: m,
            });
        }
        for &b in &values {
            if !(b.is_finite() && b > m as f64) {
                return Err(Error::InadmissibleBandwidth { m, bandwidth: b });
            }
        }
        Ok(BandwidthSet {
            m,
            criterion,
            values,
        })
    }

    pub fn get(&self, q: usize) -> Option<f64> {
        self.values.get(q).copied()
    }
}

/// Criterion evaluator with the grid and symmetric reference precomputed.
#[derive(Debug, Clone)]
pub struct BandwidthObjective {
    m: usize,
    criterion: Criterion,
    grid: FrequencyGrid,
    signal_cutoff: f64,
    signal_len: usize,
    reference: Vec<(f64, f64)>,
    reference_gain: Vec<f64>,
    reference_phase: Vec<f64>,
}

impl BandwidthObjective {
    pub fn new(m: usize, criterion: Criterion) -> Result<Self> {
        Self::with_grid(m, criterion, DEFAULT_GRID_SIZE, Band::MONTHLY_SIGNAL)
    }

    pub fn with_grid(
        m: usize,
        criterion: Criterion,
        grid_size: usize,
        signal_band: Band,
    ) -> Result<Self> {
        let reference_filter = rkhs_symmetric(m, m as f64 + 1.0)?;
        let grid = FrequencyGrid::new(grid_size, m)?;
        let reference = grid.transfer_prefix(&reference_filter, grid.len());
        let reference_gain = reference
            .iter()
            .map(|&(re, im)| libm::hypot(re, im))
            .collect();
        let signal_len = grid.band_len(signal_band);
        let reference_phase = unwrap_phase(&reference[..signal_len]);
        Ok(BandwidthObjective {
            m,
            criterion,
            signal_cutoff: signal_band.upper(),
            signal_len,
            grid,
            reference,
            reference_gain,
            reference_phase,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    /// Filter with reach `q` and bandwidth `b`; `q = m` gives the symmetric one.
    pub fn filter(&self, q: usize, b: f64) -> Result<FilterWeights> {
        if q == self.m {
            rkhs_symmetric(self.m, b)
        } else {
            rkhs_asymmetric(self.m, q, b)
        }
    }

    pub fn eval(&self, q: usize, b: f64) -> Result<f64> {
        let filter = self.filter(q, b)?;
        let h = self.grid.step();
        let value = match self.criterion {
            Criterion::TotalDistance => {
                let sq: Vec<f64> = self
                    .reference
                    .iter()
                    .enumerate()
                    .map(|(i, &(sr, si))| {
                        let (ar, ai) = self.grid.transfer_at(&filter, i);
                        (ar - sr) * (ar - sr) + (ai - si) * (ai - si)
                    })
                    .collect();
                libm::sqrt(2.0 * simpson(&sq, h))
            }
            Criterion::GainDistance => {
                let sq: Vec<f64> = self
                    .reference_gain
                    .iter()
                    .enumerate()
                    .map(|(i, &gs)| {
                        let (ar, ai) = self.grid.transfer_at(&filter, i);
                        let d = libm::hypot(ar, ai) - gs;
                        d * d
                    })
                    .collect();
                libm::sqrt(2.0 * simpson(&sq, h))
            }
            Criterion::PhaseCos => {
                let t = self.grid.transfer_prefix(&filter, self.signal_len);
                let phase = unwrap_phase(&t);
                let vals: Vec<f64> = (0..self.signal_len)
                    .map(|i| {
                        let (ar, ai) = t[i];
                        let dphi = phase[i] - self.reference_phase[i];
                        libm::hypot(ar, ai) * self.reference_gain[i] * (1.0 - libm::cos(dphi))
                    })
                    .collect();
                libm::sqrt(2.0 * simpson(&vals, h))
            }
            Criterion::PhaseDelay => {
                let t = self.grid.transfer_prefix(&filter, self.signal_len);
                let phase = unwrap_phase(&t);
                let zero = -filter.moment(1);
                let omegas = self.grid.omegas();
                let vals: Vec<f64> = (0..self.signal_len)
                    .map(|i| libm::fabs(delay_from_phase(phase[i], omegas[i], zero)))
                    .collect();
                simpson(&vals, h) / self.signal_cutoff
            }
        };
        Ok(value)
    }
}

/// Criterion value for one `(m, q, b)` on the default grid.
pub fn objective(m: usize, q: usize, b: f64, criterion: Criterion) -> Result<f64> {
    BandwidthObjective::new(m, criterion)?.eval(q, b)
}

/// Scan-and-refine parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub step: f64,
    /// Upper end of the scan as a multiple of `m + 1`.
    pub upper_factor: f64,
    pub tolerance: f64,
    pub grid_size: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            step: 0.01,
            upper_factor: 3.0,
            tolerance: 1e-4,
            grid_size: DEFAULT_GRID_SIZE,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization on `[lo, hi]`; returns the best abscissa seen.
pub fn golden_section<F>(mut f: F, mut lo: f64, mut hi: f64, tolerance: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tolerance {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

/// Index of the scan point whose neighbourhood is refined.
fn select_bracket(values: &[f64]) -> usize {
    let n = values.len();
    let interior = (1..n.saturating_sub(1))
        .filter(|&i| values[i] < values[i - 1] && values[i] <= values[i + 1])
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    interior.unwrap_or_else(|| if values[n - 1] < values[0] { n - 1 } else { 0 })
}

/// Optimal bandwidth for a single reach `q`.
pub fn optimize_reach(
    objective: &BandwidthObjective,
    q: usize,
    config: &SearchConfig,
) -> Result<f64> {
    let m = objective.m() as f64;
    let upper = config.upper_factor * (m + 1.0);
    let count = libm::floor((upper - m) / config.step + 1e-9) as usize;
    let points: Vec<f64> = (1..=count).map(|k| m + k as f64 * config.step).collect();
    if points.len() < 3 {
        return Err(Error::FlatObjective { q });
    }
    let values = points
        .iter()
        .map(|&b| objective.eval(q, b))
        .collect::<Result<Vec<f64>>>()?;
    let (lo_v, hi_v) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let spread = hi_v - lo_v;
    if spread.is_nan() || spread <= f64::EPSILON * hi_v.abs().max(1.0) {
        return Err(Error::FlatObjective { q });
    }
    let best = select_bracket(&values);
    let lo = points[best.saturating_sub(1)];
    let hi = points[(best + 1).min(points.len() - 1)];
    let refined = golden_section(|b| objective.eval(q, b), lo, hi, config.tolerance)?;
    // keep the scan point if refinement did not improve on it
    if objective.eval(q, refined)? <= values[best] {
        Ok(refined)
    } else {
        Ok(points[best])
    }
}

pub fn optimize(m: usize, criterion: Criterion) -> Result<BandwidthSet> {
    optimize_with(m, criterion, &SearchConfig::default())
}

pub fn optimize_with(
    m: usize,
    criterion: Criterion,
    config: &SearchConfig,
) -> Result<BandwidthSet> {
    let objective =
        BandwidthObjective::with_grid(m, criterion, config.grid_size, Band::MONTHLY_SIGNAL)?;
    let values = (0..m)
        .map(|q| optimize_reach(&objective, q, config))
        .collect::<Result<Vec<f64>>>()?;
    BandwidthSet::new(m, criterion, values)
}

const TABLE_9: [[f64; 4]; 3] = [
    [6.47, 5.21, 4.90, 4.92],
    [8.00, 5.67, 4.87, 4.90],
    [4.01, 4.45, 5.97, 6.93],
];
const TABLE_13: [[f64; 6]; 3] = [
    [9.54, 7.88, 7.07, 6.88, 6.87, 6.94],
    [11.78, 9.24, 7.34, 6.85, 6.84, 6.95],
    [6.01, 6.01, 7.12, 8.44, 9.46, 10.39],
];
const TABLE_23: [[f64; 11]; 3] = [
    [
        17.32, 15.35, 13.53, 12.47, 12.05, 11.86, 11.77, 11.77, 11.82, 11.91, 11.98,
    ],
    [
        21.18, 18.40, 16.07, 13.89, 12.44, 11.90, 11.72, 11.73, 11.83, 11.92, 11.98,
    ],
    [
        11.01, 11.01, 11.01, 11.01, 11.41, 13.85, 15.13, 16.21, 17.21, 18.15, 19.05,
    ],
];

/// Published optimal bandwidths for the 9-, 13- and 23-term filters.
pub fn builtin_table(m: usize, criterion: Criterion) -> Result<BandwidthSet> {
    let row = match criterion {
        Criterion::TotalDistance => 0,
        Criterion::GainDistance => 1,
        Criterion::PhaseDelay => 2,
        Criterion::PhaseCos => {
            return Err(Error::NoBuiltinTable {
                m,
                criterion: criterion.as_str(),
            })
        }
    };
    let values: Vec<f64> = match m {
        4 => TABLE_9[row].to_vec(),
        6 => TABLE_13[row].to_vec(),
        11 => TABLE_23[row].to_vec(),
        _ => {
            return Err(Error::NoBuiltinTable {
                m,
                criterion: criterion.as_str(),
            })
        }
    };
    BandwidthSet::new(m, criterion, values)
}

/// Published table when available, otherwise a fresh optimization.
pub fn builtin_or_optimize(m: usize, criterion: Criterion) -> Result<BandwidthSet> {
    match builtin_table(m, criterion) {
        Err(Error::NoBuiltinTable { .. }) => optimize(m, criterion),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criterion_names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(Criterion::parse(c.as_str()), Some(c));
        }
        assert_eq!(Criterion::parse("nope"), None);
    }

    #[test]
    fn degenerate_reach_has_zero_distance() {
        for m in [4, 6] {
            let v = objective(m, m, m as f64 + 1.0, Criterion::TotalDistance).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn objective_rejects_inadmissible_bandwidth() {
        assert!(matches!(
            objective(6, 0, 6.0, Criterion::GainDistance),
            Err(Error::InadmissibleBandwidth { .. })
        ));
    }

    #[test]
    fn published_minimizers_beat_neighbours() {
        let g = BandwidthObjective::new(6, Criterion::GainDistance).unwrap();
        let at = g.eval(0, 11.78).unwrap();
        assert!(at < g.eval(0, 9.0).unwrap());
        assert!(at < g.eval(0, 14.0).unwrap());
        let t = BandwidthObjective::new(6, Criterion::TotalDistance).unwrap();
        let at = t.eval(0, 9.54).unwrap();
        assert!(at < t.eval(0, 8.54).unwrap());
        assert!(at < t.eval(0, 10.54).unwrap());
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let x = golden_section(|x| Ok((x - 1.234) * (x - 1.234)), 0.0, 3.0, 1e-8).unwrap();
        assert!((x - 1.234).abs() < 1e-7);
    }

    #[test]
    fn bracket_prefers_interior_minimum() {
        assert_eq!(select_bracket(&[0.0, 1.0, 0.5, 2.0]), 2);
        assert_eq!(select_bracket(&[3.0, 2.0, 1.0, 0.5]), 3);
        assert_eq!(select_bracket(&[0.1, 0.2, 0.3]), 0);
        assert_eq!(select_bracket(&[1.0, 0.2, 0.3, 0.1, 0.4]), 3);
    }

    #[test]
    fn builtin_rows() {
        let p = builtin_table(6, Criterion::PhaseDelay).unwrap();
        assert_eq!(p.values, [6.01, 6.01, 7.12, 8.44, 9.46, 10.39]);
        let t = builtin_table(4, Criterion::TotalDistance).unwrap();
        assert_eq!(t.values, [6.47, 5.21, 4.90, 4.92]);
        let p = builtin_table(11, Criterion::PhaseDelay).unwrap();
        assert!(p.values[..4].iter().all(|&b| b == 11.01));
        assert!(matches!(
            builtin_table(5, Criterion::GainDistance),
            Err(Error::NoBuiltinTable { m: 5, .. })
        ));
        assert!(builtin_table(6, Criterion::PhaseCos).is_err());
    }

    #[test]
    fn bandwidth_set_validates() {
        assert!(BandwidthSet::new(2, Criterion::GainDistance, alloc::vec![3.0]).is_err());
        assert!(BandwidthSet::new(2, Criterion::GainDistance, alloc::vec![3.0, 2.0]).is_err());
        assert!(BandwidthSet::new(2, Criterion::GainDistance, alloc::vec![3.0, 2.5]).is_ok());
    }

    #[test]
    fn short_filter_optimization_is_admissible() {
        let set = optimize(2, Criterion::GainDistance).unwrap();
        assert_eq!(set.values.len(), 2);
        assert!(set.values.iter().all(|&b| b > 2.0));
    }
}
