//! Time series, filter banks and the smoothing engine.
//!
//! A [`FilterBank`] holds the symmetric filter of half-length `m` and the
//! asymmetric filters `q = 0..m-1`. Smoothing applies the symmetric filter
//! wherever `m` observations exist on both sides, the asymmetric filter with
//! `q` future points at the end of the sample and the time-reversed
//! asymmetric filters at its start.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bandwidth::{BandwidthSet, Criterion};
use crate::filters::{self, dot, FilterWeights};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frequency {
    Monthly,
    Quarterly,
}

impl Frequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Monthly => 12,
            Frequency::Quarterly => 4,
        }
    }
}

/// A calendar period: `(year, subperiod)` with a 1-based subperiod.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Period {
    pub year: i32,
    pub sub: u32,
    pub frequency: Frequency,
}

impl Period {
    /// Returns `None` for an out-of-range subperiod.
    pub fn new(year: i32, sub: u32, frequency: Frequency) -> Option<Self> {
        (1..=frequency.periods_per_year())
            .contains(&sub)
            .then_some(Period {
                year,
                sub,
                frequency,
            })
    }

    pub fn monthly(year: i32, month: u32) -> Option<Self> {
        Self::new(year, month, Frequency::Monthly)
    }

    pub fn quarterly(year: i32, quarter: u32) -> Option<Self> {
        Self::new(year, quarter, Frequency::Quarterly)
    }

    fn ordinal(self) -> i64 {
        i64::from(self.year) * i64::from(self.frequency.periods_per_year())
            + i64::from(self.sub - 1)
    }

    pub fn offset(self, k: i64) -> Self {
        let per = i64::from(self.frequency.periods_per_year());
        let ord = self.ordinal() + k;
        Period {
            year: ord.div_euclid(per) as i32,
            sub: ord.rem_euclid(per) as u32 + 1,
            frequency: self.frequency,
        }
    }

    pub fn next(self) -> Self {
        self.offset(1)
    }

    /// Number of periods from `self` to `later`; `None` across frequencies.
    pub fn periods_until(self, later: Period) -> Option<i64> {
        (self.frequency == later.frequency).then(|| later.ordinal() - self.ordinal())
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frequency {
            Frequency::Monthly => write!(f, "{:04}-{:02}", self.year, self.sub),
            Frequency::Quarterly => write!(f, "{:04}-Q{}", self.year, self.sub),
        }
    }
}

/// Equally spaced, gap-free observations.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: Period,
    values: Vec<f64>,
    label: String,
}

impl TimeSeries {
    pub fn new(start: Period, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { len: 0, min: 1 });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue(i));
        }
        Ok(TimeSeries {
            start,
            values,
            label: label.into(),
        })
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn frequency(&self) -> Frequency {
        self.start.frequency
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date(&self, index: usize) -> Period {
        self.start.offset(index as i64)
    }

    pub fn index_of(&self, date: Period) -> Option<usize> {
        let k = self.start.periods_until(date)?;
        (k >= 0 && (k as usize) < self.len()).then_some(k as usize)
    }

    /// First `len` observations.
    pub fn truncated(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.len() {
            return Err(Error::IndexOutOfRange {
                index: len,
                len: self.len(),
            });
        }
        Ok(TimeSeries {
            start: self.start,
            values: self.values[..len].to_vec(),
            label: self.label.clone(),
        })
    }
}

/// Which filters a bank was built from.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Symmetric RKHS filter with `b = m + 1`, asymmetric filters with the
    /// given local bandwidths.
    Rkhs(BandwidthSet),
    /// Exact Henderson filter with Musgrave boundary filters.
    Musgrave { ic_ratio: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Rkhs(_) => "rkhs",
            Family::Musgrave { .. } => "musgrave",
        }
    }

    pub fn criterion(&self) -> Option<Criterion> {
        match self {
            Family::Rkhs(set) => Some(set.criterion),
            Family::Musgrave { .. } => None,
        }
    }
}

/// Symmetric filter plus its `m` asymmetric boundary filters.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    m: usize,
    family: Family,
    symmetric: FilterWeights,
    asymmetric: Vec<FilterWeights>,
}

impl FilterBank {
    pub fn new(m: usize, family: Family) -> Result<Self> {
        let (symmetric, asymmetric) = match &family {
            Family::Rkhs(set) => {
                if set.m != m {
                    return Err(Error::HalfLengthMismatch {
                        left: m,
                        right: set.m,
                    });
                }
                let sym = filters::rkhs_symmetric(m, m as f64 + 1.0)?;
                let asym = (0..m)
                    .map(|q| filters::rkhs_asymmetric(m, q, set.values[q]))
                    .collect::<Result<Vec<_>>>()?;
                (sym, asym)
            }
            Family::Musgrave { ic_ratio } => {
                let sym = filters::henderson_exact(m)?;
                let asym = (0..m)
                    .map(|q| filters::musgrave(m, q, *ic_ratio))
                    .collect::<Result<Vec<_>>>()?;
                (sym, asym)
            }
        };
        Ok(FilterBank {
            m,
            family,
            symmetric,
            asymmetric,
        })
    }

    pub fn rkhs(bandwidths: BandwidthSet) -> Result<Self> {
        Self::new(bandwidths.m, Family::Rkhs(bandwidths))
    }

    pub fn musgrave(m: usize, ic_ratio: f64) -> Result<Self> {
        Self::new(m, Family::Musgrave { ic_ratio })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn symmetric(&self) -> &FilterWeights {
        &self.symmetric
    }

    /// Asymmetric filter with `q` future points, `q < m`.
    pub fn asymmetric(&self, q: usize) -> Option<&FilterWeights> {
        self.asymmetric.get(q)
    }

    pub fn asymmetric_filters(&self) -> &[FilterWeights] {
        &self.asymmetric
    }

    pub fn min_length(&self) -> usize {
        2 * self.m + 1
    }

    /// Estimate at `t` using only `values`, choosing the filter by position.
    pub fn estimate_at(&self, values: &[f64], t: usize) -> (f64, Provenance) {
        let n = values.len();
        let m = self.m;
        let ahead = n - 1 - t;
        if t >= m && ahead >= m {
            let v = dot(self.symmetric.weights(), &values[t - m..=t + m]);
            (v, Provenance::SymmetricInterior)
        } else if ahead < m {
            let filter = &self.asymmetric[ahead];
            (
                dot(filter.weights(), &values[t - m..=t + ahead]),
                Provenance::Asymmetric(ahead),
            )
        } else {
            // mirrored: offsets -t..=m, weight for offset j is w_{q,-j}
            let filter = &self.asymmetric[t];
            let v = filter
                .weights()
                .iter()
                .rev()
                .zip(&values[..=t + m])
                .map(|(w, y)| w * y)
                .sum();
            (v, Provenance::ReflectedAsymmetric(t))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    SymmetricInterior,
    /// End of sample, `q` future observations.
    Asymmetric(usize),
    /// Start of sample, `q` past observations.
    ReflectedAsymmetric(usize),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::SymmetricInterior => f.write_str("symmetric"),
            Provenance::Asymmetric(q) => write!(f, "asymmetric_q{q}"),
            Provenance::ReflectedAsymmetric(q) => write!(f, "reflected_q{q}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendEstimate {
    pub values: Vec<f64>,
    pub provenance: Vec<Provenance>,
    pub m: usize,
    pub family: Family,
}

impl TrendEstimate {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Trend estimate for raw values.
pub fn smooth_values(values: &[f64], bank: &FilterBank) -> Result<TrendEstimate> {
    let min = bank.min_length();
    if values.len() < min {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min,
        });
    }
    let (values_out, provenance) = (0..values.len())
        .map(|t| bank.estimate_at(values, t))
        .unzip();
    Ok(TrendEstimate {
        values: values_out,
        provenance,
        m: bank.m(),
        family: bank.family().clone(),
    })
}

pub fn smooth(series: &TimeSeries, bank: &FilterBank) -> Result<TrendEstimate> {
    smooth_values(series.values(), bank)
}

/// Trend estimates of every truncation `series[..len]` for
/// `len = from_len..=N`.
pub fn vintages(
    series: &TimeSeries,
    from_len: usize,
    bank: &FilterBank,
) -> Result<Vec<TrendEstimate>> {
    vintages_values(series.values(), from_len, bank)
}

pub fn vintages_values(
    values: &[f64],
    from_len: usize,
    bank: &FilterBank,
) -> Result<Vec<TrendEstimate>> {
    let min = bank.min_length();
    if from_len < min {
        return Err(Error::SeriesTooShort { len: from_len, min });
    }
    if from_len > values.len() {
        return Err(Error::IndexOutOfRange {
            index: from_len,
            len: values.len(),
        });
    }
    (from_len..=values.len())
        .map(|len| smooth_values(&values[..len], bank))
        .collect()
}

/// Minimum length accepted by [`ic_ratio`].
pub const IC_MIN_LENGTH: usize = 27;

/// Noise-to-signal ratio: mean absolute change of the irregular over mean
/// absolute change of a preliminary 13-term Henderson trend, both on the
/// interior points.
pub fn ic_ratio(values: &[f64]) -> Result<f64> {
    if values.len() < IC_MIN_LENGTH {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            min: IC_MIN_LENGTH,
        });
    }
    let h = filters::henderson_exact(6)?;
    let interior = 6..values.len() - 6;
    let trend: Vec<f64> = interior
        .clone()
        .map(|t| dot(h.weights(), &values[t - 6..=t + 6]))
        .collect();
    let irregular: Vec<f64> = interior.zip(&trend).map(|(t, c)| values[t] - c).collect();
    let mean_abs_change = |x: &[f64]| {
        x.windows(2).map(|w| libm::fabs(w[1] - w[0])).sum::<f64>() / (x.len() - 1) as f64
    };
    let c = mean_abs_change(&trend);
    let scale = values.iter().map(|v| libm::fabs(*v)).sum::<f64>() / values.len() as f64;
    if c.is_nan() || c <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateRatio);
    }
    Ok(mean_abs_change(&irregular) / c)
}

/// Filter half-length for an I/C ratio: 9, 13 or 23 terms.
pub fn select_length(ic: f64) -> usize {
    if ic < 1.0 {
        4
    } else if ic < 3.5 {
        6
    } else {
        11
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandwidth::builtin_table;
    use alloc::vec;

    fn rkhs_bank(m: usize) -> FilterBank {
        FilterBank::rkhs(builtin_table(m, Criterion::GainDistance).unwrap()).unwrap()
    }

    #[test]
    fn period_arithmetic_and_display() {
        let p = Period::monthly(1992, 11).unwrap();
        assert_eq!(p.offset(2), Period::monthly(1993, 1).unwrap());
        assert_eq!(p.offset(-11), Period::monthly(1991, 12).unwrap());
        assert_eq!(alloc::format!("{p}"), "1992-11");
        let q = Period::quarterly(2009, 4).unwrap();
        assert_eq!(alloc::format!("{}", q.next()), "2010-Q1");
        assert_eq!(p.periods_until(p.offset(40)), Some(40));
        assert_eq!(p.periods_until(q), None);
        assert!(Period::monthly(2000, 13).is_none());
        assert!(Period::quarterly(2000, 0).is_none());
    }

    #[test]
    fn series_validation() {
        let start = Period::monthly(2000, 1).unwrap();
        assert!(TimeSeries::new(start, vec![], "x").is_err());
        assert_eq!(
            TimeSeries::new(start, vec![1.0, f64::NAN], "x"),
            Err(Error::NonFiniteValue(1))
        );
        let s = TimeSeries::new(start, vec![1.0, 2.0, 3.0], "x").unwrap();
        assert_eq!(s.index_of(Period::monthly(2000, 3).unwrap()), Some(2));
        assert_eq!(s.index_of(Period::monthly(2000, 4).unwrap()), None);
        assert_eq!(s.truncated(2).unwrap().values(), &[1.0, 2.0]);
    }

    #[test]
    fn constant_series_is_preserved() {
        let y = vec![5.5; 40];
        for bank in [rkhs_bank(6), FilterBank::musgrave(6, 3.5).unwrap()] {
            let e = smooth_values(&y, &bank).unwrap();
            for v in &e.values {
                assert!((v - 5.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn musgrave_family_reproduces_lines_in_interior() {
        let y: Vec<f64> = (0..40).map(|t| 2.0 + 0.7 * t as f64).collect();
        let bank = FilterBank::musgrave(6, 3.5).unwrap();
        let e = smooth_values(&y, &bank).unwrap();
        for (t, &yt) in y.iter().enumerate().take(34).skip(6) {
            assert_eq!(e.provenance[t], Provenance::SymmetricInterior);
            assert!((e.values[t] - yt).abs() < 1e-10);
        }
    }

    #[test]
    fn provenance_layout() {
        let y: Vec<f64> = (0..20).map(|t| t as f64).collect();
        let e = smooth_values(&y, &rkhs_bank(4)).unwrap();
        assert_eq!(e.provenance[0], Provenance::ReflectedAsymmetric(0));
        assert_eq!(e.provenance[3], Provenance::ReflectedAsymmetric(3));
        assert_eq!(e.provenance[4], Provenance::SymmetricInterior);
        assert_eq!(e.provenance[15], Provenance::SymmetricInterior);
        assert_eq!(e.provenance[16], Provenance::Asymmetric(3));
        assert_eq!(e.provenance[19], Provenance::Asymmetric(0));
    }

    #[test]
    fn reflected_filters_mirror_the_end() {
        // smoothing a reversed series swaps the two boundaries
        let y: Vec<f64> = (0..25)
            .map(|t| libm::sin(t as f64 * 0.7) + 0.1 * t as f64)
            .collect();
        let rev: Vec<f64> = y.iter().rev().copied().collect();
        let bank = rkhs_bank(4);
        let a = smooth_values(&y, &bank).unwrap();
        let b = smooth_values(&rev, &bank).unwrap();
        for t in 0..25 {
            assert!((a.values[t] - b.values[24 - t]).abs() < 1e-12);
        }
    }

    #[test]
    fn too_short_series() {
        let bank = rkhs_bank(6);
        assert_eq!(
            smooth_values(&[1.0; 12], &bank),
            Err(Error::SeriesTooShort { len: 12, min: 13 })
        );
        assert!(smooth_values(&[1.0; 13], &bank).is_ok());
    }

    #[test]
    fn vintages_cover_requested_lengths() {
        let y: Vec<f64> = (0..30).map(|t| libm::cos(t as f64 / 3.0)).collect();
        let bank = FilterBank::musgrave(4, 1.0).unwrap();
        let v = vintages_values(&y, 9, &bank).unwrap();
        assert_eq!(v.len(), 22);
        assert_eq!(v.last().unwrap(), &smooth_values(&y, &bank).unwrap());
        for est in &v {
            assert_eq!(*est.provenance.last().unwrap(), Provenance::Asymmetric(0));
        }
        // a date is final once m observations follow it
        let t = 12;
        let finals: Vec<f64> = v
            .iter()
            .filter(|e| e.len() > t + 4)
            .map(|e| e.values[t])
            .collect();
        assert!(finals.windows(2).all(|w| w[0] == w[1]));
        assert!(vintages_values(&y, 8, &bank).is_err());
        assert!(vintages_values(&y, 31, &bank).is_err());
    }

    #[test]
    fn ic_ratio_of_cubic_is_zero() {
        let y: Vec<f64> = (0..40).map(|t| (t as f64 - 20.0).powi(3)).collect();
        let r = ic_ratio(&y).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn ic_ratio_errors() {
        assert_eq!(
            ic_ratio(&[1.0; 26]),
            Err(Error::SeriesTooShort { len: 26, min: 27 })
        );
        assert_eq!(ic_ratio(&[3.0; 40]), Err(Error::DegenerateRatio));
    }

    #[test]
    fn length_selection() {
        assert_eq!(select_length(0.0), 4);
        assert_eq!(select_length(0.20), 4);
        assert_eq!(select_length(0.999), 4);
        assert_eq!(select_length(1.0), 6);
        assert_eq!(select_length(1.98), 6);
        assert_eq!(select_length(3.5), 11);
    }

    #[test]
    fn bank_rejects_mismatched_bandwidths() {
        let set = builtin_table(4, Criterion::GainDistance).unwrap();
        assert!(matches!(
            FilterBank::new(6, Family::Rkhs(set)),
            Err(Error::HalfLengthMismatch { .. })
        ));
    }
}
