//! CSV ingestion of `date,value` series. Columns after the first two are
//! ignored, so command output such as `smooth` can be read back.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use thiserror::Error;
use trendcycle_core::series::{Frequency, Period, TimeSeries};

/// Ingestion failure. Rows are numbered from 1, not counting the header.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("expected header `date,value`, found `{0}`")]
    Header(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: malformed date `{text}` (expected YYYY-MM or YYYY-Qn)")]
    MalformedDate { row: usize, text: String },
    #[error("row {row}: `{date}` uses a different frequency than the first row")]
    MixedFrequency { row: usize, date: String },
    #[error("row {row}: value `{text}` is not a finite number")]
    Value { row: usize, text: String },
    #[error("row {row}: duplicate date {date}")]
    Duplicate { row: usize, date: Period },
    #[error("row {row}: gap in dates, expected {expected} but found {found}")]
    Gap {
        row: usize,
        expected: Period,
        found: Period,
    },
    #[error("row {row}: {found} is earlier than the previous date {previous}")]
    OutOfOrder {
        row: usize,
        previous: Period,
        found: Period,
    },
    #[error("no data rows")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("cannot open {path}")]
    Open {
        path: String,
        source: std::io::Error,
    },
}

/// Parses `YYYY-MM` (monthly) or `YYYY-Qn` (quarterly).
pub fn parse_period(text: &str) -> Option<Period> {
    let (year, rest) = text.trim().split_once('-')?;
    if year.len() != 4 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let year: i32 = year.parse().ok()?;
    if let Some(q) = rest.strip_prefix('Q').or_else(|| rest.strip_prefix('q')) {
        if q.len() != 1 {
            return None;
        }
        return Period::quarterly(year, q.parse().ok()?);
    }
    if rest.len() != 2 || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Period::monthly(year, rest.parse().ok()?)
}

pub fn read_series<R: Read>(reader: R, label: &str) -> Result<TimeSeries, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 || &header[0] != "date" || &header[1] != "value" {
        return Err(IngestError::Header(
            header.iter().collect::<Vec<_>>().join(","),
        ));
    }
    let mut start: Option<Period> = None;
    let mut previous: Option<Period> = None;
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != header.len() {
            return Err(IngestError::FieldCount {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        let date = parse_period(&record[0]).ok_or_else(|| IngestError::MalformedDate {
            row,
            text: record[0].to_string(),
        })?;
        let value: f64 = record[1]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| IngestError::Value {
                row,
                text: record[1].to_string(),
            })?;
        if let Some(prev) = previous {
            let step = prev
                .periods_until(date)
                .ok_or_else(|| IngestError::MixedFrequency {
                    row,
                    date: record[0].to_string(),
                })?;
            match step {
                1 => {}
                0 => return Err(IngestError::Duplicate { row, date }),
                s if s < 0 => {
                    return Err(IngestError::OutOfOrder {
                        row,
                        previous: prev,
                        found: date,
                    })
                }
                _ => {
                    return Err(IngestError::Gap {
                        row,
                        expected: prev.next(),
                        found: date,
                    })
                }
            }
        } else {
            start = Some(date);
        }
        previous = Some(date);
        values.push(value);
    }
    let start = start.ok_or(IngestError::Empty)?;
    Ok(TimeSeries::new(start, values, label).expect("values validated row by row"))
}

/// Reads a series from a file, labelled by the file stem.
pub fn read_series_path(path: &Path) -> Result<TimeSeries, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Open {
        path: path.display().to_string(),
        source,
    })?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_series(file, &label)
}

pub fn frequency_name(f: Frequency) -> &'static str {
    match f {
        Frequency::Monthly => "monthly",
        Frequency::Quarterly => "quarterly",
    }
}
