//! Daily price CSV ingestion and return derivation.
//!
//! Provider exports differ in column names, date layout and number
//! formatting, so parsing is driven by a [`CsvFormatSpec`]. Two presets are
//! built in: `iso` (`Date,Close` with `YYYY-MM-DD`) and `investing`
//! (`Date,Price` with `MM/DD/YYYY`, comma thousands separators, newest row
//! first).

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("duplicate date {date} (rows {first_row} and {second_row})")]
    DuplicateDate {
        date: NaiveDate,
        first_row: usize,
        second_row: usize,
    },
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("series has {0} records, at least 2 are required")]
    TooShort(usize),
    #[error("series already holds absolute returns")]
    WrongKind,
    #[error("dates are not strictly increasing at position {0}")]
    Unordered(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Column layout and number formatting of a price CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvFormatSpec {
    pub date_column: String,
    pub price_column: String,
    /// `chrono` format string, e.g. `%Y-%m-%d` or `%m/%d/%Y`.
    pub date_pattern: String,
    pub decimal_separator: char,
    pub thousands_separator: Option<char>,
    /// Drop unparseable rows instead of failing.
    #[serde(default)]
    pub skip_bad_rows: bool,
}

impl CsvFormatSpec {
    pub fn iso() -> Self {
        Self {
            date_column: "Date".into(),
            price_column: "Close".into(),
            date_pattern: "%Y-%m-%d".into(),
            decimal_separator: '.',
            thousands_separator: None,
            skip_bad_rows: false,
        }
    }

    pub fn investing() -> Self {
        Self {
            date_column: "Date".into(),
            price_column: "Price".into(),
            date_pattern: "%m/%d/%Y".into(),
            decimal_separator: '.',
            thousands_separator: Some(','),
            skip_bad_rows: false,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "iso" => Some(Self::iso()),
            "investing" => Some(Self::investing()),
            _ => None,
        }
    }

    fn parse_price(&self, raw: &str) -> Result<f64, String> {
        let mut cleaned = String::with_capacity(raw.len());
        for c in raw.trim().chars() {
            if Some(c) == self.thousands_separator {
                continue;
            }
            if c == self.decimal_separator {
                cleaned.push('.');
            } else {
                cleaned.push(c);
            }
        }
        let value: f64 = cleaned
            .parse()
            .map_err(|_| format!("unparseable price `{}`", raw.trim()))?;
        if !value.is_finite() || value <= 0.0 {
            return Err(format!("price `{}` is not strictly positive", raw.trim()));
        }
        Ok(value)
    }
}

impl Default for CsvFormatSpec {
    fn default() -> Self {
        Self::iso()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub date: NaiveDate,
    pub close: f64,
}

/// Chronologically ordered closing prices of one asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub asset: String,
    records: Vec<PriceRecord>,
}

impl PriceSeries {
    /// Builds a series from records in any order. Rejects duplicate dates and
    /// non-positive closes.
    pub fn new(
        asset: impl Into<String>,
        mut records: Vec<PriceRecord>,
    ) -> Result<Self, IngestError> {
        for (i, r) in records.iter().enumerate() {
            if !(r.close.is_finite() && r.close > 0.0) {
                return Err(IngestError::BadRow {
                    row: i + 1,
                    reason: format!("price `{}` is not strictly positive", r.close),
                });
            }
        }
        records.sort_by_key(|r| r.date);
        if let Some(i) = records.windows(2).position(|w| w[0].date == w[1].date) {
            return Err(IngestError::DuplicateDate {
                date: records[i].date,
                first_row: i + 1,
                second_row: i + 2,
            });
        }
        Ok(Self {
            asset: asset.into(),
            records,
        })
    }

    pub fn records(&self) -> &[PriceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes `Date,Close` with ISO dates, readable back with [`CsvFormatSpec::iso`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["Date", "Close"])?;
        for r in &self.records {
            w.write_record([r.date.format("%Y-%m-%d").to_string(), format_float(r.close)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Parses a price CSV. Output is sorted ascending by date whatever the input order.
pub fn parse_csv<R: Read>(
    raw: R,
    format: &CsvFormatSpec,
    asset: impl Into<String>,
) -> Result<PriceSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(raw);
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').trim() == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let date_idx = find(&format.date_column)?;
    let price_idx = find(&format.price_column)?;

    // (date, close, 1-based data row number)
    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let row = i + 1;
        let parsed = result.map_err(|e| e.to_string()).and_then(|rec| {
            let date_raw = rec.get(date_idx).ok_or("missing date field")?;
            let price_raw = rec.get(price_idx).ok_or("missing price field")?;
            let date = NaiveDate::parse_from_str(date_raw, &format.date_pattern)
                .map_err(|_| format!("unparseable date `{date_raw}`"))?;
            let close = format.parse_price(price_raw)?;
            Ok((date, close))
        });
        match parsed {
            Ok((date, close)) => rows.push((date, close, row)),
            Err(_) if format.skip_bad_rows => continue,
            Err(reason) => return Err(IngestError::BadRow { row, reason }),
        }
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        let (a, b) = (w[0].2.min(w[1].2), w[0].2.max(w[1].2));
        return Err(IngestError::DuplicateDate {
            date: w[0].0,
            first_row: a,
            second_row: b,
        });
    }
    Ok(PriceSeries {
        asset: asset.into(),
        records: rows
            .into_iter()
            .map(|(date, close, _)| PriceRecord { date, close })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnKind {
    LogReturn,
    AbsReturn,
}

/// Date-aligned returns; each value is keyed to the later of its two prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub asset: String,
    pub kind: ReturnKind,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(
        asset: impl Into<String>,
        kind: ReturnKind,
        dates: Vec<NaiveDate>,
        values: Vec<f64>,
    ) -> Result<Self, IngestError> {
        if dates.len() != values.len() {
            return Err(IngestError::BadRow {
                row: dates.len().min(values.len()) + 1,
                reason: "date and value counts differ".into(),
            });
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(IngestError::Unordered(i + 1));
        }
        if kind == ReturnKind::AbsReturn {
            if let Some(i) = values.iter().position(|v| v.is_nan() || *v < 0.0) {
                return Err(IngestError::BadRow {
                    row: i + 1,
                    reason: "absolute return is negative".into(),
                });
            }
        }
        Ok(Self {
            asset: asset.into(),
            kind,
            dates,
            values,
        })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `date,value` CSV with ISO dates and shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), IngestError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "value"])?;
        for (d, v) in self.dates.iter().zip(&self.values) {
            w.write_record([d.format("%Y-%m-%d").to_string(), format_float(*v)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the `date,value` format written by [`ReturnSeries::write_csv`].
    pub fn read_csv<R: Read>(
        raw: R,
        asset: impl Into<String>,
        kind: ReturnKind,
    ) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(raw);
        let headers = reader.headers()?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
        };
        let (di, vi) = (find("date")?, find("value")?);
        let mut dates = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| IngestError::BadRow {
                row,
                reason: e.to_string(),
            })?;
            let d = rec.get(di).unwrap_or_default();
            let v = rec.get(vi).unwrap_or_default();
            dates.push(NaiveDate::parse_from_str(d, "%Y-%m-%d").map_err(|_| {
                IngestError::BadRow {
                    row,
                    reason: format!("unparseable date `{d}`"),
                }
            })?);
            let value: f64 = v.parse().map_err(|_| IngestError::BadRow {
                row,
                reason: format!("unparseable value `{v}`"),
            })?;
            if !value.is_finite() {
                return Err(IngestError::BadRow {
                    row,
                    reason: format!("non-finite value `{v}`"),
                });
            }
            values.push(value);
        }
        if values.is_empty() {
            return Err(IngestError::EmptyInput);
        }
        Self::new(asset, kind, dates, values)
    }
}

/// r(t) = ln(P(t) / P(t-1)), dated at the later record.
pub fn to_log_returns(prices: &PriceSeries) -> Result<ReturnSeries, IngestError> {
    if prices.len() < 2 {
        return Err(IngestError::TooShort(prices.len()));
    }
    let recs = prices.records();
    let values = recs
        .windows(2)
        .map(|w| (w[1].close / w[0].close).ln())
        .collect();
    let dates = recs[1..].iter().map(|r| r.date).collect();
    Ok(ReturnSeries {
        asset: prices.asset.clone(),
        kind: ReturnKind::LogReturn,
        dates,
        values,
    })
}

pub fn to_abs_returns(returns: &ReturnSeries) -> Result<ReturnSeries, IngestError> {
    if returns.kind != ReturnKind::LogReturn {
        return Err(IngestError::WrongKind);
    }
    Ok(ReturnSeries {
        asset: returns.asset.clone(),
        kind: ReturnKind::AbsReturn,
        dates: returns.dates.clone(),
        values: returns.values.iter().map(|v| v.abs()).collect(),
    })
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        "NaN".to_string()
    }
}
