//! Rolling-window MFDFA: h(2) and Δh(5) re-estimated on a window advanced a
//! fixed number of observations per step, keyed to each window's last date.

use std::collections::BTreeSet;
use std::io::Write;
use std::ops::Range;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::ingest::{format_float, ReturnKind, ReturnSeries};
use crate::mfdfa::{Estimator, MfdfaConfig, MfdfaError};

pub const MIN_WINDOW_LEN: usize = 64;
/// Three years of 250 trading days.
pub const EXCHANGE_WINDOW_LEN: usize = 750;
/// Three years of 365 days, for continuously traded assets.
pub const CONTINUOUS_WINDOW_LEN: usize = 1095;
pub const DEFAULT_EVENT_HORIZON: usize = 250;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RollError {
    #[error("series has {n_obs} observations, shorter than the window of {window_len}")]
    SeriesShorterThanWindow { n_obs: usize, window_len: usize },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error(transparent)]
    Config(#[from] MfdfaError),
    #[error("fewer than one usable entry on a side of {date} within {horizon} entries")]
    InsufficientCoverage { date: NaiveDate, horizon: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub window_len: usize,
    pub step: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self::exchange_traded()
    }
}

impl WindowSpec {
    pub fn new(window_len: usize, step: usize) -> Result<Self, RollError> {
        let spec = Self { window_len, step };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exchange_traded() -> Self {
        Self {
            window_len: EXCHANGE_WINDOW_LEN,
            step: 1,
        }
    }

    pub fn continuous_trading() -> Self {
        Self {
            window_len: CONTINUOUS_WINDOW_LEN,
            step: 1,
        }
    }

    pub fn validate(&self) -> Result<(), RollError> {
        if self.window_len < MIN_WINDOW_LEN {
            return Err(RollError::InvalidWindow(format!(
                "window length {} below minimum {MIN_WINDOW_LEN}",
                self.window_len
            )));
        }
        if self.step == 0 {
            return Err(RollError::InvalidWindow("step must be at least 1".into()));
        }
        Ok(())
    }

    /// floor((n_obs - window_len) / step) + 1, or 0 for a short series.
    pub fn window_count(&self, n_obs: usize) -> usize {
        if n_obs < self.window_len {
            0
        } else {
            (n_obs - self.window_len) / self.step + 1
        }
    }

    /// Observation indices covered by window `k`.
    pub fn window_range(&self, k: usize) -> Range<usize> {
        let start = k * self.step;
        start..start + self.window_len
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventMarker {
    pub date: NaiveDate,
    pub label: String,
}

impl EventMarker {
    pub fn new(date: NaiveDate, label: impl Into<String>) -> Self {
        Self {
            date,
            label: label.into(),
        }
    }
}

/// Pandemic declaration, Chinese stimulus package, tariff implementation.
pub fn default_events() -> Vec<EventMarker> {
    let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day).expect("valid date");
    vec![
        EventMarker::new(
            d(2020, 3, 11),
            "declaration of the COVID-19 pandemic (March 11, 2020)",
        ),
        EventMarker::new(
            d(2024, 9, 24),
            "comprehensive economic stimulus package (September 24, 2024)",
        ),
        EventMarker::new(
            d(2025, 4, 2),
            "implementation of Trump-era tariffs (April 2, 2025)",
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedEvent {
    #[serde(flatten)]
    pub marker: EventMarker,
    /// False when the date lies outside the trace's first..=last entry dates.
    pub in_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Date of the window's last observation.
    pub date: NaiveDate,
    pub h2: f64,
    pub dh5: f64,
    pub r2_q2: f64,
    pub zero_segments: usize,
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingTrace {
    pub asset: String,
    pub kind: ReturnKind,
    pub window: WindowSpec,
    pub config: MfdfaConfig,
    pub entries: Vec<TraceEntry>,
    pub events: Vec<AnnotatedEvent>,
}

/// Runs MFDFA on every window. A window that fails numerically becomes a
/// flagged entry; configuration problems abort before any window is run.
pub fn roll(
    returns: &ReturnSeries,
    spec: WindowSpec,
    config: &MfdfaConfig,
    exec: Execution,
) -> Result<RollingTrace, RollError> {
    spec.validate()?;
    let n_obs = returns.len();
    if n_obs < spec.window_len {
        return Err(RollError::SeriesShorterThanWindow {
            n_obs,
            window_len: spec.window_len,
        });
    }
    let estimator = Estimator::new(config, spec.window_len)?;

    let values = returns.values();
    let dates = returns.dates();
    let entries = exec.map_range(spec.window_count(n_obs), |k| {
        let range = spec.window_range(k);
        let date = dates[range.end - 1];
        match estimator.run(&values[range], Execution::Sequential) {
            Ok(a) => {
                let q2 = a.spectrum.q_index(2.0);
                TraceEntry {
                    date,
                    h2: a.h2(),
                    dh5: a.dh(5.0).unwrap_or(f64::NAN),
                    r2_q2: q2.map_or(f64::NAN, |i| a.spectrum.r_squared[i]),
                    zero_segments: a.surface.total_zero_segments(),
                    failed: false,
                    error: None,
                }
            }
            Err(e) => TraceEntry {
                date,
                h2: f64::NAN,
                dh5: f64::NAN,
                r2_q2: f64::NAN,
                zero_segments: 0,
                failed: true,
                error: Some(e.to_string()),
            },
        }
    });

    Ok(RollingTrace {
        asset: returns.asset.clone(),
        kind: returns.kind,
        window: spec,
        config: config.clone(),
        entries,
        events: Vec::new(),
    })
}

impl RollingTrace {
    pub fn date_span(&self) -> Option<(NaiveDate, NaiveDate)> {
        Some((self.entries.first()?.date, self.entries.last()?.date))
    }

    /// Columns `date,h2,dh5,r2_q2,zero_segments,failed`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "date,h2,dh5,r2_q2,zero_segments,failed")?;
        for e in &self.entries {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                e.date.format("%Y-%m-%d"),
                format_float(e.h2),
                format_float(e.dh5),
                format_float(e.r2_q2),
                e.zero_segments,
                e.failed
            )?;
        }
        Ok(())
    }

    /// Two whitespace-separated columns, `date value`; failed windows are skipped.
    pub fn write_plot_series<W: Write>(&self, mut w: W, metric: Metric) -> std::io::Result<()> {
        writeln!(w, "# date {}", metric.name())?;
        for e in self.entries.iter().filter(|e| !e.failed) {
            writeln!(
                w,
                "{} {}",
                e.date.format("%Y-%m-%d"),
                format_float(metric.of(e))
            )?;
        }
        Ok(())
    }

    /// One line per event: `date in_range label`.
    pub fn write_plot_events<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# date in_range label")?;
        for e in &self.events {
            writeln!(
                w,
                "{} {} {}",
                e.marker.date.format("%Y-%m-%d"),
                e.in_range,
                e.marker.label
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    H2,
    Dh5,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::H2 => "h2",
            Metric::Dh5 => "dh5",
        }
    }

    fn of(self, e: &TraceEntry) -> f64 {
        match self {
            Metric::H2 => e.h2,
            Metric::Dh5 => e.dh5,
        }
    }
}

/// Adds event markers (the built-in dates first when `include_defaults`).
/// Identical (date, label) pairs are stored once; events outside the trace's
/// date span are kept with `in_range = false`.
pub fn annotate(
    mut trace: RollingTrace,
    events: &[EventMarker],
    include_defaults: bool,
) -> RollingTrace {
    let span = trace.date_span();
    let mut seen: BTreeSet<EventMarker> = trace.events.iter().map(|e| e.marker.clone()).collect();
    let defaults = if include_defaults {
        default_events()
    } else {
        Vec::new()
    };
    for marker in defaults.into_iter().chain(events.iter().cloned()) {
        if seen.insert(marker.clone()) {
            let in_range = span.is_some_and(|(a, b)| marker.date >= a && marker.date <= b);
            trace.events.push(AnnotatedEvent { marker, in_range });
        }
    }
    trace
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub mean_before: f64,
    pub mean_after: f64,
    /// after - before
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDelta {
    pub event: EventMarker,
    pub horizon: usize,
    pub h2: MetricDelta,
    pub dh5: MetricDelta,
}

/// Mean of each metric over the `horizon` entries strictly before the event
/// against the `horizon` entries at or after it. Failed entries are left out
/// of the means. Descriptive only.
pub fn event_delta(
    trace: &RollingTrace,
    event: &EventMarker,
    horizon: usize,
) -> Result<EventDelta, RollError> {
    let insufficient = || RollError::InsufficientCoverage {
        date: event.date,
        horizon,
    };
    if horizon == 0 {
        return Err(insufficient());
    }
    let split = trace.entries.partition_point(|e| e.date < event.date);
    let before = &trace.entries[split.saturating_sub(horizon)..split];
    let after = &trace.entries[split..(split + horizon).min(trace.entries.len())];

    let mean = |side: &[TraceEntry], m: Metric| {
        let vals: Vec<f64> = side
            .iter()
            .filter(|e| !e.failed && m.of(e).is_finite())
            .map(|e| m.of(e))
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let delta = |m: Metric| -> Result<MetricDelta, RollError> {
        let b = mean(before, m).ok_or_else(insufficient)?;
        let a = mean(after, m).ok_or_else(insufficient)?;
        Ok(MetricDelta {
            mean_before: b,
            mean_after: a,
            delta: a - b,
        })
    };
    Ok(EventDelta {
        event: event.clone(),
        horizon,
        h2: delta(Metric::H2)?,
        dh5: delta(Metric::Dh5)?,
    })
}
