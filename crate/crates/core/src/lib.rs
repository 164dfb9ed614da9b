//! Multifractal detrended fluctuation analysis of daily financial returns.
//!
//! * [`ingest`] reads price CSVs and derives log and absolute returns.
//! * [`mfdfa`] estimates generalised Hurst exponents h(q), the singularity
//!   spectrum and the multifractal width Δh(q).
//! * [`rolling`] repeats the estimate over a sliding window and relates the
//!   resulting traces to dated events.
//! * [`synthetic`] generates white noise, fractional Gaussian noise and
//!   binomial cascades whose scaling is known in closed form.
//!
//! Independent work (scales within one estimate, windows within a rolling
//! run) is spread over a rayon pool when the `parallel` feature is enabled.
//! Output does not depend on the [`Execution`] mode.

pub mod exec;
pub mod ingest;
pub mod mfdfa;
pub mod rolling;
pub mod synthetic;

pub use exec::Execution;
pub use ingest::{
    parse_csv, to_abs_returns, to_log_returns, CsvFormatSpec, IngestError, PriceRecord,
    PriceSeries, ReturnKind, ReturnSeries,
};
pub use mfdfa::{
    analyze, analyze_with, Analysis, Estimator, HurstSpectrum, MfdfaConfig, MfdfaError,
};
pub use rolling::{
    annotate, event_delta, roll, EventDelta, EventMarker, RollError, RollingTrace, WindowSpec,
};
pub use synthetic::{GenerateError, GeneratorSpec};
