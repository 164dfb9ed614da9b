//! Multifractal detrended fluctuation analysis.
//!
//! The pipeline runs profile → per-scale segment variances → fluctuation
//! function F_q(s) → log-log slopes h(q) → singularity spectrum and Δh(q).
//! [`analyze`] wires the stages together; each stage is also exposed on its
//! own.

mod detrend;
mod fluctuation;
mod profile;
mod spectrum;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;

pub use detrend::{segment_variances, Detrender};
pub use fluctuation::{fluctuation_function, FluctuationSurface, ScaleVariances};
pub use profile::{build_profile, zero_threshold, Profile};
pub use spectrum::{
    estimate_hq, multifractal_width, ols, singularity_spectrum, HurstSpectrum, LineFit, WidthPoint,
    MIN_FIT_SCALES,
};

pub const DEFAULT_POLY_ORDER: usize = 3;
pub const DEFAULT_MIN_SCALE: usize = 16;
pub const DEFAULT_SCALE_COUNT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfdfaError {
    #[error("series has {0} observations, at least 2 are required")]
    TooShort(usize),
    #[error("series contains non-finite values")]
    NonFiniteInput,
    #[error("scale {scale} leaves no full segment in a series of length {len}")]
    ScaleTooLarge { scale: usize, len: usize },
    #[error("scale {scale} is too small for a polynomial fit of order {poly_order}")]
    DegenerateFit { scale: usize, poly_order: usize },
    #[error("all segments at scale {scale} have zero detrended variance")]
    AllSegmentsZero { scale: usize },
    #[error("{found} scales in the fit range, at least {required} required")]
    TooFewScales { found: usize, required: usize },
    #[error("fluctuation function is not positive at q = {q}, s = {scale}")]
    NonPositiveFluctuation { q: f64, scale: usize },
    #[error("fluctuation function decreases in q at s = {scale}, q = {q}")]
    NonMonotoneSurface { scale: usize, q: f64 },
    #[error("estimated exponents are not finite")]
    NonFiniteResult,
    #[error("q = {0} and its negative are not both on the grid")]
    QNotOnGrid(f64),
    #[error("q grid has {0} points, at least 3 are required")]
    GridTooSparse(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl MfdfaError {
    pub fn name(&self) -> &'static str {
        match self {
            MfdfaError::TooShort(_) => "TooShort",
            MfdfaError::NonFiniteInput => "NonFiniteInput",
            MfdfaError::ScaleTooLarge { .. } => "ScaleTooLarge",
            MfdfaError::DegenerateFit { .. } => "DegenerateFit",
            MfdfaError::AllSegmentsZero { .. } => "AllSegmentsZero",
            MfdfaError::TooFewScales { .. } => "TooFewScales",
            MfdfaError::NonPositiveFluctuation { .. } => "NonPositiveFluctuation",
            MfdfaError::NonMonotoneSurface { .. } => "NonMonotoneSurface",
            MfdfaError::NonFiniteResult => "NonFiniteResult",
            MfdfaError::QNotOnGrid(_) => "QNotOnGrid",
            MfdfaError::GridTooSparse(_) => "GridTooSparse",
            MfdfaError::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// True for failures of the numerics on valid input (as opposed to bad
    /// input or configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            MfdfaError::AllSegmentsZero { .. }
                | MfdfaError::NonPositiveFluctuation { .. }
                | MfdfaError::NonMonotoneSurface { .. }
                | MfdfaError::NonFiniteResult
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MfdfaConfig {
    /// Order p of the detrending polynomial.
    pub poly_order: usize,
    /// Moment orders, strictly ascending and symmetric about zero.
    pub q_grid: Vec<f64>,
    /// Explicit scales; `None` uses [`default_scale_grid`] for the series length.
    pub scale_grid: Option<Vec<usize>>,
    /// Inclusive `(s_lo, s_hi)` used for the regression; `None` uses every scale.
    pub fit_scale_range: Option<(usize, usize)>,
}

impl Default for MfdfaConfig {
    fn default() -> Self {
        Self {
            poly_order: DEFAULT_POLY_ORDER,
            q_grid: default_q_grid(),
            scale_grid: None,
            fit_scale_range: None,
        }
    }
}

/// -5 to 5 in steps of 0.25.
pub fn default_q_grid() -> Vec<f64> {
    q_grid(5.0, 0.25)
}

/// Symmetric grid `-q_max, -q_max + step, ..., q_max`; the step must divide `q_max`.
pub fn q_grid(q_max: f64, step: f64) -> Vec<f64> {
    let k = (q_max / step).round() as i64;
    (-k..=k).map(|i| i as f64 * step).collect()
}

/// About 20 scales spaced logarithmically from 16 to `floor(n / 4)`,
/// deduplicated after rounding. Empty when `n / 4 < 16`.
pub fn default_scale_grid(n: usize) -> Vec<usize> {
    log_spaced_scales(DEFAULT_MIN_SCALE, n / 4, DEFAULT_SCALE_COUNT)
}

pub fn log_spaced_scales(s_min: usize, s_max: usize, count: usize) -> Vec<usize> {
    if s_max < s_min || s_min == 0 {
        return Vec::new();
    }
    if count < 2 || s_max == s_min {
        return vec![s_min];
    }
    let (a, b) = ((s_min as f64).ln(), (s_max as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|k| {
            let t = k as f64 / (count - 1) as f64;
            ((a + t * (b - a)).exp().round() as usize).clamp(s_min, s_max)
        })
        .collect();
    out.dedup();
    out
}

/// Configuration with the scale grid and fit range fixed for a series length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub n: usize,
    pub poly_order: usize,
    pub q_grid: Vec<f64>,
    pub scales: Vec<usize>,
    pub fit_scale_range: (usize, usize),
}

impl MfdfaConfig {
    /// Checks the moment grid and polynomial order.
    pub fn validate(&self) -> Result<(), MfdfaError> {
        let bad = |m: &str| Err(MfdfaError::InvalidConfig(m.to_string()));
        if self.poly_order < 1 {
            return bad("poly_order must be at least 1");
        }
        let q = &self.q_grid;
        if q.iter().any(|v| !v.is_finite()) {
            return bad("q grid contains non-finite values");
        }
        if q.windows(2).any(|w| w[0] >= w[1]) {
            return bad("q grid must be strictly ascending");
        }
        let has = |v: f64| q.iter().any(|g| (g - v).abs() <= 1e-9);
        if !q.iter().all(|&v| has(-v)) {
            return bad("q grid must be symmetric about zero");
        }
        if !(has(2.0) && has(5.0)) {
            return bad("q grid must contain 2 and ±5");
        }
        Ok(())
    }

    /// Validates everything against a series of length `n` and fixes the scales.
    pub fn resolve(&self, n: usize) -> Result<ResolvedConfig, MfdfaError> {
        self.validate()?;
        let scales = match &self.scale_grid {
            Some(s) => s.clone(),
            None => default_scale_grid(n),
        };
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MfdfaError::InvalidConfig(
                "scale grid must be strictly ascending".into(),
            ));
        }
        for &s in &scales {
            if s < self.poly_order + 2 {
                return Err(MfdfaError::DegenerateFit {
                    scale: s,
                    poly_order: self.poly_order,
                });
            }
            if s > n / 4 {
                return Err(MfdfaError::InvalidConfig(format!(
                    "scale {s} exceeds N/4 = {} for N = {n}",
                    n / 4
                )));
            }
        }
        let fit_scale_range = match self.fit_scale_range {
            Some((lo, hi)) if lo > hi => {
                return Err(MfdfaError::InvalidConfig(format!(
                    "fit range ({lo}, {hi}) is empty"
                )))
            }
            Some(r) => r,
            None => (
                scales.first().copied().unwrap_or(0),
                scales.last().copied().unwrap_or(0),
            ),
        };
        let in_range = scales
            .iter()
            .filter(|&&s| s >= fit_scale_range.0 && s <= fit_scale_range.1)
            .count();
        if in_range < MIN_FIT_SCALES {
            return Err(MfdfaError::TooFewScales {
                found: in_range,
                required: MIN_FIT_SCALES,
            });
        }
        Ok(ResolvedConfig {
            n,
            poly_order: self.poly_order,
            q_grid: self.q_grid.clone(),
            scales,
            fit_scale_range,
        })
    }
}

/// Full result of one MFDFA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub config: ResolvedConfig,
    pub surface: FluctuationSurface,
    pub spectrum: HurstSpectrum,
}

impl Analysis {
    pub fn h2(&self) -> f64 {
        self.spectrum.h2().unwrap_or(f64::NAN)
    }

    pub fn dh(&self, q: f64) -> Result<f64, MfdfaError> {
        multifractal_width(&self.spectrum, q)
    }
}

pub fn analyze(values: &[f64], config: &MfdfaConfig) -> Result<Analysis, MfdfaError> {
    analyze_with(values, config, Execution::default())
}

/// Runs the pipeline; scales are evaluated according to `exec`.
pub fn analyze_with(
    values: &[f64],
    config: &MfdfaConfig,
    exec: Execution,
) -> Result<Analysis, MfdfaError> {
    Estimator::new(config, values.len())?.run(values, exec)
}

/// The pipeline prepared for series of one fixed length. Reusing it across
/// equally long windows avoids rebuilding the per-scale fitting bases.
#[derive(Debug, Clone)]
pub struct Estimator {
    config: ResolvedConfig,
    detrenders: Vec<Detrender>,
}

impl Estimator {
    pub fn new(config: &MfdfaConfig, n: usize) -> Result<Self, MfdfaError> {
        let config = config.resolve(n)?;
        let detrenders = config
            .scales
            .iter()
            .map(|&s| Detrender::new(s, config.poly_order))
            .collect::<Result<_, _>>()?;
        Ok(Self { config, detrenders })
    }

    pub fn config(&self) -> &ResolvedConfig {
        &self.config
    }

    pub fn run(&self, values: &[f64], exec: Execution) -> Result<Analysis, MfdfaError> {
        if values.len() != self.config.n {
            return Err(MfdfaError::InvalidConfig(format!(
                "estimator prepared for length {}, got {}",
                self.config.n,
                values.len()
            )));
        }
        let profile = build_profile(values)?;
        let threshold = zero_threshold(values);
        let per_scale = exec
            .map_range(self.detrenders.len(), |i| {
                let d = &self.detrenders[i];
                d.segment_variances(profile.values())
                    .map(|variances| ScaleVariances {
                        scale: d.scale(),
                        variances,
                    })
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let surface = fluctuation_function(per_scale, &self.config.q_grid, threshold)?;
        let spectrum = estimate_hq(&surface, self.config.fit_scale_range)?;
        Ok(Analysis {
            config: self.config.clone(),
            surface,
            spectrum,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids() {
        let q = default_q_grid();
        assert_eq!(q.len(), 41);
        assert_eq!(q[0], -5.0);
        assert_eq!(q[20], 0.0);
        assert_eq!(q[28], 2.0);
        let s = default_scale_grid(1 << 14);
        assert_eq!(s.first(), Some(&16));
        assert_eq!(s.last(), Some(&4096));
        assert_eq!(s.len(), 20);
        let s = default_scale_grid(750);
        assert_eq!(s.last(), Some(&187));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(default_scale_grid(63).is_empty());
        assert_eq!(default_scale_grid(64), vec![16]);
    }

    #[test]
    fn config_validation() {
        let mut c = MfdfaConfig::default();
        assert!(c.validate().is_ok());
        c.q_grid = vec![-5.0, 2.0, 5.0];
        assert!(c.validate().is_err());
        c.q_grid = vec![-3.0, -2.0, 2.0, 3.0];
        assert!(c.validate().is_err());
        c = MfdfaConfig {
            poly_order: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = MfdfaConfig {
            scale_grid: Some(vec![4, 8, 16, 32]),
            ..Default::default()
        };
        assert!(matches!(
            c.resolve(1000),
            Err(MfdfaError::DegenerateFit { scale: 4, .. })
        ));
        c.scale_grid = Some(vec![16, 32, 64, 300]);
        assert!(matches!(c.resolve(1000), Err(MfdfaError::InvalidConfig(_))));
        c.scale_grid = None;
        assert!(matches!(
            c.resolve(64),
            Err(MfdfaError::TooFewScales { found: 1, .. })
        ));
        c.fit_scale_range = Some((100, 200));
        assert!(matches!(
            c.resolve(4000),
            Err(MfdfaError::TooFewScales { .. })
        ));
    }

    #[test]
    fn constant_series_is_numerical_failure() {
        let err = analyze(&vec![0.01; 2000], &MfdfaConfig::default()).unwrap_err();
        assert!(matches!(err, MfdfaError::AllSegmentsZero { .. }));
        assert!(err.is_numerical());
    }

    #[test]
    fn execution_modes_bitwise_equal() {
        let v: Vec<f64> = (0..3000)
            .map(|i| ((i * 7919 % 4093) as f64).sin())
            .collect();
        let a = analyze_with(&v, &MfdfaConfig::default(), Execution::Sequential).unwrap();
        let b = analyze_with(&v, &MfdfaConfig::default(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
