//! Seeded generators for series with known scaling: white noise, fractional
//! Gaussian noise and the binomial multiplicative cascade.

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{ReturnKind, ReturnSeries};

/// Relative size of a negative circulant eigenvalue that is clamped to zero
/// instead of triggering a larger embedding.
const EIGEN_TOL: f64 = 1e-10;
const MAX_EMBEDDING_DOUBLINGS: u32 = 3;
pub const MAX_CASCADE_LEVELS: u32 = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("invalid generator parameters: {0}")]
    InvalidParameter(String),
    #[error("circulant embedding has a negative eigenvalue {min_eigenvalue} after {doublings} doublings")]
    EmbeddingFailure { min_eigenvalue: f64, doublings: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    WhiteNoise {
        n: usize,
        seed: u64,
    },
    Fgn {
        n: usize,
        hurst: f64,
        seed: u64,
    },
    /// `n = 2^levels`; seed 0 is the deterministic left-heavy cascade.
    BinomialCascade {
        levels: u32,
        p_weight: f64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<ReturnSeries, GenerateError> {
        let (name, values) = match *self {
            GeneratorSpec::WhiteNoise { n, seed } => ("white", white_noise(n, seed)?),
            GeneratorSpec::Fgn { n, hurst, seed } => ("fgn", fgn(n, hurst, seed)?),
            GeneratorSpec::BinomialCascade {
                levels,
                p_weight,
                seed,
            } => ("cascade", binomial_cascade(levels, p_weight, seed)?),
        };
        Ok(synthetic_series(name, values))
    }
}

/// First date assigned to synthetic series; one calendar day per observation.
pub fn synthetic_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date")
}

/// Wraps values as a log-return series dated on consecutive days.
pub fn synthetic_series(asset: &str, values: Vec<f64>) -> ReturnSeries {
    let start = synthetic_start_date();
    let dates = (0..values.len())
        .map(|i| start + Days::new(i as u64))
        .collect();
    ReturnSeries::new(asset, ReturnKind::LogReturn, dates, values)
        .expect("synthetic dates are increasing")
}

pub fn white_noise(n: usize, seed: u64) -> Result<Vec<f64>, GenerateError> {
    if n == 0 {
        return Err(GenerateError::InvalidParameter(
            "n must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.sample(StandardNormal)).collect())
}

/// Autocovariance of unit-variance fGn at lag `k`.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let two_h = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Exact fractional Gaussian noise by circulant embedding of the covariance.
pub fn fgn(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>, GenerateError> {
    if n < 2 {
        return Err(GenerateError::InvalidParameter(
            "n must be at least 2".into(),
        ));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(GenerateError::InvalidParameter(format!(
            "Hurst exponent {hurst} outside (0, 1)"
        )));
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut half = n.next_power_of_two();
    let mut min_eig = 0.0;
    for _ in 0..=MAX_EMBEDDING_DOUBLINGS {
        let m = 2 * half;
        // first row of the circulant: γ(0..=half), then γ(half-1..=1)
        let mut row: Vec<Complex<f64>> = (0..m)
            .map(|j| {
                let lag = if j <= half { j } else { m - j };
                Complex::new(fgn_autocovariance(lag, hurst), 0.0)
            })
            .collect();
        planner.plan_fft_forward(m).process(&mut row);
        let max_eig = row.iter().fold(0.0f64, |a, c| a.max(c.re));
        min_eig = row.iter().fold(f64::MAX, |a, c| a.min(c.re));
        if min_eig < -EIGEN_TOL * max_eig {
            half *= 2;
            continue;
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut buf: Vec<Complex<f64>> = row
            .iter()
            .map(|lambda| {
                let w = (lambda.re.max(0.0) / m as f64).sqrt();
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(re * w, im * w)
            })
            .collect();
        planner.plan_fft_forward(m).process(&mut buf);
        return Ok(buf[..n].iter().map(|c| c.re).collect());
    }
    Err(GenerateError::EmbeddingFailure {
        min_eigenvalue: min_eig,
        doublings: MAX_EMBEDDING_DOUBLINGS,
    })
}

/// Binomial multiplicative cascade of `2^levels` cell masses summing to one.
///
/// Every cell passes fraction `p_weight` of its mass to one child and
/// `1 - p_weight` to the other. With seed 0 the heavier share always goes
/// left; any other seed draws the side per split.
pub fn binomial_cascade(levels: u32, p_weight: f64, seed: u64) -> Result<Vec<f64>, GenerateError> {
    if !(1..=MAX_CASCADE_LEVELS).contains(&levels) {
        return Err(GenerateError::InvalidParameter(format!(
            "levels {levels} outside 1..={MAX_CASCADE_LEVELS}"
        )));
    }
    if !(p_weight > 0.5 && p_weight < 1.0) {
        return Err(GenerateError::InvalidParameter(format!(
            "weight {p_weight} outside (0.5, 1)"
        )));
    }
    let mut rng = (seed != 0).then(|| ChaCha8Rng::seed_from_u64(seed));
    let mut mass = vec![1.0];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(mass.len() * 2);
        for m in &mass {
            let heavy_left = rng.as_mut().is_none_or(|r| r.random::<bool>());
            let (l, r) = if heavy_left {
                (p_weight, 1.0 - p_weight)
            } else {
                (1.0 - p_weight, p_weight)
            };
            next.push(m * l);
            next.push(m * r);
        }
        mass = next;
    }
    Ok(mass)
}

/// h(q) = 1/q - ln(p^q + (1-p)^q) / (q ln 2) of the binomial cascade.
///
/// Near q = 0 the cumulant expansion is used; the limit there is
/// -(ln p + ln(1-p)) / (2 ln 2). Returns NaN for `p_weight` outside [0.5, 1).
pub fn analytic_cascade_hq(q: f64, p_weight: f64) -> f64 {
    if !(0.5..1.0).contains(&p_weight) {
        return f64::NAN;
    }
    let ln2 = std::f64::consts::LN_2;
    let (a, b) = (p_weight.ln(), (1.0 - p_weight).ln());
    if q.abs() < 1e-4 {
        // ln(p^q + (1-p)^q) = ln 2 + q m + q^2 d^2 / 2 - q^4 d^4 / 12 + ...
        let m = 0.5 * (a + b);
        let d = 0.5 * (a - b);
        return -(m + 0.5 * q * d * d - q.powi(3) * d.powi(4) / 12.0) / ln2;
    }
    // ln(e^{qa} + e^{qb}) without overflow
    let (hi, lo) = if q * a >= q * b {
        (q * a, q * b)
    } else {
        (q * b, q * a)
    };
    let log_sum = hi + (lo - hi).exp().ln_1p();
    1.0 / q - log_sum / (q * ln2)
}
