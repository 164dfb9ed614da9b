use serde::{Deserialize, Serialize};

use super::MfdfaError;

/// Cumulative sum of the mean-centred series, Y(i) for i = 1..N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    values: Vec<f64>,
}

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn build_profile(values: &[f64]) -> Result<Profile, MfdfaError> {
    if values.len() < 2 {
        return Err(MfdfaError::TooShort(values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MfdfaError::NonFiniteInput);
    }
    let mean = shifted_mean(values);
    let mut acc = CompensatedSum::default();
    let values = values
        .iter()
        .map(|v| {
            acc.add(v - mean);
            acc.value()
        })
        .collect();
    Ok(Profile { values })
}

/// Segment variances at or below this value count as zero.
///
/// `1e-15` times the series variance, floored at the rounding noise of the
/// profile itself, `(N * eps * max|r|)^2`, so that a constant series is
/// always recognised as degenerate.
pub fn zero_threshold(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.is_empty() {
        return 0.0;
    }
    let mean = shifted_mean(values);
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let noise = n * f64::EPSILON * max_abs;
    (1e-15 * var).max(noise * noise)
}

/// Mean computed about the first value, exact for constant input.
fn shifted_mean(values: &[f64]) -> f64 {
    let origin = values[0];
    let mut acc = CompensatedSum::default();
    values.iter().for_each(|v| acc.add(v - origin));
    origin + acc.value() / values.len() as f64
}

/// Neumaier summation.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
