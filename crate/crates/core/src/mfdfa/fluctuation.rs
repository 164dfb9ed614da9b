use std::io::Write;

use serde::{Deserialize, Serialize};

use super::MfdfaError;
use crate::ingest::format_float;

/// Per-segment detrended variances F^2(nu, s) at one scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleVariances {
    pub scale: usize,
    pub variances: Vec<f64>,
}

/// F_q(s) over the (q, s) grid together with the segment variances it was
/// averaged from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctuationSurface {
    pub q_grid: Vec<f64>,
    pub scales: Vec<usize>,
    /// N_s = int(N / s) per scale.
    pub ns_per_scale: Vec<usize>,
    /// 2 N_s values per scale.
    pub seg_variances: Vec<Vec<f64>>,
    /// `fq[q_index][scale_index]`.
    pub fq: Vec<Vec<f64>>,
    /// Segments excluded from the average per scale.
    pub zero_segments: Vec<usize>,
    pub zero_threshold: f64,
}

impl FluctuationSurface {
    pub fn fq(&self, q_index: usize, scale_index: usize) -> f64 {
        self.fq[q_index][scale_index]
    }

    pub fn total_zero_segments(&self) -> usize {
        self.zero_segments.iter().sum()
    }

    /// Long format: `q,s,F`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "q,s,F")?;
        for (qi, q) in self.q_grid.iter().enumerate() {
            for (si, s) in self.scales.iter().enumerate() {
                writeln!(
                    w,
                    "{},{},{}",
                    format_float(*q),
                    s,
                    format_float(self.fq[qi][si])
                )?;
            }
        }
        Ok(())
    }
}

/// Averages segment variances into the q-th order fluctuation function.
///
/// For q != 0 this is the generalised mean `{mean([F^2]^(q/2))}^(1/q)`; at
/// q = 0 the logarithmic average `exp(mean(ln F^2) / 2)`. Segments with
/// `F^2 <= zero_threshold` are left out of every average and counted.
/// `q_grid` must be strictly ascending.
pub fn fluctuation_function(
    per_scale: Vec<ScaleVariances>,
    q_grid: &[f64],
    zero_threshold: f64,
) -> Result<FluctuationSurface, MfdfaError> {
    let mut scales = Vec::with_capacity(per_scale.len());
    let mut ns_per_scale = Vec::with_capacity(per_scale.len());
    let mut zero_segments = Vec::with_capacity(per_scale.len());
    let mut fq = vec![Vec::with_capacity(per_scale.len()); q_grid.len()];
    let mut seg_variances = Vec::with_capacity(per_scale.len());

    for sv in per_scale {
        if sv.variances.is_empty() {
            return Err(MfdfaError::ScaleTooLarge {
                scale: sv.scale,
                len: 0,
            });
        }
        let kept: Vec<f64> = sv
            .variances
            .iter()
            .copied()
            .filter(|v| *v > zero_threshold)
            .map(f64::ln)
            .collect();
        if kept.is_empty() {
            return Err(MfdfaError::AllSegmentsZero { scale: sv.scale });
        }
        let column: Vec<f64> = q_grid.iter().map(|&q| generalized_mean(&kept, q)).collect();
        for (i, w) in column.windows(2).enumerate() {
            if w[1] < w[0] * (1.0 - 1e-12) {
                return Err(MfdfaError::NonMonotoneSurface {
                    scale: sv.scale,
                    q: q_grid[i + 1],
                });
            }
        }
        for (row, v) in fq.iter_mut().zip(column) {
            row.push(v);
        }
        scales.push(sv.scale);
        ns_per_scale.push(sv.variances.len() / 2);
        zero_segments.push(sv.variances.len() - kept.len());
        seg_variances.push(sv.variances);
    }

    Ok(FluctuationSurface {
        q_grid: q_grid.to_vec(),
        scales,
        ns_per_scale,
        seg_variances,
        fq,
        zero_segments,
        zero_threshold,
    })
}

/// Order-q mean of sqrt(F^2), evaluated in log space. Values are taken
/// relative to the largest (q > 0) or smallest (q < 0) variance so that no
/// term overflows.
fn generalized_mean(ln_variances: &[f64], q: f64) -> f64 {
    let m = ln_variances.len() as f64;
    if q == 0.0 {
        return (0.5 * ln_variances.iter().sum::<f64>() / m).exp();
    }
    let reference = if q > 0.0 {
        ln_variances.iter().copied().fold(f64::MIN, f64::max)
    } else {
        ln_variances.iter().copied().fold(f64::MAX, f64::min)
    };
    let half_q = q / 2.0;
    let mean = ln_variances
        .iter()
        .map(|lv| (half_q * (lv - reference)).exp())
        .sum::<f64>()
        / m;
    (0.5 * reference + mean.ln() / q).exp()
}
