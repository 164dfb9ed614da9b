use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{FluctuationSurface, MfdfaError};
use crate::ingest::format_float;

/// Tolerance used to locate a moment order on the q grid.
const Q_MATCH_TOL: f64 = 1e-9;

/// Minimum number of scales entering the log-log regression.
pub const MIN_FIT_SCALES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthPoint {
    pub q: f64,
    /// h(-q) - h(q)
    pub dh: f64,
}

/// Generalised Hurst exponents h(q) with regression diagnostics, the
/// singularity spectrum and the multifractal width function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HurstSpectrum {
    pub q_grid: Vec<f64>,
    pub hq: Vec<f64>,
    pub fit_stderr: Vec<f64>,
    pub r_squared: Vec<f64>,
    /// Scales that entered the regression.
    pub fit_scales: Vec<usize>,
    pub alpha: Vec<f64>,
    pub f_alpha: Vec<f64>,
    pub width_fn: Vec<WidthPoint>,
}

impl HurstSpectrum {
    /// Spectrum from given h(q) values with perfect-fit diagnostics; the
    /// singularity spectrum and width function are filled in.
    pub fn from_hq(q_grid: Vec<f64>, hq: Vec<f64>) -> Result<Self, MfdfaError> {
        let n = q_grid.len();
        if hq.len() != n {
            return Err(MfdfaError::InvalidConfig(
                "h(q) and q grid lengths differ".into(),
            ));
        }
        let spec = Self {
            q_grid,
            hq,
            fit_stderr: vec![0.0; n],
            r_squared: vec![1.0; n],
            fit_scales: Vec::new(),
            alpha: Vec::new(),
            f_alpha: Vec::new(),
            width_fn: Vec::new(),
        };
        Ok(with_width(singularity_spectrum(spec)?))
    }

    pub fn q_index(&self, q: f64) -> Option<usize> {
        self.q_grid
            .iter()
            .position(|g| (g - q).abs() <= Q_MATCH_TOL)
    }

    pub fn h_at(&self, q: f64) -> Option<f64> {
        self.q_index(q).map(|i| self.hq[i])
    }

    pub fn h2(&self) -> Option<f64> {
        self.h_at(2.0)
    }

    /// Columns `q,h,stderr,r2,alpha,f_alpha`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "q,h,stderr,r2,alpha,f_alpha")?;
        for i in 0..self.q_grid.len() {
            let opt = |v: &Vec<f64>| v.get(i).copied().map(format_float).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                format_float(self.q_grid[i]),
                format_float(self.hq[i]),
                format_float(self.fit_stderr[i]),
                format_float(self.r_squared[i]),
                opt(&self.alpha),
                opt(&self.f_alpha),
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

/// Unweighted ordinary least squares of `y` on `x`.
pub fn ols(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let e = yi - intercept - slope * xi;
            e * e
        })
        .sum();
    let slope_stderr = if x.len() > 2 {
        (ssr / (n - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    let r_squared = if syy > 0.0 {
        (1.0 - ssr / syy).max(0.0)
    } else {
        1.0
    };
    LineFit {
        slope,
        intercept,
        slope_stderr,
        r_squared,
    }
}

/// h(q) as the slope of ln F_q(s) against ln s over scales in
/// `[s_lo, s_hi]`, followed by the singularity spectrum and Δh(q).
pub fn estimate_hq(
    surface: &FluctuationSurface,
    fit_scale_range: (usize, usize),
) -> Result<HurstSpectrum, MfdfaError> {
    let (lo, hi) = fit_scale_range;
    let idx: Vec<usize> = (0..surface.scales.len())
        .filter(|&i| surface.scales[i] >= lo && surface.scales[i] <= hi)
        .collect();
    if idx.len() < MIN_FIT_SCALES {
        return Err(MfdfaError::TooFewScales {
            found: idx.len(),
            required: MIN_FIT_SCALES,
        });
    }
    let ln_s: Vec<f64> = idx
        .iter()
        .map(|&i| (surface.scales[i] as f64).ln())
        .collect();

    let nq = surface.q_grid.len();
    let (mut hq, mut fit_stderr, mut r_squared) = (
        Vec::with_capacity(nq),
        Vec::with_capacity(nq),
        Vec::with_capacity(nq),
    );
    for (qi, &q) in surface.q_grid.iter().enumerate() {
        let mut ln_f = Vec::with_capacity(idx.len());
        for &si in &idx {
            let f = surface.fq(qi, si);
            if !(f > 0.0 && f.is_finite()) {
                return Err(MfdfaError::NonPositiveFluctuation {
                    q,
                    scale: surface.scales[si],
                });
            }
            ln_f.push(f.ln());
        }
        let fit = ols(&ln_s, &ln_f);
        hq.push(fit.slope);
        fit_stderr.push(fit.slope_stderr);
        r_squared.push(fit.r_squared);
    }
    if hq.iter().any(|h| !h.is_finite()) {
        return Err(MfdfaError::NonFiniteResult);
    }
    let spec = HurstSpectrum {
        q_grid: surface.q_grid.clone(),
        hq,
        fit_stderr,
        r_squared,
        fit_scales: idx.iter().map(|&i| surface.scales[i]).collect(),
        alpha: Vec::new(),
        f_alpha: Vec::new(),
        width_fn: Vec::new(),
    };
    Ok(with_width(singularity_spectrum(spec)?))
}

/// Fills α(q) = h(q) + q h'(q) and f(α) = q [α - h(q)] + 1, with h'(q)
/// from central differences on the grid (one-sided at both ends).
pub fn singularity_spectrum(mut spec: HurstSpectrum) -> Result<HurstSpectrum, MfdfaError> {
    let q = &spec.q_grid;
    let h = &spec.hq;
    let n = q.len();
    if n < 3 {
        return Err(MfdfaError::GridTooSparse(n));
    }
    let dh: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (h[b] - h[a]) / (q[b] - q[a])
        })
        .collect();
    spec.alpha = (0..n).map(|i| h[i] + q[i] * dh[i]).collect();
    spec.f_alpha = (0..n)
        .map(|i| q[i] * (spec.alpha[i] - h[i]) + 1.0)
        .collect();
    Ok(spec)
}

/// Δh(q) = h(-q) - h(q).
pub fn multifractal_width(spec: &HurstSpectrum, q: f64) -> Result<f64, MfdfaError> {
    match (spec.h_at(-q), spec.h_at(q)) {
        (Some(neg), Some(pos)) => Ok(neg - pos),
        _ => Err(MfdfaError::QNotOnGrid(q)),
    }
}

fn with_width(mut spec: HurstSpectrum) -> HurstSpectrum {
    spec.width_fn = spec
        .q_grid
        .iter()
        .filter(|&&q| q > 0.0)
        .filter_map(|&q| {
            multifractal_width(&spec, q)
                .ok()
                .map(|dh| WidthPoint { q, dh })
        })
        .collect();
    spec
}
