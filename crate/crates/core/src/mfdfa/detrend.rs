//! Local polynomial detrending of profile segments.
//!
//! The segment-local index is mapped affinely onto [-1, 1] and the polynomial
//! space is spanned by an orthonormal basis built once per scale (Legendre
//! polynomials re-orthogonalised on the discrete grid). The fit residual is
//! then a sequence of projections, which stays accurate for cubic fits on
//! segments several thousand points long where the raw normal equations
//! would not.

use super::{MfdfaError, Profile};

#[derive(Debug, Clone)]
pub struct Detrender {
    scale: usize,
    basis: Vec<Vec<f64>>,
}

impl Detrender {
    pub fn new(scale: usize, poly_order: usize) -> Result<Self, MfdfaError> {
        if scale < poly_order + 2 {
            return Err(MfdfaError::DegenerateFit { scale, poly_order });
        }
        let half = (scale - 1) as f64 / 2.0;
        let x: Vec<f64> = (0..scale).map(|i| (i as f64 - half) / half).collect();

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(poly_order + 1);
        let mut prev = vec![1.0; scale];
        let mut cur = x.clone();
        for k in 0..=poly_order {
            let mut v = match k {
                0 => prev.clone(),
                1 => cur.clone(),
                _ => {
                    // (k) P_k = (2k - 1) x P_{k-1} - (k - 1) P_{k-2}
                    let kf = k as f64;
                    let next: Vec<f64> = x
                        .iter()
                        .zip(cur.iter().zip(&prev))
                        .map(|(xi, (c, p))| ((2.0 * kf - 1.0) * xi * c - (kf - 1.0) * p) / kf)
                        .collect();
                    prev = std::mem::replace(&mut cur, next);
                    cur.clone()
                }
            };
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &v);
                    v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|vi| *vi /= norm);
            basis.push(v);
        }
        Ok(Self { scale, basis })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    /// Mean squared residual of the least-squares polynomial fit to `segment`.
    pub fn residual_variance(&self, segment: &[f64], scratch: &mut Vec<f64>) -> f64 {
        debug_assert_eq!(segment.len(), self.scale);
        scratch.clear();
        scratch.extend_from_slice(segment);
        for b in &self.basis {
            let c = dot(b, scratch);
            scratch.iter_mut().zip(b).for_each(|(r, bi)| *r -= c * bi);
        }
        dot(scratch, scratch) / self.scale as f64
    }

    /// F^2(nu, s) for the 2 N_s segments: N_s from the start of the profile,
    /// then N_s from the end (nu = N_s + 1 is the last segment).
    pub fn segment_variances(&self, profile: &[f64]) -> Result<Vec<f64>, MfdfaError> {
        let n = profile.len();
        let s = self.scale;
        let ns = n / s;
        if ns == 0 {
            return Err(MfdfaError::ScaleTooLarge { scale: s, len: n });
        }
        let mut scratch = Vec::with_capacity(s);
        let mut out = Vec::with_capacity(2 * ns);
        for nu in 0..ns {
            out.push(self.residual_variance(&profile[nu * s..(nu + 1) * s], &mut scratch));
        }
        for k in 1..=ns {
            let start = n - k * s;
            out.push(self.residual_variance(&profile[start..start + s], &mut scratch));
        }
        Ok(out)
    }
}

pub fn segment_variances(
    profile: &Profile,
    scale: usize,
    poly_order: usize,
) -> Result<Vec<f64>, MfdfaError> {
    Detrender::new(scale, poly_order)?.segment_variances(profile.values())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
