//! Brute-force MFDFA reference in exact rational arithmetic.
//!
//! Inputs are converted from f64 without rounding, the profile is an exact
//! cumulative sum, and each segment fit solves the normal equations on the
//! raw integer index 1..=s by fraction-exact Gaussian elimination. Nothing
//! here shares code with the library.

#![allow(clippy::needless_range_loop)]

use num::{BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};

pub fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite input")
}

pub fn profile(values: &[f64]) -> Vec<BigRational> {
    let n = BigRational::from_usize(values.len()).unwrap();
    let xs: Vec<BigRational> = values.iter().map(|&v| exact(v)).collect();
    let mean = xs.iter().fold(BigRational::zero(), |a, x| a + x) / n;
    let mut acc = BigRational::zero();
    xs.iter()
        .map(|x| {
            acc += x - &mean;
            acc.clone()
        })
        .collect()
}

fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .expect("singular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in col + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for c in col..m {
                let t = &f * &a[col][c];
                a[r][c] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    let mut x = vec![BigRational::zero(); m];
    for r in (0..m).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..m {
            acc -= &a[r][c] * &x[c];
        }
        x[r] = acc / &a[r][r];
    }
    x
}

/// Mean squared residual of the order-`p` least-squares fit to `seg`.
pub fn segment_variance(seg: &[BigRational], p: usize) -> BigRational {
    let s = seg.len();
    let idx: Vec<BigRational> = (1..=s)
        .map(|i| BigRational::from_usize(i).unwrap())
        .collect();
    let pow = |x: &BigRational, k: usize| (0..k).fold(BigRational::one(), |a, _| a * x);
    let mut a = vec![vec![BigRational::zero(); p + 1]; p + 1];
    let mut b = vec![BigRational::zero(); p + 1];
    for (x, y) in idx.iter().zip(seg) {
        for j in 0..=p {
            let xj = pow(x, j);
            b[j] += &xj * y;
            for k in 0..=p {
                a[j][k] += &xj * pow(x, k);
            }
        }
    }
    let coef = solve(a, b);
    let mut ss = BigRational::zero();
    for (x, y) in idx.iter().zip(seg) {
        let fit = coef
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (k, c)| acc + c * pow(x, k));
        let r = y - fit;
        ss += &r * &r;
    }
    ss / BigRational::from_usize(s).unwrap()
}

/// F^2 for the N_s forward segments followed by the N_s backward ones.
pub fn segment_variances(profile: &[BigRational], s: usize, p: usize) -> Vec<BigRational> {
    let n = profile.len();
    let ns = n / s;
    let mut out = Vec::with_capacity(2 * ns);
    for nu in 0..ns {
        out.push(segment_variance(&profile[nu * s..(nu + 1) * s], p));
    }
    for k in 1..=ns {
        let start = n - k * s;
        out.push(segment_variance(&profile[start..start + s], p));
    }
    out
}

/// F_2(s) = sqrt(mean F^2); only the final square root is rounded.
pub fn f2(variances: &[BigRational]) -> f64 {
    let m = BigRational::from_usize(variances.len()).unwrap();
    let mean = variances.iter().fold(BigRational::zero(), |a, v| a + v) / m;
    mean.to_f64().unwrap().sqrt()
}

pub fn rel_diff(approx: f64, exact: &BigRational) -> f64 {
    let e = exact.to_f64().unwrap();
    let diff = (exact - BigRational::from_float(approx).unwrap()).abs();
    diff.to_f64().unwrap() / e.abs()
}
