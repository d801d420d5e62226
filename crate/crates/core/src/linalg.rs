//! Banded factorizations used by the channel and the detectors.
//!
//! All matrices here are real; right-hand sides may be real or complex since the
//! ISI matrix acts on I and Q identically.

use std::ops::{Add, Div, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Element type that a real banded matrix can act on.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Div<f64, Output = Self>
{
    fn zero() -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Lower-triangular Cholesky factor `C` of a symmetric banded matrix, `A = C Cᵀ`.
///
/// Row `i` stores columns `i - bw ..= i`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    /// Factors the symmetric matrix whose `(i, j)` entry (for `|i - j| <= bw`) is
    /// `entry(i, j)`. Fails on the first non-positive pivot.
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let bw = bw.min(n.saturating_sub(1));
        let w = bw + 1;
        let mut data = vec![0.0; n * w];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = entry(i, j);
                let kmin = lo.max(j.saturating_sub(bw));
                for k in kmin..j {
                    sum -= data[i * w + (k + bw - i)] * data[j * w + (k + bw - j)];
                }
                if i == j {
                    if !(sum > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: sum });
                    }
                    data[i * w + bw] = sum.sqrt();
                } else {
                    data[i * w + (j + bw - i)] = sum / data[j * w + bw];
                }
            }
        }
        Ok(Self { n, bw, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// `C[i][j]`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i || i - j > self.bw {
            0.0
        } else {
            self.data[i * (self.bw + 1) + (j + self.bw - i)]
        }
    }

    /// Computes `C w`. If `w` is white with variance `v`, the result has covariance `v A`.
    pub fn mul_lower<T: Scalar>(&self, w: &[T]) -> Vec<T> {
        assert_eq!(w.len(), self.n);
        let stride = self.bw + 1;
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.bw);
                let row = &self.data[i * stride..(i + 1) * stride];
                (lo..=i).fold(T::zero(), |acc, j| acc + w[j] * row[j + self.bw - i])
            })
            .collect()
    }

    /// Solves `A x = b`.
    pub fn solve<T: Scalar>(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let stride = self.bw + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut s = x[i];
            for j in lo..i {
                s = s - x[j] * self.data[i * stride + (j + self.bw - i)];
            }
            x[i] = s / self.data[i * stride + self.bw];
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s = s - x[j] * self.data[j * stride + (i + self.bw - j)];
            }
            x[i] = s / self.data[i * stride + self.bw];
        }
        x
    }
}

/// LU factorization with partial pivoting of a square banded matrix with equal
/// lower and upper bandwidth. Works for symmetric indefinite matrices, which is
/// what a truncated FTN ISI matrix becomes once the symbols are packed tighter
/// than the pulse bandwidth allows.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    bw: usize,
    // Row `k` holds U(k, c) for c in [k - bw, k + 2 bw]; only c >= k is meaningful after factoring.
    upper: Vec<f64>,
    mult: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn factor(n: usize, bw: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let bw = bw.min(n.saturating_sub(1));
        let width = 3 * bw + 1;
        let idx = |r: usize, c: usize| r * width + (c + bw - r);
        let mut upper = vec![0.0; n * width];
        let mut scale = 0.0f64;
        for r in 0..n {
            for c in r.saturating_sub(bw)..=(r + bw).min(n - 1) {
                let v = entry(r, c);
                scale = scale.max(v.abs());
                upper[idx(r, c)] = v;
            }
        }
        let mut mult = vec![0.0; n * bw];
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + bw).min(n - 1);
            let last_col = (k + 2 * bw).min(n - 1);
            let (mut p, mut best) = (k, upper[idx(k, k)].abs());
            for r in k + 1..=last_row {
                let v = upper[idx(r, k)].abs();
                if v > best {
                    p = r;
                    best = v;
                }
            }
            if best <= scale * 1e-14 || best == 0.0 {
                return Err(Error::NotInvertible);
            }
            pivots[k] = p;
            if p != k {
                for c in k..=last_col {
                    upper.swap(idx(k, c), idx(p, c));
                }
            }
            let d = upper[idx(k, k)];
            for r in k + 1..=last_row {
                let m = upper[idx(r, k)] / d;
                mult[k * bw + (r - k - 1)] = m;
                upper[idx(r, k)] = 0.0;
                if m != 0.0 {
                    for c in k + 1..=last_col {
                        upper[idx(r, c)] -= m * upper[idx(k, c)];
                    }
                }
            }
        }
        Ok(Self { n, bw, upper, mult, pivots })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve<T: Scalar>(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n);
        let (n, bw) = (self.n, self.bw);
        let width = 3 * bw + 1;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for r in k + 1..=(k + bw).min(n - 1) {
                x[r] = x[r] - xk * self.mult[k * bw + (r - k - 1)];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..=(k + 2 * bw).min(n - 1) {
                s = s - x[c] * self.upper[k * width + (c + bw - k)];
            }
            x[k] = s / self.upper[k * width + bw];
        }
        x
    }
}
