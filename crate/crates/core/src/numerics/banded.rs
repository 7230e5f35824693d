//! Square banded matrices with equal lower and upper half-bandwidth.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Banded {
    n: usize,
    r: usize,
    /// Row-major: entry (i, j) lives at i * (2r + 1) + (j + r - i).
    data: Vec<f64>,
}

impl Banded {
    pub fn zeros(n: usize, r: usize) -> Self {
        Banded { n, r, data: vec![0.0; n * (2 * r + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.r
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.r >= i && j <= i + self.r);
        i * (2 * self.r + 1) + (j + self.r - i)
    }

    /// Column range of row i inside the band.
    pub fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.r)..(i + self.r + 1).min(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.cols(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.cols(i).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// LU of `shift I - self` without pivoting.
    pub fn shifted_lu(&self, shift: f64) -> Result<BandedLu> {
        let mut a = self.clone();
        for v in a.data.iter_mut() {
            *v = -*v;
        }
        for i in 0..a.n {
            a.add(i, i, shift);
        }
        a.lu_in_place()
    }

    fn lu_in_place(mut self) -> Result<BandedLu> {
        let (n, r) = (self.n, self.r);
        let mut negative = 0;
        for k in 0..n {
            let mut p = self.get(k, k);
            if !p.is_finite() {
                return Err(Error::numerical("banded LU: non-finite pivot", k));
            }
            if p == 0.0 {
                // Exact cancellation: the shift sits on an eigenvalue to working precision.
                p = f64::EPSILON * self.cols(k).map(|j| self.get(k, j).abs()).fold(f64::MIN_POSITIVE, f64::max);
                self.set(k, k, p);
            }
            if p < 0.0 {
                negative += 1;
            }
            let top = (k + r + 1).min(n);
            for i in k + 1..top {
                let l = self.get(i, k) / p;
                if l == 0.0 {
                    continue;
                }
                self.set(i, k, l);
                let row_k = k * (2 * r + 1);
                let row_i = i * (2 * r + 1);
                for j in k + 1..top {
                    self.data[row_i + j + r - i] -= l * self.data[row_k + j + r - k];
                }
            }
        }
        Ok(BandedLu { f: self, negative_pivots: negative })
    }
}

/// Unit-lower / upper factors stored in one band.
#[derive(Clone, Debug)]
pub struct BandedLu {
    f: Banded,
    /// Number of negative pivots: for a symmetric matrix, the number of
    /// negative eigenvalues.
    pub negative_pivots: usize,
}

impl BandedLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, r) = (self.f.n, self.f.r);
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(r);
            let s: f64 = (lo..i).map(|j| self.f.get(i, j) * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let hi = (i + r + 1).min(n);
            let s: f64 = (i + 1..hi).map(|j| self.f.get(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.f.get(i, i);
        }
        x
    }
}
