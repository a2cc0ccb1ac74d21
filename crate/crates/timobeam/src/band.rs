//! Symmetric banded storage and Cholesky factorization for the global
//! normal equations.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Symmetric matrix stored by its lower band. Entry `(i, j)` with
/// `i - half_bw <= j <= i` lives at `data[i * (half_bw + 1) + j - i + half_bw]`.
#[derive(Clone, Debug)]
pub struct SymBandMatrix {
    dim: usize,
    half_bw: usize,
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(dim: usize, half_bw: usize) -> Self {
        SymBandMatrix {
            dim,
            half_bw,
            data: vec![0.0; dim * (half_bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bw
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * (self.half_bw + 1) + j + self.half_bw - i
    }

    /// Symmetric read; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.half_bw {
            0.0
        } else {
            self.data[self.index(i, j)]
        }
    }

    /// Accumulate into entry `(i, j)`; the pair must lie within the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.half_bw, "entry ({i}, {j}) outside the band");
        let idx = self.index(i, j);
        self.data[idx] += v;
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = DVector::zeros(self.dim);
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.half_bw);
            let mut acc = 0.0;
            for j in lo..i {
                let v = self.data[self.index(i, j)];
                acc += v * x[j];
                y[j] += v * x[i];
            }
            acc += self.data[self.index(i, i)] * x[i];
            y[i] += acc;
        }
        y
    }

    /// Residual `b - A x` accumulated in compensated (double-double)
    /// arithmetic. A plain f64 evaluation loses the residual to
    /// cancellation once `x` is close to the solution, which stalls
    /// iterative refinement; carrying the rounding error of every product
    /// and sum keeps the result accurate at the scale of the true residual.
    pub fn residual(&self, x: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(b.len(), self.dim);
        let mut r = DVector::zeros(self.dim);
        for i in 0..self.dim {
            let mut hi = b[i];
            let mut lo = 0.0;
            let jlo = i.saturating_sub(self.half_bw);
            let jhi = (i + self.half_bw).min(self.dim - 1);
            for j in jlo..=jhi {
                let a = self.get(i, j);
                if a == 0.0 {
                    continue;
                }
                let p = -a * x[j];
                let p_err = (-a).mul_add(x[j], -p);
                let s = hi + p;
                let t = s - hi;
                let s_err = (hi - (s - t)) + (p - t);
                hi = s;
                lo += s_err + p_err;
            }
            r[i] = hi + lo;
        }
        r
    }

    /// Dense copy, for tests and small diagnostics.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in i.saturating_sub(self.half_bw)..=i {
                let v = self.data[self.index(i, j)];
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Banded Cholesky factorization `A = L L^T`. Fails if a pivot is not
    /// strictly positive, which signals loss of positive definiteness.
    pub fn cholesky(&self) -> Result<BandCholesky> {
        let hbw = self.half_bw;
        let mut l = self.data.clone();
        let stride = hbw + 1;
        for j in 0..self.dim {
            let lo = j.saturating_sub(hbw);
            let mut d = l[j * stride + hbw];
            for k in lo..j {
                let v = l[j * stride + k + hbw - j];
                d -= v * v;
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let d = d.sqrt();
            l[j * stride + hbw] = d;
            let hi = (j + hbw).min(self.dim - 1);
            for i in (j + 1)..=hi {
                let mut s = l[i * stride + j + hbw - i];
                for k in i.saturating_sub(hbw)..j {
                    s -= l[i * stride + k + hbw - i] * l[j * stride + k + hbw - j];
                }
                l[i * stride + j + hbw - i] = s / d;
            }
        }
        Ok(BandCholesky {
            dim: self.dim,
            half_bw: hbw,
            l,
        })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    dim: usize,
    half_bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Solve `A x = b` by forward and back substitution.
    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        assert_eq!(b.len(), self.dim);
        let stride = self.half_bw + 1;
        let mut x = b.clone();
        for i in 0..self.dim {
            let lo = i.saturating_sub(self.half_bw);
            let mut s = x[i];
            for k in lo..i {
                s -= self.l[i * stride + k + self.half_bw - i] * x[k];
            }
            x[i] = s / self.l[i * stride + self.half_bw];
        }
        for i in (0..self.dim).rev() {
            let hi = (i + self.half_bw).min(self.dim - 1);
            let mut s = x[i];
            for k in (i + 1)..=hi {
                s -= self.l[k * stride + i + self.half_bw - k] * x[k];
            }
            x[i] = s / self.l[i * stride + self.half_bw];
        }
        x
    }
}
