//! Symmetric positive definite systems: a banded Cholesky for the local
//! stiffness matrices and a dense one (via `nalgebra`) for pair sums.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix, row-major: row `i` stores columns
/// `i - bw ..= i`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    lower: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandedMatrix { n, bw, lower: vec![0.0; n * (bw + 1)] }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (self.bw + j - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        if i - j > self.bw {
            0.0
        } else {
            self.lower[self.slot(i, j)]
        }
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        assert!(i - j <= self.bw, "entry ({i}, {j}) outside the band {}", self.bw);
        let s = self.slot(i, j);
        self.lower[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.lower[self.slot(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky `A = L Lᵀ`.
    pub fn factor(mut self) -> Result<BandedCholesky> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = self.get(i, j);
                for k in j0.max(j.saturating_sub(bw))..j {
                    s -= self.lower[self.slot(i, k)] * self.lower[self.slot(j, k)];
                }
                let slot = self.slot(i, j);
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite);
                    }
                    self.lower[slot] = s.sqrt();
                } else {
                    self.lower[slot] = s / self.lower[self.slot(j, j)];
                }
            }
        }
        Ok(BandedCholesky { l: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    l: BandedMatrix,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..l.n {
            let mut s = y[i];
            for k in i.saturating_sub(l.bw)..i {
                s -= l.lower[l.slot(i, k)] * y[k];
            }
            y[i] = s / l.lower[l.slot(i, i)];
        }
        for i in (0..l.n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + l.bw + 1).min(l.n) {
                s -= l.lower[l.slot(k, i)] * y[k];
            }
            y[i] = s / l.lower[l.slot(i, i)];
        }
        y
    }
}

/// A symmetric matrix under assembly, banded or dense.
#[derive(Debug, Clone)]
pub enum SymMatrix {
    Banded(BandedMatrix),
    Dense(DMatrix<f64>),
}

impl SymMatrix {
    pub fn banded(n: usize, bw: usize) -> Self {
        SymMatrix::Banded(BandedMatrix::zeros(n, bw))
    }

    pub fn dense(n: usize) -> Self {
        SymMatrix::Dense(DMatrix::zeros(n, n))
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        match self {
            SymMatrix::Banded(b) => b.add(i, j, v),
            SymMatrix::Dense(d) => {
                d[(i, j)] += v;
                if i != j {
                    d[(j, i)] += v;
                }
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            SymMatrix::Banded(b) => b.mul_vec(x),
            SymMatrix::Dense(d) => (d * DVector::from_column_slice(x)).as_slice().to_vec(),
        }
    }

    pub fn factor(self) -> Result<Factor> {
        match self {
            SymMatrix::Banded(b) => b.factor().map(Factor::Banded),
            SymMatrix::Dense(d) => d.cholesky().map(Factor::Dense).ok_or(Error::NotPositiveDefinite),
        }
    }
}

/// A factored SPD matrix.
#[derive(Clone)]
pub enum Factor {
    Banded(BandedCholesky),
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
}

impl Factor {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            Factor::Banded(c) => c.solve(b),
            Factor::Dense(c) => c.solve(&DVector::from_column_slice(b)).as_slice().to_vec(),
        }
    }
}
