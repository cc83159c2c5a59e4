//! Complex band matrices and their LU factorization.
//!
//! Storage is row-major with `kl` sub- and `ku` super-diagonals; entry
//! `(i, j)` lives at `data[i * width + (j + kl - i)]`. The factorization
//! follows the usual banded Gaussian elimination: with partial pivoting the
//! upper factor widens to `kl + ku` super-diagonals, without pivoting it
//! keeps `ku`.

use num_complex::Complex64;
use thiserror::Error;

use crate::amplitude::wrap_phase;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BandError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("zero pivot at row {row}")]
    ZeroPivot { row: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        // bandwidths beyond n - 1 carry no entries
        let kl = kl.min(n.saturating_sub(1));
        let ku = ku.min(n.saturating_sub(1));
        Self {
            n,
            kl,
            ku,
            data: vec![ZERO; n * (kl + ku + 1)],
        }
    }

    /// Packs a dense square matrix, choosing the tightest band that holds
    /// every nonzero entry.
    pub fn from_dense(rows: &[Vec<Complex64>]) -> Result<Self, BandError> {
        let n = rows.len();
        let (mut kl, mut ku) = (0, 0);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(BandError::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                if *v != ZERO {
                    if j < i {
                        kl = kl.max(i - j);
                    } else {
                        ku = ku.max(j - i);
                    }
                }
            }
        }
        let mut band = Self::zeros(n, kl, ku);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v != ZERO {
                    band.set(i, j, *v);
                }
            }
        }
        Ok(band)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if self.in_band(i, j) {
            self.data[i * self.width() + (j + self.kl - i)]
        } else {
            ZERO
        }
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band (kl={}, ku={})",
            self.kl,
            self.ku
        );
        let w = self.width();
        self.data[i * w + (j + self.kl - i)] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: Complex64) {
        let v = self.get(i, j);
        self.set(i, j, v + value);
    }

    /// Column range `[lo, hi)` stored for row `i`.
    pub fn row_span(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.kl), (i + self.ku + 1).min(self.n))
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let (lo, hi) = self.row_span(i);
        (lo..hi).map(move |j| (j, self.get(i, j)))
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>, BandError> {
        self.check_len(x.len())?;
        Ok((0..self.n)
            .map(|i| self.row(i).map(|(j, a)| a * x[j]).sum())
            .collect())
    }

    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Same matrix stored with wider bandwidths.
    pub fn widened(&self, kl: usize, ku: usize) -> Self {
        let mut out = Self::zeros(self.n, kl.max(self.kl), ku.max(self.ku));
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out.set(j, i, v);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_len(&self, len: usize) -> Result<(), BandError> {
        if len != self.n {
            return Err(BandError::DimensionMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }

    /// LU factorization. With `pivoting = false` the elimination runs in
    /// natural order, which is what the branch tracking in
    /// [`crate::action`] relies on.
    pub fn factor(&self, pivoting: bool) -> Result<BandLu, BandError> {
        let n = self.n;
        let kl = self.kl;
        let uw = if pivoting { kl + self.ku } else { self.ku };
        // working rows hold columns [i - kl, i + kl + ku]
        let ww = 2 * kl + self.ku + 1;
        let idx = |i: usize, j: usize| i * ww + (j + kl - i);
        let mut work = vec![ZERO; n * ww];
        for i in 0..n {
            for (j, v) in self.row(i) {
                work[idx(i, j)] = v;
            }
        }

        let mut mult = vec![ZERO; n * kl];
        let mut piv = Vec::with_capacity(n);
        let mut swaps = 0usize;

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + uw).min(n - 1);

            let mut p = k;
            if pivoting {
                let mut best = work[idx(k, k)].norm();
                for i in k + 1..=last_row {
                    let v = work[idx(i, k)].norm();
                    if v > best {
                        best = v;
                        p = i;
                    }
                }
                if p != k {
                    swaps += 1;
                    for j in k..=last_col {
                        work.swap(idx(k, j), idx(p, j));
                    }
                }
            }
            piv.push(p);

            let pivot = work[idx(k, k)];
            if pivot == ZERO {
                return Err(BandError::ZeroPivot { row: k });
            }
            for i in k + 1..=last_row {
                let a = work[idx(i, k)];
                if a == ZERO {
                    continue;
                }
                let l = a / pivot;
                mult[k * kl + (i - k - 1)] = l;
                work[idx(i, k)] = ZERO;
                for j in k + 1..=last_col {
                    let u = work[idx(k, j)];
                    work[idx(i, j)] -= l * u;
                }
            }
        }

        let mut upper = vec![ZERO; n * (uw + 1)];
        for i in 0..n {
            for j in i..=(i + uw).min(n - 1) {
                upper[i * (uw + 1) + (j - i)] = work[idx(i, j)];
            }
        }

        Ok(BandLu {
            n,
            kl,
            uw,
            upper,
            mult,
            piv,
            swaps,
        })
    }
}

/// `P A = L U` for a band matrix.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    uw: usize,
    upper: Vec<Complex64>,
    mult: Vec<Complex64>,
    piv: Vec<usize>,
    swaps: usize,
}

/// `ln det` split into magnitude and a phase in (−π, π].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Diagonal of `U`.
    pub fn pivots(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |i| self.upper[i * (self.uw + 1)])
    }

    pub fn row_swaps(&self) -> usize {
        self.swaps
    }

    pub fn log_det(&self) -> LogDet {
        let mut log_magnitude = 0.0;
        let mut phase = if self.swaps % 2 == 1 {
            std::f64::consts::PI
        } else {
            0.0
        };
        for p in self.pivots() {
            log_magnitude += p.norm().ln();
            // keep the running phase small so the sum does not lose digits
            phase = wrap_phase(phase + p.arg());
        }
        LogDet {
            log_magnitude,
            phase,
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>, BandError> {
        let n = self.n;
        if rhs.len() != n {
            return Err(BandError::DimensionMismatch {
                expected: n,
                actual: rhs.len(),
            });
        }
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.mult[k * self.kl + (i - k - 1)] * xk;
            }
        }
        let w = self.uw + 1;
        for i in (0..n).rev() {
            let row = &self.upper[i * w..(i + 1) * w];
            let mut acc = x[i];
            for j in i + 1..=(i + self.uw).min(n - 1) {
                acc -= row[j - i] * x[j];
            }
            x[i] = acc / row[0];
        }
        Ok(x)
    }
}
