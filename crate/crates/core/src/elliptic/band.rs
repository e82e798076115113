//! Banded LU factorization with partial pivoting (LAPACK `dgbtrf`-style
//! storage) for the structured-grid systems assembled in this module.

use crate::error::Error;
use crate::Result;

/// General band matrix with `kl` sub- and `ku` superdiagonals, stored
/// column-major in the usual `2*kl + ku + 1` row layout (the extra `kl` rows
/// hold pivoting fill).
#[derive(Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    /// `ab[col * ldab + (kl + ku + row - col)]` holds `A[row, col]`.
    ab: Vec<f64>,
    ldab: usize,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            ab: vec![0.0; ldab * n],
            ldab,
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        debug_assert!(
            col as isize - row as isize <= self.ku as isize
                && row as isize - col as isize <= self.kl as isize,
            "entry ({row}, {col}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let idx = col * self.ldab + (self.kl + self.ku + row - col);
        self.ab[idx] += value;
    }

    #[inline]
    fn at(&self, row: usize, col: usize) -> f64 {
        self.ab[col * self.ldab + (self.kl + self.ku + row - col)]
    }

    /// Multiply the (unfactored) matrix by a vector; used for residual checks.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for col in 0..self.n {
            let row_lo = col.saturating_sub(self.ku);
            let row_hi = (col + self.kl).min(self.n - 1);
            let xc = x[col];
            for row in row_lo..=row_hi {
                y[row] += self.at(row, col) * xc;
            }
        }
        y
    }

    /// Infinity norm (max absolute row sum) of the unfactored matrix.
    pub fn inf_norm(&self) -> f64 {
        let mut sums = vec![0.0_f64; self.n];
        for col in 0..self.n {
            let row_lo = col.saturating_sub(self.ku);
            let row_hi = (col + self.kl).min(self.n - 1);
            for row in row_lo..=row_hi {
                sums[row] += self.at(row, col).abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    /// In-place LU factorization with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let ku = self.ku;
        let ldab = self.ldab;
        let kv = kl + ku;
        let mut pivots = vec![0usize; n];
        for j in 0..n {
            // Pivot search in column j, rows j..=j+kl.
            let last = (j + kl).min(n - 1);
            let mut piv_row = j;
            let mut piv_val = self.at(j, j).abs();
            for row in (j + 1)..=last {
                let v = self.at(row, j).abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = row;
                }
            }
            if piv_val == 0.0 {
                return Err(Error::LinearSolveFailed(format!(
                    "zero pivot in column {j}"
                )));
            }
            pivots[j] = piv_row;
            // Swap rows j and piv_row across the affected columns.
            if piv_row != j {
                let col_hi = (j + kv).min(n - 1);
                for col in j..=col_hi {
                    let ia = col * ldab + (kv + j - col);
                    let ib = col * ldab + (kv + piv_row - col);
                    self.ab.swap(ia, ib);
                }
            }
            // Eliminate below the pivot.
            let pivot = self.at(j, j);
            for row in (j + 1)..=last {
                let idx = j * ldab + (kv + row - j);
                let m = self.ab[idx] / pivot;
                self.ab[idx] = m;
                if m != 0.0 {
                    let col_hi = (j + kv).min(n - 1);
                    for col in (j + 1)..=col_hi {
                        let ia = col * ldab + (kv + row - col);
                        let ib = col * ldab + (kv + j - col);
                        self.ab[ia] -= m * self.ab[ib];
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku,
            ab: self.ab,
            ldab,
            pivots,
        })
    }
}

/// Factored band matrix.
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ldab: usize,
    pivots: Vec<usize>,
}

impl BandLu {
    /// Solve `A x = b`, overwriting and returning `b`.
    pub fn solve(&self, mut b: Vec<f64>) -> Vec<f64> {
        let n = self.n;
        let kv = self.kl + self.ku;
        // Forward substitution with row swaps.
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let last = (j + self.kl).min(n - 1);
            let bj = b[j];
            if bj != 0.0 {
                for row in (j + 1)..=last {
                    b[row] -= self.ab[j * self.ldab + (kv + row - j)] * bj;
                }
            }
        }
        // Back substitution with U.
        for j in (0..n).rev() {
            let col_lo = j.saturating_sub(kv);
            b[j] /= self.ab[j * self.ldab + kv];
            let bj = b[j];
            if bj != 0.0 {
                for row in col_lo..j {
                    b[row] -= self.ab[j * self.ldab + (kv + row - j)] * bj;
                }
            }
        }
        b
    }
}
