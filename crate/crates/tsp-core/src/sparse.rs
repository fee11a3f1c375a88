//! Compressed sparse-column storage for signed incidence matrices.
//!
//! Entries are restricted to {-1, +1}; absent entries are zero. Products and
//! Gram matrices are accumulated in `i64`, so identities such as the
//! boundary-of-boundary vanishing can be checked exactly.

use nalgebra::{DMatrix, DVector};

/// Signed incidence matrix in CSC layout.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    signs: Vec<i8>,
}

impl IncidenceMatrix {
    /// Builds the matrix from per-column entry lists of `(row, sign)`.
    ///
    /// Rows within a column must be strictly increasing; signs must be ±1.
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, i8)>]) -> Self {
        let ncols = columns.len();
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        let mut row_idx = Vec::new();
        let mut signs = Vec::new();
        col_ptr.push(0);
        for col in columns {
            let mut prev: Option<usize> = None;
            for &(r, s) in col {
                assert!(r < nrows, "row index out of range");
                assert!(s == 1 || s == -1, "entries must be +1 or -1");
                assert!(prev.is_none_or(|p| p < r), "rows must be strictly increasing");
                prev = Some(r);
                row_idx.push(r);
                signs.push(s);
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            nrows,
            ncols,
            col_ptr,
            row_idx,
            signs,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Entries of column `j` as `(row, sign)` pairs.
    pub fn col(&self, j: usize) -> impl Iterator<Item = (usize, i8)> + '_ {
        let lo = self.col_ptr[j];
        let hi = self.col_ptr[j + 1];
        self.row_idx[lo..hi]
            .iter()
            .zip(&self.signs[lo..hi])
            .map(|(&r, &s)| (r, s))
    }

    /// Per-row entry lists `(col, sign)`.
    fn rows(&self) -> Vec<Vec<(usize, i8)>> {
        let mut rows = vec![Vec::new(); self.nrows];
        for j in 0..self.ncols {
            for (r, s) in self.col(j) {
                rows[r].push((j, s));
            }
        }
        rows
    }

    /// Exact integer product `self * other` as a dense matrix.
    pub fn mul(&self, other: &IncidenceMatrix) -> DMatrix<i64> {
        assert_eq!(self.ncols, other.nrows, "inner dimensions must agree");
        let mut out = DMatrix::<i64>::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            for (k, s_kj) in other.col(j) {
                for (i, s_ik) in self.col(k) {
                    out[(i, j)] += i64::from(s_ik) * i64::from(s_kj);
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.ncols, "vector length must match columns");
        let mut out = DVector::zeros(self.nrows);
        for j in 0..self.ncols {
            let xj = x[j];
            for (r, s) in self.col(j) {
                out[r] += f64::from(s) * xj;
            }
        }
        out
    }

    /// `selfᵀ * x`.
    pub fn apply_transpose(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.nrows, "vector length must match rows");
        let mut out = DVector::zeros(self.ncols);
        for j in 0..self.ncols {
            let mut acc = 0.0;
            for (r, s) in self.col(j) {
                acc += f64::from(s) * x[r];
            }
            out[j] = acc;
        }
        out
    }

    /// Exact Gram matrix `selfᵀ * self` (lower product).
    pub fn gram_down(&self) -> DMatrix<i64> {
        let mut out = DMatrix::<i64>::zeros(self.ncols, self.ncols);
        for row in self.rows() {
            for &(c1, s1) in &row {
                for &(c2, s2) in &row {
                    out[(c1, c2)] += i64::from(s1) * i64::from(s2);
                }
            }
        }
        out
    }

    /// Exact Gram matrix `self * selfᵀ` (upper product).
    pub fn gram_up(&self) -> DMatrix<i64> {
        let mut out = DMatrix::<i64>::zeros(self.nrows, self.nrows);
        for j in 0..self.ncols {
            let entries: Vec<(usize, i8)> = self.col(j).collect();
            for &(r1, s1) in &entries {
                for &(r2, s2) in &entries {
                    out[(r1, r2)] += i64::from(s1) * i64::from(s2);
                }
            }
        }
        out
    }

    pub fn to_dense_i64(&self) -> DMatrix<i64> {
        let mut out = DMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for (r, s) in self.col(j) {
                out[(r, j)] = i64::from(s);
            }
        }
        out
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        self.to_dense_i64().map(|v| v as f64)
    }

    /// Rank over GF(p) with p = 2^31 - 1.
    ///
    /// For integer matrices this lower-bounds the rational rank and equals it
    /// unless p divides a determinantal divisor, which is vanishingly rare;
    /// callers treat it as an independent cross-check, not a primary result.
    pub fn rank_mod_p(&self) -> usize {
        const P: u64 = 2_147_483_647;
        let (nr, nc) = (self.nrows, self.ncols);
        let mut m = vec![0u64; nr * nc];
        for j in 0..nc {
            for (r, s) in self.col(j) {
                m[r * nc + j] = if s > 0 { 1 } else { P - 1 };
            }
        }
        let mut rank = 0;
        let mut col = 0;
        while rank < nr && col < nc {
            let pivot = (rank..nr).find(|&i| m[i * nc + col] != 0);
            let Some(pivot) = pivot else {
                col += 1;
                continue;
            };
            if pivot != rank {
                for j in col..nc {
                    m.swap(rank * nc + j, pivot * nc + j);
                }
            }
            let inv = mod_inv(m[rank * nc + col], P);
            for j in col..nc {
                m[rank * nc + j] = m[rank * nc + j] * inv % P;
            }
            for i in 0..nr {
                if i == rank {
                    continue;
                }
                let f = m[i * nc + col];
                if f == 0 {
                    continue;
                }
                for j in col..nc {
                    let sub = f * m[rank * nc + j] % P;
                    m[i * nc + j] = (m[i * nc + j] + P - sub) % P;
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    /// Work estimate for `rank_mod_p`, used to gate the cross-check.
    pub fn rank_work_estimate(&self) -> usize {
        self.nrows * self.ncols * self.nrows.min(self.ncols)
    }
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p.
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}
