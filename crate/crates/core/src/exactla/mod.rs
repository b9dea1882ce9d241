//! Exact linear algebra over ℤ, ℚ and prime fields.
//!
//! Matrices built by this crate have small integer entries, so [`SparseMatrix`]
//! stores `i64` values; every elimination that can grow entries (Smith normal form,
//! rank over ℚ) runs on arbitrary-precision integers internally.

mod complex;
pub mod field;
mod snf;

pub use complex::{half, GradedComplex, HomologyGroup, HomologySummary};
pub use snf::{rank_over, smith_normal_form, Snf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("NotAComplex: d_out * d_in is nonzero")]
    NotAComplex,
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("BadRing: {0}")]
    BadRing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField(u64),
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Ring {
    /// `z`, `q`, `f2`, or `fp:<prime>`.
    pub fn parse(s: &str) -> Result<Ring, ExactError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(Ring::Integers),
            "q" => Ok(Ring::Rationals),
            "f2" => Ok(Ring::PrimeField(2)),
            other => {
                let p = other
                    .strip_prefix("fp:")
                    .and_then(|t| t.parse::<u64>().ok())
                    .ok_or_else(|| ExactError::BadRing(s.to_string()))?;
                // products of two residues must fit in u64
                if !is_prime(p) || p >= 1 << 31 {
                    return Err(ExactError::BadRing(format!("{p} is not a prime below 2^31")));
                }
                Ok(Ring::PrimeField(p))
            }
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Integers)
    }

    pub fn normalize(&self, v: i64) -> i64 {
        match *self {
            Ring::PrimeField(p) => v.rem_euclid(p as i64),
            _ => v,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(2) => write!(f, "F2"),
            Ring::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// Column-major sparse matrix; columns hold `(row, value)` pairs sorted by row with no zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub ring: Ring,
    data: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize, ring: Ring) -> Self {
        SparseMatrix { rows, cols, ring, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize, ring: Ring) -> Self {
        Self::from_triplets(n, n, ring, (0..n).map(|i| (i, i, 1)))
    }

    /// Duplicate positions are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        ring: Ring,
        entries: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        let mut data: Vec<Vec<(usize, i64)>> = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            data[c].push((r, v));
        }
        for col in &mut data {
            col.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 = last.1.checked_add(v).expect("entry overflow"),
                    _ => merged.push((r, v)),
                }
            }
            merged.iter_mut().for_each(|e| e.1 = ring.normalize(e.1));
            merged.retain(|e| e.1 != 0);
            *col = merged;
        }
        SparseMatrix { rows, cols, ring, data }
    }

    pub fn from_columns(rows: usize, ring: Ring, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns.len();
        Self::from_triplets(
            rows,
            cols,
            ring,
            columns.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v))),
        )
    }

    pub fn col(&self, c: usize) -> &[(usize, i64)] {
        &self.data[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        match self.data[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.data[c][i].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v)))
    }

    /// Reinterpret the entries over another ring (reducing modulo p when needed).
    pub fn over(&self, ring: Ring) -> Self {
        Self::from_triplets(self.rows, self.cols, ring, self.triplets())
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.ring, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_triplets(self.rows, self.cols, self.ring, self.triplets().map(|(r, c, v)| (r, c, v * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self::from_triplets(self.rows, self.cols, self.ring, self.triplets().chain(other.triplets()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Vec::with_capacity(other.cols);
        let mut acc: Vec<i128> = vec![0; self.rows];
        let mut touched: Vec<usize> = Vec::new();
        for c in 0..other.cols {
            for &(k, b) in &other.data[c] {
                for &(r, a) in &self.data[k] {
                    if acc[r] == 0 {
                        touched.push(r);
                    }
                    acc[r] += a as i128 * b as i128;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::with_capacity(touched.len());
            for &r in &touched {
                let v = match self.ring {
                    Ring::PrimeField(p) => acc[r].rem_euclid(p as i128) as i64,
                    _ => i64::try_from(acc[r]).expect("entry overflow"),
                };
                if v != 0 {
                    col.push((r, v));
                }
                acc[r] = 0;
            }
            touched.clear();
            out.push(col);
        }
        SparseMatrix { rows: self.rows, cols: other.cols, ring: self.ring, data: out }
    }

    /// Apply to a dense vector.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![0i64; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc != 0 {
                for &(r, v) in &self.data[c] {
                    y[r] = self.ring.normalize(y[r] + v * xc);
                }
            }
        }
        y
    }

    /// Restrict to the given row and column index lists (in that order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.rows];
        for (i, &r) in rows.iter().enumerate() {
            pos[r] = i;
        }
        let data = cols
            .iter()
            .map(|&c| {
                self.data[c].iter().filter(|e| pos[e.0] != usize::MAX).map(|&(r, v)| (pos[r], v)).collect::<Vec<_>>()
            })
            .map(|mut col| {
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols: cols.len(), ring: self.ring, data }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            m[r][c] = v;
        }
        m
    }

    pub fn from_dense(m: &[Vec<i64>], ring: Ring) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        Self::from_triplets(
            rows,
            cols,
            ring,
            m.iter().enumerate().flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v))),
        )
    }

    /// Matrix Market coordinate format (1-based), for debugging with external tools.
    pub fn to_matrix_market(&self) -> String {
        let mut s = format!("%%MatrixMarket matrix coordinate integer general\n% ring {}\n", self.ring);
        s += &format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (r, c, v) in self.triplets() {
            s += &format!("{} {} {}\n", r + 1, c + 1, v);
        }
        s
    }
}

/// Rank of the homology of `C --d_in--> H --d_out--> C'` over a ring.
pub fn homology(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<HomologyGroup, ExactError> {
    if d_in.rows != d_out.cols {
        return Err(ExactError::DimensionMismatch(format!(
            "d_in has {} rows, d_out has {} columns",
            d_in.rows, d_out.cols
        )));
    }
    if !d_out.mul(d_in).is_zero() {
        return Err(ExactError::NotAComplex);
    }
    let ring = d_in.ring;
    let dim = d_in.rows;
    if ring == Ring::Integers {
        let s_in = smith_normal_form(d_in);
        let s_out = smith_normal_form(d_out);
        Ok(HomologyGroup { rank: dim - s_out.rank - s_in.rank, torsion: s_in.torsion() })
    } else {
        Ok(HomologyGroup { rank: dim - rank_over(d_out, ring) - rank_over(d_in, ring), torsion: Vec::new() })
    }
}

/// Determinant of a square integer matrix by fraction-free (Bareiss) elimination.
pub fn integer_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
