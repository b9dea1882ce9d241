//! Dense linear algebra over a field: echelon forms, kernels, spans.

use super::snf::inv_mod;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::Debug;

pub trait Field: Sync + Send {
    type E: Clone + PartialEq + Debug + Send + Sync;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn embed(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }
}

/// The prime field 𝔽_p with p < 2^31.
#[derive(Debug, Clone, Copy)]
pub struct Fp(pub u64);

impl Field for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn embed(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        inv_mod(*a, self.0)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// The rationals, with arbitrary-precision numerators and denominators.
#[derive(Debug, Clone, Copy)]
pub struct Qq;

impl Field for Qq {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn embed(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Run `body` with the field named by a ring tag (ℚ for `Integers`).
#[macro_export]
macro_rules! with_field {
    ($ring:expr, $f:ident => $body:expr) => {
        match $ring {
            $crate::exactla::Ring::PrimeField(p) => {
                let $f = $crate::exactla::field::Fp(p);
                $body
            }
            _ => {
                let $f = $crate::exactla::field::Qq;
                $body
            }
        }
    };
}

/// Reduced row echelon form in place; returns the pivot columns, one per nonzero row.
/// Zero rows are dropped.
pub fn rref<F: Field>(f: &F, rows: &mut Vec<Vec<F::E>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !f.is_zero(&rows[i][c])) else { continue };
        rows.swap(r, p);
        let inv = f.inv(&rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !f.is_zero(&row[c]) {
                let k = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row).skip(c) {
                    if !f.is_zero(y) {
                        *x = f.sub(x, &f.mul(&k, y));
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<F: Field>(f: &F, rows: &[Vec<F::E>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m, ncols).len()
}

/// Basis of `{x : M x = 0}` where `M` is given by rows of length `ncols`.
pub fn kernel<F: Field>(f: &F, rows: &[Vec<F::E>], ncols: usize) -> Vec<Vec<F::E>> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m, ncols);
    let mut is_pivot = vec![usize::MAX; ncols];
    for (i, &c) in pivots.iter().enumerate() {
        is_pivot[c] = i;
    }
    (0..ncols)
        .filter(|&c| is_pivot[c] == usize::MAX)
        .map(|free| {
            let mut v = vec![f.zero(); ncols];
            v[free] = f.one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(&m[i][free]);
            }
            v
        })
        .collect()
}

/// Multiply a matrix (rows) by a vector.
pub fn mat_vec<F: Field>(f: &F, rows: &[Vec<F::E>], x: &[F::E]) -> Vec<F::E> {
    rows.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(a, b)| !f.is_zero(a) && !f.is_zero(b))
                .fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
        })
        .collect()
}

/// Solve `M x = b`; `None` if inconsistent.
pub fn solve<F: Field>(f: &F, rows: &[Vec<F::E>], ncols: usize, b: &[F::E]) -> Option<Vec<F::E>> {
    let mut aug: Vec<Vec<F::E>> = rows
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(f, &mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![f.zero(); ncols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_rank() {
        let f = Qq;
        let m: Vec<Vec<_>> = [[1, 2, 3], [2, 4, 6]].iter().map(|r| r.iter().map(|&v| f.embed(v)).collect()).collect();
        assert_eq!(rank(&f, &m, 3), 1);
        let k = kernel(&f, &m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&f, &m, v).iter().all(|x| f.is_zero(x)));
        }
        let g = Fp(2);
        let m2: Vec<Vec<u64>> = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(rank(&g, &m2, 2), 1);
        assert_eq!(solve(&g, &m2, 2, &[1, 0]), None);
        assert_eq!(solve(&g, &m2, 2, &[1, 1]), Some(vec![1, 0]));
    }
}
