use super::{Ring, SparseMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Smith normal form data: the nonzero invariant factors `d_1 | d_2 | ... | d_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
}

impl Snf {
    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work {
    rows: Vec<BTreeMap<usize, BigInt>>,
    cols: Vec<BTreeSet<usize>>,
}

impl Work {
    fn new(m: &SparseMatrix) -> Self {
        let mut rows = vec![BTreeMap::new(); m.rows];
        let mut cols = vec![BTreeSet::new(); m.cols];
        for (r, c, v) in m.triplets() {
            rows[r].insert(c, BigInt::from(v));
            cols[c].insert(r);
        }
        Work { rows, cols }
    }

    /// row_i -= q * row_r
    fn row_op(&mut self, i: usize, r: usize, q: &BigInt) {
        let src: Vec<(usize, BigInt)> = self.rows[r].iter().map(|(c, v)| (*c, v.clone())).collect();
        for (c, v) in src {
            let e = self.rows[i].entry(c).or_insert_with(BigInt::zero);
            *e -= q * v;
            if e.is_zero() {
                self.rows[i].remove(&c);
                self.cols[c].remove(&i);
            } else {
                self.cols[c].insert(i);
            }
        }
    }

    /// col_j -= q * col_c
    fn col_op(&mut self, j: usize, c: usize, q: &BigInt) {
        let src: Vec<usize> = self.cols[c].iter().copied().collect();
        for i in src {
            let v = self.rows[i][&c].clone();
            let e = self.rows[i].entry(j).or_insert_with(BigInt::zero);
            *e -= q * v;
            if e.is_zero() {
                self.rows[i].remove(&j);
                self.cols[j].remove(&i);
            } else {
                self.cols[j].insert(i);
            }
        }
    }
}

/// Sparse Smith normal form over ℤ with smallest-entry pivots and Markowitz tie-breaking.
/// The rank is certified against an independent elimination over ℚ.
pub fn smith_normal_form(m: &SparseMatrix) -> Snf {
    assert_eq!(m.ring, Ring::Integers, "Smith normal form needs an integer matrix");
    let mut w = Work::new(m);
    let mut alive: BTreeSet<usize> = (0..m.rows).filter(|&r| !w.rows[r].is_empty()).collect();
    let mut diag: Vec<BigInt> = Vec::new();
    loop {
        let mut best: Option<(BigInt, usize, usize, usize)> = None;
        'scan: for &r in &alive {
            let lr = w.rows[r].len() - 1;
            for (&c, v) in &w.rows[r] {
                let key = (v.abs(), lr * (w.cols[c].len() - 1), r, c);
                if best.as_ref().is_none_or(|b| (&key.0, key.1) < (&b.0, b.1)) {
                    let done = key.0.is_one() && key.1 == 0;
                    best = Some(key);
                    if done {
                        break 'scan;
                    }
                }
            }
        }
        let Some((_, _, r, c)) = best else { break };
        let p = w.rows[r][&c].clone();
        let mut clean = true;
        for i in w.cols[c].iter().copied().filter(|&i| i != r).collect::<Vec<_>>() {
            let a = w.rows[i][&c].clone();
            let (q, rem) = a.div_mod_floor(&p);
            if !rem.is_zero() {
                clean = false;
            }
            if !q.is_zero() {
                w.row_op(i, r, &q);
            }
            if w.rows[i].is_empty() {
                alive.remove(&i);
            }
        }
        if !clean {
            continue;
        }
        for j in w.rows[r].keys().copied().filter(|&j| j != c).collect::<Vec<_>>() {
            let a = w.rows[r][&j].clone();
            let (q, rem) = a.div_mod_floor(&p);
            if !rem.is_zero() {
                clean = false;
            }
            if !q.is_zero() {
                w.col_op(j, c, &q);
            }
        }
        if !clean {
            continue;
        }
        debug_assert_eq!(w.rows[r].len(), 1);
        w.rows[r].clear();
        w.cols[c].clear();
        alive.remove(&r);
        diag.push(p.abs());
    }
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    let rank = diag.len();
    assert_eq!(rank, rank_over(m, Ring::Rationals), "SNF rank disagrees with rank over Q");
    Snf { diagonal: diag, rank }
}

/// Rank over ℚ (for `Integers` or `Rationals`) or over 𝔽_p.
pub fn rank_over(m: &SparseMatrix, ring: Ring) -> usize {
    match ring {
        Ring::PrimeField(p) => rank_mod_p(m, p),
        _ => rank_rational(m),
    }
}

fn rank_rational(m: &SparseMatrix) -> usize {
    // Fraction-free incremental echelon form on the columns, kept primitive.
    let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    let mut cols: Vec<Vec<(usize, BigInt)>> =
        (0..m.cols).map(|c| m.col(c).iter().map(|&(r, v)| (r, BigInt::from(v))).collect()).collect();
    cols.sort_by_key(Vec::len);
    for mut v in cols {
        while let Some((lead, a)) = v.first().cloned() {
            let Some(piv) = pivots.get(&lead) else {
                let g = v.iter().fold(BigInt::zero(), |g, e| g.gcd(&e.1));
                v.iter_mut().for_each(|e| e.1 /= &g);
                pivots.insert(lead, v);
                break;
            };
            let b = &piv[0].1;
            v = combine(&v, b, piv, &a);
        }
    }
    pivots.len()
}

/// `b * v - a * w`, divided by its content.
fn combine(v: &[(usize, BigInt)], b: &BigInt, w: &[(usize, BigInt)], a: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let (idx, val) = match (v.get(i), w.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                i += 1;
                j += 1;
                (x.0, b * &x.1 - a * &y.1)
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                i += 1;
                (x.0, b * &x.1)
            }
            (Some(x), None) => {
                i += 1;
                (x.0, b * &x.1)
            }
            (_, Some(y)) => {
                j += 1;
                (y.0, -(a * &y.1))
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((idx, val));
        }
    }
    let g = out.iter().fold(BigInt::zero(), |g, e| g.gcd(&e.1));
    if !g.is_zero() && !g.is_one() {
        out.iter_mut().for_each(|e| e.1 /= &g);
    }
    out
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    t0.rem_euclid(p as i128) as u64
}

fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, u64)>> = BTreeMap::new();
    let pp = p as i64;
    let mut cols: Vec<Vec<(usize, u64)>> = (0..m.cols)
        .map(|c| {
            m.col(c)
                .iter()
                .filter_map(|&(r, v)| {
                    let x = v.rem_euclid(pp) as u64;
                    (x != 0).then_some((r, x))
                })
                .collect()
        })
        .collect();
    cols.sort_by_key(Vec::len);
    for mut v in cols {
        while let Some(&(lead, a)) = v.first() {
            let Some(piv) = pivots.get(&lead) else {
                let inv = inv_mod(a, p);
                v.iter_mut().for_each(|e| e.1 = e.1 * inv % p);
                pivots.insert(lead, v);
                break;
            };
            // v -= a * piv (piv has leading coefficient 1)
            let mut out = Vec::with_capacity(v.len() + piv.len());
            let (mut i, mut j) = (0, 0);
            while i < v.len() || j < piv.len() {
                let (idx, val) = match (v.get(i), piv.get(j)) {
                    (Some(x), Some(y)) if x.0 == y.0 => {
                        i += 1;
                        j += 1;
                        (x.0, (x.1 + p - a * y.1 % p) % p)
                    }
                    (Some(x), Some(y)) if x.0 < y.0 => {
                        i += 1;
                        (x.0, x.1)
                    }
                    (Some(x), None) => {
                        i += 1;
                        (x.0, x.1)
                    }
                    (_, Some(y)) => {
                        j += 1;
                        (y.0, (p - a * y.1 % p) % p)
                    }
                    (None, None) => unreachable!(),
                };
                if val != 0 {
                    out.push((idx, val));
                }
            }
            v = out;
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_examples() {
        let m = SparseMatrix::from_dense(&[vec![2, 4], vec![6, 8]], Ring::Integers);
        assert_eq!(smith_normal_form(&m).diagonal, big(&[2, 4]));
        let z = SparseMatrix::zeros(3, 4, Ring::Integers);
        let s = smith_normal_form(&z);
        assert_eq!((s.rank, s.diagonal.len()), (0, 0));
        let s = smith_normal_form(&SparseMatrix::identity(3, Ring::Integers));
        assert_eq!(s.diagonal, big(&[1, 1, 1]));
        assert!(s.torsion().is_empty());
        let e = SparseMatrix::zeros(0, 0, Ring::Integers);
        assert_eq!(smith_normal_form(&e).rank, 0);
    }

    #[test]
    fn chain_is_fixed() {
        let m = SparseMatrix::from_dense(&[vec![4, 0], vec![0, 6]], Ring::Integers);
        assert_eq!(smith_normal_form(&m).diagonal, big(&[2, 12]));
    }

    #[test]
    fn ranks_over_fields() {
        let m = SparseMatrix::from_dense(&[vec![2, 0], vec![0, 3]], Ring::Integers);
        assert_eq!(rank_over(&m, Ring::Rationals), 2);
        assert_eq!(rank_over(&m, Ring::PrimeField(2)), 1);
        assert_eq!(rank_over(&m, Ring::PrimeField(3)), 1);
        assert_eq!(rank_over(&m, Ring::PrimeField(5)), 2);
    }
}
