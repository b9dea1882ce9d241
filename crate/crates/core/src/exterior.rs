//! Sign bookkeeping for exterior monomials `y_u = y_{i_1} ∧ … ∧ y_{i_k}` (i_1 < … < i_k)
//! stored as bitmasks.

use std::collections::BTreeMap;

fn below(mask: u32, p: usize) -> u32 {
    (mask & ((1u32 << p) - 1)).count_ones()
}

fn above(mask: u32, p: usize) -> u32 {
    (mask >> p >> 1).count_ones()
}

/// `y_p ∧ y_u`.
pub fn wedge_left(p: usize, u: u32) -> Option<(i64, u32)> {
    if u >> p & 1 == 1 {
        return None;
    }
    Some((if below(u, p).is_multiple_of(2) { 1 } else { -1 }, u | 1 << p))
}

/// `y_u ∧ y_p`.
pub fn wedge_right(u: u32, p: usize) -> Option<(i64, u32)> {
    if u >> p & 1 == 1 {
        return None;
    }
    Some((if above(u, p).is_multiple_of(2) { 1 } else { -1 }, u | 1 << p))
}

/// Left contraction `y_p^*(y_u)`.
pub fn contract(p: usize, u: u32) -> Option<(i64, u32)> {
    if u >> p & 1 == 0 {
        return None;
    }
    Some((if below(u, p).is_multiple_of(2) { 1 } else { -1 }, u & !(1 << p)))
}

/// `y_a ∧ y_b`.
pub fn wedge(a: u32, b: u32) -> Option<(i64, u32)> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros() as usize;
        inversions += above(a, j);
        bb &= bb - 1;
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, a | b))
}

/// Element of an exterior algebra with integer coefficients.
pub type ExtElem = BTreeMap<u32, i64>;

pub fn ext_add(into: &mut ExtElem, mask: u32, c: i64) {
    if c == 0 {
        return;
    }
    let e = into.entry(mask).or_insert(0);
    *e += c;
    if *e == 0 {
        into.remove(&mask);
    }
}

pub fn ext_mul(a: &ExtElem, b: &ExtElem) -> ExtElem {
    let mut out = ExtElem::new();
    for (&ma, &ca) in a {
        for (&mb, &cb) in b {
            if let Some((s, m)) = wedge(ma, mb) {
                ext_add(&mut out, m, s * ca * cb);
            }
        }
    }
    out
}

/// Product of linear forms `ℓ_1 ∧ ℓ_2 ∧ …`, each given as `(index, coefficient)` pairs.
pub fn wedge_forms(forms: &[Vec<(usize, i64)>]) -> ExtElem {
    let mut acc = ExtElem::from([(0u32, 1i64)]);
    for f in forms {
        let mut next = ExtElem::new();
        for (&m, &c) in &acc {
            for &(i, a) in f {
                if let Some((s, m2)) = wedge_right(m, i) {
                    ext_add(&mut next, m2, s * c * a);
                }
            }
        }
        acc = next;
    }
    acc
}

/// Indices of the set bits, increasing.
pub fn bits(mut m: u32) -> Vec<usize> {
    let mut v = Vec::with_capacity(m.count_ones() as usize);
    while m != 0 {
        v.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    v
}

/// Sign of the permutation `i -> perm[i]`.
pub fn perm_sign(perm: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_signs() {
        // y1 ∧ y0 = -y0 y1
        assert_eq!(wedge_left(1, 0b01), Some((-1, 0b11)));
        assert_eq!(wedge_left(0, 0b10), Some((1, 0b11)));
        assert_eq!(wedge_right(0b10, 0), Some((-1, 0b11)));
        assert_eq!(contract(1, 0b11), Some((-1, 0b01)));
        assert_eq!(wedge_left(0, 0b1), None);
    }

    proptest! {
        #[test]
        fn contraction_is_a_derivation(u in 0u32..64, p in 0usize..6, q in 0usize..6) {
            // y_p^* y_q + y_q y_p^* = δ_{pq}
            let mut lhs = ExtElem::new();
            if let Some((s1, m1)) = wedge_left(q, u) {
                if let Some((s2, m2)) = contract(p, m1) { ext_add(&mut lhs, m2, s1 * s2); }
            }
            if let Some((s1, m1)) = contract(p, u) {
                if let Some((s2, m2)) = wedge_left(q, m1) { ext_add(&mut lhs, m2, s1 * s2); }
            }
            let mut rhs = ExtElem::new();
            if p == q { ext_add(&mut rhs, u, 1); }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_is_associative(a in 0u32..32, b in 0u32..32, c in 0u32..32) {
            let e = |m| ExtElem::from([(m, 1)]);
            prop_assert_eq!(ext_mul(&ext_mul(&e(a), &e(b)), &e(c)), ext_mul(&e(a), &ext_mul(&e(b), &e(c))));
        }

        #[test]
        fn forms_match_monomials(u in 0u32..64) {
            let forms: Vec<Vec<(usize, i64)>> = bits(u).into_iter().map(|i| vec![(i, 1)]).collect();
            prop_assert_eq!(wedge_forms(&forms), ExtElem::from([(u, 1)]));
        }
    }
}
