//! Test oracles shared between integration test targets.

use pointedkh::khovanov::LaurentPoly;
use std::collections::{BTreeMap, BTreeSet, HashMap};

fn find(p: &mut HashMap<i64, i64>, x: i64) -> i64 {
    let y = *p.get(&x).unwrap_or(&x);
    if y == x {
        return x;
    }
    let r = find(p, y);
    p.insert(x, r);
    r
}

/// Loops of the A/B smoothing state, by union-find on PD labels.
fn state_loops(pd: &[[i64; 4]], state: u64) -> usize {
    let mut parent = HashMap::new();
    let labels: BTreeSet<i64> = pd.iter().flatten().copied().collect();
    for (i, x) in pd.iter().enumerate() {
        let pairs = if state >> i & 1 == 0 { [(x[0], x[1]), (x[2], x[3])] } else { [(x[0], x[3]), (x[1], x[2])] };
        for (a, b) in pairs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent.insert(ra, rb);
            }
        }
    }
    labels.iter().map(|&l| find(&mut parent, l)).collect::<BTreeSet<_>>().len()
}

/// `(q + q^{-1}) V(L)` with `√t = -q`, from the Kauffman bracket.
pub fn kauffman_jones(pd: &[[i64; 4]], free_loops: usize, w: i64) -> LaurentPoly {
    let n = pd.len();
    let mut bracket: BTreeMap<i64, i64> = BTreeMap::new(); // powers of A
    for s in 0..1u64 << n {
        let a = n as i64 - 2 * s.count_ones() as i64;
        let loops = if n == 0 { 0 } else { state_loops(pd, s) } + free_loops;
        // d^{loops-1} with d = -A^2 - A^{-2}
        let mut poly: BTreeMap<i64, i64> = BTreeMap::from([(a, 1)]);
        for _ in 1..loops {
            let mut next = BTreeMap::new();
            for (&e, &c) in &poly {
                *next.entry(e + 2).or_insert(0) -= c;
                *next.entry(e - 2).or_insert(0) -= c;
            }
            poly = next;
        }
        for (e, c) in poly {
            *bracket.entry(e).or_insert(0) += c;
        }
    }
    // f = (-A^3)^{-w} <D>; A^e -> (-q)^{-e/2}
    let sign_w = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    let mut v: BTreeMap<i32, i64> = BTreeMap::new();
    for (e, c) in bracket {
        let e = e - 3 * w;
        assert_eq!(e.rem_euclid(2), 0);
        let k = -e / 2;
        let s = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        *v.entry(k as i32).or_insert(0) += c * s * sign_w;
    }
    let mut out = LaurentPoly::new();
    for (k, c) in v {
        *out.entry(k + 1).or_insert(0) += c;
        *out.entry(k - 1).or_insert(0) += c;
    }
    out.retain(|_, c| *c != 0);
    out
}
