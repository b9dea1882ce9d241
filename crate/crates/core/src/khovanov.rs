//! The Khovanov complex of a diagram, its reduced version, the basepoint action, and
//! the Jones polynomial and determinant as cheap cross-checks.

use crate::diagram::{all_resolutions, vertex_string, Basepoint, Coloring, LinkDiagram, Resolution};
use crate::exactla::{integer_determinant, GradedComplex, Ring, SparseMatrix};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// A diagram together with its coloring and all of its resolutions.
#[derive(Debug, Clone)]
pub struct Cube {
    pub diagram: LinkDiagram,
    pub coloring: Coloring,
    pub res: Vec<Resolution>,
}

impl Cube {
    pub fn new(diagram: &LinkDiagram, coloring: &Coloring) -> Self {
        Cube { diagram: diagram.clone(), coloring: coloring.clone(), res: all_resolutions(diagram, coloring) }
    }

    pub fn n(&self) -> usize {
        self.diagram.n()
    }

    pub fn num_vertices(&self) -> u64 {
        1 << self.n()
    }

    pub fn circles(&self, v: u64) -> usize {
        self.res[v as usize].num_circles()
    }
}

/// How the circles of two resolutions differing at one crossing correspond.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleGeom {
    pub merge: bool,
    /// Involved circles of the source (equal entries for a split).
    pub src: [usize; 2],
    /// Involved circles of the target (equal entries for a merge).
    pub tgt: [usize; 2],
    /// For each target circle, the source circle with the same arcs, or `usize::MAX`.
    pub corr: Vec<usize>,
}

fn involved(d: &LinkDiagram, r: &Resolution, x: usize) -> [usize; 2] {
    let e = d.crossings[x].edges;
    let mut c: Vec<usize> = e.iter().map(|&e| r.edge_circle[e]).collect();
    c.sort();
    c.dedup();
    match c.len() {
        1 => [c[0], c[0]],
        2 => [c[0], c[1]],
        _ => unreachable!("a crossing touches one or two circles"),
    }
}

/// Saddle from resolution `r1` to `r2`, which differ exactly at crossing `x`.
pub fn saddle_geom(d: &LinkDiagram, r1: &Resolution, r2: &Resolution, x: usize) -> SaddleGeom {
    debug_assert_eq!(r1.vertex ^ r2.vertex, 1 << x);
    let src = involved(d, r1, x);
    let tgt = involved(d, r2, x);
    let merge = src[0] != src[1];
    assert_eq!(merge, tgt[0] == tgt[1], "saddle must merge or split");
    let corr = (0..r2.num_circles())
        .map(|c| if tgt.contains(&c) { usize::MAX } else { r1.edge_circle[r2.circles[c].arcs[0]] })
        .collect();
    SaddleGeom { merge, src, tgt, corr }
}

/// Frobenius multiplication or comultiplication on labelings (bit set = x), unsigned.
pub fn saddle_apply(g: &SaddleGeom, labels: u64) -> Vec<u64> {
    let mut base = 0u64;
    for (t, &s) in g.corr.iter().enumerate() {
        if s != usize::MAX && labels >> s & 1 == 1 {
            base |= 1 << t;
        }
    }
    if g.merge {
        let (la, lb) = (labels >> g.src[0] & 1, labels >> g.src[1] & 1);
        match (la, lb) {
            (1, 1) => vec![],
            (0, 0) => vec![base],
            _ => vec![base | 1 << g.tgt[0]],
        }
    } else if labels >> g.src[0] & 1 == 1 {
        vec![base | 1 << g.tgt[0] | 1 << g.tgt[1]]
    } else {
        vec![base | 1 << g.tgt[0], base | 1 << g.tgt[1]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CubeGenerator {
    pub vertex: u64,
    /// Bit `i` set when circle `i` is labeled `x`.
    pub labels: u64,
}

#[derive(Debug, Clone)]
pub struct KhComplex {
    pub cube: Cube,
    pub basis: Vec<CubeGenerator>,
    index: HashMap<CubeGenerator, usize>,
    pub complex: GradedComplex,
}

fn label_string(labels: u64, l: usize) -> String {
    (0..l).map(|i| if labels >> i & 1 == 1 { 'x' } else { '1' }).collect()
}

impl KhComplex {
    pub fn index_of(&self, g: CubeGenerator) -> Option<usize> {
        self.index.get(&g).copied()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn n_minus(&self) -> usize {
        self.cube.diagram.n_minus
    }

    pub fn generator_name(&self, i: usize) -> String {
        let g = self.basis[i];
        format!("{}:{}", vertex_string(g.vertex, self.cube.n()), label_string(g.labels, self.cube.circles(g.vertex)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let basis: Vec<serde_json::Value> = (0..self.dim())
            .map(|i| {
                let (h, q) = self.complex.gradings[i];
                serde_json::json!({"generator": self.generator_name(i), "h": h, "q": q})
            })
            .collect();
        let d: Vec<[i64; 3]> = self.complex.d.triplets().map(|(r, c, v)| [r as i64, c as i64, v]).collect();
        serde_json::json!({"basis": basis, "differential": d})
    }
}

pub fn build_ckh(d: &LinkDiagram, coloring: &Coloring) -> KhComplex {
    kh_from_cube(Cube::new(d, coloring))
}

pub fn kh_from_cube(cube: Cube) -> KhComplex {
    let d = &cube.diagram;
    let n = d.n();
    let nm = d.n_minus as i32;
    let mut basis: Vec<CubeGenerator> = Vec::new();
    for v in 0..cube.num_vertices() {
        for labels in 0..1u64 << cube.circles(v) {
            basis.push(CubeGenerator { vertex: v, labels });
        }
    }
    basis.sort_by_cached_key(|g| {
        (g.vertex.count_ones(), vertex_string(g.vertex, n), label_string(g.labels, cube.circles(g.vertex)))
    });
    let index: HashMap<CubeGenerator, usize> = basis.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let gradings: Vec<(i32, i32)> = basis
        .iter()
        .map(|g| {
            let v = g.vertex.count_ones() as i32;
            let l = cube.circles(g.vertex) as i32;
            (v - nm, -2 * g.labels.count_ones() as i32 + l + v + n as i32 - 3 * nm)
        })
        .collect();
    let mut geoms: HashMap<(u64, usize), SaddleGeom> = HashMap::new();
    let mut trip = Vec::new();
    for (col, g) in basis.iter().enumerate() {
        for x in 0..n {
            if g.vertex >> x & 1 == 1 {
                continue;
            }
            let t = g.vertex | 1 << x;
            let geom = geoms
                .entry((g.vertex, x))
                .or_insert_with(|| saddle_geom(d, &cube.res[g.vertex as usize], &cube.res[t as usize], x));
            let s = crate::diagram::edge_sign_exponent(t, x) as usize + d.n_minus;
            let sign = if s.is_multiple_of(2) { 1 } else { -1 };
            for lab in saddle_apply(geom, g.labels) {
                trip.push((index[&CubeGenerator { vertex: t, labels: lab }], col, sign));
            }
        }
    }
    let dim = basis.len();
    let complex = GradedComplex { gradings, d: SparseMatrix::from_triplets(dim, dim, Ring::Integers, trip) };
    KhComplex { cube, basis, index, complex }
}

/// `ξ_p`: multiply the label of p's circle by x, with sign `(-1)^{ε(p)}`.
pub fn xi_action(kh: &KhComplex, p: &Basepoint) -> SparseMatrix {
    let sign = if kh.cube.coloring.edge_parity(p.edge) == 0 { 1 } else { -1 };
    let dim = kh.dim();
    let trip = kh.basis.iter().enumerate().filter_map(|(i, g)| {
        let c = kh.cube.res[g.vertex as usize].edge_circle[p.edge];
        (g.labels >> c & 1 == 0)
            .then(|| (kh.index[&CubeGenerator { vertex: g.vertex, labels: g.labels | 1 << c }], i, sign))
    });
    SparseMatrix::from_triplets(dim, dim, Ring::Integers, trip)
}

/// The reduced complex: generators whose `p0`-circle is labeled x, with q shifted by +1.
#[derive(Debug, Clone)]
pub struct ReducedComplex {
    /// Positions of the reduced generators in the unreduced basis.
    pub embedding: Vec<usize>,
    pub complex: GradedComplex,
}

pub fn build_reduced(kh: &KhComplex, p0: &Basepoint) -> ReducedComplex {
    let embedding: Vec<usize> = kh
        .basis
        .iter()
        .enumerate()
        .filter(|(_, g)| g.labels >> kh.cube.res[g.vertex as usize].edge_circle[p0.edge] & 1 == 1)
        .map(|(i, _)| i)
        .collect();
    let d = kh.complex.d.submatrix(&embedding, &embedding);
    let gradings = embedding.iter().map(|&i| (kh.complex.gradings[i].0, kh.complex.gradings[i].1 + 1)).collect();
    ReducedComplex { embedding, complex: GradedComplex { gradings, d } }
}

/// Laurent polynomial in q as exponent -> coefficient.
pub type LaurentPoly = BTreeMap<i32, i64>;

pub fn format_poly(p: &LaurentPoly, var: &str) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (&e, &c)) in p.iter().enumerate() {
        let mag = c.abs();
        if i == 0 {
            if c < 0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0 { " - " } else { " + " });
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if mono.is_empty() {
            s += &mag.to_string();
        } else if mag == 1 {
            s += &mono;
        } else {
            s += &format!("{mag}{mono}");
        }
    }
    s
}

/// Graded Euler characteristic of the chain groups.
pub fn jones_polynomial(kh: &KhComplex) -> LaurentPoly {
    let mut p = LaurentPoly::new();
    for &(h, q) in &kh.complex.gradings {
        *p.entry(q).or_insert(0) += if h.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    p.retain(|_, c| *c != 0);
    p
}

/// Faces at the four corners of a crossing; corner k lies between slots k and k+1.
pub fn crossing_corners(d: &LinkDiagram, x: usize) -> [usize; 4] {
    std::array::from_fn(|k| {
        let slot = (k + 1) % 4;
        let e = d.crossings[x].edges[slot];
        let arrives_forward = d.edges[e].head == Some(crate::diagram::End { crossing: x, slot });
        d.edge_faces[e][if arrives_forward { 0 } else { 1 }]
    })
}

/// The Goeritz matrix on the white faces (first white face deleted).
pub fn goeritz_matrix(d: &LinkDiagram, coloring: &Coloring) -> Vec<Vec<i64>> {
    use crate::diagram::Color;
    let white: Vec<usize> = (0..d.faces.len()).filter(|&f| coloring.face_colors[f] == Color::White).collect();
    let pos: HashMap<usize, usize> = white.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let k = white.len();
    let mut g = vec![vec![0i64; k]; k];
    for x in 0..d.n() {
        let c = crossing_corners(d, x);
        let (a, b, eta) = if coloring.face_colors[c[0]] == Color::White { (c[0], c[2], 1) } else { (c[1], c[3], -1) };
        if a != b {
            let (i, j) = (pos[&a], pos[&b]);
            g[i][j] -= eta;
            g[j][i] -= eta;
            g[i][i] += eta;
            g[j][j] += eta;
        }
    }
    g.into_iter().skip(1).map(|row| row.into_iter().skip(1).collect()).collect()
}

pub fn determinant(d: &LinkDiagram, coloring: &Coloring) -> BigInt {
    if d.free_loops > 0 {
        return BigInt::from(u8::from(d.n() == 0 && d.free_loops == 1));
    }
    let g = goeritz_matrix(d, coloring);
    let big: Vec<Vec<BigInt>> = g.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    integer_determinant(big).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{checkerboard, parse_pd, BasepointSet};

    fn kh(pd: &str, loops: usize) -> KhComplex {
        let d = parse_pd(pd, loops).unwrap();
        let c = checkerboard(&d, None).unwrap();
        build_ckh(&d, &c)
    }

    #[test]
    fn unknot_complex() {
        let k = kh("", 1);
        assert_eq!(k.complex.gradings, vec![(0, 1), (0, -1)]);
        assert!(k.complex.d.is_zero());
    }

    #[test]
    fn one_crossing_differential() {
        let k = kh("X(1,2,2,1)", 0);
        // basis: 0:1, 0:x, 1:11, 1:1x, 1:x1, 1:xx
        let names: Vec<String> = (0..k.dim()).map(|i| k.generator_name(i)).collect();
        assert_eq!(names, ["0:1", "0:x", "1:11", "1:1x", "1:x1", "1:xx"]);
        let d = k.complex.d.to_dense();
        let col = |c: usize| (0..6).map(|r| d[r][c]).collect::<Vec<_>>();
        assert_eq!(col(0), vec![0, 0, 0, -1, -1, 0]);
        assert_eq!(col(1), vec![0, 0, 0, 0, 0, -1]);
        assert!(k.complex.d_squared_is_zero());
    }

    #[test]
    fn xi_squares_to_zero_and_commutes() {
        let k = kh("X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)", 0);
        let d = &k.cube.diagram;
        let pts = BasepointSet::per_edge(d, 1);
        let xis: Vec<SparseMatrix> = pts.points.iter().map(|p| xi_action(&k, p)).collect();
        for a in &xis {
            assert!(a.mul(a).is_zero());
            assert_eq!(a.mul(&k.complex.d), k.complex.d.mul(a));
            for b in &xis {
                assert_eq!(a.mul(b), b.mul(a));
            }
        }
    }

    #[test]
    fn poly_format() {
        let p = LaurentPoly::from([(-1, 1), (1, 1), (3, -2)]);
        assert_eq!(format_poly(&p, "q"), "q^-1 + q - 2q^3");
    }
}
