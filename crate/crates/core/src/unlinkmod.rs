//! Pointed planar unlinks: the complex `Λ_p ⊗ CKh(L)` with differential `Σ α_i x_i`,
//! its homology as the free module `Λ_{p,L} ⊗ Γ_L`, and the split/merge maps on it.
//!
//! Homology coordinates come from the change of exterior generators that replaces
//! `y_{s(i)}` by `α_i` (the section `s` picks the lowest-index point on each circle).
//! In those coordinates every class has a unique representative among the monomials
//! `y'_B α_A x_S` with `A ⊔ S` = all circles, and reading off their coefficients is a
//! chain map onto homology.

use crate::diagram::{BasepointSet, Resolution};
use crate::exactla::{rank_over, smith_normal_form, GradedComplex, Ring, SparseMatrix};
use crate::exterior::{bits, contract, ext_add, ext_mul, wedge, wedge_forms, wedge_left, ExtElem};
use crate::khovanov::{saddle_apply, SaddleGeom};
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnlinkError {
    #[error("DegenerateResolution: circle {0} carries no basepoint")]
    DegenerateResolution(usize),
    #[error("OrderingMismatch: {0}")]
    OrderingMismatch(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

/// Sparse vector as sorted `(index, coefficient)` pairs.
pub type SparseVec = Vec<(usize, i64)>;

fn sparse_from(map: BTreeMap<usize, i64>) -> SparseVec {
    map.into_iter().filter(|e| e.1 != 0).collect()
}

/// The pointed complex of a planar unlink, with all basepoint actions taken with sign +1.
/// Basis index `u * 2^k + S`: exterior monomial `y_u`, circles in `S` labelled x.
#[derive(Debug, Clone)]
pub struct UnlinkComplex {
    pub k: usize,
    pub point_circle: Vec<usize>,
    pub complex: GradedComplex,
}

impl UnlinkComplex {
    pub fn new(k: usize, point_circle: Vec<usize>) -> Self {
        let m = point_circle.len();
        assert!(k <= 16 && m <= 16, "unlink too large");
        let kk = 1usize << k;
        let dim = kk << m;
        let mut gradings = Vec::with_capacity(dim);
        let mut trip = Vec::new();
        for u in 0..1u32 << m {
            for s in 0..kk {
                let w = u.count_ones() as i32;
                gradings.push((w, 2 * w + k as i32 - 2 * s.count_ones() as i32));
                for (p, &c) in point_circle.iter().enumerate() {
                    if s >> c & 1 == 1 {
                        continue;
                    }
                    if let Some((sg, u2)) = wedge_left(p, u) {
                        trip.push((u2 as usize * kk + (s | 1 << c), u as usize * kk + s, sg));
                    }
                }
            }
        }
        let complex = GradedComplex { gradings, d: SparseMatrix::from_triplets(dim, dim, Ring::Integers, trip) };
        UnlinkComplex { k, point_circle, complex }
    }

    pub fn m(&self) -> usize {
        self.point_circle.len()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn index(&self, u: u32, s: u32) -> usize {
        ((u as usize) << self.k) + s as usize
    }

    pub fn split_index(&self, i: usize) -> (u32, u32) {
        ((i >> self.k) as u32, (i & ((1 << self.k) - 1)) as u32)
    }

    fn op(&self, f: impl Fn(u32, u32) -> Option<(i64, u32, u32)>) -> SparseMatrix {
        let trip = (0..self.dim()).filter_map(|i| {
            let (u, s) = self.split_index(i);
            f(u, s).map(|(c, u2, s2)| (self.index(u2, s2), i, c))
        });
        SparseMatrix::from_triplets(self.dim(), self.dim(), Ring::Integers, trip.collect::<Vec<_>>())
    }

    pub fn y_action(&self, p: usize) -> SparseMatrix {
        self.op(|u, s| wedge_left(p, u).map(|(c, u2)| (c, u2, s)))
    }

    /// `ζ_p = x_{π(p)} y_p^*`.
    pub fn zeta_action(&self, p: usize) -> SparseMatrix {
        let c = self.point_circle[p];
        self.op(|u, s| {
            if s >> c & 1 == 1 {
                return None;
            }
            contract(p, u).map(|(sg, u2)| (sg, u2, s | 1 << c))
        })
    }

    /// `x_i^*`: remove the x label of circle `i`.
    pub fn x_dual(&self, i: usize) -> SparseMatrix {
        self.op(|u, s| (s >> i & 1 == 1).then_some((1, u, s & !(1 << i))))
    }

    /// `w ↦ (-1)^{β_i(w)} α_i w`, with `β_i(w) = 1` iff `x_i` appears in `w`.
    pub fn signed_alpha(&self, i: usize) -> SparseMatrix {
        let pts: Vec<usize> = (0..self.m()).filter(|&p| self.point_circle[p] == i).collect();
        let mut trip = Vec::new();
        for idx in 0..self.dim() {
            let (u, s) = self.split_index(idx);
            let beta = if s >> i & 1 == 1 { -1 } else { 1 };
            for &p in &pts {
                if let Some((c, u2)) = wedge_left(p, u) {
                    trip.push((self.index(u2, s), idx, beta * c));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), Ring::Integers, trip)
    }

    pub fn apply(&self, m: &SparseMatrix, v: &SparseVec) -> SparseVec {
        let mut out = BTreeMap::new();
        for &(c, a) in v {
            for &(r, b) in m.col(c) {
                *out.entry(r).or_insert(0) += a * b;
            }
        }
        sparse_from(out)
    }
}

/// `Λ_{p,L} ⊗ Γ_L` with explicit cycle representatives.
#[derive(Debug, Clone)]
pub struct UnlinkModule {
    pub complex: UnlinkComplex,
    /// `s(i)`: the lowest-index basepoint on circle `i`.
    pub sections: Vec<usize>,
    /// Basis pairs `(B, T)`: `B` a set of non-section points, `T` a set of circles.
    pub basis: Vec<(u32, u32)>,
    pub gradings: Vec<(i32, i32)>,
    /// Cycle representative of each basis element: `y_B ζ_T (α_1 ⋯ α_k)`.
    pub reps: Vec<SparseVec>,
    index: BTreeMap<(u32, u32), usize>,
    /// Old exterior monomial -> expansion in the adapted generators.
    to_new: Vec<ExtElem>,
    /// `(sign, mask)` of each representative in adapted coordinates.
    rep_new: Vec<(i64, u32)>,
}

fn section_mask(sections: &[usize]) -> u32 {
    sections.iter().fold(0, |m, &p| m | 1 << p)
}

impl UnlinkModule {
    pub fn k(&self) -> usize {
        self.complex.k
    }

    pub fn m(&self) -> usize {
        self.complex.m()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, b: u32, t: u32) -> Option<usize> {
        self.index.get(&(b, t)).copied()
    }

    pub fn section_mask(&self) -> u32 {
        section_mask(&self.sections)
    }

    pub fn basis_name(&self, i: usize) -> String {
        let (b, t) = self.basis[i];
        let mut parts: Vec<String> = bits(b).into_iter().map(|p| format!("y{}", p + 1)).collect();
        parts.extend(bits(t).into_iter().map(|c| format!("g{}", c + 1)));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }

    /// Expansion of the old monomial `y_u` in adapted generators (`α_i` sits at bit `s(i)`).
    pub fn adapted(&self, u: u32) -> &ExtElem {
        &self.to_new[u as usize]
    }

    /// Coordinates of a cycle in the module basis.
    pub fn coordinates(&self, z: &SparseVec) -> SparseVec {
        let sec = self.section_mask();
        let mut out = BTreeMap::new();
        for &(i, a) in z {
            let (u, s) = self.complex.split_index(i);
            for (&mask, &c) in &self.to_new[u as usize] {
                let keep = (0..self.k()).all(|ci| (mask >> self.sections[ci] & 1 == 1) != (s >> ci & 1 == 1));
                if !keep {
                    continue;
                }
                let j = self.index[&(mask & !sec, s)];
                debug_assert_eq!(self.rep_new[j].1, mask);
                *out.entry(j).or_insert(0) += a * c * self.rep_new[j].0;
            }
        }
        sparse_from(out)
    }

    /// Matrix of a chain-level endomorphism (or map into `target`) on homology.
    pub fn induced(&self, op: &SparseMatrix, target: &UnlinkModule) -> SparseMatrix {
        let cols: Vec<SparseVec> = self.reps.iter().map(|r| target.coordinates(&self.complex.apply(op, r))).collect();
        SparseMatrix::from_columns(target.dim(), Ring::Integers, cols)
    }

    pub fn y_module_action(&self, p: usize) -> SparseMatrix {
        self.induced(&self.complex.y_action(p), self)
    }

    pub fn zeta_module_action(&self, p: usize) -> SparseMatrix {
        self.induced(&self.complex.zeta_action(p), self)
    }

    /// Representatives are cycles and form a ℤ-basis of homology in every bigrading.
    pub fn verify(&self) -> Result<(), UnlinkError> {
        let d = &self.complex.complex.d;
        for (j, r) in self.reps.iter().enumerate() {
            if !self.complex.apply(d, r).is_empty() {
                return Err(UnlinkError::Verification(format!("representative {} is not a cycle", self.basis_name(j))));
            }
            let c = self.coordinates(r);
            if c != vec![(j, 1)] {
                return Err(UnlinkError::Verification(format!("coordinates of {} are {c:?}", self.basis_name(j))));
            }
        }
        let blocks = self.complex.complex.blocks();
        let mut by_grading: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for (j, g) in self.gradings.iter().enumerate() {
            by_grading.entry(*g).or_default().push(j);
        }
        for (&(h, q), idx) in &blocks {
            let reps: Vec<usize> = by_grading.get(&(h, q)).cloned().unwrap_or_default();
            let empty = Vec::new();
            let prev = blocks.get(&(h - 1, q)).unwrap_or(&empty);
            let next = blocks.get(&(h + 1, q)).unwrap_or(&empty);
            let d_in = d.submatrix(idx, prev);
            let d_out = d.submatrix(next, idx);
            let mut pos = vec![usize::MAX; self.complex.dim()];
            for (i, &g) in idx.iter().enumerate() {
                pos[g] = i;
            }
            let mut cols: Vec<SparseVec> = (0..d_in.cols).map(|c| d_in.col(c).to_vec()).collect();
            for &j in &reps {
                cols.push(self.reps[j].iter().map(|&(i, v)| (pos[i], v)).collect());
            }
            let m = SparseMatrix::from_columns(idx.len(), Ring::Integers, cols);
            let r_in = rank_over(&d_in, Ring::Rationals);
            let r_out = rank_over(&d_out, Ring::Rationals);
            let snf = smith_normal_form(&m);
            let kernel = idx.len() - r_out;
            if snf.rank != r_in + reps.len() || snf.rank != kernel || !snf.diagonal.iter().all(|x| x.is_one()) {
                return Err(UnlinkError::Verification(format!(
                    "bigrading ({h},{q}): rank {} with {} representatives, kernel {kernel}",
                    snf.rank,
                    reps.len()
                )));
            }
        }
        Ok(())
    }
}

/// Build the module without running the homology verification.
pub fn module_structure_unchecked(k: usize, point_circle: Vec<usize>) -> Result<UnlinkModule, UnlinkError> {
    let m = point_circle.len();
    let mut sections = vec![usize::MAX; k];
    for (p, &c) in point_circle.iter().enumerate() {
        if sections[c] == usize::MAX {
            sections[c] = p;
        }
    }
    if let Some(c) = sections.iter().position(|&s| s == usize::MAX) {
        return Err(UnlinkError::DegenerateResolution(c));
    }
    let complex = UnlinkComplex::new(k, point_circle.clone());
    let sec = section_mask(&sections);
    // old y_p in adapted generators
    let forms: Vec<Vec<(usize, i64)>> = (0..m)
        .map(|p| {
            let c = point_circle[p];
            if sections[c] == p {
                let mut f = vec![(p, 1)];
                f.extend((0..m).filter(|&q| q != p && point_circle[q] == c).map(|q| (q, -1)));
                f
            } else {
                vec![(p, 1)]
            }
        })
        .collect();
    let to_new: Vec<ExtElem> = (0..1u32 << m)
        .map(|u| wedge_forms(&bits(u).into_iter().map(|p| forms[p].clone()).collect::<Vec<_>>()))
        .collect();
    // α_1 ⋯ α_k in adapted and in old coordinates
    let alpha_new = wedge_forms(&sections.iter().map(|&p| vec![(p, 1)]).collect::<Vec<_>>());
    let (&top_mask, &top_sign) = alpha_new.iter().next().expect("product of distinct generators");
    let alpha_old = wedge_forms(
        &(0..k).map(|c| (0..m).filter(|&p| point_circle[p] == c).map(|p| (p, 1)).collect()).collect::<Vec<_>>(),
    );
    let free = ((1u32 << m) - 1) & !sec;
    let mut basis = Vec::new();
    let mut b = 0u32;
    loop {
        for t in 0..1u32 << k {
            basis.push((b, t));
        }
        if b == free {
            break;
        }
        b = (b.wrapping_sub(free)) & free;
    }
    basis.sort();
    let index: BTreeMap<(u32, u32), usize> = basis.iter().enumerate().map(|(i, &bt)| (bt, i)).collect();
    let mut reps = Vec::with_capacity(basis.len());
    let mut rep_new = Vec::with_capacity(basis.len());
    let mut gradings = Vec::with_capacity(basis.len());
    for &(b, t) in &basis {
        // adapted coordinates: contract α_t for t in T (highest first), then wedge y_B on the left
        let mut sign = top_sign;
        let mut mask = top_mask;
        for c in bits(t).into_iter().rev() {
            let (s2, m2) = contract(sections[c], mask).expect("α present");
            sign *= s2;
            mask = m2;
        }
        let (s3, m3) = wedge(b, mask).expect("disjoint");
        rep_new.push((sign * s3, m3));
        // old coordinates
        let mut v: BTreeMap<(u32, u32), i64> = alpha_old.iter().map(|(&u, &c)| ((u, 0u32), c)).collect();
        for c in bits(t).into_iter().rev() {
            let mut next = BTreeMap::new();
            for (&(u, s), &a) in &v {
                if s >> c & 1 == 0 {
                    if let Some((sg, u2)) = contract(sections[c], u) {
                        *next.entry((u2, s | 1 << c)).or_insert(0) += a * sg;
                    }
                }
            }
            v = next;
        }
        let mut out = BTreeMap::new();
        for (&(u, s), &a) in &v {
            if let Some((sg, u2)) = wedge(b, u) {
                *out.entry(complex.index(u2, s)).or_insert(0) += a * sg;
            }
        }
        reps.push(sparse_from(out));
        let h = (b.count_ones() + k as u32 - t.count_ones()) as i32;
        gradings.push((h, 2 * h + k as i32 - 2 * t.count_ones() as i32));
    }
    Ok(UnlinkModule { complex, sections, basis, gradings, reps, index, to_new, rep_new })
}

/// `Kh(L_v, p) ≅ Λ_{p,L} ⊗ Γ_L` for a resolution, with the isomorphism verified.
pub fn module_structure(r: &Resolution, points: &BasepointSet) -> Result<UnlinkModule, UnlinkError> {
    let m = module_structure_unchecked(r.num_circles(), r.point_circle(points))?;
    m.verify()?;
    Ok(m)
}

/// Structural homotopies on the unlink complex: `x_i^*` for the signed `α_i` action and
/// `y_p^* y_q^*` between `ζ_p` and `ζ_q` on one circle. Returns the first failure.
pub fn structural_homotopies(c: &UnlinkComplex) -> Result<(), UnlinkError> {
    let d = &c.complex.d;
    for i in 0..c.k {
        let h = c.x_dual(i);
        if h.mul(d).sub(&d.mul(&h)) != c.signed_alpha(i) {
            return Err(UnlinkError::Verification(format!("x*_{i} homotopy")));
        }
    }
    for p in 0..c.m() {
        for q in 0..c.m() {
            if p == q || c.point_circle[p] != c.point_circle[q] {
                continue;
            }
            let h = c.y_action(p).transpose().mul(&c.y_action(q).transpose());
            // y^* is the transpose of y with the same signs
            if h.mul(d).sub(&d.mul(&h)) != c.zeta_action(p).sub(&c.zeta_action(q)) {
                return Err(UnlinkError::Verification(format!("y*_{p} y*_{q} homotopy")));
            }
        }
    }
    Ok(())
}

/// A saddle between two pointed planar unlinks, with the ordering sign `sgn(σ) sgn(τ)`
/// relating the canonical circle orders to `[split/merged circle, others]` and
/// `[piece 0, piece 1, others]`, piece 0 being the lower-numbered piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMapSpec {
    pub geom: SaddleGeom,
    pub ordering_sign: i64,
}

impl EdgeMapSpec {
    pub fn new(geom: SaddleGeom) -> Self {
        let (single, pieces) = if geom.merge { (geom.tgt[0], geom.src) } else { (geom.src[0], geom.tgt) };
        let sigma = single;
        let tau = pieces[0] + pieces[1] - 1;
        let ordering_sign = if (sigma + tau) % 2 == 0 { 1 } else { -1 };
        EdgeMapSpec { geom, ordering_sign }
    }

    /// Source circle of each target circle, the split/merged circle included.
    fn circle_map(&self) -> Vec<usize> {
        let g = &self.geom;
        g.corr
            .iter()
            .enumerate()
            .map(|(t, &s)| {
                if s != usize::MAX {
                    s
                } else if g.merge {
                    g.src[0]
                } else {
                    let _ = t;
                    g.src[0]
                }
            })
            .collect()
    }

    fn check(&self, src: &UnlinkModule, tgt: &UnlinkModule) -> Result<(), UnlinkError> {
        let g = &self.geom;
        let (ks, kt) = (src.k(), tgt.k());
        if (g.merge && ks != kt + 1) || (!g.merge && kt != ks + 1) || g.corr.len() != kt {
            return Err(UnlinkError::OrderingMismatch(format!("circle counts {ks} -> {kt}")));
        }
        if src.m() != tgt.m() {
            return Err(UnlinkError::OrderingMismatch("different basepoint sets".into()));
        }
        let cmap = self.circle_map();
        for p in 0..src.m() {
            let (a, b) = (src.complex.point_circle[p], tgt.complex.point_circle[p]);
            let ok = if g.merge {
                if b == g.tgt[0] {
                    g.src.contains(&a)
                } else {
                    cmap[b] == a
                }
            } else {
                cmap[b] == a
            };
            if !ok {
                return Err(UnlinkError::OrderingMismatch(format!("point {p} on circle {a} -> {b}")));
            }
        }
        Ok(())
    }

    /// Chain map `id ⊗ Δ` or `id ⊗ μ` between the unlink complexes.
    pub fn chain_map(&self, src: &UnlinkComplex, tgt: &UnlinkComplex) -> SparseMatrix {
        let mut trip = Vec::new();
        for i in 0..src.dim() {
            let (u, s) = src.split_index(i);
            for s2 in saddle_apply(&self.geom, s as u64) {
                trip.push((tgt.index(u, s2 as u32), i, 1));
            }
        }
        SparseMatrix::from_triplets(tgt.dim(), src.dim(), Ring::Integers, trip)
    }

    /// The homology map computed through cycle representatives.
    pub fn induced_map(&self, src: &UnlinkModule, tgt: &UnlinkModule) -> Result<SparseMatrix, UnlinkError> {
        self.check(src, tgt)?;
        Ok(src.induced(&self.chain_map(&src.complex, &tgt.complex), tgt))
    }

    /// `Δ_Λ ⊗ Δ_Γ` (split) or `μ_Λ ⊗ μ_Γ` (merge), times the ordering sign.
    pub fn formula_map(&self, src: &UnlinkModule, tgt: &UnlinkModule) -> Result<SparseMatrix, UnlinkError> {
        self.check(src, tgt)?;
        let g = &self.geom;
        // source circle -> target circle for Γ; a split circle lifts to piece 0
        let mut lift = vec![usize::MAX; src.k()];
        for (t, &s) in g.corr.iter().enumerate() {
            if s != usize::MAX {
                lift[s] = t;
            }
        }
        if g.merge {
            lift[g.src[0]] = g.tgt[0];
            lift[g.src[1]] = g.tgt[0];
        } else {
            lift[g.src[0]] = g.tgt[0];
        }
        let mut cols = Vec::with_capacity(src.dim());
        for &(b, t) in &src.basis {
            let mut gamma = ExtElem::from([(0u32, 1i64)]);
            for c in bits(t) {
                gamma = ext_mul(&gamma, &ExtElem::from([(1u32 << lift[c], 1)]));
            }
            let mut lambda = ExtElem::from([(b, 1i64)]);
            if g.merge {
                let a0: Vec<(usize, i64)> =
                    (0..src.m()).filter(|&p| src.complex.point_circle[p] == g.src[0]).map(|p| (p, 1)).collect();
                lambda = ext_mul(&lambda, &wedge_forms(&[a0]));
                if t.count_ones() % 2 == 1 {
                    lambda.values_mut().for_each(|v| *v = -*v);
                }
            } else {
                let diff = ExtElem::from([(1u32 << g.tgt[0], 1), (1u32 << g.tgt[1], -1)]);
                gamma = ext_mul(&gamma, &diff);
            }
            let mut out = BTreeMap::new();
            for (lb, lc) in reduce_lambda(tgt, &lambda) {
                for (&gt, &gc) in &gamma {
                    let j = tgt.index_of(lb, gt).expect("basis element");
                    *out.entry(j).or_insert(0) += self.ordering_sign * lc * gc;
                }
            }
            cols.push(sparse_from(out));
        }
        Ok(SparseMatrix::from_columns(tgt.dim(), Ring::Integers, cols))
    }
}

/// Reduce an element of `Λ_p` to the basis of `Λ_{p,L}` of a module.
fn reduce_lambda(module: &UnlinkModule, lambda: &ExtElem) -> Vec<(u32, i64)> {
    let sec = module.section_mask();
    let mut out = ExtElem::new();
    for (&u, &c) in lambda {
        for (&mask, &a) in module.adapted(u) {
            if mask & sec == 0 {
                ext_add(&mut out, mask, c * a);
            }
        }
    }
    out.into_iter().collect()
}

pub fn split_map(spec: &EdgeMapSpec, src: &UnlinkModule, tgt: &UnlinkModule) -> Result<SparseMatrix, UnlinkError> {
    if spec.geom.merge {
        return Err(UnlinkError::OrderingMismatch("split_map called on a merge".into()));
    }
    spec.formula_map(src, tgt)
}

pub fn merge_map(spec: &EdgeMapSpec, src: &UnlinkModule, tgt: &UnlinkModule) -> Result<SparseMatrix, UnlinkError> {
    if !spec.geom.merge {
        return Err(UnlinkError::OrderingMismatch("merge_map called on a split".into()));
    }
    spec.formula_map(src, tgt)
}
