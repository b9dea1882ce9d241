//! The pointed complex `Λ_p ⊗ CKh(L)` with its Koszul differential, the ζ actions,
//! transport homotopies across crossings and the basepoint-move isomorphism.

use crate::diagram::{vertex_string, Basepoint, BasepointSet, Coloring, DiagramError, LinkDiagram};
use crate::exactla::{GradedComplex, HomologySummary, Ring, SparseMatrix};
use crate::exterior::{contract, wedge_left, wedge_right};
use crate::khovanov::{build_ckh, build_reduced, saddle_apply, saddle_geom, xi_action, CubeGenerator, KhComplex};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointedError {
    #[error("NotAdjacent: basepoints are not on opposite sides of crossing {0}")]
    NotAdjacent(usize),
    #[error("DifferentComponents: basepoints lie on different link components")]
    DifferentComponents,
    #[error("SameComponentRequired: basepoints lie on different link components")]
    SameComponentRequired,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Basis index `u * dim(CKh) + k` for the exterior monomial `y_u` and Khovanov generator `k`.
#[derive(Debug, Clone)]
pub struct PointedComplex {
    pub kh: KhComplex,
    pub points: BasepointSet,
    pub complex: GradedComplex,
}

impl PointedComplex {
    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn kh_dim(&self) -> usize {
        self.kh.dim()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn index(&self, u: u32, k: usize) -> usize {
        u as usize * self.kh_dim() + k
    }

    /// `(u, k)` coordinates of a basis index.
    pub fn coords(&self, i: usize) -> (u32, usize) {
        ((i / self.kh_dim()) as u32, i % self.kh_dim())
    }

    /// `Σ_u ext(y_u) ⊗ m`, where `ext` sends a monomial to a signed monomial.
    pub fn lift(&self, ext: impl Fn(u32) -> Option<(i64, u32)>, m: &SparseMatrix) -> SparseMatrix {
        let n = self.kh_dim();
        let mut trip = Vec::new();
        for u in 0..1u32 << self.m() {
            if let Some((s, u2)) = ext(u) {
                trip.extend(m.triplets().map(|(r, c, v)| (u2 as usize * n + r, u as usize * n + c, s * v)));
            }
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), Ring::Integers, trip)
    }

    pub fn xi(&self, j: usize) -> SparseMatrix {
        xi_action(&self.kh, &self.points.points[j])
    }

    /// Left multiplication by `y_{p_j}`.
    pub fn y_action(&self, j: usize) -> SparseMatrix {
        self.lift(|u| wedge_left(j, u), &SparseMatrix::identity(self.kh_dim(), Ring::Integers))
    }

    /// `ζ_p = y_p^* ⊗ ξ_p`.
    pub fn zeta_action(&self, j: usize) -> SparseMatrix {
        self.lift(|u| contract(j, u), &self.xi(j))
    }

    /// `H_p = y_p^* ⊗ id`.
    pub fn contraction_homotopy(&self, j: usize) -> SparseMatrix {
        self.lift(|u| contract(j, u), &SparseMatrix::identity(self.kh_dim(), Ring::Integers))
    }

    pub fn homology(&self, ring: Ring) -> HomologySummary {
        self.complex.homology(ring)
    }

    /// The differential restricted to `∩_p ker y_p`, which is spanned by `y_{all} ⊗ CKh(L)`.
    pub fn kernel_restriction(&self) -> SparseMatrix {
        let full = (1u32 << self.m()) - 1;
        let idx: Vec<usize> = (0..self.kh_dim()).map(|k| self.index(full, k)).collect();
        self.complex.d.submatrix(&idx, &idx)
    }

    pub fn generator_name(&self, i: usize) -> String {
        let (u, k) = self.coords(i);
        format!("{}|{}", vertex_string(u as u64, self.m()), self.kh.generator_name(k))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let basis: Vec<serde_json::Value> = (0..self.dim())
            .map(|i| {
                let (u, k) = self.coords(i);
                let g = self.kh.basis[k];
                let (h, q) = self.complex.gradings[i];
                serde_json::json!({
                    "u": vertex_string(u as u64, self.m()),
                    "v": vertex_string(g.vertex, self.kh.cube.n()),
                    "generator": self.generator_name(i),
                    "h": h,
                    "q": q,
                })
            })
            .collect();
        let d: Vec<[i64; 3]> = self.complex.d.triplets().map(|(r, c, v)| [r as i64, c as i64, v]).collect();
        serde_json::json!({"points": self.m(), "basis": basis, "differential": d})
    }
}

pub fn build_pointed(kh: &KhComplex, points: &BasepointSet) -> PointedComplex {
    let m = points.len();
    assert!(m < 20, "too many basepoints");
    let n = kh.dim();
    let xis: Vec<SparseMatrix> = points.points.iter().map(|p| xi_action(kh, p)).collect();
    let mut trip = Vec::new();
    let mut gradings = Vec::with_capacity(n << m);
    for u in 0..1u32 << m {
        let w = u.count_ones() as i32;
        gradings.extend(kh.complex.gradings.iter().map(|&(h, q)| (h + w, q + 2 * w)));
        let s = if w % 2 == 0 { 1 } else { -1 };
        let base = u as usize * n;
        trip.extend(kh.complex.d.triplets().map(|(r, c, v)| (base + r, base + c, s * v)));
        for (j, xi) in xis.iter().enumerate() {
            if let Some((sy, u2)) = wedge_left(j, u) {
                let b2 = u2 as usize * n;
                trip.extend(xi.triplets().map(|(r, c, v)| (b2 + r, base + c, sy * v)));
            }
        }
    }
    let dim = n << m;
    let complex = GradedComplex { gradings, d: SparseMatrix::from_triplets(dim, dim, Ring::Integers, trip) };
    PointedComplex { kh: kh.clone(), points: points.clone(), complex }
}

/// Convenience: build the Khovanov complex and the pointed complex in one go.
pub fn pointed_from_diagram(d: &LinkDiagram, coloring: &Coloring, points: &BasepointSet) -> PointedComplex {
    build_pointed(&build_ckh(d, coloring), points)
}

/// Homotopy `H` on `CKh(L)` with `dH + Hd = ξ_{e1} - ξ_{e2}`, where `e1`, `e2` are the
/// two edges of one strand at `crossing`.
pub fn transport_homotopy(
    kh: &KhComplex,
    crossing: usize,
    p1: &Basepoint,
    p2: &Basepoint,
) -> Result<SparseMatrix, PointedError> {
    let d = &kh.cube.diagram;
    if crossing >= d.n() {
        return Err(PointedError::NotAdjacent(crossing));
    }
    let pair = |(a, b): (usize, usize)| (a == p1.edge && b == p2.edge) || (a == p2.edge && b == p1.edge);
    if !(pair(d.strand_edges(crossing, false)) || pair(d.strand_edges(crossing, true))) {
        return Err(PointedError::NotAdjacent(crossing));
    }
    let eps = kh.cube.coloring.edge_parity(p1.edge) as usize;
    let global = if (d.n_minus + eps).is_multiple_of(2) { 1 } else { -1 };
    let mut trip = Vec::new();
    for (col, g) in kh.basis.iter().enumerate() {
        if g.vertex >> crossing & 1 == 0 {
            continue;
        }
        let u = g.vertex & !(1 << crossing);
        let geom = saddle_geom(d, &kh.cube.res[g.vertex as usize], &kh.cube.res[u as usize], crossing);
        let s = if crate::diagram::edge_sign_exponent(g.vertex, crossing) == 0 { global } else { -global };
        for lab in saddle_apply(&geom, g.labels) {
            let row = kh.index_of(CubeGenerator { vertex: u, labels: lab }).expect("generator exists");
            trip.push((row, col, s));
        }
    }
    Ok(SparseMatrix::from_triplets(kh.dim(), kh.dim(), Ring::Integers, trip))
}

/// A basepoint moved forward along its component, with the chain isomorphism between
/// the two pointed complexes.
#[derive(Debug, Clone)]
pub struct BasepointMove {
    pub target: PointedComplex,
    pub iso: SparseMatrix,
    /// Crossings passed, in order.
    pub crossings: Vec<usize>,
}

fn move_steps(pc: &PointedComplex, j: usize, steps: usize, target: Basepoint) -> Result<BasepointMove, PointedError> {
    let d = &pc.kh.cube.diagram;
    let p = pc.points.points[j];
    let comp = &d.components[d.edges[p.edge].component];
    let start = comp.iter().position(|&e| e == p.edge).expect("edge on its component");
    let mut h = SparseMatrix::zeros(pc.kh_dim(), pc.kh_dim(), Ring::Integers);
    let mut crossings = Vec::new();
    for t in 0..steps {
        let e1 = comp[(start + t) % comp.len()];
        let e2 = comp[(start + t + 1) % comp.len()];
        let x = d.edges[e1].head.expect("crossing edge").crossing;
        let hs = transport_homotopy(&pc.kh, x, &Basepoint { edge: e1, slot: 0 }, &Basepoint { edge: e2, slot: 0 })?;
        h = h.add(&hs);
        crossings.push(x);
    }
    // dH + Hd = ξ_p - ξ_{p'}; the isomorphism wants the opposite sign
    let h = h.scale(-1);
    let target_points = pc.points.replaced(j, target)?;
    let tgt = build_pointed(&pc.kh, &target_points);
    let correction = pc.lift(|u| wedge_right(u, j), &h);
    let iso = SparseMatrix::identity(pc.dim(), Ring::Integers).add(&correction);
    Ok(BasepointMove { target: tgt, iso, crossings })
}

/// Move point `j` forward along its component to `target`.
pub fn basepoint_move_iso(pc: &PointedComplex, j: usize, target: Basepoint) -> Result<BasepointMove, PointedError> {
    let d = &pc.kh.cube.diagram;
    let p = pc.points.points[j];
    if d.edges[p.edge].component != d.edges[target.edge].component {
        return Err(PointedError::DifferentComponents);
    }
    let comp = &d.components[d.edges[p.edge].component];
    let a = comp.iter().position(|&e| e == p.edge).unwrap();
    let b = comp.iter().position(|&e| e == target.edge).unwrap();
    move_steps(pc, j, (b + comp.len() - a) % comp.len(), target)
}

/// Carry point `j` once around its whole component.
pub fn basepoint_loop_iso(pc: &PointedComplex, j: usize) -> Result<BasepointMove, PointedError> {
    let d = &pc.kh.cube.diagram;
    let p = pc.points.points[j];
    let steps = if d.edges[p.edge].is_loop() { 0 } else { d.components[d.edges[p.edge].component].len() };
    move_steps(pc, j, steps, p)
}

/// `f d_source = d_target f`.
pub fn is_chain_map(f: &SparseMatrix, d_source: &SparseMatrix, d_target: &SparseMatrix) -> bool {
    f.mul(d_source) == d_target.mul(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoublingReport {
    pub ranks: BTreeMap<(i32, i32), usize>,
    pub ranks_removed: BTreeMap<(i32, i32), usize>,
    pub bigraded_holds: bool,
    /// Keyed by `2δ = 2h - q`.
    pub delta: BTreeMap<i32, usize>,
    pub delta_removed: BTreeMap<i32, usize>,
    pub delta_holds: bool,
}

impl DoublingReport {
    pub fn holds(&self) -> bool {
        self.bigraded_holds && self.delta_holds
    }
}

/// Compare `Kh(L, p)` with `Kh(L, p \ {p_{j1}})` where `p_{j0}`, `p_{j1}` share a component.
pub fn doubling_witness(
    d: &LinkDiagram,
    coloring: &Coloring,
    points: &BasepointSet,
    j0: usize,
    j1: usize,
    ring: Ring,
) -> Result<DoublingReport, PointedError> {
    let comp = |j: usize| d.edges[points.points[j].edge].component;
    if j0 == j1 || comp(j0) != comp(j1) {
        return Err(PointedError::SameComponentRequired);
    }
    let kh = build_ckh(d, coloring);
    let full = build_pointed(&kh, points).homology(ring);
    let less = build_pointed(&kh, &points.without(j1)).homology(ring);
    let ranks = full.ranks();
    let ranks_removed = less.ranks();
    let mut keys: Vec<(i32, i32)> = ranks.keys().copied().collect();
    keys.extend(ranks_removed.keys().map(|&(h, q)| (h + 1, q + 2)));
    keys.extend(ranks_removed.keys().copied());
    let get = |m: &BTreeMap<(i32, i32), usize>, k| m.get(&k).copied().unwrap_or(0);
    let bigraded_holds = keys
        .iter()
        .all(|&(h, q)| get(&ranks, (h, q)) == get(&ranks_removed, (h, q)) + get(&ranks_removed, (h - 1, q - 2)));
    let delta = full.delta_ranks();
    let delta_removed = less.delta_ranks();
    let delta_holds =
        delta.len() == delta_removed.len() && delta_removed.iter().all(|(k, r)| delta.get(k) == Some(&(2 * r)));
    Ok(DoublingReport { ranks, ranks_removed, bigraded_holds, delta, delta_removed, delta_holds })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedRelation {
    /// `rank Kh^δ(L, p)` keyed by `2δ`.
    pub pointed: BTreeMap<i32, usize>,
    /// `rank K̃h^δ(L, p_j)` keyed by `2δ`.
    pub reduced: BTreeMap<i32, usize>,
    /// `2^{|p|-1} (rank K̃h^{δ+1/2} + rank K̃h^{δ-1/2})` keyed by `2δ`.
    pub bound: BTreeMap<i32, usize>,
    pub equality_expected: bool,
    pub holds: bool,
}

/// Check the rank relation between `Kh(L, p)` and the reduced homology at `p_j`.
pub fn reduced_relation(
    d: &LinkDiagram,
    coloring: &Coloring,
    points: &BasepointSet,
    j: usize,
    ring: Ring,
) -> ReducedRelation {
    assert!(ring.is_field(), "rank relations need field coefficients");
    let kh = build_ckh(d, coloring);
    let pointed = build_pointed(&kh, points).homology(ring).delta_ranks();
    let reduced = build_reduced(&kh, &points.points[j]).complex.homology(ring).delta_ranks();
    let mult = 1usize << (points.len() - 1);
    let mut bound = BTreeMap::new();
    for (&k, &r) in &reduced {
        *bound.entry(k - 1).or_insert(0) += mult * r;
        *bound.entry(k + 1).or_insert(0) += mult * r;
    }
    let equality_expected = d.num_components() == 1;
    let holds = if equality_expected {
        pointed == bound
    } else {
        pointed.iter().all(|(k, &r)| r <= bound.get(k).copied().unwrap_or(0))
    };
    ReducedRelation { pointed, reduced, bound, equality_expected, holds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{checkerboard, parse_pd};

    fn one_crossing() -> PointedComplex {
        let d = parse_pd("X(1,2,2,1)", 0).unwrap();
        let c = checkerboard(&d, None).unwrap();
        let pts = BasepointSet::parse(&d, "1,2").unwrap();
        pointed_from_diagram(&d, &c, &pts)
    }

    #[test]
    fn one_crossing_example_homology() {
        let p = one_crossing();
        assert_eq!(p.dim(), 4 * 6);
        assert!(p.complex.d_squared_is_zero());
        assert!(p.complex.is_bigraded());
        let h = p.homology(Ring::Integers);
        assert!(!h.has_torsion());
        let expect: BTreeMap<(i32, i32), usize> = [((0, -1), 1), ((1, 1), 1), ((1, 3), 1), ((2, 5), 1)].into();
        assert_eq!(h.ranks(), expect);
    }

    #[test]
    fn displayed_map_y00_to_minus_y10_x() {
        // y_∅ ⊗ (v=0, 1) has ξ_{p1}-component -y_{p1} ⊗ x since p1 is on an odd edge
        let p = one_crossing();
        let src = p.index(0, 0);
        let tgt = p.index(0b01, 1);
        assert_eq!(p.complex.d.get(tgt, src), -1);
        let tgt2 = p.index(0b10, 1);
        assert_eq!(p.complex.d.get(tgt2, src), 1);
    }

    #[test]
    fn empty_pointset_is_khovanov() {
        let d = parse_pd("X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)", 0).unwrap();
        let c = checkerboard(&d, None).unwrap();
        let kh = build_ckh(&d, &c);
        let p = build_pointed(&kh, &BasepointSet::default());
        assert_eq!(p.complex, kh.complex);
    }

    #[test]
    fn trivial_move_is_identity() {
        let p = one_crossing();
        let mv = basepoint_move_iso(&p, 0, p.points.points[0]).unwrap();
        assert_eq!(mv.iso, SparseMatrix::identity(p.dim(), Ring::Integers));
    }
}
