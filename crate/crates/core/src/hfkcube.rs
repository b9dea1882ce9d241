//! The ℤ₂ model of the knot Floer cube at the E₁ level: vertex modules
//! `Λ_{L_v,p} ⊗ Γ_{L_v}` with Maslov/Alexander gradings, the Alexander-homogeneous
//! edge maps f⁰ and f¹, and the E₂ pages of `Σ f⁰` and `Σ (f⁰ + f¹)`.
//!
//! All gradings are stored doubled so that half-integers stay exact.

use crate::diagram::{vertex_string, BasepointSet, Coloring, LinkDiagram, Resolution};
use crate::exactla::{GradedComplex, Ring, SparseMatrix};
use crate::khovanov::{saddle_geom, SaddleGeom};
use crate::pointed::pointed_from_diagram;
use crate::spectral::{cube_e0_iso, pages, FilteredComplex, PageReport, SpectralError};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HfkError {
    #[error("DegenerateResolution: resolution {0} has a circle without basepoints")]
    DegenerateResolution(String),
    #[error("DegenerateVertex: resolution {0} has a circle without basepoints")]
    DegenerateVertex(String),
    #[error("NotAnEdge: {0} -> {1}")]
    NotAnEdge(String, String),
    #[error("NonUniqueSolution: edge {edge}, {nullity} free unknowns")]
    NonUniqueSolution { edge: String, nullity: usize },
    #[error("NoSolution: edge {0}")]
    NoSolution(String),
    #[error("MismatchAt: edge {0}")]
    MismatchAt(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Doubled gradings of a basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HfkGrading {
    pub maslov2: i32,
    pub alexander2: i32,
    /// `2δ = 2(A - M)`
    pub delta2: i32,
    /// `2Δ = 2(A - M) + |v| - n₊`
    pub big_delta2: i32,
    /// `2𝒢 = 2A + |v| - l_v`
    pub g2: i32,
}

/// A ℤ₂ vector: the set of basis indices with coefficient 1.
pub type Gf2Vec = BTreeSet<usize>;

fn xor_into(acc: &mut Gf2Vec, v: impl IntoIterator<Item = usize>) {
    for i in v {
        if !acc.remove(&i) {
            acc.insert(i);
        }
    }
}

#[derive(Debug, Clone)]
pub struct HfkVertexModule {
    pub vertex: u64,
    pub l: usize,
    pub point_circle: Vec<usize>,
    pub sections: Vec<usize>,
    /// Pairs `(B, T)`: `B` a set of non-section points, `T` a set of circles.
    /// The pair `(∅, ∅)` is `x_max`.
    pub basis: Vec<(u32, u32)>,
    pub gradings: Vec<HfkGrading>,
    index: HashMap<(u32, u32), usize>,
}

impl HfkVertexModule {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn m(&self) -> usize {
        self.point_circle.len()
    }

    pub fn index_of(&self, b: u32, t: u32) -> Option<usize> {
        self.index.get(&(b, t)).copied()
    }

    fn section_mask(&self) -> u32 {
        self.sections.iter().fold(0, |m, &p| m | 1 << p)
    }

    /// Reduce the monomial `y_u` modulo `α_i = 0` (mod 2) to free monomials.
    pub fn reduce(&self, u: u32) -> BTreeSet<u32> {
        let sec = self.section_mask();
        let hit = u & sec;
        if hit == 0 {
            return BTreeSet::from([u]);
        }
        let s = hit.trailing_zeros() as usize;
        let rest = u & !(1 << s);
        let mut out = BTreeSet::new();
        for q in 0..self.m() {
            if q != s && self.point_circle[q] == self.point_circle[s] && rest >> q & 1 == 0 {
                for w in self.reduce(rest | 1 << q) {
                    if !out.remove(&w) {
                        out.insert(w);
                    }
                }
            }
        }
        out
    }

    /// `y_u · (λ ⊗ γ_T)` on a basis element.
    pub fn mul_lambda(&self, u: u32, i: usize) -> Gf2Vec {
        let (b, t) = self.basis[i];
        let mut out = Gf2Vec::new();
        if u & b == 0 {
            xor_into(&mut out, self.reduce(u | b).into_iter().map(|w| self.index[&(w, t)]));
        }
        out
    }

    pub fn y_matrix(&self, p: usize) -> SparseMatrix {
        gf2_matrix(self.dim(), (0..self.dim()).map(|i| self.mul_lambda(1 << p, i)).collect())
    }

    pub fn gamma_matrix(&self, c: usize) -> SparseMatrix {
        let cols = (0..self.dim())
            .map(|i| {
                let (b, t) = self.basis[i];
                if t >> c & 1 == 1 {
                    Gf2Vec::new()
                } else {
                    Gf2Vec::from([self.index[&(b, t | 1 << c)]])
                }
            })
            .collect();
        gf2_matrix(self.dim(), cols)
    }

    pub fn basis_name(&self, i: usize) -> String {
        let (b, t) = self.basis[i];
        let mut parts: Vec<String> = (0..self.m()).filter(|p| b >> p & 1 == 1).map(|p| format!("y{}", p + 1)).collect();
        parts.extend((0..self.l).filter(|c| t >> c & 1 == 1).map(|c| format!("g{}", c + 1)));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("")
        }
    }
}

fn gf2_matrix(rows: usize, cols: Vec<Gf2Vec>) -> SparseMatrix {
    SparseMatrix::from_columns(
        rows,
        Ring::PrimeField(2),
        cols.into_iter().map(|c| c.into_iter().map(|r| (r, 1)).collect()).collect(),
    )
}

/// The vertex module of a resolution with its four gradings.
pub fn vertex_module(d: &LinkDiagram, r: &Resolution, pts: &BasepointSet) -> Result<HfkVertexModule, HfkError> {
    if !r.is_nondegenerate(pts) {
        return Err(HfkError::DegenerateResolution(vertex_string(r.vertex, r.n)));
    }
    let l = r.num_circles();
    let point_circle = r.point_circle(pts);
    let m = point_circle.len();
    let mut sections = vec![usize::MAX; l];
    for (p, &c) in point_circle.iter().enumerate() {
        if sections[c] == usize::MAX {
            sections[c] = p;
        }
    }
    let sec = sections.iter().fold(0u32, |a, &p| a | 1 << p);
    let free = ((1u32 << m) - 1) & !sec;
    let mut basis: Vec<(u32, u32)> =
        (0..1u32 << m).filter(|b| b & !free == 0).flat_map(|b| (0..1u32 << l).map(move |t| (b, t))).collect();
    basis.sort();
    let w = r.vertex.count_ones() as i32;
    let n_plus = d.n_plus as i32;
    let gradings = basis
        .iter()
        .map(|&(b, t)| {
            let a2 = -2 * b.count_ones() as i32;
            let m2 = l as i32 - 2 * b.count_ones() as i32 - 2 * t.count_ones() as i32;
            HfkGrading {
                maslov2: m2,
                alexander2: a2,
                delta2: a2 - m2,
                big_delta2: a2 - m2 + w - n_plus,
                g2: a2 + w - l as i32,
            }
        })
        .collect();
    let index = basis.iter().enumerate().map(|(i, &bt)| (bt, i)).collect();
    Ok(HfkVertexModule { vertex: r.vertex, l, point_circle, sections, basis, gradings, index })
}

#[derive(Debug, Clone)]
pub struct HfkEdgeMaps {
    pub source: u64,
    pub target: u64,
    pub crossing: usize,
    pub merge: bool,
    /// The basepoints immediately preceding the two passages of the single circle
    /// through the crossing, in the order of the circle orientation.
    pub distinguished: [usize; 2],
    pub f0: SparseMatrix,
    pub f1: SparseMatrix,
    pub unknowns: usize,
}

impl HfkEdgeMaps {
    pub fn name(&self, n: usize) -> String {
        format!("{}->{}", vertex_string(self.source, n), vertex_string(self.target, n))
    }

    /// Alexander shift of f⁰: -1 for merges, 0 for splits (doubled: -2, 0).
    pub fn f0_alexander2(&self) -> i32 {
        if self.merge {
            -2
        } else {
            0
        }
    }
}

fn check_edge(d: &LinkDiagram, u: u64, v: u64) -> Result<usize, HfkError> {
    let diff = u ^ v;
    if diff.count_ones() != 1 || v & diff == 0 {
        return Err(HfkError::NotAnEdge(vertex_string(u, d.n()), vertex_string(v, d.n())));
    }
    Ok(diff.trailing_zeros() as usize)
}

/// Source circle pulled back from each target circle.
fn pullback(g: &SaddleGeom) -> Vec<usize> {
    g.corr
        .iter()
        .map(|&s| {
            if s == usize::MAX {
                if g.merge {
                    usize::MAX
                } else {
                    g.src[0]
                }
            } else {
                s
            }
        })
        .collect()
}

/// f⁰ on basis elements: `λγ ↦ λ γ̃ (γ'₀ + γ'₁)` for splits, `λγ ↦ λ α'₀ μ(γ)` for merges.
pub fn f0_edge_map(
    d: &LinkDiagram,
    src: &HfkVertexModule,
    tgt: &HfkVertexModule,
    geom: &SaddleGeom,
) -> Result<SparseMatrix, HfkError> {
    check_edge(d, src.vertex, tgt.vertex)?;
    let mut lift = vec![0usize; src.l];
    for (t, &s) in geom.corr.iter().enumerate() {
        if s != usize::MAX {
            lift[s] = t;
        }
    }
    if geom.merge {
        lift[geom.src[0]] = geom.tgt[0];
        lift[geom.src[1]] = geom.tgt[0];
    } else {
        lift[geom.src[0]] = geom.tgt[0];
    }
    let cols = (0..src.dim())
        .map(|i| {
            let (b, t) = src.basis[i];
            let mut tt = 0u32;
            let mut zero = false;
            for (c, &lc) in lift.iter().enumerate().take(src.l) {
                if t >> c & 1 == 1 {
                    zero |= tt >> lc & 1 == 1;
                    tt |= 1 << lc;
                }
            }
            let mut out = Gf2Vec::new();
            if zero {
                return out;
            }
            if geom.merge {
                for p in (0..src.m()).filter(|&p| src.point_circle[p] == geom.src[0]) {
                    if b >> p & 1 == 0 {
                        xor_into(&mut out, tgt.reduce(b | 1 << p).into_iter().map(|w| tgt.index[&(w, tt)]));
                    }
                }
            } else {
                for piece in geom.tgt {
                    if tt >> piece & 1 == 0 {
                        let t2 = tt | 1 << piece;
                        xor_into(&mut out, tgt.reduce(b).into_iter().map(|w| tgt.index[&(w, t2)]));
                    }
                }
            }
            out
        })
        .collect();
    Ok(gf2_matrix(tgt.dim(), cols))
}

/// Basepoints immediately preceding each passage of the single circle through `x`.
pub fn distinguished_points(
    d: &LinkDiagram,
    r: &Resolution,
    circle: usize,
    x: usize,
    pts: &BasepointSet,
) -> [usize; 2] {
    let c = &r.circles[circle];
    let mut seq: Vec<Vec<usize>> = Vec::new();
    for (&e, &fwd) in c.arcs.iter().zip(&c.forward) {
        let mut on: Vec<(u32, usize)> =
            pts.points.iter().enumerate().filter(|(_, p)| p.edge == e).map(|(i, p)| (p.slot, i)).collect();
        on.sort();
        if !fwd {
            on.reverse();
        }
        seq.push(on.into_iter().map(|(_, i)| i).collect());
    }
    let arrives_at_x = |i: usize| {
        let ed = &d.edges[c.arcs[i]];
        let end = if c.forward[i] { ed.head } else { ed.tail };
        end.is_some_and(|e| e.crossing == x)
    };
    let len = c.arcs.len();
    let found: Vec<usize> = (0..len)
        .filter(|&i| arrives_at_x(i))
        .map(|i| (0..len).find_map(|back| seq[(i + len - back) % len].last().copied()).expect("non-degenerate circle"))
        .collect();
    assert_eq!(found.len(), 2, "the single circle passes the crossing twice");
    [found[0], found[1]]
}

/// Sparse Gaussian elimination over ℤ₂. Each equation is a sorted variable list and a
/// right-hand side. Returns the unique solution, or the nullity when it is not unique.
fn gf2_solve(nvars: usize, mut eqs: Vec<(Vec<usize>, bool)>) -> Result<Vec<bool>, Option<usize>> {
    eqs.sort_by_key(|e| e.0.len());
    let mut pivots: Vec<Option<(Vec<usize>, bool)>> = vec![None; nvars];
    let mut rank = 0;
    for (mut row, mut rhs) in eqs {
        while let Some(&lead) = row.first() {
            let Some((prow, prhs)) = &pivots[lead] else { break };
            row = sym_diff(&row, prow);
            rhs ^= prhs;
        }
        match row.first() {
            None if rhs => return Err(None),
            None => {}
            Some(&lead) => {
                pivots[lead] = Some((row, rhs));
                rank += 1;
            }
        }
    }
    if rank < nvars {
        return Err(Some(nvars - rank));
    }
    let mut val = vec![false; nvars];
    for v in (0..nvars).rev() {
        let (row, rhs) = pivots[v].as_ref().unwrap();
        val[v] = row[1..].iter().fold(*rhs, |acc, &w| acc ^ val[w]);
    }
    Ok(val)
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Solve for f¹: commutes with Γ, `[f¹, y_p] = f⁰` at the distinguished points and 0
/// elsewhere, `f¹(x_max) = 0` for splits and `g¹(y_max) = x_max` for merges.
pub fn f1_edge_map(
    d: &LinkDiagram,
    src: &HfkVertexModule,
    tgt: &HfkVertexModule,
    geom: &SaddleGeom,
    distinguished: [usize; 2],
    f0: &SparseMatrix,
) -> Result<(SparseMatrix, usize), HfkError> {
    let name = format!("{}->{}", vertex_string(src.vertex, d.n()), vertex_string(tgt.vertex, d.n()));
    let shift = if geom.merge { -2 } else { 0 } + 2;
    let (ns, nt) = (src.dim(), tgt.dim());
    let mut var = vec![usize::MAX; ns * nt];
    let mut unknowns = Vec::new();
    for i in 0..ns {
        for j in 0..nt {
            if tgt.gradings[j].alexander2 - src.gradings[i].alexander2 == shift {
                var[j * ns + i] = unknowns.len();
                unknowns.push((j, i));
            }
        }
    }
    let mut eqs: Vec<(Vec<usize>, bool)> = Vec::new();
    // f1 · A_src + B_tgt · f1 = rhs, entrywise; only entries touched by an unknown or the rhs
    let mut push_commutator = |a: &SparseMatrix, b: &SparseMatrix, rhs: Option<&SparseMatrix>| {
        let at = a.transpose();
        // (entry, unknown) incidences; an entry is (row j, column i) packed as j * ns + i
        let mut inc: Vec<(usize, usize)> = Vec::new();
        for (x, &(j, k)) in unknowns.iter().enumerate() {
            inc.extend(at.col(k).iter().map(|&(i, _)| (j * ns + i, x)));
            // X[j,k] also appears in (B·f1)[r,k] for r in column j of B
            inc.extend(b.col(j).iter().map(|&(r, _)| (r * ns + k, x)));
        }
        if let Some(m) = rhs {
            inc.extend(m.triplets().map(|(r, c, _)| (r * ns + c, usize::MAX)));
        }
        inc.sort_unstable();
        for group in inc.chunk_by(|a, b| a.0 == b.0) {
            let mut clean: Vec<usize> = Vec::with_capacity(group.len());
            let mut r = false;
            for &(_, x) in group {
                if x == usize::MAX {
                    r = true;
                } else if clean.last() == Some(&x) {
                    clean.pop();
                } else {
                    clean.push(x);
                }
            }
            if !clean.is_empty() || r {
                eqs.push((clean, r));
            }
        }
    };
    let pb = pullback(geom);
    for (t, &s) in pb.iter().enumerate() {
        if geom.merge && s == usize::MAX {
            for &s2 in &geom.src {
                push_commutator(&src.gamma_matrix(s2), &tgt.gamma_matrix(t), None);
            }
        } else {
            push_commutator(&src.gamma_matrix(s), &tgt.gamma_matrix(t), None);
        }
    }
    for p in 0..src.m() {
        let hits = distinguished.iter().filter(|&&q| q == p).count();
        let rhs = (hits % 2 == 1).then_some(f0);
        push_commutator(&src.y_matrix(p), &tgt.y_matrix(p), rhs);
    }
    let base_src = src.index_of(0, 0).expect("x_max");
    let base_tgt = tgt.index_of(0, 0).expect("x_max");
    for j in 0..tgt.dim() {
        let want = geom.merge && j == base_tgt;
        match var[j * ns + base_src] {
            usize::MAX if want => return Err(HfkError::NoSolution(name)),
            usize::MAX => {}
            x => eqs.push((vec![x], want)),
        }
    }
    let sol = gf2_solve(unknowns.len(), eqs).map_err(|e| match e {
        None => HfkError::NoSolution(name.clone()),
        Some(nullity) => HfkError::NonUniqueSolution { edge: name.clone(), nullity },
    })?;
    let trip = unknowns.iter().zip(&sol).filter(|(_, &v)| v).map(|(&(j, i), _)| (j, i, 1));
    Ok((SparseMatrix::from_triplets(tgt.dim(), src.dim(), Ring::PrimeField(2), trip), unknowns.len()))
}

/// Vertex modules, edge maps and both d₁ differentials.
#[derive(Debug, Clone)]
pub struct HfkE1 {
    pub n: usize,
    pub modules: Vec<HfkVertexModule>,
    pub offsets: Vec<usize>,
    pub edges: Vec<HfkEdgeMaps>,
    pub d_f0: SparseMatrix,
    pub d_full: SparseMatrix,
}

/// Ranks keyed by `(level, 2Δ)`.
pub type DeltaRanks = BTreeMap<(i32, i32), usize>;

impl HfkE1 {
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn vertex_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    pub fn grading(&self, i: usize) -> HfkGrading {
        let v = self.vertex_of(i);
        self.modules[v].gradings[i - self.offsets[v]]
    }

    pub fn level(&self, i: usize) -> i32 {
        self.vertex_of(i).count_ones() as i32
    }

    pub fn generator_name(&self, i: usize) -> String {
        let v = self.vertex_of(i);
        format!("{}:{}", vertex_string(v as u64, self.n), self.modules[v].basis_name(i - self.offsets[v]))
    }

    fn graded(&self, d: &SparseMatrix, key: impl Fn(usize) -> (i32, i32)) -> GradedComplex {
        GradedComplex { gradings: (0..self.dim()).map(key).collect(), d: d.clone() }
    }

    /// E₂ of `(E₁, Σ f⁰)` by `(level, 2Δ)`; d₁ raises both by one step.
    pub fn e2_f0(&self) -> DeltaRanks {
        let h = self
            .graded(&self.d_f0, |i| (self.level(i), self.grading(i).big_delta2 - 2 * self.level(i)))
            .homology(Ring::PrimeField(2));
        h.ranks().into_iter().map(|((p, c), n)| ((p, c + 2 * p), n)).collect()
    }

    /// E₂ of `(E₁, Σ f⁰)` by `(level, 2𝒢)`.
    pub fn e2_f0_g(&self) -> BTreeMap<(i32, i32), usize> {
        self.graded(&self.d_f0, |i| (self.level(i), self.grading(i).g2)).homology(Ring::PrimeField(2)).ranks()
    }

    /// E₂ of `(E₁, Σ (f⁰ + f¹))` by level.
    pub fn e2_full(&self) -> BTreeMap<i32, usize> {
        let h = self.graded(&self.d_full, |i| (self.level(i), 0)).homology(Ring::PrimeField(2));
        h.ranks().into_iter().map(|((p, _), n)| (p, n)).collect()
    }

    /// Pages of the 𝒢-filtration on `(E₁, Σ (f⁰ + f¹))`, whose E₁ is `(E₁, Σ f⁰)`.
    pub fn g_filtered_full(&self) -> FilteredComplex {
        let cx = self.graded(&self.d_full, |i| (self.level(i), 0));
        FilteredComplex::new(
            cx,
            (0..self.dim()).map(|i| self.grading(i).g2 / 2 + self.grading(i).g2.rem_euclid(2)).collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<_> = (0..self.dim())
            .map(|i| {
                let g = self.grading(i);
                json!({"generator": self.generator_name(i), "level": self.level(i), "maslov2": g.maslov2,
                       "alexander2": g.alexander2, "Delta2": g.big_delta2, "G2": g.g2})
            })
            .collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let t = |m: &SparseMatrix| m.triplets().map(|(r, c, _)| [r, c]).collect::<Vec<_>>();
                json!({"edge": e.name(self.n), "crossing": e.crossing + 1, "merge": e.merge,
                       "distinguished": [e.distinguished[0] + 1, e.distinguished[1] + 1],
                       "f0": t(&e.f0), "f1": t(&e.f1)})
            })
            .collect();
        json!({"generators": gens, "edges": edges})
    }
}

/// Build the E₁ data with both differentials. Each edge's f¹ system must be uniquely solvable.
pub fn build_e1(d: &LinkDiagram, c: &Coloring, pts: &BasepointSet) -> Result<HfkE1, HfkError> {
    let res = crate::diagram::all_resolutions(d, c);
    let n = d.n();
    for r in &res {
        if !r.is_nondegenerate(pts) {
            return Err(HfkError::DegenerateVertex(vertex_string(r.vertex, n)));
        }
    }
    let modules: Vec<HfkVertexModule> = res.iter().map(|r| vertex_module(d, r, pts)).collect::<Result<_, _>>()?;
    let mut offsets = vec![0];
    for m in &modules {
        offsets.push(offsets.last().unwrap() + m.dim());
    }
    let pairs: Vec<(usize, usize)> =
        (0..res.len()).flat_map(|u| (0..n).filter(move |&x| u >> x & 1 == 0).map(move |x| (u, x))).collect();
    let edges: Vec<HfkEdgeMaps> = pairs
        .par_iter()
        .map(|&(u, x)| {
            let v = u | 1 << x;
            let geom = saddle_geom(d, &res[u], &res[v], x);
            let (single_res, single_circle) = if geom.merge { (&res[v], geom.tgt[0]) } else { (&res[u], geom.src[0]) };
            let distinguished = distinguished_points(d, single_res, single_circle, x, pts);
            let f0 = f0_edge_map(d, &modules[u], &modules[v], &geom)?;
            let (f1, unknowns) = f1_edge_map(d, &modules[u], &modules[v], &geom, distinguished, &f0)?;
            Ok(HfkEdgeMaps {
                source: u as u64,
                target: v as u64,
                crossing: x,
                merge: geom.merge,
                distinguished,
                f0,
                f1,
                unknowns,
            })
        })
        .collect::<Result<_, HfkError>>()?;
    let total = *offsets.last().unwrap();
    let assemble = |with_f1: bool| {
        let mut trip = Vec::new();
        for e in &edges {
            let (ou, ov) = (offsets[e.source as usize], offsets[e.target as usize]);
            trip.extend(e.f0.triplets().map(|(r, c, a)| (ov + r, ou + c, a)));
            if with_f1 {
                trip.extend(e.f1.triplets().map(|(r, c, a)| (ov + r, ou + c, a)));
            }
        }
        SparseMatrix::from_triplets(total, total, Ring::PrimeField(2), trip)
    };
    let d_f0 = assemble(false);
    let d_full = assemble(true);
    Ok(HfkE1 { n, modules, offsets, edges, d_f0, d_full })
}

pub fn build_e1_f0(d: &LinkDiagram, c: &Coloring, pts: &BasepointSet) -> Result<(HfkE1, DeltaRanks), HfkError> {
    let e1 = build_e1(d, c, pts)?;
    let r = e1.e2_f0();
    Ok((e1, r))
}

pub fn build_e1_full(
    d: &LinkDiagram,
    c: &Coloring,
    pts: &BasepointSet,
) -> Result<(HfkE1, BTreeMap<i32, usize>), HfkError> {
    let e1 = build_e1(d, c, pts)?;
    let r = e1.e2_full();
    Ok((e1, r))
}

/// Alexander and 𝒢 bookkeeping of one edge: f⁰ entries shift A by -1 (merge) or 0
/// (split) and preserve 𝒢; f¹ entries shift A one higher and raise 𝒢 by one.
pub fn edge_ledger_holds(e1: &HfkE1, e: &HfkEdgeMaps) -> bool {
    let (s, t) = (&e1.modules[e.source as usize], &e1.modules[e.target as usize]);
    let a0 = e.f0_alexander2();
    let f0_ok = e.f0.triplets().all(|(r, c, _)| {
        t.gradings[r].alexander2 - s.gradings[c].alexander2 == a0 && t.gradings[r].g2 == s.gradings[c].g2
    });
    let f1_ok = e.f1.triplets().all(|(r, c, _)| {
        t.gradings[r].alexander2 - s.gradings[c].alexander2 == a0 + 2 && t.gradings[r].g2 - s.gradings[c].g2 == 2
    });
    f0_ok && f1_ok
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub isomorphic: bool,
    /// Pairs of identified generators (Khovanov E₁, Floer E₁).
    pub witness: Vec<(String, String)>,
    pub khovanov_e2: DeltaRanks,
    pub floer_e2: DeltaRanks,
    pub khovanov_pages: PageReport,
}

impl CompareReport {
    pub fn to_json(&self) -> serde_json::Value {
        let t = |m: &DeltaRanks| {
            m.iter().map(|(&(p, d2), &n)| json!({"level": p, "Delta2": d2, "rank": n})).collect::<Vec<_>>()
        };
        json!({
            "isomorphic": self.isomorphic,
            "witness": self.witness.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "khovanov_e2": t(&self.khovanov_e2),
            "floer_e2": t(&self.floer_e2),
        })
    }
}

/// Identify the Khovanov E₁ page of the cube filtration with the Floer E₁ of `Σ f⁰`
/// basis element by basis element and compare d₁ mod 2 edge by edge.
pub fn compare_e1(d: &LinkDiagram, c: &Coloring, pts: &BasepointSet) -> Result<CompareReport, HfkError> {
    let pc = pointed_from_diagram(d, c, pts);
    let kh = cube_e0_iso(&pc)?;
    let hf = build_e1(d, c, pts)?;
    let n = d.n();
    let mut witness = Vec::with_capacity(hf.dim());
    for (v, (km, hm)) in kh.modules.iter().zip(&hf.modules).enumerate() {
        let vs = vertex_string(v as u64, n);
        if km.basis != hm.basis {
            return Err(HfkError::MismatchAt(format!("vertex {vs}")));
        }
        for j in 0..km.dim() {
            let (h, q) = kh.complex.gradings[kh.offsets[v] + j];
            if 2 * h - q != hm.gradings[j].big_delta2 {
                return Err(HfkError::MismatchAt(format!("vertex {vs} generator {}", hm.basis_name(j))));
            }
            witness.push((kh.generator_name(kh.offsets[v] + j), hf.generator_name(hf.offsets[v] + j)));
        }
    }
    let by_edge: HashMap<(u64, u64), &HfkEdgeMaps> = hf.edges.iter().map(|e| ((e.source, e.target), e)).collect();
    for e in &kh.edges {
        let f = by_edge[&(e.source, e.target)];
        if e.matrix.over(Ring::PrimeField(2)) != f.f0 {
            return Err(HfkError::MismatchAt(f.name(n)));
        }
    }
    let khovanov_pages = pages(&FilteredComplex::cube(&pc), 2, Ring::PrimeField(2));
    let khovanov_e2 = PageReport::delta_ranks(&khovanov_pages.pages[2]);
    let floer_e2 = hf.e2_f0();
    Ok(CompareReport { isomorphic: khovanov_e2 == floer_e2, witness, khovanov_e2, floer_e2, khovanov_pages })
}
