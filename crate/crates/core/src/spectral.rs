//! Spectral sequences of filtered complexes over a field, and the cube filtration of
//! the pointed complex with its E₀/E₁ identification.

use crate::diagram::{edge_sign_exponent, vertex_string};
use crate::exactla::field::Field;
use crate::exactla::{GradedComplex, Ring, SparseMatrix};
use crate::khovanov::saddle_geom;
use crate::pointed::PointedComplex;
use crate::unlinkmod::{module_structure_unchecked, EdgeMapSpec, SparseVec, UnlinkComplex, UnlinkError, UnlinkModule};
use crate::with_field;
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error("DegenerateVertex: resolution {0} has a circle without basepoints")]
    DegenerateVertex(String),
    #[error("E0 identification fails at vertex {0}")]
    E0Mismatch(String),
    #[error(transparent)]
    Unlink(#[from] UnlinkError),
}

/// A bigraded complex with a decreasing filtration: `F^p` is spanned by basis
/// elements of level `>= p`.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub complex: GradedComplex,
    pub levels: Vec<i32>,
}

impl FilteredComplex {
    pub fn new(complex: GradedComplex, levels: Vec<i32>) -> Self {
        assert_eq!(levels.len(), complex.dim());
        for (r, c, _) in complex.d.triplets() {
            assert!(levels[r] >= levels[c], "differential lowers the filtration level");
        }
        FilteredComplex { complex, levels }
    }

    /// The cube filtration of a pointed complex: level `|v|`.
    pub fn cube(pc: &PointedComplex) -> Self {
        let levels = (0..pc.dim()).map(|i| pc.kh.basis[pc.coords(i).1].vertex.count_ones() as i32).collect();
        FilteredComplex::new(pc.complex.clone(), levels)
    }

    fn level_range(&self) -> (i32, i32) {
        let lo = self.levels.iter().copied().min().unwrap_or(0);
        let hi = self.levels.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }
}

/// Ranks of `E_r` keyed by `(level, h, q)`.
pub type PageRanks = BTreeMap<(i32, i32, i32), usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageReport {
    pub ring: Ring,
    pub pages: Vec<PageRanks>,
    pub infinity: PageRanks,
    pub homology_rank: usize,
    /// First page whose total rank equals that of homology.
    pub converged_at: Option<usize>,
}

impl PageReport {
    pub fn total(&self, r: usize) -> usize {
        self.pages[r].values().sum()
    }

    pub fn infinity_total(&self) -> usize {
        self.infinity.values().sum()
    }

    /// Ranks keyed by `(level, 2δ)` with `2δ = 2h - q`.
    pub fn delta_ranks(ranks: &PageRanks) -> BTreeMap<(i32, i32), usize> {
        let mut out = BTreeMap::new();
        for (&(p, h, q), &n) in ranks {
            *out.entry((p, 2 * h - q)).or_insert(0) += n;
        }
        out
    }

    pub fn table(&self) -> String {
        let mut s = format!("ring: {}\n", self.ring);
        for (r, page) in self.pages.iter().enumerate() {
            s += &format!("E{r}: total {}\n", self.total(r));
            for ((p, d2), n) in Self::delta_ranks(page) {
                s += &format!("  level {p} delta {}: {n}\n", crate::exactla::half(d2));
            }
        }
        s += &format!("E_inf: total {} (homology rank {})\n", self.infinity_total(), self.homology_rank);
        match self.converged_at {
            Some(r) => s += &format!("converged at E{r}\n"),
            None => s += "not converged within the computed pages\n",
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let page = |ranks: &PageRanks| {
            let bigraded: Vec<_> =
                ranks.iter().map(|(&(p, h, q), &n)| json!({"level": p, "h": h, "q": q, "rank": n})).collect();
            let delta: Vec<_> = Self::delta_ranks(ranks)
                .into_iter()
                .map(|((p, d2), n)| json!({"level": p, "delta2": d2, "rank": n}))
                .collect();
            json!({"total": ranks.values().sum::<usize>(), "bigraded": bigraded, "delta": delta})
        };
        json!({
            "ring": self.ring.to_string(),
            "pages": self.pages.iter().map(page).collect::<Vec<_>>(),
            "infinity": page(&self.infinity),
            "homology_rank": self.homology_rank,
            "converged_at": self.converged_at,
        })
    }
}

/// Filtered column reduction: order the basis by decreasing level, reduce columns so
/// that lowest nonzero rows are distinct. Each pivot pair `(row, col)` is an interval
/// living on pages `E_0 … E_{level(row) - level(col)}`; unpaired elements reach `E_∞`.
fn interval_decomposition<F: Field>(f: &F, fc: &FilteredComplex) -> (Vec<(usize, usize)>, Vec<usize>) {
    let n = fc.complex.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (-fc.levels[i], i));
    let mut pos = vec![0; n];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    let mut cols: Vec<Vec<(usize, F::E)>> = order
        .iter()
        .map(|&i| {
            let mut c: Vec<(usize, F::E)> = fc.complex.d.col(i).iter().map(|&(r, v)| (pos[r], f.embed(v))).collect();
            c.retain(|e| !f.is_zero(&e.1));
            c.sort_by_key(|e| e.0);
            c
        })
        .collect();
    let mut pivot_of: Vec<Option<usize>> = vec![None; n];
    let mut pairs = Vec::new();
    for j in 0..n {
        while let Some(&(low, ref lv)) = cols[j].last() {
            let Some(k) = pivot_of[low] else { break };
            let factor = f.neg(&f.mul(lv, &f.inv(&cols[k].last().unwrap().1)));
            let other = cols[k].clone();
            cols[j] = axpy(f, &cols[j], &factor, &other);
        }
        if let Some(&(low, _)) = cols[j].last() {
            pivot_of[low] = Some(j);
            pairs.push((order[low], order[j]));
        }
    }
    let mut paired = vec![false; n];
    for &(r, c) in &pairs {
        paired[r] = true;
        paired[c] = true;
    }
    (pairs, (0..n).filter(|&i| !paired[i]).collect())
}

fn axpy<F: Field>(f: &F, a: &[(usize, F::E)], s: &F::E, b: &[(usize, F::E)]) -> Vec<(usize, F::E)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, f.mul(s, &b[j].1)));
            j += 1;
        } else {
            let v = f.add(&a[i].1, &f.mul(s, &b[j].1));
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Pages `E_0 … E_{r_max}` and `E_∞` over a field.
pub fn pages(fc: &FilteredComplex, r_max: usize, ring: Ring) -> PageReport {
    assert!(ring.is_field(), "spectral sequences are computed over fields");
    let (lo, hi) = fc.level_range();
    let top = r_max.max((hi - lo + 1) as usize);
    let (pairs, free) = with_field!(ring, f => interval_decomposition(&f, fc));
    let key = |i: usize| {
        let (h, q) = fc.complex.gradings[i];
        (fc.levels[i], h, q)
    };
    let mut all: Vec<PageRanks> = vec![PageRanks::new(); top + 1];
    for (r, page) in all.iter_mut().enumerate() {
        for &i in &free {
            *page.entry(key(i)).or_insert(0) += 1;
        }
        for &(a, b) in &pairs {
            if (fc.levels[a] - fc.levels[b]) as usize >= r {
                *page.entry(key(a)).or_insert(0) += 1;
                *page.entry(key(b)).or_insert(0) += 1;
            }
        }
    }
    let homology_rank = free.len();
    let infinity = all[top].clone();
    let converged_at = all.iter().position(|pg| pg.values().sum::<usize>() == homology_rank);
    all.truncate(r_max + 1);
    PageReport { ring, pages: all, infinity, homology_rank, converged_at }
}

/// One cube edge of the E₁ page. `matrix` is d₁ from the source module to the target
/// module; `sign` is the `s` with `matrix = s · F · diag((-1)^{|B|+|T|})`, `F` the
/// split/merge formula map, when such an `s` exists.
#[derive(Debug, Clone)]
pub struct E1Edge {
    pub source: u64,
    pub target: u64,
    pub crossing: usize,
    pub merge: bool,
    pub matrix: SparseMatrix,
    pub formula: SparseMatrix,
    pub sign: Option<i64>,
    /// `(-1)^{s_{u,v} + n₋ + |L_u|}`.
    pub predicted_sign: i64,
}

/// `E₁ = ⊕_v Λ_{p,L_v} ⊗ Γ_{L_v}` with d₁ in module coordinates.
#[derive(Debug, Clone)]
pub struct E1Page {
    pub n: usize,
    pub modules: Vec<UnlinkModule>,
    pub offsets: Vec<usize>,
    pub levels: Vec<i32>,
    /// d₁ with the bigradings of the pointed complex.
    pub complex: GradedComplex,
    pub edges: Vec<E1Edge>,
}

impl E1Page {
    pub fn vertex_of(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    pub fn generator_name(&self, i: usize) -> String {
        let v = self.vertex_of(i);
        format!("{}:{}", vertex_string(v as u64, self.n), self.modules[v].basis_name(i - self.offsets[v]))
    }

    pub fn filtered(&self) -> FilteredComplex {
        FilteredComplex::new(self.complex.clone(), self.levels.clone())
    }
}

/// Identification of the vertex pieces of a pointed complex with unlink models.
struct VertexIdent {
    model: UnlinkComplex,
    /// pointed index of each model index
    to_pointed: Vec<usize>,
    /// `(-1)^{Σ_{i∈u} ε(p_i)}` for each exterior monomial
    phi: Vec<i64>,
}

fn vertex_ident(pc: &PointedComplex, v: usize, model: UnlinkComplex) -> VertexIdent {
    let m = pc.m();
    let c = &pc.kh.cube.coloring;
    let eps: Vec<u8> = (0..m).map(|j| pc.points.parity(c, j)).collect();
    let phi: Vec<i64> = (0..1u32 << m)
        .map(|u| if (0..m).filter(|&j| u >> j & 1 == 1).map(|j| eps[j] as u32).sum::<u32>() % 2 == 0 { 1 } else { -1 })
        .collect();
    let mut to_pointed = vec![usize::MAX; model.dim()];
    for (k, g) in pc.kh.basis.iter().enumerate() {
        if g.vertex as usize != v {
            continue;
        }
        for u in 0..1u32 << m {
            to_pointed[model.index(u, g.labels as u32)] = pc.index(u, k);
        }
    }
    debug_assert!(to_pointed.iter().all(|&i| i != usize::MAX));
    VertexIdent { model, to_pointed, phi }
}

/// Build the E₁ page of the cube filtration of `pc`, checking the E₀ identification.
pub fn cube_e0_iso(pc: &PointedComplex) -> Result<E1Page, SpectralError> {
    let cube = &pc.kh.cube;
    let n = cube.n();
    for r in &cube.res {
        if !r.is_nondegenerate(&pc.points) {
            return Err(SpectralError::DegenerateVertex(vertex_string(r.vertex, n)));
        }
    }
    let modules: Vec<UnlinkModule> = cube
        .res
        .par_iter()
        .map(|r| module_structure_unchecked(r.num_circles(), r.point_circle(&pc.points)))
        .collect::<Result<_, _>>()?;
    let idents: Vec<VertexIdent> =
        modules.iter().enumerate().map(|(v, m)| vertex_ident(pc, v, m.complex.clone())).collect();
    let mut pointed_pos = vec![(usize::MAX, usize::MAX); pc.dim()];
    for (v, id) in idents.iter().enumerate() {
        for (mi, &pi) in id.to_pointed.iter().enumerate() {
            pointed_pos[pi] = (v, mi);
        }
    }
    let d = &pc.complex.d;
    // d₀ agrees with the model differential after rescaling by φ
    for (v, id) in idents.iter().enumerate() {
        let md = &id.model.complex.d;
        for mi in 0..id.model.dim() {
            let pi = id.to_pointed[mi];
            let (u, _) = id.model.split_index(mi);
            let mut got: SparseVec = d
                .col(pi)
                .iter()
                .filter(|(r, _)| pointed_pos[*r].0 == v)
                .map(|&(r, c)| {
                    let mr = pointed_pos[r].1;
                    let (u2, _) = id.model.split_index(mr);
                    (mr, c * id.phi[u2 as usize] * id.phi[u as usize])
                })
                .collect();
            got.sort();
            if got != md.col(mi) {
                return Err(SpectralError::E0Mismatch(vertex_string(v as u64, n)));
            }
        }
    }
    let mut offsets = Vec::with_capacity(modules.len() + 1);
    let mut total = 0;
    for m in &modules {
        offsets.push(total);
        total += m.dim();
    }
    offsets.push(total);
    let mut gradings = vec![(0, 0); total];
    let mut levels = vec![0; total];
    for (v, m) in modules.iter().enumerate() {
        for (j, rep) in m.reps.iter().enumerate() {
            gradings[offsets[v] + j] = pc.complex.gradings[idents[v].to_pointed[rep[0].0]];
            levels[offsets[v] + j] = v.count_ones() as i32;
        }
    }
    let edges: Vec<E1Edge> = (0..modules.len())
        .into_par_iter()
        .flat_map_iter(|u| (0..n).filter(move |&x| u >> x & 1 == 0).map(move |x| (u, x)))
        .map(|(u, x)| {
            let v = u | 1 << x;
            let (iu, iv) = (&idents[u], &idents[v]);
            let cols: Vec<SparseVec> = modules[u]
                .reps
                .iter()
                .map(|rep| {
                    let mut z: BTreeMap<usize, i64> = BTreeMap::new();
                    for &(mi, a) in rep {
                        let (uu, _) = iu.model.split_index(mi);
                        let a = a * iu.phi[uu as usize];
                        for &(r, c) in d.col(iu.to_pointed[mi]) {
                            let (rv, rmi) = pointed_pos[r];
                            if rv == v {
                                let (u2, _) = iv.model.split_index(rmi);
                                *z.entry(rmi).or_insert(0) += a * c * iv.phi[u2 as usize];
                            }
                        }
                    }
                    let z: SparseVec = z.into_iter().filter(|e| e.1 != 0).collect();
                    modules[v].coordinates(&z)
                })
                .collect();
            let matrix = SparseMatrix::from_columns(modules[v].dim(), Ring::Integers, cols);
            let geom = saddle_geom(&cube.diagram, &cube.res[u], &cube.res[v], x);
            let spec = EdgeMapSpec::new(geom);
            let f = spec.formula_map(&modules[u], &modules[v]).expect("cube edge orderings");
            let twist: Vec<(usize, usize, i64)> = modules[u]
                .basis
                .iter()
                .enumerate()
                .map(|(j, &(b, t))| (j, j, if (b.count_ones() + t.count_ones()) % 2 == 0 { 1 } else { -1 }))
                .collect();
            let formula =
                f.mul(&SparseMatrix::from_triplets(modules[u].dim(), modules[u].dim(), Ring::Integers, twist));
            let sign = [1, -1].into_iter().find(|&s| formula.scale(s) == matrix);
            let predicted_sign =
                if (edge_sign_exponent(v as u64, x) as usize + pc.kh.n_minus() + modules[u].k()).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
            E1Edge {
                source: u as u64,
                target: v as u64,
                crossing: x,
                merge: spec.geom.merge,
                matrix,
                formula,
                sign,
                predicted_sign,
            }
        })
        .collect();
    let mut trip = Vec::new();
    for e in &edges {
        let (ou, ov) = (offsets[e.source as usize], offsets[e.target as usize]);
        trip.extend(e.matrix.triplets().map(|(r, c, a)| (ov + r, ou + c, a)));
    }
    let complex = GradedComplex { gradings, d: SparseMatrix::from_triplets(total, total, Ring::Integers, trip) };
    Ok(E1Page { n, modules, offsets, levels, complex, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(dim: usize, gradings: Vec<(i32, i32)>, trip: Vec<(usize, usize, i64)>) -> GradedComplex {
        GradedComplex { gradings, d: SparseMatrix::from_triplets(dim, dim, Ring::Integers, trip) }
    }

    // Direct computation of dim E_r^p = dim Z_r^p - dim(Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}) per block.
    mod naive {
        use super::super::*;
        use crate::exactla::field::{kernel, mat_vec, rank};

        struct Block<'a> {
            prev: &'a [usize],
            cur: &'a [usize],
            next: &'a [usize],
        }

        fn dense<F: Field>(f: &F, d: &SparseMatrix, rows: &[usize], cols: &[usize]) -> Vec<Vec<F::E>> {
            d.submatrix(rows, cols)
                .to_dense()
                .into_iter()
                .map(|r| r.into_iter().map(|v| f.embed(v)).collect())
                .collect()
        }

        /// `Z_r^p` inside the span of `cols`: vectors in `F^p` whose image lies in `F^{p+r}`.
        fn cycles<F: Field>(
            f: &F,
            d_out: &[Vec<F::E>],
            levels_cols: &[i32],
            levels_rows: &[i32],
            r: i32,
            p: i32,
        ) -> Vec<Vec<F::E>> {
            let cs: Vec<usize> = (0..levels_cols.len()).filter(|&i| levels_cols[i] >= p).collect();
            let rs: Vec<usize> = (0..levels_rows.len()).filter(|&i| levels_rows[i] < p + r).collect();
            let sub: Vec<Vec<F::E>> = rs.iter().map(|&i| cs.iter().map(|&j| d_out[i][j].clone()).collect()).collect();
            let basis = if rs.is_empty() {
                (0..cs.len())
                    .map(|i| (0..cs.len()).map(|j| if i == j { f.one() } else { f.zero() }).collect())
                    .collect()
            } else {
                kernel(f, &sub, cs.len())
            };
            basis
                .into_iter()
                .map(|v| {
                    let mut full = vec![f.zero(); levels_cols.len()];
                    for (k, &j) in cs.iter().enumerate() {
                        full[j] = v[k].clone();
                    }
                    full
                })
                .collect()
        }

        fn block_pages<F: Field>(f: &F, fc: &FilteredComplex, b: &Block, max_r: usize) -> Vec<BTreeMap<i32, usize>> {
            let d = &fc.complex.d;
            let lv = |idx: &[usize]| idx.iter().map(|&i| fc.levels[i]).collect::<Vec<i32>>();
            let (lp, lc, ln) = (lv(b.prev), lv(b.cur), lv(b.next));
            let d_in = dense(f, d, b.cur, b.prev);
            let d_out = dense(f, d, b.next, b.cur);
            let mut present: Vec<i32> = lc.clone();
            present.sort();
            present.dedup();
            (0..=max_r)
                .map(|r| {
                    let r = r as i32;
                    present
                        .iter()
                        .filter_map(|&p| {
                            let z = cycles(f, &d_out, &lc, &ln, r, p);
                            let mut denom = cycles(f, &d_out, &lc, &ln, r - 1, p + 1);
                            for v in cycles(f, &d_in, &lp, &lc, r - 1, p - r + 1) {
                                denom.push(mat_vec(f, &d_in, &v));
                            }
                            let dim = z.len() - rank(f, &denom, lc.len());
                            (dim > 0).then_some((p, dim))
                        })
                        .collect()
                })
                .collect()
        }

        pub fn pages_naive(fc: &FilteredComplex, max_r: usize, ring: Ring) -> Vec<PageRanks> {
            let blocks = fc.complex.blocks();
            let empty = Vec::new();
            let mut all = vec![PageRanks::new(); max_r + 1];
            with_field!(ring, f => {
                for (&(h, q), cur) in &blocks {
                    let b = Block {
                        prev: blocks.get(&(h - 1, q)).unwrap_or(&empty),
                        cur,
                        next: blocks.get(&(h + 1, q)).unwrap_or(&empty),
                    };
                    for (r, m) in block_pages(&f, fc, &b, max_r).into_iter().enumerate() {
                        for (p, n) in m {
                            all[r].insert((p, h, q), n);
                        }
                    }
                }
            });
            all
        }
    }

    #[test]
    fn reduction_matches_direct_page_computation() {
        use crate::battery::standard;
        use crate::diagram::{checkerboard, BasepointSet};
        use crate::pointed::pointed_from_diagram;
        for e in standard().into_iter().take(5) {
            let d = e.diagram();
            let c = checkerboard(&d, None).unwrap();
            let pts = BasepointSet::per_edge(&d, 1);
            let fc = FilteredComplex::cube(&pointed_from_diagram(&d, &c, &pts));
            for ring in [Ring::PrimeField(2), Ring::Rationals] {
                let fast = pages(&fc, 3, ring);
                assert_eq!(fast.pages, naive::pages_naive(&fc, 3, ring), "{}", e.name);
                assert_eq!(fast.homology_rank, fc.complex.homology(ring).total_rank());
            }
        }
    }

    #[test]
    fn unfiltered_complex() {
        let c = cx(3, vec![(0, 0), (1, 0), (1, 0)], vec![(1, 0, 1)]);
        let rep = pages(&FilteredComplex::new(c, vec![0; 3]), 3, Ring::Rationals);
        assert_eq!(rep.total(0), 3);
        assert_eq!(rep.total(1), 1);
        assert_eq!(rep.converged_at, Some(1));
    }

    #[test]
    fn two_step_acyclic() {
        let c = cx(2, vec![(0, 0), (1, 0)], vec![(1, 0, 1)]);
        let rep = pages(&FilteredComplex::new(c, vec![0, 1]), 3, Ring::PrimeField(2));
        assert_eq!((rep.total(0), rep.total(1), rep.total(2)), (2, 2, 0));
        assert_eq!(rep.converged_at, Some(2));
    }

    #[test]
    fn longer_differential_survives_to_later_page() {
        // x at level 0 hits y at level 2: killed on E_2 -> E_3
        let c = cx(2, vec![(0, 0), (1, 0)], vec![(1, 0, 1)]);
        let rep = pages(&FilteredComplex::new(c, vec![0, 2]), 3, Ring::Rationals);
        assert_eq!((rep.total(1), rep.total(2), rep.total(3)), (2, 2, 0));
    }
}
