use super::{rank_over, smith_normal_form, Ring, SparseMatrix};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;

/// A free bigraded chain complex with a differential of bidegree (1, 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedComplex {
    pub gradings: Vec<(i32, i32)>,
    pub d: SparseMatrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub rank: usize,
    #[serde(serialize_with = "ser_big")]
    pub torsion: Vec<BigInt>,
}

fn ser_big<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

/// Homology per bigrading; only nonzero groups are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
    pub ring: Ring,
    pub groups: BTreeMap<(i32, i32), HomologyGroup>,
}

impl GradedComplex {
    pub fn dim(&self) -> usize {
        self.gradings.len()
    }

    /// Indices of basis elements in each bigrading, in basis order.
    pub fn blocks(&self) -> BTreeMap<(i32, i32), Vec<usize>> {
        let mut b: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for (i, &g) in self.gradings.iter().enumerate() {
            b.entry(g).or_default().push(i);
        }
        b
    }

    pub fn d_squared_is_zero(&self) -> bool {
        self.d.mul(&self.d).is_zero()
    }

    /// Every nonzero entry goes from (h, q) to (h + 1, q).
    pub fn is_bigraded(&self) -> bool {
        self.d.triplets().all(|(r, c, _)| {
            let (h, q) = self.gradings[c];
            self.gradings[r] == (h + 1, q)
        })
    }

    /// Rank of the chain group in each bigrading.
    pub fn chain_ranks(&self) -> BTreeMap<(i32, i32), usize> {
        self.blocks().into_iter().map(|(g, v)| (g, v.len())).collect()
    }

    pub fn homology(&self, ring: Ring) -> HomologySummary {
        let blocks = self.blocks();
        let d = self.d.over(ring);
        // For each block, rank (and torsion of the cokernel side) of d leaving it.
        let maps: Vec<((i32, i32), usize, Vec<BigInt>)> = blocks
            .par_iter()
            .map(|(&(h, q), src)| {
                let Some(tgt) = blocks.get(&(h + 1, q)) else { return ((h, q), 0, Vec::new()) };
                let m = d.submatrix(tgt, src);
                if ring == Ring::Integers {
                    let s = smith_normal_form(&m);
                    let t = s.torsion();
                    ((h, q), s.rank, t)
                } else {
                    ((h, q), rank_over(&m, ring), Vec::new())
                }
            })
            .collect();
        let out_rank: BTreeMap<(i32, i32), (usize, Vec<BigInt>)> =
            maps.into_iter().map(|(g, r, t)| (g, (r, t))).collect();
        let mut groups = BTreeMap::new();
        for (&(h, q), idx) in &blocks {
            let r_out = out_rank[&(h, q)].0;
            let (r_in, torsion) = out_rank.get(&(h - 1, q)).cloned().unwrap_or((0, Vec::new()));
            let g = HomologyGroup { rank: idx.len() - r_out - r_in, torsion };
            if !g.is_zero() {
                groups.insert((h, q), g);
            }
        }
        HomologySummary { ring, groups }
    }
}

impl HomologySummary {
    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.rank).sum()
    }

    pub fn rank_at(&self, h: i32, q: i32) -> usize {
        self.groups.get(&(h, q)).map_or(0, |g| g.rank)
    }

    pub fn ranks(&self) -> BTreeMap<(i32, i32), usize> {
        self.groups.iter().filter(|(_, g)| g.rank > 0).map(|(k, g)| (*k, g.rank)).collect()
    }

    /// Ranks by twice the delta grading, `2h - q`.
    pub fn delta_ranks(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for (&(h, q), g) in &self.groups {
            if g.rank > 0 {
                *out.entry(2 * h - q).or_insert(0) += g.rank;
            }
        }
        out
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.values().any(|g| !g.torsion.is_empty())
    }

    /// Graded Euler characteristic `sum (-1)^h rank q^q`, as a map q -> coefficient.
    pub fn euler_characteristic(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for (&(h, q), g) in &self.groups {
            *out.entry(q).or_insert(0) += if h % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) };
        }
        out.retain(|_, v| *v != 0);
        out
    }

    /// Poincaré table: one row per homological grading, one column per quantum grading.
    pub fn table(&self) -> String {
        if self.groups.is_empty() {
            return format!("homology over {} is zero\n", self.ring);
        }
        let mut hs: Vec<i32> = self.groups.keys().map(|k| k.0).collect();
        hs.dedup();
        let mut qs: Vec<i32> = self.groups.keys().map(|k| k.1).collect();
        qs.sort();
        qs.dedup();
        let cell = |h: i32, q: i32| -> String {
            match self.groups.get(&(h, q)) {
                None => ".".into(),
                Some(g) => {
                    let mut parts = Vec::new();
                    if g.rank > 0 {
                        parts.push(g.rank.to_string());
                    }
                    parts.extend(g.torsion.iter().map(|t| format!("Z{t}")));
                    parts.join("+")
                }
            }
        };
        let width = hs
            .iter()
            .flat_map(|&h| qs.iter().map(move |&q| (h, q)))
            .map(|(h, q)| cell(h, q).len())
            .chain(qs.iter().map(|q| q.to_string().len()))
            .max()
            .unwrap_or(1)
            + 1;
        let mut s = String::new();
        let _ = write!(s, "{:>5} |", "h\\q");
        for q in &qs {
            let _ = write!(s, "{:>width$}", q);
        }
        s.push('\n');
        s.push_str(&"-".repeat(7 + width * qs.len()));
        s.push('\n');
        for &h in &hs {
            let _ = write!(s, "{:>5} |", h);
            for &q in &qs {
                let _ = write!(s, "{:>width$}", cell(h, q));
            }
            s.push('\n');
        }
        let _ = writeln!(s, "total rank over {}: {}", self.ring, self.total_rank());
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let groups: Vec<serde_json::Value> = self
            .groups
            .iter()
            .map(|(&(h, q), g)| serde_json::json!({"h": h, "q": q, "rank": g.rank, "torsion": g.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>()}))
            .collect();
        serde_json::json!({"ring": self.ring.to_string(), "total_rank": self.total_rank(), "groups": groups})
    }
}

/// Format twice a half-integer, e.g. `-3` as `-3/2`.
pub fn half(v: i32) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{v}/2")
    }
}
