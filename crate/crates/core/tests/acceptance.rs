//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Lines are written straight to stdout so they show up without `--nocapture`.

use num_bigint::BigInt;
use pointedkh::battery::{add_kink, pd_string, standard, Entry, TREFOIL, UNLINK2_R2};
use pointedkh::diagram::{all_resolutions, checkerboard, parse_pd, unlink, Basepoint, BasepointSet, LinkDiagram};
use pointedkh::exactla::Ring;
use pointedkh::hfkcube::{build_e1, compare_e1, edge_ledger_holds};
use pointedkh::khovanov::{build_ckh, build_reduced, determinant, jones_polynomial, saddle_geom, xi_action};
use pointedkh::pointed::{build_pointed, doubling_witness, pointed_from_diagram, reduced_relation, transport_homotopy};
use pointedkh::unlinkmod::{module_structure, structural_homotopies, EdgeMapSpec, UnlinkComplex};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

mod common;
use common::kauffman_jones;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn battery() -> Vec<(Entry, LinkDiagram)> {
    standard()
        .into_iter()
        .map(|e| {
            let d = e.diagram();
            (e, d)
        })
        .collect()
}

fn one_per_component(d: &LinkDiagram) -> Vec<Basepoint> {
    d.components.iter().map(|c| Basepoint { edge: c[0], slot: 0 }).collect()
}

fn criterion_1() -> Check {
    let d = parse_pd("X(1,2,2,1)", 0).map_err(|e| e.to_string())?;
    let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
    let pts = BasepointSet::parse(&d, "1,2").map_err(|e| e.to_string())?;
    let h = pointed_from_diagram(&d, &c, &pts).homology(Ring::Integers);
    let expected = BTreeMap::from([((0, -1), 1), ((1, 1), 1), ((1, 3), 1), ((2, 5), 1)]);
    ensure!(!h.has_torsion(), "torsion present");
    ensure!(h.ranks() == expected, "ranks {:?}", h.ranks());
    Ok("free of rank 4 at (0,-1), (1,1), (1,3), (2,5)".into())
}

fn criterion_2() -> Check {
    for l in 1..=4 {
        let d = unlink(l);
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let pts = BasepointSet::per_edge(&d, 1);
        let kh = build_ckh(&d, &c);
        let red = build_reduced(&kh, &pts.points[0]).complex.homology(Ring::Integers);
        ensure!(red.total_rank() == 1 << (l - 1) && !red.has_torsion(), "l={l}: reduced rank {}", red.total_rank());
        let h = build_pointed(&kh, &pts).homology(Ring::Integers);
        ensure!(h.total_rank() == 1 << l && !h.has_torsion(), "l={l}: pointed rank {}", h.total_rank());
        let r = &all_resolutions(&d, &c)[0];
        let m = module_structure(r, &pts).map_err(|e| format!("l={l}: {e}"))?;
        ensure!(m.dim() == 1 << l, "l={l}: module dim {}", m.dim());
        let mut by_grading = BTreeMap::new();
        for &g in &m.gradings {
            *by_grading.entry(g).or_insert(0usize) += 1;
        }
        ensure!(by_grading == h.ranks(), "l={l}: module gradings differ from homology");
    }
    Ok("l = 1..4: reduced 2^(l-1), pointed 2^l, representatives form a basis in every bigrading".into())
}

fn criterion_3() -> Check {
    let mut checks = 0;
    for (e, d) in battery() {
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let base = one_per_component(&d);
        for (ci, comp) in d.components.iter().enumerate() {
            for &edge in comp {
                let slot = if edge == base[ci].edge { 1 } else { 0 };
                let mut pts = base.clone();
                pts.push(Basepoint { edge, slot });
                let pts = BasepointSet::new(pts).map_err(|e| e.to_string())?;
                for ring in [Ring::Rationals, Ring::PrimeField(2)] {
                    let rep = doubling_witness(&d, &c, &pts, ci, pts.len() - 1, ring).map_err(|e| e.to_string())?;
                    ensure!(rep.holds(), "{} edge {} over {ring}", e.name, d.edges[edge].label);
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (diagram, added point, field) cases double per delta"))
}

fn criterion_4() -> Check {
    let mut checks = 0;
    for name in ["trefoil", "figure-eight"] {
        let d = standard().into_iter().find(|e| e.name == name).unwrap().diagram();
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        for m in 1..=3 {
            let pts = BasepointSet::new((0..m).map(|i| Basepoint { edge: i, slot: 0 }).collect())
                .map_err(|e| e.to_string())?;
            for ring in [Ring::Rationals, Ring::PrimeField(2)] {
                let rel = reduced_relation(&d, &c, &pts, 0, ring);
                ensure!(rel.equality_expected && rel.holds, "{name} |p|={m} over {ring}");
                checks += 1;
            }
        }
    }
    let links = [
        ("hopf", standard().into_iter().find(|e| e.name == "hopf").unwrap().diagram()),
        ("2-unlink", unlink(2)),
        ("2-unlink (R2)", parse_pd(UNLINK2_R2, 0).map_err(|e| e.to_string())?),
    ];
    for (name, d) in links {
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let base = one_per_component(&d);
        for extra in 0..2 {
            let mut pts = base.clone();
            if extra == 1 {
                pts.push(Basepoint { edge: base[0].edge, slot: 1 });
            }
            let pts = BasepointSet::new(pts).map_err(|e| e.to_string())?;
            for ring in [Ring::Rationals, Ring::PrimeField(2)] {
                let rel = reduced_relation(&d, &c, &pts, 0, ring);
                ensure!(!rel.equality_expected && rel.holds, "{name} |p|={} over {ring}", pts.len());
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} cases: equality for knots, inequality for Hopf and 2-unlinks"))
}

fn criterion_5() -> Check {
    let mut identities = 0usize;
    for (e, d) in battery() {
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let kh = build_ckh(&d, &c);
        let dk = &kh.complex.d;
        ensure!(kh.complex.d_squared_is_zero(), "{}: d^2", e.name);
        for edge in 0..d.edges.len() {
            let xi = xi_action(&kh, &Basepoint { edge, slot: 0 });
            ensure!(xi.mul(dk) == dk.mul(&xi), "{}: xi commutes with d", e.name);
            ensure!(xi.mul(&xi).is_zero(), "{}: xi^2", e.name);
            identities += 2;
        }
        for x in 0..d.n() {
            for over in [false, true] {
                let (a, b) = d.strand_edges(x, over);
                let (pa, pb) = (Basepoint { edge: a, slot: 0 }, Basepoint { edge: b, slot: 0 });
                for (p1, p2) in [(pa, pb), (pb, pa)] {
                    let h = transport_homotopy(&kh, x, &p1, &p2).map_err(|e| e.to_string())?;
                    let lhs = dk.mul(&h).add(&h.mul(dk));
                    ensure!(lhs == xi_action(&kh, &p1).sub(&xi_action(&kh, &p2)), "{}: transport at {x}", e.name);
                    identities += 1;
                }
            }
        }
        let pts = BasepointSet::per_edge(&d, 1);
        let pc = build_pointed(&kh, &pts);
        let dd = &pc.complex.d;
        ensure!(pc.complex.d_squared_is_zero(), "{}: pointed d^2", e.name);
        for p in 0..pts.len() {
            let (z, y, hp) = (pc.zeta_action(p), pc.y_action(p), pc.contraction_homotopy(p));
            ensure!(z.mul(&y).add(&y.mul(&z)) == dd.mul(&hp).add(&hp.mul(dd)), "{}: [zeta_p, y_p] = dH + Hd", e.name);
            identities += 1;
            for q in (0..pts.len()).filter(|&q| q != p) {
                let yq = pc.y_action(q);
                ensure!(z.mul(&yq).add(&yq.mul(&z)).is_zero(), "{}: [zeta_p, y_q]", e.name);
                identities += 1;
            }
        }
    }
    for pc in [vec![0], vec![0, 0], vec![0, 1], vec![0, 0, 1], vec![0, 1, 1, 2], vec![0, 1, 0, 2, 2]] {
        let k = pc.iter().max().unwrap() + 1;
        structural_homotopies(&UnlinkComplex::new(k, pc.clone())).map_err(|e| format!("unlink {pc:?}: {e}"))?;
        identities += 1;
    }
    Ok(format!("{identities} matrix identities hold exactly"))
}

fn criterion_6() -> Check {
    let mut checked = 0;
    for (e, d) in battery() {
        if d.n() == 0 {
            continue;
        }
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let pts = BasepointSet::per_edge(&d, 1);
        let res = all_resolutions(&d, &c);
        let mut modules = Vec::with_capacity(res.len());
        for r in &res {
            modules.push(module_structure(r, &pts).map_err(|err| format!("{} vertex {}: {err}", e.name, r.vertex))?);
        }
        for r1 in &res {
            for x in (0..d.n()).filter(|x| r1.vertex >> x & 1 == 0) {
                let v2 = (r1.vertex | 1 << x) as usize;
                let spec = EdgeMapSpec::new(saddle_geom(&d, r1, &res[v2], x));
                let (m1, m2) = (&modules[r1.vertex as usize], &modules[v2]);
                let ind = spec.induced_map(m1, m2).map_err(|err| err.to_string())?;
                let form = spec.formula_map(m1, m2).map_err(|err| err.to_string())?;
                ensure!(ind == form, "{} vertex {} crossing {x}", e.name, r1.vertex);
                checked += 1;
            }
        }
        ensure!(checked > 0, "no edges");
    }
    Ok(format!("{checked} cube edges: induced map = signed split/merge formula"))
}

fn criterion_7() -> Check {
    let mut out = Vec::new();
    for name in ["unknot-1", "hopf", "trefoil"] {
        let d = standard().into_iter().find(|e| e.name == name).unwrap().diagram();
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let pts = BasepointSet::per_edge(&d, 1);
        ensure!(pts.len() == 2 * d.n(), "{name}: {} points", pts.len());
        let rep = compare_e1(&d, &c, &pts).map_err(|e| format!("{name}: {e}"))?;
        let left: BTreeSet<&String> = rep.witness.iter().map(|w| &w.0).collect();
        let right: BTreeSet<&String> = rep.witness.iter().map(|w| &w.1).collect();
        ensure!(left.len() == rep.witness.len() && right.len() == rep.witness.len(), "{name}: witness not a bijection");
        ensure!(rep.witness.len() == rep.khovanov_pages.total(1), "{name}: witness does not cover E1");
        ensure!(rep.isomorphic && rep.khovanov_e2 == rep.floer_e2, "{name}: E2 tables differ");
        out.push(format!("{name} {}", rep.witness.len()));
    }
    Ok(format!("graded isomorphisms with d1 agreeing edgewise ({}) and equal E2 tables", out.join(", ")))
}

fn criterion_8() -> Check {
    let mut edges = 0;
    for (e, d) in battery() {
        if d.n() == 0 {
            continue;
        }
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let e1 = build_e1(&d, &c, &BasepointSet::per_edge(&d, 1)).map_err(|err| format!("{}: {err}", e.name))?;
        for edge in &e1.edges {
            ensure!(edge_ledger_holds(&e1, edge), "{} {}", e.name, edge.name(d.n()));
            ensure!(edge.f0_alexander2() == if edge.merge { -2 } else { 0 }, "{} {}", e.name, edge.name(d.n()));
            edges += 1;
        }
    }
    Ok(format!("{edges} edges: gradings shift as required and every f1 system has a unique solution"))
}

fn criterion_9() -> Check {
    for (e, d) in battery() {
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        let w = d.n_plus as i64 - d.n_minus as i64;
        let kh = build_ckh(&d, &c);
        ensure!(jones_polynomial(&kh) == kauffman_jones(d.pd(), d.free_loops, w), "{}: Euler characteristic", e.name);
        let chi = kh.complex.homology(Ring::Integers).euler_characteristic();
        let chi: BTreeMap<i32, i64> = chi.into_iter().filter(|(_, v)| *v != 0).collect();
        ensure!(chi == jones_polynomial(&kh), "{}: homology Euler characteristic", e.name);
    }
    for (name, det) in [("trefoil", 3), ("figure-eight", 5), ("hopf", 2)] {
        let d = standard().into_iter().find(|e| e.name == name).unwrap().diagram();
        let c = checkerboard(&d, None).map_err(|e| e.to_string())?;
        ensure!(determinant(&d, &c) == BigInt::from(det), "{name}: Goeritz determinant");
        let kh = build_ckh(&d, &c);
        let red = build_reduced(&kh, &Basepoint { edge: 0, slot: 0 }).complex.homology(Ring::PrimeField(2));
        ensure!(red.total_rank() == det as usize, "{name}: reduced F2 rank {}", red.total_rank());
    }
    Ok("chi(Kh) = Kauffman state sum on the battery; reduced F2 rank = det for trefoil 3, figure-eight 5, Hopf 2"
        .into())
}

/// Diagrams related by Reidemeister I kinks, with basepoint labels that survive every kink.
fn kinked_family(base: &LinkDiagram, kink_at: i64) -> Result<Vec<LinkDiagram>, String> {
    let mut out = vec![base.clone()];
    for kind in 0..4 {
        let once = parse_pd(&pd_string(&add_kink(base, kink_at, kind).map_err(|e| e.to_string())?), 0)
            .map_err(|e| e.to_string())?;
        if kind == 1 {
            let twice = parse_pd(&pd_string(&add_kink(&once, kink_at, 3).map_err(|e| e.to_string())?), 0)
                .map_err(|e| e.to_string())?;
            out.push(twice);
        }
        out.push(once);
    }
    Ok(out)
}

fn criterion_10() -> Check {
    let cases = [
        ("unknot", unlink(1), 1, "1,1:1"),
        ("trefoil", parse_pd(TREFOIL, 0).map_err(|e| e.to_string())?, 5, "1,3"),
        ("trefoil", parse_pd(TREFOIL, 0).map_err(|e| e.to_string())?, 2, "1,1:1,3"),
    ];
    let mut counts = Vec::new();
    for (name, base, at, points) in cases {
        let family = kinked_family(&base, at)?;
        let mut tables = Vec::new();
        for d in &family {
            let c = checkerboard(d, None).map_err(|e| e.to_string())?;
            let pts = BasepointSet::parse(d, points).map_err(|e| e.to_string())?;
            tables.push(pointed_from_diagram(d, &c, &pts).homology(Ring::Integers));
        }
        ensure!(tables.windows(2).all(|w| w[0] == w[1]), "{name} with points {points}: tables differ");
        counts.push(format!("{name} [{points}] x{}", family.len()));
    }
    Ok(format!("identical Kh(L,p) over Z across {}", counts.join(", ")))
}

fn report(out: &mut impl Write, n: usize, budget: Duration, f: fn() -> Check) -> bool {
    let t = Instant::now();
    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let elapsed = t.elapsed();
    let ok = r.is_ok();
    let msg = r.unwrap_or_else(|e| e);
    let tag = if ok { "PASS" } else { "FAIL" };
    writeln!(out, "{tag} criterion {n}: {msg} ({:.2?}, budget {:?})", elapsed, budget).unwrap();
    if elapsed > budget {
        writeln!(out, "     criterion {n} exceeded its time budget in this build profile").unwrap();
    }
    ok
}

#[test]
fn acceptance_criteria() {
    let criteria: [(fn() -> Check, u64); 10] = [
        (criterion_1, 1),
        (criterion_2, 1),
        (criterion_3, 30),
        (criterion_4, 60),
        (criterion_5, 60),
        (criterion_6, 60),
        (criterion_7, 600),
        (criterion_8, 60),
        (criterion_9, 30),
        (criterion_10, 60),
    ];
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (i, (f, secs)) in criteria.into_iter().enumerate() {
        if !report(&mut out, i + 1, Duration::from_secs(secs), f) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
