use pointedkh::battery::standard;
use pointedkh::diagram::{checkerboard, Basepoint, BasepointSet};
use pointedkh::exactla::{Ring, SparseMatrix};
use pointedkh::khovanov::{build_ckh, xi_action};
use pointedkh::pointed::{
    basepoint_loop_iso, basepoint_move_iso, build_pointed, is_chain_map, transport_homotopy, PointedError,
};

#[test]
fn transport_homotopies_on_battery() {
    for e in standard() {
        let d = e.diagram();
        let c = checkerboard(&d, None).unwrap();
        let kh = build_ckh(&d, &c);
        let dk = &kh.complex.d;
        for x in 0..d.n() {
            for over in [false, true] {
                let (a, b) = d.strand_edges(x, over);
                let (pa, pb) = (Basepoint { edge: a, slot: 0 }, Basepoint { edge: b, slot: 0 });
                for (p1, p2) in [(pa, pb), (pb, pa)] {
                    let h = transport_homotopy(&kh, x, &p1, &p2).unwrap();
                    let lhs = dk.mul(&h).add(&h.mul(dk));
                    let rhs = xi_action(&kh, &p1).sub(&xi_action(&kh, &p2));
                    assert_eq!(lhs, rhs, "{} crossing {x} over={over}", e.name);
                    // gr (-1,-2)
                    for (r, col, _) in h.triplets() {
                        let (h0, q0) = kh.complex.gradings[col];
                        assert_eq!(kh.complex.gradings[r], (h0 - 1, q0 - 2));
                    }
                }
            }
        }
    }
}

#[test]
fn transport_rejects_non_adjacent_points() {
    let e = &standard()[5];
    let d = e.diagram();
    let c = checkerboard(&d, None).unwrap();
    let kh = build_ckh(&d, &c);
    let (a, _) = d.strand_edges(0, false);
    let (_, b) = d.strand_edges(0, true);
    let r = transport_homotopy(&kh, 0, &Basepoint { edge: a, slot: 0 }, &Basepoint { edge: b, slot: 0 });
    assert_eq!(r, Err(PointedError::NotAdjacent(0)));
}

#[test]
fn basepoint_moves_are_chain_isomorphisms() {
    for e in standard() {
        let d = e.diagram();
        let c = checkerboard(&d, None).unwrap();
        let kh = build_ckh(&d, &c);
        // one point per component plus a second point on component 0
        let mut pts: Vec<Basepoint> = d.components.iter().map(|cyc| Basepoint { edge: cyc[0], slot: 0 }).collect();
        pts.push(Basepoint { edge: d.components[0][0], slot: 1 });
        let pts = BasepointSet::new(pts).unwrap();
        let pc = build_pointed(&kh, &pts);
        let h0 = pc.homology(Ring::Rationals).ranks();
        for target in &d.components[0] {
            let mv = basepoint_move_iso(&pc, 0, Basepoint { edge: *target, slot: 2 }).unwrap();
            assert!(is_chain_map(&mv.iso, &pc.complex.d, &mv.target.complex.d), "{}", e.name);
            let n = mv.iso.sub(&SparseMatrix::identity(pc.dim(), Ring::Integers));
            assert!(n.mul(&n).is_zero());
            assert_eq!(mv.target.homology(Ring::Rationals).ranks(), h0, "{}", e.name);
            for j in 0..pts.len() {
                assert_eq!(mv.iso.mul(&pc.y_action(j)), mv.target.y_action(j).mul(&mv.iso));
            }
        }
        let lp = basepoint_loop_iso(&pc, 0).unwrap();
        assert!(is_chain_map(&lp.iso, &pc.complex.d, &lp.target.complex.d));
        assert_eq!(lp.target.complex, pc.complex);
        if d.num_components() > 1 {
            let other = Basepoint { edge: d.components[1][0], slot: 3 };
            assert!(matches!(basepoint_move_iso(&pc, 0, other), Err(PointedError::DifferentComponents)));
        }
    }
}

#[test]
fn zeta_identities_on_battery() {
    for e in standard() {
        let d = e.diagram();
        let c = checkerboard(&d, None).unwrap();
        let kh = build_ckh(&d, &c);
        let pts = BasepointSet::per_edge(&d, 1);
        let pc = build_pointed(&kh, &pts);
        let dd = &pc.complex.d;
        assert!(pc.complex.d_squared_is_zero());
        for p in 0..pts.len() {
            let z = pc.zeta_action(p);
            let y = pc.y_action(p);
            assert!(z.mul(&z).is_zero());
            assert!(z.mul(dd).add(&dd.mul(&z)).is_zero(), "{}: ζ anticommutes with d", e.name);
            // left Λ-action: y_p d + d y_p = 0
            assert!(y.mul(dd).add(&dd.mul(&y)).is_zero());
            let hp = pc.contraction_homotopy(p);
            assert_eq!(z.mul(&y).add(&y.mul(&z)), dd.mul(&hp).add(&hp.mul(dd)), "{}", e.name);
            for q in 0..pts.len() {
                if q != p {
                    let yq = pc.y_action(q);
                    assert!(z.mul(&yq).add(&yq.mul(&z)).is_zero());
                    let zq = pc.zeta_action(q);
                    assert!(z.mul(&zq).add(&zq.mul(&z)).is_zero());
                }
            }
        }
    }
}
