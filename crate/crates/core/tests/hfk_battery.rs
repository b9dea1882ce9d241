use pointedkh::battery::standard;
use pointedkh::diagram::{checkerboard, BasepointSet};
use pointedkh::hfkcube::{build_e1, compare_e1, edge_ledger_holds};
use std::collections::BTreeMap;

#[test]
fn floer_e1_on_battery() {
    for e in standard() {
        let d = e.diagram();
        if d.n() == 0 {
            continue;
        }
        let pts = BasepointSet::per_edge(&d, 1);
        let c = checkerboard(&d, None).unwrap();
        let e1 = build_e1(&d, &c, &pts).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        for edge in &e1.edges {
            assert!(edge_ledger_holds(&e1, edge), "{} {}", e.name, edge.name(d.n()));
        }
        assert!(e1.d_f0.mul(&e1.d_f0).is_zero(), "{}", e.name);
        assert!(e1.d_full.mul(&e1.d_full).is_zero(), "{}: full d1 squares to zero", e.name);
        let f0 = e1.e2_f0();
        let full = e1.e2_full();
        let mut f0_by_level = BTreeMap::new();
        for (&(p, _), &n) in &f0 {
            *f0_by_level.entry(p).or_insert(0) += n;
        }
        assert_eq!(f0_by_level, full, "{}: per-level E2 ranks of f0 and f0+f1", e.name);
        let rep = compare_e1(&d, &c, &pts).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert!(rep.isomorphic, "{}", e.name);
    }
}
