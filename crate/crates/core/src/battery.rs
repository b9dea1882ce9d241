//! Small named diagrams used by tests and the CLI, and Reidemeister I kink insertion.

use crate::diagram::{parse_pd, DiagramError, LinkDiagram};

pub const TREFOIL: &str = "X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)";
pub const FIGURE_EIGHT: &str = "X(4,2,5,1), X(8,6,1,5), X(6,3,7,4), X(2,7,3,8)";
pub const HOPF: &str = "X(4,1,3,2), X(2,3,1,4)";
pub const ONE_CROSSING_UNKNOT: &str = "X(1,2,2,1)";
/// Two-component unlink drawn with a Reidemeister II overlap.
pub const UNLINK2_R2: &str = "X(1,3,2,4), X(2,3,1,4)";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub pd: String,
    pub free_loops: usize,
    pub alternating: bool,
}

impl Entry {
    pub fn diagram(&self) -> LinkDiagram {
        parse_pd(&self.pd, self.free_loops).expect("battery diagrams are valid")
    }
}

fn entry(name: &'static str, pd: String, free_loops: usize, alternating: bool) -> Entry {
    Entry { name, pd, free_loops, alternating }
}

/// Unknots with at most two crossings, Hopf link, trefoil and figure-eight.
pub fn standard() -> Vec<Entry> {
    let two_kinks = pd_string(&add_kink(&parse_pd(ONE_CROSSING_UNKNOT, 0).unwrap(), 2, 0).unwrap());
    vec![
        entry("unknot-0", String::new(), 1, true),
        entry("unknot-1", ONE_CROSSING_UNKNOT.into(), 0, true),
        entry("unknot-1b", "X(1,1,2,2)".into(), 0, true),
        entry("unknot-2", two_kinks, 0, false),
        entry("hopf", HOPF.into(), 0, true),
        entry("trefoil", TREFOIL.into(), 0, true),
        entry("figure-eight", FIGURE_EIGHT.into(), 0, true),
    ]
}

pub fn pd_string(pd: &[[i64; 4]]) -> String {
    pd.iter().map(|x| format!("X({},{},{},{})", x[0], x[1], x[2], x[3])).collect::<Vec<_>>().join(", ")
}

/// Insert a Reidemeister I kink on the edge labelled `label`, just before its head.
///
/// The edge keeps its label up to the new crossing; the new loop and the remaining
/// piece get fresh labels. `kind` in 0..4 picks the over/under and left/right type.
/// On a crossingless diagram (`d.n() == 0`) this returns a one-crossing unknot.
pub fn add_kink(d: &LinkDiagram, label: i64, kind: usize) -> Result<Vec<[i64; 4]>, DiagramError> {
    assert!(kind < 4, "kink kind must be 0..4");
    let mut pd: Vec<[i64; 4]> = d.pd().to_vec();
    let (e, l, o) = if d.n() == 0 {
        (label, label + 1, label)
    } else {
        let idx = d.edge_by_label(label)?;
        let max = pd.iter().flatten().copied().max().unwrap();
        let head = d.edges[idx].head.expect("crossing edge");
        pd[head.crossing][head.slot] = max + 2;
        (label, max + 1, max + 2)
    };
    let x = match kind {
        0 => [e, o, l, l],
        1 => [e, l, l, o],
        2 => [l, e, o, l],
        _ => [l, l, o, e],
    };
    pd.push(x);
    Ok(pd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_parses() {
        for e in standard() {
            let d = e.diagram();
            assert_eq!(d.n_plus + d.n_minus, d.n(), "{}", e.name);
        }
    }

    #[test]
    fn kinks_keep_components_and_planarity() {
        let t = parse_pd(TREFOIL, 0).unwrap();
        for kind in 0..4 {
            for label in 1..=6 {
                let pd = add_kink(&t, label, kind).unwrap();
                let d = parse_pd(&pd_string(&pd), 0).unwrap();
                assert_eq!(d.n(), 4);
                assert_eq!(d.num_components(), 1);
            }
        }
        let u = parse_pd("", 1).unwrap();
        for kind in 0..4 {
            let d = parse_pd(&pd_string(&add_kink(&u, 1, kind).unwrap()), 0).unwrap();
            assert_eq!((d.n(), d.num_components()), (1, 1));
        }
    }
}
