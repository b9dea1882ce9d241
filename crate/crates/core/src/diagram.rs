//! PD-code parsing, face tracing, checkerboard colorings and complete resolutions.
//!
//! Crossings are stored in the PD convention: the four edge-ends of `X(a,b,c,d)`
//! are listed counterclockwise starting at the incoming under-strand, so slot 0
//! is the incoming under-end and slot 2 the outgoing under-end.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("MalformedPd: {0}")]
    MalformedPd(String),
    #[error("NonMatchingEdges: edge {edge} appears {count} times")]
    NonMatchingEdges { edge: i64, count: usize },
    #[error("NonPlanar: V - E + F = {euler}, expected 2")]
    NonPlanar { euler: i64 },
    #[error("OrientationConflict: no consistent orientation at edge {edge}")]
    OrientationConflict { edge: i64 },
    #[error("NoSuchFace: {0}")]
    NoSuchFace(usize),
    #[error("DimensionMismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("NotAnEdge: {0} -> {1} is not a cube edge")]
    NotAnEdge(String, String),
    #[error("NoSuchEdge: {0}")]
    NoSuchEdge(i64),
    #[error("MalformedBasepoints: {0}")]
    MalformedBasepoints(String),
    #[error("DuplicateBasepoint: edge {edge} slot {slot}")]
    DuplicateBasepoint { edge: i64, slot: u32 },
}

/// One end of an edge: a crossing index and a slot 0..4 in PD order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct End {
    pub crossing: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub label: i64,
    /// `None` for crossingless loops.
    pub tail: Option<End>,
    pub head: Option<End>,
    pub component: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crossing {
    /// Internal edge indices in PD slot order.
    pub edges: [usize; 4],
    /// +1 or -1.
    pub sign: i8,
}

/// A dart is an edge together with a direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dart {
    pub edge: usize,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkDiagram {
    pub crossings: Vec<Crossing>,
    /// Sorted by label; crossing edges first, then crossingless loops.
    pub edges: Vec<Edge>,
    pub free_loops: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Faces of the planar projection, each a cycle of darts keeping the face on the left.
    /// Crossingless loops contribute their interior disc; for a diagram without
    /// crossings face 0 is the exterior.
    pub faces: Vec<Vec<Dart>>,
    /// For each edge: `[face left of the forward dart, face left of the backward dart]`.
    pub edge_faces: Vec<[usize; 2]>,
    /// Components of the link as cyclic lists of edges in orientation order.
    pub components: Vec<Vec<usize>>,
    pd: Vec<[i64; 4]>,
}

fn parse_terms(text: &str) -> Result<Vec<[i64; 4]>, DiagramError> {
    let mut s = text.trim();
    if let Some(rest) = s.strip_prefix("PD") {
        let rest = rest.trim();
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')))
            .ok_or_else(|| DiagramError::MalformedPd("unbalanced PD wrapper".into()))?;
        s = inner.trim();
    }
    let mut out = Vec::new();
    let mut chars = s.char_indices().peekable();
    while let Some(&(i, ch)) = chars.peek() {
        if ch.is_whitespace() || ch == ',' {
            chars.next();
            continue;
        }
        if ch != 'X' {
            return Err(DiagramError::MalformedPd(format!("unexpected '{ch}' at byte {i}")));
        }
        chars.next();
        let (_, open) = chars.next().ok_or_else(|| DiagramError::MalformedPd("truncated term".into()))?;
        let close = match open {
            '(' => ')',
            '[' => ']',
            c => return Err(DiagramError::MalformedPd(format!("expected '(' after X, found '{c}'"))),
        };
        let mut body = String::new();
        let mut closed = false;
        for (_, c) in chars.by_ref() {
            if c == close {
                closed = true;
                break;
            }
            body.push(c);
        }
        if !closed {
            return Err(DiagramError::MalformedPd("unterminated term".into()));
        }
        let nums: Result<Vec<i64>, _> = body.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let nums = nums.map_err(|_| DiagramError::MalformedPd(format!("bad labels in X({body})")))?;
        if nums.len() != 4 {
            return Err(DiagramError::MalformedPd(format!("X({body}) does not have 4 labels")));
        }
        out.push([nums[0], nums[1], nums[2], nums[3]]);
    }
    Ok(out)
}

/// Parse a PD code such as `"X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)"` plus a number of
/// crossingless loops.
pub fn parse_pd(text: &str, free_loops: usize) -> Result<LinkDiagram, DiagramError> {
    let pd = parse_terms(text)?;
    LinkDiagram::from_pd(pd, free_loops)
}

/// The `k`-component crossingless unlink.
pub fn unlink(k: usize) -> LinkDiagram {
    LinkDiagram::from_pd(Vec::new(), k).expect("crossingless diagrams are always valid")
}

fn in_status(slot: usize, over_b_in: Option<bool>) -> Option<bool> {
    match slot {
        0 => Some(true),
        2 => Some(false),
        1 => over_b_in,
        _ => over_b_in.map(|b| !b),
    }
}

impl LinkDiagram {
    pub fn from_pd(pd: Vec<[i64; 4]>, free_loops: usize) -> Result<Self, DiagramError> {
        let n = pd.len();
        let mut ends: BTreeMap<i64, Vec<End>> = BTreeMap::new();
        for (x, q) in pd.iter().enumerate() {
            for (slot, &lab) in q.iter().enumerate() {
                ends.entry(lab).or_default().push(End { crossing: x, slot });
            }
        }
        for (&lab, e) in &ends {
            if e.len() != 2 {
                return Err(DiagramError::NonMatchingEdges { edge: lab, count: e.len() });
            }
        }
        let labels: Vec<i64> = ends.keys().copied().collect();
        let index: BTreeMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let edge_ends: Vec<[End; 2]> = labels.iter().map(|l| [ends[l][0], ends[l][1]]).collect();

        // Orientation: slot 0 is incoming, slot 2 outgoing; the over-strand direction
        // at each crossing is a boolean (is slot 1 incoming?) fixed by propagation.
        let mut over: Vec<Option<bool>> = vec![None; n];
        loop {
            let mut changed = true;
            while changed {
                changed = false;
                for (ei, [e1, e2]) in edge_ends.iter().enumerate() {
                    let s1 = in_status(e1.slot, over[e1.crossing]);
                    let s2 = in_status(e2.slot, over[e2.crossing]);
                    match (s1, s2) {
                        (Some(a), Some(b)) => {
                            if a == b {
                                return Err(DiagramError::OrientationConflict { edge: labels[ei] });
                            }
                        }
                        (Some(a), None) => {
                            set_status(&mut over, *e2, !a);
                            changed = true;
                        }
                        (None, Some(b)) => {
                            set_status(&mut over, *e1, !b);
                            changed = true;
                        }
                        (None, None) => {}
                    }
                }
            }
            match over.iter().position(|o| o.is_none()) {
                None => break,
                Some(x) => {
                    // A strand that is never an under-strand: use the consecutive-label rule.
                    let (j, l) = (pd[x][1], pd[x][3]);
                    let positive = j - l == 1 || l - j > 1;
                    over[x] = Some(!positive);
                }
            }
        }

        let mut edges: Vec<Edge> = Vec::with_capacity(labels.len() + free_loops);
        for (ei, [e1, e2]) in edge_ends.iter().enumerate() {
            let s1 = in_status(e1.slot, over[e1.crossing]).unwrap();
            let (tail, head) = if s1 { (*e2, *e1) } else { (*e1, *e2) };
            edges.push(Edge { label: labels[ei], tail: Some(tail), head: Some(head), component: 0 });
        }
        let max_label = labels.last().copied().unwrap_or(0).max(0);
        for i in 0..free_loops {
            edges.push(Edge { label: max_label + 1 + i as i64, tail: None, head: None, component: 0 });
        }
        let crossings: Vec<Crossing> = pd
            .iter()
            .enumerate()
            .map(|(x, q)| Crossing {
                edges: [index[&q[0]], index[&q[1]], index[&q[2]], index[&q[3]]],
                sign: if over[x] == Some(true) { -1 } else { 1 },
            })
            .collect();
        let n_plus = crossings.iter().filter(|c| c.sign > 0).count();
        let n_minus = n - n_plus;

        let mut d = LinkDiagram {
            crossings,
            edges,
            free_loops,
            n_plus,
            n_minus,
            faces: Vec::new(),
            edge_faces: Vec::new(),
            components: Vec::new(),
            pd,
        };
        d.trace_components();
        d.trace_faces()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    /// The PD quadruples as given, with original labels.
    pub fn pd(&self) -> &[[i64; 4]] {
        &self.pd
    }

    pub fn pd_string(&self) -> String {
        self.pd.iter().map(|q| format!("X({},{},{},{})", q[0], q[1], q[2], q[3])).collect::<Vec<_>>().join(", ")
    }

    pub fn edge_by_label(&self, label: i64) -> Result<usize, DiagramError> {
        self.edges.iter().position(|e| e.label == label).ok_or(DiagramError::NoSuchEdge(label))
    }

    fn edge_at(&self, end: End) -> usize {
        self.crossings[end.crossing].edges[end.slot]
    }

    /// The dart leaving crossing `end.crossing` through slot `end.slot`.
    fn dart_leaving(&self, end: End) -> Dart {
        let e = self.edge_at(end);
        let ed = &self.edges[e];
        // An edge may have both ends at one crossing; compare the full end.
        if ed.tail == Some(end) {
            Dart { edge: e, forward: true }
        } else {
            debug_assert_eq!(ed.head, Some(end));
            Dart { edge: e, forward: false }
        }
    }

    fn arrival(&self, dart: Dart) -> End {
        let ed = &self.edges[dart.edge];
        if dart.forward {
            ed.head.unwrap()
        } else {
            ed.tail.unwrap()
        }
    }

    fn trace_components(&mut self) {
        let ne = self.edges.len();
        let mut comp = vec![usize::MAX; ne];
        let mut comps = Vec::new();
        for start in 0..ne {
            if comp[start] != usize::MAX {
                continue;
            }
            let c = comps.len();
            let mut cyc = Vec::new();
            let mut e = start;
            loop {
                comp[e] = c;
                cyc.push(e);
                let Some(head) = self.edges[e].head else { break };
                let next = self.edge_at(End { crossing: head.crossing, slot: (head.slot + 2) % 4 });
                if next == start {
                    break;
                }
                e = next;
            }
            comps.push(cyc);
        }
        for (e, c) in comp.into_iter().enumerate() {
            self.edges[e].component = c;
        }
        self.components = comps;
    }

    fn trace_faces(&mut self) -> Result<(), DiagramError> {
        let ne = self.edges.len();
        let nc = ne - self.free_loops;
        let mut edge_faces = vec![[usize::MAX; 2]; ne];
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        for e in 0..nc {
            for (side, fwd) in [(0usize, true), (1, false)] {
                if edge_faces[e][side] != usize::MAX {
                    continue;
                }
                let f = faces.len();
                let mut cyc = Vec::new();
                let start = Dart { edge: e, forward: fwd };
                let mut dart = start;
                loop {
                    edge_faces[dart.edge][if dart.forward { 0 } else { 1 }] = f;
                    cyc.push(dart);
                    let at = self.arrival(dart);
                    dart = self.dart_leaving(End { crossing: at.crossing, slot: (at.slot + 3) % 4 });
                    if dart == start {
                        break;
                    }
                }
                faces.push(cyc);
            }
        }
        if self.n() > 0 {
            let euler = self.n() as i64 - nc as i64 + faces.len() as i64;
            if euler != 2 {
                return Err(DiagramError::NonPlanar { euler });
            }
        }
        // Crossingless loops sit in the face left of the lowest crossing edge
        // (or in the exterior, face 0, when there are no crossings).
        let host = if nc > 0 {
            edge_faces[0][0]
        } else {
            faces.push(Vec::new());
            0
        };
        for (e, ef) in edge_faces.iter_mut().enumerate().take(ne).skip(nc) {
            let f = faces.len();
            faces.push(vec![Dart { edge: e, forward: true }]);
            *ef = [f, host];
            if let Some(h) = faces.get_mut(host) {
                h.push(Dart { edge: e, forward: false });
            }
        }
        self.faces = faces;
        self.edge_faces = edge_faces;
        Ok(())
    }

    /// The face used as unbounded face unless overridden.
    pub fn default_outer_face(&self) -> usize {
        if self.n() == 0 {
            0
        } else {
            self.edge_faces[0][0]
        }
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Writhe-free sanity: number of crossing edges (2n).
    pub fn num_crossing_edges(&self) -> usize {
        self.edges.len() - self.free_loops
    }

    pub fn is_nondegenerate(&self, pts: &BasepointSet) -> bool {
        let mut seen = vec![false; self.components.len()];
        for p in &pts.points {
            seen[self.edges[p.edge].component] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// The two edges of the over- or under-strand at a crossing, as (incoming, outgoing).
    pub fn strand_edges(&self, crossing: usize, over: bool) -> (usize, usize) {
        let c = &self.crossings[crossing];
        if !over {
            (c.edges[0], c.edges[2])
        } else if c.sign < 0 {
            (c.edges[1], c.edges[3])
        } else {
            (c.edges[3], c.edges[1])
        }
    }
}

fn set_status(over: &mut [Option<bool>], end: End, incoming: bool) {
    let want = if end.slot == 1 { incoming } else { !incoming };
    if end.slot == 1 || end.slot == 3 {
        over[end.crossing] = Some(want);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub face_colors: Vec<Color>,
    pub outer_face: usize,
    /// Parity of each edge: 0 iff the black face lies to its left.
    pub parity: Vec<u8>,
}

/// Checkerboard coloring with the chosen outer face white.
pub fn checkerboard(d: &LinkDiagram, outer: Option<usize>) -> Result<Coloring, DiagramError> {
    let outer = outer.unwrap_or_else(|| d.default_outer_face());
    let nf = d.faces.len();
    if outer >= nf {
        return Err(DiagramError::NoSuchFace(outer));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nf];
    for f in &d.edge_faces {
        adj[f[0]].push(f[1]);
        adj[f[1]].push(f[0]);
    }
    let mut color: Vec<Option<Color>> = vec![None; nf];
    color[outer] = Some(Color::White);
    let mut queue = std::collections::VecDeque::from([outer]);
    while let Some(f) = queue.pop_front() {
        let other = if color[f] == Some(Color::White) { Color::Black } else { Color::White };
        for &g in &adj[f] {
            if color[g].is_none() {
                color[g] = Some(other);
                queue.push_back(g);
            }
        }
    }
    let face_colors: Vec<Color> = color.into_iter().map(|c| c.expect("dual graph is connected")).collect();
    let parity = d
        .edge_faces
        .iter()
        .map(|f| {
            assert_ne!(face_colors[f[0]], face_colors[f[1]], "checkerboard coloring is proper");
            u8::from(face_colors[f[0]] != Color::Black)
        })
        .collect();
    Ok(Coloring { face_colors, outer_face: outer, parity })
}

impl Coloring {
    pub fn edge_parity(&self, e: usize) -> u8 {
        self.parity[e]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Basepoint {
    /// Internal edge index.
    pub edge: usize,
    /// Position along the edge, increasing in the edge orientation.
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BasepointSet {
    pub points: Vec<Basepoint>,
}

impl BasepointSet {
    pub fn new(points: Vec<Basepoint>) -> Result<Self, DiagramError> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &points {
            if !seen.insert(*p) {
                return Err(DiagramError::DuplicateBasepoint { edge: p.edge as i64, slot: p.slot });
            }
        }
        Ok(BasepointSet { points })
    }

    /// Parse `"1,2,3:1"`: edge labels, optionally with a slot after a colon.
    pub fn parse(d: &LinkDiagram, text: &str) -> Result<Self, DiagramError> {
        let mut pts = Vec::new();
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (e, s) = match tok.split_once(':') {
                Some((e, s)) => (e.trim(), s.trim()),
                None => (tok, "0"),
            };
            let label: i64 = e.parse().map_err(|_| DiagramError::MalformedBasepoints(tok.into()))?;
            let slot: u32 = s.parse().map_err(|_| DiagramError::MalformedBasepoints(tok.into()))?;
            pts.push(Basepoint { edge: d.edge_by_label(label)?, slot });
        }
        Self::new(pts)
    }

    /// `k` points on every edge, in edge-label order.
    pub fn per_edge(d: &LinkDiagram, k: u32) -> Self {
        let points = (0..d.edges.len()).flat_map(|e| (0..k).map(move |slot| Basepoint { edge: e, slot })).collect();
        BasepointSet { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn parity(&self, c: &Coloring, i: usize) -> u8 {
        c.edge_parity(self.points[i].edge)
    }

    /// The same set with point `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut points = self.points.clone();
        points.remove(i);
        BasepointSet { points }
    }

    /// The same set with point `i` replaced by `p`, keeping its position in the order.
    pub fn replaced(&self, i: usize, p: Basepoint) -> Result<Self, DiagramError> {
        let mut points = self.points.clone();
        points[i] = p;
        Self::new(points)
    }

    pub fn with(&self, p: Basepoint) -> Result<Self, DiagramError> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(points)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circle {
    /// Edges of the diagram in traversal order.
    pub arcs: Vec<usize>,
    /// Whether each arc is traversed along the edge orientation.
    pub forward: Vec<bool>,
}

/// A complete resolution, with circles oriented as boundaries of the black regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    pub vertex: u64,
    pub n: usize,
    pub circles: Vec<Circle>,
    pub edge_circle: Vec<usize>,
}

pub fn vertex_string(v: u64, n: usize) -> String {
    (0..n).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parse a vertex written as a 0/1 string, coordinate 1 first.
pub fn parse_vertex(s: &str, n: usize) -> Result<u64, DiagramError> {
    let s = s.trim();
    if s.len() != n || !s.chars().all(|c| c == '0' || c == '1') {
        return Err(DiagramError::DimensionMismatch { expected: n, got: s.len() });
    }
    Ok(s.chars().enumerate().fold(0, |acc, (i, c)| acc | (u64::from(c == '1') << i)))
}

/// Smoothing partner of a slot: the 0-resolution joins slots 0-1 and 2-3,
/// the 1-resolution joins 0-3 and 1-2.
pub fn smoothing_partner(slot: usize, bit: bool) -> usize {
    if bit {
        3 - slot
    } else {
        slot ^ 1
    }
}

pub fn resolve(d: &LinkDiagram, coloring: &Coloring, v: u64) -> Resolution {
    let ne = d.edges.len();
    let mut edge_circle = vec![usize::MAX; ne];
    let mut circles = Vec::new();
    for start in 0..ne {
        if edge_circle[start] != usize::MAX {
            continue;
        }
        let c = circles.len();
        let start_dart = Dart { edge: start, forward: coloring.parity[start] == 0 };
        let mut circ = Circle { arcs: Vec::new(), forward: Vec::new() };
        let mut dart = start_dart;
        loop {
            edge_circle[dart.edge] = c;
            circ.arcs.push(dart.edge);
            circ.forward.push(dart.forward);
            if d.edges[dart.edge].is_loop() {
                break;
            }
            let at = d.arrival(dart);
            let slot = smoothing_partner(at.slot, v >> at.crossing & 1 == 1);
            dart = d.dart_leaving(End { crossing: at.crossing, slot });
            debug_assert_eq!(dart.forward, coloring.parity[dart.edge] == 0);
            if dart == start_dart {
                break;
            }
        }
        circles.push(circ);
    }
    Resolution { vertex: v, n: d.n(), circles, edge_circle }
}

/// All `2^n` resolutions indexed by vertex bitmask (bit `i` is crossing `i`).
pub fn all_resolutions(d: &LinkDiagram, coloring: &Coloring) -> Vec<Resolution> {
    assert!(d.n() < 31, "cube too large");
    (0..1u64 << d.n()).map(|v| resolve(d, coloring, v)).collect()
}

impl Resolution {
    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn point_circle(&self, pts: &BasepointSet) -> Vec<usize> {
        pts.points.iter().map(|p| self.edge_circle[p.edge]).collect()
    }

    /// Basepoint indices on each circle in the cyclic order of the circle orientation,
    /// starting at the circle's first arc.
    pub fn circle_point_order(&self, pts: &BasepointSet) -> Vec<Vec<usize>> {
        self.circles
            .iter()
            .map(|c| {
                let mut out = Vec::new();
                for (&e, &fwd) in c.arcs.iter().zip(&c.forward) {
                    let mut on: Vec<(u32, usize)> =
                        pts.points.iter().enumerate().filter(|(_, p)| p.edge == e).map(|(i, p)| (p.slot, i)).collect();
                    on.sort();
                    if !fwd {
                        on.reverse();
                    }
                    out.extend(on.into_iter().map(|(_, i)| i));
                }
                out
            })
            .collect()
    }

    pub fn is_nondegenerate(&self, pts: &BasepointSet) -> bool {
        let mut seen = vec![false; self.circles.len()];
        for c in self.point_circle(pts) {
            seen[c] = true;
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Saddle {
    /// Two circles of the source merge into one circle of the target.
    Merge { from: [usize; 2], to: usize },
    /// One circle of the source splits into two circles of the target.
    Split { from: usize, to: [usize; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CubeEdge {
    pub source: u64,
    pub target: u64,
    pub crossing: usize,
    pub saddle: Saddle,
    /// `s_{u,v}`: number of ones of the target before the changed coordinate, mod 2.
    pub sign_exponent: u8,
}

pub fn edge_sign_exponent(target: u64, crossing: usize) -> u8 {
    ((target & ((1u64 << crossing) - 1)).count_ones() % 2) as u8
}

pub fn classify_edge(d: &LinkDiagram, ru: &Resolution, rv: &Resolution) -> Result<CubeEdge, DiagramError> {
    let (u, v) = (ru.vertex, rv.vertex);
    let diff = u ^ v;
    let n = d.n();
    if diff.count_ones() != 1 || v & diff == 0 {
        return Err(DiagramError::NotAnEdge(vertex_string(u, n), vertex_string(v, n)));
    }
    let x = diff.trailing_zeros() as usize;
    let e = d.crossings[x].edges;
    let (a, b) = (ru.edge_circle[e[0]], ru.edge_circle[e[2]]);
    let saddle = if a != b {
        Saddle::Merge { from: [a.min(b), a.max(b)], to: rv.edge_circle[e[0]] }
    } else {
        let (p, q) = (rv.edge_circle[e[0]], rv.edge_circle[e[1]]);
        debug_assert_ne!(p, q);
        Saddle::Split { from: a, to: [p.min(q), p.max(q)] }
    };
    Ok(CubeEdge { source: u, target: v, crossing: x, saddle, sign_exponent: edge_sign_exponent(v, x) })
}

/// Every cube edge `u -> u + e_i`, ordered by source vertex then crossing.
pub fn cube_edges(d: &LinkDiagram, res: &[Resolution]) -> Vec<CubeEdge> {
    let n = d.n();
    let mut out = Vec::new();
    for u in 0..res.len() as u64 {
        for i in 0..n {
            if u >> i & 1 == 0 {
                out.push(classify_edge(d, &res[u as usize], &res[(u | 1 << i) as usize]).unwrap());
            }
        }
    }
    out
}

/// Map each circle of `to` that is untouched by the saddle to the circle of `from`
/// with the same arcs, by way of a shared edge.
pub fn circle_correspondence(from: &Resolution, to: &Resolution) -> Vec<usize> {
    to.circles.iter().map(|c| from.edge_circle[c.arcs[0]]).collect()
}

// ---- JSON views ----

#[derive(Serialize)]
struct CrossingJson {
    pd: [i64; 4],
    sign: i8,
}

#[derive(Serialize)]
struct EdgeJson {
    label: i64,
    tail: Option<[usize; 2]>,
    head: Option<[usize; 2]>,
    component: usize,
    parity: u8,
}

#[derive(Serialize)]
struct ColoringJson {
    outer_face: usize,
    face_colors: Vec<Color>,
}

#[derive(Serialize)]
struct DiagramJson {
    crossings: Vec<CrossingJson>,
    edges: Vec<EdgeJson>,
    faces: Vec<Vec<(i64, bool)>>,
    coloring: ColoringJson,
    free_loops: usize,
    n_plus: usize,
    n_minus: usize,
}

pub fn diagram_json(d: &LinkDiagram, c: &Coloring) -> serde_json::Value {
    let lab = |e: usize| d.edges[e].label;
    let j = DiagramJson {
        crossings: d.crossings.iter().map(|x| CrossingJson { pd: x.edges.map(lab), sign: x.sign }).collect(),
        edges: d
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| EdgeJson {
                label: e.label,
                tail: e.tail.map(|t| [t.crossing, t.slot]),
                head: e.head.map(|t| [t.crossing, t.slot]),
                component: e.component,
                parity: c.parity[i],
            })
            .collect(),
        faces: d.faces.iter().map(|f| f.iter().map(|dt| (lab(dt.edge), dt.forward)).collect()).collect(),
        coloring: ColoringJson { outer_face: c.outer_face, face_colors: c.face_colors.clone() },
        free_loops: d.free_loops,
        n_plus: d.n_plus,
        n_minus: d.n_minus,
    };
    serde_json::to_value(j).expect("serializable")
}

#[derive(Serialize)]
struct CircleJson {
    arcs: Vec<i64>,
    forward: Vec<bool>,
    points: Vec<usize>,
}

#[derive(Serialize)]
struct ResolutionJson {
    vertex: String,
    circles: Vec<CircleJson>,
}

pub fn resolution_json(d: &LinkDiagram, r: &Resolution, pts: &BasepointSet) -> serde_json::Value {
    let order = r.circle_point_order(pts);
    let j = ResolutionJson {
        vertex: vertex_string(r.vertex, r.n),
        circles: r
            .circles
            .iter()
            .zip(order)
            .map(|(c, points)| CircleJson {
                arcs: c.arcs.iter().map(|&e| d.edges[e].label).collect(),
                forward: c.forward.clone(),
                points,
            })
            .collect(),
    };
    serde_json::to_value(j).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL: &str = "X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)";

    #[test]
    fn trefoil_counts() {
        let d = parse_pd(TREFOIL, 0).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.edges.len(), 6);
        assert_eq!(d.faces.len(), 5);
        assert_eq!(d.n_minus, 3);
        assert_eq!(d.num_components(), 1);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_pd("X(1,1,2,3)", 0), Err(DiagramError::NonMatchingEdges { .. })));
        assert!(matches!(parse_pd("X(1,2,3)", 0), Err(DiagramError::MalformedPd(_))));
        assert!(matches!(parse_pd("Y(1,2,3,4)", 0), Err(DiagramError::MalformedPd(_))));
        // two disjoint one-crossing unknots: 2 - 4 + 6
        let r = parse_pd("X(1,2,2,1), X(3,4,4,3)", 0);
        assert!(matches!(r, Err(DiagramError::NonPlanar { euler: 4 })), "{r:?}");
    }

    #[test]
    fn bracket_syntax_accepted() {
        let a = parse_pd("PD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]]", 0).unwrap();
        let b = parse_pd(TREFOIL, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_crossing_unknot_parities() {
        let d = parse_pd("X(1,2,2,1)", 0).unwrap();
        assert_eq!(d.n_minus, 1);
        let c = checkerboard(&d, None).unwrap();
        assert_eq!(c.edge_parity(d.edge_by_label(1).unwrap()), 1);
        assert_eq!(c.edge_parity(d.edge_by_label(2).unwrap()), 0);
        let r0 = resolve(&d, &c, 0);
        let r1 = resolve(&d, &c, 1);
        assert_eq!(r0.num_circles(), 1);
        assert_eq!(r1.num_circles(), 2);
        let e = classify_edge(&d, &r0, &r1).unwrap();
        assert_eq!(e.saddle, Saddle::Split { from: 0, to: [0, 1] });
        assert_eq!(e.sign_exponent, 0);
    }

    #[test]
    fn trefoil_resolutions_and_signs() {
        let d = parse_pd(TREFOIL, 0).unwrap();
        let c = checkerboard(&d, None).unwrap();
        assert_eq!(resolve(&d, &c, 0).num_circles(), 3);
        // all crossings negative, so the all-1 resolution is the oriented one
        assert_eq!(resolve(&d, &c, 0b111).num_circles(), 2);
        let v = |s| parse_vertex(s, 3).unwrap();
        let e = classify_edge(&d, &resolve(&d, &c, v("010")), &resolve(&d, &c, v("110"))).unwrap();
        assert_eq!(e.sign_exponent, 0);
        let e = classify_edge(&d, &resolve(&d, &c, v("100")), &resolve(&d, &c, v("110"))).unwrap();
        assert_eq!(e.sign_exponent, 1);
        assert!(classify_edge(&d, &resolve(&d, &c, v("110")), &resolve(&d, &c, v("100"))).is_err());
    }

    #[test]
    fn crossingless_unknot() {
        let d = parse_pd("", 1).unwrap();
        let c = checkerboard(&d, None).unwrap();
        assert_eq!(c.outer_face, 0);
        assert_eq!(c.face_colors, vec![Color::White, Color::Black]);
        assert_eq!(c.parity, vec![0]);
    }

    #[test]
    fn nondegeneracy() {
        let hopf = parse_pd("X(4,1,3,2), X(2,3,1,4)", 0).unwrap();
        let one = BasepointSet::parse(&hopf, "1").unwrap();
        assert!(!hopf.is_nondegenerate(&one));
        let two = BasepointSet::parse(&hopf, "1,3").unwrap();
        assert!(hopf.is_nondegenerate(&two));
        let u = unlink(3);
        assert!(u.is_nondegenerate(&BasepointSet::per_edge(&u, 1)));
        assert!(matches!(BasepointSet::parse(&hopf, "9"), Err(DiagramError::NoSuchEdge(9))));
        assert!(matches!(BasepointSet::parse(&hopf, "1,1"), Err(DiagramError::DuplicateBasepoint { .. })));
    }

    #[test]
    fn outer_override() {
        let d = parse_pd(TREFOIL, 0).unwrap();
        assert!(matches!(checkerboard(&d, Some(17)), Err(DiagramError::NoSuchFace(17))));
        for f in 0..d.faces.len() {
            let c = checkerboard(&d, Some(f)).unwrap();
            assert_eq!(c.face_colors[f], Color::White);
        }
    }
}
