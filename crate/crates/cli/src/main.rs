//! `pointedkh`: Khovanov homology of pointed links, cube spectral sequences and the
//! Floer-side E₁ comparison.

use clap::{Args, Parser, Subcommand, ValueEnum};
use pointedkh::diagram::{checkerboard, parse_pd, unlink, Basepoint, BasepointSet, Coloring, LinkDiagram};
use pointedkh::exactla::{half, HomologySummary, Ring};
use pointedkh::hfkcube::{build_e1, compare_e1, edge_ledger_holds, DeltaRanks, HfkError};
use pointedkh::khovanov::{build_ckh, build_reduced, determinant, format_poly, jones_polynomial};
use pointedkh::pointed::pointed_from_diagram;
use pointedkh::spectral::{cube_e0_iso, pages, FilteredComplex, SpectralError};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

const SCHEMA: &str = "pointedkh/1";

#[derive(Parser)]
#[command(name = "pointedkh", version, about = "Khovanov homology of pointed links and cube spectral sequences")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Khovanov homology
    Kh(Opts),
    /// Reduced Khovanov homology at the first basepoint (default: edge 1)
    Khred(Opts),
    /// Homology of the pointed complex
    Pointed(Opts),
    /// Spectral sequence of the cube filtration on the pointed complex
    Ss(Opts),
    /// E₂ pages of the Floer cube model, with and without f¹
    HfkE2(Opts),
    /// Compare the Khovanov and Floer E₁ pages
    CompareE1(Opts),
    /// Unnormalized Jones polynomial (graded Euler characteristic)
    Jones(Opts),
    /// Determinant from the Goeritz matrix
    Det(Opts),
    /// Compare pointed homology of two pointed diagrams
    InvarianceCheck(InvarianceOpts),
}

#[derive(Args, Clone)]
struct Input {
    /// PD code, e.g. "X(1,4,2,5), X(3,6,4,1), X(5,2,6,3)"
    #[arg(long, conflicts_with = "unlink")]
    pd: Option<String>,
    /// Crossingless unlink with this many components
    #[arg(long)]
    unlink: Option<usize>,
    /// Comma-separated edge labels, each optionally `label:slot`
    #[arg(long, conflicts_with = "points_per_edge")]
    basepoints: Option<String>,
    /// Put this many basepoints on every edge
    #[arg(long)]
    points_per_edge: Option<u32>,
    /// Index of the face to treat as the (white) outer face
    #[arg(long)]
    outer: Option<usize>,
}

#[derive(Args)]
struct Opts {
    #[command(flatten)]
    input: Input,
    /// z, q, f2 or fp:<prime>
    #[arg(long)]
    ring: Option<String>,
    /// Last page to report (ss)
    #[arg(long)]
    pages: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for per-grading computations
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct InvarianceOpts {
    #[command(flatten)]
    opts: Opts,
    #[arg(long, conflicts_with = "other_unlink")]
    other_pd: Option<String>,
    #[arg(long)]
    other_unlink: Option<usize>,
    #[arg(long, conflicts_with = "other_points_per_edge")]
    other_basepoints: Option<String>,
    #[arg(long)]
    other_points_per_edge: Option<u32>,
    #[arg(long)]
    other_outer: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<HfkError> for Failure {
    fn from(e: HfkError) -> Self {
        match e {
            HfkError::DegenerateResolution(_) | HfkError::DegenerateVertex(_) | HfkError::NotAnEdge(..) => {
                Failure::Usage(e.to_string())
            }
            HfkError::Spectral(SpectralError::DegenerateVertex(_)) => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<(String, Value, bool), Failure>;

struct Loaded {
    diagram: LinkDiagram,
    coloring: Coloring,
    points: BasepointSet,
    explicit_points: bool,
}

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

fn load(input: &Input) -> Result<Loaded, Failure> {
    let diagram = match (&input.pd, input.unlink) {
        (Some(pd), None) => parse_pd(pd, 0).map_err(usage)?,
        (None, Some(0)) => return Err(Failure::Usage("--unlink needs at least one component".into())),
        (None, Some(k)) => unlink(k),
        _ => return Err(Failure::Usage("give exactly one of --pd or --unlink".into())),
    };
    let coloring = checkerboard(&diagram, input.outer).map_err(usage)?;
    let (points, explicit_points) = match (&input.basepoints, input.points_per_edge) {
        (Some(s), _) => (BasepointSet::parse(&diagram, s).map_err(usage)?, true),
        (None, Some(k)) => (BasepointSet::per_edge(&diagram, k), true),
        (None, None) => (BasepointSet::default(), false),
    };
    Ok(Loaded { diagram, coloring, points, explicit_points })
}

fn ring_of(opts: &Opts, default: Ring) -> Result<Ring, Failure> {
    opts.ring.as_deref().map_or(Ok(default), |s| Ring::parse(s).map_err(usage))
}

fn input_json(l: &Loaded, ring: Option<Ring>) -> Value {
    let pts: Vec<String> =
        l.points.points.iter().map(|p| format!("{}:{}", l.diagram.edges[p.edge].label, p.slot)).collect();
    json!({
        "pd": l.diagram.pd_string(),
        "free_loops": l.diagram.free_loops,
        "crossings": l.diagram.n(),
        "outer_face": l.coloring.outer_face,
        "basepoints": pts,
        "ring": ring.map(|r| r.to_string()),
    })
}

fn delta_table(title: &str, m: &DeltaRanks) -> String {
    let mut s = format!("{title}\n");
    for (&(p, d2), &n) in m {
        s += &format!("  level {p}  Delta {:>5}: {n}\n", half(d2));
    }
    s += &format!("  total: {}\n", m.values().sum::<usize>());
    s
}

fn delta_json(m: &DeltaRanks, key: &str) -> Value {
    Value::Array(m.iter().map(|(&(p, d2), &n)| json!({"level": p, key: d2, "rank": n})).collect())
}

fn homology_out(title: String, l: &Loaded, ring: Ring, h: &HomologySummary) -> Outcome {
    let table = format!("{title}\n{}", h.table());
    Ok((table, json!({"input": input_json(l, Some(ring)), "homology": h.to_json()}), true))
}

fn one_point_per_edge(l: &mut Loaded) {
    if !l.explicit_points {
        l.points = BasepointSet::per_edge(&l.diagram, 1);
    }
}

fn run(cmd: &Cmd) -> Outcome {
    match cmd {
        Cmd::Kh(o) => {
            let l = load(&o.input)?;
            let ring = ring_of(o, Ring::Integers)?;
            let h = build_ckh(&l.diagram, &l.coloring).complex.homology(ring);
            homology_out(format!("Kh over {ring}"), &l, ring, &h)
        }
        Cmd::Khred(o) => {
            let l = load(&o.input)?;
            let ring = ring_of(o, Ring::Integers)?;
            let p = l.points.points.first().copied().unwrap_or(Basepoint { edge: 0, slot: 0 });
            let kh = build_ckh(&l.diagram, &l.coloring);
            let h = build_reduced(&kh, &p).complex.homology(ring);
            let label = l.diagram.edges[p.edge].label;
            homology_out(format!("reduced Kh over {ring} at edge {label}"), &l, ring, &h)
        }
        Cmd::Pointed(o) => {
            let l = load(&o.input)?;
            let ring = ring_of(o, Ring::Integers)?;
            let h = pointed_from_diagram(&l.diagram, &l.coloring, &l.points).homology(ring);
            homology_out(format!("Kh(L, p) over {ring} with {} basepoints", l.points.len()), &l, ring, &h)
        }
        Cmd::Ss(o) => {
            let mut l = load(&o.input)?;
            one_point_per_edge(&mut l);
            let ring = ring_of(o, Ring::Rationals)?;
            if !ring.is_field() {
                return Err(Failure::Usage("ss needs a field: q, f2 or fp:<prime>".into()));
            }
            let pc = pointed_from_diagram(&l.diagram, &l.coloring, &l.points);
            let r_max = o.pages.unwrap_or(l.diagram.n() + 1);
            let rep = pages(&FilteredComplex::cube(&pc), r_max, ring);
            let mut table = rep.table();
            let mut ok = rep.infinity_total() == rep.homology_rank;
            let e1 = match cube_e0_iso(&pc) {
                Ok(e1) => {
                    let good = e1.edges.iter().filter(|e| e.sign == Some(e.predicted_sign)).count();
                    ok &= good == e1.edges.len() && e1.complex.d_squared_is_zero();
                    table += &format!(
                        "E1 identification: {good} of {} edges match the split/merge formula\n",
                        e1.edges.len()
                    );
                    let n = e1.n;
                    json!(e1
                        .edges
                        .iter()
                        .map(|e| json!({
                            "edge": format!("{}->{}", pointedkh::diagram::vertex_string(e.source, n), pointedkh::diagram::vertex_string(e.target, n)),
                            "merge": e.merge,
                            "sign": e.sign,
                            "predicted_sign": e.predicted_sign,
                        }))
                        .collect::<Vec<_>>())
                }
                Err(SpectralError::DegenerateVertex(v)) => {
                    table += &format!("E1 identification skipped: resolution {v} is degenerate\n");
                    Value::Null
                }
                Err(e) => return Err(Failure::Verification(e.to_string())),
            };
            Ok((table, json!({"input": input_json(&l, Some(ring)), "pages": rep.to_json(), "e1_edges": e1}), ok))
        }
        Cmd::HfkE2(o) => {
            let mut l = load(&o.input)?;
            one_point_per_edge(&mut l);
            if ring_of(o, Ring::PrimeField(2))? != Ring::PrimeField(2) {
                return Err(Failure::Usage("hfk-e2 works over f2 only".into()));
            }
            let e1 = build_e1(&l.diagram, &l.coloring, &l.points)?;
            let ok = e1.d_f0.mul(&e1.d_f0).is_zero()
                && e1.d_full.mul(&e1.d_full).is_zero()
                && e1.edges.iter().all(|e| edge_ledger_holds(&e1, e));
            let f0 = e1.e2_f0();
            let g: DeltaRanks = e1.e2_f0_g();
            let full = e1.e2_full();
            let mut table = delta_table("E2 of (X, D0): sum of f0, by (level, Delta)", &f0);
            table += "E2 of (X, D0) by (level, G):\n";
            for (&(p, g2), &n) in &g {
                table += &format!("  level {p}  G {:>5}: {n}\n", half(g2));
            }
            table += "E2 of (X, D): sum of f0 + f1, by level\n";
            for (p, n) in &full {
                table += &format!("  level {p}: {n}\n");
            }
            table += &format!("  total: {}\n", full.values().sum::<usize>());
            table += &format!("f1 systems uniquely solved on {} edges\n", e1.edges.len());
            let full_json: Vec<Value> = full.iter().map(|(p, n)| json!({"level": p, "rank": n})).collect();
            Ok((
                table,
                json!({
                    "input": input_json(&l, Some(Ring::PrimeField(2))),
                    "e2_f0": delta_json(&f0, "Delta2"),
                    "e2_f0_g": delta_json(&g, "G2"),
                    "e2_full": full_json,
                    "e1": e1.to_json(),
                }),
                ok,
            ))
        }
        Cmd::CompareE1(o) => {
            let mut l = load(&o.input)?;
            one_point_per_edge(&mut l);
            if ring_of(o, Ring::PrimeField(2))? != Ring::PrimeField(2) {
                return Err(Failure::Usage("compare-e1 works over f2 only".into()));
            }
            let rep = compare_e1(&l.diagram, &l.coloring, &l.points)?;
            let mut table = format!(
                "verdict: {}\nidentified {} generators vertex by vertex; d1 agrees edge by edge\n",
                if rep.isomorphic { "isomorphic" } else { "E2 ranks differ" },
                rep.witness.len()
            );
            table += &delta_table("Khovanov E2 (cube filtration) by (level, Delta)", &rep.khovanov_e2);
            table += &delta_table("Floer E2 of (X, D0) by (level, Delta)", &rep.floer_e2);
            let ok = rep.isomorphic;
            Ok((table, json!({"input": input_json(&l, Some(Ring::PrimeField(2))), "comparison": rep.to_json()}), ok))
        }
        Cmd::Jones(o) => {
            let l = load(&o.input)?;
            let p = jones_polynomial(&build_ckh(&l.diagram, &l.coloring));
            let coeffs: BTreeMap<String, i64> = p.iter().map(|(e, c)| (e.to_string(), *c)).collect();
            Ok((format!("{}\n", format_poly(&p, "q")), json!({"input": input_json(&l, None), "jones": coeffs}), true))
        }
        Cmd::Det(o) => {
            let l = load(&o.input)?;
            let det = determinant(&l.diagram, &l.coloring);
            Ok((format!("{det}\n"), json!({"input": input_json(&l, None), "determinant": det.to_string()}), true))
        }
        Cmd::InvarianceCheck(io) => {
            let o = &io.opts;
            let ring = ring_of(o, Ring::Integers)?;
            let a = load(&o.input)?;
            let b = load(&Input {
                pd: io.other_pd.clone(),
                unlink: io.other_unlink,
                basepoints: io.other_basepoints.clone(),
                points_per_edge: io.other_points_per_edge,
                outer: io.other_outer,
            })?;
            let ha = pointed_from_diagram(&a.diagram, &a.coloring, &a.points).homology(ring);
            let hb = pointed_from_diagram(&b.diagram, &b.coloring, &b.points).homology(ring);
            let same = ha == hb;
            let table = format!(
                "first:\n{}second:\n{}{}\n",
                ha.table(),
                hb.table(),
                if same { "graded tables identical" } else { "graded tables differ" }
            );
            let out = json!({
                "first": {"input": input_json(&a, Some(ring)), "homology": ha.to_json()},
                "second": {"input": input_json(&b, Some(ring)), "homology": hb.to_json()},
                "identical": same,
            });
            Ok((table, out, same))
        }
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Kh(_) => "kh",
        Cmd::Khred(_) => "khred",
        Cmd::Pointed(_) => "pointed",
        Cmd::Ss(_) => "ss",
        Cmd::HfkE2(_) => "hfk-e2",
        Cmd::CompareE1(_) => "compare-e1",
        Cmd::Jones(_) => "jones",
        Cmd::Det(_) => "det",
        Cmd::InvarianceCheck(_) => "invariance-check",
    }
}

fn opts(cmd: &Cmd) -> &Opts {
    match cmd {
        Cmd::Kh(o)
        | Cmd::Khred(o)
        | Cmd::Pointed(o)
        | Cmd::Ss(o)
        | Cmd::HfkE2(o)
        | Cmd::CompareE1(o)
        | Cmd::Jones(o)
        | Cmd::Det(o) => o,
        Cmd::InvarianceCheck(io) => &io.opts,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let o = opts(&cli.cmd);
    if o.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(1);
    }
    if rayon::ThreadPoolBuilder::new().num_threads(o.threads).build_global().is_err() {
        eprintln!("error: could not start the thread pool");
        return ExitCode::from(1);
    }
    let format = o.format;
    match run(&cli.cmd) {
        Ok((table, value, ok)) => {
            let text = match format {
                Format::Table => table,
                Format::Json => {
                    let doc = json!({"schema": SCHEMA, "command": command_name(&cli.cmd), "ok": ok, "result": value});
                    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
                }
            };
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(2)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failure: {m}");
            ExitCode::from(2)
        }
    }
}
