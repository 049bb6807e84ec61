//! Batch front end: parse inputs, dispatch to the library, print any
//! command-specific text output followed by a single JSON report line.
//! Timing goes to stderr so reports stay byte-identical across runs.
//!
//! Exit codes: 0 pass, 1 input or usage error, 2 property refuted with a
//! witness in the report.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use sqc_core::complex::{SquareComplex, VertexId};
use sqc_core::diagram::{self, DiagramError};
use sqc_core::gridlab::{self, GridError, PartialAutomorphism};
use sqc_core::{action, euclid, higman, hyperplane, io, metric, shapes, svg};

#[derive(Parser)]
#[command(name = "sqc", about = "square complex toolbox", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a complex and check the link condition.
    Validate { file: String },
    /// Per-vertex curvature table and the disc-exactness total.
    Audit { file: String },
    /// List hyperplane classes with carriers and half-spaces.
    Hyperplanes { file: String },
    /// The interval between two vertices, with lattice coordinates.
    Interval { file: String, u: String, v: String },
    /// Lattice coordinates of a Euclidean complex.
    Embed { file: String },
    /// Minimal-area disc filling of a boundary loop.
    Fill {
        complex: String,
        loop_file: String,
        #[arg(long, default_value_t = 40)]
        cap: usize,
    },
    /// Fill the removable corners of a Euclidean diagram over its target.
    Complete { diagram: String, target: String },
    /// Factor a grid map through a tree of vertical strips.
    Factorize {
        target: String,
        map: String,
        #[arg(long)]
        length: i64,
        #[arg(long)]
        height: i64,
    },
    /// Stack quadrangles along a base geodesic under group translates.
    Pileup {
        target: String,
        gens: String,
        #[arg(long)]
        gamma: String,
        #[arg(long = "element")]
        elements: Vec<String>,
        #[arg(long = "piece")]
        pieces: Vec<String>,
    },
    /// Scan vertex pairs for overpopulated common stabilisers.
    ProbeAcyl {
        complex: String,
        gens: String,
        #[arg(long = "L")]
        l: u32,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 4)]
        cap: usize,
    },
    /// Check an axis translate for the weak WPD property.
    ProbeWpd {
        complex: String,
        gens: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        axis: String,
        #[arg(long)]
        m: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value_t = 4)]
        cap: usize,
    },
    /// Polygon-of-groups checks for the doubling presentation.
    Higman {
        #[command(subcommand)]
        sub: HigmanCmd,
    },
    /// Render a complex or diagram as SVG (listing fallback).
    Render {
        file: String,
        #[arg(long)]
        target: Option<String>,
    },
}

#[derive(Subcommand)]
enum HigmanCmd {
    /// Relation, link girth, and star-path triviality at a word cap.
    Check {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        cap: usize,
        /// Also write the report line to this file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Square subdivision of a polygon star patch.
    Subdivide {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        neighbours: usize,
    },
}

struct Ctx {
    digests: BTreeMap<String, String>,
}

impl Ctx {
    fn load(&mut self, path: &str) -> Result<String, String> {
        let bytes = fs::read(path).map_err(|e| format!("{}: {}", path, e))?;
        self.digests.insert(path.to_string(), format!("sha256:{:x}", Sha256::digest(&bytes)));
        String::from_utf8(bytes).map_err(|e| format!("{}: not UTF-8 ({})", path, e))
    }

    fn complex(&mut self, path: &str) -> Result<SquareComplex, String> {
        io::parse_complex(&self.load(path)?).map_err(|e| format!("{}: {}", path, e))
    }
}

fn bad<E: Display>(path: &str) -> impl Fn(E) -> String + '_ {
    move |e| format!("{}: {}", path, e)
}

fn fields(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let mut ctx = Ctx { digests: BTreeMap::new() };
    let (extra, code) = match run(&cli.command, &mut ctx) {
        Ok(pair) => pair,
        Err(msg) => (fields(vec![("error", json!(msg))]), 1),
    };
    let mut report = Map::new();
    report.insert("command".into(), json!(command_name(&cli.command)));
    report.insert("digests".into(), json!(ctx.digests));
    report.insert(
        "verdict".into(),
        json!(match code {
            0 => "pass",
            2 => "fail",
            _ => "error",
        }),
    );
    report.extend(extra);
    println!("{}", serde_json::to_string(&Value::Object(report)).unwrap());
    eprintln!("wall_ms {}", start.elapsed().as_millis());
    ExitCode::from(code)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Validate { .. } => "validate",
        Cmd::Audit { .. } => "audit",
        Cmd::Hyperplanes { .. } => "hyperplanes",
        Cmd::Interval { .. } => "interval",
        Cmd::Embed { .. } => "embed",
        Cmd::Fill { .. } => "fill",
        Cmd::Complete { .. } => "complete",
        Cmd::Factorize { .. } => "factorize",
        Cmd::Pileup { .. } => "pileup",
        Cmd::ProbeAcyl { .. } => "probe-acyl",
        Cmd::ProbeWpd { .. } => "probe-wpd",
        Cmd::Higman { sub: HigmanCmd::Check { .. } } => "higman-check",
        Cmd::Higman { sub: HigmanCmd::Subdivide { .. } } => "higman-subdivide",
        Cmd::Render { .. } => "render",
    }
}

type Outcome = Result<(Map<String, Value>, u8), String>;

fn run(cmd: &Cmd, ctx: &mut Ctx) -> Outcome {
    match cmd {
        Cmd::Validate { file } => validate(ctx, file),
        Cmd::Audit { file } => audit(ctx, file),
        Cmd::Hyperplanes { file } => hyperplanes_cmd(ctx, file),
        Cmd::Interval { file, u, v } => interval_cmd(ctx, file, u, v),
        Cmd::Embed { file } => embed_cmd(ctx, file),
        Cmd::Fill { complex, loop_file, cap } => fill_cmd(ctx, complex, loop_file, *cap),
        Cmd::Complete { diagram, target } => complete_cmd(ctx, diagram, target),
        Cmd::Factorize { target, map, length, height } => {
            factorize_cmd(ctx, target, map, *length, *height)
        }
        Cmd::Pileup { target, gens, gamma, elements, pieces } => {
            pileup_cmd(ctx, target, gens, gamma, elements, pieces)
        }
        Cmd::ProbeAcyl { complex, gens, l, n, cap } => {
            probe_acyl_cmd(ctx, complex, gens, *l, *n, *cap)
        }
        Cmd::ProbeWpd { complex, gens, g, axis, m, n, cap } => {
            probe_wpd_cmd(ctx, complex, gens, g, axis, *m, *n, *cap)
        }
        Cmd::Higman { sub: HigmanCmd::Check { n, cap, out } } => {
            higman_check_cmd(*n, *cap, out.as_deref())
        }
        Cmd::Higman { sub: HigmanCmd::Subdivide { n, neighbours } } => {
            higman_subdivide_cmd(*n, *neighbours)
        }
        Cmd::Render { file, target } => render_cmd(ctx, file, target.as_deref()),
    }
}

fn validate(ctx: &mut Ctx, file: &str) -> Outcome {
    let x = ctx.complex(file)?;
    let mut f = fields(vec![
        ("vertices", json!(x.vertex_count())),
        ("edges", json!(x.edge_count())),
        ("squares", json!(x.square_count())),
        ("euler_characteristic", json!(x.euler_characteristic())),
        ("connected", json!(x.is_connected())),
    ]);
    match x.is_nonpositively_curved() {
        Ok(()) => {
            f.insert("nonpositively_curved".into(), json!(true));
            Ok((f, 0))
        }
        Err(w) => {
            f.insert("nonpositively_curved".into(), json!(false));
            f.insert(
                "witness".into(),
                json!({
                    "vertex": x.vertex_name(w.vertex),
                    "link_cycle_length": w.cycle.len(),
                }),
            );
            Ok((f, 2))
        }
    }
}

fn audit(ctx: &mut Ctx, file: &str) -> Outcome {
    let x = ctx.complex(file)?;
    for v in x.vertices() {
        let k = diagram::intrinsic_curvature(&x, v).map_err(bad(file))?;
        println!("curv {} {}", x.vertex_name(v), k);
    }
    match diagram::intrinsic_total(&x) {
        Ok(total) => Ok((fields(vec![("total", json!(total))]), 0)),
        Err(e @ DiagramError::TopologyBug { .. }) => Err(format!("TopologyBug: {}", e)),
        Err(e) => Err(bad(file)(e)),
    }
}

fn hyperplanes_cmd(ctx: &mut Ctx, file: &str) -> Outcome {
    let x = ctx.complex(file)?;
    let hs = hyperplane::hyperplanes(&x);
    for (k, h) in hs.iter().enumerate() {
        let edges: Vec<&str> = h.dual_edges.iter().map(|&e| x.edge_name(e)).collect();
        let squares: Vec<&str> =
            h.carrier_squares().iter().map(|&s| x.square_name(s)).collect();
        let halves = match &h.halfspaces {
            Some((p, n)) => format!("({},{})", p.vertices.len(), n.vertices.len()),
            None => "none".to_string(),
        };
        println!(
            "H{}: edges=[{}] carrier_squares=[{}] halfspaces={}",
            k,
            edges.join(","),
            squares.join(","),
            halves
        );
    }
    Ok((
        fields(vec![
            ("hyperplanes", json!(hs.len())),
            ("non_separating", json!(hs.warnings.len())),
        ]),
        0,
    ))
}

fn interval_cmd(ctx: &mut Ctx, file: &str, u: &str, v: &str) -> Outcome {
    let x = ctx.complex(file)?;
    let uu = x.vertex_by_name(u).ok_or_else(|| format!("unknown vertex `{}`", u))?;
    let vv = x.vertex_by_name(v).ok_or_else(|| format!("unknown vertex `{}`", v))?;
    let i = metric::interval(&x, uu, vv).map_err(bad(file))?;
    let sub = i.subcomplex.extract(&x);
    print!("{}", io::write_complex(&sub));
    let emb = metric::interval_embed_z2(&x, &i).map_err(bad(file))?;
    let pairs: Vec<(&str, i64, i64)> =
        emb.coords.iter().map(|&(w, c)| (x.vertex_name(w), c[0], c[1])).collect();
    print!("{}", io::write_coords(&pairs));
    Ok((
        fields(vec![
            ("vertices", json!(sub.vertex_count())),
            ("distance", json!(metric::distance_l1(&x, uu, vv).map_err(bad(file))?)),
        ]),
        0,
    ))
}

fn embed_cmd(ctx: &mut Ctx, file: &str) -> Outcome {
    let x = ctx.complex(file)?;
    match euclid::embed_euclidean(&x) {
        Ok(emb) => {
            let pairs: Vec<(&str, i64, i64)> = x
                .vertices()
                .map(|v| {
                    let c = emb.coord(v);
                    (x.vertex_name(v), c[0], c[1])
                })
                .collect();
            print!("{}", io::write_coords(&pairs));
            Ok((fields(vec![("vertices", json!(x.vertex_count()))]), 0))
        }
        Err(e) => Ok((fields(vec![("witness", json!(e.to_string()))]), 2)),
    }
}

fn fill_cmd(ctx: &mut Ctx, complex: &str, loop_file: &str, cap: usize) -> Outcome {
    let x = ctx.complex(complex)?;
    let darts = io::parse_darts(&ctx.load(loop_file)?, &x).map_err(bad(loop_file))?;
    match diagram::fill_disc(&x, &darts, cap) {
        Ok(d) => {
            print!("{}", io::write_diagram(&d, &x, None));
            Ok((
                fields(vec![
                    ("area", json!(d.area())),
                    ("boundary", json!(d.boundary().len())),
                    ("cap", json!(cap)),
                ]),
                0,
            ))
        }
        Err(DiagramError::CapExceeded { cap }) => Ok((
            fields(vec![
                ("witness", json!(format!("no filling within {} squares", cap))),
                ("cap", json!(cap)),
            ]),
            2,
        )),
        Err(e) => Err(bad(complex)(e)),
    }
}

fn complete_cmd(ctx: &mut Ctx, diagram_file: &str, target_file: &str) -> Outcome {
    let target = ctx.complex(target_file)?;
    let (d, _) = io::parse_diagram(&ctx.load(diagram_file)?, &target).map_err(bad(diagram_file))?;
    let completion = euclid::complete_diagram(&d, &target).map_err(bad(diagram_file))?;
    print!("{}", io::write_diagram(&completion.diagram, &target, None));
    for ((cx, cy), s) in &completion.added {
        println!("added {}_{} {}", cx, cy, target.square_name(*s));
    }
    let report =
        euclid::is_isometric_embedding(&completion.diagram.surface, &target, &completion.diagram.map);
    let code = if report.isometric { 0 } else { 2 };
    Ok((
        fields(vec![
            ("added", json!(completion.added.len())),
            ("isometric", json!(report.isometric)),
            ("full_links", json!(report.full_links)),
        ]),
        code,
    ))
}

fn factorize_cmd(ctx: &mut Ctx, target_file: &str, map_file: &str, length: i64, height: i64) -> Outcome {
    if length < 1 || height < 1 {
        return Err("grid dimensions must be at least 1".into());
    }
    let target = ctx.complex(target_file)?;
    let grid = shapes::grid(length, height);
    let maps = io::parse_maps(&ctx.load(map_file)?, &grid, &target).map_err(bad(map_file))?;
    let (_, phi) = maps.into_iter().next().ok_or("map file defines no map")?;
    let f = gridlab::factorize_grid(&target, length, height, &phi).map_err(bad(map_file))?;
    println!("[tree]");
    print!("{}", io::write_complex(&f.tree));
    println!("[strip]");
    print!("{}", io::write_complex(&f.strip));
    println!("[vertical]");
    for (row, tv) in f.vertical_map.iter().enumerate() {
        println!("row {} -> {}", row, f.tree.vertex_name(*tv));
    }
    Ok((
        fields(vec![
            ("tree_vertices", json!(f.tree.vertex_count())),
            ("tree_edges", json!(f.tree.edge_count())),
            ("strip_squares", json!(f.strip.square_count())),
        ]),
        0,
    ))
}

fn pileup_cmd(
    ctx: &mut Ctx,
    target_file: &str,
    gens_file: &str,
    gamma: &str,
    elements: &[String],
    pieces: &[String],
) -> Outcome {
    let target = ctx.complex(target_file)?;
    let gens = io::parse_generators(&ctx.load(gens_file)?, &target).map_err(bad(gens_file))?;
    let gamma: Vec<VertexId> = gamma
        .split(',')
        .map(|name| {
            target.vertex_by_name(name).ok_or_else(|| format!("unknown vertex `{}`", name))
        })
        .collect::<Result<_, _>>()?;
    if elements.len() != pieces.len() {
        return Err("need one --element per --piece".into());
    }
    let els: Vec<PartialAutomorphism> = elements
        .iter()
        .map(|word| {
            let mut acc = PartialAutomorphism::identity(&target);
            for letter in word.split(',') {
                if letter == "id" {
                    continue;
                }
                let g = gens
                    .iter()
                    .find(|(n, _)| n == letter)
                    .ok_or_else(|| format!("unknown generator `{}`", letter))?;
                acc = PartialAutomorphism::compose(&g.1, &acc);
            }
            Ok::<_, String>(acc)
        })
        .collect::<Result<_, _>>()?;
    let mut quads = Vec::new();
    for path in pieces {
        let (d, corners) = io::parse_diagram(&ctx.load(path)?, &target).map_err(bad(path))?;
        let corners = corners.ok_or_else(|| format!("{}: piece needs a [corners] section", path))?;
        quads.push(
            diagram::Quadrangle::from_corners(d, &target, corners).map_err(bad(path))?,
        );
    }
    match gridlab::pile_up(&target, &gamma, &els, &quads) {
        Ok(d) => {
            print!("{}", io::write_diagram(&d, &target, None));
            Ok((
                fields(vec![
                    ("area", json!(d.area())),
                    ("boundary", json!(d.boundary().len())),
                    ("pieces", json!(quads.len())),
                ]),
                0,
            ))
        }
        Err(
            e @ (GridError::OutOfDomain(_)
            | GridError::EmptyOverlap
            | GridError::BadOverlap(_)),
        ) => Ok((fields(vec![("witness", json!(e.to_string()))]), 2)),
        Err(e) => Err(e.to_string()),
    }
}

fn probe_acyl_cmd(
    ctx: &mut Ctx,
    complex: &str,
    gens_file: &str,
    l: u32,
    n: usize,
    cap: usize,
) -> Outcome {
    let x = ctx.complex(complex)?;
    let gens = io::parse_generators(&ctx.load(gens_file)?, &x).map_err(bad(gens_file))?;
    let a = action::FiniteAction::new(x, gens, cap).map_err(|e| e.to_string())?;
    let rep = action::weak_acylindricity_probe(&a, l, n);
    let mut f = fields(vec![
        ("pass", json!(rep.pass)),
        ("scanned", json!(rep.scanned)),
        ("word_cap", json!(rep.word_cap)),
        ("L", json!(l)),
        ("N", json!(n)),
    ]);
    if let Some(w) = &rep.witness {
        f.insert(
            "witness".into(),
            json!({
                "pair": [a.complex.vertex_name(w.pair.0), a.complex.vertex_name(w.pair.1)],
                "distance": w.distance,
                "fixing": w.fixing.iter().map(|g| g.word.join(".")).collect::<Vec<_>>(),
            }),
        );
    }
    Ok((f, if rep.pass { 0 } else { 2 }))
}

#[allow(clippy::too_many_arguments)]
fn probe_wpd_cmd(
    ctx: &mut Ctx,
    complex: &str,
    gens_file: &str,
    g: &str,
    axis: &str,
    m: usize,
    n: usize,
    cap: usize,
) -> Outcome {
    let x = ctx.complex(complex)?;
    let gens = io::parse_generators(&ctx.load(gens_file)?, &x).map_err(bad(gens_file))?;
    let a = action::FiniteAction::new(x, gens, cap).map_err(|e| e.to_string())?;
    let word: Vec<String> = g.split(',').map(str::to_string).collect();
    let axis: Vec<VertexId> = axis
        .split(',')
        .map(|name| {
            a.complex.vertex_by_name(name).ok_or_else(|| format!("unknown vertex `{}`", name))
        })
        .collect::<Result<_, _>>()?;
    let rep = action::weak_wpd_probe(&a, &word, &axis, m, n).map_err(|e| e.to_string())?;
    let mut f = fields(vec![
        ("pass", json!(rep.pass)),
        ("scanned", json!(rep.scanned)),
        ("word_cap", json!(rep.word_cap)),
        ("m", json!(m)),
        ("N", json!(n)),
    ]);
    if let Some(w) = &rep.witness {
        f.insert(
            "witness".into(),
            json!({
                "base": a.complex.vertex_name(w.base),
                "translate": a.complex.vertex_name(w.translate),
                "fixing": w.fixing.iter().map(|g| g.word.join(".")).collect::<Vec<_>>(),
            }),
        );
    }
    Ok((f, if rep.pass { 0 } else { 2 }))
}

fn higman_check_cmd(n: usize, cap: usize, out: Option<&str>) -> Outcome {
    let p = higman::PolygonOfGroups::new(n).map_err(|e| e.to_string())?;
    let relation = higman::relation_holds();
    let link = higman::link_graph(&p, 0, cap);
    let scan = higman::star_path_scan(&p, cap);
    let girth_ok = link.girth.is_none_or(|g| g >= 4);
    let pass = relation && scan.all_trivial && girth_ok;
    let f = fields(vec![
        ("relation", json!(relation)),
        ("girth", json!(link.girth)),
        ("a_cosets", json!(link.a_cosets.len())),
        ("b_cosets", json!(link.b_cosets.len())),
        ("arcs", json!(link.arcs.len())),
        ("configurations", json!(scan.configurations)),
        ("all_trivial", json!(scan.all_trivial)),
        ("hyperbolic_regime", json!(p.hyperbolic_regime())),
        ("word_cap", json!(cap)),
        ("n", json!(n)),
    ]);
    if let Some(path) = out {
        let line = serde_json::to_string(&Value::Object(f.clone())).unwrap();
        fs::write(path, format!("{}\n", line)).map_err(|e| format!("{}: {}", path, e))?;
    }
    Ok((f, if pass { 0 } else { 2 }))
}

fn higman_subdivide_cmd(n: usize, neighbours: usize) -> Outcome {
    higman::PolygonOfGroups::new(n).map_err(|e| e.to_string())?;
    let patch = higman::polygon_star_patch(n, neighbours);
    let x = higman::subdivide_to_squares(&patch).map_err(|e| e.to_string())?;
    print!("{}", io::write_complex(&x));
    let npc = x.is_nonpositively_curved();
    let f = fields(vec![
        ("squares", json!(x.square_count())),
        ("euler_characteristic", json!(x.euler_characteristic())),
        ("nonpositively_curved", json!(npc.is_ok())),
    ]);
    Ok((f, if npc.is_ok() { 0 } else { 2 }))
}

fn render_cmd(ctx: &mut Ctx, file: &str, target: Option<&str>) -> Outcome {
    let x = if file.ends_with(".dgm") {
        let target_file = target.ok_or("rendering a diagram needs --target")?;
        let t = ctx.complex(target_file)?;
        let (d, _) = io::parse_diagram(&ctx.load(file)?, &t).map_err(bad(file))?;
        d.surface
    } else {
        ctx.complex(file)?
    };
    match svg::render_complex(&x) {
        Ok(doc) => {
            print!("{}", doc);
            Ok((fields(vec![("layout", json!("lattice")), ("cells", json!(x.square_count()))]), 0))
        }
        Err(svg::SvgError::NoLayout(reason)) => {
            print!("{}", svg::render_listing(&x, &reason));
            Ok((fields(vec![("layout", json!("listing")), ("reason", json!(reason))]), 0))
        }
    }
}
