//! Text interchange for complexes, partial-automorphism files, and
//! diagram files.
//!
//! Complex format, one cell per line: `v <id>`, `e <id> <u> <w>`,
//! `s <id> <e±> <e±> <e±> <e±>` with `±` the edge orientation in the
//! boundary walk. `#` starts a comment; ids are whitespace-free tokens.
//! Permutation files hold `gen <name>` headers followed by
//! `v|e|s <id> -> <id>` lines; cells without a line are outside the
//! domain. Diagram files carry `[complex]`, `[map]` and `[boundary]`
//! sections (plus an optional `[corners]` section naming four boundary
//! vertices); the squares of the complex section are written as the
//! planar face walks, so the file determines the embedding.

use thiserror::Error;

use crate::complex::{
    BuildError, CombinatorialMap, ComplexData, Dart, SquareComplex, VertexId,
};
use crate::diagram::{DiagramError, DiscDiagram};
use crate::gridlab::PartialAutomorphism;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line: line + 1, msg: msg.into() }
}

fn content(raw: &str) -> &str {
    match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    }
}

fn dart_token(tok: &str) -> Option<(String, bool)> {
    let forward = match tok.as_bytes().last()? {
        b'+' => true,
        b'-' => false,
        _ => return None,
    };
    let name = &tok[..tok.len() - 1];
    if name.is_empty() {
        return None;
    }
    Some((name.to_string(), forward))
}

pub fn parse_complex(text: &str) -> Result<SquareComplex, IoError> {
    let mut data = ComplexData { vertices: Vec::new(), edges: Vec::new(), squares: Vec::new() };
    for (ln, raw) in text.lines().enumerate() {
        let mut tok = content(raw).split_whitespace();
        let Some(head) = tok.next() else { continue };
        let rest: Vec<&str> = tok.collect();
        match head {
            "v" => {
                let [id] = rest[..] else {
                    return Err(parse_err(ln, "expected `v <id>`"));
                };
                data.vertices.push(id.to_string());
            }
            "e" => {
                let [id, u, w] = rest[..] else {
                    return Err(parse_err(ln, "expected `e <id> <u> <w>`"));
                };
                data.edges.push((id.to_string(), u.to_string(), w.to_string()));
            }
            "s" => {
                if rest.len() != 5 {
                    return Err(parse_err(ln, "expected `s <id> <e±> <e±> <e±> <e±>`"));
                }
                let mut walk = Vec::with_capacity(4);
                for t in &rest[1..] {
                    walk.push(
                        dart_token(t)
                            .ok_or_else(|| parse_err(ln, format!("bad dart token `{}`", t)))?,
                    );
                }
                let walk: [(String, bool); 4] = walk.try_into().unwrap();
                data.squares.push((rest[0].to_string(), walk));
            }
            other => return Err(parse_err(ln, format!("unknown record `{}`", other))),
        }
    }
    Ok(SquareComplex::build(data)?)
}

pub fn write_complex(x: &SquareComplex) -> String {
    let mut out = String::new();
    for v in x.vertices() {
        out.push_str(&format!("v {}\n", x.vertex_name(v)));
    }
    for e in x.edge_ids() {
        let [u, w] = x.endpoints(e);
        out.push_str(&format!("e {} {} {}\n", x.edge_name(e), x.vertex_name(u), x.vertex_name(w)));
    }
    for s in x.square_ids() {
        out.push_str(&format!("s {}", x.square_name(s)));
        for d in x.square_walk(s) {
            out.push_str(&format!(" {}{}", x.edge_name(d.edge), if d.forward { '+' } else { '-' }));
        }
        out.push('\n');
    }
    out
}

/// Parse a list of darts (edge name plus `+`/`-`) from whitespace-separated
/// tokens, as used by boundary walks and loop files.
pub fn parse_darts(text: &str, x: &SquareComplex) -> Result<Vec<Dart>, IoError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        for t in content(raw).split_whitespace() {
            let (name, forward) =
                dart_token(t).ok_or_else(|| parse_err(ln, format!("bad dart token `{}`", t)))?;
            let edge = x
                .edge_by_name(&name)
                .ok_or_else(|| parse_err(ln, format!("unknown edge `{}`", name)))?;
            out.push(Dart { edge, forward });
        }
    }
    Ok(out)
}

pub fn parse_generators(
    text: &str,
    x: &SquareComplex,
) -> Result<Vec<(String, PartialAutomorphism)>, IoError> {
    let empty = || PartialAutomorphism {
        vertex: vec![None; x.vertex_count()],
        edge: vec![None; x.edge_count()],
        square: vec![None; x.square_count()],
    };
    let mut gens: Vec<(String, PartialAutomorphism)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = content(raw).split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "gen" => {
                let [_, name] = toks[..] else {
                    return Err(parse_err(ln, "expected `gen <name>`"));
                };
                gens.push((name.to_string(), empty()));
            }
            kind @ ("v" | "e" | "s") => {
                let [_, from, "->", to] = toks[..] else {
                    return Err(parse_err(ln, format!("expected `{} <id> -> <id>`", kind)));
                };
                let Some((_, gen)) = gens.last_mut() else {
                    return Err(parse_err(ln, "cell line before any `gen` header"));
                };
                let unknown = |name: &str| parse_err(ln, format!("unknown {} `{}`", kind, name));
                match kind {
                    "v" => {
                        let a = x.vertex_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = x.vertex_by_name(to).ok_or_else(|| unknown(to))?;
                        gen.vertex[a.index()] = Some(b);
                    }
                    "e" => {
                        let a = x.edge_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = x.edge_by_name(to).ok_or_else(|| unknown(to))?;
                        gen.edge[a.index()] = Some(b);
                    }
                    _ => {
                        let a = x.square_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = x.square_by_name(to).ok_or_else(|| unknown(to))?;
                        gen.square[a.index()] = Some(b);
                    }
                }
            }
            other => return Err(parse_err(ln, format!("unknown record `{}`", other))),
        }
    }
    Ok(gens)
}

pub fn write_generators(x: &SquareComplex, gens: &[(String, PartialAutomorphism)]) -> String {
    let mut out = String::new();
    for (name, gen) in gens {
        out.push_str(&format!("gen {}\n", name));
        for (i, img) in gen.vertex.iter().enumerate() {
            if let Some(b) = img {
                out.push_str(&format!(
                    "v {} -> {}\n",
                    x.vertex_name(VertexId(i as u32)),
                    x.vertex_name(*b)
                ));
            }
        }
        for (i, img) in gen.edge.iter().enumerate() {
            if let Some(b) = img {
                out.push_str(&format!(
                    "e {} -> {}\n",
                    x.edge_name(crate::complex::EdgeId(i as u32)),
                    x.edge_name(*b)
                ));
            }
        }
        for (i, img) in gen.square.iter().enumerate() {
            if let Some(b) = img {
                out.push_str(&format!(
                    "s {} -> {}\n",
                    x.square_name(crate::complex::SquareId(i as u32)),
                    x.square_name(*b)
                ));
            }
        }
    }
    out
}

/// Parse total cellular maps from a source complex to a target, in the
/// permutation file format. Every source cell must have an image line.
pub fn parse_maps(
    text: &str,
    src: &SquareComplex,
    tgt: &SquareComplex,
) -> Result<Vec<(String, CombinatorialMap)>, IoError> {
    struct Raw {
        name: String,
        vertex: Vec<Option<VertexId>>,
        edge: Vec<Option<crate::complex::EdgeId>>,
        square: Vec<Option<crate::complex::SquareId>>,
    }
    let mut maps: Vec<Raw> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let toks: Vec<&str> = content(raw).split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "gen" => {
                let [_, name] = toks[..] else {
                    return Err(parse_err(ln, "expected `gen <name>`"));
                };
                maps.push(Raw {
                    name: name.to_string(),
                    vertex: vec![None; src.vertex_count()],
                    edge: vec![None; src.edge_count()],
                    square: vec![None; src.square_count()],
                });
            }
            kind @ ("v" | "e" | "s") => {
                let [_, from, "->", to] = toks[..] else {
                    return Err(parse_err(ln, format!("expected `{} <id> -> <id>`", kind)));
                };
                let Some(m) = maps.last_mut() else {
                    return Err(parse_err(ln, "cell line before any `gen` header"));
                };
                let unknown = |name: &str| parse_err(ln, format!("unknown {} `{}`", kind, name));
                match kind {
                    "v" => {
                        let a = src.vertex_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = tgt.vertex_by_name(to).ok_or_else(|| unknown(to))?;
                        m.vertex[a.index()] = Some(b);
                    }
                    "e" => {
                        let a = src.edge_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = tgt.edge_by_name(to).ok_or_else(|| unknown(to))?;
                        m.edge[a.index()] = Some(b);
                    }
                    _ => {
                        let a = src.square_by_name(from).ok_or_else(|| unknown(from))?;
                        let b = tgt.square_by_name(to).ok_or_else(|| unknown(to))?;
                        m.square[a.index()] = Some(b);
                    }
                }
            }
            other => return Err(parse_err(ln, format!("unknown record `{}`", other))),
        }
    }
    let mut out = Vec::new();
    for m in maps {
        let total = |kind: &str, missing: Option<usize>| {
            parse_err(0, format!("map {} is missing a {} image (cell {})", m.name, kind, missing.unwrap()))
        };
        let vm: Option<Vec<VertexId>> = m.vertex.iter().copied().collect();
        let em: Option<Vec<crate::complex::EdgeId>> = m.edge.iter().copied().collect();
        let sm: Option<Vec<crate::complex::SquareId>> = m.square.iter().copied().collect();
        let vm = vm.ok_or_else(|| total("vertex", m.vertex.iter().position(|i| i.is_none())))?;
        let em = em.ok_or_else(|| total("edge", m.edge.iter().position(|i| i.is_none())))?;
        let sm = sm.ok_or_else(|| total("square", m.square.iter().position(|i| i.is_none())))?;
        out.push((m.name, CombinatorialMap { vertex_map: vm, edge_map: em, square_map: sm }));
    }
    Ok(out)
}

/// Parse a diagram file against its target complex. Returns the diagram
/// and the optional `[corners]` annotation resolved in the surface.
pub fn parse_diagram(
    text: &str,
    target: &SquareComplex,
) -> Result<(DiscDiagram, Option<[VertexId; 4]>), IoError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Complex,
        Map,
        Boundary,
        Corners,
    }
    let mut section = Section::None;
    let mut complex_lines: Vec<(usize, String)> = Vec::new();
    let mut map_lines: Vec<(usize, String)> = Vec::new();
    let mut boundary_tokens: Vec<(usize, String)> = Vec::new();
    let mut corner_tokens: Vec<(usize, String)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = content(raw).trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[complex]" => section = Section::Complex,
            "[map]" => section = Section::Map,
            "[boundary]" => section = Section::Boundary,
            "[corners]" => section = Section::Corners,
            _ => match section {
                Section::None => {
                    return Err(parse_err(ln, "content before any section header"));
                }
                Section::Complex => complex_lines.push((ln, line.to_string())),
                Section::Map => map_lines.push((ln, line.to_string())),
                Section::Boundary => {
                    boundary_tokens
                        .extend(line.split_whitespace().map(|t| (ln, t.to_string())));
                }
                Section::Corners => {
                    corner_tokens.extend(line.split_whitespace().map(|t| (ln, t.to_string())));
                }
            },
        }
    }

    // The surface, keeping the square lines: they double as face walks.
    let mut face_walks: Vec<[(String, bool); 4]> = Vec::new();
    let mut data = ComplexData { vertices: Vec::new(), edges: Vec::new(), squares: Vec::new() };
    for (ln, line) in &complex_lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "v" if toks.len() == 2 => data.vertices.push(toks[1].to_string()),
            "e" if toks.len() == 4 => {
                data.edges.push((toks[1].to_string(), toks[2].to_string(), toks[3].to_string()));
            }
            "s" if toks.len() == 6 => {
                let mut walk = Vec::with_capacity(4);
                for t in &toks[2..] {
                    walk.push(
                        dart_token(t)
                            .ok_or_else(|| parse_err(*ln, format!("bad dart token `{}`", t)))?,
                    );
                }
                let walk: [(String, bool); 4] = walk.try_into().unwrap();
                face_walks.push(walk.clone());
                data.squares.push((toks[1].to_string(), walk));
            }
            _ => return Err(parse_err(*ln, format!("bad complex record `{}`", line))),
        }
    }
    let surface = SquareComplex::build(data)?;

    let mut joined = String::from("gen f\n");
    for (_, l) in &map_lines {
        joined.push_str(l);
        joined.push('\n');
    }
    let mut maps = parse_maps(&joined, &surface, target)?;
    if maps.len() != 1 {
        return Err(parse_err(0, "diagram map section must define exactly one map"));
    }
    let map = maps.pop().unwrap().1;

    let mut outer = Vec::new();
    for (ln, t) in &boundary_tokens {
        let (name, forward) =
            dart_token(t).ok_or_else(|| parse_err(*ln, format!("bad dart token `{}`", t)))?;
        let edge = surface
            .edge_by_name(&name)
            .ok_or_else(|| parse_err(*ln, format!("unknown edge `{}`", name)))?;
        outer.push(Dart { edge, forward });
    }

    let faces: Vec<[Dart; 4]> = face_walks
        .iter()
        .map(|walk| {
            walk.iter()
                .map(|(name, fwd)| Dart { edge: surface.edge_by_name(name).unwrap(), forward: *fwd })
                .collect::<Vec<_>>()
                .try_into()
                .unwrap()
        })
        .collect();

    let diagram = DiscDiagram::from_faces(surface, faces, outer, map, target)?;

    let corners = if corner_tokens.is_empty() {
        None
    } else {
        if corner_tokens.len() != 4 {
            let ln = corner_tokens[0].0;
            return Err(parse_err(ln, "corners section must name exactly four vertices"));
        }
        let mut cs = Vec::with_capacity(4);
        for (ln, t) in &corner_tokens {
            cs.push(
                diagram
                    .surface
                    .vertex_by_name(t)
                    .ok_or_else(|| parse_err(*ln, format!("unknown vertex `{}`", t)))?,
            );
        }
        Some(cs.try_into().unwrap())
    };
    Ok((diagram, corners))
}

pub fn write_diagram(
    d: &DiscDiagram,
    target: &SquareComplex,
    corners: Option<[VertexId; 4]>,
) -> String {
    let x = &d.surface;
    let mut out = String::from("[complex]\n");
    for v in x.vertices() {
        out.push_str(&format!("v {}\n", x.vertex_name(v)));
    }
    for e in x.edge_ids() {
        let [u, w] = x.endpoints(e);
        out.push_str(&format!("e {} {} {}\n", x.edge_name(e), x.vertex_name(u), x.vertex_name(w)));
    }
    for s in x.square_ids() {
        // The planar face walk, so the file pins the embedding.
        out.push_str(&format!("s {}", x.square_name(s)));
        for d in d.embedding.square_walk(s) {
            out.push_str(&format!(" {}{}", x.edge_name(d.edge), if d.forward { '+' } else { '-' }));
        }
        out.push('\n');
    }
    out.push_str("[map]\n");
    for v in x.vertices() {
        out.push_str(&format!(
            "v {} -> {}\n",
            x.vertex_name(v),
            target.vertex_name(d.map.vertex(v))
        ));
    }
    for e in x.edge_ids() {
        out.push_str(&format!("e {} -> {}\n", x.edge_name(e), target.edge_name(d.map.edge(e))));
    }
    for s in x.square_ids() {
        out.push_str(&format!(
            "s {} -> {}\n",
            x.square_name(s),
            target.square_name(d.map.square(s))
        ));
    }
    out.push_str("[boundary]\n");
    let tokens: Vec<String> = d
        .boundary()
        .iter()
        .map(|dart| format!("{}{}", x.edge_name(dart.edge), if dart.forward { '+' } else { '-' }))
        .collect();
    out.push_str(&tokens.join(" "));
    out.push('\n');
    if let Some(cs) = corners {
        out.push_str("[corners]\n");
        let names: Vec<&str> = cs.iter().map(|&v| x.vertex_name(v)).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    out
}

/// `c <vertex> <x> <y>` coordinate lines, the output format of the
/// embedding commands.
pub fn write_coords(pairs: &[(&str, i64, i64)]) -> String {
    let mut out = String::new();
    for (name, x, y) in pairs {
        out.push_str(&format!("c {} {} {}\n", name, x, y));
    }
    out
}
