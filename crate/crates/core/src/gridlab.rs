//! Grids over trees: factorization of grid maps through tree products,
//! concatenation and pile-up of quadrangles, corridor and staircase
//! analysis, and exhaustive search for embedded grids.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{
    CombinatorialMap, ComplexData, Dart, EdgeId, MapError, SquareComplex, SquareId, VertexId,
};
use crate::diagram::{self, DiagramError, DiscDiagram, Quadrangle, SIDE_MINUS, SIDE_PLUS};
use crate::euclid;
use crate::metric;
use crate::shapes;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("the bottom row does not map to a geodesic")]
    NotGeodesicBottom,
    #[error("inconsistent fold: {0}")]
    InconsistentFold(String),
    #[error("the sides share no edge")]
    EmptyOverlap,
    #[error("malformed overlap: {0}")]
    BadOverlap(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("translate leaves the defined domain: {0}")]
    OutOfDomain(String),
    #[error("lower side has {found} corners, need at least {needed}")]
    TooFewCorners { found: usize, needed: usize },
    #[error("the maps disagree on the lower side")]
    MapsDisagreeOnBase,
    #[error("propagation failed: {0}")]
    PropagateFail(String),
    #[error("re-certification failed: {0}")]
    Certify(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// The composite sending each cell c to outer(inner(c)).
pub fn compose_maps(outer: &CombinatorialMap, inner: &CombinatorialMap) -> CombinatorialMap {
    CombinatorialMap {
        vertex_map: inner.vertex_map.iter().map(|&v| outer.vertex_map[v.index()]).collect(),
        edge_map: inner.edge_map.iter().map(|&e| outer.edge_map[e.index()]).collect(),
        square_map: inner.square_map.iter().map(|&s| outer.square_map[s.index()]).collect(),
    }
}

/// The product of an interval with m edges and a tree (a square complex
/// without squares): one square per (interval edge, tree edge) pair.
/// Vertices are named `{x}_{t}`, horizontal edges `h{x}_{t}`, vertical
/// edges `v{x}_{e}` and squares `c{x}_{e}` for tree cells t, e.
pub fn strip_over_tree(m: i64, tree: &SquareComplex) -> SquareComplex {
    assert!(tree.square_count() == 0, "tree must be one-dimensional");
    assert!(m >= 1);
    let vn = |x: i64, t: VertexId| format!("{}_{}", x, tree.vertex_name(t));
    let mut vertices = Vec::new();
    for x in 0..=m {
        for t in tree.vertices() {
            vertices.push(vn(x, t));
        }
    }
    let mut edges = Vec::new();
    for x in 0..m {
        for t in tree.vertices() {
            edges.push((format!("h{}_{}", x, tree.vertex_name(t)), vn(x, t), vn(x + 1, t)));
        }
    }
    for x in 0..=m {
        for e in tree.edge_ids() {
            let [u, w] = tree.endpoints(e);
            edges.push((format!("v{}_{}", x, tree.edge_name(e)), vn(x, u), vn(x, w)));
        }
    }
    let mut squares = Vec::new();
    for x in 0..m {
        for e in tree.edge_ids() {
            let [u, w] = tree.endpoints(e);
            let en = tree.edge_name(e);
            squares.push((
                format!("c{}_{}", x, en),
                [
                    (format!("h{}_{}", x, tree.vertex_name(u)), true),
                    (format!("v{}_{}", x + 1, en), true),
                    (format!("h{}_{}", x, tree.vertex_name(w)), false),
                    (format!("v{}_{}", x, en), false),
                ],
            ));
        }
    }
    SquareComplex::build(ComplexData { vertices, edges, squares })
        .expect("interval-tree product is a valid complex")
}

/// A grid map written as a vertical fold onto a tree followed by an
/// isometric embedding of the interval-tree product.
#[derive(Debug)]
pub struct GridFactorization {
    pub tree: SquareComplex,
    /// Row j of the grid folds onto this tree vertex.
    pub vertical_map: Vec<VertexId>,
    /// The product of the bottom interval with the tree.
    pub strip: SquareComplex,
    /// The certified isometric embedding of the strip.
    pub embedding: CombinatorialMap,
    /// The fold of the grid onto the strip; `embedding` after `projection`
    /// reproduces the input map cell for cell.
    pub projection: CombinatorialMap,
}

struct Line {
    verts: Vec<VertexId>,
    edges: Vec<EdgeId>,
}

struct RowImages {
    squares: Vec<SquareId>,
    vedges: Vec<EdgeId>,
}

/// Factor a grid map with geodesic bottom row through a tree product.
/// Rows are folded together exactly when they share a square image in some
/// column; a partial coincidence that does not extend to the whole row
/// witnesses a doubled corner in the target and is rejected.
pub fn factorize_grid(
    target: &SquareComplex,
    m: i64,
    n: i64,
    phi: &CombinatorialMap,
) -> Result<GridFactorization, GridError> {
    assert!(m >= 1 && n >= 1, "grid must contain at least one square");
    let grid = shapes::grid(m, n);
    phi.validate(&grid, target)?;

    let gv = |x: i64, y: i64| grid.vertex_by_name(&shapes::vertex_name(x, y)).unwrap();
    let geh = |x: i64, y: i64| grid.edge_by_name(&shapes::h_edge(x, y)).unwrap();
    let gev = |x: i64, y: i64| grid.edge_by_name(&shapes::v_edge(x, y)).unwrap();
    let gc = |x: i64, y: i64| grid.square_by_name(&shapes::cell_name(x, y)).unwrap();

    let d0 = metric::distances_from(target, phi.vertex(gv(0, 0)));
    if d0[phi.vertex(gv(m, 0)).index()] as i64 != m {
        return Err(GridError::NotGeodesicBottom);
    }

    let line_of = |y: i64| Line {
        verts: (0..=m).map(|x| phi.vertex(gv(x, y))).collect(),
        edges: (0..m).map(|x| phi.edge(geh(x, y))).collect(),
    };
    let row_of = |y: i64| RowImages {
        squares: (0..m).map(|x| phi.square(gc(x, y))).collect(),
        vedges: (0..=m).map(|x| phi.edge(gev(x, y))).collect(),
    };

    // One horizontal line per tree vertex, one row of squares per tree edge.
    let mut lines: Vec<Line> = vec![line_of(0)];
    let mut tree_edges: Vec<(usize, usize, RowImages)> = Vec::new();
    let mut row_edge: Vec<usize> = Vec::new();
    let mut tv: Vec<usize> = vec![0];
    for j in 1..=n {
        let row = row_of(j - 1);
        let line = line_of(j);
        let cur = tv[j as usize - 1];
        // A single shared square image forces the whole row to fold.
        let fold = tree_edges
            .iter()
            .position(|(_, _, old)| (0..m as usize).any(|i| old.squares[i] == row.squares[i]));
        let next = match fold {
            Some(k) => {
                let (u, w, old) = &tree_edges[k];
                if old.squares != row.squares {
                    return Err(GridError::InconsistentFold(format!(
                        "row {} repeats only part of an earlier row",
                        j
                    )));
                }
                if old.vedges != row.vedges {
                    return Err(GridError::InconsistentFold(format!(
                        "row {} repeats an earlier row with different vertical edges",
                        j
                    )));
                }
                let far = if *u == cur {
                    *w
                } else if *w == cur {
                    *u
                } else {
                    return Err(GridError::InconsistentFold(format!(
                        "row {} folds onto a row not adjacent to the current line",
                        j
                    )));
                };
                if lines[far].verts != line.verts || lines[far].edges != line.edges {
                    return Err(GridError::InconsistentFold(format!(
                        "row {} repeats an earlier row but its upper line differs",
                        j
                    )));
                }
                row_edge.push(k);
                far
            }
            None => {
                let far = lines.len();
                lines.push(line);
                row_edge.push(tree_edges.len());
                tree_edges.push((cur, far, row));
                far
            }
        };
        tv.push(next);
    }

    let tree_data = ComplexData {
        vertices: (0..lines.len()).map(|t| format!("t{}", t)).collect(),
        edges: tree_edges
            .iter()
            .enumerate()
            .map(|(k, (u, w, _))| (format!("e{}", k), format!("t{}", u), format!("t{}", w)))
            .collect(),
        squares: vec![],
    };
    let tree = SquareComplex::build(tree_data).map_err(|e| GridError::Certify(e.to_string()))?;
    let strip = strip_over_tree(m, &tree);

    let sv = |x: i64, t: usize| strip.vertex_by_name(&format!("{}_t{}", x, t)).unwrap();
    let sh = |x: i64, t: usize| strip.edge_by_name(&format!("h{}_t{}", x, t)).unwrap();
    let se = |x: i64, k: usize| strip.edge_by_name(&format!("v{}_e{}", x, k)).unwrap();
    let sc = |x: i64, k: usize| strip.square_by_name(&format!("c{}_e{}", x, k)).unwrap();

    let mut vertex_map = vec![VertexId(0); strip.vertex_count()];
    let mut edge_map = vec![EdgeId(0); strip.edge_count()];
    let mut square_map = vec![SquareId(0); strip.square_count()];
    for (t, line) in lines.iter().enumerate() {
        for x in 0..=m {
            vertex_map[sv(x, t).index()] = line.verts[x as usize];
        }
        for x in 0..m {
            edge_map[sh(x, t).index()] = line.edges[x as usize];
        }
    }
    for (k, (_, _, row)) in tree_edges.iter().enumerate() {
        for x in 0..=m {
            edge_map[se(x, k).index()] = row.vedges[x as usize];
        }
        for x in 0..m {
            square_map[sc(x, k).index()] = row.squares[x as usize];
        }
    }
    let embedding = CombinatorialMap { vertex_map, edge_map, square_map };
    embedding.validate(&strip, target)?;
    let report = euclid::is_isometric_embedding(&strip, target, &embedding);
    if !report.isometric || !report.full_links {
        return Err(GridError::Certify(format!(
            "strip does not embed isometrically: {:?}",
            report.witness
        )));
    }

    let mut pvert = vec![VertexId(0); grid.vertex_count()];
    let mut pedge = vec![EdgeId(0); grid.edge_count()];
    let mut psquare = vec![SquareId(0); grid.square_count()];
    for y in 0..=n {
        let t = tv[y as usize];
        for x in 0..=m {
            pvert[gv(x, y).index()] = sv(x, t);
        }
        for x in 0..m {
            pedge[geh(x, y).index()] = sh(x, t);
        }
    }
    for y in 0..n {
        let k = row_edge[y as usize];
        for x in 0..=m {
            pedge[gev(x, y).index()] = se(x, k);
        }
        for x in 0..m {
            psquare[gc(x, y).index()] = sc(x, k);
        }
    }
    let projection = CombinatorialMap { vertex_map: pvert, edge_map: pedge, square_map: psquare };
    projection.validate(&grid, &strip)?;

    let composite = compose_maps(&embedding, &projection);
    if composite.vertex_map != phi.vertex_map
        || composite.edge_map != phi.edge_map
        || composite.square_map != phi.square_map
    {
        return Err(GridError::Certify("factorization does not reproduce the input map".into()));
    }

    let vertical_map = tv.iter().map(|&t| tree.vertex_by_name(&format!("t{}", t)).unwrap()).collect();
    Ok(GridFactorization { tree, vertical_map, strip, embedding, projection })
}

struct GlueResult {
    diagram: DiscDiagram,
    /// Vertices of the second surface in the glued surface.
    b_vertex: Vec<VertexId>,
    /// Edges of the second surface in the glued surface.
    b_edge: Vec<EdgeId>,
    matched_edges: usize,
}

/// Glue the upper side of `a` to the lower side of `b` along the maximal
/// run of matching target images. The run must be a single aligned
/// geodesic sub-segment with at least one edge.
fn glue(
    a: &DiscDiagram,
    a_plus: &[Dart],
    b: &DiscDiagram,
    b_minus: &[Dart],
    target: &SquareComplex,
) -> Result<GlueResult, GridError> {
    if a_plus.is_empty() || b_minus.is_empty() {
        return Err(GridError::EmptyOverlap);
    }
    let asf = &a.surface;
    let bsf = &b.surface;
    let side_vertices = |x: &SquareComplex, darts: &[Dart]| -> Vec<VertexId> {
        let mut vs = vec![x.dart_tail(darts[0])];
        vs.extend(darts.iter().map(|&d| x.dart_head(d)));
        vs
    };
    let pv = side_vertices(asf, a_plus);
    let mv = side_vertices(bsf, b_minus);
    let pa: Vec<VertexId> = pv.iter().map(|&v| a.map.vertex(v)).collect();
    let mb: Vec<VertexId> = mv.iter().map(|&v| b.map.vertex(v)).collect();

    let mut jmap: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &x) in pa.iter().enumerate() {
        for (j, &y) in mb.iter().enumerate() {
            if x == y && jmap.insert(i, j).is_some() {
                return Err(GridError::BadOverlap("a side image repeats a vertex".into()));
            }
        }
    }
    if jmap.is_empty() {
        return Err(GridError::EmptyOverlap);
    }
    let i0 = *jmap.keys().next().unwrap();
    let i1 = *jmap.keys().last().unwrap();
    if jmap.len() != i1 - i0 + 1 {
        return Err(GridError::BadOverlap("matched vertices are not consecutive".into()));
    }
    let jhi = jmap[&i0];
    for (t, (_, &j)) in jmap.iter().enumerate() {
        if jhi < t || j != jhi - t {
            return Err(GridError::BadOverlap("the sides match against each other out of order".into()));
        }
    }
    if i1 == i0 {
        // A single shared vertex is a tangency, not an overlap segment.
        return Err(GridError::EmptyOverlap);
    }
    let w = i1 - i0;
    let jlo = jhi - w;
    for t in 0..w {
        let ad = a_plus[i0 + t];
        let bd = b_minus[jhi - t - 1];
        if a.map.edge(ad.edge) != b.map.edge(bd.edge) {
            return Err(GridError::BadOverlap("edge images differ along the overlap".into()));
        }
    }
    if metric::distances_from(target, pa[i0])[pa[i1].index()] as usize != w {
        return Err(GridError::BadOverlap("the overlap is not a geodesic".into()));
    }

    // Rebuild the union: cells of `a` keep prefixed names, cells of `b`
    // take the matching `a` names along the seam.
    let a_vname: Vec<String> =
        asf.vertices().map(|v| format!("a:{}", asf.vertex_name(v))).collect();
    let mut b_vname: Vec<String> =
        bsf.vertices().map(|v| format!("b:{}", bsf.vertex_name(v))).collect();
    let mut b_vmatched = vec![false; bsf.vertex_count()];
    for (&i, &j) in &jmap {
        b_vname[mv[j].index()] = a_vname[pv[i].index()].clone();
        b_vmatched[mv[j].index()] = true;
    }
    let a_ename: Vec<String> = asf.edge_ids().map(|e| format!("a:{}", asf.edge_name(e))).collect();
    let mut b_ename: Vec<String> =
        bsf.edge_ids().map(|e| format!("b:{}", bsf.edge_name(e))).collect();
    let mut b_ematched = vec![false; bsf.edge_count()];
    for t in 0..w {
        let be = b_minus[jhi - t - 1].edge;
        b_ename[be.index()] = a_ename[a_plus[i0 + t].edge.index()].clone();
        b_ematched[be.index()] = true;
    }

    let mut vertices = a_vname.clone();
    vertices.extend(
        bsf.vertices().filter(|v| !b_vmatched[v.index()]).map(|v| b_vname[v.index()].clone()),
    );
    let mut edges: Vec<(String, String, String)> = asf
        .edge_ids()
        .map(|e| {
            let [u, v] = asf.endpoints(e);
            (a_ename[e.index()].clone(), a_vname[u.index()].clone(), a_vname[v.index()].clone())
        })
        .collect();
    edges.extend(bsf.edge_ids().filter(|e| !b_ematched[e.index()]).map(|e| {
        let [u, v] = bsf.endpoints(e);
        (b_ename[e.index()].clone(), b_vname[u.index()].clone(), b_vname[v.index()].clone())
    }));
    let first_end: BTreeMap<&str, &str> =
        edges.iter().map(|(n, u, _)| (n.as_str(), u.as_str())).collect();

    let mut squares: Vec<(String, [(String, bool); 4])> = Vec::new();
    for s in asf.square_ids() {
        let entries = asf.square_walk(s).map(|d| {
            let name = a_ename[d.edge.index()].clone();
            let fwd = first_end[name.as_str()] == a_vname[asf.dart_tail(d).index()];
            (name, fwd)
        });
        squares.push((format!("a:{}", asf.square_name(s)), entries));
    }
    for s in bsf.square_ids() {
        let entries = bsf.square_walk(s).map(|d| {
            let name = b_ename[d.edge.index()].clone();
            let fwd = first_end[name.as_str()] == b_vname[bsf.dart_tail(d).index()];
            (name, fwd)
        });
        squares.push((format!("b:{}", bsf.square_name(s)), entries));
    }

    let glued = SquareComplex::build(ComplexData { vertices, edges, squares })
        .map_err(|e| GridError::Certify(format!("glued surface: {}", e)))?;

    let a_vid: Vec<VertexId> =
        (0..asf.vertex_count()).map(|i| glued.vertex_by_name(&a_vname[i]).unwrap()).collect();
    let b_vid: Vec<VertexId> =
        (0..bsf.vertex_count()).map(|i| glued.vertex_by_name(&b_vname[i]).unwrap()).collect();
    let a_eid: Vec<EdgeId> =
        (0..asf.edge_count()).map(|i| glued.edge_by_name(&a_ename[i]).unwrap()).collect();
    let b_eid: Vec<EdgeId> =
        (0..bsf.edge_count()).map(|i| glued.edge_by_name(&b_ename[i]).unwrap()).collect();

    let mut vertex_map = vec![VertexId(0); glued.vertex_count()];
    let mut edge_map = vec![EdgeId(0); glued.edge_count()];
    let mut square_map = vec![SquareId(0); glued.square_count()];
    for v in asf.vertices() {
        vertex_map[a_vid[v.index()].index()] = a.map.vertex(v);
    }
    for v in bsf.vertices() {
        vertex_map[b_vid[v.index()].index()] = b.map.vertex(v);
    }
    for e in asf.edge_ids() {
        edge_map[a_eid[e.index()].index()] = a.map.edge(e);
    }
    for e in bsf.edge_ids() {
        edge_map[b_eid[e.index()].index()] = b.map.edge(e);
    }
    for (i, s) in asf.square_ids().enumerate() {
        square_map[glued.square_by_name(&format!("a:{}", asf.square_name(s))).unwrap().index()] =
            a.map.square(s);
        debug_assert_eq!(i, s.index());
    }
    for s in bsf.square_ids() {
        square_map[glued.square_by_name(&format!("b:{}", bsf.square_name(s))).unwrap().index()] =
            b.map.square(s);
    }
    let map = CombinatorialMap { vertex_map, edge_map, square_map };

    let glue_dart = |eid: EdgeId, tail: VertexId| Dart::new(eid, glued.endpoints(eid)[0] == tail);
    let mut square_faces: Vec<[Dart; 4]> = Vec::new();
    for s in asf.square_ids() {
        let walk = a.embedding.square_walk(s);
        square_faces
            .push(walk.map(|d| glue_dart(a_eid[d.edge.index()], a_vid[asf.dart_tail(d).index()])));
    }
    for s in bsf.square_ids() {
        let walk = b.embedding.square_walk(s);
        square_faces
            .push(walk.map(|d| glue_dart(b_eid[d.edge.index()], b_vid[bsf.dart_tail(d).index()])));
    }

    // Outer walk: each boundary with its seam block removed, joined at the
    // seam endpoints.
    let ab = a.boundary();
    let na = ab.len();
    let sa = ab
        .iter()
        .position(|&d| d == a_plus[i0])
        .ok_or_else(|| GridError::BadOverlap("the upper side is not on the boundary".into()))?;
    let bb = b.boundary();
    let nb = bb.len();
    let sb = bb
        .iter()
        .position(|&d| d == b_minus[jlo])
        .ok_or_else(|| GridError::BadOverlap("the lower side is not on the boundary".into()))?;
    for t in 0..w {
        if ab[(sa + t) % na] != a_plus[i0 + t] || bb[(sb + t) % nb] != b_minus[jlo + t] {
            return Err(GridError::BadOverlap("the overlap is not consecutive on the boundary".into()));
        }
    }
    let mut outer = Vec::with_capacity(na + nb - 2 * w);
    for t in 0..na - w {
        let d = ab[(sa + w + t) % na];
        outer.push(glue_dart(a_eid[d.edge.index()], a_vid[asf.dart_tail(d).index()]));
    }
    for t in 0..nb - w {
        let d = bb[(sb + w + t) % nb];
        outer.push(glue_dart(b_eid[d.edge.index()], b_vid[bsf.dart_tail(d).index()]));
    }

    let dd = DiscDiagram::from_faces(glued, square_faces, outer, map, target)?;
    if diagram::gauss_bonnet_total(&dd)? != 4 {
        return Err(GridError::Certify("glued diagram violates the curvature audit".into()));
    }
    Ok(GlueResult { diagram: dd, b_vertex: b_vid, b_edge: b_eid, matched_edges: w })
}

/// Identify the upper side of `a` with the lower side of `b` wherever
/// their target images agree. The images must share at least one edge.
pub fn concatenate(
    a: &Quadrangle,
    b: &Quadrangle,
    target: &SquareComplex,
) -> Result<DiscDiagram, GridError> {
    let res = glue(&a.diagram, &a.side(SIDE_PLUS), &b.diagram, &b.side(SIDE_MINUS), target)?;
    Ok(res.diagram)
}

/// A partial cellular self-injection of a finite complex, the desk-scale
/// stand-in for an automorphism of an infinite complex. Cells may be
/// undefined; applying the map past its domain is reported, not hidden.
#[derive(Debug, Clone)]
pub struct PartialAutomorphism {
    pub vertex: Vec<Option<VertexId>>,
    pub edge: Vec<Option<EdgeId>>,
    pub square: Vec<Option<SquareId>>,
}

impl PartialAutomorphism {
    pub fn identity(x: &SquareComplex) -> Self {
        PartialAutomorphism {
            vertex: x.vertices().map(Some).collect(),
            edge: x.edge_ids().map(Some).collect(),
            square: x.square_ids().map(Some).collect(),
        }
    }

    /// Translation of a grid-coordinate complex by (dx, dy), defined where
    /// the translated cell exists.
    pub fn grid_translation(x: &SquareComplex, dx: i64, dy: i64) -> Self {
        fn parse(s: &str) -> Option<(i64, i64)> {
            let (a, b) = s.split_once('_')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        }
        let vertex = x
            .vertices()
            .map(|v| {
                let (px, py) = parse(x.vertex_name(v))?;
                x.vertex_by_name(&shapes::vertex_name(px + dx, py + dy))
            })
            .collect();
        let edge = x
            .edge_ids()
            .map(|e| {
                let name = x.edge_name(e);
                let prefix = &name[..1];
                if prefix != "h" && prefix != "v" {
                    return None;
                }
                let (px, py) = parse(&name[1..])?;
                x.edge_by_name(&format!("{}{}_{}", prefix, px + dx, py + dy))
            })
            .collect();
        let square = x
            .square_ids()
            .map(|s| {
                let name = x.square_name(s);
                if !name.starts_with('c') {
                    return None;
                }
                let (px, py) = parse(&name[1..])?;
                x.square_by_name(&format!("c{}_{}", px + dx, py + dy))
            })
            .collect();
        PartialAutomorphism { vertex, edge, square }
    }

    /// Injective where defined, and cellular: defined edges carry defined
    /// endpoints onto the image endpoints, defined squares carry their
    /// edge set onto the image edge set.
    pub fn validate(&self, x: &SquareComplex) -> Result<(), GridError> {
        let fail = |m: String| Err(GridError::NotAutomorphism(m));
        if self.vertex.len() != x.vertex_count()
            || self.edge.len() != x.edge_count()
            || self.square.len() != x.square_count()
        {
            return fail("cell counts differ from the complex".into());
        }
        fn injective<T: Ord + Copy>(xs: &[Option<T>]) -> bool {
            let mut seen: Vec<T> = xs.iter().flatten().copied().collect();
            let n = seen.len();
            seen.sort();
            seen.dedup();
            seen.len() == n
        }
        if !injective(&self.vertex) || !injective(&self.edge) || !injective(&self.square) {
            return fail("images repeat".into());
        }
        for e in x.edge_ids() {
            let Some(ie) = self.edge[e.index()] else { continue };
            let [u, v] = x.endpoints(e);
            let (Some(iu), Some(iv)) = (self.vertex[u.index()], self.vertex[v.index()]) else {
                return fail(format!("edge {} is defined on an undefined endpoint", x.edge_name(e)));
            };
            let mut got = [iu, iv];
            got.sort();
            let mut want = x.endpoints(ie);
            want.sort();
            if got != want {
                return fail(format!("edge {} does not commute with endpoints", x.edge_name(e)));
            }
        }
        for s in x.square_ids() {
            let Some(is) = self.square[s.index()] else { continue };
            let imgs: Option<Vec<EdgeId>> =
                x.square_walk(s).iter().map(|d| self.edge[d.edge.index()]).collect();
            let Some(mut got) = imgs else {
                return fail(format!("square {} is defined on an undefined edge", x.square_name(s)));
            };
            got.sort();
            let mut want: Vec<EdgeId> = x.square_walk(is).iter().map(|d| d.edge).collect();
            want.sort();
            if got != want {
                return fail(format!("square {} does not commute with its walk", x.square_name(s)));
            }
        }
        Ok(())
    }

    /// The partial map sending c to outer(inner(c)).
    pub fn compose(outer: &Self, inner: &Self) -> Self {
        PartialAutomorphism {
            vertex: inner.vertex.iter().map(|o| o.and_then(|m| outer.vertex[m.index()])).collect(),
            edge: inner.edge.iter().map(|o| o.and_then(|m| outer.edge[m.index()])).collect(),
            square: inner.square.iter().map(|o| o.and_then(|m| outer.square[m.index()])).collect(),
        }
    }

    /// Post-compose a total map with this partial map; errors when any
    /// image leaves the defined domain.
    pub fn apply(&self, m: &CombinatorialMap) -> Result<CombinatorialMap, GridError> {
        let out = |kind: &str| GridError::OutOfDomain(format!("{} image is undefined", kind));
        let vertex_map = m
            .vertex_map
            .iter()
            .map(|&v| self.vertex[v.index()])
            .collect::<Option<_>>()
            .ok_or_else(|| out("vertex"))?;
        let edge_map = m
            .edge_map
            .iter()
            .map(|&e| self.edge[e.index()])
            .collect::<Option<_>>()
            .ok_or_else(|| out("edge"))?;
        let square_map = m
            .square_map
            .iter()
            .map(|&s| self.square[s.index()])
            .collect::<Option<_>>()
            .ok_or_else(|| out("square"))?;
        Ok(CombinatorialMap { vertex_map, edge_map, square_map })
    }

    fn apply_vertices(&self, vs: &[VertexId]) -> Result<Vec<VertexId>, GridError> {
        vs.iter()
            .map(|&v| self.vertex[v.index()])
            .collect::<Option<_>>()
            .ok_or_else(|| GridError::OutOfDomain("translated path leaves the complex".into()))
    }
}

/// Pile up quadrangles over a geodesic: each diagram joins the path to its
/// element's translate, and the pile concatenates the translated copies
/// h_1..h_i applied to the next diagram. With no elements the pile is the
/// path itself as a degenerate diagram.
pub fn pile_up(
    target: &SquareComplex,
    gamma: &[VertexId],
    elements: &[PartialAutomorphism],
    diagrams: &[Quadrangle],
) -> Result<DiscDiagram, GridError> {
    assert_eq!(elements.len(), diagrams.len(), "one quadrangle per element");
    if gamma.is_empty() {
        return Err(GridError::BadOverlap("empty base path".into()));
    }
    let l = gamma.len() - 1;
    let mut gamma_edges: Vec<EdgeId> = Vec::with_capacity(l);
    for t in 0..l {
        let e = target
            .neighbours(gamma[t])
            .find(|&(_, w)| w == gamma[t + 1])
            .map(|(d, _)| d.edge)
            .ok_or(GridError::NotGeodesicBottom)?;
        gamma_edges.push(e);
    }
    if l > 0 && metric::distances_from(target, gamma[0])[gamma[l].index()] as usize != l {
        return Err(GridError::NotGeodesicBottom);
    }
    for el in elements {
        el.validate(target)?;
    }

    if elements.is_empty() {
        let data = ComplexData {
            vertices: (0..=l).map(|t| shapes::vertex_name(t as i64, 0)).collect(),
            edges: (0..l)
                .map(|t| {
                    (
                        format!("h{}_0", t),
                        shapes::vertex_name(t as i64, 0),
                        shapes::vertex_name(t as i64 + 1, 0),
                    )
                })
                .collect(),
            squares: vec![],
        };
        let path = SquareComplex::build(data).expect("path complex");
        let map = CombinatorialMap {
            vertex_map: gamma.to_vec(),
            edge_map: gamma_edges,
            square_map: vec![],
        };
        let outer: Vec<Dart> = (0..l)
            .map(|t| Dart::new(EdgeId(t as u32), true))
            .chain((0..l).rev().map(|t| Dart::new(EdgeId(t as u32), false)))
            .collect();
        return Ok(DiscDiagram::from_faces(path, vec![], outer, map, target)?);
    }

    let matches_path = |imgs: &[VertexId], path: &[VertexId]| {
        imgs == path || imgs.iter().rev().eq(path.iter())
    };
    let mut acc: Option<(DiscDiagram, Vec<Dart>)> = None;
    let mut g = PartialAutomorphism::identity(target);
    for (el, q) in elements.iter().zip(diagrams) {
        let minus_imgs: Vec<VertexId> =
            q.side_vertices(SIDE_MINUS).iter().map(|&v| q.diagram.map.vertex(v)).collect();
        if !matches_path(&minus_imgs, gamma) {
            return Err(GridError::BadOverlap("a diagram base is not the given path".into()));
        }
        let translated_gamma = el.apply_vertices(gamma)?;
        let plus_imgs: Vec<VertexId> =
            q.side_vertices(SIDE_PLUS).iter().map(|&v| q.diagram.map.vertex(v)).collect();
        if !matches_path(&plus_imgs, &translated_gamma) {
            return Err(GridError::BadOverlap(
                "a diagram top is not the element's translate of the path".into(),
            ));
        }
        let piece = DiscDiagram::new(
            q.diagram.surface.clone(),
            q.diagram.rotations.clone(),
            g.apply(&q.diagram.map)?,
            target,
        )?;
        acc = Some(match acc {
            None => (piece, q.side(SIDE_PLUS)),
            Some((prev, prev_plus)) => {
                let res = glue(&prev, &prev_plus, &piece, &q.side(SIDE_MINUS), target)?;
                if res.matched_edges != l {
                    return Err(GridError::BadOverlap(
                        "a pile piece covers only part of the previous top".into(),
                    ));
                }
                let glued = res.diagram;
                let plus = q
                    .side(SIDE_PLUS)
                    .iter()
                    .map(|d| {
                        let e = res.b_edge[d.edge.index()];
                        let tail = res.b_vertex[q.diagram.surface.dart_tail(*d).index()];
                        Dart::new(e, glued.surface.endpoints(e)[0] == tail)
                    })
                    .collect();
                (glued, plus)
            }
        });
        g = PartialAutomorphism::compose(&g, el);
    }
    Ok(acc.expect("at least one piece").0)
}

/// Every interior vertex of both the lower and the upper side is flat.
pub fn is_corridor(q: &Quadrangle) -> Result<bool, GridError> {
    for side in [SIDE_MINUS, SIDE_PLUS] {
        for v in q.side_interior(side) {
            if diagram::curvature(&q.diagram, v)? != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The lower side carries at least one corner in its interior.
pub fn is_staircase(q: &Quadrangle) -> Result<bool, GridError> {
    for v in q.side_interior(SIDE_MINUS) {
        if diagram::curvature(&q.diagram, v)? != 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// A certified sub-path of the upper side on which all maps agree.
#[derive(Debug)]
pub struct CommonSegment {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// Propagate agreement of maps across a staircase. `r` is the declared
/// width bound of the staircase and only enters the corner threshold
/// 2r + 2k; the returned segment is re-verified cell by cell, so an
/// understated bound can only make the call fail, never certify falsely.
pub fn staircase_propagate(
    q: &Quadrangle,
    target: &SquareComplex,
    maps: &[CombinatorialMap],
    r: usize,
    k: usize,
) -> Result<CommonSegment, GridError> {
    assert!(!maps.is_empty(), "at least one map required");
    assert!(k >= 1);
    let surf = &q.diagram.surface;
    for mp in maps {
        mp.validate(surf, target)?;
    }
    let mv = q.side_vertices(SIDE_MINUS);
    let mdarts = q.side(SIDE_MINUS);
    let base = &maps[0];
    for mp in &maps[1..] {
        if mv.iter().any(|&v| mp.vertex(v) != base.vertex(v))
            || mdarts.iter().any(|d| mp.edge(d.edge) != base.edge(d.edge))
        {
            return Err(GridError::MapsDisagreeOnBase);
        }
    }

    let interior = q.side_interior(SIDE_MINUS);
    let mut corners = 0usize;
    let mut reflex: Vec<VertexId> = Vec::new();
    for &v in &interior {
        let kap = diagram::curvature(&q.diagram, v)?;
        if kap != 0 {
            corners += 1;
        }
        if kap < 0 {
            reflex.push(v);
        }
    }
    let needed = 2 * r + 2 * k;
    if corners < needed {
        return Err(GridError::TooFewCorners { found: corners, needed });
    }

    let emb = euclid::embed_euclidean(surf)
        .map_err(|e| GridError::PropagateFail(format!("surface does not embed: {}", e)))?;
    let coord = |v: VertexId| {
        let c = emb.coord(v);
        (c[0], c[1])
    };
    let raw_cells: Vec<(i64, i64)> = surf
        .square_ids()
        .map(|s| {
            let cs = surf.square_corners(s);
            let x = cs.iter().map(|&v| coord(v).0).min().unwrap();
            let y = cs.iter().map(|&v| coord(v).1).min().unwrap();
            (x, y)
        })
        .collect();

    // Orient the drawing so that every horizontal lower-side edge has its
    // square above it and every vertical one has its square to the left.
    let mut chosen = None;
    'orientations: for t in 0..8 {
        let cells: BTreeSet<(i64, i64)> =
            raw_cells.iter().map(|&c| euclid::transform_cell(t, c)).collect();
        for d in &mdarts {
            let p = euclid::transform_point(t, coord(surf.dart_tail(*d)));
            let h = euclid::transform_point(t, coord(surf.dart_head(*d)));
            let hit = if p.1 == h.1 {
                cells.contains(&(p.0.min(h.0), p.1))
            } else {
                cells.contains(&(p.0 - 1, p.1.min(h.1)))
            };
            if !hit {
                continue 'orientations;
            }
        }
        chosen = Some(t);
        break;
    }
    let Some(t) = chosen else {
        return Err(GridError::PropagateFail("no orientation aligns the lower side".into()));
    };
    let tp = |v: VertexId| euclid::transform_point(t, coord(v));

    if reflex.is_empty() {
        return Err(GridError::PropagateFail("no reflex corner on the lower side".into()));
    }
    let (vx, vy) = tp(reflex[0]);
    let (wx, wy) = tp(*reflex.last().unwrap());
    let (rx0, rx1) = (vx.min(wx), vx.max(wx));
    let (ry0, ry1) = (vy.min(wy), vy.max(wy));

    type Segment = ((i64, i64), (i64, i64));
    let mut edge_at: BTreeMap<Segment, EdgeId> = BTreeMap::new();
    for e in surf.edge_ids() {
        let [u, v] = surf.endpoints(e);
        let (a, b) = (tp(u), tp(v));
        edge_at.insert((a.min(b), a.max(b)), e);
    }
    let mut square_at: BTreeMap<(i64, i64), SquareId> = BTreeMap::new();
    for (s, &c) in surf.square_ids().zip(&raw_cells) {
        square_at.insert(euclid::transform_cell(t, c), s);
    }

    // Cells inside the rectangle spanned by the first and last reflex
    // corner, ordered along rows from the right.
    let mut kcells: Vec<(i64, i64)> = square_at
        .keys()
        .copied()
        .filter(|&(x, y)| x >= rx0 && x < rx1 && y >= ry0 && y < ry1)
        .collect();
    kcells.sort_by_key(|&(x, y)| (y, std::cmp::Reverse(x)));

    let mut agreed: BTreeSet<EdgeId> = mdarts.iter().map(|d| d.edge).collect();
    let mut agreed_v: BTreeSet<VertexId> = mv.iter().copied().collect();
    for &(cx, cy) in &kcells {
        let s = square_at[&(cx, cy)];
        let bottom = edge_at[&((cx, cy), (cx + 1, cy))];
        let right = edge_at[&((cx + 1, cy), (cx + 1, cy + 1))];
        if !agreed.contains(&bottom) || !agreed.contains(&right) {
            return Err(GridError::PropagateFail(format!(
                "cell ({}, {}) is not anchored by the lower side",
                cx, cy
            )));
        }
        for mp in &maps[1..] {
            if mp.square(s) != base.square(s) {
                return Err(GridError::PropagateFail(format!(
                    "maps diverge at cell ({}, {})",
                    cx, cy
                )));
            }
        }
        for d in surf.square_walk(s) {
            for mp in &maps[1..] {
                if mp.edge(d.edge) != base.edge(d.edge) {
                    return Err(GridError::PropagateFail(format!(
                        "maps diverge on an edge of cell ({}, {})",
                        cx, cy
                    )));
                }
            }
            agreed.insert(d.edge);
        }
        for &v in surf.square_corners(s).iter() {
            for mp in &maps[1..] {
                if mp.vertex(v) != base.vertex(v) {
                    return Err(GridError::PropagateFail(format!(
                        "maps diverge at a corner of cell ({}, {})",
                        cx, cy
                    )));
                }
            }
            agreed_v.insert(v);
        }
    }

    let pdarts = q.side(SIDE_PLUS);
    let pverts = q.side_vertices(SIDE_PLUS);
    let mut best = (0usize, 0usize);
    let mut lo = 0;
    while lo < pdarts.len() {
        if !agreed.contains(&pdarts[lo].edge) {
            lo += 1;
            continue;
        }
        let mut hi = lo;
        while hi < pdarts.len() && agreed.contains(&pdarts[hi].edge) {
            hi += 1;
        }
        if hi - lo > best.1 {
            best = (lo, hi - lo);
        }
        lo = hi;
    }
    if best.1 < k {
        return Err(GridError::PropagateFail(format!(
            "common upper segment has length {}, need {}",
            best.1, k
        )));
    }
    let vertices: Vec<VertexId> = pverts[best.0..=best.0 + best.1].to_vec();
    let edges: Vec<EdgeId> = pdarts[best.0..best.0 + best.1].iter().map(|d| d.edge).collect();
    for mp in &maps[1..] {
        if vertices.iter().any(|&v| mp.vertex(v) != base.vertex(v))
            || edges.iter().any(|&e| mp.edge(e) != base.edge(e))
        {
            return Err(GridError::PropagateFail("reported segment is not common".into()));
        }
    }
    Ok(CommonSegment { vertices, edges })
}

/// Result of the exhaustive anchored grid search.
pub struct GridSearch {
    pub length: usize,
    pub width: usize,
    /// Largest s such that an s-by-s grid embeds isometrically.
    pub square_side: usize,
    pub states: usize,
    pub capped: bool,
}

/// Dimensions of a largest isometrically embedded grid, normalized so the
/// length is the larger dimension. Area wins over shape; a complex with no
/// embedded square reports its diameter as a degenerate grid of width 0.
pub fn largest_embedded_grid(x: &SquareComplex) -> (usize, usize) {
    let r = grid_search(x, 100_000);
    (r.length, r.width)
}

/// Smallest s such that no s-by-s grid embeds isometrically.
pub fn smallest_unembeddable_square(x: &SquareComplex) -> usize {
    grid_search(x, 100_000).square_side + 1
}

#[derive(Clone)]
struct Rect {
    verts: Vec<Vec<VertexId>>,
    hedges: Vec<Vec<EdgeId>>,
    vedges: Vec<Vec<EdgeId>>,
    cells: Vec<Vec<SquareId>>,
}

impl Rect {
    fn w(&self) -> usize {
        self.cells[0].len()
    }

    fn h(&self) -> usize {
        self.cells.len()
    }

    fn key(&self) -> (usize, Vec<SquareId>) {
        (self.w(), self.cells.iter().flatten().copied().collect())
    }
}

fn dart_from(x: &SquareComplex, e: EdgeId, tail: VertexId) -> Dart {
    Dart::new(e, x.endpoints(e)[0] == tail)
}

fn dart_towards(x: &SquareComplex, e: EdgeId, head: VertexId) -> Dart {
    Dart::new(e, x.endpoints(e)[1] == head)
}

fn dihedral_walks(w: [Dart; 4]) -> [[Dart; 4]; 8] {
    let mut out = [[w[0]; 4]; 8];
    for r in 0..4 {
        let rot = [w[r], w[(r + 1) % 4], w[(r + 2) % 4], w[(r + 3) % 4]];
        out[r] = rot;
        out[4 + r] = [rot[3].reversed(), rot[2].reversed(), rot[1].reversed(), rot[0].reversed()];
    }
    out
}

fn walk_with_left(x: &SquareComplex, s: SquareId, left: Dart) -> Option<[Dart; 4]> {
    dihedral_walks(x.square_walk(s)).into_iter().find(|wk| wk[3] == left)
}

fn walk_with_bottom(x: &SquareComplex, s: SquareId, bottom: Dart) -> Option<[Dart; 4]> {
    dihedral_walks(x.square_walk(s)).into_iter().find(|wk| wk[0] == bottom)
}

/// Add one column on the right of the rectangle, branching over the
/// possible squares across the seam; rows above the first are forced
/// corner by corner.
fn extend_right(x: &SquareComplex, r: &Rect) -> Vec<Rect> {
    let (w, h) = (r.w(), r.h());
    let seam = r.vedges[0][w];
    let mut out = Vec::new();
    for &t in x.squares_on_edge(seam) {
        if t == r.cells[0][w - 1] {
            continue;
        }
        let down = dart_towards(x, seam, r.verts[0][w]);
        let Some(wk) = walk_with_left(x, t, down) else { continue };
        type Column = (Vec<VertexId>, Vec<EdgeId>, Vec<EdgeId>, Vec<SquareId>);
        let start: Column = (
            vec![x.dart_head(wk[0]), x.dart_head(wk[1])],
            vec![wk[0].edge, wk[2].edge],
            vec![wk[1].edge],
            vec![t],
        );
        let mut partial = vec![start];
        for row in 1..h {
            let mut next: Vec<Column> = Vec::new();
            for (pv, ph, pvv, pc) in &partial {
                let inc = dart_towards(x, r.vedges[row][w], r.verts[row][w]);
                let out_d = dart_from(x, ph[row], r.verts[row][w]);
                for c in x.corner_squares(inc, out_d) {
                    let wk2 = diagram::aligned_square_walk(x, c, inc, out_d);
                    let mut pv2 = pv.clone();
                    let mut ph2 = ph.clone();
                    let mut pvv2 = pvv.clone();
                    let mut pc2 = pc.clone();
                    pv2.push(x.dart_head(wk2[2]));
                    pvv2.push(wk2[2].edge);
                    ph2.push(wk2[3].edge);
                    pc2.push(c);
                    next.push((pv2, ph2, pvv2, pc2));
                }
            }
            partial = next;
            if partial.is_empty() {
                break;
            }
        }
        for (pv, ph, pvv, pc) in partial {
            let mut rect = r.clone();
            for row in 0..=h {
                rect.verts[row].push(pv[row]);
                rect.hedges[row].push(ph[row]);
            }
            for row in 0..h {
                rect.vedges[row].push(pvv[row]);
                rect.cells[row].push(pc[row]);
            }
            out.push(rect);
        }
    }
    out
}

/// Add one row on top of the rectangle, branching over the possible
/// squares across the seam; columns after the first are forced.
fn extend_up(x: &SquareComplex, r: &Rect) -> Vec<Rect> {
    let (w, h) = (r.w(), r.h());
    let seam = r.hedges[h][0];
    let mut out = Vec::new();
    for &t in x.squares_on_edge(seam) {
        if t == r.cells[h - 1][0] {
            continue;
        }
        let base = dart_from(x, seam, r.verts[h][0]);
        let Some(wk) = walk_with_bottom(x, t, base) else { continue };
        type Row = (Vec<VertexId>, Vec<EdgeId>, Vec<EdgeId>, Vec<SquareId>);
        let start: Row = (
            vec![x.dart_head(wk[2]), x.dart_head(wk[1])],
            vec![wk[2].edge],
            vec![wk[3].edge, wk[1].edge],
            vec![t],
        );
        let mut partial = vec![start];
        for col in 1..w {
            let mut next: Vec<Row> = Vec::new();
            for (pv, ph, pvv, pc) in &partial {
                let inc = dart_towards(x, pvv[col], r.verts[h][col]);
                let out_d = dart_from(x, r.hedges[h][col], r.verts[h][col]);
                for c in x.corner_squares(inc, out_d) {
                    let wk2 = diagram::aligned_square_walk(x, c, inc, out_d);
                    let mut pv2 = pv.clone();
                    let mut ph2 = ph.clone();
                    let mut pvv2 = pvv.clone();
                    let mut pc2 = pc.clone();
                    pv2.push(x.dart_head(wk2[2]));
                    pvv2.push(wk2[2].edge);
                    ph2.push(wk2[3].edge);
                    pc2.push(c);
                    next.push((pv2, ph2, pvv2, pc2));
                }
            }
            partial = next;
            if partial.is_empty() {
                break;
            }
        }
        for (pv, ph, pvv, pc) in partial {
            let mut rect = r.clone();
            rect.verts.push(pv);
            rect.vedges.push(pvv);
            rect.hedges.push(ph);
            rect.cells.push(pc);
            out.push(rect);
        }
    }
    out
}

fn rect_is_isometric(x: &SquareComplex, r: &Rect) -> bool {
    let (w, h) = (r.w() as i64, r.h() as i64);
    let g = shapes::grid(w, h);
    let mut vertex_map = vec![VertexId(0); g.vertex_count()];
    let mut edge_map = vec![EdgeId(0); g.edge_count()];
    let mut square_map = vec![SquareId(0); g.square_count()];
    for j in 0..=h {
        for i in 0..=w {
            vertex_map[g.vertex_by_name(&shapes::vertex_name(i, j)).unwrap().index()] =
                r.verts[j as usize][i as usize];
        }
        for i in 0..w {
            edge_map[g.edge_by_name(&shapes::h_edge(i, j)).unwrap().index()] =
                r.hedges[j as usize][i as usize];
        }
    }
    for j in 0..h {
        for i in 0..=w {
            edge_map[g.edge_by_name(&shapes::v_edge(i, j)).unwrap().index()] =
                r.vedges[j as usize][i as usize];
        }
        for i in 0..w {
            square_map[g.square_by_name(&shapes::cell_name(i, j)).unwrap().index()] =
                r.cells[j as usize][i as usize];
        }
    }
    let map = CombinatorialMap { vertex_map, edge_map, square_map };
    if map.validate(&g, x).is_err() {
        return false;
    }
    euclid::is_isometric_embedding(&g, x, &map).isometric
}

/// Exhaustive search for isometrically embedded grids by anchored growth:
/// every square seeds a unit cell in each of its eight orientations, and
/// rectangles grow rightwards and upwards. A rectangle that fails the
/// isometry check cannot extend to one that passes, so it is pruned.
pub fn grid_search(x: &SquareComplex, cap: usize) -> GridSearch {
    let mut diameter = 0usize;
    for v in x.vertices() {
        let d = metric::distances_from(x, v);
        for w in x.vertices() {
            let dv = d[w.index()];
            if dv != u32::MAX && dv as usize > diameter {
                diameter = dv as usize;
            }
        }
    }
    if x.square_count() == 0 {
        return GridSearch { length: diameter, width: 0, square_side: 0, states: 0, capped: false };
    }

    let mut stack: Vec<Rect> = Vec::new();
    for s in x.square_ids() {
        for wk in dihedral_walks(x.square_walk(s)) {
            stack.push(Rect {
                verts: vec![
                    vec![x.dart_tail(wk[0]), x.dart_head(wk[0])],
                    vec![x.dart_head(wk[2]), x.dart_head(wk[1])],
                ],
                hedges: vec![vec![wk[0].edge], vec![wk[2].edge]],
                vedges: vec![vec![wk[3].edge, wk[1].edge]],
                cells: vec![vec![s]],
            });
        }
    }

    let mut visited: BTreeSet<(usize, Vec<SquareId>)> = BTreeSet::new();
    let mut states = 0usize;
    let mut capped = false;
    let mut best_area = 0usize;
    let mut best = (diameter, 0usize);
    let mut side = 0usize;
    while let Some(r) = stack.pop() {
        if !visited.insert(r.key()) {
            continue;
        }
        states += 1;
        if states > cap {
            capped = true;
            break;
        }
        if !rect_is_isometric(x, &r) {
            continue;
        }
        let (w, h) = (r.w(), r.h());
        let area = w * h;
        if area > best_area || (area == best_area && w.max(h) > best.0) {
            best_area = area;
            best = (w.max(h), w.min(h));
        }
        side = side.max(w.min(h));
        stack.extend(extend_right(x, &r));
        stack.extend(extend_up(x, &r));
    }
    GridSearch { length: best.0, width: best.1, square_side: side, states, capped }
}
