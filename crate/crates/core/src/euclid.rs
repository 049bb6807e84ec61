//! Lattice geometry of Euclidean complexes: osculation of hyperplanes,
//! horizontal layer decompositions, the verified embedding into the square
//! tiling of the plane, the diagram completion algorithm, the full-link
//! isometric-embedding certificate, and extraction of Euclidean
//! sub-quadrangles between hyperplane cuts.
//!
//! Every construction here is fail-closed: the algorithms assume Euclidean
//! input but re-verify their output (injectivity, all pairwise distances,
//! layer lines, certification of extracted quadrangles) and report a
//! structured error instead of trusting the assumption.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::complex::{
    is_reduced, CombinatorialMap, Dart, EdgeId, SquareComplex, SquareId, Subcomplex, VertexId,
};
use crate::diagram::{
    self, classify, width, DiscDiagram, Quadrangle, QuadrangleClass, SIDE_MINUS, SIDE_PLUS,
};
use crate::hyperplane::{self, Hyperplane, HyperplaneSet, Rail};
use crate::metric::{self, Z2Embedding};
use crate::planar::{self, Rotations};
use crate::shapes;

#[derive(Debug, Error)]
pub enum EuclidError {
    #[error("not a Euclidean complex: {0}")]
    NotEuclideanBug(String),
    #[error("lattice embedding failed: {0}")]
    EmbedFail(String),
    #[error("diagram is not reduced")]
    NotReduced,
    #[error("no consistent extension in the target: {0}")]
    TargetInconsistent(String),
    #[error("no admissible hyperplane pair encloses the sub-segment (minimal sufficient margin: {margin:?})")]
    NotFound { margin: Option<usize> },
    #[error(transparent)]
    Diagram(#[from] diagram::DiagramError),
}

fn sorted_intersects<T: Ord>(a: &[T], b: &[T]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

fn sorted_intersection<T: Ord + Copy>(a: &[T], b: &[T]) -> Vec<T> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Two hyperplanes osculate when their carriers intersect but share no
/// square: they touch without crossing.
pub fn osculates(a: &Hyperplane, b: &Hyperplane) -> bool {
    !sorted_intersects(&a.carrier.squares, &b.carrier.squares)
        && sorted_intersects(&a.carrier.vertices, &b.carrier.vertices)
}

/// The hyperplane osculating `h` along the given rail, if any. In a
/// Euclidean complex there is at most one; finding two or more means the
/// input violated the Euclidean precondition.
///
/// Osculation *along* a rail requires the carriers to share an edge of
/// that rail; a carrier touching the rail at a single vertex is tangency
/// at a corner, which the at-most-one bound does not govern.
pub fn osculation_check(
    hs: &HyperplaneSet,
    h: usize,
    rail: &Rail,
) -> Result<Option<usize>, EuclidError> {
    let base = &hs.hyperplanes[h];
    let mut found = Vec::new();
    for (k, other) in hs.hyperplanes.iter().enumerate() {
        if k == h || sorted_intersects(&base.carrier.squares, &other.carrier.squares) {
            continue;
        }
        let shared = sorted_intersection(&base.carrier.edges, &other.carrier.edges);
        if sorted_intersects(&shared, &rail.side.edges) {
            found.push(k);
        }
    }
    match found.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some(*one)),
        many => Err(EuclidError::NotEuclideanBug(format!(
            "{} hyperplanes osculate along one rail",
            many.len()
        ))),
    }
}

/// One orientation class of a Euclidean complex: hyperplanes arranged in a
/// chain where consecutive layers osculate along a shared rail and
/// non-consecutive layers are disjoint.
#[derive(Debug, Clone)]
pub struct HorizontalDecomposition {
    /// Hyperplane indices in chain order.
    pub layers: Vec<usize>,
    /// Carrier overlap between consecutive layers.
    pub links: Vec<Vec<VertexId>>,
}

/// Arrange one colour class into an osculation chain. Fails when the class
/// branches, cycles, or does not connect, or when a link between
/// consecutive layers leaves their shared rails.
fn build_chain(
    x: &SquareComplex,
    hs: &HyperplaneSet,
    members: &[usize],
) -> Result<HorizontalDecomposition, String> {
    if members.is_empty() {
        return Ok(HorizontalDecomposition { layers: Vec::new(), links: Vec::new() });
    }
    let k = members.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for a in 0..k {
        for b in a + 1..k {
            if osculates(&hs.hyperplanes[members[a]], &hs.hyperplanes[members[b]]) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    if let Some(bad) = adj.iter().position(|n| n.len() > 2) {
        return Err(format!(
            "hyperplane {} osculates {} parallel neighbours",
            members[bad],
            adj[bad].len()
        ));
    }
    let layers: Vec<usize> = if k == 1 {
        vec![members[0]]
    } else {
        let ends: Vec<usize> = (0..k).filter(|&i| adj[i].len() == 1).collect();
        if ends.len() != 2 {
            return Err(format!("osculation graph has {} chain endpoints", ends.len()));
        }
        let start = if members[ends[0]] < members[ends[1]] { ends[0] } else { ends[1] };
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut at = start;
        while let Some(&next) = adj[at].iter().find(|&&n| n != prev) {
            order.push(next);
            prev = at;
            at = next;
        }
        if order.len() != k {
            return Err("osculation graph is not a single chain".to_string());
        }
        order.into_iter().map(|i| members[i]).collect()
    };
    let mut links = Vec::new();
    for pair in layers.windows(2) {
        let (ha, hb) = (&hs.hyperplanes[pair[0]], &hs.hyperplanes[pair[1]]);
        let shared = sorted_intersection(&ha.carrier.vertices, &hb.carrier.vertices);
        let within_rail = |h: &Hyperplane| match hyperplane::rails(x, h) {
            Ok((r0, r1)) => {
                let inside = |r: &Rail| {
                    shared.iter().all(|v| r.side.vertices.binary_search(v).is_ok())
                };
                inside(&r0) || inside(&r1)
            }
            Err(_) => false,
        };
        if !within_rail(ha) || !within_rail(hb) {
            return Err("layer overlap leaves the shared rail".to_string());
        }
        links.push(shared);
    }
    Ok(HorizontalDecomposition { layers, links })
}

/// A verified lattice realization: injective coordinates matching all
/// pairwise graph distances, plus the two layer chains that produced them.
#[derive(Debug, Clone)]
pub struct LatticeEmbedding {
    pub coords: Z2Embedding,
    /// Layers counted by the y coordinate.
    pub horizontal: HorizontalDecomposition,
    /// Layers counted by the x coordinate.
    pub vertical: HorizontalDecomposition,
}

impl LatticeEmbedding {
    pub fn coord(&self, v: VertexId) -> [i64; 2] {
        self.coords.get(v).expect("embedding covers every vertex")
    }
}

/// Embed a Euclidean complex into the square tiling of the plane.
///
/// The hyperplane crossing graph is 2-coloured, taking the class of the
/// least edge as horizontal; each colour class must form an osculation
/// chain, whose position along the chain gives one coordinate. The result
/// is verified exhaustively: layers stay on lattice lines, coordinates are
/// injective, and every pairwise distance equals the l1 distance.
pub fn embed_euclidean(x: &SquareComplex) -> Result<LatticeEmbedding, EuclidError> {
    let fail = |msg: String| EuclidError::EmbedFail(msg);
    if x.vertex_count() == 0 {
        return Err(fail("empty complex".to_string()));
    }
    if !x.is_connected() {
        return Err(fail("complex is not connected".to_string()));
    }
    let hs = hyperplane::hyperplanes(x);
    if let Some(w) = hs.warnings.first() {
        return Err(fail(w.to_string()));
    }

    // 2-colour the crossing graph, seeding each component at its least
    // class; class 0 holds edge 0, so it seeds horizontal.
    let n = hs.len();
    let mut crossing: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for s in x.square_ids() {
        let walk = x.square_walk(s);
        let (a, b) = (hs.class_of(walk[0].edge), hs.class_of(walk[1].edge));
        crossing[a].insert(b);
        crossing[b].insert(a);
    }
    let mut colour: Vec<Option<bool>> = vec![None; n];
    for seed in 0..n {
        if colour[seed].is_some() {
            continue;
        }
        colour[seed] = Some(false);
        let mut queue = vec![seed];
        while let Some(c) = queue.pop() {
            let here = colour[c].unwrap();
            for &d in &crossing[c] {
                match colour[d] {
                    None => {
                        colour[d] = Some(!here);
                        queue.push(d);
                    }
                    Some(other) if other == here => {
                        return Err(fail("crossing graph is not bipartite".to_string()));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let horiz: Vec<usize> = (0..n).filter(|&i| colour[i] == Some(false)).collect();
    let vert: Vec<usize> = (0..n).filter(|&i| colour[i] == Some(true)).collect();
    let horizontal = build_chain(x, &hs, &horiz).map_err(fail)?;
    let vertical = build_chain(x, &hs, &vert).map_err(fail)?;

    // Chain position determines the coordinate: a vertex's value counts the
    // layers it lies strictly above, where "above" at each layer is the
    // side away from the chain start.
    let assign = |chain: &HorizontalDecomposition| -> Vec<i64> {
        let mut axis = vec![0i64; x.vertex_count()];
        for (pos, &li) in chain.layers.iter().enumerate() {
            let (pos_side, _) = hs.hyperplanes[li]
                .halfspaces
                .as_ref()
                .expect("separation warnings already rejected");
            let high_is_pos = if chain.layers.len() == 1 {
                !pos_side.contains_vertex(VertexId(0))
            } else if pos == 0 {
                // The rest of the chain lies above the first layer.
                let probe = hs.hyperplanes[chain.layers[1]].carrier.vertices[0];
                pos_side.contains_vertex(probe)
            } else {
                let probe = hs.hyperplanes[chain.layers[pos - 1]].carrier.vertices[0];
                !pos_side.contains_vertex(probe)
            };
            for v in x.vertices() {
                if pos_side.contains_vertex(v) == high_is_pos {
                    axis[v.index()] += 1;
                }
            }
        }
        axis
    };
    let ys = assign(&horizontal);
    let xs = assign(&vertical);

    // Each layer must sit on one lattice line: the dual edges of chain
    // position i all join value i to value i+1.
    for (chain, axis) in [(&horizontal, &ys), (&vertical, &xs)] {
        for (i, &li) in chain.layers.iter().enumerate() {
            for &e in &hs.hyperplanes[li].dual_edges {
                let [a, b] = x.endpoints(e);
                let (lo, hi) = {
                    let (p, q) = (axis[a.index()], axis[b.index()]);
                    (p.min(q), p.max(q))
                };
                if lo != i as i64 || hi != i as i64 + 1 {
                    return Err(fail(format!("layer {} strays from its lattice line", i)));
                }
            }
        }
    }

    let mut seen: BTreeMap<[i64; 2], VertexId> = BTreeMap::new();
    for v in x.vertices() {
        let c = [xs[v.index()], ys[v.index()]];
        if let Some(&w) = seen.get(&c) {
            return Err(fail(format!(
                "vertices {} and {} collide at {:?}",
                x.vertex_name(w),
                x.vertex_name(v),
                c
            )));
        }
        seen.insert(c, v);
    }
    for u in x.vertices() {
        let du = metric::distances_from(x, u);
        for v in x.vertices() {
            if v <= u {
                continue;
            }
            let l1 = (xs[u.index()] - xs[v.index()]).abs()
                + (ys[u.index()] - ys[v.index()]).abs();
            if u64::from(du[v.index()]) != l1 as u64 {
                return Err(fail(format!(
                    "distance {} between {} and {} is not the l1 distance {}",
                    du[v.index()],
                    x.vertex_name(u),
                    x.vertex_name(v),
                    l1
                )));
            }
        }
    }

    let coords = Z2Embedding {
        coords: x.vertices().map(|v| (v, [xs[v.index()], ys[v.index()]])).collect(),
    };
    Ok(LatticeEmbedding { coords, horizontal, vertical })
}

/// Witness pair for a failed isometric-embedding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryWitness {
    pub pair: [VertexId; 2],
    pub source_distance: u32,
    pub image_distance: u32,
}

/// Outcome of the all-pairs distance comparison together with the
/// sufficient full-link criterion.
#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub isometric: bool,
    pub witness: Option<IsometryWitness>,
    /// Whether every vertex link maps injectively onto a full subgraph of
    /// its image link.
    pub full_links: bool,
    pub non_full_vertex: Option<VertexId>,
}

/// Compare all pairwise distances through the map, and check at each
/// vertex that the link maps injectively onto a full subgraph of the image
/// link (the criterion that forces an isometric embedding).
pub fn is_isometric_embedding(
    source: &SquareComplex,
    target: &SquareComplex,
    map: &CombinatorialMap,
) -> IsometryReport {
    map.validate(source, target).expect("cellular map over matching complexes");
    let mut isometric = true;
    let mut witness = None;
    'pairs: for u in source.vertices() {
        let ds = metric::distances_from(source, u);
        let dt = metric::distances_from(target, map.vertex(u));
        for v in source.vertices() {
            if v <= u {
                continue;
            }
            let (a, b) = (ds[v.index()], dt[map.vertex(v).index()]);
            if a != b {
                isometric = false;
                witness = Some(IsometryWitness {
                    pair: [u, v],
                    source_distance: a,
                    image_distance: b,
                });
                break 'pairs;
            }
        }
    }

    let mut full_links = true;
    let mut non_full_vertex = None;
    'verts: for v in source.vertices() {
        let darts = source.darts_at(v);
        let mut images = BTreeSet::new();
        for &d in darts {
            if !images.insert(map.dart(source, target, d)) {
                full_links = false;
                non_full_vertex = Some(v);
                break 'verts;
            }
        }
        for (i, &d1) in darts.iter().enumerate() {
            for &d2 in &darts[i + 1..] {
                let td1 = map.dart(source, target, d1);
                let td2 = map.dart(source, target, d2);
                let image_corners = target.corner_squares(td1.reversed(), td2);
                if image_corners.is_empty() {
                    continue;
                }
                let mapped: Vec<SquareId> = source
                    .corner_squares(d1.reversed(), d2)
                    .iter()
                    .map(|&s| map.square(s))
                    .collect();
                if image_corners.iter().any(|t| !mapped.contains(t)) {
                    full_links = false;
                    non_full_vertex = Some(v);
                    break 'verts;
                }
            }
        }
    }

    IsometryReport { isometric, witness, full_links, non_full_vertex }
}

/// Apply one of the eight axis symmetries to a vertex coordinate.
pub(crate) fn transform_point(t: usize, (x, y): (i64, i64)) -> (i64, i64) {
    let (a, b) = if t & 4 != 0 { (y, x) } else { (x, y) };
    (if t & 1 != 0 { -a } else { a }, if t & 2 != 0 { -b } else { b })
}

/// Apply one of the eight axis symmetries to a cell key (its lower-left
/// corner): negation shifts the key because it negates the far corner.
pub(crate) fn transform_cell(t: usize, (x, y): (i64, i64)) -> (i64, i64) {
    let (a, b) = if t & 4 != 0 { (y, x) } else { (x, y) };
    (if t & 1 != 0 { -a - 1 } else { a }, if t & 2 != 0 { -b - 1 } else { b })
}

/// A lattice symmetry followed by a translation, with the image cell list.
type Placement = (usize, i64, i64, Vec<(i64, i64)>);

/// The symmetry and translation sending a cell set to its canonical form,
/// with the canonical sorted cell list.
fn canonical_transform(cells: &[(i64, i64)]) -> Placement {
    assert!(!cells.is_empty());
    let mut best: Option<Placement> = None;
    for t in 0..8 {
        let img: Vec<(i64, i64)> = cells.iter().map(|&c| transform_cell(t, c)).collect();
        let tx = -img.iter().map(|c| c.0).min().unwrap();
        let ty = -img.iter().map(|c| c.1).min().unwrap();
        let mut moved: Vec<(i64, i64)> = img.iter().map(|c| (c.0 + tx, c.1 + ty)).collect();
        moved.sort_unstable();
        if best.as_ref().is_none_or(|(_, _, _, b)| moved < *b) {
            best = Some((t, tx, ty, moved));
        }
    }
    best.unwrap()
}

/// Canonical representative of a cell set under the symmetries of the
/// lattice: lexicographically least among the eight translated images.
pub fn canonical_cells(cells: &[(i64, i64)]) -> Vec<(i64, i64)> {
    canonical_transform(cells).3
}

/// Result of completing a diagram: the rebuilt diagram over canonical
/// lattice names, plus the cells that were added, in fill order, with
/// their target images.
#[derive(Debug)]
pub struct Completion {
    pub diagram: DiscDiagram,
    pub added: Vec<((i64, i64), SquareId)>,
}

/// Complete a reduced Euclidean diagram over a CAT(0) target: realize it
/// as lattice cells, then repeatedly fill any corner of curvature -1 whose
/// missing quadrant exists in the target, gluing the unique square that
/// shares the corner's two edges. The result is certified isometric via
/// the full-link criterion.
pub fn complete_diagram(
    d: &DiscDiagram,
    target: &SquareComplex,
) -> Result<Completion, EuclidError> {
    if is_reduced(&d.surface, &d.map).is_err() {
        return Err(EuclidError::NotReduced);
    }
    if d.surface.square_count() == 0 {
        // Nothing to fill: a diagram without squares has no -1 corners.
        return Ok(Completion { diagram: d.clone(), added: Vec::new() });
    }
    for e in d.surface.edge_ids() {
        if d.surface.squares_on_edge(e).is_empty() {
            return Err(EuclidError::NotEuclideanBug(format!(
                "pendant edge {} (degenerate diagram)",
                d.surface.edge_name(e)
            )));
        }
    }
    let emb = embed_euclidean(&d.surface)?;

    // Lattice shadow of the diagram: coordinates to target images.
    let coord = |v: VertexId| {
        let [cx, cy] = emb.coord(v);
        (cx, cy)
    };
    type LatticeEdge = ((i64, i64), (i64, i64));
    let edge_key = |a: (i64, i64), b: (i64, i64)| if a <= b { (a, b) } else { (b, a) };
    let mut vert: BTreeMap<(i64, i64), VertexId> = BTreeMap::new();
    let mut edge: BTreeMap<LatticeEdge, EdgeId> = BTreeMap::new();
    let mut cell: BTreeMap<(i64, i64), SquareId> = BTreeMap::new();
    for v in d.surface.vertices() {
        vert.insert(coord(v), d.map.vertex(v));
    }
    for e in d.surface.edge_ids() {
        let [a, b] = d.surface.endpoints(e);
        edge.insert(edge_key(coord(a), coord(b)), d.map.edge(e));
    }
    for s in d.surface.square_ids() {
        let corners = d.surface.square_corners(s);
        let min_x = corners.iter().map(|&v| coord(v).0).min().unwrap();
        let min_y = corners.iter().map(|&v| coord(v).1).min().unwrap();
        cell.insert((min_x, min_y), d.map.square(s));
    }

    let budget = {
        let xs: Vec<i64> = cell.keys().map(|c| c.0).collect();
        let ys: Vec<i64> = cell.keys().map(|c| c.1).collect();
        let w = xs.iter().max().unwrap() - xs.iter().min().unwrap() + 1;
        let h = ys.iter().max().unwrap() - ys.iter().min().unwrap() + 1;
        (w * h) as usize
    };

    let mut added_raw: Vec<((i64, i64), SquareId)> = Vec::new();
    loop {
        let mut filled = false;
        let points: Vec<(i64, i64)> = vert.keys().copied().collect();
        'scan: for p in points {
            let around = [
                (p.0 - 1, p.1 - 1),
                (p.0 - 1, p.1),
                (p.0, p.1 - 1),
                (p.0, p.1),
            ];
            let missing: Vec<(i64, i64)> =
                around.iter().copied().filter(|c| !cell.contains_key(c)).collect();
            if missing.len() != 1 {
                continue;
            }
            let m = missing[0];
            // Corner of curvature -1 at p; its quadrant edges already exist.
            let q1 = (if p.0 == m.0 { m.0 + 1 } else { m.0 }, p.1);
            let q2 = (p.0, if p.1 == m.1 { m.1 + 1 } else { m.1 });
            let tp = vert[&p];
            let e1 = edge[&edge_key(p, q1)];
            let e2 = edge[&edge_key(p, q2)];
            let dart_with_head = |e: EdgeId, head: VertexId| {
                let [a, b] = target.endpoints(e);
                assert!(a == head || b == head, "edge image misses its endpoint image");
                Dart::new(e, b == head)
            };
            let incoming = dart_with_head(e1, tp);
            let outgoing = dart_with_head(e2, tp).reversed();
            let squares = target.corner_squares(incoming, outgoing);
            let st = match squares.as_slice() {
                [] => continue, // the link image is already full at this corner
                [one] => *one,
                many => {
                    return Err(EuclidError::TargetInconsistent(format!(
                        "corner at {} admits {} filling squares",
                        target.vertex_name(tp),
                        many.len()
                    )))
                }
            };
            let walk = diagram::aligned_square_walk(target, st, incoming, outgoing);
            let z = (q1.0 + q2.0 - p.0, q1.1 + q2.1 - p.1);
            let z_img = target.dart_head(walk[2]);
            match vert.get(&z) {
                Some(&existing) if existing != z_img => {
                    return Err(EuclidError::TargetInconsistent(format!(
                        "extension maps lattice point {:?} to {} but it already maps to {}",
                        z,
                        target.vertex_name(z_img),
                        target.vertex_name(existing)
                    )));
                }
                Some(_) => {}
                None => {
                    vert.insert(z, z_img);
                }
            }
            for (key, expect) in
                [(edge_key(q2, z), walk[2].edge), (edge_key(z, q1), walk[3].edge)]
            {
                match edge.get(&key) {
                    Some(&existing) if existing != expect => {
                        return Err(EuclidError::TargetInconsistent(format!(
                            "extension disagrees on the image of lattice edge {:?}",
                            key
                        )));
                    }
                    Some(_) => {}
                    None => {
                        edge.insert(key, expect);
                    }
                }
            }
            cell.insert(m, st);
            added_raw.push((m, st));
            assert!(added_raw.len() <= budget, "completion left the bounding box");
            filled = true;
            break 'scan;
        }
        if !filled {
            break;
        }
    }

    // Rebuild over canonical lattice names so completion is idempotent on
    // the nose, then re-certify fail-closed.
    let cells_now: Vec<(i64, i64)> = cell.keys().copied().collect();
    let (t, tx, ty, canon) = canonical_transform(&cells_now);
    let moved_point = |p: (i64, i64)| {
        let (a, b) = transform_point(t, p);
        (a + tx, b + ty)
    };
    let surface = shapes::from_cells_complex(&canon);
    let rotations = planar::rotations_from_coords(&surface)
        .expect("lattice cells admit coordinate rotations");
    let mut vertex_images: BTreeMap<String, VertexId> = BTreeMap::new();
    for (&p, &img) in &vert {
        let (x, y) = moved_point(p);
        vertex_images.insert(shapes::vertex_name(x, y), img);
    }
    let mut edge_images: BTreeMap<String, EdgeId> = BTreeMap::new();
    for (&(a, b), &img) in &edge {
        let (pa, pb) = (moved_point(a), moved_point(b));
        let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
        let name = if lo.1 == hi.1 {
            shapes::h_edge(lo.0, lo.1)
        } else {
            shapes::v_edge(lo.0, lo.1)
        };
        edge_images.insert(name, img);
    }
    let mut square_images: BTreeMap<String, SquareId> = BTreeMap::new();
    for (&c, &img) in &cell {
        let (x, y) = {
            let (a, b) = transform_cell(t, c);
            (a + tx, b + ty)
        };
        square_images.insert(shapes::cell_name(x, y), img);
    }
    let map = CombinatorialMap {
        vertex_map: surface
            .vertices()
            .map(|v| vertex_images[surface.vertex_name(v)])
            .collect(),
        edge_map: surface.edge_ids().map(|e| edge_images[surface.edge_name(e)]).collect(),
        square_map: surface
            .square_ids()
            .map(|s| square_images[surface.square_name(s)])
            .collect(),
    };
    let diagram = DiscDiagram::new(surface, rotations, map, target)?;
    let report = is_isometric_embedding(&diagram.surface, target, &diagram.map);
    if !report.isometric || !report.full_links {
        return Err(EuclidError::TargetInconsistent(
            "completed diagram failed the full-link certificate".to_string(),
        ));
    }
    let added = added_raw
        .into_iter()
        .map(|(c, img)| {
            let (a, b) = transform_cell(t, c);
            ((a + tx, b + ty), img)
        })
        .collect();
    Ok(Completion { diagram, added })
}

/// Restrict a rotation system to a subcomplex extracted by name.
fn restrict_rotations(
    parent: &SquareComplex,
    rot: &Rotations,
    sub: &SquareComplex,
) -> Rotations {
    sub.vertices()
        .map(|v| {
            let pv = parent
                .vertex_by_name(sub.vertex_name(v))
                .expect("subcomplex vertex exists in parent");
            rot[pv.index()]
                .iter()
                .filter_map(|d| {
                    sub.edge_by_name(parent.edge_name(d.edge))
                        .map(|e| Dart::new(e, d.forward))
                })
                .collect()
        })
        .collect()
}

/// Restrict a cellular map to a subcomplex extracted by name.
fn restrict_map(
    parent: &SquareComplex,
    map: &CombinatorialMap,
    sub: &SquareComplex,
) -> CombinatorialMap {
    CombinatorialMap {
        vertex_map: sub
            .vertices()
            .map(|v| map.vertex(parent.vertex_by_name(sub.vertex_name(v)).unwrap()))
            .collect(),
        edge_map: sub
            .edge_ids()
            .map(|e| map.edge(parent.edge_by_name(sub.edge_name(e)).unwrap()))
            .collect(),
        square_map: sub
            .square_ids()
            .map(|s| map.square(parent.square_by_name(sub.square_name(s)).unwrap()))
            .collect(),
    }
}

/// Extract the Euclidean sub-quadrangle of `q` spanning the sub-segment of
/// its lower side given by `seg_start..seg_start + seg_len` (in edge
/// positions along the walk of that side).
///
/// The cut hyperplanes are searched: each must be dual to a lower-side
/// edge outside the sub-segment, stay farther than the width from the
/// side's endpoint and the sub-segment's endpoint, cross the upper side,
/// and be disjoint from the other cut. The enclosed region is certified:
/// it must be a Euclidean quadrangle of width at most the input's. When no
/// admissible pair exists the error reports the minimal end margin that
/// would have sufficed, a measured substitute for an a priori constant.
pub fn euclidean_subquadrangle(
    q: &Quadrangle,
    target: &SquareComplex,
    seg_start: usize,
    seg_len: usize,
) -> Result<Quadrangle, EuclidError> {
    let surface = &q.diagram.surface;
    let minus = q.side(SIDE_MINUS);
    let plus = q.side(SIDE_PLUS);
    let m = minus.len();
    assert!(seg_len >= 1 && seg_start + seg_len <= m, "sub-segment out of range");
    let verts = q.side_vertices(SIDE_MINUS);
    let r = width(q);

    let hs = hyperplane::hyperplanes(surface);
    let minus_classes: Vec<usize> = minus.iter().map(|d| hs.class_of(d.edge)).collect();
    let plus_classes: Vec<usize> = plus.iter().map(|d| hs.class_of(d.edge)).collect();
    let crosses_plus = |class: usize| plus_classes.contains(&class);

    let clears = |class: usize, dist: &[u32]| {
        hs.hyperplanes[class].carrier.vertices.iter().all(|v| dist[v.index()] > r)
    };
    let dist_u1 = metric::distances_from(surface, verts[0]);
    let dist_u2 = metric::distances_from(surface, verts[m]);

    let mut cache: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let certify = |i: usize, j: usize| -> Option<Quadrangle> {
        let (w1, w2) = (minus_classes[i], minus_classes[j]);
        // The enclosed region: each cut's inner side is the one holding
        // the other cut's vertex on the lower side.
        let cm_a = surface.dart_head(minus[i]);
        let cm_b = surface.dart_tail(minus[j]);
        let inner = |class: usize, toward: VertexId| -> Option<&Subcomplex> {
            let (pos, neg) = hs.hyperplanes[class].halfspaces.as_ref()?;
            Some(if pos.contains_vertex(toward) { pos } else { neg })
        };
        let (s1, s2) = (inner(w1, cm_b)?, inner(w2, cm_a)?);
        let k = Subcomplex::new(
            surface,
            sorted_intersection(&s1.vertices, &s2.vertices),
            sorted_intersection(&s1.edges, &s2.edges),
            sorted_intersection(&s1.squares, &s2.squares),
        );
        if k.vertices.is_empty() {
            return None;
        }
        let sub = k.extract(surface);
        if !sub.is_connected() {
            return None;
        }
        let rot = restrict_rotations(surface, &q.diagram.rotations, &sub);
        let map = restrict_map(surface, &q.diagram.map, &sub);
        let d_sub = DiscDiagram::new(sub, rot, map, target).ok()?;

        let kept = |d: Dart| -> Option<VertexId> {
            let (t, h) = (surface.dart_tail(d), surface.dart_head(d));
            match (k.contains_vertex(t), k.contains_vertex(h)) {
                (true, false) => Some(t),
                (false, true) => Some(h),
                _ => None,
            }
        };
        let cp_a = kept(plus[plus_classes.iter().position(|&c| c == w1)?])?;
        let cp_b = kept(plus[plus_classes.iter().position(|&c| c == w2)?])?;

        let sid = |v: VertexId| d_sub.surface.vertex_by_name(surface.vertex_name(v));
        let (cp_a, cp_b, cm_a, cm_b) = (sid(cp_a)?, sid(cp_b)?, sid(cm_a)?, sid(cm_b)?);
        let walk = d_sub.boundary();
        let pos_of =
            |v: VertexId| walk.iter().position(|&d| d_sub.surface.dart_tail(d) == v);
        let mut order = [
            (pos_of(cp_a)?, cp_a),
            (pos_of(cp_b)?, cp_b),
            (pos_of(cm_a)?, cm_a),
            (pos_of(cm_b)?, cm_b),
        ];
        order.sort_unstable();
        let upper = [cp_a, cp_b];
        let first = (0..4).find(|&s| {
            upper.contains(&order[s].1) && upper.contains(&order[(s + 1) % 4].1)
        })?;
        let corners = [
            order[first].1,
            order[(first + 1) % 4].1,
            order[(first + 2) % 4].1,
            order[(first + 3) % 4].1,
        ];
        let quad = Quadrangle::from_corners(d_sub, target, corners).ok()?;
        if classify(&quad) != QuadrangleClass::Euclidean || width(&quad) > r {
            return None;
        }
        Some(quad)
    };

    // Candidate cuts for the requested sub-segment, nearest the segment
    // first so the certified region is as small as possible.
    let dist_v1 = metric::distances_from(surface, verts[seg_start]);
    let dist_v2 = metric::distances_from(surface, verts[seg_start + seg_len]);
    let left: Vec<usize> = (0..seg_start)
        .filter(|&i| {
            let c = minus_classes[i];
            crosses_plus(c) && clears(c, &dist_u1) && clears(c, &dist_v1)
        })
        .collect();
    let right: Vec<usize> = (seg_start + seg_len..m)
        .filter(|&j| {
            let c = minus_classes[j];
            crosses_plus(c) && clears(c, &dist_u2) && clears(c, &dist_v2)
        })
        .collect();
    for &i in left.iter().rev() {
        for &j in &right {
            let (w1, w2) = (minus_classes[i], minus_classes[j]);
            if w1 == w2
                || sorted_intersects(
                    &hs.hyperplanes[w1].carrier.vertices,
                    &hs.hyperplanes[w2].carrier.vertices,
                )
            {
                continue;
            }
            if let Some(quad) = certify(i, j) {
                return Ok(quad);
            }
        }
    }

    // Measure the margin that would have sufficed: the least symmetric end
    // distance admitting a certified pair for the segment it leaves.
    for margin in 1..=m.saturating_sub(1) / 2 {
        let dist_a = metric::distances_from(surface, verts[margin]);
        let dist_b = metric::distances_from(surface, verts[m - margin]);
        let left: Vec<usize> = (0..margin)
            .filter(|&i| {
                let c = minus_classes[i];
                crosses_plus(c) && clears(c, &dist_u1) && clears(c, &dist_a)
            })
            .collect();
        let right: Vec<usize> = (m - margin..m)
            .filter(|&j| {
                let c = minus_classes[j];
                crosses_plus(c) && clears(c, &dist_u2) && clears(c, &dist_b)
            })
            .collect();
        for &i in left.iter().rev() {
            for &j in &right {
                let (w1, w2) = (minus_classes[i], minus_classes[j]);
                if w1 == w2
                    || sorted_intersects(
                        &hs.hyperplanes[w1].carrier.vertices,
                        &hs.hyperplanes[w2].carrier.vertices,
                    )
                {
                    continue;
                }
                let ok = *cache
                    .entry((i, j))
                    .or_insert_with(|| certify(i, j).is_some());
                if ok {
                    return Err(EuclidError::NotFound { margin: Some(margin) });
                }
            }
        }
    }
    Err(EuclidError::NotFound { margin: None })
}
