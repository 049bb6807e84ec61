//! Disc diagrams over a target complex: exact curvature in quarter-turn
//! units, the Gauss-Bonnet audit, quadrangle structure with singularity
//! classification, diagram reduction by square cancellation, and minimal
//! filling of null-homotopic loops.

use std::collections::HashMap;

use thiserror::Error;

use crate::complex::{
    canonical_walk, CombinatorialMap, ComplexData, Dart, EdgeId, MapError, SquareComplex,
    SquareId, VertexId,
};
use crate::metric;
use crate::planar::{self, Embedding, PlanarError, Rotations};

/// Default cap on the area searched by [`fill_disc`].
pub const FILL_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("curvature sums to {total} quarter-turns, expected 4")]
    TopologyBug { total: i64 },
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("boundary walk is not an embedded circle")]
    DegenerateBoundary,
    #[error("side lengths {lens:?} do not partition a boundary of length {boundary}")]
    BadSideLengths { lens: [usize; 4], boundary: usize },
    #[error("side {side} of the quadrangle is not geodesic in the {place}")]
    NotGeodesicSide { side: usize, place: &'static str },
    #[error("side {side} does not map bijectively onto its image")]
    SideNotBijective { side: usize },
    #[error("vertex {0} is not on the boundary")]
    NotOnBoundary(String),
    #[error("invalid loop: {0}")]
    BadLoop(String),
    #[error("no filling within {cap} squares")]
    CapExceeded { cap: usize },
}

/// A planar contractible square complex together with a cellular map to a
/// target. The rotation system realizes planarity; the embedding records
/// the traced faces and the outer boundary walk.
#[derive(Debug, Clone)]
pub struct DiscDiagram {
    pub surface: SquareComplex,
    pub rotations: Rotations,
    pub embedding: Embedding,
    pub map: CombinatorialMap,
}

impl DiscDiagram {
    /// Validate a rotation system and cellular map into a diagram.
    pub fn new(
        surface: SquareComplex,
        rotations: Rotations,
        map: CombinatorialMap,
        target: &SquareComplex,
    ) -> Result<Self, DiagramError> {
        map.validate(&surface, target)?;
        let embedding = planar::validate(&surface, &rotations)?;
        Ok(DiscDiagram { surface, rotations, embedding, map })
    }

    /// Assemble a diagram from explicitly oriented faces: one interior-left
    /// walk per square (indexed by square id) plus the outer walk. Used by
    /// the surgery operations, which know the faces they produce.
    pub fn from_faces(
        surface: SquareComplex,
        square_faces: Vec<[Dart; 4]>,
        outer: Vec<Dart>,
        map: CombinatorialMap,
        target: &SquareComplex,
    ) -> Result<Self, DiagramError> {
        map.validate(&surface, target)?;
        if square_faces.len() != surface.square_count() {
            return Err(PlanarError::NotPlanar("one face per square required".into()).into());
        }
        for (i, walk) in square_faces.iter().enumerate() {
            if canonical_walk(*walk) != surface.square_walk(SquareId(i as u32)) {
                return Err(PlanarError::NotPlanar(format!(
                    "face {:?} does not bound square {}",
                    walk,
                    surface.square_name(SquareId(i as u32))
                ))
                .into());
            }
        }
        if !surface.is_connected() {
            return Err(PlanarError::NotPlanar("surface is disconnected".into()).into());
        }
        if surface.vertex_count() == 1 && surface.edge_count() == 0 {
            let embedding = Embedding { faces: vec![vec![]], outer: 0, square_face: vec![] };
            return Ok(DiscDiagram { surface, rotations: vec![vec![]], embedding, map });
        }
        let mut faces: Vec<Vec<Dart>> =
            square_faces.iter().map(|w| w.to_vec()).collect();
        faces.push(outer);
        let rotations = planar::rotations_from_faces(&surface, &faces)?;
        let expected = surface.edge_count() as i64 - surface.vertex_count() as i64 + 2;
        if faces.len() as i64 != expected {
            return Err(PlanarError::NotPlanar(format!(
                "{} faces but Euler's formula needs {}",
                faces.len(),
                expected
            ))
            .into());
        }
        let embedding = Embedding {
            outer: faces.len() - 1,
            square_face: (0..surface.square_count()).collect(),
            faces,
        };
        Ok(DiscDiagram { surface, rotations, embedding, map })
    }

    /// The outer walk as darts of the surface.
    pub fn boundary(&self) -> &[Dart] {
        self.embedding.boundary()
    }

    /// The outer walk pushed to the target.
    pub fn boundary_word(&self, target: &SquareComplex) -> Vec<Dart> {
        self.boundary()
            .iter()
            .map(|&d| self.map.dart(&self.surface, target, d))
            .collect()
    }

    pub fn area(&self) -> usize {
        self.surface.square_count()
    }

    /// Vertices on the outer walk, deduplicated, in id order.
    pub fn boundary_vertices(&self) -> Vec<VertexId> {
        let mut vs: Vec<VertexId> =
            self.boundary().iter().map(|&d| self.surface.dart_tail(d)).collect();
        if vs.is_empty() && self.surface.vertex_count() == 1 {
            vs.push(VertexId(0));
        }
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertices().binary_search(&v).is_ok()
    }
}

/// Curvature of a vertex of any square complex in units of a quarter turn:
/// 4 - 2 chi(link) - (number of square corners). Internal vertices of a
/// diagram have chi(link) = 0, boundary vertices chi(link) = number of
/// boundary visits.
pub fn intrinsic_curvature(x: &SquareComplex, v: VertexId) -> Result<i64, DiagramError> {
    if v.index() >= x.vertex_count() {
        return Err(DiagramError::UnknownVertex(format!("{:?}", v)));
    }
    let link = x.vertex_link(v);
    Ok(4 - 2 * link.chi() - link.corner_count() as i64)
}

pub fn curvature(d: &DiscDiagram, v: VertexId) -> Result<i64, DiagramError> {
    intrinsic_curvature(&d.surface, v)
}

/// Sum of vertex curvatures; 4 quarter-turns for every disc. A different
/// total means the input was not a contractible planar complex.
pub fn gauss_bonnet_total(d: &DiscDiagram) -> Result<i64, DiagramError> {
    intrinsic_total(&d.surface)
}

/// The same audit on a bare complex (no planar data needed): the total is
/// 4 times the Euler characteristic, so 4 certifies disc topology.
pub fn intrinsic_total(x: &SquareComplex) -> Result<i64, DiagramError> {
    let mut total = 0;
    for v in x.vertices() {
        total += intrinsic_curvature(x, v)?;
    }
    if total != 4 {
        return Err(DiagramError::TopologyBug { total });
    }
    Ok(total)
}

/// A diagram whose boundary is split into four sides
/// `P_plus . P_v . P_minus . P_u`, each geodesic in the surface and mapped
/// bijectively onto a geodesic of the target.
#[derive(Debug, Clone)]
pub struct Quadrangle {
    pub diagram: DiscDiagram,
    /// Index into the boundary walk where P_plus begins.
    pub start: usize,
    /// Dart counts of P_plus, P_v, P_minus, P_u in walk order.
    pub side_lens: [usize; 4],
}

pub const SIDE_PLUS: usize = 0;
pub const SIDE_V: usize = 1;
pub const SIDE_MINUS: usize = 2;
pub const SIDE_U: usize = 3;

impl Quadrangle {
    pub fn new(
        diagram: DiscDiagram,
        target: &SquareComplex,
        start: usize,
        side_lens: [usize; 4],
    ) -> Result<Self, DiagramError> {
        // Non-degenerate: the boundary is an embedded circle.
        let mut seen = vec![false; diagram.surface.vertex_count()];
        for &d in diagram.boundary() {
            let v = diagram.surface.dart_tail(d);
            if seen[v.index()] {
                return Err(DiagramError::DegenerateBoundary);
            }
            seen[v.index()] = true;
        }
        let n = diagram.boundary().len();
        if side_lens.iter().sum::<usize>() != n || n == 0 {
            return Err(DiagramError::BadSideLengths { lens: side_lens, boundary: n });
        }
        let q = Quadrangle { diagram, start, side_lens };
        for side in 0..4 {
            q.check_side(side, target)?;
        }
        Ok(q)
    }

    /// Build from the four boundary vertices where the sides meet:
    /// P_plus runs c0 -> c1, P_v c1 -> c2, P_minus c2 -> c3, P_u c3 -> c0.
    pub fn from_corners(
        diagram: DiscDiagram,
        target: &SquareComplex,
        corners: [VertexId; 4],
    ) -> Result<Self, DiagramError> {
        let boundary = diagram.boundary();
        let pos_of = |v: VertexId| -> Result<usize, DiagramError> {
            boundary
                .iter()
                .position(|&d| diagram.surface.dart_tail(d) == v)
                .ok_or_else(|| {
                    DiagramError::NotOnBoundary(diagram.surface.vertex_name(v).to_string())
                })
        };
        let n = boundary.len();
        let p: Vec<usize> =
            corners.iter().map(|&c| pos_of(c)).collect::<Result<_, _>>()?;
        let start = p[0];
        let lens = [
            (p[1] + n - p[0]) % n,
            (p[2] + n - p[1]) % n,
            (p[3] + n - p[2]) % n,
            (p[0] + n - p[3]) % n,
        ];
        Quadrangle::new(diagram, target, start, lens)
    }

    /// Darts of one side, in walk order.
    pub fn side(&self, side: usize) -> Vec<Dart> {
        let boundary = self.diagram.boundary();
        let n = boundary.len();
        let offset: usize = self.side_lens[..side].iter().sum();
        (0..self.side_lens[side])
            .map(|i| boundary[(self.start + offset + i) % n])
            .collect()
    }

    /// Vertices of one side including both endpoints.
    pub fn side_vertices(&self, side: usize) -> Vec<VertexId> {
        let darts = self.side(side);
        let boundary = self.diagram.boundary();
        let n = boundary.len();
        let offset: usize = self.side_lens[..side].iter().sum();
        let first = boundary[(self.start + offset) % n];
        let mut vs = vec![self.diagram.surface.dart_tail(first)];
        for d in darts {
            vs.push(self.diagram.surface.dart_head(d));
        }
        // A zero-length side is the single junction vertex.
        if self.side_lens[side] == 0 {
            vs.truncate(1);
        }
        vs
    }

    fn check_side(&self, side: usize, target: &SquareComplex) -> Result<(), DiagramError> {
        let vs = self.side_vertices(side);
        if vs.len() < 2 {
            return Ok(());
        }
        let (a, b) = (vs[0], *vs.last().unwrap());
        let len = (vs.len() - 1) as u32;
        let d_surface = metric::distance_l1(&self.diagram.surface, a, b)
            .map_err(|_| DiagramError::NotGeodesicSide { side, place: "surface" })?;
        if d_surface != len {
            return Err(DiagramError::NotGeodesicSide { side, place: "surface" });
        }
        let image: Vec<VertexId> = vs.iter().map(|&v| self.diagram.map.vertex(v)).collect();
        let mut sorted = image.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != image.len() {
            return Err(DiagramError::SideNotBijective { side });
        }
        let d_target = metric::distance_l1(target, image[0], *image.last().unwrap())
            .map_err(|_| DiagramError::NotGeodesicSide { side, place: "target" })?;
        if d_target != len {
            return Err(DiagramError::NotGeodesicSide { side, place: "target" });
        }
        Ok(())
    }

    /// Interior vertices of a side (endpoints dropped).
    pub fn side_interior(&self, side: usize) -> Vec<VertexId> {
        let mut vs = self.side_vertices(side);
        if vs.len() <= 2 {
            return Vec::new();
        }
        vs.pop();
        vs.remove(0);
        vs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    InternalNegative,
    DeepCorner,
    ConsecutivePair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Singularity {
    pub kind: SingularityKind,
    /// One vertex, or the two corners of a consecutive pair.
    pub vertices: Vec<VertexId>,
    /// True when the pair comes from a run of three or more consecutive
    /// -1 corners; such runs are counted as (run length - 1) pairs.
    pub overlapping_run: bool,
}

/// All singularities of a quadrangle: internal vertices of negative
/// curvature, corners of curvature at most -2 units, and pairs of
/// consecutive -1 corners in the interior of P_plus or P_minus
/// ("consecutive" meaning adjacent in the corner sequence; flat vertices
/// may lie between them).
pub fn singularities(q: &Quadrangle) -> Vec<Singularity> {
    let d = &q.diagram;
    let mut out = Vec::new();
    let boundary_set = d.boundary_vertices();
    for v in d.surface.vertices() {
        if boundary_set.binary_search(&v).is_err() {
            let k = curvature(d, v).expect("vertex exists");
            if k < 0 {
                out.push(Singularity {
                    kind: SingularityKind::InternalNegative,
                    vertices: vec![v],
                    overlapping_run: false,
                });
            }
        }
    }
    for &v in &boundary_set {
        let k = curvature(d, v).expect("vertex exists");
        if k <= -2 {
            out.push(Singularity {
                kind: SingularityKind::DeepCorner,
                vertices: vec![v],
                overlapping_run: false,
            });
        }
    }
    for side in [SIDE_PLUS, SIDE_MINUS] {
        let corners: Vec<(VertexId, i64)> = q
            .side_interior(side)
            .into_iter()
            .map(|v| (v, curvature(d, v).expect("vertex exists")))
            .filter(|&(_, k)| k != 0)
            .collect();
        let mut run = 0usize;
        for i in 0..=corners.len() {
            if i < corners.len() && corners[i].1 == -1 {
                run += 1;
            } else {
                if run >= 2 {
                    let first = i - run;
                    for j in first..i - 1 {
                        out.push(Singularity {
                            kind: SingularityKind::ConsecutivePair,
                            vertices: vec![corners[j].0, corners[j + 1].0],
                            overlapping_run: run >= 3,
                        });
                    }
                }
                run = 0;
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadrangleClass {
    Singular,
    AlmostEuclidean,
    Euclidean,
}

/// AlmostEuclidean iff no singularities; Euclidean iff additionally the
/// cyclic corner sequence of the whole boundary has no two consecutive
/// -1 corners.
pub fn classify(q: &Quadrangle) -> QuadrangleClass {
    if !singularities(q).is_empty() {
        return QuadrangleClass::Singular;
    }
    let d = &q.diagram;
    let boundary = d.boundary();
    let corners: Vec<i64> = boundary
        .iter()
        .map(|&dart| curvature(d, d.surface.dart_tail(dart)).expect("vertex exists"))
        .filter(|&k| k != 0)
        .collect();
    let n = corners.len();
    for i in 0..n {
        if corners[i] == -1 && corners[(i + 1) % n] == -1 {
            return QuadrangleClass::AlmostEuclidean;
        }
    }
    QuadrangleClass::Euclidean
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub count: usize,
    pub within_bound: bool,
    pub singularities: Vec<Singularity>,
}

/// Check the at-most-4-singularities bound; a violation report falsifies
/// the input (non-reduced map or non-CAT(0) target).
pub fn singularity_bound_check(q: &Quadrangle) -> BoundReport {
    let singularities = singularities(q);
    BoundReport { count: singularities.len(), within_bound: singularities.len() <= 4, singularities }
}

/// Hausdorff distance between P_minus and P_plus in the surface metric.
pub fn width(q: &Quadrangle) -> u32 {
    let a = q.side_vertices(SIDE_PLUS);
    let b = q.side_vertices(SIDE_MINUS);
    let one_way = |from: &[VertexId], to: &[VertexId]| -> u32 {
        from.iter()
            .map(|&v| {
                let dist = metric::distances_from(&q.diagram.surface, v);
                to.iter().map(|&w| dist[w.index()]).min().unwrap()
            })
            .max()
            .unwrap()
    };
    one_way(&a, &b).max(one_way(&b, &a))
}

/// Cancel edge-adjacent square pairs with a common image until the map is
/// reduced. The boundary path and its image are preserved; Gauss-Bonnet is
/// re-audited after every cancellation.
pub fn reduce_diagram(d: &DiscDiagram, target: &SquareComplex) -> DiscDiagram {
    let mut current = d.clone();
    loop {
        let pair = find_foldable_pair(&current);
        let Some((e, s1, s2)) = pair else {
            return current;
        };
        current = cancel_pair(&current, target, e, s1, s2);
        gauss_bonnet_total(&current).expect("cancellation preserves disc topology");
    }
}

fn find_foldable_pair(d: &DiscDiagram) -> Option<(EdgeId, SquareId, SquareId)> {
    for e in d.surface.edge_ids() {
        let squares = d.surface.squares_on_edge(e);
        for (i, &s1) in squares.iter().enumerate() {
            for &s2 in &squares[i + 1..] {
                if d.map.square(s1) == d.map.square(s2) {
                    return Some((e, s1, s2));
                }
            }
        }
    }
    None
}

/// Union-find over edges tracking relative orientation: `flip` records
/// whether a member's forward direction disagrees with its root's.
struct OrientedUnionFind {
    parent: Vec<usize>,
    flip: Vec<bool>,
}

impl OrientedUnionFind {
    fn new(n: usize) -> Self {
        OrientedUnionFind { parent: (0..n).collect(), flip: vec![false; n] }
    }

    /// (root, flipped relative to root)
    fn find(&mut self, a: usize) -> (usize, bool) {
        if self.parent[a] == a {
            return (a, self.flip[a]);
        }
        let (root, parent_flip) = self.find(self.parent[a]);
        self.parent[a] = root;
        self.flip[a] ^= parent_flip;
        (root, self.flip[a])
    }

    /// Identify a and b with relative orientation `flipped`.
    fn union(&mut self, a: usize, b: usize, flipped: bool) {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            assert_eq!(fa ^ fb, flipped, "edge identified with its own reverse");
            return;
        }
        let (keep, merge, rel) = if ra < rb { (ra, rb, fa ^ fb ^ flipped) } else { (rb, ra, fa ^ fb ^ flipped) };
        self.parent[merge] = keep;
        self.flip[merge] = rel;
    }
}

struct PlainUnionFind {
    parent: Vec<usize>,
}

impl PlainUnionFind {
    fn new(n: usize) -> Self {
        PlainUnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, a: usize) -> usize {
        if self.parent[a] == a {
            return a;
        }
        let root = self.find(self.parent[a]);
        self.parent[a] = root;
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Remove squares s1, s2 (equal images) and their shared edge, then zip
/// the hexagonal hole shut by folding the two remaining three-edge arcs
/// onto each other. The fold is forced: both arcs map onto the same walk
/// around the image square.
fn cancel_pair(
    d: &DiscDiagram,
    target: &SquareComplex,
    e: EdgeId,
    s1: SquareId,
    s2: SquareId,
) -> DiscDiagram {
    let surface = &d.surface;
    let w1 = d.embedding.square_walk(s1);
    let w2 = d.embedding.square_walk(s2);
    let i1 = w1.iter().position(|dart| dart.edge == e).expect("shared edge in s1");
    let i2 = w2.iter().position(|dart| dart.edge == e).expect("shared edge in s2");
    // The two faces see the shared edge from opposite sides.
    assert_eq!(w2[i2], w1[i1].reversed(), "faces disagree across the shared edge");
    let a: Vec<Dart> = (1..4).map(|k| w1[(i1 + k) % 4]).collect();
    let b: Vec<Dart> = (1..4).map(|k| w2[(i2 + k) % 4]).collect();

    let mut edges = OrientedUnionFind::new(surface.edge_count());
    let mut verts = PlainUnionFind::new(surface.vertex_count());
    for k in 0..3 {
        // a[k] folds onto the reverse of b[2-k]; both map to the same
        // dart of the image square, so the quotient map is well defined.
        let x = a[k];
        let y = b[2 - k].reversed();
        assert_eq!(
            d.map.dart(surface, target, x),
            d.map.dart(surface, target, y),
            "folded darts must share an image"
        );
        edges.union(x.edge.index(), y.edge.index(), x.forward != y.forward);
        verts.union(surface.dart_tail(x).index(), surface.dart_tail(y).index());
        verts.union(surface.dart_head(x).index(), surface.dart_head(y).index());
    }

    // Surviving cells keep their original names; merged cells take the
    // representative's name.
    let vertex_rep = |v: VertexId, verts: &mut PlainUnionFind| VertexId(verts.find(v.index()) as u32);
    let dart_rep = |dart: Dart, edges: &mut OrientedUnionFind| {
        let (root, flipped) = edges.find(dart.edge.index());
        Dart::new(EdgeId(root as u32), dart.forward != flipped)
    };

    let mut keep_vertices: Vec<VertexId> = Vec::new();
    for v in surface.vertices() {
        if verts.find(v.index()) == v.index() {
            keep_vertices.push(v);
        }
    }
    let mut keep_edges: Vec<EdgeId> = Vec::new();
    for ed in surface.edge_ids() {
        if ed == e {
            continue;
        }
        let (root, _) = edges.find(ed.index());
        if root == ed.index() {
            keep_edges.push(ed);
        }
    }
    let keep_squares: Vec<SquareId> =
        surface.square_ids().filter(|&s| s != s1 && s != s2).collect();

    let vertex_names: Vec<String> =
        keep_vertices.iter().map(|&v| surface.vertex_name(v).to_string()).collect();
    let edge_list: Vec<(String, String, String)> = keep_edges
        .iter()
        .map(|&ed| {
            let [va, vb] = surface.endpoints(ed);
            (
                surface.edge_name(ed).to_string(),
                surface.vertex_name(vertex_rep(va, &mut verts)).to_string(),
                surface.vertex_name(vertex_rep(vb, &mut verts)).to_string(),
            )
        })
        .collect();
    let square_list: Vec<(String, [(String, bool); 4])> = keep_squares
        .iter()
        .map(|&s| {
            let walk = d.embedding.square_walk(s);
            let named = walk.map(|dart| {
                let rep = dart_rep(dart, &mut edges);
                (surface.edge_name(rep.edge).to_string(), rep.forward)
            });
            (surface.square_name(s).to_string(), named)
        })
        .collect();
    let new_surface = SquareComplex::build(ComplexData {
        vertices: vertex_names,
        edges: edge_list,
        squares: square_list,
    })
    .expect("cancellation yields a valid complex");

    // Rebuild the cellular map on representatives; identified cells have
    // equal images by construction of the fold.
    let by_name_v = |v: VertexId| new_surface.vertex_by_name(surface.vertex_name(v)).unwrap();
    let by_name_e = |ed: EdgeId| new_surface.edge_by_name(surface.edge_name(ed)).unwrap();
    let by_name_s = |s: SquareId| new_surface.square_by_name(surface.square_name(s)).unwrap();
    let mut vertex_map = vec![VertexId(0); new_surface.vertex_count()];
    for &v in &keep_vertices {
        vertex_map[by_name_v(v).index()] = d.map.vertex(v);
    }
    for v in surface.vertices() {
        let rep = vertex_rep(v, &mut verts);
        assert_eq!(d.map.vertex(v), d.map.vertex(rep), "fold merges vertices with equal image");
    }
    let mut edge_map = vec![EdgeId(0); new_surface.edge_count()];
    for &ed in &keep_edges {
        edge_map[by_name_e(ed).index()] = d.map.edge(ed);
    }
    let mut square_map = vec![SquareId(0); new_surface.square_count()];
    for &s in &keep_squares {
        square_map[by_name_s(s).index()] = d.map.square(s);
    }
    let map = CombinatorialMap { vertex_map, edge_map, square_map };

    let remap_dart = |dart: Dart, edges: &mut OrientedUnionFind| {
        let rep = dart_rep(dart, edges);
        Dart::new(by_name_e(rep.edge), rep.forward)
    };
    let square_faces: Vec<[Dart; 4]> = {
        // New square ids follow keep_squares order.
        keep_squares
            .iter()
            .map(|&s| d.embedding.square_walk(s).map(|dart| remap_dart(dart, &mut edges)))
            .collect()
    };
    let outer: Vec<Dart> =
        d.boundary().iter().map(|&dart| remap_dart(dart, &mut edges)).collect();

    DiscDiagram::from_faces(new_surface, square_faces, outer, map, target)
        .expect("cancellation preserves planarity")
}

#[derive(Debug, Clone)]
enum FillMove {
    /// Delete word positions (pos, pos+1) holding (d, reverse d).
    Spur { pos: usize, dart: Dart },
    /// Replace (a1, a2) at (pos, pos+1) by (reverse a4, reverse a3), using
    /// up one copy of `square`; `walk` is the aligned target walk a1..a4.
    Corner { pos: usize, square: SquareId, walk: [Dart; 4] },
}

fn splice_spur_delete<T: Clone>(w: &[T], pos: usize) -> Vec<T> {
    let n = w.len();
    if pos + 1 < n {
        let mut out = w.to_vec();
        out.drain(pos..=pos + 1);
        out
    } else {
        // Wraps: drop the last and first entries.
        w[1..n - 1].to_vec()
    }
}

fn splice_spur_insert<T: Clone>(w: &[T], pos: usize, first: T, second: T) -> Vec<T> {
    let n = w.len() + 2;
    if pos + 1 < n {
        let mut out = w.to_vec();
        out.insert(pos, second);
        out.insert(pos, first);
        out
    } else {
        let mut out = vec![second];
        out.extend_from_slice(w);
        out.push(first);
        out
    }
}

fn splice_replace2<T: Clone>(w: &[T], pos: usize, first: T, second: T) -> Vec<T> {
    let mut out = w.to_vec();
    let n = out.len();
    out[pos] = first;
    out[(pos + 1) % n] = second;
    out
}

fn min_rotation(w: &[Dart]) -> Vec<Dart> {
    if w.is_empty() {
        return Vec::new();
    }
    let n = w.len();
    let mut best = 0;
    for k in 1..n {
        for i in 0..n {
            let (a, b) = (w[(k + i) % n], w[(best + i) % n]);
            if a < b {
                best = k;
                break;
            }
            if a > b {
                break;
            }
        }
    }
    (0..n).map(|i| w[(best + i) % n]).collect()
}

fn first_spur(w: &[Dart]) -> Option<usize> {
    let n = w.len();
    (0..n).find(|&p| w[(p + 1) % n] == w[p].reversed())
}

/// Align square s's boundary so it starts with consecutive darts (d1, d2).
pub(crate) fn aligned_square_walk(x: &SquareComplex, s: SquareId, d1: Dart, d2: Dart) -> [Dart; 4] {
    let w = x.square_walk(s);
    for r in 0..4 {
        let rot = [w[r], w[(r + 1) % 4], w[(r + 2) % 4], w[(r + 3) % 4]];
        if rot[0] == d1 && rot[1] == d2 {
            return rot;
        }
        let rev = [
            rot[3].reversed(),
            rot[2].reversed(),
            rot[1].reversed(),
            rot[0].reversed(),
        ];
        if rev[0] == d1 && rev[1] == d2 {
            return rev;
        }
    }
    panic!("square does not contain the corner");
}

/// Minimal-area reduced filling of a non-backtracking null-homotopic loop,
/// by iterative deepening over the area. Moves: free spur deletion and
/// corner replacement across a square of the target. A positively curved
/// boundary corner or spur always exists, so the move set is complete.
pub fn fill_disc(
    x: &SquareComplex,
    loop_darts: &[Dart],
    cap: usize,
) -> Result<DiscDiagram, DiagramError> {
    if loop_darts.is_empty() {
        return Err(DiagramError::BadLoop("empty loop".to_string()));
    }
    let n = loop_darts.len();
    for i in 0..n {
        let d = loop_darts[i];
        if d.edge.index() >= x.edge_count() {
            return Err(DiagramError::BadLoop(format!("dart {:?} not in complex", d)));
        }
        let next = loop_darts[(i + 1) % n];
        if x.dart_head(d) != x.dart_tail(next) {
            return Err(DiagramError::BadLoop(format!("walk breaks at position {}", i)));
        }
        if next == d.reversed() {
            return Err(DiagramError::BadLoop(format!("backtracks at position {}", i)));
        }
    }

    let mut memo: HashMap<Vec<Dart>, usize> = HashMap::new();
    for budget in 0..=cap {
        let mut moves = Vec::new();
        if search_fill(x, loop_darts, budget, &mut memo, &mut moves) {
            return Ok(replay_fill(x, loop_darts, &moves));
        }
    }
    Err(DiagramError::CapExceeded { cap })
}

fn search_fill(
    x: &SquareComplex,
    w: &[Dart],
    budget: usize,
    memo: &mut HashMap<Vec<Dart>, usize>,
    moves: &mut Vec<FillMove>,
) -> bool {
    if w.is_empty() {
        return true;
    }
    if let Some(p) = first_spur(w) {
        moves.push(FillMove::Spur { pos: p, dart: w[p] });
        let rest = splice_spur_delete(w, p);
        if search_fill(x, &rest, budget, memo, moves) {
            return true;
        }
        moves.pop();
        return false;
    }
    if budget == 0 {
        return false;
    }
    let key = min_rotation(w);
    if let Some(&failed) = memo.get(&key) {
        if failed >= budget {
            return false;
        }
    }
    let n = w.len();
    for p in 0..n {
        let d1 = w[p];
        let d2 = w[(p + 1) % n];
        for s in x.corner_squares(d1, d2) {
            let walk = aligned_square_walk(x, s, d1, d2);
            let next = splice_replace2(w, p, walk[3].reversed(), walk[2].reversed());
            moves.push(FillMove::Corner { pos: p, square: s, walk });
            if search_fill(x, &next, budget - 1, memo, moves) {
                return true;
            }
            moves.pop();
        }
    }
    memo.insert(key, budget);
    false
}

/// Rebuild the diagram by replaying the move list backwards: start from the
/// final (empty) state and reverse each move, growing the surface.
fn replay_fill(x: &SquareComplex, input: &[Dart], moves: &[FillMove]) -> DiscDiagram {
    // Growing surface: cells carry their target images.
    let mut vert_images: Vec<VertexId> = Vec::new();
    let mut edge_cells: Vec<([usize; 2], EdgeId)> = Vec::new();
    let mut square_cells: Vec<([Dart; 4], SquareId)> = Vec::new();
    // Boundary darts over local edge indices, aligned with the word.
    let mut boundary: Vec<Dart> = Vec::new();

    // The word empties through a final spur deletion; the replay grows
    // everything from that spur's base vertex.
    let seed_vertex = match moves.last().expect("fill of a nonempty word uses moves") {
        FillMove::Spur { dart, .. } => x.dart_tail(*dart),
        FillMove::Corner { .. } => unreachable!("corner moves preserve word length"),
    };
    vert_images.push(seed_vertex);

    let local_tail = |d: Dart, edges: &[([usize; 2], EdgeId)]| -> usize {
        let [a, b] = edges[d.edge.index()].0;
        if d.forward {
            a
        } else {
            b
        }
    };
    let local_head =
        |d: Dart, edges: &[([usize; 2], EdgeId)]| -> usize { local_tail(d.reversed(), edges) };

    for mv in moves.iter().rev() {
        match *mv {
            FillMove::Spur { pos, dart } => {
                // Insert a pendant edge at the boundary vertex at `pos`.
                let v = if boundary.is_empty() {
                    0
                } else if pos < boundary.len() {
                    local_tail(boundary[pos], &edge_cells)
                } else {
                    local_head(boundary[boundary.len() - 1], &edge_cells)
                };
                debug_assert_eq!(vert_images[v], x.dart_tail(dart));
                let z = vert_images.len();
                vert_images.push(x.dart_head(dart));
                let g = edge_cells.len();
                edge_cells.push(([v, z], dart.edge));
                let out_dart = Dart::new(EdgeId(g as u32), true);
                boundary = splice_spur_insert(&boundary, pos, out_dart, out_dart.reversed());
            }
            FillMove::Corner { pos, square, walk } => {
                let n = boundary.len();
                let bp = boundary[pos];
                let bq = boundary[(pos + 1) % n];
                let u = local_tail(bp, &edge_cells);
                let wv = local_head(bq, &edge_cells);
                debug_assert_eq!(vert_images[u], x.dart_tail(walk[0]));
                debug_assert_eq!(vert_images[wv], x.dart_head(walk[1]));
                let z = vert_images.len();
                vert_images.push(x.dart_head(walk[0]));
                let g1 = edge_cells.len();
                edge_cells.push(([u, z], walk[0].edge));
                let g2 = edge_cells.len();
                edge_cells.push(([z, wv], walk[1].edge));
                let g1_dart = Dart::new(EdgeId(g1 as u32), true);
                let g2_dart = Dart::new(EdgeId(g2 as u32), true);
                // Interior-left walk of the new square: z -> u -> m -> w -> z.
                square_cells.push(([g1_dart.reversed(), bp, bq, g2_dart.reversed()], square));
                boundary = splice_replace2(&boundary, pos, g1_dart, g2_dart);
            }
        }
    }

    let data = ComplexData {
        vertices: (0..vert_images.len()).map(|i| format!("d{}", i)).collect(),
        edges: edge_cells
            .iter()
            .enumerate()
            .map(|(i, ([a, b], _))| (format!("g{}", i), format!("d{}", a), format!("d{}", b)))
            .collect(),
        squares: square_cells
            .iter()
            .enumerate()
            .map(|(i, (walk, _))| {
                (
                    format!("q{}", i),
                    walk.map(|d| (format!("g{}", d.edge.index()), d.forward)),
                )
            })
            .collect(),
    };
    let surface = SquareComplex::build(data).expect("filling yields a valid complex");
    let map = CombinatorialMap {
        vertex_map: vert_images,
        edge_map: edge_cells.iter().map(|&(_, e)| e).collect(),
        square_map: square_cells.iter().map(|&(_, s)| s).collect(),
    };
    let square_faces: Vec<[Dart; 4]> = square_cells.iter().map(|&(walk, _)| walk).collect();
    let diagram = DiscDiagram::from_faces(surface, square_faces, boundary, map, x)
        .expect("filling yields a planar diagram");
    let word = diagram.boundary_word(x);
    assert_eq!(word, input, "filling boundary must reproduce the loop");
    assert!(
        crate::complex::is_reduced(&diagram.surface, &diagram.map).is_ok(),
        "minimal filling must be reduced"
    );
    diagram
}

/// Convenience: a complex of unit cells regarded as a diagram over itself.
pub fn diagram_over_self(cells: &[(i64, i64)]) -> (DiscDiagram, SquareComplex) {
    let target = crate::shapes::from_cells_complex(cells);
    let surface = target.clone();
    let rotations = planar::rotations_from_coords(&surface).expect("grid names");
    let map = CombinatorialMap::identity(&surface);
    let d = DiscDiagram::new(surface, rotations, map, &target).expect("cells form a disc");
    (d, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::is_reduced;
    use crate::shapes;

    fn grid_cells(w: i64, h: i64) -> Vec<(i64, i64)> {
        let mut cells = Vec::new();
        for cx in 0..w {
            for cy in 0..h {
                cells.push((cx, cy));
            }
        }
        cells
    }

    #[test]
    fn curvature_values() {
        let (d, _) = diagram_over_self(&grid_cells(2, 2));
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        assert_eq!(curvature(&d, v("0_0")).unwrap(), 1);
        assert_eq!(curvature(&d, v("1_0")).unwrap(), 0);
        assert_eq!(curvature(&d, v("1_1")).unwrap(), 0);
        let (d, _) = diagram_over_self(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(curvature(&d, d.surface.vertex_by_name("1_1").unwrap()).unwrap(), -1);
    }

    #[test]
    fn unknown_vertex_is_rejected() {
        let (d, _) = diagram_over_self(&[(0, 0)]);
        assert!(matches!(
            curvature(&d, VertexId(99)),
            Err(DiagramError::UnknownVertex(_))
        ));
    }

    #[test]
    fn gauss_bonnet_examples() {
        for cells in [
            grid_cells(1, 1),
            grid_cells(2, 2),
            vec![(0, 0), (1, 0), (1, 1)],
            vec![(0, 0), (1, 1)],
        ] {
            let (d, _) = diagram_over_self(&cells);
            assert_eq!(gauss_bonnet_total(&d).unwrap(), 4);
        }
    }

    #[test]
    fn topology_bug_on_annulus_like_total() {
        // A complex with Euler characteristic 0 fails the intrinsic audit.
        let x = shapes::from_cells_complex(&grid_cells(3, 3));
        let hole = x.vertex_by_name("1_1").unwrap();
        let vertices: Vec<VertexId> = x.vertices().filter(|&v| v != hole).collect();
        let ring = crate::complex::Subcomplex::full(&x, &vertices).extract(&x);
        assert!(matches!(
            intrinsic_total(&ring),
            Err(DiagramError::TopologyBug { total: 0 })
        ));
    }

    #[test]
    fn grid_quadrangle_is_euclidean() {
        let (d, x) = diagram_over_self(&grid_cells(3, 2));
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_2"), v("3_2"), v("3_0"), v("0_0")];
        let q = Quadrangle::from_corners(d, &x, corners).unwrap();
        assert!(singularities(&q).is_empty());
        assert_eq!(classify(&q), QuadrangleClass::Euclidean);
        assert_eq!(width(&q), 2);
        let report = singularity_bound_check(&q);
        assert!(report.within_bound);
        assert_eq!(report.count, 0);
    }

    #[test]
    fn single_square_quadrangle_width() {
        let (d, x) = diagram_over_self(&grid_cells(1, 1));
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_0"), v("0_1"), v("1_1"), v("1_0")];
        let q = Quadrangle::from_corners(d, &x, corners).unwrap();
        assert_eq!(width(&q), 1);
        assert_eq!(classify(&q), QuadrangleClass::Euclidean);
    }

    #[test]
    fn u_shape_has_consecutive_pair() {
        // Arms of the U pinch the upper side: its interior carries two
        // 3-square corners in a row.
        let (d, x) = diagram_over_self(&[(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)]);
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_2"), v("3_2"), v("3_0"), v("0_0")];
        let q = Quadrangle::from_corners(d, &x, corners).unwrap();
        let sings = singularities(&q);
        assert_eq!(sings.len(), 1);
        assert_eq!(sings[0].kind, SingularityKind::ConsecutivePair);
        assert!(!sings[0].overlapping_run);
        assert_eq!(classify(&q), QuadrangleClass::Singular);
        let report = singularity_bound_check(&q);
        assert!(report.within_bound);
    }

    #[test]
    fn rotated_u_quadrangle_is_almost_euclidean() {
        // Same U, but the pinched zigzag is P_v: its -1 pair is not a
        // singularity, yet it blocks the Euclidean classification.
        let (d, x) = diagram_over_self(&[(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)]);
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_0"), v("0_2"), v("3_2"), v("3_0")];
        let q = Quadrangle::from_corners(d, &x, corners).unwrap();
        assert!(singularities(&q).is_empty());
        assert_eq!(classify(&q), QuadrangleClass::AlmostEuclidean);
    }

    #[test]
    fn l_quadrangle_width() {
        // Three squares in an L with four sides of length 2. The lone -1
        // corner sits where two sides meet, so nothing is singular and no
        // two -1 corners are adjacent.
        let (d, x) = diagram_over_self(&[(0, 0), (1, 0), (1, 1)]);
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_0"), v("1_1"), v("2_2"), v("2_0")];
        let q = Quadrangle::from_corners(d, &x, corners).unwrap();
        assert!(singularities(&q).is_empty());
        assert_eq!(classify(&q), QuadrangleClass::Euclidean);
        assert_eq!(width(&q), 2);
    }

    #[test]
    fn degenerate_boundary_is_rejected() {
        let (d, x) = diagram_over_self(&[(0, 0), (1, 1)]);
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("0_1"), v("2_2"), v("2_1"), v("0_0")];
        let err = Quadrangle::from_corners(d, &x, corners);
        assert!(matches!(err, Err(DiagramError::DegenerateBoundary)));
    }

    #[test]
    fn non_geodesic_side_is_rejected() {
        let (d, x) = diagram_over_self(&grid_cells(2, 2));
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        // P_plus wraps two convex corners: 5 boundary darts against
        // distance 3.
        let corners = [v("0_0"), v("2_1"), v("2_0"), v("1_0")];
        let err = Quadrangle::from_corners(d, &x, corners);
        assert!(matches!(
            err,
            Err(DiagramError::NotGeodesicSide { side: 0, place: "surface" })
        ));
    }

    #[test]
    fn internal_negative_vertex_is_detected() {
        // Five squares fanned around one internal vertex: curvature -1.
        let mut vertices = vec!["c".to_string()];
        let mut edges = Vec::new();
        let mut squares = Vec::new();
        let n = 5u32;
        for i in 0..n {
            vertices.push(format!("x{}", i));
            vertices.push(format!("y{}", i));
        }
        for i in 0..n {
            edges.push((format!("sp{}", i), "c".to_string(), format!("x{}", i)));
            edges.push((format!("u{}", i), format!("x{}", i), format!("y{}", i)));
            edges.push((format!("w{}", i), format!("y{}", i), format!("x{}", (i + 1) % n)));
        }
        for i in 0..n {
            squares.push((
                format!("s{}", i),
                [
                    (format!("sp{}", i), true),
                    (format!("u{}", i), true),
                    (format!("w{}", i), true),
                    (format!("sp{}", (i + 1) % n), false),
                ],
            ));
        }
        let surface = SquareComplex::build(ComplexData { vertices, edges, squares }).unwrap();
        let square_faces: Vec<[Dart; 4]> = surface
            .square_ids()
            .map(|s| {
                let i = s.index() as u32;
                let e = |name: String| surface.edge_by_name(&name).unwrap();
                [
                    Dart::new(e(format!("sp{}", i)), true),
                    Dart::new(e(format!("u{}", i)), true),
                    Dart::new(e(format!("w{}", i)), true),
                    Dart::new(e(format!("sp{}", (i + 1) % n)), false),
                ]
            })
            .collect();
        // Outer walk: the unused dart at each rim vertex, clockwise.
        let mut outer = Vec::new();
        for i in (0..n).rev() {
            let e = |name: String| surface.edge_by_name(&name).unwrap();
            outer.push(Dart::new(e(format!("w{}", i)), false));
            outer.push(Dart::new(e(format!("u{}", i)), false));
        }
        let map = CombinatorialMap::identity(&surface);
        let target = surface.clone();
        let d = DiscDiagram::from_faces(surface, square_faces, outer, map, &target).unwrap();
        assert_eq!(gauss_bonnet_total(&d).unwrap(), 4);
        let c = d.surface.vertex_by_name("c").unwrap();
        assert_eq!(curvature(&d, c).unwrap(), -1);
        // Boundary runs x0, y4, x4, y3, x3, ... clockwise; pick corners in
        // that order so each side is geodesic.
        let v = |name: &str| d.surface.vertex_by_name(name).unwrap();
        let corners = [v("x0"), v("y3"), v("x3"), v("y1")];
        let q = Quadrangle::from_corners(d.clone(), &target, corners).unwrap();
        let sings = singularities(&q);
        assert!(sings
            .iter()
            .any(|s| s.kind == SingularityKind::InternalNegative && s.vertices == vec![c]));
        assert!(singularity_bound_check(&q).within_bound);
    }

    #[test]
    fn reduce_keeps_reduced_diagram() {
        let (d, x) = diagram_over_self(&grid_cells(2, 2));
        let r = reduce_diagram(&d, &x);
        assert_eq!(r.area(), 4);
        assert_eq!(r.boundary_word(&x), d.boundary_word(&x));
    }

    #[test]
    fn two_square_fold_cancels_to_tree() {
        let (strip, square, map) = shapes::folded_pair();
        let rotations = planar::rotations_from_coords(&strip).unwrap();
        let d = DiscDiagram::new(strip, rotations, map, &square).unwrap();
        let word = d.boundary_word(&square);
        let r = reduce_diagram(&d, &square);
        assert_eq!(r.area(), 0);
        assert_eq!(r.surface.edge_count(), 3);
        assert_eq!(r.boundary_word(&square), word);
        assert!(is_reduced(&r.surface, &r.map).is_ok());
        assert_eq!(gauss_bonnet_total(&r).unwrap(), 4);
    }

    #[test]
    fn four_square_diagram_with_one_fold_reduces_to_two() {
        // Surface: cells (0,0),(1,0) side by side plus (0,1),(0,2) above
        // the left one; target: 1x3 vertical strip; the map folds x=2
        // onto x=0, cancelling exactly the bottom pair.
        let surface = shapes::from_cells_complex(&[(0, 0), (1, 0), (0, 1), (0, 2)]);
        let target = shapes::from_cells_complex(&[(0, 0), (0, 1), (0, 2)]);
        let fold = |name: &str| -> String {
            let (prefix, coords) = match name.chars().next().unwrap() {
                'h' | 'v' | 'c' => (&name[..1], &name[1..]),
                _ => ("", name),
            };
            let (cx, cy) = coords.split_once('_').unwrap();
            let cx: i64 = cx.parse().unwrap();
            let fx = match prefix {
                "" | "v" => {
                    if cx == 2 {
                        0
                    } else {
                        cx
                    }
                }
                _ => {
                    if cx == 1 {
                        0
                    } else {
                        cx
                    }
                }
            };
            format!("{}{}_{}", prefix, fx, cy)
        };
        let map = CombinatorialMap {
            vertex_map: surface
                .vertices()
                .map(|v| target.vertex_by_name(&fold(surface.vertex_name(v))).unwrap())
                .collect(),
            edge_map: surface
                .edge_ids()
                .map(|e| target.edge_by_name(&fold(surface.edge_name(e))).unwrap())
                .collect(),
            square_map: surface
                .square_ids()
                .map(|s| target.square_by_name(&fold(surface.square_name(s))).unwrap())
                .collect(),
        };
        let rotations = planar::rotations_from_coords(&surface).unwrap();
        let d = DiscDiagram::new(surface, rotations, map, &target).unwrap();
        assert!(is_reduced(&d.surface, &d.map).is_err());
        let word = d.boundary_word(&target);
        let r = reduce_diagram(&d, &target);
        assert_eq!(r.area(), 2);
        assert!(is_reduced(&r.surface, &r.map).is_ok());
        assert_eq!(gauss_bonnet_total(&r).unwrap(), 4);
        assert_eq!(r.boundary_word(&target), word);
    }

    fn loop_from_names(x: &SquareComplex, stops: &[&str]) -> Vec<Dart> {
        let mut darts = Vec::new();
        for k in 0..stops.len() {
            let a = x.vertex_by_name(stops[k]).unwrap();
            let b = x.vertex_by_name(stops[(k + 1) % stops.len()]).unwrap();
            let dart = x
                .darts_at(a)
                .iter()
                .copied()
                .find(|&d| x.dart_head(d) == b)
                .expect("adjacent stops");
            darts.push(dart);
        }
        darts
    }

    #[test]
    fn fill_square_boundary() {
        let x = shapes::grid(3, 3);
        let walk = loop_from_names(&x, &["1_1", "2_1", "2_2", "1_2"]);
        let d = fill_disc(&x, &walk, FILL_CAP).unwrap();
        assert_eq!(d.area(), 1);
        assert_eq!(d.boundary_word(&x), walk);
    }

    #[test]
    fn fill_grid_boundary() {
        let x = shapes::grid(2, 2);
        let walk = loop_from_names(
            &x,
            &["0_0", "1_0", "2_0", "2_1", "2_2", "1_2", "0_2", "0_1"],
        );
        let d = fill_disc(&x, &walk, FILL_CAP).unwrap();
        assert_eq!(d.area(), 4);
        assert_eq!(d.boundary_word(&x), walk);
        assert_eq!(gauss_bonnet_total(&d).unwrap(), 4);
        assert!(d.surface.is_nonpositively_curved().is_ok());
    }

    #[test]
    fn fill_rectangle_in_grid() {
        let x = shapes::grid(3, 3);
        let walk = loop_from_names(&x, &["0_0", "1_0", "2_0", "2_1", "1_1", "0_1"]);
        let d = fill_disc(&x, &walk, FILL_CAP).unwrap();
        assert_eq!(d.area(), 2);
    }

    #[test]
    fn fill_cap_exceeded() {
        let x = shapes::grid(2, 2);
        let walk = loop_from_names(
            &x,
            &["0_0", "1_0", "2_0", "2_1", "2_2", "1_2", "0_2", "0_1"],
        );
        assert!(matches!(
            fill_disc(&x, &walk, 3),
            Err(DiagramError::CapExceeded { cap: 3 })
        ));
    }

    #[test]
    fn fill_rejects_backtracking_loop() {
        let x = shapes::grid(1, 1);
        let e = Dart::new(EdgeId(0), true);
        assert!(matches!(
            fill_disc(&x, &[e, e.reversed()], FILL_CAP),
            Err(DiagramError::BadLoop(_))
        ));
    }

    #[test]
    fn fill_one_square_of_strip() {
        let x = shapes::grid(2, 1);
        let walk = loop_from_names(&x, &["0_0", "1_0", "1_1", "0_1"]);
        let d = fill_disc(&x, &walk, FILL_CAP).unwrap();
        assert_eq!(d.area(), 1);
    }
}
