//! Hyperplane duality: dual-edge classes under the opposite-in-a-square
//! relation, carriers, half-spaces, rails, and combinatorial convexity.

use thiserror::Error;

use crate::complex::{EdgeId, SquareComplex, SquareId, Subcomplex, VertexId};
use crate::metric::{self, Geodesic};

/// Default cap on geodesics enumerated by a convexity check.
pub const CONVEXITY_CAP: usize = 1_000_000;

/// A dual-edge equivalence class with its carrier and, when the class
/// separates the complex, its two half-spaces.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    /// Sorted; closed under "opposite edge in a common square".
    pub dual_edges: Vec<EdgeId>,
    /// Closed squares containing a dual edge, plus the dual edges.
    pub carrier: Subcomplex,
    /// (pos, neg) components after deleting the open dual edges; pos holds
    /// the smallest vertex id. None when the class does not split the
    /// complex into exactly two components.
    pub halfspaces: Option<(Subcomplex, Subcomplex)>,
}

impl Hyperplane {
    pub fn carrier_squares(&self) -> &[SquareId] {
        &self.carrier.squares
    }

    pub fn is_dual(&self, e: EdgeId) -> bool {
        self.dual_edges.binary_search(&e).is_ok()
    }

    /// Which half-space a vertex lies in: true for pos. None when the
    /// hyperplane is not separating.
    pub fn side_of(&self, v: VertexId) -> Option<bool> {
        let (pos, _) = self.halfspaces.as_ref()?;
        Some(pos.contains_vertex(v))
    }

    /// True when the hyperplane separates u from v.
    pub fn separates(&self, u: VertexId, v: VertexId) -> Option<bool> {
        Some(self.side_of(u)? != self.side_of(v)?)
    }
}

/// Structured warning from [`hyperplanes`]: a dual class whose removal does
/// not leave exactly two components, signalling non-CAT(0) input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("hyperplane {hyperplane} is not separating: {components} components after edge removal")]
pub struct NotSeparating {
    pub hyperplane: usize,
    pub components: usize,
}

#[derive(Debug, Clone)]
pub struct HyperplaneSet {
    pub hyperplanes: Vec<Hyperplane>,
    pub warnings: Vec<NotSeparating>,
}

impl HyperplaneSet {
    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Hyperplane> {
        self.hyperplanes.iter()
    }

    /// Index of the class containing `e`.
    pub fn class_of(&self, e: EdgeId) -> usize {
        self.hyperplanes
            .iter()
            .position(|h| h.is_dual(e))
            .expect("every edge lies in a dual class")
    }
}

/// Partition the edges of `x` into hyperplane dual classes, ordered by
/// smallest contained edge id. Separation failures are reported as
/// warnings, not errors, so non-CAT(0) complexes can still be audited.
pub fn hyperplanes(x: &SquareComplex) -> HyperplaneSet {
    let n = x.edge_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], a: usize) -> usize {
        let mut root = a;
        while parent[root] != root {
            root = parent[root];
        }
        let mut a = a;
        while parent[a] != root {
            let next = parent[a];
            parent[a] = root;
            a = next;
        }
        root
    }
    for s in x.square_ids() {
        let walk = x.square_walk(s);
        for (i, j) in [(0usize, 2usize), (1, 3)] {
            let a = find(&mut parent, walk[i].edge.index());
            let b = find(&mut parent, walk[j].edge.index());
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: Vec<Vec<EdgeId>> = Vec::new();
    let mut class_of_root: Vec<Option<usize>> = vec![None; n];
    for e in 0..n {
        let root = find(&mut parent, e);
        let idx = *class_of_root[root].get_or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[idx].push(EdgeId(e as u32));
    }
    // Edge ids ascend, so each class is sorted and classes are ordered by
    // smallest member already.

    let mut hyperplanes = Vec::new();
    let mut warnings = Vec::new();
    for (k, dual_edges) in classes.into_iter().enumerate() {
        let carrier = carrier_of(x, &dual_edges);
        let halfspaces = match split_halfspaces(x, &dual_edges) {
            Ok(pair) => Some(pair),
            Err(components) => {
                warnings.push(NotSeparating { hyperplane: k, components });
                None
            }
        };
        hyperplanes.push(Hyperplane { dual_edges, carrier, halfspaces });
    }
    HyperplaneSet { hyperplanes, warnings }
}

fn carrier_of(x: &SquareComplex, dual_edges: &[EdgeId]) -> Subcomplex {
    let mut squares: Vec<SquareId> = dual_edges
        .iter()
        .flat_map(|&e| x.squares_on_edge(e).iter().copied())
        .collect();
    squares.sort();
    squares.dedup();
    let mut edges: Vec<EdgeId> = dual_edges.to_vec();
    let mut vertices = Vec::new();
    for &s in &squares {
        for d in x.square_walk(s) {
            edges.push(d.edge);
        }
    }
    for &e in &edges {
        let [a, b] = x.endpoints(e);
        vertices.push(a);
        vertices.push(b);
    }
    Subcomplex::new(x, vertices, edges, squares)
}

/// Components of the 1-skeleton after deleting the open dual edges. Ok with
/// (pos, neg) when there are exactly two; Err(count) otherwise.
fn split_halfspaces(
    x: &SquareComplex,
    dual_edges: &[EdgeId],
) -> Result<(Subcomplex, Subcomplex), usize> {
    let n = x.vertex_count();
    let is_dual = |e: EdgeId| dual_edges.binary_search(&e).is_ok();
    let mut comp: Vec<Option<usize>> = vec![None; n];
    let mut count = 0;
    for start in 0..n {
        if comp[start].is_some() {
            continue;
        }
        let idx = count;
        count += 1;
        comp[start] = Some(idx);
        let mut stack = vec![VertexId(start as u32)];
        while let Some(v) = stack.pop() {
            for (d, w) in x.neighbours(v) {
                if !is_dual(d.edge) && comp[w.index()].is_none() {
                    comp[w.index()] = Some(idx);
                    stack.push(w);
                }
            }
        }
    }
    if count != 2 {
        return Err(count);
    }
    let side = |idx: usize| -> Subcomplex {
        let vertices: Vec<VertexId> = x
            .vertices()
            .filter(|v| comp[v.index()] == Some(idx))
            .collect();
        let in_side = |v: VertexId| comp[v.index()] == Some(idx);
        let edges: Vec<EdgeId> = x
            .edge_ids()
            .filter(|&e| {
                let [a, b] = x.endpoints(e);
                !is_dual(e) && in_side(a) && in_side(b)
            })
            .collect();
        let squares: Vec<SquareId> = x
            .square_ids()
            .filter(|&s| {
                x.square_walk(s)
                    .iter()
                    .all(|d| !is_dual(d.edge) && in_side(x.dart_tail(*d)))
            })
            .collect();
        Subcomplex::new(x, vertices, edges, squares)
    };
    // Vertex 0 exists whenever there are components at all; its side is pos.
    let zero_side = comp[0].unwrap();
    Ok((side(zero_side), side(1 - zero_side)))
}

/// One side of a carrier: a maximal subcomplex of the carrier containing no
/// dual edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rail {
    pub side: Subcomplex,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RailError {
    #[error("carrier splits into {0} rail components, expected two")]
    BadRailCount(usize),
}

/// The two rails of a hyperplane in a planar contractible complex, ordered
/// by smallest contained vertex id. A degenerate carrier (a dual edge lying
/// in no square) yields two single-vertex rails.
pub fn rails(x: &SquareComplex, h: &Hyperplane) -> Result<(Rail, Rail), RailError> {
    let vertices = &h.carrier.vertices;
    let edges: Vec<EdgeId> = h
        .carrier
        .edges
        .iter()
        .copied()
        .filter(|&e| !h.is_dual(e))
        .collect();
    let pos_of = |v: VertexId| vertices.binary_search(&v).unwrap();
    let mut comp: Vec<Option<usize>> = vec![None; vertices.len()];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for &e in &edges {
        let [a, b] = x.endpoints(e);
        adj[pos_of(a)].push(pos_of(b));
        adj[pos_of(b)].push(pos_of(a));
    }
    let mut count = 0;
    for start in 0..vertices.len() {
        if comp[start].is_some() {
            continue;
        }
        let idx = count;
        count += 1;
        comp[start] = Some(idx);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w].is_none() {
                    comp[w] = Some(idx);
                    stack.push(w);
                }
            }
        }
    }
    if count != 2 {
        return Err(RailError::BadRailCount(count));
    }
    let side = |idx: usize| -> Rail {
        let vs: Vec<VertexId> = vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| comp[i] == Some(idx))
            .map(|(_, &v)| v)
            .collect();
        let es: Vec<EdgeId> = edges
            .iter()
            .copied()
            .filter(|&e| {
                let [a, b] = x.endpoints(e);
                comp[pos_of(a)] == Some(idx) && comp[pos_of(b)] == Some(idx)
            })
            .collect();
        Rail { side: Subcomplex::new(x, vs, es, vec![]) }
    };
    let (a, b) = (side(0), side(1));
    if a.side.vertices[0] <= b.side.vertices[0] {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

#[derive(Debug, Clone)]
pub enum Convexity {
    Convex,
    /// A geodesic between vertices of the subcomplex that leaves it.
    Witness(Geodesic),
}

impl Convexity {
    pub fn is_convex(&self) -> bool {
        matches!(self, Convexity::Convex)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConvexityError {
    #[error("geodesic enumeration exceeded the cap of {cap}")]
    TooLarge { cap: usize },
}

/// True iff every combinatorial geodesic of `x` between vertices of `s`
/// stays inside `s`, by exhaustive enumeration. `s` must be a full
/// subcomplex of a connected complex.
pub fn is_combinatorially_convex(
    x: &SquareComplex,
    s: &Subcomplex,
    cap: usize,
) -> Result<Convexity, ConvexityError> {
    debug_assert!(s.is_full(x));
    // Scan pairs by increasing distance so a violation is witnessed by a
    // shortest escaping geodesic.
    let mut pairs = Vec::new();
    for (i, &u) in s.vertices.iter().enumerate() {
        let dist = metric::distances_from(x, u);
        for &v in &s.vertices[i + 1..] {
            pairs.push((dist[v.index()], u, v));
        }
    }
    pairs.sort();
    let mut budget = cap;
    for (_, u, v) in pairs {
        let geos =
            metric::geodesics(x, u, v, budget).map_err(|_| ConvexityError::TooLarge { cap })?;
        budget = budget.saturating_sub(geos.len());
        for g in geos {
            let inside = g.darts.iter().all(|d| s.contains_edge(d.edge))
                && g.vertices(x).iter().all(|&w| s.contains_vertex(w));
            if !inside {
                return Ok(Convexity::Witness(g));
            }
        }
    }
    Ok(Convexity::Convex)
}
