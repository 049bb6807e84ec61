//! Combinatorial (l1) distance on the 1-skeleton, exhaustive geodesic
//! enumeration, intervals, and interval embeddings into the standard
//! square tiling of the plane.

use std::collections::VecDeque;

use thiserror::Error;

use crate::complex::{Dart, SquareComplex, Subcomplex, VertexId};
use crate::hyperplane;

/// Default cap on enumerated geodesics.
pub const GEODESIC_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("vertices {u:?} and {v:?} lie in different components")]
    Disconnected { u: VertexId, v: VertexId },
    #[error("geodesic enumeration stopped at {found} paths (cap exceeded)")]
    CapExceeded { found: usize },
    #[error("interval computations disagree: {detail}")]
    MismatchBug { detail: String },
    #[error("interval embedding failed: {reason}")]
    EmbedFail { reason: String },
}

/// BFS distances from `u`; `u32::MAX` marks unreachable vertices.
pub fn distances_from(x: &SquareComplex, u: VertexId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; x.vertex_count()];
    dist[u.index()] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(u);
    while let Some(v) = queue.pop_front() {
        for (_, w) in x.neighbours(v) {
            if dist[w.index()] == u32::MAX {
                dist[w.index()] = dist[v.index()] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn distance_l1(x: &SquareComplex, u: VertexId, v: VertexId) -> Result<u32, MetricError> {
    let d = distances_from(x, u)[v.index()];
    if d == u32::MAX {
        Err(MetricError::Disconnected { u, v })
    } else {
        Ok(d)
    }
}

/// A shortest edge path in the 1-skeleton, stored as its dart sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geodesic {
    pub start: VertexId,
    pub darts: Vec<Dart>,
}

impl Geodesic {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn end(&self, x: &SquareComplex) -> VertexId {
        self.darts.last().map_or(self.start, |&d| x.dart_head(d))
    }

    /// All vertices visited, in order (length + 1 entries).
    pub fn vertices(&self, x: &SquareComplex) -> Vec<VertexId> {
        let mut out = vec![self.start];
        for &d in &self.darts {
            out.push(x.dart_head(d));
        }
        out
    }
}

/// All geodesics from `u` to `v` in lexicographic order of their edge id
/// sequences. Enumeration walks the distance-labelled DAG only, so no
/// non-geodesic path is ever explored.
pub fn geodesics(
    x: &SquareComplex,
    u: VertexId,
    v: VertexId,
    cap: usize,
) -> Result<Vec<Geodesic>, MetricError> {
    let du = distances_from(x, u);
    if du[v.index()] == u32::MAX {
        return Err(MetricError::Disconnected { u, v });
    }
    let dv = distances_from(x, v);
    let d = du[v.index()];
    let mut out = Vec::new();
    let mut path = Vec::new();
    dfs_geodesics(x, u, &du, &dv, d, u, &mut path, &mut out, cap)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs_geodesics(
    x: &SquareComplex,
    start: VertexId,
    du: &[u32],
    dv: &[u32],
    d: u32,
    w: VertexId,
    path: &mut Vec<Dart>,
    out: &mut Vec<Geodesic>,
    cap: usize,
) -> Result<(), MetricError> {
    let k = du[w.index()];
    if k == d {
        if out.len() == cap {
            return Err(MetricError::CapExceeded { found: cap });
        }
        out.push(Geodesic { start, darts: path.clone() });
        return Ok(());
    }
    for &dart in x.darts_at(w) {
        let h = x.dart_head(dart);
        if du[h.index()] == k + 1 && dv[h.index()] == d - k - 1 {
            path.push(dart);
            dfs_geodesics(x, start, du, dv, d, h, path, out, cap)?;
            path.pop();
        }
    }
    Ok(())
}

/// The union of all geodesics between two vertices, as a full subcomplex.
#[derive(Debug, Clone)]
pub struct Interval {
    pub endpoints: (VertexId, VertexId),
    pub subcomplex: Subcomplex,
}

/// Computes the interval both as the geodesic union and as the intersection
/// of all half-spaces containing both endpoints; the two routes must agree.
pub fn interval(x: &SquareComplex, u: VertexId, v: VertexId) -> Result<Interval, MetricError> {
    let du = distances_from(x, u);
    if du[v.index()] == u32::MAX {
        return Err(MetricError::Disconnected { u, v });
    }
    let dv = distances_from(x, v);
    let d = du[v.index()];
    let on_geodesic: Vec<VertexId> = x
        .vertices()
        .filter(|w| {
            du[w.index()] != u32::MAX
                && dv[w.index()] != u32::MAX
                && du[w.index()] + dv[w.index()] == d
        })
        .collect();

    // Independent route: intersect every half-space containing both ends.
    let hs = hyperplane::hyperplanes(x);
    let mut allowed = vec![true; x.vertex_count()];
    for (k, h) in hs.iter().enumerate() {
        let (pos, neg) = h.halfspaces.as_ref().ok_or_else(|| MetricError::MismatchBug {
            detail: format!("hyperplane {} is not separating; input is not CAT(0)", k),
        })?;
        let (su, sv) = (pos.contains_vertex(u), pos.contains_vertex(v));
        if su != sv {
            continue;
        }
        let side = if su { pos } else { neg };
        for w in x.vertices() {
            if allowed[w.index()] && !side.contains_vertex(w) {
                allowed[w.index()] = false;
            }
        }
    }
    let by_halfspaces: Vec<VertexId> = x.vertices().filter(|w| allowed[w.index()]).collect();

    if on_geodesic != by_halfspaces {
        let names = |set: &[VertexId]| -> Vec<&str> {
            set.iter().map(|&w| x.vertex_name(w)).collect()
        };
        return Err(MetricError::MismatchBug {
            detail: format!(
                "geodesic union {:?} != half-space intersection {:?}",
                names(&on_geodesic),
                names(&by_halfspaces)
            ),
        });
    }

    Ok(Interval { endpoints: (u, v), subcomplex: Subcomplex::full(x, &on_geodesic) })
}

/// An injective, distance-preserving assignment of lattice coordinates to
/// the vertices of an interval.
#[derive(Debug, Clone)]
pub struct Z2Embedding {
    /// Sorted by vertex id (ids of the ambient complex).
    pub coords: Vec<(VertexId, [i64; 2])>,
}

impl Z2Embedding {
    pub fn get(&self, v: VertexId) -> Option<[i64; 2]> {
        self.coords
            .binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| self.coords[i].1)
    }
}

/// Coordinatize an interval by 2-coloring its hyperplane crossing graph and
/// counting separating hyperplanes per color. The embedding is verified
/// against all pairwise distances before being returned.
pub fn interval_embed_z2(x: &SquareComplex, i: &Interval) -> Result<Z2Embedding, MetricError> {
    let y = i.subcomplex.extract(x);
    let hs = hyperplane::hyperplanes(&y);
    for (k, h) in hs.iter().enumerate() {
        if h.halfspaces.is_none() {
            return Err(MetricError::EmbedFail {
                reason: format!("interval hyperplane {} is not separating", k),
            });
        }
    }

    // Crossing graph: two classes sharing a square cross.
    let m = hs.len();
    let mut adj = vec![Vec::new(); m];
    for s in y.square_ids() {
        let walk = y.square_walk(s);
        let a = hs.class_of(walk[0].edge);
        let b = hs.class_of(walk[1].edge);
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![usize::MAX; m];
    for seed in 0..m {
        if color[seed] != usize::MAX {
            continue;
        }
        color[seed] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(seed);
        while let Some(a) = queue.pop_front() {
            for &b in &adj[a] {
                if color[b] == usize::MAX {
                    color[b] = 1 - color[a];
                    queue.push_back(b);
                } else if color[b] == color[a] {
                    return Err(MetricError::EmbedFail {
                        reason: "crossing graph is not bipartite".to_string(),
                    });
                }
            }
        }
    }

    let base = VertexId(0);
    let mut coords_y: Vec<[i64; 2]> = Vec::with_capacity(y.vertex_count());
    for w in y.vertices() {
        let mut c = [0i64, 0i64];
        for (k, h) in hs.iter().enumerate() {
            if h.separates(base, w) == Some(true) {
                c[color[k]] += 1;
            }
        }
        coords_y.push(c);
    }

    // Fail-closed verification: exact l1 distances for every pair.
    for w in y.vertices() {
        let dist = distances_from(&y, w);
        for w2 in y.vertices() {
            if w2 <= w {
                continue;
            }
            let [x1, y1] = coords_y[w.index()];
            let [x2, y2] = coords_y[w2.index()];
            let l1 = (x1 - x2).abs() + (y1 - y2).abs();
            if dist[w2.index()] == u32::MAX || l1 != dist[w2.index()] as i64 {
                return Err(MetricError::EmbedFail {
                    reason: format!(
                        "distance between {} and {} is {} but images are {:?}, {:?}",
                        y.vertex_name(w),
                        y.vertex_name(w2),
                        dist[w2.index()],
                        coords_y[w.index()],
                        coords_y[w2.index()]
                    ),
                });
            }
        }
    }

    // Map back to ambient ids: extraction preserves the sorted vertex order.
    let coords = i
        .subcomplex
        .vertices
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, coords_y[k]))
        .collect();
    Ok(Z2Embedding { coords })
}
