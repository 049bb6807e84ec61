//! Square complexes, vertex links, combinatorial maps, and the
//! nonpositive-curvature and reduced-map predicates.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

macro_rules! id_type {
    ($name:ident, $letter:literal) => {
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($letter, "{}"), self.0)
            }
        }
    };
}

id_type!(VertexId, "v");
id_type!(EdgeId, "e");
id_type!(SquareId, "s");

/// An edge together with a direction of travel. `forward` means from
/// `endpoints[0]` to `endpoints[1]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dart {
    pub edge: EdgeId,
    pub forward: bool,
}

impl Dart {
    pub fn new(edge: EdgeId, forward: bool) -> Self {
        Dart { edge, forward }
    }

    pub fn reversed(self) -> Self {
        Dart { edge: self.edge, forward: !self.forward }
    }
}

impl fmt::Debug for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.edge, if self.forward { "+" } else { "-" })
    }
}

/// Raw cell lists accepted by [`SquareComplex::build`]. Ids are free-form
/// names; stable integer ids are assigned in list order at build time.
#[derive(Debug, Clone, Default)]
pub struct ComplexData {
    pub vertices: Vec<String>,
    /// (edge id, endpoint id, endpoint id)
    pub edges: Vec<(String, String, String)>,
    /// (square id, boundary walk as 4 oriented edge ids)
    pub squares: Vec<(String, [(String, bool); 4])>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{kind} `{id}` references unknown cell `{missing}`")]
    DanglingReference { kind: &'static str, id: String, missing: String },
    #[error("square `{id}` boundary is not a closed non-backtracking 4-walk: {reason}")]
    BadWalk { id: String, reason: String },
    #[error("squares `{first}` and `{second}` have identical boundary edge sets")]
    DuplicateSquare { first: String, second: String },
}

/// A finite combinatorial square complex. Squares are stored as oriented
/// boundary 4-walks, canonicalized over the dihedral group of order 8.
#[derive(Debug, Clone)]
pub struct SquareComplex {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    square_names: Vec<String>,
    edges: Vec<[VertexId; 2]>,
    squares: Vec<[Dart; 4]>,
    /// Per vertex, incident darts pointing away from it, sorted.
    out_darts: Vec<Vec<Dart>>,
    /// Per edge, squares whose boundary contains it, sorted.
    edge_squares: Vec<Vec<SquareId>>,
}

impl SquareComplex {
    pub fn build(data: ComplexData) -> Result<Self, BuildError> {
        let mut vertex_ids = HashMap::new();
        for (i, name) in data.vertices.iter().enumerate() {
            if vertex_ids.insert(name.clone(), VertexId(i as u32)).is_some() {
                return Err(BuildError::DuplicateId { kind: "vertex", id: name.clone() });
            }
        }
        let mut edge_ids = HashMap::new();
        let mut edges = Vec::new();
        for (i, (name, a, b)) in data.edges.iter().enumerate() {
            if edge_ids.insert(name.clone(), EdgeId(i as u32)).is_some() {
                return Err(BuildError::DuplicateId { kind: "edge", id: name.clone() });
            }
            let resolve = |v: &String| {
                vertex_ids.get(v).copied().ok_or_else(|| BuildError::DanglingReference {
                    kind: "edge",
                    id: name.clone(),
                    missing: v.clone(),
                })
            };
            edges.push([resolve(a)?, resolve(b)?]);
        }
        let mut square_ids = HashMap::new();
        let mut squares = Vec::new();
        for (i, (name, walk)) in data.squares.iter().enumerate() {
            if square_ids.insert(name.clone(), SquareId(i as u32)).is_some() {
                return Err(BuildError::DuplicateId { kind: "square", id: name.clone() });
            }
            let mut darts = [Dart::new(EdgeId(0), true); 4];
            for (k, (edge_name, forward)) in walk.iter().enumerate() {
                let edge = edge_ids.get(edge_name).copied().ok_or_else(|| {
                    BuildError::DanglingReference {
                        kind: "square",
                        id: name.clone(),
                        missing: edge_name.clone(),
                    }
                })?;
                darts[k] = Dart::new(edge, *forward);
            }
            let walk = validate_walk(&edges, darts)
                .map_err(|reason| BuildError::BadWalk { id: name.clone(), reason })?;
            squares.push(canonical_walk(walk));
            let _ = i;
        }

        // Simplicity at the face level: reject repeated boundary edge sets.
        let mut seen: HashMap<[EdgeId; 4], usize> = HashMap::new();
        for (i, sq) in squares.iter().enumerate() {
            let mut key = [sq[0].edge, sq[1].edge, sq[2].edge, sq[3].edge];
            key.sort();
            if let Some(&j) = seen.get(&key) {
                return Err(BuildError::DuplicateSquare {
                    first: data.squares[j].0.clone(),
                    second: data.squares[i].0.clone(),
                });
            }
            seen.insert(key, i);
        }

        let mut out_darts = vec![Vec::new(); data.vertices.len()];
        for (i, [a, b]) in edges.iter().enumerate() {
            let e = EdgeId(i as u32);
            out_darts[a.index()].push(Dart::new(e, true));
            out_darts[b.index()].push(Dart::new(e, false));
        }
        for darts in &mut out_darts {
            darts.sort();
        }
        let mut edge_squares = vec![Vec::new(); edges.len()];
        for (i, sq) in squares.iter().enumerate() {
            for dart in sq {
                edge_squares[dart.edge.index()].push(SquareId(i as u32));
            }
        }
        for list in &mut edge_squares {
            list.sort();
            list.dedup();
        }

        Ok(SquareComplex {
            vertex_names: data.vertices,
            edge_names: data.edges.into_iter().map(|(n, _, _)| n).collect(),
            square_names: data.squares.into_iter().map(|(n, _)| n).collect(),
            edges,
            squares,
            out_darts,
            edge_squares,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn square_count(&self) -> usize {
        self.squares.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_names.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn square_ids(&self) -> impl Iterator<Item = SquareId> {
        (0..self.squares.len() as u32).map(SquareId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertex_names[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edge_names[e.index()]
    }

    pub fn square_name(&self, s: SquareId) -> &str {
        &self.square_names[s.index()]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertex_names.iter().position(|n| n == name).map(|i| VertexId(i as u32))
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edge_names.iter().position(|n| n == name).map(|i| EdgeId(i as u32))
    }

    pub fn square_by_name(&self, name: &str) -> Option<SquareId> {
        self.square_names.iter().position(|n| n == name).map(|i| SquareId(i as u32))
    }

    pub fn endpoints(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e.index()]
    }

    pub fn dart_tail(&self, d: Dart) -> VertexId {
        let [a, b] = self.endpoints(d.edge);
        if d.forward { a } else { b }
    }

    pub fn dart_head(&self, d: Dart) -> VertexId {
        let [a, b] = self.endpoints(d.edge);
        if d.forward { b } else { a }
    }

    /// Canonical boundary walk of a square (lexicographically minimal
    /// dihedral representative).
    pub fn square_walk(&self, s: SquareId) -> [Dart; 4] {
        self.squares[s.index()]
    }

    /// Corner vertices in walk order: vertex `i` is the tail of dart `i`.
    pub fn square_corners(&self, s: SquareId) -> [VertexId; 4] {
        let walk = self.square_walk(s);
        [
            self.dart_tail(walk[0]),
            self.dart_tail(walk[1]),
            self.dart_tail(walk[2]),
            self.dart_tail(walk[3]),
        ]
    }

    pub fn square_edge_set(&self, s: SquareId) -> [EdgeId; 4] {
        let walk = self.square_walk(s);
        let mut out = [walk[0].edge, walk[1].edge, walk[2].edge, walk[3].edge];
        out.sort();
        out
    }

    /// Darts leaving `v`, sorted by (edge id, direction).
    pub fn darts_at(&self, v: VertexId) -> &[Dart] {
        &self.out_darts[v.index()]
    }

    pub fn squares_on_edge(&self, e: EdgeId) -> &[SquareId] {
        &self.edge_squares[e.index()]
    }

    /// Neighbours of `v` via each incident dart, in dart order.
    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = (Dart, VertexId)> + '_ {
        self.darts_at(v).iter().map(move |&d| (d, self.dart_head(d)))
    }

    pub fn vertex_link(&self, v: VertexId) -> VertexLink {
        let mut nodes: Vec<LinkNode> = Vec::new();
        for &d in self.darts_at(v) {
            nodes.push(LinkNode { dart: d });
        }
        nodes.sort();
        nodes.dedup();
        let node_index = |d: Dart| nodes.iter().position(|n| n.dart == d).expect("corner dart at vertex");
        let mut arcs = Vec::new();
        for s in self.square_ids() {
            let walk = self.square_walk(s);
            for i in 0..4 {
                let incoming = walk[(i + 3) % 4];
                let outgoing = walk[i];
                if self.dart_tail(outgoing) == v {
                    // The corner joins the ends of the two boundary edges at v.
                    let a = node_index(incoming.reversed());
                    let b = node_index(outgoing);
                    arcs.push(LinkArc { square: s, ends: [a, b] });
                }
            }
        }
        VertexLink { vertex: v, nodes, arcs }
    }

    /// Girth-4 link condition at every vertex. Fails with the offending
    /// vertex and a short cycle of link nodes.
    pub fn is_nonpositively_curved(&self) -> Result<(), CurvatureWitness> {
        for v in self.vertices() {
            let link = self.vertex_link(v);
            if let Some(cycle) = link.shortest_cycle() {
                if cycle.len() < 4 {
                    return Err(CurvatureWitness {
                        vertex: v,
                        cycle: cycle.iter().map(|&i| link.nodes[i].dart).collect(),
                    });
                }
            }
        }
        Ok(())
    }

    /// True when the 1-skeleton is connected (vacuously true when empty).
    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for (_, w) in self.neighbours(v) {
                if !seen[w.index()] {
                    seen[w.index()] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Integer Euler characteristic V - E + S.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.square_count() as i64
    }

    /// The square (if any) whose boundary contains both darts consecutively,
    /// i.e. a corner turning from `incoming` to `outgoing` at their shared
    /// vertex. In a complex with girth-4 links there is at most one.
    pub fn corner_squares(&self, incoming: Dart, outgoing: Dart) -> Vec<SquareId> {
        let v = self.dart_head(incoming);
        debug_assert_eq!(v, self.dart_tail(outgoing));
        let mut found = Vec::new();
        for &s in self.squares_on_edge(incoming.edge) {
            let walk = self.square_walk(s);
            for i in 0..4 {
                let a = walk[(i + 3) % 4];
                let b = walk[i];
                // The stored walk passes the corner as (a, b); its reversed
                // traversal passes it as (b.reversed(), a.reversed()).
                if (a == incoming && b == outgoing)
                    || (b == incoming.reversed() && a == outgoing.reversed())
                {
                    found.push(s);
                }
            }
        }
        found.sort();
        found.dedup();
        found
    }
}

fn validate_walk(edges: &[[VertexId; 2]], darts: [Dart; 4]) -> Result<[Dart; 4], String> {
    let tail = |d: Dart| {
        let [a, b] = edges[d.edge.index()];
        if d.forward { a } else { b }
    };
    let head = |d: Dart| {
        let [a, b] = edges[d.edge.index()];
        if d.forward { b } else { a }
    };
    for i in 0..4 {
        let next = darts[(i + 1) % 4];
        if head(darts[i]) != tail(next) {
            return Err(format!(
                "walk breaks between positions {} and {}",
                i,
                (i + 1) % 4
            ));
        }
        if next == darts[i].reversed() {
            return Err(format!("walk backtracks at position {}", i));
        }
    }
    let mut corners = [tail(darts[0]), tail(darts[1]), tail(darts[2]), tail(darts[3])];
    corners.sort();
    if corners.windows(2).any(|w| w[0] == w[1]) {
        return Err("walk visits a vertex twice".to_string());
    }
    Ok(darts)
}

/// Lexicographically minimal representative over the 8 dihedral images of
/// the oriented boundary walk.
pub(crate) fn canonical_walk(walk: [Dart; 4]) -> [Dart; 4] {
    let mut best: Option<[Dart; 4]> = None;
    let mut consider = |candidate: [Dart; 4]| {
        if best.is_none_or(|b| candidate < b) {
            best = Some(candidate);
        }
    };
    for r in 0..4 {
        let rot = [walk[r], walk[(r + 1) % 4], walk[(r + 2) % 4], walk[(r + 3) % 4]];
        consider(rot);
        let rev = [
            rot[3].reversed(),
            rot[2].reversed(),
            rot[1].reversed(),
            rot[0].reversed(),
        ];
        consider(rev);
    }
    best.unwrap()
}

/// A node of a vertex link: one end of an incident edge, named by the dart
/// leaving the vertex along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinkNode {
    pub dart: Dart,
}

/// An arc of a vertex link: a square corner joining two edge-ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkArc {
    pub square: SquareId,
    /// Indices into [`VertexLink::nodes`].
    pub ends: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct VertexLink {
    pub vertex: VertexId,
    pub nodes: Vec<LinkNode>,
    pub arcs: Vec<LinkArc>,
}

impl VertexLink {
    /// Number of square corners at the vertex.
    pub fn corner_count(&self) -> usize {
        self.arcs.len()
    }

    /// Euler characteristic of the link graph.
    pub fn chi(&self) -> i64 {
        self.nodes.len() as i64 - self.arcs.len() as i64
    }

    /// Connected components of the link graph; isolated nodes count.
    pub fn component_count(&self) -> usize {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for arc in &self.arcs {
            let a = find(&mut parent, arc.ends[0]);
            let b = find(&mut parent, arc.ends[1]);
            if a != b {
                parent[a] = b;
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// True when the link is a single cycle (every node has degree 2 and the
    /// graph is connected and non-empty).
    pub fn is_cycle(&self) -> bool {
        if self.nodes.is_empty() {
            return false;
        }
        let mut degree = vec![0usize; self.nodes.len()];
        for arc in &self.arcs {
            degree[arc.ends[0]] += 1;
            degree[arc.ends[1]] += 1;
        }
        degree.iter().all(|&d| d == 2) && self.component_count() == 1
    }

    /// Shortest cycle of the link multigraph as a node index list; loop arcs
    /// give length 1, parallel arcs length 2. None for forests.
    pub fn shortest_cycle(&self) -> Option<Vec<usize>> {
        for arc in &self.arcs {
            if arc.ends[0] == arc.ends[1] {
                return Some(vec![arc.ends[0]]);
            }
        }
        let mut pair_seen: HashMap<[usize; 2], usize> = HashMap::new();
        for arc in &self.arcs {
            let mut key = arc.ends;
            key.sort();
            if pair_seen.contains_key(&key) {
                return Some(vec![key[0], key[1]]);
            }
            pair_seen.insert(key, 1);
        }
        // Simple graph from here on: BFS girth.
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for arc in &self.arcs {
            adj[arc.ends[0]].push(arc.ends[1]);
            adj[arc.ends[1]].push(arc.ends[0]);
        }
        let mut best: Option<Vec<usize>> = None;
        for start in 0..n {
            let mut dist = vec![usize::MAX; n];
            let mut pred = vec![usize::MAX; n];
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        pred[w] = u;
                        queue.push_back(w);
                    } else if pred[u] != w {
                        // Closed walk through start of length
                        // dist[u] + dist[w] + 1; the minimum over all starts
                        // is the girth, and for the minimum the walk is a
                        // simple cycle.
                        let len = dist[u] + dist[w] + 1;
                        if best.as_ref().is_none_or(|b| len < b.len()) {
                            let mut up = Vec::new();
                            let mut x = u;
                            while x != usize::MAX {
                                up.push(x);
                                x = pred[x];
                            }
                            up.reverse();
                            let mut down = Vec::new();
                            let mut y = w;
                            while y != start {
                                down.push(y);
                                y = pred[y];
                            }
                            up.extend(down);
                            debug_assert_eq!(up.len(), len);
                            best = Some(up);
                        }
                    }
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct CurvatureWitness {
    pub vertex: VertexId,
    pub cycle: Vec<Dart>,
}

impl fmt::Display for CurvatureWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "link of {:?} contains a cycle of length {} through {:?}",
            self.vertex,
            self.cycle.len(),
            self.cycle
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("{kind} map incomplete: no image for {cell}")]
    MissingImage { kind: &'static str, cell: String },
    #[error("edge {edge} image does not commute with endpoints")]
    EdgeMismatch { edge: String },
    #[error("square {square} image walk is not a dihedral match of the target square")]
    SquareMismatch { square: String },
}

/// A dimension-preserving cellular map commuting with boundaries.
#[derive(Debug, Clone)]
pub struct CombinatorialMap {
    pub vertex_map: Vec<VertexId>,
    pub edge_map: Vec<EdgeId>,
    pub square_map: Vec<SquareId>,
}

impl CombinatorialMap {
    pub fn identity(x: &SquareComplex) -> Self {
        CombinatorialMap {
            vertex_map: x.vertices().collect(),
            edge_map: x.edge_ids().collect(),
            square_map: x.square_ids().collect(),
        }
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[v.index()]
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        self.edge_map[e.index()]
    }

    pub fn square(&self, s: SquareId) -> SquareId {
        self.square_map[s.index()]
    }

    pub fn dart(&self, source: &SquareComplex, target: &SquareComplex, d: Dart) -> Dart {
        let image_edge = self.edge(d.edge);
        let tail_image = self.vertex(source.dart_tail(d));
        let [a, b] = target.endpoints(image_edge);
        if tail_image == a {
            Dart::new(image_edge, true)
        } else {
            debug_assert_eq!(tail_image, b);
            Dart::new(image_edge, false)
        }
    }

    /// Validate boundary commutation against the two complexes.
    pub fn validate(
        &self,
        source: &SquareComplex,
        target: &SquareComplex,
    ) -> Result<(), MapError> {
        if self.vertex_map.len() != source.vertex_count()
            || self.edge_map.len() != source.edge_count()
            || self.square_map.len() != source.square_count()
        {
            return Err(MapError::MissingImage { kind: "cell", cell: "(arity mismatch)".into() });
        }
        for e in source.edge_ids() {
            let [a, b] = source.endpoints(e);
            let [ia, ib] = target.endpoints(self.edge(e));
            let (fa, fb) = (self.vertex(a), self.vertex(b));
            if !((fa == ia && fb == ib) || (fa == ib && fb == ia)) {
                return Err(MapError::EdgeMismatch { edge: source.edge_name(e).to_string() });
            }
        }
        for s in source.square_ids() {
            if !self.square_commutes(source, target, s) {
                return Err(MapError::SquareMismatch {
                    square: source.square_name(s).to_string(),
                });
            }
        }
        Ok(())
    }

    fn square_commutes(
        &self,
        source: &SquareComplex,
        target: &SquareComplex,
        s: SquareId,
    ) -> bool {
        let walk = source.square_walk(s);
        let image_sq = self.square(s);
        let image_walk = target.square_walk(image_sq);
        let mapped: Vec<(EdgeId, VertexId)> = walk
            .iter()
            .map(|&d| (self.edge(d.edge), self.vertex(source.dart_tail(d))))
            .collect();
        let target_seq: Vec<(EdgeId, VertexId)> = image_walk
            .iter()
            .map(|&d| (d.edge, target.dart_tail(d)))
            .collect();
        for r in 0..4 {
            let rot: Vec<_> = (0..4).map(|i| target_seq[(r + i) % 4]).collect();
            if rot == mapped {
                return true;
            }
            // Reflection: reverse the walk; tails become heads.
            let heads: Vec<(EdgeId, VertexId)> = image_walk
                .iter()
                .map(|&d| (d.edge, target.dart_head(d)))
                .collect();
            let refl: Vec<_> = (0..4).map(|i| heads[(r + 4 - i) % 4]).collect();
            if refl == mapped {
                return true;
            }
        }
        false
    }
}

/// A subcomplex given by sorted cell id lists. Closure (edge endpoints and
/// square boundaries present) is enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcomplex {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub squares: Vec<SquareId>,
}

impl Subcomplex {
    pub fn new(
        x: &SquareComplex,
        mut vertices: Vec<VertexId>,
        mut edges: Vec<EdgeId>,
        mut squares: Vec<SquareId>,
    ) -> Self {
        vertices.sort();
        vertices.dedup();
        edges.sort();
        edges.dedup();
        squares.sort();
        squares.dedup();
        let sub = Subcomplex { vertices, edges, squares };
        debug_assert!(sub.is_closed(x));
        sub
    }

    /// The full subcomplex spanned by a vertex set: every edge and square of
    /// `x` all of whose corners lie in the set.
    pub fn full(x: &SquareComplex, vertices: &[VertexId]) -> Self {
        let mut vs: Vec<VertexId> = vertices.to_vec();
        vs.sort();
        vs.dedup();
        let has = |v: VertexId| vs.binary_search(&v).is_ok();
        let edges: Vec<EdgeId> = x
            .edge_ids()
            .filter(|&e| {
                let [a, b] = x.endpoints(e);
                has(a) && has(b)
            })
            .collect();
        let edge_has = |e: EdgeId| edges.binary_search(&e).is_ok();
        let squares: Vec<SquareId> = x
            .square_ids()
            .filter(|&s| x.square_walk(s).iter().all(|d| edge_has(d.edge)))
            .collect();
        Subcomplex { vertices: vs, edges, squares }
    }

    pub fn whole(x: &SquareComplex) -> Self {
        Subcomplex {
            vertices: x.vertices().collect(),
            edges: x.edge_ids().collect(),
            squares: x.square_ids().collect(),
        }
    }

    pub fn single_vertex(v: VertexId) -> Self {
        Subcomplex { vertices: vec![v], edges: vec![], squares: vec![] }
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn contains_square(&self, s: SquareId) -> bool {
        self.squares.binary_search(&s).is_ok()
    }

    pub fn is_closed(&self, x: &SquareComplex) -> bool {
        self.edges.iter().all(|&e| {
            let [a, b] = x.endpoints(e);
            self.contains_vertex(a) && self.contains_vertex(b)
        }) && self
            .squares
            .iter()
            .all(|&s| x.square_walk(s).iter().all(|d| self.contains_edge(d.edge)))
    }

    /// True when every edge and square of `x` spanned by the vertex set is
    /// already present.
    pub fn is_full(&self, x: &SquareComplex) -> bool {
        *self == Subcomplex::full(x, &self.vertices)
    }

    /// Extract as a standalone complex; cells keep their names from `x`.
    pub fn extract(&self, x: &SquareComplex) -> SquareComplex {
        let data = ComplexData {
            vertices: self.vertices.iter().map(|&v| x.vertex_name(v).to_string()).collect(),
            edges: self
                .edges
                .iter()
                .map(|&e| {
                    let [a, b] = x.endpoints(e);
                    (
                        x.edge_name(e).to_string(),
                        x.vertex_name(a).to_string(),
                        x.vertex_name(b).to_string(),
                    )
                })
                .collect(),
            squares: self
                .squares
                .iter()
                .map(|&s| {
                    let walk = x.square_walk(s);
                    (
                        x.square_name(s).to_string(),
                        [
                            (x.edge_name(walk[0].edge).to_string(), walk[0].forward),
                            (x.edge_name(walk[1].edge).to_string(), walk[1].forward),
                            (x.edge_name(walk[2].edge).to_string(), walk[2].forward),
                            (x.edge_name(walk[3].edge).to_string(), walk[3].forward),
                        ],
                    )
                })
                .collect(),
        };
        SquareComplex::build(data).expect("subcomplex extraction preserves validity")
    }
}

/// Witness for a failed reduced-map check: two edge-adjacent squares with a
/// common image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldWitness {
    pub squares: [SquareId; 2],
    pub shared_edge: EdgeId,
    pub image: SquareId,
}

/// True iff no two distinct edge-adjacent squares of the source share an
/// image square.
pub fn is_reduced(source: &SquareComplex, map: &CombinatorialMap) -> Result<(), FoldWitness> {
    for e in source.edge_ids() {
        let squares = source.squares_on_edge(e);
        for (i, &s1) in squares.iter().enumerate() {
            for &s2 in &squares[i + 1..] {
                if map.square(s1) == map.square(s2) {
                    return Err(FoldWitness {
                        squares: [s1, s2],
                        shared_edge: e,
                        image: map.square(s1),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn single_square() -> SquareComplex {
        shapes::grid(1, 1)
    }

    #[test]
    fn builds_single_square() {
        let x = single_square();
        assert_eq!(x.vertex_count(), 4);
        assert_eq!(x.edge_count(), 4);
        assert_eq!(x.square_count(), 1);
    }

    #[test]
    fn rejects_three_edge_walk() {
        // A triangle of edges cannot close into a 4-walk; repeat one edge to
        // reach length 4 and the walk must backtrack or revisit.
        let data = ComplexData {
            vertices: vec!["0".into(), "1".into(), "2".into()],
            edges: vec![
                ("a".into(), "0".into(), "1".into()),
                ("b".into(), "1".into(), "2".into()),
                ("c".into(), "2".into(), "0".into()),
            ],
            squares: vec![(
                "s".into(),
                [
                    ("a".into(), true),
                    ("b".into(), true),
                    ("c".into(), true),
                    ("c".into(), false),
                ],
            )],
        };
        assert!(matches!(SquareComplex::build(data), Err(BuildError::BadWalk { .. })));
    }

    #[test]
    fn rejects_dangling_reference() {
        let data = ComplexData {
            vertices: vec!["0".into()],
            edges: vec![("a".into(), "0".into(), "missing".into())],
            squares: vec![],
        };
        assert!(matches!(
            SquareComplex::build(data),
            Err(BuildError::DanglingReference { .. })
        ));
    }

    #[test]
    fn grid_center_has_four_corners() {
        let x = shapes::grid(2, 2);
        let center = x.vertex_by_name("1_1").unwrap();
        let link = x.vertex_link(center);
        assert_eq!(link.corner_count(), 4);
        assert!(link.is_cycle());
        assert_eq!(link.chi(), 0);
    }

    #[test]
    fn corner_of_single_square_is_path() {
        let x = single_square();
        let v = x.vertex_by_name("0_0").unwrap();
        let link = x.vertex_link(v);
        assert_eq!(link.nodes.len(), 2);
        assert_eq!(link.corner_count(), 1);
        assert_eq!(link.chi(), 1);
        assert!(!link.is_cycle());
    }

    #[test]
    fn three_quarter_fan_link_is_path_with_three_arcs() {
        // Three squares arranged as three quadrants around one vertex.
        let x = shapes::from_cells_complex(&[(0, 0), (1, 0), (0, 1)]);
        let v = x.vertex_by_name("1_1").unwrap();
        let link = x.vertex_link(v);
        assert_eq!(link.corner_count(), 3);
        assert_eq!(link.nodes.len(), 4);
        assert_eq!(link.chi(), 1);
    }

    #[test]
    fn grid_is_nonpositively_curved() {
        assert!(shapes::grid(3, 3).is_nonpositively_curved().is_ok());
    }

    #[test]
    fn two_squares_sharing_two_adjacent_edges_fail_link_condition() {
        // Squares s1 = p0 p1 p2 p3 and s2 = p0 p1 p2 q with the same two
        // edges at p1: the link of p1 has a double arc (a 2-cycle).
        let data = ComplexData {
            vertices: vec!["p0".into(), "p1".into(), "p2".into(), "p3".into(), "q".into()],
            edges: vec![
                ("e01".into(), "p0".into(), "p1".into()),
                ("e12".into(), "p1".into(), "p2".into()),
                ("e23".into(), "p2".into(), "p3".into()),
                ("e30".into(), "p3".into(), "p0".into()),
                ("e2q".into(), "p2".into(), "q".into()),
                ("eq0".into(), "q".into(), "p0".into()),
            ],
            squares: vec![
                (
                    "s1".into(),
                    [
                        ("e01".into(), true),
                        ("e12".into(), true),
                        ("e23".into(), true),
                        ("e30".into(), true),
                    ],
                ),
                (
                    "s2".into(),
                    [
                        ("e01".into(), true),
                        ("e12".into(), true),
                        ("e2q".into(), true),
                        ("eq0".into(), true),
                    ],
                ),
            ],
        };
        let x = SquareComplex::build(data).unwrap();
        let witness = x.is_nonpositively_curved().unwrap_err();
        assert_eq!(witness.cycle.len(), 2);
        assert_eq!(x.vertex_name(witness.vertex), "p1");
    }

    #[test]
    fn three_squares_around_vertex_form_link_three_cycle() {
        // Three squares pairwise glued around a central vertex c: corners
        // c-x1-..-x2, c-x2-..-x3, c-x3-..-x1 give a 3-cycle in the link.
        let mut vertices = vec!["c".into()];
        let mut edges = Vec::new();
        let mut squares = Vec::new();
        for i in 0..3u32 {
            vertices.push(format!("x{}", i));
            vertices.push(format!("y{}", i));
        }
        for i in 0..3u32 {
            edges.push((format!("sp{}", i), "c".to_string(), format!("x{}", i)));
        }
        for i in 0..3u32 {
            let j = (i + 1) % 3;
            edges.push((format!("u{}", i), format!("x{}", i), format!("y{}", i)));
            edges.push((format!("w{}", i), format!("y{}", i), format!("x{}", j)));
            squares.push((
                format!("s{}", i),
                [
                    (format!("sp{}", i), true),
                    (format!("u{}", i), true),
                    (format!("w{}", i), true),
                    (format!("sp{}", j), false),
                ],
            ));
        }
        let x = SquareComplex::build(ComplexData { vertices, edges, squares }).unwrap();
        let witness = x.is_nonpositively_curved().unwrap_err();
        assert_eq!(x.vertex_name(witness.vertex), "c");
        assert_eq!(witness.cycle.len(), 3);
    }

    #[test]
    fn identity_map_is_reduced() {
        let x = shapes::grid(2, 2);
        let id = CombinatorialMap::identity(&x);
        id.validate(&x, &x).unwrap();
        assert!(is_reduced(&x, &id).is_ok());
    }

    #[test]
    fn folded_pair_is_not_reduced() {
        let (d, x, map) = shapes::folded_pair();
        map.validate(&d, &x).unwrap();
        let witness = is_reduced(&d, &map).unwrap_err();
        assert_eq!(witness.squares.len(), 2);
    }

    #[test]
    fn inclusion_into_larger_grid_is_reduced() {
        let (strip, grid, map) = shapes::grid_inclusion(2, 1, 3, 3, 0, 0);
        map.validate(&strip, &grid).unwrap();
        assert!(is_reduced(&strip, &map).is_ok());
    }

    #[test]
    fn canonical_walks_identify_dihedral_images() {
        let a = canonical_walk([
            Dart::new(EdgeId(0), true),
            Dart::new(EdgeId(1), true),
            Dart::new(EdgeId(2), true),
            Dart::new(EdgeId(3), true),
        ]);
        let b = canonical_walk([
            Dart::new(EdgeId(2), false),
            Dart::new(EdgeId(1), false),
            Dart::new(EdgeId(0), false),
            Dart::new(EdgeId(3), false),
        ]);
        assert_eq!(a, b);
    }
}
