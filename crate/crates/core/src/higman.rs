//! Exact arithmetic in BS(1,2) through affine maps x -> 2^k x + t over
//! dyadic rationals, the polygon-of-groups data whose vertex groups are
//! BS(1,2) copies, link graphs with cap-relative girth reports, the
//! three-edge-path stabiliser check, and square subdivision of polygonal
//! complexes.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use thiserror::Error;

use crate::complex::{ComplexData, SquareComplex};

#[derive(Debug, Error)]
pub enum HigmanError {
    #[error("unknown symbol {0:?}")]
    BadSymbol(char),
    #[error("bad local data: {0}")]
    BadLocalData(String),
    #[error("bad polygon: {0}")]
    BadPolygon(String),
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn is_even(n: &BigInt) -> bool {
    (n % 2) == big(0)
}

/// numerator / 2^exponent in lowest terms: the exponent is zero whenever
/// the numerator is even or zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: BigInt, exponent: u32) -> Self {
        let mut d = DyadicRational { numerator, exponent };
        d.normalize();
        d
    }

    pub fn integer(n: i64) -> Self {
        DyadicRational { numerator: big(n), exponent: 0 }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    fn normalize(&mut self) {
        if self.numerator == big(0) {
            self.exponent = 0;
            return;
        }
        while self.exponent > 0 && is_even(&self.numerator) {
            self.numerator = &self.numerator / 2;
            self.exponent -= 1;
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator == big(0)
    }

    pub fn is_integer(&self) -> bool {
        self.exponent == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent) as usize;
        let b = &other.numerator << (e - other.exponent) as usize;
        DyadicRational::new(a + b, e)
    }

    pub fn neg(&self) -> Self {
        DyadicRational { numerator: -&self.numerator, exponent: self.exponent }
    }

    /// The value times 2^k, with k of either sign.
    pub fn times_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            let k = k as u32;
            if self.exponent >= k {
                DyadicRational { numerator: self.numerator.clone(), exponent: self.exponent - k }
            } else {
                DyadicRational {
                    numerator: &self.numerator << (k - self.exponent) as usize,
                    exponent: 0,
                }
            }
        } else {
            DyadicRational { numerator: self.numerator.clone(), exponent: self.exponent + (-k) as u32 }
        }
    }
}

/// The affine map x -> 2^k x + t. The representation is exact and
/// faithful, so equality of elements is equality of the two fields.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BS12Element {
    pub scale_exp: i64,
    pub translation: DyadicRational,
}

pub fn bs12_identity() -> BS12Element {
    BS12Element { scale_exp: 0, translation: DyadicRational::zero() }
}

/// The generator doubling the line: x -> 2x.
pub fn gen_a() -> BS12Element {
    BS12Element { scale_exp: 1, translation: DyadicRational::zero() }
}

/// The generator shifting the line: x -> x + 1.
pub fn gen_b() -> BS12Element {
    BS12Element { scale_exp: 0, translation: DyadicRational::integer(1) }
}

pub fn bs12_compose(g: &BS12Element, h: &BS12Element) -> BS12Element {
    BS12Element {
        scale_exp: g.scale_exp + h.scale_exp,
        translation: h.translation.times_pow2(g.scale_exp).add(&g.translation),
    }
}

pub fn bs12_invert(g: &BS12Element) -> BS12Element {
    BS12Element {
        scale_exp: -g.scale_exp,
        translation: g.translation.neg().times_pow2(-g.scale_exp),
    }
}

pub fn bs12_apply(g: &BS12Element, x: &DyadicRational) -> DyadicRational {
    x.times_pow2(g.scale_exp).add(&g.translation)
}

/// The defining relation a b a^-1 = b^2, checked exactly.
pub fn relation_holds() -> bool {
    let aba = bs12_compose(&bs12_compose(&gen_a(), &gen_b()), &bs12_invert(&gen_a()));
    aba == bs12_compose(&gen_b(), &gen_b())
}

/// Evaluate a word over a, b, A = a^-1, B = b^-1.
pub fn word_to_element(word: &str) -> Result<BS12Element, HigmanError> {
    let mut g = bs12_identity();
    for ch in word.chars() {
        let letter = match ch {
            'a' => gen_a(),
            'b' => gen_b(),
            'A' => bs12_invert(&gen_a()),
            'B' => bs12_invert(&gen_b()),
            other => return Err(HigmanError::BadSymbol(other)),
        };
        g = bs12_compose(&g, &letter);
    }
    Ok(g)
}

/// Normal form A^p b^m a^q obtained by rewriting with the defining
/// relation: a-letters are pushed right past b-letters (a b -> b b a) and
/// their inverses left (b A -> A b b), then the middle power is halved
/// against matching outer letters (A b^{2m} a = b^m). Words are equal in
/// the group exactly when their normal forms coincide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub neg_scale: u32,
    pub shift: BigInt,
    pub pos_scale: u32,
}

impl NormalForm {
    pub fn is_identity(&self) -> bool {
        self.neg_scale == 0 && self.shift == big(0) && self.pos_scale == 0
    }
}

fn nf_settle(p: &mut u32, m: &mut BigInt, q: &mut u32) {
    if *m == big(0) {
        let net = *q as i64 - *p as i64;
        if net >= 0 {
            *p = 0;
            *q = net as u32;
        } else {
            *p = (-net) as u32;
            *q = 0;
        }
        return;
    }
    while is_even(m) && *p > 0 && *q > 0 {
        *m = &*m / 2;
        *p -= 1;
        *q -= 1;
    }
}

/// Compute the normal form letter by letter. Appending a letter to a
/// normal form needs only the relation pushed through the outer powers:
/// a^q b = b^{2^q} a^q and b^m A = A b^{2m}.
pub fn word_normal_form(word: &str) -> Result<NormalForm, HigmanError> {
    let (mut p, mut m, mut q) = (0u32, big(0), 0u32);
    for ch in word.chars() {
        match ch {
            'a' => {
                if m == big(0) && p > 0 {
                    p -= 1;
                } else {
                    q += 1;
                    nf_settle(&mut p, &mut m, &mut q);
                }
            }
            'A' => {
                if q > 0 {
                    q -= 1;
                } else {
                    p += 1;
                    m = &m * 2;
                }
            }
            'b' => {
                m += big(1) << q as usize;
                nf_settle(&mut p, &mut m, &mut q);
            }
            'B' => {
                m -= big(1) << q as usize;
                nf_settle(&mut p, &mut m, &mut q);
            }
            other => return Err(HigmanError::BadSymbol(other)),
        }
    }
    Ok(NormalForm { neg_scale: p, shift: m, pos_scale: q })
}

/// The subgroups that arise as edge-group images in a vertex group:
/// the scaling subgroup, the translation subgroup, and their conjugates.
#[derive(Debug, Clone)]
pub enum SubgroupSpec {
    AType,
    BType,
    ConjugateA(BS12Element),
    ConjugateB(BS12Element),
}

pub fn subgroup_membership(g: &BS12Element, s: &SubgroupSpec) -> bool {
    match s {
        SubgroupSpec::AType => g.translation.is_zero(),
        SubgroupSpec::BType => g.scale_exp == 0 && g.translation.is_integer(),
        SubgroupSpec::ConjugateA(c) => {
            let back = bs12_compose(&bs12_compose(&bs12_invert(c), g), c);
            subgroup_membership(&back, &SubgroupSpec::AType)
        }
        SubgroupSpec::ConjugateB(c) => {
            let back = bs12_compose(&bs12_compose(&bs12_invert(c), g), c);
            subgroup_membership(&back, &SubgroupSpec::BType)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeGenType {
    AType,
    BType,
}

#[derive(Debug, Clone)]
pub struct IntersectionVerdict {
    pub trivial: bool,
    pub certificate: String,
}

/// Decide whether the scaling subgroup meets a conjugate c <x> c^-1 of an
/// edge subgroup trivially, with the algebraic reason. c a^j c^-1 scales
/// by 2^j and translates by t (1 - 2^j) where t is c's translation part,
/// and c b^m c^-1 is a translation by 2^k m, so in each case the
/// translation part obstructs a common nontrivial element.
pub fn edge_intersection_trivial(other: EdgeGenType, c: &BS12Element) -> IntersectionVerdict {
    match other {
        EdgeGenType::BType => IntersectionVerdict {
            trivial: true,
            certificate: "a conjugate of the translation subgroup consists of translations, \
                          and the only translation that scales is the identity"
                .into(),
        },
        EdgeGenType::AType => {
            if c.translation.is_zero() {
                IntersectionVerdict {
                    trivial: false,
                    certificate: "the conjugator is itself a scaling, so the conjugate is the \
                                  scaling subgroup again"
                        .into(),
                }
            } else {
                IntersectionVerdict {
                    trivial: true,
                    certificate: format!(
                        "c a^j c^-1 has translation part t (1 - 2^j) with t = {:?}/2^{}, \
                         nonzero for every j != 0",
                        c.translation.numerator(),
                        c.translation.exponent()
                    ),
                }
            }
        }
    }
}

/// The polygon of groups behind the n-generator presentation: trivial
/// face group, infinite cyclic edge groups, one BS(1,2) copy per vertex.
/// At the vertex between consecutive edges the earlier edge generator
/// includes as the scaling generator and the later one as the
/// translation generator.
#[derive(Debug, Clone)]
pub struct PolygonOfGroups {
    pub n: usize,
}

impl PolygonOfGroups {
    pub fn new(n: usize) -> Result<Self, HigmanError> {
        if n < 4 {
            return Err(HigmanError::BadPolygon(format!("{} sides, need at least 4", n)));
        }
        Ok(PolygonOfGroups { n })
    }

    /// The negatively curved regime. Four sides build but carry flat
    /// geometry, which callers are expected to flag.
    pub fn hyperbolic_regime(&self) -> bool {
        self.n >= 5
    }

    /// Edge including into vertex v as the scaling generator.
    pub fn a_edge_at(&self, v: usize) -> usize {
        v % self.n
    }

    /// Edge including into vertex v as the translation generator.
    pub fn b_edge_at(&self, v: usize) -> usize {
        (v + 1) % self.n
    }
}

/// Every distinct element reachable by a word of length at most cap, in
/// breadth-first order with a shortest word each.
pub fn bs12_ball(cap: usize) -> Vec<(String, BS12Element)> {
    let letters = [
        ('a', gen_a()),
        ('b', gen_b()),
        ('A', bs12_invert(&gen_a())),
        ('B', bs12_invert(&gen_b())),
    ];
    let mut seen: BTreeSet<BS12Element> = BTreeSet::from([bs12_identity()]);
    let mut queue: VecDeque<(String, BS12Element)> =
        VecDeque::from([(String::new(), bs12_identity())]);
    let mut out = Vec::new();
    while let Some((w, g)) = queue.pop_front() {
        if w.len() < cap {
            for (c, l) in &letters {
                let next = bs12_compose(&g, l);
                if seen.insert(next.clone()) {
                    queue.push_back((format!("{}{}", w, c), next));
                }
            }
        }
        out.push((w, g));
    }
    out
}

/// The part of a vertex link reachable at the word cap: a bipartite
/// graph of scaling- and translation-subgroup cosets, one arc per
/// enumerated element. The girth report is relative to the cap.
#[derive(Debug)]
pub struct LinkGraph {
    pub vertex: usize,
    pub a_cosets: Vec<BS12Element>,
    pub b_cosets: Vec<BS12Element>,
    pub arcs: Vec<(usize, usize)>,
    pub word_cap: usize,
    pub girth: Option<usize>,
}

fn coset_index(
    reps: &mut Vec<BS12Element>,
    g: &BS12Element,
    spec: fn(&BS12Element) -> bool,
) -> usize {
    for (i, r) in reps.iter().enumerate() {
        if spec(&bs12_compose(&bs12_invert(r), g)) {
            return i;
        }
    }
    reps.push(g.clone());
    reps.len() - 1
}

fn graph_girth(adj: &[Vec<usize>]) -> Option<usize> {
    let n = adj.len();
    let mut best: Option<usize> = None;
    for root in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    q.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| len < b) {
                        best = Some(len);
                    }
                }
            }
        }
    }
    best
}

pub fn link_graph(p: &PolygonOfGroups, vertex: usize, word_cap: usize) -> LinkGraph {
    assert!(word_cap >= 1);
    assert!(vertex < p.n);
    let ball = bs12_ball(word_cap);
    let mut a_cosets: Vec<BS12Element> = Vec::new();
    let mut b_cosets: Vec<BS12Element> = Vec::new();
    let mut arcs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (_, g) in &ball {
        let ai = coset_index(&mut a_cosets, g, |d| {
            subgroup_membership(d, &SubgroupSpec::AType)
        });
        let bi = coset_index(&mut b_cosets, g, |d| {
            subgroup_membership(d, &SubgroupSpec::BType)
        });
        arcs.insert((ai, bi));
    }
    let na = a_cosets.len();
    let mut adj = vec![Vec::new(); na + b_cosets.len()];
    for &(ai, bi) in &arcs {
        adj[ai].push(na + bi);
        adj[na + bi].push(ai);
    }
    let girth = graph_girth(&adj);
    LinkGraph { vertex, a_cosets, b_cosets, arcs: arcs.into_iter().collect(), word_cap, girth }
}

/// Local data of a path of three consecutive edges: which outer edge
/// meets the scaling-type end of the middle edge, and how that outer
/// edge sits in the shared vertex group.
#[derive(Debug, Clone)]
pub struct EdgePath {
    pub first: usize,
    pub middle: usize,
    pub last: usize,
    /// Edge id (first or last) sharing the scaling-type end.
    pub a_end_neighbour: usize,
    pub neighbour_type: EdgeGenType,
    pub neighbour_conjugator: BS12Element,
}

#[derive(Debug)]
pub enum PathVerdict {
    Trivial { certificates: Vec<String> },
}

/// The stabiliser of three consecutive edges lies in the intersection of
/// the middle edge group with a distinct edge group at the scaling-type
/// end, which is trivial; the verdict carries the fired certificates.
pub fn edge_path_stabiliser_check(
    _p: &PolygonOfGroups,
    path: &EdgePath,
) -> Result<PathVerdict, HigmanError> {
    if path.first == path.last {
        return Err(HigmanError::BadLocalData("the path folds back onto its first edge".into()));
    }
    if path.first == path.middle || path.middle == path.last {
        return Err(HigmanError::BadLocalData("consecutive edges coincide".into()));
    }
    if path.a_end_neighbour != path.first && path.a_end_neighbour != path.last {
        return Err(HigmanError::BadLocalData(
            "the marked neighbour is not an edge of the path".into(),
        ));
    }
    let verdict = edge_intersection_trivial(path.neighbour_type, &path.neighbour_conjugator);
    if !verdict.trivial {
        return Err(HigmanError::BadLocalData(
            "the neighbouring edge coincides with the middle edge in the vertex group".into(),
        ));
    }
    Ok(PathVerdict::Trivial {
        certificates: vec![
            "the middle edge includes as the scaling subgroup at the shared vertex".into(),
            verdict.certificate,
        ],
    })
}

#[derive(Debug)]
pub struct StarScan {
    pub vertices: usize,
    pub configurations: usize,
    pub all_trivial: bool,
    pub word_cap: usize,
}

/// Enumerate, at every polygon vertex, the distinct edges of the star
/// reachable at the word cap and check the middle edge group against
/// each of them. Scaling-coset representatives other than the marked
/// edge itself and all translation cosets are admissible neighbours.
pub fn star_path_scan(p: &PolygonOfGroups, word_cap: usize) -> StarScan {
    let ball = bs12_ball(word_cap);
    let mut a_reps: Vec<BS12Element> = Vec::new();
    let mut b_reps: Vec<BS12Element> = Vec::new();
    for (_, g) in &ball {
        coset_index(&mut a_reps, g, |d| subgroup_membership(d, &SubgroupSpec::AType));
        coset_index(&mut b_reps, g, |d| subgroup_membership(d, &SubgroupSpec::BType));
    }
    let mut configurations = 0;
    let mut all_trivial = true;
    for _vertex in 0..p.n {
        for rep in &a_reps {
            if rep.translation.is_zero() {
                // The marked edge itself; excluded as a neighbour.
                continue;
            }
            configurations += 1;
            if !edge_intersection_trivial(EdgeGenType::AType, rep).trivial {
                all_trivial = false;
            }
        }
        for rep in &b_reps {
            configurations += 1;
            if !edge_intersection_trivial(EdgeGenType::BType, rep).trivial {
                all_trivial = false;
            }
        }
    }
    StarScan { vertices: p.n, configurations, all_trivial, word_cap }
}

/// Polygonal complex data: faces are closed boundary walks of named
/// edges, at least four sides each.
#[derive(Debug, Clone)]
pub struct PolygonalComplex {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub faces: Vec<(String, Vec<(String, bool)>)>,
}

/// Subdivide each n-gon into n squares around its barycenter: each square
/// joins one original vertex, the midpoints of its two face sides, and
/// the face barycenter. Midpoint-to-barycenter spokes replace the
/// vertex-to-barycenter diagonals of the full barycentric subdivision.
pub fn subdivide_to_squares(p: &PolygonalComplex) -> Result<SquareComplex, HigmanError> {
    let bad = |m: String| HigmanError::BadPolygon(m);
    let vset: BTreeSet<&str> = p.vertices.iter().map(|s| s.as_str()).collect();
    if vset.len() != p.vertices.len() {
        return Err(bad("repeated vertex name".into()));
    }
    let mut ends: std::collections::BTreeMap<&str, (&str, &str)> = Default::default();
    for (name, u, w) in &p.edges {
        if !vset.contains(u.as_str()) || !vset.contains(w.as_str()) {
            return Err(bad(format!("edge {} has an unknown endpoint", name)));
        }
        if ends.insert(name.as_str(), (u.as_str(), w.as_str())).is_some() {
            return Err(bad(format!("repeated edge name {}", name)));
        }
    }

    let mut vertices: Vec<String> = p.vertices.clone();
    vertices.extend(p.edges.iter().map(|(name, _, _)| format!("{}:m", name)));
    vertices.extend(p.faces.iter().map(|(name, _)| format!("{}:c", name)));

    // Two halves per original edge, then one spoke per face side.
    let mut edges: Vec<(String, String, String)> = Vec::new();
    for (name, u, w) in &p.edges {
        edges.push((format!("{}:0", name), u.clone(), format!("{}:m", name)));
        edges.push((format!("{}:1", name), format!("{}:m", name), w.clone()));
    }

    let mut squares: Vec<(String, [(String, bool); 4])> = Vec::new();
    for (fname, walk) in &p.faces {
        if walk.len() < 4 {
            return Err(bad(format!("face {} has {} sides, need at least 4", fname, walk.len())));
        }
        // Trace the walk to find the corner vertices.
        let mut corners: Vec<&str> = Vec::new();
        let mut at: Option<&str> = None;
        for (ename, fwd) in walk {
            let &(u, w) = ends
                .get(ename.as_str())
                .ok_or_else(|| bad(format!("face {} uses unknown edge {}", fname, ename)))?;
            let (tail, head) = if *fwd { (u, w) } else { (w, u) };
            if let Some(cur) = at {
                if cur != tail {
                    return Err(bad(format!("face {} walk breaks at edge {}", fname, ename)));
                }
            }
            corners.push(tail);
            at = Some(head);
        }
        if at != Some(corners[0]) {
            return Err(bad(format!("face {} walk does not close", fname)));
        }

        let n = walk.len();
        for (i, (ename, _)) in walk.iter().enumerate() {
            edges.push((format!("{}:s{}", fname, i), format!("{}:m", ename), format!("{}:c", fname)));
        }
        // Corner i is the tail of side i and the head of side i-1; its
        // square runs corner, midpoint of side i, barycenter, midpoint
        // of side i-1.
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let (ei, fwd_i) = (&walk[i].0, walk[i].1);
            let (ep, fwd_p) = (&walk[prev].0, walk[prev].1);
            let out_half = if fwd_i {
                (format!("{}:0", ei), true)
            } else {
                (format!("{}:1", ei), false)
            };
            let in_half = if fwd_p {
                (format!("{}:1", ep), true)
            } else {
                (format!("{}:0", ep), false)
            };
            squares.push((
                format!("{}:q{}", fname, i),
                [
                    out_half,
                    (format!("{}:s{}", fname, i), true),
                    (format!("{}:s{}", fname, prev), false),
                    in_half,
                ],
            ));
        }
    }

    SquareComplex::build(ComplexData { vertices, edges, squares })
        .map_err(|e| bad(format!("subdivision is not a valid complex: {}", e)))
}

/// A finite patch of the polygonal complex: one base n-gon plus the given
/// number of extra n-gons glued along each base edge.
pub fn polygon_star_patch(n: usize, neighbours: usize) -> PolygonalComplex {
    assert!(n >= 4);
    let vn = |i: usize| format!("v{}", i % n);
    let mut vertices: Vec<String> = (0..n).map(vn).collect();
    let mut edges: Vec<(String, String, String)> =
        (0..n).map(|i| (format!("s{}", i), vn(i), vn(i + 1))).collect();
    let base_walk: Vec<(String, bool)> = (0..n).map(|i| (format!("s{}", i), true)).collect();
    let mut faces = vec![("base".to_string(), base_walk)];
    for i in 0..n {
        for j in 0..neighbours {
            let w = |k: usize| format!("w{}_{}_{}", i, j, k);
            for k in 1..n - 1 {
                vertices.push(w(k));
            }
            let mut chain = vec![vn(i + 1)];
            chain.extend((1..n - 1).map(w));
            chain.push(vn(i));
            let mut walk = vec![(format!("s{}", i), true)];
            for (k, pair) in chain.windows(2).enumerate() {
                let name = format!("f{}_{}_{}", i, j, k);
                edges.push((name.clone(), pair[0].clone(), pair[1].clone()));
                walk.push((name, true));
            }
            faces.push((format!("face{}_{}", i, j), walk));
        }
    }
    PolygonalComplex { vertices, edges, faces }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(k: i64, num: i64, exp: u32) -> BS12Element {
        BS12Element { scale_exp: k, translation: DyadicRational::new(big(num), exp) }
    }

    #[test]
    fn relation_and_basic_arithmetic() {
        assert!(relation_holds());
        let aba = word_to_element("abA").unwrap();
        assert_eq!(aba, elem(0, 2, 0));

        let g = word_to_element("aBab").unwrap();
        assert_eq!(bs12_compose(&g, &bs12_invert(&g)), bs12_identity());

        let h = word_to_element("Ba").unwrap();
        assert_eq!(h, elem(1, -1, 0));
        assert_eq!(bs12_apply(&h, &DyadicRational::integer(1)), DyadicRational::integer(1));
    }

    #[test]
    fn word_evaluation_matches_the_normal_form() {
        assert_eq!(word_to_element("").unwrap(), bs12_identity());
        assert!(word_normal_form("").unwrap().is_identity());

        let g = word_to_element("aBAb").unwrap();
        assert_eq!(g, elem(0, -1, 0));
        assert_eq!(g, bs12_invert(&gen_b()));
        assert!(!word_normal_form("aBAb").unwrap().is_identity());

        assert!(matches!(word_to_element("axb"), Err(HigmanError::BadSymbol('x'))));
    }

    fn all_words(len: usize) -> Vec<String> {
        let mut out = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &layer {
                for c in ['a', 'b', 'A', 'B'] {
                    next.push(format!("{}{}", w, c));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    #[test]
    fn affine_representation_is_faithful_on_short_words() {
        for w in all_words(6) {
            let affine_trivial = word_to_element(&w).unwrap() == bs12_identity();
            let rewriting_trivial = word_normal_form(&w).unwrap().is_identity();
            assert_eq!(affine_trivial, rewriting_trivial, "word {:?}", w);
        }
        // Pairwise: equal elements exactly when equal normal forms.
        let words = all_words(3);
        for w1 in &words {
            for w2 in &words {
                let same_affine = word_to_element(w1).unwrap() == word_to_element(w2).unwrap();
                let same_nf = word_normal_form(w1).unwrap() == word_normal_form(w2).unwrap();
                assert_eq!(same_affine, same_nf, "{:?} vs {:?}", w1, w2);
            }
        }
    }

    /// Literal string rewriting, as a cross-check of the incremental
    /// normal form: push a right (a b -> b b a, a B -> B B a), push A
    /// left (b A -> A b b, B A -> A B B), cancel inverse pairs, then
    /// settle the stuck word A^p (b|B)^m a^q arithmetically.
    fn string_normal_form(word: &str) -> NormalForm {
        let mut w: Vec<char> = word.chars().collect();
        'rewrite: loop {
            for i in 0..w.len().saturating_sub(1) {
                let pair = (w[i], w[i + 1]);
                let sub: Option<Vec<char>> = match pair {
                    ('a', 'A') | ('A', 'a') | ('b', 'B') | ('B', 'b') => Some(vec![]),
                    ('a', 'b') => Some(vec!['b', 'b', 'a']),
                    ('a', 'B') => Some(vec!['B', 'B', 'a']),
                    ('b', 'A') => Some(vec!['A', 'b', 'b']),
                    ('B', 'A') => Some(vec!['A', 'B', 'B']),
                    _ => None,
                };
                if let Some(sub) = sub {
                    w.splice(i..i + 2, sub);
                    continue 'rewrite;
                }
            }
            break;
        }
        let mut p = 0u32;
        let mut m = big(0);
        let mut q = 0u32;
        for c in w {
            match c {
                'A' => p += 1,
                'b' => m += 1,
                'B' => m -= 1,
                _ => q += 1,
            }
        }
        nf_settle(&mut p, &mut m, &mut q);
        NormalForm { neg_scale: p, shift: m, pos_scale: q }
    }

    #[test]
    fn incremental_normal_form_agrees_with_string_rewriting() {
        for w in all_words(5) {
            assert_eq!(word_normal_form(&w).unwrap(), string_normal_form(&w), "word {:?}", w);
        }
    }

    #[test]
    fn membership_in_edge_subgroups() {
        let a3 = word_to_element("aaa").unwrap();
        assert!(subgroup_membership(&a3, &SubgroupSpec::AType));

        let half = elem(0, 1, 1);
        assert!(!subgroup_membership(&half, &SubgroupSpec::BType));

        // Conjugating the translation subgroup by the scaling generator
        // doubles every shift, so an odd translation falls outside.
        let conj = SubgroupSpec::ConjugateB(gen_a());
        assert!(!subgroup_membership(&gen_b(), &conj));
        assert!(subgroup_membership(&elem(0, 2, 0), &conj));
    }

    #[test]
    fn edge_intersections_and_their_certificates() {
        let by_b = edge_intersection_trivial(EdgeGenType::AType, &gen_b());
        assert!(by_b.trivial);
        assert!(by_b.certificate.contains("1 - 2^j"));

        let direct = edge_intersection_trivial(EdgeGenType::BType, &bs12_identity());
        assert!(direct.trivial);

        let same = edge_intersection_trivial(EdgeGenType::AType, &gen_a());
        assert!(!same.trivial);
    }

    #[test]
    fn scaling_conjugates_intersect_trivially_within_the_ball() {
        for (_, g) in bs12_ball(5) {
            if subgroup_membership(&g, &SubgroupSpec::AType) {
                continue;
            }
            assert!(edge_intersection_trivial(EdgeGenType::AType, &g).trivial, "{:?}", g);
        }
    }

    #[test]
    fn link_graph_at_cap_one_is_a_star() {
        let p = PolygonOfGroups::new(5).unwrap();
        let link = link_graph(&p, 0, 1);
        assert_eq!(link.a_cosets.len(), 3);
        assert_eq!(link.b_cosets.len(), 3);
        assert_eq!(link.arcs.len(), 5);
        assert_eq!(link.girth, None);
    }

    #[test]
    fn link_graph_reaches_girth_four() {
        let p = PolygonOfGroups::new(5).unwrap();
        let at4 = link_graph(&p, 0, 4);
        assert_eq!(at4.girth, Some(4));
        // One arc per element: the two subgroups meet trivially, so no
        // two elements share both cosets.
        assert_eq!(at4.arcs.len(), bs12_ball(4).len());

        let at6 = link_graph(&p, 0, 6);
        assert!(at6.girth.unwrap() <= at4.girth.unwrap());
    }

    #[test]
    fn three_edge_paths_have_trivial_stabiliser_data() {
        let p = PolygonOfGroups::new(5).unwrap();
        let path = EdgePath {
            first: 0,
            middle: 1,
            last: 2,
            a_end_neighbour: 0,
            neighbour_type: EdgeGenType::BType,
            neighbour_conjugator: bs12_identity(),
        };
        let PathVerdict::Trivial { certificates } =
            edge_path_stabiliser_check(&p, &path).unwrap();
        assert_eq!(certificates.len(), 2);

        let folded = EdgePath { last: 0, ..path.clone() };
        assert!(matches!(
            edge_path_stabiliser_check(&p, &folded),
            Err(HigmanError::BadLocalData(_))
        ));

        let doubled = EdgePath {
            neighbour_type: EdgeGenType::AType,
            neighbour_conjugator: gen_a(),
            ..path
        };
        assert!(matches!(
            edge_path_stabiliser_check(&p, &doubled),
            Err(HigmanError::BadLocalData(_))
        ));
    }

    #[test]
    fn star_scan_is_exhaustively_trivial() {
        let p = PolygonOfGroups::new(5).unwrap();
        let scan = star_path_scan(&p, 4);
        assert!(scan.all_trivial);
        assert!(scan.configurations > 0);
        assert_eq!(scan.vertices, 5);
    }

    fn single_face(n: usize) -> PolygonalComplex {
        let vn = |i: usize| format!("v{}", i % n);
        PolygonalComplex {
            vertices: (0..n).map(vn).collect(),
            edges: (0..n).map(|i| (format!("s{}", i), vn(i), vn(i + 1))).collect(),
            faces: vec![("f".into(), (0..n).map(|i| (format!("s{}", i), true)).collect())],
        }
    }

    #[test]
    fn pentagon_subdivides_into_five_squares() {
        let x = subdivide_to_squares(&single_face(5)).unwrap();
        assert_eq!(x.square_count(), 5);
        assert_eq!(x.vertex_count(), 11);
        assert_eq!(x.edge_count(), 15);
        assert_eq!(x.euler_characteristic(), 1);
        assert!(x.is_nonpositively_curved().is_ok());
    }

    #[test]
    fn square_face_gives_the_two_by_two_refinement() {
        let x = subdivide_to_squares(&single_face(4)).unwrap();
        assert_eq!(x.square_count(), 4);
        assert_eq!(x.euler_characteristic(), 1);
        let g = crate::shapes::grid(2, 2);
        assert_eq!(x.vertex_count(), g.vertex_count());
        assert_eq!(x.edge_count(), g.edge_count());
    }

    #[test]
    fn triangles_are_rejected() {
        let err = subdivide_to_squares(&single_face(3)).unwrap_err();
        assert!(matches!(err, HigmanError::BadPolygon(_)));
    }

    #[test]
    fn pentagon_star_patch_subdivision_is_nonpositively_curved() {
        let patch = polygon_star_patch(5, 1);
        let x = subdivide_to_squares(&patch).unwrap();
        assert_eq!(x.square_count(), 5 * (1 + 5));
        assert_eq!(x.euler_characteristic(), 1);
        assert!(x.is_connected());
        assert!(x.is_nonpositively_curved().is_ok());
    }

    #[test]
    fn polygon_regimes() {
        assert!(PolygonOfGroups::new(3).is_err());
        assert!(!PolygonOfGroups::new(4).unwrap().hyperbolic_regime());
        assert!(PolygonOfGroups::new(5).unwrap().hyperbolic_regime());
    }
}
