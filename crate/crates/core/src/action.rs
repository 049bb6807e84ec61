//! Finite truncations of group actions: named partial automorphisms as
//! generators, word enumeration, stabilisers, and the acylindricity and
//! WPD probes. A "pass" is always relative to the word cap; failures are
//! absolute.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::complex::{EdgeId, SquareComplex, SquareId, VertexId};
use crate::gridlab::PartialAutomorphism;
use crate::metric;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("generator {0}: {1}")]
    BadGenerator(String, String),
    #[error("unknown letter {0}")]
    BadWord(String),
    #[error("bad axis: {0}")]
    BadAxis(String),
    #[error("the path is not a geodesic")]
    NotGeodesic,
    #[error("the power leaves the truncation for every base point")]
    AxisTooShort,
    #[error("a translate leaves the truncation")]
    OutOfTruncation,
}

/// A group acting on a finite complex, truncated two ways: the space is a
/// finite ball (generators are partial, undefined where a translate falls
/// off the edge) and the group is enumerated up to a word-length cap.
#[derive(Debug)]
pub struct FiniteAction {
    pub complex: SquareComplex,
    pub generators: Vec<(String, PartialAutomorphism)>,
    pub word_cap: usize,
}

/// A group element reached within the word cap. Distinctness is decided
/// by the action on the whole finite complex, not by the word.
#[derive(Debug, Clone)]
pub struct GroupElement {
    pub word: Vec<String>,
    pub map: PartialAutomorphism,
}

impl GroupElement {
    /// Defined at both vertices and fixing each.
    fn fixes_pair(&self, u: VertexId, v: VertexId) -> bool {
        self.map.vertex[u.index()] == Some(u) && self.map.vertex[v.index()] == Some(v)
    }
}

#[derive(Debug, Clone, Default)]
pub struct CellSet {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub squares: Vec<SquareId>,
}

pub struct Stabiliser {
    pub fixed_set: CellSet,
    pub elements: Vec<GroupElement>,
}

type ActionKey = (Vec<Option<VertexId>>, Vec<Option<EdgeId>>, Vec<Option<SquareId>>);

fn action_key(p: &PartialAutomorphism) -> ActionKey {
    (p.vertex.clone(), p.edge.clone(), p.square.clone())
}

/// `big` agrees with `small` everywhere `small` is defined. Such a pair
/// are windows of the same group element, the larger the more faithful.
fn extends(big: &PartialAutomorphism, small: &PartialAutomorphism) -> bool {
    small.vertex.iter().zip(&big.vertex).all(|(s, b)| s.is_none() || s == b)
        && small.edge.iter().zip(&big.edge).all(|(s, b)| s.is_none() || s == b)
        && small.square.iter().zip(&big.square).all(|(s, b)| s.is_none() || s == b)
}

fn invert(p: &PartialAutomorphism) -> PartialAutomorphism {
    let mut vertex = vec![None; p.vertex.len()];
    let mut edge = vec![None; p.edge.len()];
    let mut square = vec![None; p.square.len()];
    for (i, o) in p.vertex.iter().enumerate() {
        if let Some(m) = o {
            vertex[m.index()] = Some(VertexId(i as u32));
        }
    }
    for (i, o) in p.edge.iter().enumerate() {
        if let Some(m) = o {
            edge[m.index()] = Some(EdgeId(i as u32));
        }
    }
    for (i, o) in p.square.iter().enumerate() {
        if let Some(m) = o {
            square[m.index()] = Some(SquareId(i as u32));
        }
    }
    PartialAutomorphism { vertex, edge, square }
}

impl FiniteAction {
    pub fn new(
        complex: SquareComplex,
        generators: Vec<(String, PartialAutomorphism)>,
        word_cap: usize,
    ) -> Result<Self, ActionError> {
        for (name, p) in &generators {
            p.validate(&complex)
                .map_err(|e| ActionError::BadGenerator(name.clone(), e.to_string()))?;
        }
        Ok(FiniteAction { complex, generators, word_cap })
    }

    /// Generators plus derived inverses, deduplicated by their action.
    fn letters(&self) -> Vec<(String, PartialAutomorphism)> {
        let mut letters: Vec<(String, PartialAutomorphism)> = Vec::new();
        let mut seen: BTreeSet<ActionKey> = BTreeSet::new();
        for (name, p) in &self.generators {
            if seen.insert(action_key(p)) {
                letters.push((name.clone(), p.clone()));
            }
        }
        for (name, p) in &self.generators {
            let q = invert(p);
            if seen.insert(action_key(&q)) {
                letters.push((format!("{}^-1", name), q));
            }
        }
        letters
    }

    /// All distinct elements of word length at most the cap, in
    /// breadth-first order, each with a shortest word. An element that
    /// another one extends is a smaller window of the same group element
    /// (a composite like t t^-1 is the identity with a clipped domain)
    /// and is dropped, so probes never double-count it.
    pub fn enumerate_elements(&self) -> Vec<GroupElement> {
        let letters = self.letters();
        let identity = PartialAutomorphism::identity(&self.complex);
        let mut seen: BTreeSet<ActionKey> = BTreeSet::new();
        seen.insert(action_key(&identity));
        let mut queue: VecDeque<GroupElement> =
            VecDeque::from([GroupElement { word: vec![], map: identity }]);
        let mut out: Vec<GroupElement> = Vec::new();
        while let Some(el) = queue.pop_front() {
            if el.word.len() < self.word_cap {
                for (name, lmap) in &letters {
                    let map = PartialAutomorphism::compose(&el.map, lmap);
                    if seen.insert(action_key(&map)) {
                        let mut word = el.word.clone();
                        word.push(name.clone());
                        queue.push_back(GroupElement { word, map });
                    }
                }
            }
            out.push(el);
        }
        let keep: Vec<bool> = out
            .iter()
            .enumerate()
            .map(|(i, el)| {
                !out.iter().enumerate().any(|(j, other)| j != i && extends(&other.map, &el.map))
            })
            .collect();
        out.into_iter().zip(keep).filter_map(|(el, k)| k.then_some(el)).collect()
    }

    /// The element named by a word; letters are generator names, with
    /// `^-1` suffix for the derived inverses. The empty word is the
    /// identity.
    pub fn element_of_word(&self, word: &[String]) -> Result<PartialAutomorphism, ActionError> {
        let letters = self.letters();
        let mut map = PartialAutomorphism::identity(&self.complex);
        for letter in word {
            let lmap = letters
                .iter()
                .find(|(n, _)| n == letter)
                .map(|(_, m)| m)
                .ok_or_else(|| ActionError::BadWord(letter.clone()))?;
            map = PartialAutomorphism::compose(&map, lmap);
        }
        Ok(map)
    }
}

fn fixes_set(p: &PartialAutomorphism, cells: &CellSet) -> bool {
    cells.vertices.iter().all(|&v| p.vertex[v.index()] == Some(v))
        && cells.edges.iter().all(|&e| p.edge[e.index()] == Some(e))
        && cells.squares.iter().all(|&s| p.square[s.index()] == Some(s))
}

/// All elements within the word cap fixing the cell set pointwise.
pub fn stabiliser(a: &FiniteAction, cells: &CellSet) -> Stabiliser {
    let x = &a.complex;
    assert!(cells.vertices.iter().all(|v| v.index() < x.vertex_count()));
    assert!(cells.edges.iter().all(|e| e.index() < x.edge_count()));
    assert!(cells.squares.iter().all(|s| s.index() < x.square_count()));
    let elements =
        a.enumerate_elements().into_iter().filter(|el| fixes_set(&el.map, cells)).collect();
    Stabiliser { fixed_set: cells.clone(), elements }
}

#[derive(Debug)]
pub struct AcylWitness {
    pub pair: (VertexId, VertexId),
    pub distance: u32,
    pub fixing: Vec<GroupElement>,
}

/// Verdict of a probe; `pass` is relative to the word cap it reports.
#[derive(Debug)]
pub struct ProbeReport<W> {
    pub pass: bool,
    pub word_cap: usize,
    pub scanned: usize,
    pub witness: Option<W>,
}

/// Scan all vertex pairs at distance at least `l` for one fixed pointwise
/// by more than `n` elements. Pairs in different components count as far
/// apart. The scan is sharded across threads; the verdict is the witness
/// with the least vertex pair, independent of scheduling.
pub fn weak_acylindricity_probe(a: &FiniteAction, l: u32, n: usize) -> ProbeReport<AcylWitness> {
    let x = &a.complex;
    let elements = a.enumerate_elements();
    let vcount = x.vertex_count();
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(vcount.max(1));
    let chunk = vcount.div_ceil(workers);

    struct Shard {
        scanned: usize,
        found: Option<(usize, usize)>,
    }
    let shards: Vec<Shard> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let elements = &elements;
                scope.spawn(move || {
                    let mut shard = Shard { scanned: 0, found: None };
                    for ui in w * chunk..((w + 1) * chunk).min(vcount) {
                        let u = VertexId(ui as u32);
                        let dist = metric::distances_from(x, u);
                        #[allow(clippy::needless_range_loop)]
                        for vi in ui + 1..vcount {
                            if dist[vi] < l {
                                continue;
                            }
                            shard.scanned += 1;
                            if shard.found.is_some() {
                                continue;
                            }
                            let v = VertexId(vi as u32);
                            let fixing =
                                elements.iter().filter(|el| el.fixes_pair(u, v)).count();
                            if fixing > n {
                                shard.found = Some((ui, vi));
                            }
                        }
                    }
                    shard
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("probe worker")).collect()
    });

    let scanned = shards.iter().map(|s| s.scanned).sum();
    let first = shards.iter().filter_map(|s| s.found).min();
    let witness = first.map(|(ui, vi)| {
        let (u, v) = (VertexId(ui as u32), VertexId(vi as u32));
        AcylWitness {
            pair: (u, v),
            distance: metric::distances_from(x, u)[vi],
            fixing: elements.iter().filter(|el| el.fixes_pair(u, v)).cloned().collect(),
        }
    });
    ProbeReport { pass: witness.is_none(), word_cap: a.word_cap, scanned, witness }
}

#[derive(Debug)]
pub struct WpdWitness {
    pub base: VertexId,
    pub translate: VertexId,
    pub fixing: Vec<GroupElement>,
}

/// For each axis point x with g^m x still defined, count the elements
/// fixing both x and g^m x. The word g must shift the axis path.
pub fn weak_wpd_probe(
    a: &FiniteAction,
    g: &[String],
    axis: &[VertexId],
    m: usize,
    n: usize,
) -> Result<ProbeReport<WpdWitness>, ActionError> {
    assert!(m >= 1);
    if axis.len() < 2 {
        return Err(ActionError::BadAxis("axis needs at least two vertices".into()));
    }
    let g = a.element_of_word(g)?;
    let imgs: Vec<Option<VertexId>> = axis.iter().map(|&v| g.vertex[v.index()]).collect();
    let shift = imgs
        .iter()
        .enumerate()
        .find_map(|(i, o)| {
            let img = (*o)?;
            axis.iter().position(|&w| w == img).map(|p| p as i64 - i as i64)
        })
        .ok_or_else(|| ActionError::BadAxis("no image lands on the axis".into()))?;
    if shift < 1 {
        return Err(ActionError::BadAxis("the word does not shift the axis forward".into()));
    }
    for (i, o) in imgs.iter().enumerate() {
        if i + (shift as usize) < axis.len() && *o != Some(axis[i + shift as usize]) {
            return Err(ActionError::BadAxis(format!(
                "image of axis point {} breaks the translation",
                i
            )));
        }
    }

    let mut power = PartialAutomorphism::identity(&a.complex);
    for _ in 0..m {
        power = PartialAutomorphism::compose(&power, &g);
    }
    let elements = a.enumerate_elements();
    let mut scanned = 0usize;
    let mut witness = None;
    for &x in axis {
        let Some(gx) = power.vertex[x.index()] else { continue };
        scanned += 1;
        let fixing: Vec<&GroupElement> =
            elements.iter().filter(|el| el.fixes_pair(x, gx)).collect();
        if fixing.len() > n {
            witness = Some(WpdWitness {
                base: x,
                translate: gx,
                fixing: fixing.into_iter().cloned().collect(),
            });
            break;
        }
    }
    if scanned == 0 {
        return Err(ActionError::AxisTooShort);
    }
    Ok(ProbeReport { pass: witness.is_none(), word_cap: a.word_cap, scanned, witness })
}

/// Combinatorial Hausdorff distance between a sub-geodesic and its
/// translate under the word h.
pub fn translate_hausdorff(
    a: &FiniteAction,
    gamma: &[VertexId],
    h: &[String],
    gamma_prime: &[VertexId],
) -> Result<u32, ActionError> {
    let x = &a.complex;
    if gamma.len() < 2 {
        return Err(ActionError::BadAxis("geodesic needs at least two vertices".into()));
    }
    for t in 0..gamma.len() - 1 {
        if !x.neighbours(gamma[t]).any(|(_, w)| w == gamma[t + 1]) {
            return Err(ActionError::NotGeodesic);
        }
    }
    let span = metric::distances_from(x, gamma[0])[gamma[gamma.len() - 1].index()];
    if span as usize != gamma.len() - 1 {
        return Err(ActionError::NotGeodesic);
    }
    if gamma_prime.is_empty()
        || !gamma.windows(gamma_prime.len()).any(|w| w == gamma_prime)
    {
        return Err(ActionError::BadAxis("the sub-path does not lie on the geodesic".into()));
    }
    let h = a.element_of_word(h)?;
    let translated: Vec<VertexId> = gamma_prime
        .iter()
        .map(|&v| h.vertex[v.index()].ok_or(ActionError::OutOfTruncation))
        .collect::<Result<_, _>>()?;

    let mut hausdorff = 0u32;
    for (from, to) in [(&gamma_prime.to_vec(), &translated), (&translated, &gamma_prime.to_vec())]
    {
        for &p in from.iter() {
            let d = metric::distances_from(x, p);
            let nearest = to.iter().map(|&q| d[q.index()]).min().expect("nonempty");
            hausdorff = hausdorff.max(nearest);
        }
    }
    Ok(hausdorff)
}
