//! Constructors for standard complexes used throughout the crate: grids,
//! strips, staircases, trees, unions of unit cells, and small gluing
//! examples. Cell names follow `x_y` / `hx_y` / `vx_y` / `cx_y` grid
//! coordinates so tests can address cells positionally.

use std::collections::BTreeSet;

use crate::complex::{CombinatorialMap, ComplexData, SquareComplex};

pub fn vertex_name(x: i64, y: i64) -> String {
    format!("{}_{}", x, y)
}

pub(crate) fn h_edge(x: i64, y: i64) -> String {
    format!("h{}_{}", x, y)
}

pub(crate) fn v_edge(x: i64, y: i64) -> String {
    format!("v{}_{}", x, y)
}

pub(crate) fn cell_name(x: i64, y: i64) -> String {
    format!("c{}_{}", x, y)
}

/// The complex spanned by the given unit cells: all corner vertices, all
/// boundary edges, one square per cell, glued along shared edges.
pub fn from_cells_complex(cells: &[(i64, i64)]) -> SquareComplex {
    let cell_set: BTreeSet<(i64, i64)> = cells.iter().copied().collect();
    let mut vertices = BTreeSet::new();
    let mut h_edges = BTreeSet::new();
    let mut v_edges = BTreeSet::new();
    for &(x, y) in &cell_set {
        for (dx, dy) in [(0, 0), (1, 0), (1, 1), (0, 1)] {
            vertices.insert((x + dx, y + dy));
        }
        h_edges.insert((x, y));
        h_edges.insert((x, y + 1));
        v_edges.insert((x, y));
        v_edges.insert((x + 1, y));
    }
    let data = ComplexData {
        vertices: vertices.iter().map(|&(x, y)| vertex_name(x, y)).collect(),
        edges: h_edges
            .iter()
            .map(|&(x, y)| (h_edge(x, y), vertex_name(x, y), vertex_name(x + 1, y)))
            .chain(
                v_edges
                    .iter()
                    .map(|&(x, y)| (v_edge(x, y), vertex_name(x, y), vertex_name(x, y + 1))),
            )
            .collect(),
        squares: cell_set
            .iter()
            .map(|&(x, y)| {
                (
                    cell_name(x, y),
                    [
                        (h_edge(x, y), true),
                        (v_edge(x + 1, y), true),
                        (h_edge(x, y + 1), false),
                        (v_edge(x, y), false),
                    ],
                )
            })
            .collect(),
    };
    SquareComplex::build(data).expect("cell union is a valid complex")
}

/// A w-by-h grid of squares; vertices (x, y) for 0 <= x <= w, 0 <= y <= h.
pub fn grid(w: i64, h: i64) -> SquareComplex {
    let mut cells = Vec::new();
    for x in 0..w {
        for y in 0..h {
            cells.push((x, y));
        }
    }
    from_cells_complex(&cells)
}

/// A path of n edges and no squares, vertices 0_0 .. n_0.
pub fn path_complex(n: i64) -> SquareComplex {
    let data = ComplexData {
        vertices: (0..=n).map(|x| vertex_name(x, 0)).collect(),
        edges: (0..n)
            .map(|x| (h_edge(x, 0), vertex_name(x, 0), vertex_name(x + 1, 0)))
            .collect(),
        squares: vec![],
    };
    SquareComplex::build(data).expect("path is a valid complex")
}

/// A single vertex, no edges.
pub fn point_complex() -> SquareComplex {
    SquareComplex::build(ComplexData {
        vertices: vec![vertex_name(0, 0)],
        edges: vec![],
        squares: vec![],
    })
    .expect("point is a valid complex")
}

/// Monotone staircase of `steps` unit steps, each step a `run`-wide row:
/// row r spans cells x in [r*offset, r*offset + run), y = r.
pub fn staircase(steps: i64, run: i64, offset: i64) -> SquareComplex {
    let mut cells = Vec::new();
    for r in 0..steps {
        for x in 0..run {
            cells.push((r * offset + x, r));
        }
    }
    from_cells_complex(&cells)
}

/// An L of arm lengths a and b (cells along the positive x and y axes plus
/// the corner cell).
pub fn l_shape(a: i64, b: i64) -> SquareComplex {
    let mut cells = vec![(0, 0)];
    for x in 1..=a {
        cells.push((x, 0));
    }
    for y in 1..=b {
        cells.push((0, y));
    }
    from_cells_complex(&cells)
}

/// A U: two vertical arms of height h joined by a w-wide base row.
pub fn u_shape(w: i64, h: i64) -> SquareComplex {
    let mut cells = Vec::new();
    for x in 0..w {
        cells.push((x, 0));
    }
    for y in 1..=h {
        cells.push((0, y));
        cells.push((w - 1, y));
    }
    from_cells_complex(&cells)
}

/// Two unit squares sharing exactly one vertex (1, 1).
pub fn two_squares_sharing_vertex() -> SquareComplex {
    from_cells_complex(&[(0, 0), (1, 1)])
}

/// The inclusion of grid(w1, h1) into grid(w2, h2) translated by (ox, oy).
pub fn grid_inclusion(
    w1: i64,
    h1: i64,
    w2: i64,
    h2: i64,
    ox: i64,
    oy: i64,
) -> (SquareComplex, SquareComplex, CombinatorialMap) {
    assert!(w1 + ox <= w2 && h1 + oy <= h2);
    let small = grid(w1, h1);
    let big = grid(w2, h2);
    let map = translate_map(&small, &big, ox, oy);
    (small, big, map)
}

/// Map between two grid-coordinate complexes sending (x, y) to (x+ox, y+oy).
/// Panics when a translated cell is missing from the target.
pub fn translate_map(
    source: &SquareComplex,
    target: &SquareComplex,
    ox: i64,
    oy: i64,
) -> CombinatorialMap {
    let shift = |name: &str| -> String {
        let (prefix, coords) = match name.chars().next().unwrap() {
            'h' | 'v' | 'c' => (&name[..1], &name[1..]),
            _ => ("", name),
        };
        let (x, y) = coords.split_once('_').expect("grid-coordinate name");
        let x: i64 = x.parse().expect("x coordinate");
        let y: i64 = y.parse().expect("y coordinate");
        format!("{}{}_{}", prefix, x + ox, y + oy)
    };
    let vertex_map = source
        .vertices()
        .map(|v| {
            let name = shift(source.vertex_name(v));
            target.vertex_by_name(&name).unwrap_or_else(|| panic!("target vertex {}", name))
        })
        .collect();
    let edge_map = source
        .edge_ids()
        .map(|e| {
            let name = shift(source.edge_name(e));
            target.edge_by_name(&name).unwrap_or_else(|| panic!("target edge {}", name))
        })
        .collect();
    let square_map = source
        .square_ids()
        .map(|s| {
            let name = shift(source.square_name(s));
            target.square_by_name(&name).unwrap_or_else(|| panic!("target square {}", name))
        })
        .collect();
    CombinatorialMap { vertex_map, edge_map, square_map }
}

/// A 2x1 strip folded onto a single square across its middle edge:
/// (source, target, map). The map is cellular but not reduced.
pub fn folded_pair() -> (SquareComplex, SquareComplex, CombinatorialMap) {
    let strip = grid(2, 1);
    let square = grid(1, 1);
    let fold = |name: &str| -> String {
        let (prefix, coords) = match name.chars().next().unwrap() {
            'h' | 'v' | 'c' => (&name[..1], &name[1..]),
            _ => ("", name),
        };
        let (x, y) = coords.split_once('_').unwrap();
        let x: i64 = x.parse().unwrap();
        // Cells and horizontal edges at x=1 fold back to x=0; the vertical
        // edge line x=2 folds to x=0.
        let fx = match prefix {
            "" | "v" => {
                if x == 2 {
                    0
                } else {
                    x
                }
            }
            _ => {
                if x == 1 {
                    0
                } else {
                    x
                }
            }
        };
        format!("{}{}_{}", prefix, fx, y)
    };
    let vertex_map = strip
        .vertices()
        .map(|v| square.vertex_by_name(&fold(strip.vertex_name(v))).unwrap())
        .collect();
    let edge_map = strip
        .edge_ids()
        .map(|e| square.edge_by_name(&fold(strip.edge_name(e))).unwrap())
        .collect();
    let square_map = strip
        .square_ids()
        .map(|s| square.square_by_name(&fold(strip.square_name(s))).unwrap())
        .collect();
    (strip, square, CombinatorialMap { vertex_map, edge_map, square_map })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_cell_counts() {
        let g = grid(3, 2);
        assert_eq!(g.vertex_count(), 12);
        assert_eq!(g.edge_count(), 17);
        assert_eq!(g.square_count(), 6);
        assert!(g.is_connected());
        assert_eq!(g.euler_characteristic(), 1);
    }

    #[test]
    fn staircase_counts() {
        // Two steps of run 2 with offset 1: cells (0,0),(1,0),(1,1),(2,1).
        let s = staircase(2, 2, 1);
        assert_eq!(s.square_count(), 4);
        assert!(s.is_nonpositively_curved().is_ok());
    }

    #[test]
    fn u_shape_is_nonpositively_curved() {
        assert!(u_shape(3, 2).is_nonpositively_curved().is_ok());
    }

    #[test]
    fn shared_vertex_pair_counts() {
        let x = two_squares_sharing_vertex();
        assert_eq!(x.vertex_count(), 7);
        assert_eq!(x.edge_count(), 8);
        assert_eq!(x.square_count(), 2);
        let shared = x.vertex_by_name("1_1").unwrap();
        assert_eq!(x.vertex_link(shared).corner_count(), 2);
        assert_eq!(x.vertex_link(shared).component_count(), 2);
    }
}
