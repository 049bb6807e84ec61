//! Acceptance gate: one test per numbered criterion. Every test generates
//! its own instances from a fixed seed, checks the property at zero
//! tolerance unless stated otherwise, and enforces a wall-clock budget.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqc_core::action::{
    self, weak_acylindricity_probe, weak_wpd_probe, CellSet, FiniteAction,
};
use sqc_core::complex::{CombinatorialMap, ComplexData, SquareComplex, VertexId};
use sqc_core::diagram::{self, DiscDiagram, Quadrangle};
use sqc_core::euclid;
use sqc_core::gridlab::{self, PartialAutomorphism};
use sqc_core::higman;
use sqc_core::hyperplane;
use sqc_core::metric::{self, MetricError};
use sqc_core::{planar, shapes};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn budget(criterion: usize, start: Instant, seconds: u64, detail: &str) {
    let dt = start.elapsed();
    println!("criterion {:02}: pass ({}, {:.2?})", criterion, detail, dt);
    assert!(
        dt < Duration::from_secs(seconds),
        "criterion {:02} exceeded its {}s budget: {:.2?}",
        criterion,
        seconds,
        dt
    );
}

// ---------------------------------------------------------------- fixtures

/// Every empty cell of the padded bounding box must reach the outside:
/// an independent check that the region encloses no hole.
fn hole_free(cells: &BTreeSet<(i64, i64)>) -> bool {
    enclosed(cells).is_empty()
}

/// Complement cells of the padded bounding box unreachable from outside.
fn enclosed(cells: &BTreeSet<(i64, i64)>) -> Vec<(i64, i64)> {
    let x0 = cells.iter().map(|c| c.0).min().unwrap() - 1;
    let x1 = cells.iter().map(|c| c.0).max().unwrap() + 1;
    let y0 = cells.iter().map(|c| c.1).min().unwrap() - 1;
    let y1 = cells.iter().map(|c| c.1).max().unwrap() + 1;
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(x0, y0)]);
    seen.insert((x0, y0));
    while let Some((x, y)) = queue.pop_front() {
        for (nx, ny) in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if nx < x0 || nx > x1 || ny < y0 || ny > y1 {
                continue;
            }
            if cells.contains(&(nx, ny)) || !seen.insert((nx, ny)) {
                continue;
            }
            queue.push_back((nx, ny));
        }
    }
    let mut out = Vec::new();
    for x in x0..=x1 {
        for y in y0..=y1 {
            if !cells.contains(&(x, y)) && !seen.contains(&(x, y)) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Fill enclosed holes and separate diagonal-only contacts until the
/// region is a disc of unit cells.
fn polish(cells: &mut BTreeSet<(i64, i64)>) {
    loop {
        for c in enclosed(cells) {
            cells.insert(c);
        }
        // A lattice vertex whose four quadrant cells are exactly one
        // diagonal pair pinches the region; insert a mediating cell.
        let mut pinch = None;
        'scan: for &(x, y) in cells.iter() {
            for (vx, vy) in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
                let quad = [
                    (vx - 1, vy - 1),
                    (vx, vy - 1),
                    (vx - 1, vy),
                    (vx, vy),
                ];
                let present: Vec<bool> =
                    quad.iter().map(|c| cells.contains(c)).collect();
                if present == [true, false, false, true] || present == [false, true, true, false]
                {
                    pinch = Some(quad[1]);
                    break 'scan;
                }
            }
        }
        match pinch {
            Some(c) => {
                cells.insert(c);
            }
            None => break,
        }
    }
}

/// Random edge-connected growth, then polish to a disc.
fn random_polyomino(rg: &mut ChaCha8Rng, n: usize) -> Vec<(i64, i64)> {
    let mut cells = BTreeSet::from([(0i64, 0i64)]);
    let mut order = vec![(0i64, 0i64)];
    while cells.len() < n {
        let &(x, y) = &order[rg.gen_range(0..order.len())];
        let (nx, ny) = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
            [rg.gen_range(0..4)];
        if cells.insert((nx, ny)) {
            order.push((nx, ny));
        }
    }
    polish(&mut cells);
    assert!(hole_free(&cells));
    cells.into_iter().collect()
}

fn grid_cells(w: i64, h: i64) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    for x in 0..w {
        for y in 0..h {
            cells.push((x, y));
        }
    }
    cells
}

fn staircase_cells(steps: i64, run: i64, offset: i64) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    for r in 0..steps {
        for x in 0..run {
            cells.push((r * offset + x, r));
        }
    }
    cells
}

/// Nonincreasing column heights: always hole-free, always Euclidean.
fn young_heights(rg: &mut ChaCha8Rng, max_w: i64, max_h: i64) -> Vec<i64> {
    let w = rg.gen_range(1..=max_w);
    let mut h = rg.gen_range(1..=max_h);
    (0..w)
        .map(|_| {
            h = rg.gen_range(1..=h);
            h
        })
        .collect()
}

fn young_cells(heights: &[i64]) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    for (x, &h) in heights.iter().enumerate() {
        for y in 0..h {
            cells.push((x as i64, y));
        }
    }
    cells
}

fn name_map(src: &SquareComplex, tgt: &SquareComplex) -> CombinatorialMap {
    CombinatorialMap {
        vertex_map: src
            .vertices()
            .map(|v| tgt.vertex_by_name(src.vertex_name(v)).unwrap())
            .collect(),
        edge_map: src
            .edge_ids()
            .map(|e| tgt.edge_by_name(src.edge_name(e)).unwrap())
            .collect(),
        square_map: src
            .square_ids()
            .map(|s| tgt.square_by_name(src.square_name(s)).unwrap())
            .collect(),
    }
}

fn corner_ids(x: &SquareComplex, names: [String; 4]) -> [VertexId; 4] {
    names.map(|n| x.vertex_by_name(&n).unwrap_or_else(|| panic!("no vertex {}", n)))
}

// --------------------------------------------------------------- criteria

#[test]
fn criterion_01_gauss_bonnet_exactness() {
    let start = Instant::now();
    let mut count = 0usize;
    let mut check = |cells: &[(i64, i64)]| {
        let (d, _) = diagram::diagram_over_self(cells);
        assert_eq!(diagram::gauss_bonnet_total(&d).unwrap(), 4);
        count += 1;
    };
    for w in 1..=10 {
        for h in 1..=10 {
            check(&grid_cells(w, h));
        }
    }
    for steps in 2..=8 {
        for run in 1..=4 {
            for offset in 0..run {
                check(&staircase_cells(steps, run, offset));
            }
        }
    }
    let mut rg = rng(0xC1);
    let mut largest = 0usize;
    for i in 0..350 {
        let n = if i % 8 == 0 { rg.gen_range(150..=300) } else { rg.gen_range(1..=80) };
        let cells = random_polyomino(&mut rg, n);
        largest = largest.max(cells.len());
        check(&cells);
    }
    assert!(count >= 500, "only {} complexes generated", count);
    assert!(largest >= 150, "fuzz never reached the large-diagram regime");
    budget(1, start, 10, &format!("{} complexes, total 4 units on each", count));
}

#[test]
fn criterion_02_hyperplane_geodesic_law() {
    let start = Instant::now();
    let mut rg = rng(0xC2);
    let mut geodesics_checked = 0usize;
    for i in 0..50 {
        let n = rg.gen_range(2..=200);
        let cells = random_polyomino(&mut rg, n);
        let x = shapes::from_cells_complex(&cells);
        assert!(x.square_count() <= 200);
        let hs = hyperplane::hyperplanes(&x);
        let ids: Vec<VertexId> = x.vertices().collect();
        let mut pairs = 0;
        let mut attempts = 0;
        while pairs < 6 && attempts < 60 {
            attempts += 1;
            let u = ids[rg.gen_range(0..ids.len())];
            let dist = metric::distances_from(&x, u);
            let far: Vec<VertexId> = ids
                .iter()
                .copied()
                .filter(|w| (2..=8).contains(&dist[w.index()]))
                .collect();
            if far.is_empty() {
                continue;
            }
            let v = far[rg.gen_range(0..far.len())];
            let gs = match metric::geodesics(&x, u, v, 400) {
                Ok(gs) => gs,
                Err(MetricError::CapExceeded { .. }) => continue,
                Err(e) => panic!("complex {}: {}", i, e),
            };
            for g in &gs {
                let mut crossings: BTreeMap<usize, u32> = BTreeMap::new();
                for d in &g.darts {
                    *crossings.entry(hs.class_of(d.edge)).or_insert(0) += 1;
                }
                assert!(
                    crossings.values().all(|&c| c <= 1),
                    "a geodesic crossed a hyperplane twice on complex {}",
                    i
                );
            }
            geodesics_checked += gs.len();
            pairs += 1;
        }
    }
    assert!(geodesics_checked >= 500, "only {} geodesics enumerated", geodesics_checked);
    budget(2, start, 30, &format!("50 complexes, {} geodesics", geodesics_checked));
}

#[test]
fn criterion_03_interval_duality() {
    let start = Instant::now();
    let mut rg = rng(0xC3);
    let mut pairs_checked = 0usize;
    for _ in 0..20 {
        let n = rg.gen_range(2..=120);
        let cells = random_polyomino(&mut rg, n);
        let x = shapes::from_cells_complex(&cells);
        let ids: Vec<VertexId> = x.vertices().collect();
        for _ in 0..5 {
            let u = ids[rg.gen_range(0..ids.len())];
            let v = ids[rg.gen_range(0..ids.len())];
            // interval() recomputes the set both ways and errors on any
            // disagreement; re-derive the geodesic union here as well.
            let i = metric::interval(&x, u, v).unwrap();
            let du = metric::distances_from(&x, u);
            let dv = metric::distances_from(&x, v);
            let d = du[v.index()];
            for w in x.vertices() {
                let on_geodesic = du[w.index()] + dv[w.index()] == d;
                assert_eq!(on_geodesic, i.subcomplex.contains_vertex(w));
            }
            pairs_checked += 1;
        }
    }
    assert_eq!(pairs_checked, 100);
    budget(3, start, 30, "100 vertex pairs over 20 complexes");
}

#[test]
fn criterion_04_z2_embedding() {
    let start = Instant::now();
    let mut rg = rng(0xC4);
    let mut complexes = Vec::new();
    for _ in 0..15 {
        let w = rg.gen_range(1..=19);
        let h = rg.gen_range(1..=(400 / (w + 1) - 1).min(19));
        complexes.push(shapes::grid(w, h));
    }
    for steps in 2..=10 {
        for run in 1..=3 {
            for offset in 0..run {
                complexes.push(shapes::staircase(steps, run, offset));
            }
        }
    }
    for a in 2..=6 {
        for b in 2..=6 {
            complexes.push(shapes::l_shape(a, b));
        }
    }
    for _ in 0..30 {
        let heights = young_heights(&mut rg, 15, 12);
        complexes.push(shapes::from_cells_complex(&young_cells(&heights)));
    }
    let mut tested = 0usize;
    for x in &complexes {
        if x.vertex_count() > 400 {
            continue;
        }
        let emb = euclid::embed_euclidean(x)
            .unwrap_or_else(|e| panic!("embedding refused: {}", e));
        for u in x.vertices() {
            let du = metric::distances_from(x, u);
            let cu = emb.coord(u);
            for v in x.vertices() {
                let cv = emb.coord(v);
                let l1 = (cu[0] - cv[0]).unsigned_abs() + (cu[1] - cv[1]).unsigned_abs();
                assert_eq!(u64::from(du[v.index()]), l1, "{:?} {:?}", cu, cv);
            }
        }
        tested += 1;
    }
    assert!(tested >= 80, "only {} Euclidean complexes tested", tested);
    budget(4, start, 60, &format!("{} complexes, all pairwise distances exact", tested));
}

#[test]
fn criterion_05_singularity_bound() {
    let start = Instant::now();
    let mut rg = rng(0xC5);
    let mut count = 0usize;
    let mut worst = 0usize;

    let mut check = |q: &Quadrangle| {
        let report = diagram::singularity_bound_check(q);
        assert!(
            report.within_bound,
            "{} singularities on a reduced quadrangle",
            report.count
        );
        worst = worst.max(report.count);
        count += 1;
    };

    // Identity quadrangles over their own Young-diagram target.
    for _ in 0..600 {
        let heights = young_heights(&mut rg, 8, 8);
        let w = heights.len() as i64;
        let (d, target) = diagram::diagram_over_self(&young_cells(&heights));
        let corners = corner_ids(
            &target,
            [
                format!("0_{}", heights[0]),
                format!("{}_{}", w, heights[w as usize - 1]),
                format!("{}_0", w),
                "0_0".to_string(),
            ],
        );
        let q = Quadrangle::from_corners(d, &target, corners).unwrap();
        check(&q);
    }

    // Staircase profiles: corners alternate along the two long sides.
    for _ in 0..300 {
        let steps = rg.gen_range(2..=6);
        let run = rg.gen_range(1..=4);
        let offset = rg.gen_range(0..run.max(1)).min(run - 1).max(0);
        let (d, target) = diagram::diagram_over_self(&staircase_cells(steps, run, offset));
        let w = (steps - 1) * offset + run;
        let top = if offset == 0 { steps } else { 1 };
        let c2_y = if offset == 0 { 0 } else { steps - 1 };
        let corners = corner_ids(
            &target,
            [
                format!("0_{}", top),
                format!("{}_{}", w, steps),
                format!("{}_{}", w, c2_y),
                "0_0".to_string(),
            ],
        );
        let q = Quadrangle::from_corners(d, &target, corners).unwrap();
        check(&q);
    }

    // The same surfaces mapped into a strictly larger grid target.
    for _ in 0..150 {
        let heights = young_heights(&mut rg, 6, 6);
        let w = heights.len() as i64;
        let surface = shapes::from_cells_complex(&young_cells(&heights));
        let target = shapes::grid(w + 2, heights[0] + 2);
        let rot = planar::rotations_from_coords(&surface).unwrap();
        let map = shapes::translate_map(&surface, &target, 1, 1);
        let corners = corner_ids(
            &surface,
            [
                format!("0_{}", heights[0]),
                format!("{}_{}", w, heights[w as usize - 1]),
                format!("{}_0", w),
                "0_0".to_string(),
            ],
        );
        let dd = DiscDiagram::new(surface, rot, map, &target).unwrap();
        let q = Quadrangle::from_corners(dd, &target, corners).unwrap();
        check(&q);
    }

    assert!(count >= 1000, "only {} quadrangles generated", count);
    budget(
        5,
        start,
        60,
        &format!("{} reduced quadrangles, max {} singularities", count, worst),
    );
}

#[test]
fn criterion_06_completion() {
    let start = Instant::now();
    let mut rg = rng(0xC6);
    let mut count = 0usize;

    fn check(target_cells: &[(i64, i64)], deleted: (i64, i64)) {
        let target = shapes::from_cells_complex(target_cells);
        let surface_cells: Vec<(i64, i64)> =
            target_cells.iter().copied().filter(|&c| c != deleted).collect();
        let surface = shapes::from_cells_complex(&surface_cells);
        assert!(surface.is_connected());
        let rot = planar::rotations_from_coords(&surface).unwrap();
        let map = shapes::translate_map(&surface, &target, 0, 0);
        let d = DiscDiagram::new(surface, rot, map, &target).unwrap();

        let comp = euclid::complete_diagram(&d, &target).unwrap();
        assert_eq!(comp.added.len(), 1, "exactly the deleted square is refilled");
        let rep = euclid::is_isometric_embedding(
            &comp.diagram.surface,
            &target,
            &comp.diagram.map,
        );
        assert!(rep.isometric, "completion left a distance defect");
        assert!(rep.full_links, "completion left a non-full link");
        let again = euclid::complete_diagram(&comp.diagram, &target).unwrap();
        assert!(again.added.is_empty(), "completion is not idempotent");
    }

    // Rectangles with the top-right cell removed.
    for m in 2..=7 {
        for n in 2..=7 {
            check(&grid_cells(m, n), (m - 1, n - 1));
            count += 1;
        }
    }
    // Young diagrams with a fillable step corner removed: the top cell of
    // a walled-in column (a left neighbour at least as high, a right
    // neighbour strictly lower) leaves exactly one refillable reflex
    // corner.
    while count < 100 {
        let heights = young_heights(&mut rg, 7, 7);
        let w = heights.len();
        let candidate = (1..w).find(|&x| {
            heights[x] >= 2 && (x + 1 == w || heights[x + 1] < heights[x])
        });
        if let Some(x) = candidate {
            check(&young_cells(&heights), (x as i64, heights[x] - 1));
            count += 1;
        }
    }
    budget(6, start, 30, &format!("{} diagrams completed and re-audited", count));
}

#[test]
fn criterion_07_grid_factorization() {
    let start = Instant::now();
    let mut rg = rng(0xC7);

    for instance in 0..200 {
        // A random tree, a random walk on it, and the induced fold of a
        // grid onto the interval-tree product.
        let size = rg.gen_range(2..=5);
        let vertices: Vec<String> = (0..size).map(|i| format!("t{}", i)).collect();
        let mut edges = Vec::new();
        for i in 1..size {
            let p = rg.gen_range(0..i);
            edges.push((format!("e{}", i), format!("t{}", p), format!("t{}", i)));
        }
        let tree =
            SquareComplex::build(ComplexData { vertices, edges, squares: vec![] }).unwrap();

        let m = rg.gen_range(1..=5);
        let n = rg.gen_range(1..=4);
        let target = gridlab::strip_over_tree(m, &tree);

        let tree_ids: Vec<VertexId> = tree.vertices().collect();
        let mut walk = vec![tree_ids[rg.gen_range(0..tree_ids.len())]];
        let mut walk_edges = Vec::new();
        for _ in 0..n {
            let from = *walk.last().unwrap();
            let options: Vec<_> = tree.neighbours(from).collect();
            let (dart, to) = options[rg.gen_range(0..options.len())];
            walk_edges.push(dart.edge);
            walk.push(to);
        }

        let grid = shapes::grid(m, n);
        let row = |y: usize| tree.vertex_name(walk[y]);
        let rail = |y: usize| tree.edge_name(walk_edges[y]);
        let vertex_map = grid
            .vertices()
            .map(|v| {
                let (x, y) = grid.vertex_name(v).split_once('_').unwrap();
                let y: usize = y.parse().unwrap();
                target.vertex_by_name(&format!("{}_{}", x, row(y))).unwrap()
            })
            .collect();
        let edge_map = grid
            .edge_ids()
            .map(|e| {
                let name = grid.edge_name(e);
                let (prefix, rest) = name.split_at(1);
                let (x, y) = rest.split_once('_').unwrap();
                let y: usize = y.parse().unwrap();
                let image = match prefix {
                    "h" => format!("h{}_{}", x, row(y)),
                    _ => format!("v{}_{}", x, rail(y)),
                };
                target.edge_by_name(&image).unwrap()
            })
            .collect();
        let square_map = grid
            .square_ids()
            .map(|s| {
                let name = grid.square_name(s);
                let (x, y) = name[1..].split_once('_').unwrap();
                let y: usize = y.parse().unwrap();
                target.square_by_name(&format!("c{}_{}", x, rail(y))).unwrap()
            })
            .collect();
        let phi = CombinatorialMap { vertex_map, edge_map, square_map };
        phi.validate(&grid, &target).unwrap();

        let f = gridlab::factorize_grid(&target, m, n, &phi)
            .unwrap_or_else(|e| panic!("instance {}: {}", instance, e));
        assert!(f.tree.is_connected());
        assert_eq!(f.tree.vertex_count(), f.tree.edge_count() + 1, "not a tree");

        let composite = gridlab::compose_maps(&f.embedding, &f.projection);
        assert_eq!(composite.vertex_map, phi.vertex_map, "instance {}", instance);
        assert_eq!(composite.edge_map, phi.edge_map, "instance {}", instance);
        assert_eq!(composite.square_map, phi.square_map, "instance {}", instance);

        let rep = euclid::is_isometric_embedding(&f.strip, &target, &f.embedding);
        assert!(rep.isometric, "instance {}: strip embedding not isometric", instance);
    }
    budget(7, start, 30, "200 random folds and branching walks factored");
}

#[test]
fn criterion_08_staircase_determination() {
    let start = Instant::now();
    let mut certified = 0usize;
    for r in 1..=2usize {
        for k in 1..=3usize {
            // One step per corner pair plus a spare step, so the swept
            // region reaches the upper side past both gates.
            let steps = (r + k + 2) as i64;
            let target = shapes::staircase(steps, 2, 1);
            let rot = planar::rotations_from_coords(&target).unwrap();
            let map = CombinatorialMap::identity(&target);
            let corners = corner_ids(
                &target,
                [
                    "0_1".to_string(),
                    format!("{}_{}", steps + 1, steps),
                    format!("{}_{}", steps + 1, steps - 1),
                    "0_0".to_string(),
                ],
            );
            let dd = DiscDiagram::new(target.clone(), rot, map.clone(), &target).unwrap();
            let q = Quadrangle::from_corners(dd, &target, corners).unwrap();
            let maps = [map.clone(), map];
            let seg = gridlab::staircase_propagate(&q, &target, &maps, r, k).unwrap();
            assert!(
                seg.edges.len() >= k,
                "(r, k) = ({}, {}): certified only {} edges",
                r,
                k,
                seg.edges.len()
            );
            certified += 1;
        }
    }

    // A genuine divergence: the target carries an extra square over the
    // bottom-left cell and the second map swings onto it; agreement must
    // still be certified away from the divergence.
    let st = shapes::staircase(4, 2, 1);
    let mut vertices: Vec<String> =
        st.vertices().map(|v| st.vertex_name(v).to_string()).collect();
    vertices.push("u".into());
    let mut edges: Vec<(String, String, String)> = st
        .edge_ids()
        .map(|e| {
            let [a, b] = st.endpoints(e);
            (
                st.edge_name(e).to_string(),
                st.vertex_name(a).to_string(),
                st.vertex_name(b).to_string(),
            )
        })
        .collect();
    edges.push(("ft".into(), "u".into(), "1_1".into()));
    edges.push(("fl".into(), "0_0".into(), "u".into()));
    let mut squares: Vec<(String, [(String, bool); 4])> = st
        .square_ids()
        .map(|s| {
            (
                st.square_name(s).to_string(),
                st.square_walk(s).map(|d| (st.edge_name(d.edge).to_string(), d.forward)),
            )
        })
        .collect();
    squares.push((
        "flap".into(),
        [
            ("h0_0".into(), true),
            ("v1_0".into(), true),
            ("ft".into(), false),
            ("fl".into(), false),
        ],
    ));
    let target = SquareComplex::build(ComplexData { vertices, edges, squares }).unwrap();
    let surface = shapes::staircase(4, 2, 1);
    let rot = planar::rotations_from_coords(&surface).unwrap();
    let phi1 = name_map(&surface, &target);
    let corners = corner_ids(
        &surface,
        ["0_1".into(), "5_4".into(), "5_3".into(), "0_0".into()],
    );
    let dd = DiscDiagram::new(surface.clone(), rot, phi1.clone(), &target).unwrap();
    let q = Quadrangle::from_corners(dd, &target, corners).unwrap();
    let mut phi2 = phi1.clone();
    phi2.vertex_map[surface.vertex_by_name("0_1").unwrap().index()] =
        target.vertex_by_name("u").unwrap();
    phi2.edge_map[surface.edge_by_name("h0_1").unwrap().index()] =
        target.edge_by_name("ft").unwrap();
    phi2.edge_map[surface.edge_by_name("v0_0").unwrap().index()] =
        target.edge_by_name("fl").unwrap();
    phi2.square_map[surface.square_by_name("c0_0").unwrap().index()] =
        target.square_by_name("flap").unwrap();
    phi2.validate(&surface, &target).unwrap();
    let seg = gridlab::staircase_propagate(&q, &target, &[phi1.clone(), phi2.clone()], 2, 1)
        .unwrap();
    assert!(!seg.edges.is_empty());
    for &v in &seg.vertices {
        assert_eq!(phi1.vertex(v), phi2.vertex(v));
    }
    certified += 1;

    budget(8, start, 10, &format!("{} staircase families certified", certified));
}

#[test]
fn criterion_09_bs12_faithfulness_and_relation() {
    let start = Instant::now();
    assert!(higman::relation_holds());

    // The affine element a normal form A^p b^m a^q evaluates to.
    fn nf_element(nf: &higman::NormalForm) -> higman::BS12Element {
        higman::BS12Element {
            scale_exp: i64::from(nf.pos_scale) - i64::from(nf.neg_scale),
            translation: higman::DyadicRational::new(nf.shift.clone(), nf.neg_scale),
        }
    }

    struct Walk {
        generators: [(char, higman::BS12Element); 4],
        identity: higman::BS12Element,
        nodes: u64,
        since_spot_check: u64,
    }

    fn descend(w: &mut Walk, word: &mut String, el: &higman::BS12Element, left: usize) {
        let nf = higman::word_normal_form(word).unwrap();
        assert_eq!(*el, nf_element(&nf), "engines disagree on `{}`", word);
        assert_eq!(nf.is_identity(), *el == w.identity, "`{}`", word);
        w.nodes += 1;
        w.since_spot_check += 1;
        if w.since_spot_check == 4096 {
            w.since_spot_check = 0;
            assert_eq!(higman::word_to_element(word).unwrap(), *el);
        }
        if left == 0 {
            return;
        }
        for i in 0..4 {
            let (c, g) = (w.generators[i].0, w.generators[i].1.clone());
            word.push(c);
            let next = higman::bs12_compose(el, &g);
            descend(w, word, &next, left - 1);
            word.pop();
        }
    }

    let mut w = Walk {
        generators: [
            ('a', higman::gen_a()),
            ('b', higman::gen_b()),
            ('A', higman::bs12_invert(&higman::gen_a())),
            ('B', higman::bs12_invert(&higman::gen_b())),
        ],
        identity: higman::bs12_identity(),
        nodes: 0,
        since_spot_check: 0,
    };
    let id = higman::bs12_identity();
    descend(&mut w, &mut String::new(), &id, 10);
    // 1 + 4 + 4^2 + ... + 4^10 words.
    assert_eq!(w.nodes, 1_398_101);
    budget(9, start, 120, "relation exact, 1398101 words cross-checked");
}

#[test]
fn criterion_10_star_stabilisers_desk_scale() {
    let start = Instant::now();
    let p = higman::PolygonOfGroups::new(5).unwrap();
    assert!(p.hyperbolic_regime());

    let scan = higman::star_path_scan(&p, 6);
    assert!(scan.configurations > 0);
    assert!(
        scan.all_trivial,
        "a 3-edge path carried a nontrivial common stabiliser"
    );

    let link = higman::link_graph(&p, 0, 6);
    assert!(!link.arcs.is_empty());
    assert!(
        link.girth.is_none_or(|g| g >= 4),
        "link girth {:?} below 4",
        link.girth
    );
    budget(
        10,
        start,
        120,
        &format!(
            "{} path configurations trivial, link girth {:?} on {}+{} cosets",
            scan.configurations,
            link.girth,
            link.a_cosets.len(),
            link.b_cosets.len()
        ),
    );
}

#[test]
fn criterion_11_probe_soundness() {
    let start = Instant::now();

    // Reflection of a domino across its middle edge: the axis stabiliser
    // is exactly {identity, reflection}.
    let x = shapes::grid(2, 1);
    let refl = |name: &str| -> String {
        let (prefix, rest) = if name.starts_with(|c: char| c.is_ascii_digit()) {
            ("", name)
        } else {
            name.split_at(1)
        };
        let (px, py) = rest.split_once('_').unwrap();
        let (px, py): (i64, i64) = (px.parse().unwrap(), py.parse().unwrap());
        match prefix {
            "h" | "c" => format!("{}{}_{}", prefix, 1 - px, py),
            "v" => format!("v{}_{}", 2 - px, py),
            _ => format!("{}_{}", 2 - px, py),
        }
    };
    let m = PartialAutomorphism {
        vertex: x.vertices().map(|v| x.vertex_by_name(&refl(x.vertex_name(v)))).collect(),
        edge: x.edge_ids().map(|e| x.edge_by_name(&refl(x.edge_name(e)))).collect(),
        square: x.square_ids().map(|s| x.square_by_name(&refl(x.square_name(s)))).collect(),
    };
    let a = FiniteAction::new(x, vec![("m".into(), m)], 2).unwrap();
    let axis = CellSet {
        vertices: vec![
            a.complex.vertex_by_name("1_0").unwrap(),
            a.complex.vertex_by_name("1_1").unwrap(),
        ],
        edges: vec![a.complex.edge_by_name("v1_0").unwrap()],
        squares: vec![],
    };
    assert_eq!(action::stabiliser(&a, &axis).elements.len(), 2);

    // Quarter turn of the 2x2 grid: the centre stabiliser has order 4.
    let x = shapes::grid(2, 2);
    let rot = |name: &str| -> String {
        let (prefix, rest) = match &name[..1] {
            "h" | "v" | "c" => name.split_at(1),
            _ => ("", name),
        };
        let (px, py) = rest.split_once('_').unwrap();
        let (px, py): (i64, i64) = (px.parse().unwrap(), py.parse().unwrap());
        match prefix {
            "" => format!("{}_{}", py, 2 - px),
            "h" => format!("v{}_{}", py, 1 - px),
            "v" => format!("h{}_{}", py, 2 - px),
            _ => format!("c{}_{}", py, 1 - px),
        }
    };
    let rho = PartialAutomorphism {
        vertex: x.vertices().map(|v| x.vertex_by_name(&rot(x.vertex_name(v)))).collect(),
        edge: x.edge_ids().map(|e| x.edge_by_name(&rot(x.edge_name(e)))).collect(),
        square: x.square_ids().map(|s| x.square_by_name(&rot(x.square_name(s)))).collect(),
    };
    let a = FiniteAction::new(x, vec![("rho".into(), rho)], 4).unwrap();
    let centre = CellSet {
        vertices: vec![a.complex.vertex_by_name("1_1").unwrap()],
        edges: vec![],
        squares: vec![],
    };
    assert_eq!(action::stabiliser(&a, &centre).elements.len(), 4);

    // Four pages on one spine: the page cycle fixes the spine, so the
    // probe fails at N = 3 and recovers at N = 4 or L = 2.
    let mut vertices = vec!["u".to_string(), "w".to_string()];
    let mut edges = vec![("e".to_string(), "u".to_string(), "w".to_string())];
    let mut squares = Vec::new();
    for i in 0..4 {
        vertices.push(format!("a{}", i));
        vertices.push(format!("b{}", i));
        edges.push((format!("l{}", i), "u".into(), format!("a{}", i)));
        edges.push((format!("t{}", i), format!("a{}", i), format!("b{}", i)));
        edges.push((format!("r{}", i), format!("b{}", i), "w".into()));
        squares.push((
            format!("p{}", i),
            [
                ("e".to_string(), true),
                (format!("r{}", i), false),
                (format!("t{}", i), false),
                (format!("l{}", i), false),
            ],
        ));
    }
    let book = SquareComplex::build(ComplexData { vertices, edges, squares }).unwrap();
    let shift = |name: &str| -> String {
        let (head, idx) = name.split_at(1);
        match idx.parse::<usize>() {
            Ok(k) => format!("{}{}", head, (k + 1) % 4),
            Err(_) => name.to_string(),
        }
    };
    let cycle = PartialAutomorphism {
        vertex: book.vertices().map(|v| book.vertex_by_name(&shift(book.vertex_name(v)))).collect(),
        edge: book.edge_ids().map(|e| book.edge_by_name(&shift(book.edge_name(e)))).collect(),
        square: book
            .square_ids()
            .map(|s| book.square_by_name(&shift(book.square_name(s))))
            .collect(),
    };
    let a = FiniteAction::new(book, vec![("c".into(), cycle)], 2).unwrap();
    let fail = weak_acylindricity_probe(&a, 1, 3);
    assert!(!fail.pass);
    let witness = fail.witness.unwrap();
    assert_eq!(witness.fixing.len(), 4, "the full page cycle fixes the spine");
    assert!(weak_acylindricity_probe(&a, 1, 4).pass, "monotone in N");
    assert!(weak_acylindricity_probe(&a, 2, 3).pass, "monotone in L");

    // Reflection of the 2x2 grid: the midline pair at distance 2 is fixed
    // by two elements, refuting (L, N) = (2, 1).
    let x = shapes::grid(2, 2);
    let refl2 = |name: &str| -> String {
        let (prefix, rest) = match &name[..1] {
            "h" | "v" | "c" => name.split_at(1),
            _ => ("", name),
        };
        let (px, py) = rest.split_once('_').unwrap();
        let (px, py): (i64, i64) = (px.parse().unwrap(), py.parse().unwrap());
        match prefix {
            "h" | "c" => format!("{}{}_{}", prefix, 1 - px, py),
            "v" => format!("v{}_{}", 2 - px, py),
            _ => format!("{}_{}", 2 - px, py),
        }
    };
    let r = PartialAutomorphism {
        vertex: x.vertices().map(|v| x.vertex_by_name(&refl2(x.vertex_name(v)))).collect(),
        edge: x.edge_ids().map(|e| x.edge_by_name(&refl2(x.edge_name(e)))).collect(),
        square: x.square_ids().map(|s| x.square_by_name(&refl2(x.square_name(s)))).collect(),
    };
    let a = FiniteAction::new(x, vec![("r".into(), r)], 6).unwrap();
    let fail = weak_acylindricity_probe(&a, 2, 1);
    assert!(!fail.pass);
    assert_eq!(fail.witness.unwrap().distance, 2);

    // Free translation along a strip: WPD passes at m = 2, N = 1.
    let x = shapes::grid(6, 1);
    let t = PartialAutomorphism::grid_translation(&x, 1, 0);
    let a = FiniteAction::new(x, vec![("t".into(), t)], 2).unwrap();
    let axis: Vec<VertexId> =
        (0..=6).map(|i| a.complex.vertex_by_name(&shapes::vertex_name(i, 0)).unwrap()).collect();
    assert!(weak_wpd_probe(&a, &["t".into()], &axis, 2, 1).unwrap().pass);

    // A detached four-cycle whose rotation fixes the whole strip refutes
    // WPD at every axis pair.
    let strip = shapes::grid(3, 1);
    let mut vertices: Vec<String> =
        strip.vertices().map(|v| strip.vertex_name(v).to_string()).collect();
    let mut edges: Vec<(String, String, String)> = strip
        .edge_ids()
        .map(|e| {
            let [a, b] = strip.endpoints(e);
            (
                strip.edge_name(e).to_string(),
                strip.vertex_name(a).to_string(),
                strip.vertex_name(b).to_string(),
            )
        })
        .collect();
    let squares: Vec<(String, [(String, bool); 4])> = strip
        .square_ids()
        .map(|s| {
            (
                strip.square_name(s).to_string(),
                strip.square_walk(s).map(|d| (strip.edge_name(d.edge).to_string(), d.forward)),
            )
        })
        .collect();
    for i in 0..4 {
        vertices.push(format!("r{}", i));
    }
    for i in 0..4 {
        edges.push((format!("q{}", i), format!("r{}", i), format!("r{}", (i + 1) % 4)));
    }
    let x = SquareComplex::build(ComplexData { vertices, edges, squares }).unwrap();
    let rho_name = |name: &str| -> String {
        match name.split_at(1) {
            ("r", k) if !k.contains('_') => format!("r{}", (k.parse::<usize>().unwrap() + 1) % 4),
            ("q", k) if !k.contains('_') => format!("q{}", (k.parse::<usize>().unwrap() + 1) % 4),
            _ => name.to_string(),
        }
    };
    let rho = PartialAutomorphism {
        vertex: x.vertices().map(|v| x.vertex_by_name(&rho_name(x.vertex_name(v)))).collect(),
        edge: x.edge_ids().map(|e| x.edge_by_name(&rho_name(x.edge_name(e)))).collect(),
        square: x.square_ids().map(Some).collect(),
    };
    let t = PartialAutomorphism::grid_translation(&x, 1, 0);
    let a = FiniteAction::new(x, vec![("t".into(), t), ("rho".into(), rho)], 2).unwrap();
    let axis: Vec<VertexId> =
        (0..=3).map(|i| a.complex.vertex_by_name(&shapes::vertex_name(i, 0)).unwrap()).collect();
    let fail = weak_wpd_probe(&a, &["t".into()], &axis, 1, 1).unwrap();
    assert!(!fail.pass);
    assert!(fail
        .witness
        .unwrap()
        .fixing
        .iter()
        .any(|el| el.word == vec!["rho".to_string()]));

    budget(11, start, 10, "six hand-computed verdicts reproduced");
}
