//! Deterministic SVG 1.1 rendering of Euclidean complexes: unit cells laid
//! out by the lattice embedding, edges as segments, vertices as labeled
//! dots. Complexes without a unit-square layout get a combinatorial
//! listing instead, chosen by the caller on `NoLayout`.

use thiserror::Error;

use crate::complex::SquareComplex;
use crate::euclid;
use crate::io;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("no unit-square layout: {0}")]
    NoLayout(String),
}

const SCALE: i64 = 40;
const MARGIN: i64 = 20;

pub fn render_complex(x: &SquareComplex) -> Result<String, SvgError> {
    let emb = euclid::embed_euclidean(x).map_err(|e| SvgError::NoLayout(e.to_string()))?;

    let coords: Vec<[i64; 2]> = x.vertices().map(|v| emb.coord(v)).collect();
    let min_x = coords.iter().map(|c| c[0]).min().unwrap_or(0);
    let min_y = coords.iter().map(|c| c[1]).min().unwrap_or(0);
    let max_y = coords.iter().map(|c| c[1]).max().unwrap_or(0);
    let max_x = coords.iter().map(|c| c[0]).max().unwrap_or(0);
    // Lattice point to pixel, y growing upwards.
    let px = |c: [i64; 2]| (MARGIN + (c[0] - min_x) * SCALE, MARGIN + (max_y - c[1]) * SCALE);

    let width = 2 * MARGIN + (max_x - min_x) * SCALE;
    let height = 2 * MARGIN + (max_y - min_y) * SCALE;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\">\n",
        width, height
    ));

    for s in x.square_ids() {
        let cs = x.square_corners(s);
        let xs: Vec<i64> = cs.iter().map(|&v| emb.coord(v)[0]).collect();
        let ys: Vec<i64> = cs.iter().map(|&v| emb.coord(v)[1]).collect();
        let cell = [*xs.iter().min().unwrap(), *ys.iter().max().unwrap()];
        let (cx, cy) = px(cell);
        out.push_str(&format!(
            "  <rect id=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#eef\" stroke=\"none\"/>\n",
            x.square_name(s),
            cx,
            cy,
            SCALE,
            SCALE
        ));
    }
    for e in x.edge_ids() {
        let [u, w] = x.endpoints(e);
        let (x1, y1) = px(emb.coord(u));
        let (x2, y2) = px(emb.coord(w));
        out.push_str(&format!(
            "  <line id=\"{}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333\"/>\n",
            x.edge_name(e),
            x1,
            y1,
            x2,
            y2
        ));
    }
    for v in x.vertices() {
        let (vx, vy) = px(emb.coord(v));
        out.push_str(&format!(
            "  <circle id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#000\"/>\n",
            x.vertex_name(v),
            vx,
            vy
        ));
        out.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n",
            vx + 4,
            vy - 4,
            x.vertex_name(v)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The fallback for complexes with no lattice layout: the interchange
/// listing, labeled as such.
pub fn render_listing(x: &SquareComplex, reason: &str) -> String {
    format!("# no unit-square layout: {}\n{}", reason, io::write_complex(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn grid_renders_four_unit_cells() {
        let svg = render_complex(&shapes::grid(2, 2)).unwrap();
        assert_eq!(svg.matches("<rect").count(), 4);
        assert_eq!(svg.matches("<circle").count(), 9);
        assert!(svg.contains("width=\"40\" height=\"40\""));
        assert!(svg.starts_with("<?xml"));
        // Deterministic bytes.
        assert_eq!(svg, render_complex(&shapes::grid(2, 2)).unwrap());
    }

    #[test]
    fn staircase_cells_sit_at_embedding_coordinates() {
        let x = shapes::staircase(3, 2, 1);
        let emb = euclid::embed_euclidean(&x).unwrap();
        let svg = render_complex(&x).unwrap();
        for s in x.square_ids() {
            let cs = x.square_corners(s);
            let cx = cs.iter().map(|&v| emb.coord(v)[0]).min().unwrap();
            let cy = cs.iter().map(|&v| emb.coord(v)[1]).min().unwrap();
            let needle = format!(
                "<rect id=\"{}\" x=\"{}\" y=\"{}\"",
                x.square_name(s),
                20 + cx * 40,
                20 + (emb_max_y(&x, &emb) - (cy + 1)) * 40
            );
            assert!(svg.contains(&needle), "missing `{}`", needle);
        }
    }

    fn emb_max_y(x: &SquareComplex, emb: &euclid::LatticeEmbedding) -> i64 {
        x.vertices().map(|v| emb.coord(v)[1]).max().unwrap()
    }

    #[test]
    fn u_shape_has_no_layout() {
        let x = shapes::u_shape(3, 2);
        let err = render_complex(&x).unwrap_err();
        let SvgError::NoLayout(reason) = err;
        let listing = render_listing(&x, &reason);
        assert!(listing.starts_with("# no unit-square layout:"));
        assert!(listing.contains("\nv "));
        assert!(listing.contains("\ns "));
    }
}
