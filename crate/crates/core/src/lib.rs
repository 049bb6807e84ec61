//! Combinatorial geometry of finite square complexes.
//!
//! The crate provides the machinery needed to audit nonpositive curvature
//! at the combinatorial level: square complexes and their vertex links,
//! hyperplane duality, the l1 metric with full geodesic enumeration,
//! planar disc diagrams with exact integer curvature, embeddings of
//! Euclidean complexes into the standard square tiling of the plane,
//! grid factorization through trees, finite group actions with
//! acylindricity probes, and exact affine arithmetic for the
//! Baumslag-Solitar group BS(1,2) together with the polygon-of-groups
//! link checks built on it.

pub mod action;
pub mod complex;
pub mod diagram;
pub mod euclid;
pub mod gridlab;
pub mod higman;
pub mod hyperplane;
pub mod io;
pub mod metric;
pub mod planar;
pub mod shapes;
pub mod svg;

pub use complex::{CombinatorialMap, SquareComplex, VertexId, EdgeId, SquareId};
