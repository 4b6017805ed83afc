//! Spatial-relations items: card rotations (S1) and cube comparisons (S2).

pub mod card;
pub mod cube;

pub use card::{gen_s1_polygon, make_s1_item, CardItem, CardView, PolygonParams, SimplePolygon};
pub use cube::{cube_same, gen_s2_item, CubeItem, CubeView, FaceMark, Symmetry};
