//! Lattice, plane, exact-rational and rendering primitives shared by all generators.

pub mod exact;
pub mod font;
pub mod lattice;
pub mod plane;
pub mod render;

pub use exact::{QPoint, Q};
pub use lattice::{admissible_edges, Edge, EdgeSet, GridPoint, Lattice};
pub use plane::{collinear_overlap, reflect_across, AxisKind, FoldAxis, Point, Segment, TOLERANCE};
pub use render::{encode_png, render, render_native, Canvas, Color, Image, Primitive, Scene, Stroke, Tile, DEFAULT_STROKE};
