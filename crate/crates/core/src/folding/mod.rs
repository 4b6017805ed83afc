//! Form-board dissections (VZ1) and paper folding (VZ2).

pub mod board;
pub mod paper;

pub use board::{gen_vz1, verify_tiling, Placement, Vz1Item, Vz1Params};
pub use paper::{gen_vz2, FoldState, FoldStep, Vz2Item, Vz2Params};
