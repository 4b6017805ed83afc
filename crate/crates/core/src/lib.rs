//! Seeded generators, ground-truth oracles and scoring rules for
//! factor-referenced visual cognition test items.
//!
//! Every generator is a pure function of its parameters and a [`SeededRng`];
//! every emitted item carries enough data for its oracle to re-derive the
//! ground truth without trusting the generator.

pub mod closure;
pub mod difficulty;
pub mod error;
pub mod folding;
pub mod geometry;
pub mod mapplan;
pub mod memory;
pub mod occlusion;
pub mod rng;
pub mod scoring;
pub mod spatial;

pub use difficulty::Difficulty;
pub use error::{Error, Result};
pub use rng::SeededRng;
