//! Corpus building, prompt assembly, suite running, scoring reports and the
//! participant study server for factorgen items.

pub mod config;
pub mod corpus;
pub mod error;
pub mod manifest;
pub mod prompts;
pub mod report;
pub mod runner;
pub mod serve;
pub mod transcript;
pub mod transport;

pub use error::{HarnessError, Result};
