//! Subset repairs of inconsistent databases computed as extensions of
//! argumentation frameworks with collective attacks.

pub mod cli;
pub mod error;
pub mod framework;
pub mod grounding;
pub mod model;
pub mod parser;
pub mod reductions;
pub mod repairs;
pub mod semantics;

pub use error::{Error, Result};
