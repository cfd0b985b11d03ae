//! QDMR decompositions as logical forms and token-level dependency graphs.
//!
//! The crate converts question decompositions into logical forms with a
//! rule cascade, scores logical forms with an exact-match metric over a
//! normalized form, aligns question tokens to decomposition steps with a
//! small integer program, projects the result onto the question as a
//! dependency graph, and decodes predicted graphs back into logical forms.

pub mod align;
pub mod cli;
pub mod config;
pub mod convert;
pub mod graph;
pub mod ilp;
pub mod io;
pub mod lexicon;
pub mod model;
pub mod normalize;
pub mod pipeline;

pub use lexicon::Lexicon;
pub use model::*;
