//! Knowledge bases of statistical and degree-of-belief sentences, answered by
//! direct inference and minimum cross-entropy updating.

pub mod algebra;
pub mod cli;
pub mod crossentropy;
pub mod inference;
pub mod lp;
pub mod statistics;
pub mod syntax;

pub use algebra::{AtomSet, AtomSpace, GroundAtom};
pub use syntax::{parse_kb, parse_query, KnowledgeBase, Query};
