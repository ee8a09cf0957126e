//! entailkit decides whether a Chinese statement T entails a statement H.
//!
//! Statement pairs arrive pre-annotated (segmentation, POS tags, named
//! entities, parse trees, dependencies); the toolkit normalizes text,
//! extracts lexical, syntactic, and semantic features, and classifies with
//! trained heuristic functions, grid-searched linear models, or decision
//! trees, scoring runs with per-class F1 and MacroF1.
//!
//! Module map:
//! - [`corpus`]: pair and annotation file formats, validation
//! - [`normalize`]: numeral → Arabic conversion, script conversion
//! - [`lexicon`]: synonyms, antonyms, negations, definition trees, DICE
//! - [`structsim`]: dependency matrices, five-power unions, tree similarity
//! - [`features`]: the feature registry and extraction
//! - [`model`]: classifiers, grid search, margin and tree trainers
//! - [`eval`]: metrics and cross-validation
//! - [`cli`]: the `entailkit` binary's subcommands

pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod lexicon;
mod matching;
pub mod model;
pub mod normalize;
pub mod structsim;
pub mod tree;

pub use error::{Error, Result};
