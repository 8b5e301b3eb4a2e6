//! Conversation-network structure versus conversation sentiment.
//!
//! The pipeline turns batches of statuses into directed interaction graphs,
//! counts their strong and weak components, scores text against a valence
//! lexicon, and relates the per-subject component ratio (beta = weak /
//! strong) to mean sentiment (alpha) with Pearson correlation, Fisher z
//! comparisons between groups and Zou confidence intervals.

pub mod components;
pub mod config;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod reference;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
