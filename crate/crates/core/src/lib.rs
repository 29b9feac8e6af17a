//! Corpus analytics over timestamped document collections.
//!
//! The pipeline reads a corpus of dated snapshots, drops negated sentences,
//! tokenizes, and matches a term lexicon. On top of the cleaned store it
//! offers per-term frequency series with rise/fall/stable/emergent rules,
//! per-year co-occurrence networks with the usual density/modularity/backbone
//! metrics, and a flat bipartite block model whose description length gives a
//! per-year compression factor.

pub mod config;
pub mod coocnet;
pub mod error;
pub mod ingest;
pub mod lexicon;
pub mod output;
pub mod pipeline;
pub mod plot;
pub mod seed;
pub mod synth;
pub mod textpipe;
pub mod topicmdl;
pub mod turbulence;

pub use error::{Error, Result};
