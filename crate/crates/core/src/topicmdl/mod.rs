//! Word-document block model: fitting by description-length minimization,
//! topics, topic prevalence and corpus compression.

mod bipartite;
mod complexity;
mod fit;
mod topics;
mod unipartite;

pub use bipartite::{build_bipartite, BipartiteCountGraph, Vocabulary};
pub use complexity::{
    compression_factor, nats_to_bits, sample_policies, text_description_length, ComplexityRecord,
};
pub use fit::{description_length, dl_parts, fit_sbm, DlParts, FitOptions, FitReport, SbmFit, SbmState};
pub use topics::{
    extract_topics, topic_prevalence, topic_report_json, Prevalence, PrevalenceRow, Topic, TopicWord,
    REPORT_MIN_WEIGHT,
};
pub use unipartite::{fit_unipartite, unipartite_description_length, UniFit};
