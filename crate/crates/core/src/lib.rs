//! Question embedding pre-training over a question-skill bipartite graph,
//! plus a recurrent knowledge-tracing predictor that consumes the
//! embeddings.
//!
//! Pipeline: [`data::ingest`] parses interaction logs, [`graph`] derives the
//! bipartite structure and similarity relations, [`pretrain`] jointly
//! optimizes four losses through a product layer to produce one embedding
//! per question, and [`kt`] trains a GRU predictor on those embeddings.
//! [`eval`] holds the AUC metric and the end-to-end experiment harness.

pub mod data;
pub mod error;
pub mod graph;
pub mod sampling;
pub mod textio;

pub use data::{
    compute_attributes, compute_difficulty, ingest, ingest_path, split, AttributeFeatures,
    DifficultyVector, IngestOptions, IngestStats, InteractionDataset, InteractionRecord,
    StudentSequence,
};
pub use error::{PebgError, Result};
pub use graph::{question_similarity, skill_similarity, BipartiteGraph, Side, SimilarityRelation};
pub use sampling::{sample_pairs, PairBatch, PairSet, PairStream};
