//! Builds "sentences in same paragraph" (SSP) pre-training data from raw
//! document corpora and evaluates answer-sentence-selection rankings.
//!
//! The pieces, in pipeline order:
//!
//! * [`corpus`]: segmentation into documents, paragraphs and sentences, plus
//!   length filters.
//! * [`sampler`]: positive, hard-negative and easy-negative `(a, b, c)`
//!   triples under the SDC, DPC and DSLC objectives.
//! * [`serializer`]: segment layouts and the line-delimited shard format.
//! * [`pipeline`]: parallel, deterministic builds and the shard validator.
//! * [`eval`]: clean-setting filtering and P@1 / MAP / MRR.
//! * [`mr`]: conversion of reading-comprehension annotations into
//!   sentence-selection data.

pub mod corpus;
pub mod error;
pub mod eval;
pub mod mr;
pub mod pipeline;
pub mod sampler;
pub mod serializer;
pub mod synth;

pub use error::{Error, Result};
