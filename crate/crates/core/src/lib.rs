//! Arabic-optimized subword tokenization toolkit.
//!
//! The pipeline: [`normalizer`] cleans Arabic orthography (Alif variants,
//! diacritics, Arabic-Indic numerals, punctuation, Tatweel), [`corpus`]
//! turns text into frequency statistics, [`trainer`] fits Unigram, BPE or
//! WordPiece models, [`codec`] encodes and decodes, [`metrics`] scores a
//! model's fertility / compression / OOV, [`vocab`] prunes vocabularies to
//! coverage targets, and [`lep`] prepares vocabulary-extension bundles
//! (token selection, mean-subtoken embedding initialization, gradient
//! masking) for adapting an existing language model.
//!
//! Everything is deterministic: training twice on the same input produces
//! byte-identical model files.

pub mod codec;
pub mod corpus;
pub mod error;
pub mod lep;
pub mod metrics;
pub mod model;
pub mod normalizer;
pub mod trainer;
pub mod vocab;

mod util;

pub use codec::{decode, encode, encode_opt, encode_word, segment_word, viterbi_segment};
pub use corpus::{ingest, ingest_reader, ingest_str, pre_tokenize, CorpusStats};
pub use error::{Error, Result};
pub use metrics::{evaluate, MetricsReport};
pub use model::{Algorithm, MarkerScheme, TokenizerModel, BOUNDARY_MARKER, SPECIAL_TOKENS};
pub use normalizer::{
    build_rule_table, normalize, AlifMode, DiacriticsMode, NormalizationConfig, Normalizer,
    RuleTable,
};
pub use trainer::{
    train_bpe, train_unigram, train_unigram_with_trace, train_wordpiece, BpeOptions, EmTrace,
    UnigramOptions, WordPieceOptions,
};
pub use vocab::{prune_vocab, token_frequencies, TokenUsage};
