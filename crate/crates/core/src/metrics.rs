//! Intrinsic tokenizer evaluation: fertility, compression ratio, OOV rate.

use serde::{Deserialize, Serialize};

use crate::codec::encode_word;
use crate::corpus::CorpusStats;
use crate::error::{Error, Result};
use crate::model::TokenizerModel;
use crate::util::chunked_map;

const CHUNK: usize = 1024;

/// Evaluation summary over a corpus.
///
/// `fertility × compression_ratio == total_chars / total_words` holds for
/// every report this module emits (1e-12 relative in floats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Tokens per word occurrence; lower is better. Always >= 1.
    pub fertility: f64,
    /// Characters per token; higher is better.
    pub compression_ratio: f64,
    /// Fraction of word occurrences whose encoding contains UNK.
    pub oov_rate: f64,
    pub total_words: u64,
    pub total_tokens: u64,
    pub total_chars: u64,
}

impl MetricsReport {
    /// One human-readable comparison row: name, fertility, compression,
    /// OOV percentage.
    pub fn table_row(&self, name: &str) -> String {
        format!(
            "{name:<32} {:>9.4} {:>9.3} {:>7.2}",
            self.fertility,
            self.compression_ratio,
            self.oov_rate * 100.0
        )
    }

    /// Header matching [`MetricsReport::table_row`].
    pub fn table_header() -> String {
        format!(
            "{:<32} {:>9} {:>9} {:>7}",
            "tokenizer", "fertility", "comp", "oov%"
        )
    }
}

/// Evaluate a model against corpus statistics.
///
/// `eval_stats` must have been ingested with the model's own normalization
/// config (the CLI does this automatically); re-normalizing a normalized word
/// is a no-op, so the encoding path stays consistent. Tokens are counted by
/// encoding each distinct word once and weighting by frequency; a word counts
/// as OOV when its encoding contains at least one UNK id. Boundary markers
/// never count toward `total_chars`.
pub fn evaluate(model: &TokenizerModel, eval_stats: &CorpusStats) -> Result<MetricsReport> {
    if eval_stats.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let entries: Vec<(&String, &u64)> = eval_stats.word_counts.iter().collect();
    let partials = chunked_map(&entries, CHUNK, |chunk| {
        let mut tokens = 0u64;
        let mut oov = 0u64;
        for (word, &freq) in chunk {
            let ids = encode_word(model, word);
            tokens += ids.len() as u64 * freq;
            if ids.contains(&model.unk_id) {
                oov += freq;
            }
        }
        (tokens, oov)
    });
    let (total_tokens, oov_words) = partials
        .into_iter()
        .fold((0u64, 0u64), |(t, o), (pt, po)| (t + pt, o + po));

    let report = MetricsReport {
        fertility: total_tokens as f64 / eval_stats.total_words as f64,
        compression_ratio: eval_stats.total_chars as f64 / total_tokens as f64,
        oov_rate: oov_words as f64 / eval_stats.total_words as f64,
        total_words: eval_stats.total_words,
        total_tokens,
        total_chars: eval_stats.total_chars,
    };
    debug_assert!(identity_holds(&report));
    Ok(report)
}

/// The defining relation between the three counters.
pub fn identity_holds(report: &MetricsReport) -> bool {
    let lhs = report.fertility * report.compression_ratio;
    let rhs = report.total_chars as f64 / report.total_words as f64;
    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Algorithm, SPECIAL_LOGPROB, SPECIAL_TOKENS};
    use crate::normalizer::NormalizationConfig;

    fn model_with(pieces: &[(&str, f64)]) -> TokenizerModel {
        let mut vocab: Vec<String> = SPECIAL_TOKENS.iter().map(|s| s.to_string()).collect();
        let mut logprobs = vec![SPECIAL_LOGPROB; SPECIAL_TOKENS.len()];
        for (text, prob) in pieces {
            vocab.push(text.to_string());
            logprobs.push(prob.ln());
        }
        TokenizerModel::from_parts(
            Algorithm::Unigram,
            vocab,
            logprobs,
            vec![],
            0,
            NormalizationConfig::default(),
        )
        .unwrap()
    }

    fn stats_from(pairs: &[(&str, u64)]) -> CorpusStats {
        let mut stats = CorpusStats::default();
        for (word, count) in pairs {
            stats.add_word(word, *count);
        }
        stats
    }

    #[test]
    fn single_piece_word() {
        // "▁ab" as one piece: fertility 1, compression 2 chars/token
        let model = model_with(&[("▁ab", 0.9), ("▁", 0.03), ("a", 0.03), ("b", 0.04)]);
        let report = evaluate(&model, &stats_from(&[("ab", 1)])).unwrap();
        assert_eq!(report.fertility, 1.0);
        assert_eq!(report.compression_ratio, 2.0);
        assert_eq!(report.oov_rate, 0.0);
    }

    #[test]
    fn split_word_doubles_fertility() {
        let model = model_with(&[("▁a", 0.5), ("b", 0.5)]);
        let report = evaluate(&model, &stats_from(&[("ab", 1)])).unwrap();
        assert_eq!(report.fertility, 2.0);
        assert_eq!(report.compression_ratio, 1.0);
    }

    #[test]
    fn identity_relation_holds() {
        let model = model_with(&[("▁a", 0.3), ("a", 0.3), ("▁", 0.2), ("b", 0.2)]);
        let report = evaluate(&model, &stats_from(&[("ab", 3), ("a", 2), ("ba", 7)])).unwrap();
        assert!(identity_holds(&report));
        let implied = report.total_chars as f64 / report.total_words as f64;
        assert!((report.fertility * report.compression_ratio - implied).abs() <= 1e-12 * implied);
    }

    #[test]
    fn covered_alphabet_means_zero_oov() {
        let model = model_with(&[("▁", 0.4), ("a", 0.3), ("b", 0.3)]);
        let report = evaluate(&model, &stats_from(&[("ab", 5), ("ba", 2)])).unwrap();
        assert_eq!(report.oov_rate, 0.0);
        assert!(report.fertility >= 1.0);
    }

    #[test]
    fn oov_counts_word_occurrences() {
        let model = model_with(&[("▁", 0.5), ("a", 0.5)]);
        // "ax" contains an unknown char; 3 of 4 occurrences are OOV
        let report = evaluate(&model, &stats_from(&[("ax", 3), ("a", 1)])).unwrap();
        assert_eq!(report.oov_rate, 0.75);
    }

    #[test]
    fn uniform_duplication_changes_nothing() {
        let model = model_with(&[("▁", 0.4), ("a", 0.3), ("b", 0.3)]);
        let base = stats_from(&[("ab", 2), ("a", 3)]);
        let scaled = stats_from(&[("ab", 20), ("a", 30)]);
        let r1 = evaluate(&model, &base).unwrap();
        let r2 = evaluate(&model, &scaled).unwrap();
        assert_eq!(r1.fertility, r2.fertility);
        assert_eq!(r1.compression_ratio, r2.compression_ratio);
        assert_eq!(r1.oov_rate, r2.oov_rate);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let model = model_with(&[("a", 1.0)]);
        assert!(matches!(
            evaluate(&model, &CorpusStats::default()),
            Err(Error::EmptyCorpus)
        ));
    }
}
