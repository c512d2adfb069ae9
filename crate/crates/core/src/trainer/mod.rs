//! Tokenizer trainers: Unigram (EM), BPE (greedy pair merges) and WordPiece
//! (likelihood-scored merges).
//!
//! All trainers are deterministic: tie-breaking is fixed everywhere as
//! (score descending, token/pair lexicographic ascending) and iteration runs
//! over sorted keys, so identical stats and options produce bit-identical
//! models.

mod bpe;
mod unigram;
mod wordpiece;

pub use bpe::{train_bpe, BpeOptions};
pub use unigram::{train_unigram, train_unigram_with_trace, EmTrace, UnigramOptions};
pub use wordpiece::{train_wordpiece, WordPieceOptions};

use std::collections::BTreeSet;

use crate::corpus::CorpusStats;
use crate::error::{Error, Result};

/// Characters retained as the model alphabet: the smallest frequency-ranked
/// prefix covering `coverage` of all character occurrences. At the default
/// coverage of 1.0 every observed character is kept; lower values exclude the
/// rarest characters, which then encode as UNK.
pub(crate) fn covered_chars(stats: &CorpusStats, coverage: f64) -> BTreeSet<char> {
    let counts = stats.char_counts();
    if coverage >= 1.0 {
        return counts.into_keys().collect();
    }
    let total: u64 = counts.values().sum();
    let mut ranked: Vec<(char, u64)> = counts.into_iter().collect();
    // count desc, char asc
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let target = coverage * total as f64;
    let mut kept = BTreeSet::new();
    let mut acc = 0u64;
    for (c, n) in ranked {
        if acc as f64 >= target && !kept.is_empty() {
            break;
        }
        kept.insert(c);
        acc += n;
    }
    kept
}

pub(crate) fn validate_common(
    stats: &CorpusStats,
    vocab_size: usize,
    required: usize,
    coverage: f64,
) -> Result<()> {
    if stats.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if !(0.0..=1.0).contains(&coverage) || coverage <= 0.0 {
        return Err(Error::Config(format!(
            "character_coverage must be in (0, 1], got {coverage}"
        )));
    }
    if vocab_size < required {
        return Err(Error::Config(format!(
            "vocab_size {vocab_size} below alphabet + specials ({required})"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_str;
    use crate::normalizer::NormalizationConfig;

    #[test]
    fn full_coverage_keeps_every_char() {
        let stats = ingest_str("aab abc", &NormalizationConfig::default());
        let chars = covered_chars(&stats, 1.0);
        assert_eq!(chars, ['a', 'b', 'c'].into_iter().collect());
    }

    #[test]
    fn partial_coverage_drops_rarest() {
        // a: 6, b: 3, z: 1 -> 90% coverage keeps {a, b}
        let stats = ingest_str("aaaaaa bbb z", &NormalizationConfig::default());
        let chars = covered_chars(&stats, 0.9);
        assert_eq!(chars, ['a', 'b'].into_iter().collect());
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let stats = CorpusStats::default();
        assert!(matches!(
            validate_common(&stats, 100, 4, 1.0),
            Err(Error::EmptyCorpus)
        ));
    }
}
