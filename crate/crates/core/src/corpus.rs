//! Corpus ingestion, whitespace pre-tokenization and frequency statistics.
//!
//! A "word" is a maximal run of non-whitespace characters. Character counts
//! exclude whitespace so that compression ratios are insensitive to spacing
//! conventions; this shifts absolute numbers and is applied uniformly across
//! all metrics in this crate.

use std::collections::BTreeMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalizer::{NormalizationConfig, Normalizer};

/// Word frequency table and character counts accumulated from a corpus.
///
/// Keys are sorted, so iteration order (and everything trained from it) is
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Word string -> occurrence count. Keys are nonempty and whitespace-free.
    pub word_counts: BTreeMap<String, u64>,
    /// Sum of all counts.
    pub total_words: u64,
    /// Non-whitespace Unicode scalar values across the corpus (post-
    /// normalization when built through [`ingest`]).
    pub total_chars: u64,
}

impl CorpusStats {
    pub fn is_empty(&self) -> bool {
        self.total_words == 0
    }

    /// Number of distinct words.
    pub fn distinct_words(&self) -> usize {
        self.word_counts.len()
    }

    /// Record one word occurrence.
    pub fn add_word(&mut self, word: &str, count: u64) {
        debug_assert!(!word.is_empty() && !word.chars().any(char::is_whitespace));
        *self.word_counts.entry(word.to_string()).or_insert(0) += count;
        self.total_words += count;
        self.total_chars += word.chars().count() as u64 * count;
    }

    /// Merge another stats table into this one. Associative and commutative,
    /// so disjoint shards can be ingested concurrently and merged.
    pub fn merge(&mut self, other: CorpusStats) {
        for (word, count) in other.word_counts {
            *self.word_counts.entry(word).or_insert(0) += count;
        }
        self.total_words += other.total_words;
        self.total_chars += other.total_chars;
    }

    /// Distinct characters with their frequency-weighted counts, sorted.
    pub fn char_counts(&self) -> BTreeMap<char, u64> {
        let mut counts = BTreeMap::new();
        for (word, &freq) in &self.word_counts {
            for c in word.chars() {
                *counts.entry(c).or_insert(0) += freq;
            }
        }
        counts
    }
}

/// Split on Unicode whitespace. No empty words; joining the result with
/// single spaces and re-splitting yields the same sequence.
pub fn pre_tokenize(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
}

/// Normalize and count a stream of lines. `total_chars` counts the characters
/// of the normalized words, whitespace excluded. A failing line aborts with
/// its 1-based position.
pub fn ingest<I>(lines: I, config: &NormalizationConfig) -> Result<CorpusStats>
where
    I: IntoIterator<Item = std::io::Result<String>>,
{
    let normalizer = Normalizer::new(*config);
    let mut stats = CorpusStats::default();
    for (idx, line) in lines.into_iter().enumerate() {
        let line = line.map_err(|source| Error::CorpusRead {
            line: idx as u64 + 1,
            source,
        })?;
        ingest_line(&mut stats, &normalizer, &line);
    }
    Ok(stats)
}

/// Ingest from a reader, one document per line, optionally capped at
/// `max_lines`.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    config: &NormalizationConfig,
    max_lines: Option<u64>,
) -> Result<CorpusStats> {
    let cap = max_lines.unwrap_or(u64::MAX);
    ingest(reader.lines().take(cap as usize), config)
}

/// Ingest in-memory text. Infallible input, so only used where the stream
/// already lives in memory (tests, the browser demo).
pub fn ingest_str(text: &str, config: &NormalizationConfig) -> CorpusStats {
    let normalizer = Normalizer::new(*config);
    let mut stats = CorpusStats::default();
    for line in text.lines() {
        ingest_line(&mut stats, &normalizer, line);
    }
    stats
}

fn ingest_line(stats: &mut CorpusStats, normalizer: &Normalizer, line: &str) {
    let normalized = normalizer.normalize(line);
    for word in pre_tokenize(&normalized) {
        stats.add_word(word, 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_iter(lines: &[&str]) -> Vec<std::io::Result<String>> {
        lines.iter().map(|l| Ok(l.to_string())).collect()
    }

    #[test]
    fn pre_tokenize_splits_and_drops_empties() {
        assert_eq!(
            pre_tokenize("كتاب جديد").collect::<Vec<_>>(),
            vec!["كتاب", "جديد"]
        );
        assert_eq!(pre_tokenize("  a  b ").collect::<Vec<_>>(), vec!["a", "b"]);
        assert_eq!(pre_tokenize("").count(), 0);
    }

    #[test]
    fn ingest_counts_by_hand() {
        let stats = ingest(line_iter(&["اب اب"]), &NormalizationConfig::default()).unwrap();
        assert_eq!(stats.word_counts.get("اب"), Some(&2));
        assert_eq!(stats.total_words, 2);
        assert_eq!(stats.total_chars, 4);
    }

    #[test]
    fn ingest_empty_stream() {
        let stats = ingest(line_iter(&[]), &NormalizationConfig::default()).unwrap();
        assert!(stats.is_empty());
        assert_eq!(stats.total_chars, 0);
    }

    #[test]
    fn ingest_normalizes_before_counting() {
        // Hamza-above Alif unifies to bare Alif before the word is counted.
        let stats = ingest(line_iter(&["أب"]), &NormalizationConfig::default()).unwrap();
        assert_eq!(stats.word_counts.get("اب"), Some(&1));
        assert_eq!(stats.word_counts.len(), 1);
    }

    #[test]
    fn ingest_reports_failing_line_position() {
        let lines: Vec<std::io::Result<String>> = vec![
            Ok("ok".to_string()),
            Err(std::io::Error::other("boom")),
        ];
        match ingest(lines, &NormalizationConfig::default()) {
            Err(Error::CorpusRead { line: 2, .. }) => {}
            other => panic!("expected CorpusRead at line 2, got {other:?}"),
        }
    }

    #[test]
    fn merge_matches_concatenated_ingest() {
        let config = NormalizationConfig::default();
        let a = ["كتاب جديد", "كتاب"];
        let b = ["جديد جديد", "قلم"];
        let all: Vec<&str> = a.iter().chain(b.iter()).copied().collect();

        let mut merged = ingest(line_iter(&a), &config).unwrap();
        merged.merge(ingest(line_iter(&b), &config).unwrap());
        let whole = ingest(line_iter(&all), &config).unwrap();
        assert_eq!(merged, whole);
    }

    #[test]
    fn stats_are_order_independent() {
        let config = NormalizationConfig::default();
        let fwd = ingest(line_iter(&["a b", "c", "a"]), &config).unwrap();
        let rev = ingest(line_iter(&["a", "c", "a b"]), &config).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn max_lines_caps_ingestion() {
        let text = "a\nb\nc\n";
        let stats =
            ingest_reader(text.as_bytes(), &NormalizationConfig::default(), Some(2)).unwrap();
        assert_eq!(stats.total_words, 2);
    }
}
