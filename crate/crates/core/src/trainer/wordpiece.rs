//! WordPiece training: the BPE merge loop with a likelihood-based score.
//!
//! A pair merges when it maximizes `count(left,right) / (count(left) ×
//! count(right))`. Scores are compared by exact integer cross-multiplication,
//! so ordering never depends on floating-point rounding. Vocabulary entries
//! use the `##` continuation convention.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use super::{covered_chars, validate_common};
use crate::corpus::CorpusStats;
use crate::error::Result;
use crate::model::{special_vocab, Algorithm, TokenizerModel, CONTINUATION_PREFIX, SPECIAL_TOKENS};
use crate::normalizer::NormalizationConfig;

const HOLE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct WordPieceOptions {
    /// Stop merging when no pair occurs at least this often.
    pub min_pair_freq: u64,
    /// Fraction of character occurrences the alphabet must cover.
    pub character_coverage: f64,
    /// Normalization baked into the resulting model.
    pub normalization: NormalizationConfig,
}

impl Default for WordPieceOptions {
    fn default() -> Self {
        // the ratio score maximizes on rare exclusive pairs, so an
        // unfiltered trainer spends its whole budget on hapax merges; the
        // floor keeps merge decisions on statistically meaningful pairs
        Self {
            min_pair_freq: 10,
            character_coverage: 1.0,
            normalization: NormalizationConfig::default(),
        }
    }
}

struct Candidate {
    pair_count: u64,
    left_count: u64,
    right_count: u64,
    left: String,
    right: String,
    pair: (u32, u32),
}

impl Candidate {
    /// Compare `pair/(left·right)` against another candidate exactly.
    fn score_cmp(&self, other: &Self) -> Ordering {
        let lhs = self.pair_count as u128 * (other.left_count as u128 * other.right_count as u128);
        let rhs = other.pair_count as u128 * (self.left_count as u128 * self.right_count as u128);
        lhs.cmp(&rhs)
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score_cmp(other)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

struct Word {
    pieces: Vec<u32>,
    freq: u64,
}

struct Symbols {
    strings: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Symbols {
    fn new() -> Self {
        Self {
            strings: Vec::new(),
            ids: HashMap::new(),
        }
    }

    fn intern(&mut self, s: String) -> u32 {
        if let Some(&id) = self.ids.get(&s) {
            return id;
        }
        let id = self.strings.len() as u32;
        self.ids.insert(s.clone(), id);
        self.strings.push(s);
        id
    }

    fn get(&self, id: u32) -> &str {
        &self.strings[id as usize]
    }
}

fn adjacent_pairs(pieces: &[u32]) -> impl Iterator<Item = (u32, u32)> + '_ {
    pieces
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| a != HOLE && b != HOLE)
}

fn apply_merge(pieces: &[u32], pair: (u32, u32), merged: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(pieces.len());
    let mut i = 0;
    while i < pieces.len() {
        if i + 1 < pieces.len() && pieces[i] == pair.0 && pieces[i + 1] == pair.1 {
            out.push(merged);
            i += 2;
        } else {
            out.push(pieces[i]);
            i += 1;
        }
    }
    out
}

fn strip_continuation(s: &str) -> &str {
    s.strip_prefix(CONTINUATION_PREFIX).unwrap_or(s)
}

/// Train a WordPiece model. Identical loop shape to BPE; only the merge
/// score differs.
pub fn train_wordpiece(
    stats: &CorpusStats,
    vocab_size: usize,
    opts: &WordPieceOptions,
) -> Result<TokenizerModel> {
    let alphabet = covered_chars(stats, opts.character_coverage);
    // each character contributes a word-initial and a continuation form
    let required = SPECIAL_TOKENS.len() + alphabet.len() * 2;
    validate_common(stats, vocab_size, required, opts.character_coverage)?;

    let mut symbols = Symbols::new();
    let mut words: Vec<Word> = Vec::with_capacity(stats.distinct_words());
    for (word, &freq) in &stats.word_counts {
        let mut pieces = Vec::with_capacity(word.chars().count());
        for (i, c) in word.chars().enumerate() {
            if !alphabet.contains(&c) {
                pieces.push(HOLE);
            } else if i == 0 {
                pieces.push(symbols.intern(c.to_string()));
            } else {
                pieces.push(symbols.intern(format!("{CONTINUATION_PREFIX}{c}")));
            }
        }
        words.push(Word { pieces, freq });
    }

    let mut piece_counts: HashMap<u32, u64> = HashMap::new();
    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
    let mut piece_pairs: HashMap<u32, BTreeSet<(u32, u32)>> = HashMap::new();
    for (idx, word) in words.iter().enumerate() {
        for &piece in word.pieces.iter().filter(|&&p| p != HOLE) {
            *piece_counts.entry(piece).or_insert(0) += word.freq;
        }
        for pair in adjacent_pairs(&word.pieces) {
            *pair_counts.entry(pair).or_insert(0) += word.freq;
            pair_words.entry(pair).or_default().insert(idx);
            piece_pairs.entry(pair.0).or_default().insert(pair);
            piece_pairs.entry(pair.1).or_default().insert(pair);
        }
    }

    let make_candidate = |pair: (u32, u32),
                          count: u64,
                          symbols: &Symbols,
                          piece_counts: &HashMap<u32, u64>| Candidate {
        pair_count: count,
        left_count: piece_counts.get(&pair.0).copied().unwrap_or(0),
        right_count: piece_counts.get(&pair.1).copied().unwrap_or(0),
        left: symbols.get(pair.0).to_string(),
        right: symbols.get(pair.1).to_string(),
        pair,
    };

    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .filter(|(_, &count)| count >= opts.min_pair_freq)
        .map(|(&pair, &count)| make_candidate(pair, count, &symbols, &piece_counts))
        .collect();

    let mut merges: Vec<(String, String)> = Vec::new();
    let mut banned: HashSet<(u32, u32)> = HashSet::new();
    let mut vocab_len = required;

    while vocab_len < vocab_size {
        let Some(cand) = heap.pop() else { break };
        let current = pair_counts.get(&cand.pair).copied().unwrap_or(0);
        if current < opts.min_pair_freq {
            continue;
        }
        let left_now = piece_counts.get(&cand.pair.0).copied().unwrap_or(0);
        let right_now = piece_counts.get(&cand.pair.1).copied().unwrap_or(0);
        if current != cand.pair_count || left_now != cand.left_count || right_now != cand.right_count
        {
            heap.push(Candidate {
                pair_count: current,
                left_count: left_now,
                right_count: right_now,
                ..cand
            });
            continue;
        }
        if banned.contains(&cand.pair) {
            continue;
        }
        let product = format!("{}{}", cand.left, strip_continuation(&cand.right));
        if symbols.ids.contains_key(&product) || SPECIAL_TOKENS.contains(&product.as_str()) {
            banned.insert(cand.pair);
            continue;
        }

        let merged = symbols.intern(product);
        merges.push((cand.left.clone(), cand.right.clone()));
        vocab_len += 1;

        let affected = pair_words.remove(&cand.pair).unwrap_or_default();
        let mut touched_pairs: BTreeSet<(u32, u32)> = BTreeSet::new();
        for idx in affected {
            let freq = words[idx].freq;
            let old_pieces = std::mem::take(&mut words[idx].pieces);
            let new_pieces = apply_merge(&old_pieces, cand.pair, merged);
            if new_pieces.len() == old_pieces.len() {
                words[idx].pieces = old_pieces;
                continue;
            }
            for &piece in old_pieces.iter().filter(|&&p| p != HOLE) {
                *piece_counts.entry(piece).or_insert(0) -= freq;
            }
            for &piece in new_pieces.iter().filter(|&&p| p != HOLE) {
                *piece_counts.entry(piece).or_insert(0) += freq;
            }
            for pair in adjacent_pairs(&old_pieces) {
                *pair_counts.entry(pair).or_insert(0) -= freq;
                touched_pairs.insert(pair);
            }
            for pair in adjacent_pairs(&new_pieces) {
                *pair_counts.entry(pair).or_insert(0) += freq;
                pair_words.entry(pair).or_default().insert(idx);
                touched_pairs.insert(pair);
            }
            words[idx].pieces = new_pieces;
        }
        debug_assert_eq!(pair_counts.get(&cand.pair).copied().unwrap_or(0), 0);
        pair_counts.remove(&cand.pair);
        piece_pairs.entry(cand.pair.0).or_default().remove(&cand.pair);
        piece_pairs.entry(cand.pair.1).or_default().remove(&cand.pair);

        // merging changed count(left), count(right) and introduced the
        // product, so every pair touching those pieces changes score
        let mut refresh: BTreeSet<(u32, u32)> = touched_pairs;
        for piece in [cand.pair.0, cand.pair.1, merged] {
            if let Some(pairs) = piece_pairs.get(&piece) {
                refresh.extend(pairs.iter().copied());
            }
        }
        for pair in refresh {
            if pair == cand.pair {
                continue;
            }
            let count = pair_counts.get(&pair).copied().unwrap_or(0);
            if count == 0 {
                pair_counts.remove(&pair);
                piece_pairs.entry(pair.0).or_default().remove(&pair);
                piece_pairs.entry(pair.1).or_default().remove(&pair);
            } else {
                piece_pairs.entry(pair.0).or_default().insert(pair);
                piece_pairs.entry(pair.1).or_default().insert(pair);
                if count >= opts.min_pair_freq {
                    heap.push(make_candidate(pair, count, &symbols, &piece_counts));
                }
            }
        }
    }

    let mut alphabet_tokens: Vec<String> = Vec::with_capacity(alphabet.len() * 2);
    for c in &alphabet {
        alphabet_tokens.push(c.to_string());
        alphabet_tokens.push(format!("{CONTINUATION_PREFIX}{c}"));
    }
    alphabet_tokens.sort();

    let mut vocab = special_vocab();
    vocab.extend(alphabet_tokens);
    for (left, right) in &merges {
        vocab.push(format!("{}{}", left, strip_continuation(right)));
    }

    TokenizerModel::from_parts(
        Algorithm::WordPiece,
        vocab,
        vec![],
        vec![],
        0,
        opts.normalization,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_str;

    fn stats_from(pairs: &[(&str, u64)]) -> CorpusStats {
        let mut stats = CorpusStats::default();
        for (word, count) in pairs {
            stats.add_word(word, *count);
        }
        stats
    }

    #[test]
    fn likelihood_score_beats_raw_frequency() {
        // piece counts by hand: a=105, ##b=5, c=8, ##d=4
        // score(a,##b) = 5/(105·5) ≈ 0.0095 < score(c,##d) = 4/(8·4) = 0.125
        let stats = stats_from(&[("ab", 5), ("a", 100), ("b", 100), ("cd", 4), ("c", 4), ("d", 4)]);
        let required = 4 + 4 * 2;
        let opts = WordPieceOptions {
            min_pair_freq: 1,
            ..WordPieceOptions::default()
        };
        let model = train_wordpiece(&stats, required + 1, &opts).unwrap();
        assert!(model.id_of("cd").is_some());
        assert!(model.id_of("ab").is_none());
    }

    #[test]
    fn empty_merge_budget_gives_character_vocab() {
        let stats = stats_from(&[("ab", 1)]);
        let model = train_wordpiece(&stats, 4 + 4, &WordPieceOptions::default()).unwrap();
        let expected: Vec<&str> = vec!["<unk>", "<s>", "</s>", "<pad>", "##a", "##b", "a", "b"];
        assert_eq!(model.vocab, expected);
    }

    #[test]
    fn symmetric_tie_breaks_lexicographically() {
        // (a,##b) and (b,##a) both score 1/(1·1); "a" < "b"
        let stats = stats_from(&[("ab", 1), ("ba", 1)]);
        let opts = WordPieceOptions {
            min_pair_freq: 1,
            ..WordPieceOptions::default()
        };
        let model = train_wordpiece(&stats, 4 + 4 + 1, &opts).unwrap();
        assert!(model.id_of("ab").is_some());
        assert!(model.id_of("ba").is_none());
    }

    #[test]
    fn continuation_pieces_carry_prefix() {
        let stats = stats_from(&[("abc", 10)]);
        let model = train_wordpiece(&stats, 32, &WordPieceOptions::default()).unwrap();
        // multi-char continuations like "##bc" keep the prefix; products of
        // word-initial pieces do not
        assert!(model.vocab.iter().any(|t| t.starts_with("##") && t.len() > 3));
        assert!(model.id_of("abc").is_some());
    }

    #[test]
    fn alphabet_has_both_forms_of_every_char() {
        let stats = ingest_str("كتب كاتب مكتوب", &crate::normalizer::NormalizationConfig::default());
        let model = train_wordpiece(&stats, 64, &WordPieceOptions::default()).unwrap();
        for c in stats.char_counts().keys() {
            assert!(model.id_of(&c.to_string()).is_some());
            assert!(model.id_of(&format!("##{c}")).is_some());
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let stats = ingest_str(
            "word piece word pieces wording",
            &crate::normalizer::NormalizationConfig::default(),
        );
        let opts = WordPieceOptions {
            min_pair_freq: 1,
            ..WordPieceOptions::default()
        };
        let a = train_wordpiece(&stats, 48, &opts).unwrap();
        let b = train_wordpiece(&stats, 48, &opts).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
    }
}
