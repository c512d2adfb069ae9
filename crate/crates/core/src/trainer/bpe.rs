//! Greedy highest-frequency pair merging over marked character sequences.
//!
//! Words enter training as `▁` + word; the boundary marker is an ordinary
//! alphabet symbol, so merges may fuse it with word-initial characters.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

use super::{covered_chars, validate_common};
use crate::corpus::CorpusStats;
use crate::error::Result;
use crate::model::{special_vocab, Algorithm, TokenizerModel, BOUNDARY_MARKER, SPECIAL_TOKENS};
use crate::normalizer::NormalizationConfig;

/// Sentinel for characters excluded by `character_coverage`; blocks merges
/// across the excluded position and never enters the vocabulary.
const HOLE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct BpeOptions {
    /// Stop merging when no pair occurs at least this often.
    pub min_pair_freq: u64,
    /// Fraction of character occurrences the alphabet must cover.
    pub character_coverage: f64,
    /// Normalization baked into the resulting model.
    pub normalization: NormalizationConfig,
    /// Recount all pair frequencies from scratch after every merge and
    /// compare with the incremental ledger. Only for small corpora.
    pub audit_counts: bool,
}

impl Default for BpeOptions {
    fn default() -> Self {
        Self {
            min_pair_freq: 2,
            character_coverage: 1.0,
            normalization: NormalizationConfig::default(),
            audit_counts: false,
        }
    }
}

struct Candidate {
    count: u64,
    left: String,
    right: String,
    pair: (u32, u32),
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // count desc, then (left, right) lexicographic asc under a max-heap
        self.count
            .cmp(&other.count)
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

fn recount(words: &[Word]) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for word in words {
        for pair in adjacent_pairs(&word.pieces) {
            *counts.entry(pair).or_insert(0) += word.freq;
        }
    }
    counts
}

/// Train a BPE model: start from the marked character alphabet and merge the
/// highest-frequency adjacent pair until the vocabulary is full or no pair
/// reaches `min_pair_freq`. The merge list is recorded in order.
pub fn train_bpe(
    stats: &CorpusStats,
    vocab_size: usize,
    opts: &BpeOptions,
) -> Result<TokenizerModel> {
    let alphabet = covered_chars(stats, opts.character_coverage);
    let required = SPECIAL_TOKENS.len() + alphabet.len() + 1; // + marker
    validate_common(stats, vocab_size, required, opts.character_coverage)?;

    let mut symbols = Symbols::new();
    let marker_sym = symbols.intern(BOUNDARY_MARKER.to_string());

    let mut words: Vec<Word> = Vec::with_capacity(stats.distinct_words());
    for (word, &freq) in &stats.word_counts {
        let mut pieces = Vec::with_capacity(word.chars().count() + 1);
        pieces.push(marker_sym);
        for c in word.chars() {
            if alphabet.contains(&c) {
                pieces.push(symbols.intern(c.to_string()));
            } else {
                pieces.push(HOLE);
            }
        }
        words.push(Word { pieces, freq });
    }

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), BTreeSet<usize>> = HashMap::new();
    for (idx, word) in words.iter().enumerate() {
        for pair in adjacent_pairs(&word.pieces) {
            *pair_counts.entry(pair).or_insert(0) += word.freq;
            pair_words.entry(pair).or_default().insert(idx);
        }
    }

    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .filter(|(_, &count)| count >= opts.min_pair_freq)
        .map(|(&pair, &count)| Candidate {
            count,
            left: symbols.get(pair.0).to_string(),
            right: symbols.get(pair.1).to_string(),
            pair,
        })
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
        if current != cand.count {
            // stale entry; re-queue at the true count
            heap.push(Candidate { count: current, ..cand });
            continue;
        }
        if banned.contains(&cand.pair) {
            continue;
        }
        let product = format!("{}{}", cand.left, cand.right);
        if symbols.ids.contains_key(&product) || SPECIAL_TOKENS.contains(&product.as_str()) {
            // a different merge path already produced this string; merging
            // again would duplicate a vocab entry
            banned.insert(cand.pair);
            continue;
        }

        let merged = symbols.intern(product);
        merges.push((cand.left.clone(), cand.right.clone()));
        vocab_len += 1;

        let affected = pair_words.remove(&cand.pair).unwrap_or_default();
        let mut touched: BTreeSet<(u32, u32)> = BTreeSet::new();
        for idx in affected {
            let freq = words[idx].freq;
            let old_pieces = std::mem::take(&mut words[idx].pieces);
            let new_pieces = apply_merge(&old_pieces, cand.pair, merged);
            if new_pieces.len() == old_pieces.len() {
                words[idx].pieces = old_pieces;
                continue;
            }
            for pair in adjacent_pairs(&old_pieces) {
                let entry = pair_counts.entry(pair).or_insert(0);
                *entry -= freq;
                touched.insert(pair);
            }
            for pair in adjacent_pairs(&new_pieces) {
                *pair_counts.entry(pair).or_insert(0) += freq;
                pair_words.entry(pair).or_default().insert(idx);
                touched.insert(pair);
            }
            words[idx].pieces = new_pieces;
        }
        debug_assert_eq!(pair_counts.get(&cand.pair).copied().unwrap_or(0), 0);
        pair_counts.remove(&cand.pair);

        for pair in touched {
            if pair == cand.pair {
                continue;
            }
            let count = pair_counts.get(&pair).copied().unwrap_or(0);
            if count == 0 {
                pair_counts.remove(&pair);
            } else if count >= opts.min_pair_freq {
                heap.push(Candidate {
                    count,
                    left: symbols.get(pair.0).to_string(),
                    right: symbols.get(pair.1).to_string(),
                    pair,
                });
            }
        }

        if opts.audit_counts {
            let fresh = recount(&words);
            let mut ledger: Vec<_> = pair_counts
                .iter()
                .filter(|(_, &c)| c > 0)
                .map(|(&p, &c)| (p, c))
                .collect();
            ledger.sort_unstable();
            let mut full: Vec<_> = fresh.into_iter().collect();
            full.sort_unstable();
            assert_eq!(ledger, full, "incremental pair counts diverged");
        }
    }

    let mut vocab = special_vocab();
    vocab.push(BOUNDARY_MARKER.to_string());
    vocab.extend(alphabet.iter().map(|c| c.to_string()));
    for (left, right) in &merges {
        vocab.push(format!("{left}{right}"));
    }

    TokenizerModel::from_parts(Algorithm::Bpe, vocab, vec![], merges, 0, opts.normalization)
}
