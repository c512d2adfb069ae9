//! Unigram language-model training with EM over segmentation lattices.
//!
//! The procedure: seed a large candidate vocabulary from frequent substrings,
//! then alternate expectation-maximization over each word's segmentation
//! lattice with pruning of the pieces whose removal costs the least corpus
//! log-likelihood, until the vocabulary fits the target size.

use std::collections::{BTreeSet, HashMap};

use super::{covered_chars, validate_common};
use crate::corpus::CorpusStats;
use crate::error::Result;
use crate::model::{special_vocab, Algorithm, TokenizerModel, BOUNDARY_MARKER, SPECIAL_LOGPROB, SPECIAL_TOKENS};
use crate::normalizer::NormalizationConfig;
use crate::util::{chunked_map, log_add};

/// Lattices are built per word; anything longer is hard-split to bound their
/// size.
const MAX_WORD_CHARS: usize = 256;

/// Fragments processed per work unit in the parallel E-step. Fixed so that
/// results do not depend on thread count.
const CHUNK: usize = 512;

#[derive(Debug, Clone)]
pub struct UnigramOptions {
    /// Seed vocabulary cap; defaults to `min(1_000_000, 10 × vocab_size)`.
    pub seed_size: Option<usize>,
    /// Longest candidate piece, in characters.
    pub max_piece_length: usize,
    /// EM iterations per pruning round.
    pub em_iters: usize,
    /// Fraction of pieces kept per pruning round.
    pub shrink_factor: f64,
    /// Fraction of character occurrences the alphabet must cover.
    pub character_coverage: f64,
    /// Normalization baked into the resulting model.
    pub normalization: NormalizationConfig,
}

impl Default for UnigramOptions {
    fn default() -> Self {
        Self {
            seed_size: None,
            max_piece_length: 16,
            em_iters: 2,
            shrink_factor: 0.75,
            character_coverage: 1.0,
            normalization: NormalizationConfig::default(),
        }
    }
}

/// Corpus log-likelihood observed at the start of each EM iteration,
/// grouped by pruning round. Within a round the sequence is non-decreasing.
#[derive(Debug, Clone, Default)]
pub struct EmTrace {
    pub rounds: Vec<Vec<f64>>,
}

struct Piece {
    chars: Vec<char>,
    text: String,
    logprob: f64,
    protected: bool,
}

/// Char-level trie over the current piece set; lattice edges come from
/// walking it from every start position.
struct Trie {
    children: Vec<HashMap<char, u32>>,
    piece: Vec<Option<u32>>,
}

impl Trie {
    fn build(pieces: &[Piece]) -> Self {
        let mut trie = Trie {
            children: vec![HashMap::new()],
            piece: vec![None],
        };
        for (id, piece) in pieces.iter().enumerate() {
            let mut node = 0u32;
            for &c in &piece.chars {
                let next = match trie.children[node as usize].get(&c) {
                    Some(&n) => n,
                    None => {
                        let n = trie.children.len() as u32;
                        trie.children.push(HashMap::new());
                        trie.piece.push(None);
                        trie.children[node as usize].insert(c, n);
                        n
                    }
                };
                node = next;
            }
            trie.piece[node as usize] = Some(id as u32);
        }
        trie
    }

    /// Pieces matching `chars[start..]`, as (end, piece id) pairs in
    /// increasing end order.
    fn matches_into(&self, chars: &[char], start: usize, out: &mut Vec<(u32, u32)>) {
        out.clear();
        let mut node = 0u32;
        for (offset, &c) in chars[start..].iter().enumerate() {
            match self.children[node as usize].get(&c) {
                Some(&next) => {
                    node = next;
                    if let Some(piece) = self.piece[node as usize] {
                        out.push(((start + offset + 1) as u32, piece));
                    }
                }
                None => break,
            }
        }
    }
}

/// Forward-backward over one fragment; accumulates expected piece counts and
/// returns the fragment's marginal log-likelihood.
fn accumulate_expectations(
    chars: &[char],
    freq: u64,
    trie: &Trie,
    logprobs: &[f64],
    expected: &mut [f64],
) -> f64 {
    let len = chars.len();
    let mut edges: Vec<(u32, u32, u32)> = Vec::new(); // (start, end, piece)
    let mut buf: Vec<(u32, u32)> = Vec::new();
    let mut alpha = vec![f64::NEG_INFINITY; len + 1];
    alpha[0] = 0.0;
    for start in 0..len {
        if alpha[start] == f64::NEG_INFINITY {
            continue;
        }
        trie.matches_into(chars, start, &mut buf);
        for &(end, piece) in &buf {
            edges.push((start as u32, end, piece));
            let score = alpha[start] + logprobs[piece as usize];
            alpha[end as usize] = log_add(alpha[end as usize], score);
        }
    }
    let z = alpha[len];
    debug_assert!(z > f64::NEG_INFINITY, "disconnected lattice");

    let mut beta = vec![f64::NEG_INFINITY; len + 1];
    beta[len] = 0.0;
    for &(start, end, piece) in edges.iter().rev() {
        let score = logprobs[piece as usize] + beta[end as usize];
        beta[start as usize] = log_add(beta[start as usize], score);
    }
    for &(start, end, piece) in &edges {
        let gamma =
            alpha[start as usize] + logprobs[piece as usize] + beta[end as usize] - z;
        expected[piece as usize] += freq as f64 * gamma.exp();
    }
    freq as f64 * z
}

/// Best-path score over a fragment, optionally excluding one piece. Used for
/// pruning: the excluded piece's best alternative segmentation of itself.
fn viterbi_score(chars: &[char], trie: &Trie, logprobs: &[f64], exclude: Option<u32>) -> f64 {
    let len = chars.len();
    let mut best = vec![f64::NEG_INFINITY; len + 1];
    best[0] = 0.0;
    let mut buf: Vec<(u32, u32)> = Vec::new();
    for start in 0..len {
        if best[start] == f64::NEG_INFINITY {
            continue;
        }
        trie.matches_into(chars, start, &mut buf);
        for &(end, piece) in &buf {
            if exclude == Some(piece) {
                continue;
            }
            let score = best[start] + logprobs[piece as usize];
            if score > best[end as usize] {
                best[end as usize] = score;
            }
        }
    }
    best[len]
}

/// Piece usage counts along the Viterbi-best path of each fragment.
fn viterbi_counts(
    chars: &[char],
    freq: u64,
    trie: &Trie,
    logprobs: &[f64],
    counts: &mut [f64],
) {
    let len = chars.len();
    let mut best = vec![f64::NEG_INFINITY; len + 1];
    let mut back: Vec<(u32, u32)> = vec![(0, 0); len + 1]; // (start, piece)
    best[0] = 0.0;
    let mut buf: Vec<(u32, u32)> = Vec::new();
    for start in 0..len {
        if best[start] == f64::NEG_INFINITY {
            continue;
        }
        trie.matches_into(chars, start, &mut buf);
        for &(end, piece) in &buf {
            let score = best[start] + logprobs[piece as usize];
            if score > best[end as usize] {
                best[end as usize] = score;
                back[end as usize] = (start as u32, piece);
            }
        }
    }
    let mut pos = len;
    while pos > 0 {
        let (start, piece) = back[pos];
        counts[piece as usize] += freq as f64;
        pos = start as usize;
    }
}

fn renormalize(pieces: &mut [Piece]) {
    let log_z = pieces
        .iter()
        .map(|p| p.logprob)
        .fold(f64::NEG_INFINITY, log_add);
    for piece in pieces.iter_mut() {
        piece.logprob -= log_z;
    }
}

/// Digamma via the standard recurrence + asymptotic expansion.
fn digamma(mut x: f64) -> f64 {
    let mut result = 0.0;
    while x < 7.0 {
        result -= 1.0 / x;
        x += 1.0;
    }
    x -= 0.5;
    let inv2 = 1.0 / (x * x);
    let inv4 = inv2 * inv2;
    result
        + x.ln()
        + (1.0 / 24.0) * inv2
        - (7.0 / 960.0) * inv4
        + (31.0 / 8064.0) * inv4 * inv2
        - (127.0 / 30720.0) * inv4 * inv4
}

/// Train a Unigram model, also returning the per-round EM likelihood trace.
pub fn train_unigram_with_trace(
    stats: &CorpusStats,
    vocab_size: usize,
    opts: &UnigramOptions,
) -> Result<(TokenizerModel, EmTrace)> {
    let alphabet = covered_chars(stats, opts.character_coverage);
    let required = SPECIAL_TOKENS.len() + alphabet.len() + 1; // + marker
    validate_common(stats, vocab_size, required, opts.character_coverage)?;
    if opts.em_iters == 0 || opts.max_piece_length == 0 {
        return Err(crate::error::Error::Config(
            "em_iters and max_piece_length must be positive".into(),
        ));
    }
    if !(0.0..1.0).contains(&opts.shrink_factor) || opts.shrink_factor <= 0.0 {
        return Err(crate::error::Error::Config(format!(
            "shrink_factor must be in (0, 1), got {}",
            opts.shrink_factor
        )));
    }
    let target_pieces = vocab_size - SPECIAL_TOKENS.len();
    let seed_cap = opts
        .seed_size
        .unwrap_or_else(|| 1_000_000.min(10 * vocab_size));

    // Marked words, split at coverage-excluded characters and hard-split to
    // bound lattice size.
    let mut fragments: Vec<(Vec<char>, u64)> = Vec::new();
    for (word, &freq) in &stats.word_counts {
        let mut current: Vec<char> = vec![BOUNDARY_MARKER];
        for c in word.chars() {
            if alphabet.contains(&c) {
                current.push(c);
                if current.len() >= MAX_WORD_CHARS {
                    fragments.push((std::mem::take(&mut current), freq));
                }
            } else if !current.is_empty() {
                fragments.push((std::mem::take(&mut current), freq));
            }
        }
        if !current.is_empty() {
            fragments.push((current, freq));
        }
    }

    // Seed: all substrings up to max_piece_length, scored by count × length.
    let mut substring_counts: HashMap<String, u64> = HashMap::new();
    for (chars, freq) in &fragments {
        for start in 0..chars.len() {
            let top = (start + opts.max_piece_length).min(chars.len());
            let mut text = String::new();
            for (offset, &c) in chars[start..top].iter().enumerate() {
                text.push(c);
                if offset > 0 {
                    *substring_counts.entry(text.clone()).or_insert(0) += freq;
                }
            }
        }
    }

    let mut singles: BTreeSet<char> = alphabet.clone();
    singles.insert(BOUNDARY_MARKER);

    let mut candidates: Vec<(String, u64)> = substring_counts
        .into_iter()
        .filter(|(text, _)| !SPECIAL_TOKENS.contains(&text.as_str()))
        .collect();
    // score desc (count × chars), then text asc
    candidates.sort_by(|a, b| {
        let score_a = a.1 * a.0.chars().count() as u64;
        let score_b = b.1 * b.0.chars().count() as u64;
        score_b.cmp(&score_a).then_with(|| a.0.cmp(&b.0))
    });
    let multi_cap = seed_cap.saturating_sub(singles.len()).max(target_pieces.saturating_sub(singles.len()));
    candidates.truncate(multi_cap);

    let char_counts = stats.char_counts();
    let mut pieces: Vec<Piece> = Vec::with_capacity(singles.len() + candidates.len());
    for &c in &singles {
        let count = if c == BOUNDARY_MARKER {
            stats.total_words
        } else {
            char_counts.get(&c).copied().unwrap_or(1)
        };
        pieces.push(Piece {
            chars: vec![c],
            text: c.to_string(),
            logprob: (count as f64).ln(),
            protected: true,
        });
    }
    for (text, count) in candidates {
        // selection is scored by count × length; initial mass is plain
        // frequency, which EM then redistributes
        pieces.push(Piece {
            chars: text.chars().collect(),
            text,
            logprob: (count as f64).ln(),
            protected: false,
        });
    }
    renormalize(&mut pieces);

    let mut trace = EmTrace::default();
    loop {
        let mut round_lls: Vec<f64> = Vec::with_capacity(opts.em_iters);
        for _ in 0..opts.em_iters {
            let trie = Trie::build(&pieces);
            let logprobs: Vec<f64> = pieces.iter().map(|p| p.logprob).collect();
            let partials = chunked_map(&fragments, CHUNK, |chunk| {
                let mut expected = vec![0.0f64; pieces.len()];
                let mut ll = 0.0f64;
                for (chars, freq) in chunk {
                    ll += accumulate_expectations(chars, *freq, &trie, &logprobs, &mut expected);
                }
                (expected, ll)
            });
            let mut expected = vec![0.0f64; pieces.len()];
            let mut ll = 0.0f64;
            for (partial, partial_ll) in partials {
                for (acc, value) in expected.iter_mut().zip(partial) {
                    *acc += value;
                }
                ll += partial_ll;
            }
            if let Some(&prev) = round_lls.last() {
                debug_assert!(
                    ll >= prev - prev.abs() * 1e-9,
                    "EM likelihood decreased: {prev} -> {ll}"
                );
            }
            round_lls.push(ll);

            // M-step, Bayesianized as in the reference Unigram trainer:
            // digamma damping acts as an implicit Dirichlet prior that
            // crushes pieces with marginal expected counts. Pieces below the
            // threshold are dropped outright; protected alphabet pieces are
            // floored instead so every lattice stays connected. The final
            // renormalization is a uniform shift that restores sum-to-one
            // without changing any probability ratio.
            const COUNT_THRESHOLD: f64 = 0.5;
            let mut kept_total = 0.0f64;
            for (piece, &count) in pieces.iter().zip(&expected) {
                let count = if piece.protected {
                    count.max(COUNT_THRESHOLD)
                } else {
                    count
                };
                if count >= COUNT_THRESHOLD {
                    kept_total += count;
                }
            }
            let log_denominator = digamma(kept_total);
            let mut next: Vec<Piece> = Vec::with_capacity(pieces.len());
            for (piece, count) in pieces.drain(..).zip(&expected) {
                let count = if piece.protected {
                    count.max(COUNT_THRESHOLD)
                } else {
                    *count
                };
                if count < COUNT_THRESHOLD {
                    continue;
                }
                next.push(Piece {
                    logprob: digamma(count) - log_denominator,
                    ..piece
                });
            }
            pieces = next;
            renormalize(&mut pieces);
        }
        trace.rounds.push(round_lls);

        if pieces.len() <= target_pieces {
            break;
        }

        // Pruning: drop the pieces whose deletion least reduces corpus
        // likelihood, estimated as viterbi_count × (own score - best
        // alternative segmentation score).
        let keep_target = {
            let shrunk = (opts.shrink_factor * pieces.len() as f64).ceil() as usize;
            shrunk.max(target_pieces)
        };
        let trie = Trie::build(&pieces);
        let logprobs: Vec<f64> = pieces.iter().map(|p| p.logprob).collect();
        let partial_counts = chunked_map(&fragments, CHUNK, |chunk| {
            let mut counts = vec![0.0f64; pieces.len()];
            for (chars, freq) in chunk {
                viterbi_counts(chars, *freq, &trie, &logprobs, &mut counts);
            }
            counts
        });
        let mut usage = vec![0.0f64; pieces.len()];
        for partial in partial_counts {
            for (acc, value) in usage.iter_mut().zip(partial) {
                *acc += value;
            }
        }

        let protected_count = pieces.iter().filter(|p| p.protected).count();
        let mut scored: Vec<(f64, usize)> = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.protected)
            .map(|(idx, piece)| {
                let alt = viterbi_score(&piece.chars, &trie, &logprobs, Some(idx as u32));
                let loss = usage[idx] * (piece.logprob - alt);
                (loss, idx)
            })
            .collect();
        // keep the most costly-to-remove pieces; ties by text asc
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then_with(|| pieces[a.1].text.cmp(&pieces[b.1].text))
        });
        let keep_multi = keep_target.saturating_sub(protected_count);
        if keep_multi >= scored.len() {
            break; // nothing removable
        }
        let drop: BTreeSet<usize> = scored[keep_multi..].iter().map(|&(_, idx)| idx).collect();
        let mut next: Vec<Piece> = Vec::with_capacity(keep_target);
        for (idx, piece) in pieces.drain(..).enumerate() {
            if !drop.contains(&idx) {
                next.push(piece);
            }
        }
        pieces = next;
        renormalize(&mut pieces);
    }

    // id order: specials, then pieces by probability desc, text asc
    pieces.sort_by(|a, b| {
        b.logprob
            .partial_cmp(&a.logprob)
            .unwrap()
            .then_with(|| a.text.cmp(&b.text))
    });
    let mut vocab = special_vocab();
    let mut logprobs = vec![SPECIAL_LOGPROB; SPECIAL_TOKENS.len()];
    for piece in &pieces {
        vocab.push(piece.text.clone());
        logprobs.push(piece.logprob);
    }
    let model = TokenizerModel::from_parts(
        Algorithm::Unigram,
        vocab,
        logprobs,
        vec![],
        0,
        opts.normalization,
    )?;
    Ok((model, trace))
}

/// Train a Unigram model. See [`train_unigram_with_trace`] for the variant
/// exposing the EM likelihood trace.
pub fn train_unigram(
    stats: &CorpusStats,
    vocab_size: usize,
    opts: &UnigramOptions,
) -> Result<TokenizerModel> {
    train_unigram_with_trace(stats, vocab_size, opts).map(|(model, _)| model)
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

    /// Exhaustive segmentation scorer: the max total logprob over every way
    /// of splitting `word` into model pieces.
    fn brute_force_best(model: &TokenizerModel, chars: &[char]) -> f64 {
        fn recurse(model: &TokenizerModel, chars: &[char], pos: usize) -> f64 {
            if pos == chars.len() {
                return 0.0;
            }
            let mut best = f64::NEG_INFINITY;
            for end in pos + 1..=chars.len() {
                let piece: String = chars[pos..end].iter().collect();
                if let Some(id) = model.id_of(&piece) {
                    let rest = recurse(model, chars, end);
                    let score = model.logprob(id) + rest;
                    if score > best {
                        best = score;
                    }
                }
            }
            best
        }
        recurse(model, chars, 0)
    }

    #[test]
    fn probabilities_sum_to_one() {
        let stats = ingest_str("كتاب كتاب جديد قلم", &NormalizationConfig::default());
        let model = train_unigram(&stats, 24, &UnigramOptions::default()).unwrap();
        let sum: f64 = model.logprobs.iter().map(|p| p.exp()).sum();
        assert!((sum - 1.0).abs() <= 1e-3, "sum = {sum}");
    }

    #[test]
    fn repeated_bigram_word_stays_coarse() {
        // "abab" x10: the trained model must give a coarse segmentation of
        // the whole word a better score than four singles; verified against
        // the exhaustive scorer.
        let stats = stats_from(&[("abab", 10)]);
        let model = train_unigram(&stats, 4 + 8, &UnigramOptions::default()).unwrap();
        let chars: Vec<char> = "▁abab".chars().collect();
        let best = brute_force_best(&model, &chars);
        let singles: f64 = chars
            .iter()
            .map(|c| model.logprob(model.id_of(&c.to_string()).unwrap()))
            .sum();
        assert!(
            best > singles + 1e-9,
            "all-singles ({singles}) should not be optimal ({best})"
        );
        // the decoded segmentation itself is coarse, never five singles
        let seg = crate::codec::segment_word(&model, "abab");
        assert!(
            seg.len() <= 2,
            "expected a coarse split, got {:?}",
            seg.iter().map(|p| p.text.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn degenerate_single_word_corpus() {
        let stats = stats_from(&[("a", 5)]);
        let model = train_unigram(&stats, 4 + 3, &UnigramOptions::default()).unwrap();
        assert!(model.id_of("▁a").is_some());
        let sum: f64 = model.logprobs.iter().map(|p| p.exp()).sum();
        assert!((sum - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn distinct_single_chars_get_uniform_probs() {
        let stats = stats_from(&[("a", 1), ("b", 1), ("c", 1)]);
        // room for exactly the alphabet: ▁, a, b, c
        let model = train_unigram(&stats, 4 + 4, &UnigramOptions::default()).unwrap();
        let pa = model.logprob(model.id_of("a").unwrap());
        let pb = model.logprob(model.id_of("b").unwrap());
        let pc = model.logprob(model.id_of("c").unwrap());
        assert!((pa - pb).abs() < 1e-12);
        assert!((pb - pc).abs() < 1e-12);
    }

    #[test]
    fn likelihood_never_decreases_within_a_round() {
        let stats = ingest_str(
            "kitab kitab kataba maktab kitab kutub kataba",
            &NormalizationConfig::default(),
        );
        let opts = UnigramOptions {
            em_iters: 4,
            ..UnigramOptions::default()
        };
        let (_, trace) = train_unigram_with_trace(&stats, 20, &opts).unwrap();
        assert!(!trace.rounds.is_empty());
        for round in &trace.rounds {
            for pair in round.windows(2) {
                assert!(
                    pair[1] >= pair[0] - pair[0].abs() * 1e-9,
                    "LL decreased within a round: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
        }
    }

    #[test]
    fn alphabet_survives_aggressive_pruning() {
        let stats = ingest_str(
            "understanding understanding understand standing stand under",
            &NormalizationConfig::default(),
        );
        let alphabet_len = stats.char_counts().len();
        let vocab_size = 4 + alphabet_len + 1 + 2; // room for only two multis
        let model = train_unigram(&stats, vocab_size, &UnigramOptions::default()).unwrap();
        assert!(model.vocab_size() <= vocab_size);
        for c in stats.char_counts().keys() {
            assert!(model.id_of(&c.to_string()).is_some(), "lost {c:?}");
        }
        assert!(model.id_of("▁").is_some());
    }

    #[test]
    fn empty_corpus_and_tiny_vocab_are_errors() {
        assert!(train_unigram(&CorpusStats::default(), 100, &UnigramOptions::default()).is_err());
        let stats = stats_from(&[("abcdef", 1)]);
        assert!(train_unigram(&stats, 6, &UnigramOptions::default()).is_err());
    }

    #[test]
    fn deterministic_across_runs() {
        let stats = ingest_str(
            "قرأت كتابا جديدا في المكتبة قرأت كتبا",
            &NormalizationConfig::default(),
        );
        let a = train_unigram(&stats, 32, &UnigramOptions::default()).unwrap();
        let b = train_unigram(&stats, 32, &UnigramOptions::default()).unwrap();
        assert_eq!(a.to_json_string(), b.to_json_string());
    }
}
