//! Encoding text to token ids and decoding back.
//!
//! Per-word segmentation depends on the algorithm: Unigram uses Viterbi over
//! the segmentation lattice, BPE replays the recorded merges, WordPiece runs
//! greedy longest-match-first. Models are immutable, so everything here is
//! pure and safe for concurrent use.

use crate::error::{Error, Result};
use crate::model::{
    Algorithm, MarkerScheme, TokenizerModel, BOUNDARY_MARKER, CONTINUATION_PREFIX, UNK_REPLACEMENT,
};
use crate::normalizer::Normalizer;

/// One piece of a segmented word: its surface text (markers included for
/// real pieces, the raw character for unknown gaps) and its vocab id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegPiece {
    pub text: String,
    pub id: u32,
}

/// A word's segmentation: pieces in order whose concatenation (markers
/// stripped) restores the word.
pub type Segmentation = Vec<SegPiece>;

/// Maximum-likelihood segmentation of `text` under a Unigram model: the
/// split maximizing the summed piece log-probabilities. Characters no vocab
/// piece covers become single-character UNK pieces scored at
/// [`TokenizerModel::unk_penalty`]. Ties break toward fewer pieces, then
/// lexicographically smaller pieces.
pub fn viterbi_segment(model: &TokenizerModel, text: &str) -> Segmentation {
    debug_assert_eq!(model.algorithm, Algorithm::Unigram);
    let chars: Vec<char> = text.chars().collect();
    let len = chars.len();
    if len == 0 {
        return Vec::new();
    }

    #[derive(Clone)]
    struct Node {
        score: f64,
        pieces: u32,
        back: usize,
        piece: Option<u32>, // None = UNK gap
        text: String,
    }
    let mut dp: Vec<Option<Node>> = vec![None; len + 1];
    dp[0] = Some(Node {
        score: 0.0,
        pieces: 0,
        back: 0,
        piece: None,
        text: String::new(),
    });

    let max_len = model.max_piece_chars().min(len);
    let unk_penalty = model.unk_penalty();
    let mut buf = String::new();
    for start in 0..len {
        let Some(base) = dp[start].clone() else { continue };
        buf.clear();
        let mut matched_single = false;
        for end in start + 1..=(start + max_len).min(len) {
            buf.push(chars[end - 1]);
            let Some(id) = model.id_of(&buf) else { continue };
            if end == start + 1 {
                matched_single = true;
            }
            consider(
                &mut dp[end],
                Node {
                    score: base.score + model.logprob(id),
                    pieces: base.pieces + 1,
                    back: start,
                    piece: Some(id),
                    text: buf.clone(),
                },
            );
        }
        if !matched_single {
            consider(
                &mut dp[start + 1],
                Node {
                    score: base.score + unk_penalty,
                    pieces: base.pieces + 1,
                    back: start,
                    piece: None,
                    text: chars[start].to_string(),
                },
            );
        }
    }

    fn consider(slot: &mut Option<Node>, candidate: Node) {
        let replace = match slot {
            None => true,
            Some(current) => {
                candidate.score > current.score
                    || (candidate.score == current.score
                        && (candidate.pieces < current.pieces
                            || (candidate.pieces == current.pieces
                                && candidate.text < current.text)))
            }
        };
        if replace {
            *slot = Some(candidate);
        }
    }

    let mut pieces: Vec<SegPiece> = Vec::new();
    let mut pos = len;
    while pos > 0 {
        let node = dp[pos].clone().expect("every position is reachable");
        pieces.push(SegPiece {
            text: node.text.clone(),
            id: node.piece.unwrap_or(model.unk_id),
        });
        pos = node.back;
    }
    pieces.reverse();
    pieces
}

/// Segment one normalized, whitespace-free word, applying the model's marker
/// scheme.
pub fn segment_word(model: &TokenizerModel, word: &str) -> Segmentation {
    debug_assert!(!word.is_empty() && !word.chars().any(char::is_whitespace));
    match model.algorithm {
        Algorithm::Unigram => {
            let marked = format!("{BOUNDARY_MARKER}{word}");
            viterbi_segment(model, &marked)
        }
        Algorithm::Bpe => bpe_segment(model, word),
        Algorithm::WordPiece => wordpiece_segment(model, word),
    }
}

/// Replay the merge list over the marked character sequence. Selecting the
/// earliest-recorded pair present and fusing its occurrences leftmost-first
/// reproduces a full sequential replay of the merge list.
fn bpe_segment(model: &TokenizerModel, word: &str) -> Segmentation {
    let mut pieces: Vec<String> = Vec::with_capacity(word.chars().count() + 1);
    pieces.push(BOUNDARY_MARKER.to_string());
    pieces.extend(word.chars().map(|c| c.to_string()));

    loop {
        let mut best: Option<u32> = None;
        for window in pieces.windows(2) {
            if let Some(rank) = model.merge_rank(&window[0], &window[1]) {
                if best.is_none_or(|r| rank < r) {
                    best = Some(rank);
                }
            }
        }
        let Some(rank) = best else { break };
        let (left, right) = &model.merges[rank as usize];
        let mut out: Vec<String> = Vec::with_capacity(pieces.len());
        let mut i = 0;
        while i < pieces.len() {
            if i + 1 < pieces.len() && pieces[i] == *left && pieces[i + 1] == *right {
                out.push(format!("{left}{right}"));
                i += 2;
            } else {
                out.push(std::mem::take(&mut pieces[i]));
                i += 1;
            }
        }
        pieces = out;
    }

    pieces
        .into_iter()
        .map(|text| {
            let id = model.id_of(&text).unwrap_or(model.unk_id);
            SegPiece { text, id }
        })
        .collect()
}

/// Greedy longest-match-first from the word start; non-initial matches carry
/// the `##` prefix. Any position with no match turns the whole word into a
/// single UNK.
fn wordpiece_segment(model: &TokenizerModel, word: &str) -> Segmentation {
    let chars: Vec<char> = word.chars().collect();
    let len = chars.len();
    let max_len = model.max_piece_chars();
    let mut pieces: Vec<SegPiece> = Vec::new();
    let mut pos = 0;
    while pos < len {
        let mut matched = false;
        let limit = (pos + max_len).min(len);
        for end in (pos + 1..=limit).rev() {
            let mut candidate = if pos == 0 {
                String::new()
            } else {
                CONTINUATION_PREFIX.to_string()
            };
            candidate.extend(&chars[pos..end]);
            if let Some(id) = model.id_of(&candidate) {
                pieces.push(SegPiece {
                    text: candidate,
                    id,
                });
                pos = end;
                matched = true;
                break;
            }
        }
        if !matched {
            return vec![SegPiece {
                text: word.to_string(),
                id: model.unk_id,
            }];
        }
    }
    pieces
}

/// Ids for one normalized word.
pub fn encode_word(model: &TokenizerModel, word: &str) -> Vec<u32> {
    segment_word(model, word).into_iter().map(|p| p.id).collect()
}

/// Encode text: normalize with the model's baked-in config, pre-tokenize,
/// segment each word, and look up ids.
pub fn encode(model: &TokenizerModel, text: &str) -> Vec<u32> {
    encode_opt(model, text, true)
}

/// [`encode`] with an opt-out for pipelines whose input is already
/// normalized.
pub fn encode_opt(model: &TokenizerModel, text: &str, apply_normalization: bool) -> Vec<u32> {
    let mut ids = Vec::new();
    let owned;
    let text = if apply_normalization {
        owned = Normalizer::new(model.normalization).normalize(text);
        owned.as_str()
    } else {
        text
    };
    for word in crate::corpus::pre_tokenize(text) {
        ids.extend(encode_word(model, word));
    }
    ids
}

/// Invert [`encode`]: boundary markers become spaces (Unigram/BPE) and `##`
/// continuations join their word (WordPiece). UNK decodes to `⁇`. Ids past
/// the vocabulary are an error naming the offending position.
pub fn decode(model: &TokenizerModel, ids: &[u32]) -> Result<String> {
    let mut out = String::new();
    match model.algorithm.marker_scheme() {
        MarkerScheme::WordInitial => {
            for (position, &id) in ids.iter().enumerate() {
                let token = check_id(model, position, id)?;
                if id == model.unk_id {
                    out.push_str(UNK_REPLACEMENT);
                } else {
                    out.push_str(token);
                }
            }
            let joined = out.replace(BOUNDARY_MARKER, " ");
            Ok(joined.strip_prefix(' ').unwrap_or(&joined).to_string())
        }
        MarkerScheme::Continuation => {
            for (position, &id) in ids.iter().enumerate() {
                let token = check_id(model, position, id)?;
                if id == model.unk_id {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    out.push_str(UNK_REPLACEMENT);
                } else if let Some(content) = token.strip_prefix(CONTINUATION_PREFIX) {
                    out.push_str(content);
                } else {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    out.push_str(token);
                }
            }
            Ok(out)
        }
    }
}

fn check_id(model: &TokenizerModel, position: usize, id: u32) -> Result<&str> {
    model.token(id).ok_or(Error::TokenIdOutOfRange {
        position,
        id,
        vocab_size: model.vocab_size(),
    })
}
