//! Frequency-based vocabulary pruning to cumulative-coverage targets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::codec::encode_word;
use crate::corpus::CorpusStats;
use crate::error::{Error, Result};
use crate::model::{Algorithm, TokenizerModel, SPECIAL_LOGPROB};
use crate::util::log_add;

/// Occurrence floor: tokens covering less than this fraction of all token
/// occurrences are dropped regardless of the coverage prefix.
pub const MIN_TOKEN_SHARE: f64 = 0.0001;

/// Per-token occurrence counts from encoding a reference corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    /// Count per token id (aligned to the model's vocab).
    pub counts: Vec<u64>,
    /// Sum of all counts.
    pub total: u64,
}

/// Count token occurrences over a reference corpus: each distinct word is
/// encoded once and its piece occurrences weighted by word frequency.
pub fn token_frequencies(model: &TokenizerModel, stats: &CorpusStats) -> TokenUsage {
    let mut counts = vec![0u64; model.vocab_size()];
    let mut total = 0u64;
    for (word, &freq) in &stats.word_counts {
        for id in encode_word(model, word) {
            counts[id as usize] += freq;
            total += freq;
        }
    }
    TokenUsage { counts, total }
}

/// Prune a model to a cumulative-coverage target.
///
/// Non-special, non-single-character tokens are ranked by count descending;
/// the smallest prefix whose cumulative count reaches `coverage × total`
/// survives, intersected with the [`MIN_TOKEN_SHARE`] occurrence floor.
/// Single-character tokens and specials are never pruned, so the pruned model
/// still covers the alphabet. Unigram probabilities are renormalized over the
/// survivors; BPE merges are filtered transitively and tokens no surviving
/// merge can produce are dropped entirely. Ids are recompacted densely in the
/// original order.
pub fn prune_vocab(
    model: &TokenizerModel,
    usage: &TokenUsage,
    coverage: f64,
) -> Result<TokenizerModel> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::Config(format!(
            "coverage must be in (0, 1], got {coverage}"
        )));
    }
    if usage.counts.len() != model.vocab_size() {
        return Err(Error::Config(format!(
            "usage table covers {} ids but the model has {}",
            usage.counts.len(),
            model.vocab_size()
        )));
    }

    // rank prunable tokens: count desc, token asc
    let mut prunable: Vec<(u32, u64)> = model
        .vocab
        .iter()
        .enumerate()
        .filter(|(_, token)| !model.is_special(token) && !model.is_single_char_piece(token))
        .map(|(id, _)| (id as u32, usage.counts[id]))
        .collect();
    prunable.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| model.token(a.0).cmp(&model.token(b.0)))
    });

    // Coverage targets the mass of the ranked (prunable) tokens; alphabet
    // pieces and specials are outside the ranking and survive regardless.
    let prunable_total: u64 = prunable.iter().map(|&(_, count)| count).sum();
    let target = coverage * prunable_total as f64;
    let mut survivors: HashSet<u32> = HashSet::new();
    let mut cumulative = 0u64;
    for &(id, count) in &prunable {
        if cumulative as f64 >= target {
            break;
        }
        // the floor applies regardless of prefix membership
        if (count as u128) * 10_000 >= usage.total as u128 {
            survivors.insert(id);
        }
        cumulative += count;
    }

    let keep = |id: u32, token: &str| -> bool {
        model.is_special(token) || model.is_single_char_piece(token) || survivors.contains(&id)
    };

    match model.algorithm {
        Algorithm::Bpe => {
            // replay merges; a merge survives when both operands are
            // reachable and its product survived the coverage cut
            let mut available: HashSet<&str> = model
                .vocab
                .iter()
                .enumerate()
                .filter(|(id, token)| {
                    keep(*id as u32, token) && model.is_single_char_piece(token)
                })
                .map(|(_, token)| token.as_str())
                .collect();
            let mut kept_merges: Vec<(String, String)> = Vec::new();
            let mut reachable: HashSet<String> = HashSet::new();
            for (left, right) in &model.merges {
                let product = format!("{left}{right}");
                let product_id = match model.id_of(&product) {
                    Some(id) => id,
                    None => continue,
                };
                if available.contains(left.as_str())
                    && available.contains(right.as_str())
                    && keep(product_id, &product)
                {
                    kept_merges.push((left.clone(), right.clone()));
                    reachable.insert(product.clone());
                    available.insert(model.token(product_id).unwrap());
                }
            }
            let vocab: Vec<String> = model
                .vocab
                .iter()
                .enumerate()
                .filter(|(id, token)| {
                    let id = *id as u32;
                    model.is_special(token)
                        || model.is_single_char_piece(token)
                        || (keep(id, token) && reachable.contains(token.as_str()))
                })
                .map(|(_, token)| token.clone())
                .collect();
            TokenizerModel::from_parts(
                Algorithm::Bpe,
                vocab,
                vec![],
                kept_merges,
                model.unk_id,
                model.normalization,
            )
        }
        Algorithm::Unigram => {
            let mut vocab = Vec::new();
            let mut logprobs = Vec::new();
            for (id, token) in model.vocab.iter().enumerate() {
                if keep(id as u32, token) {
                    vocab.push(token.clone());
                    logprobs.push(model.logprobs[id]);
                }
            }
            // renormalize over surviving real pieces; specials keep the
            // sentinel
            let log_z = vocab
                .iter()
                .zip(&logprobs)
                .filter(|(token, _)| !model.is_special(token))
                .map(|(_, &p)| p)
                .fold(f64::NEG_INFINITY, log_add);
            for (token, logprob) in vocab.iter().zip(logprobs.iter_mut()) {
                if model.is_special(token) {
                    *logprob = SPECIAL_LOGPROB;
                } else {
                    *logprob -= log_z;
                }
            }
            TokenizerModel::from_parts(
                Algorithm::Unigram,
                vocab,
                logprobs,
                vec![],
                model.unk_id,
                model.normalization,
            )
        }
        Algorithm::WordPiece => {
            let vocab: Vec<String> = model
                .vocab
                .iter()
                .enumerate()
                .filter(|(id, token)| keep(*id as u32, token))
                .map(|(_, token)| token.clone())
                .collect();
            TokenizerModel::from_parts(
                Algorithm::WordPiece,
                vocab,
                vec![],
                vec![],
                model.unk_id,
                model.normalization,
            )
        }
    }
}
