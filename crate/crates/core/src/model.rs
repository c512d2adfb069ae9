//! The trained tokenizer model and its on-disk JSON format.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalizer::NormalizationConfig;

/// Word-boundary prefix used on word-initial pieces (Unigram, BPE).
pub const BOUNDARY_MARKER: char = '\u{2581}';

/// Continuation prefix used on non-initial pieces (WordPiece).
pub const CONTINUATION_PREFIX: &str = "##";

/// Special tokens occupying ids 0-3 in every trained model.
pub const SPECIAL_TOKENS: [&str; 4] = ["<unk>", "<s>", "</s>", "<pad>"];

/// Log-probability sentinel assigned to special tokens in Unigram models.
/// `exp` of it is exactly 0.0, so specials do not disturb the probability
/// mass of real pieces.
pub const SPECIAL_LOGPROB: f64 = -1e30;

/// What the unknown token decodes to.
pub const UNK_REPLACEMENT: &str = "\u{2047}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Unigram,
    Bpe,
    WordPiece,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Unigram, Algorithm::Bpe, Algorithm::WordPiece];

    /// Short name used in CLI flags and report rows.
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Unigram => "unigram",
            Algorithm::Bpe => "bpe",
            Algorithm::WordPiece => "wordpiece",
        }
    }

    /// How this algorithm marks word structure.
    pub fn marker_scheme(self) -> MarkerScheme {
        match self {
            Algorithm::Unigram | Algorithm::Bpe => MarkerScheme::WordInitial,
            Algorithm::WordPiece => MarkerScheme::Continuation,
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unigram" => Ok(Algorithm::Unigram),
            "bpe" => Ok(Algorithm::Bpe),
            "wordpiece" => Ok(Algorithm::WordPiece),
            other => Err(Error::Config(format!(
                "unknown algorithm {other:?} (expected unigram, bpe or wordpiece)"
            ))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Marking convention for word structure inside piece strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkerScheme {
    /// U+2581 prefixed to word-initial pieces; words are encoded as
    /// `▁` + word.
    WordInitial,
    /// `##` prefixed to non-initial pieces; word-initial pieces are bare.
    Continuation,
}

/// A trained subword tokenizer: algorithm tag, vocabulary with dense 0-based
/// ids, per-algorithm parameters, and the normalization config baked in at
/// training time.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizerModel {
    pub algorithm: Algorithm,
    /// Token strings in id order.
    pub vocab: Vec<String>,
    /// Natural-log probabilities aligned to `vocab` (Unigram only, else
    /// empty). Specials carry [`SPECIAL_LOGPROB`].
    pub logprobs: Vec<f64>,
    /// Ordered merge list (BPE only, else empty).
    pub merges: Vec<(String, String)>,
    pub unk_id: u32,
    pub normalization: NormalizationConfig,
    token_to_id: HashMap<String, u32>,
    /// Merge pair -> rank, for BPE replay.
    merge_ranks: HashMap<(String, String), u32>,
    /// Longest vocab entry in chars; bounds segmentation lookahead.
    max_piece_chars: usize,
    /// Cached [`TokenizerModel::unk_penalty`] (Unigram only).
    unk_penalty: f64,
}

impl TokenizerModel {
    /// Build a model from parts, validating the vocabulary invariants.
    /// Trainers and tests construct models through this.
    pub fn from_parts(
        algorithm: Algorithm,
        vocab: Vec<String>,
        logprobs: Vec<f64>,
        merges: Vec<(String, String)>,
        unk_id: u32,
        normalization: NormalizationConfig,
    ) -> Result<Self> {
        if vocab.is_empty() {
            return Err(Error::Format("model vocabulary is empty".into()));
        }
        if (unk_id as usize) >= vocab.len() {
            return Err(Error::Format(format!(
                "unk_id {unk_id} out of range for vocab of {}",
                vocab.len()
            )));
        }
        let mut token_to_id = HashMap::with_capacity(vocab.len());
        for (id, token) in vocab.iter().enumerate() {
            if token.is_empty() {
                return Err(Error::Format(format!("empty token string at id {id}")));
            }
            if token_to_id.insert(token.clone(), id as u32).is_some() {
                return Err(Error::Format(format!("duplicate token {token:?}")));
            }
        }
        match algorithm {
            Algorithm::Unigram => {
                if logprobs.len() != vocab.len() {
                    return Err(Error::Format(format!(
                        "logprobs length {} does not match vocab length {}",
                        logprobs.len(),
                        vocab.len()
                    )));
                }
                if logprobs.iter().any(|p| p.is_nan() || *p > 0.0) {
                    return Err(Error::Format(
                        "unigram logprobs must be finite-or-sentinel and <= 0".into(),
                    ));
                }
            }
            Algorithm::Bpe | Algorithm::WordPiece => {
                if !logprobs.is_empty() {
                    return Err(Error::Format(
                        "logprobs are only valid for unigram models".into(),
                    ));
                }
            }
        }
        if algorithm != Algorithm::Bpe && !merges.is_empty() {
            return Err(Error::Format("merges are only valid for bpe models".into()));
        }
        let max_piece_chars = vocab
            .iter()
            .map(|t| t.chars().count())
            .max()
            .unwrap_or(1);
        let min_real = vocab
            .iter()
            .zip(&logprobs)
            .filter(|(token, _)| !SPECIAL_TOKENS.contains(&token.as_str()))
            .map(|(_, &p)| p)
            .fold(f64::INFINITY, f64::min);
        let unk_penalty = if min_real.is_finite() {
            min_real - 10.0
        } else {
            SPECIAL_LOGPROB
        };
        let merge_ranks = merges
            .iter()
            .enumerate()
            .map(|(rank, (l, r))| ((l.clone(), r.clone()), rank as u32))
            .collect();
        Ok(Self {
            algorithm,
            vocab,
            logprobs,
            merges,
            unk_id,
            normalization,
            token_to_id,
            merge_ranks,
            max_piece_chars,
            unk_penalty,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.token_to_id.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    pub fn is_special(&self, token: &str) -> bool {
        SPECIAL_TOKENS.contains(&token)
    }

    /// Log-probability of a piece by id (Unigram).
    pub fn logprob(&self, id: u32) -> f64 {
        self.logprobs[id as usize]
    }

    /// Smallest log-probability among real (non-special) pieces.
    pub fn min_piece_logprob(&self) -> f64 {
        self.vocab
            .iter()
            .zip(&self.logprobs)
            .filter(|(token, _)| !self.is_special(token))
            .map(|(_, &p)| p)
            .fold(f64::INFINITY, f64::min)
    }

    /// Score assigned to single-character unknown gaps during Viterbi:
    /// strictly worse than any real piece, so UNK is a last resort.
    pub fn unk_penalty(&self) -> f64 {
        self.unk_penalty
    }

    /// Longest vocab entry, in characters.
    pub fn max_piece_chars(&self) -> usize {
        self.max_piece_chars
    }

    /// Rank of a merge pair in the recorded merge list (BPE).
    pub(crate) fn merge_rank(&self, left: &str, right: &str) -> Option<u32> {
        self.merge_ranks
            .get(&(left.to_string(), right.to_string()))
            .copied()
    }

    /// The word-content of a piece, markers stripped.
    pub fn piece_content<'a>(&self, token: &'a str) -> &'a str {
        match self.algorithm.marker_scheme() {
            MarkerScheme::WordInitial => {
                token.strip_prefix(BOUNDARY_MARKER).unwrap_or(token)
            }
            MarkerScheme::Continuation => {
                token.strip_prefix(CONTINUATION_PREFIX).unwrap_or(token)
            }
        }
    }

    /// Whether a piece covers exactly one character of word content. These
    /// pieces (plus specials) are the irreducible alphabet and are never
    /// pruned.
    pub fn is_single_char_piece(&self, token: &str) -> bool {
        if self.is_special(token) {
            return false;
        }
        match self.algorithm.marker_scheme() {
            // The bare marker and unmarked single characters are alphabet
            // pieces; "▁x" is a composite of "▁" and "x".
            MarkerScheme::WordInitial => token.chars().count() == 1,
            MarkerScheme::Continuation => self.piece_content(token).chars().count() == 1,
        }
    }

    /// Serialize to the documented JSON schema (pretty-printed, trailing
    /// newline). Output is byte-stable for a given model.
    pub fn to_json_string(&self) -> String {
        let file = ModelFile::from(self);
        let mut text = serde_json::to_string_pretty(&file).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        file.into_model()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

/// On-disk representation. Field names are the schema documented in
/// `docs/formats.md`.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    algorithm: Algorithm,
    marker_scheme: MarkerScheme,
    /// "▁" or "##" depending on the scheme.
    marker: String,
    unk_id: u32,
    normalization: NormalizationConfig,
    vocab: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    logprobs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    merges: Vec<(String, String)>,
}

impl From<&TokenizerModel> for ModelFile {
    fn from(model: &TokenizerModel) -> Self {
        let scheme = model.algorithm.marker_scheme();
        let marker = match scheme {
            MarkerScheme::WordInitial => BOUNDARY_MARKER.to_string(),
            MarkerScheme::Continuation => CONTINUATION_PREFIX.to_string(),
        };
        ModelFile {
            algorithm: model.algorithm,
            marker_scheme: scheme,
            marker,
            unk_id: model.unk_id,
            normalization: model.normalization,
            vocab: model.vocab.clone(),
            logprobs: model.logprobs.clone(),
            merges: model.merges.clone(),
        }
    }
}

impl ModelFile {
    fn into_model(self) -> Result<TokenizerModel> {
        if self.marker_scheme != self.algorithm.marker_scheme() {
            return Err(Error::Format(format!(
                "marker scheme {:?} does not match algorithm {}",
                self.marker_scheme, self.algorithm
            )));
        }
        TokenizerModel::from_parts(
            self.algorithm,
            self.vocab,
            self.logprobs,
            self.merges,
            self.unk_id,
            self.normalization,
        )
    }
}

/// Vocabulary layout shared by the trainers: specials first, then the sorted
/// alphabet, then composed pieces.
pub(crate) fn special_vocab() -> Vec<String> {
    SPECIAL_TOKENS.iter().map(|s| s.to_string()).collect()
}
