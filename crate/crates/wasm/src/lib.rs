//! Browser playground bindings. Three interactive operations back the static
//! page in `www/`: normalization with live rule inspection, in-browser
//! tokenizer training on pasted text, and tokenization with piece-level
//! output and corpus metrics.
//!
//! Build with `wasm-pack build crates/wasm --target web --out-dir ../../www/pkg`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use aratok::codec::segment_word;
use aratok::corpus::{ingest_str, pre_tokenize};
use aratok::metrics::evaluate;
use aratok::model::{Algorithm, TokenizerModel};
use aratok::normalizer::{
    build_rule_table, AlifMode, DiacriticsMode, NormalizationConfig, Normalizer,
};
use aratok::trainer::{
    train_bpe, train_unigram, train_wordpiece, BpeOptions, UnigramOptions, WordPieceOptions,
};

fn config_from_flags(
    preserve_alif4: bool,
    keep_diacritics: bool,
    map_numerals: bool,
    map_punctuation: bool,
    remove_tatweel: bool,
    apply_nfkc: bool,
) -> NormalizationConfig {
    NormalizationConfig {
        alif_mode: if preserve_alif4 {
            AlifMode::Preserve4
        } else {
            AlifMode::Unify
        },
        diacritics: if keep_diacritics {
            DiacriticsMode::Keep
        } else {
            DiacriticsMode::Drop
        },
        map_numerals,
        map_punctuation,
        remove_tatweel,
        apply_nfkc,
    }
}

/// Normalize text under the given rule-family switches.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn normalize_text(
    text: &str,
    preserve_alif4: bool,
    keep_diacritics: bool,
    map_numerals: bool,
    map_punctuation: bool,
    remove_tatweel: bool,
    apply_nfkc: bool,
) -> String {
    let config = config_from_flags(
        preserve_alif4,
        keep_diacritics,
        map_numerals,
        map_punctuation,
        remove_tatweel,
        apply_nfkc,
    );
    Normalizer::new(config).normalize(text)
}

#[derive(Serialize)]
struct RuleRow {
    source: String,
    codepoint: String,
    replacement: String,
}

/// The active replacement table as JSON, for display next to the output.
#[wasm_bindgen]
pub fn rule_table_json(
    preserve_alif4: bool,
    keep_diacritics: bool,
    map_numerals: bool,
    map_punctuation: bool,
    remove_tatweel: bool,
) -> String {
    let config = config_from_flags(
        preserve_alif4,
        keep_diacritics,
        map_numerals,
        map_punctuation,
        remove_tatweel,
        true,
    );
    let rows: Vec<RuleRow> = build_rule_table(&config)
        .rules()
        .iter()
        .map(|(source, replacement)| RuleRow {
            source: source.to_string(),
            codepoint: format!("U+{:04X}", *source as u32),
            replacement: replacement.clone(),
        })
        .collect();
    serde_json::to_string(&rows).unwrap()
}

#[derive(Serialize)]
struct TrainSummary {
    algorithm: String,
    vocab_size: usize,
    distinct_words: usize,
    total_words: u64,
    sample_pieces: Vec<String>,
}

#[derive(Serialize)]
struct PieceOut {
    text: String,
    id: u32,
    unk: bool,
}

#[derive(Serialize)]
struct TokenizeOut {
    pieces: Vec<Vec<PieceOut>>,
    fertility: f64,
    compression_ratio: f64,
    oov_rate: f64,
    total_words: u64,
    total_tokens: u64,
}

fn train_model(
    corpus: &str,
    algorithm: &str,
    vocab_size: usize,
    config: NormalizationConfig,
) -> Result<TokenizerModel, aratok::Error> {
    let algorithm: Algorithm = algorithm.parse()?;
    let stats = ingest_str(corpus, &config);
    match algorithm {
        Algorithm::Unigram => train_unigram(
            &stats,
            vocab_size,
            &UnigramOptions {
                normalization: config,
                ..UnigramOptions::default()
            },
        ),
        Algorithm::Bpe => train_bpe(
            &stats,
            vocab_size,
            &BpeOptions {
                normalization: config,
                ..BpeOptions::default()
            },
        ),
        Algorithm::WordPiece => train_wordpiece(
            &stats,
            vocab_size,
            &WordPieceOptions {
                // pasted corpora are small; let rare pairs merge
                min_pair_freq: 2,
                normalization: config,
                ..WordPieceOptions::default()
            },
        ),
    }
}

fn train_summary(model: &TokenizerModel, corpus: &str) -> TrainSummary {
    let stats = ingest_str(corpus, &model.normalization);
    // longest non-special pieces make the most interesting sample
    let mut pieces: Vec<&String> = model
        .vocab
        .iter()
        .filter(|t| !model.is_special(t))
        .collect();
    pieces.sort_by_key(|t| std::cmp::Reverse(t.chars().count()));
    TrainSummary {
        algorithm: model.algorithm.name().to_string(),
        vocab_size: model.vocab_size(),
        distinct_words: stats.distinct_words(),
        total_words: stats.total_words,
        sample_pieces: pieces.iter().take(30).map(|t| t.to_string()).collect(),
    }
}

fn tokenize_out(model: &TokenizerModel, text: &str) -> Result<TokenizeOut, aratok::Error> {
    let normalized = Normalizer::new(model.normalization).normalize(text);
    let mut pieces: Vec<Vec<PieceOut>> = Vec::new();
    for word in pre_tokenize(&normalized) {
        pieces.push(
            segment_word(model, word)
                .into_iter()
                .map(|p| PieceOut {
                    unk: p.id == model.unk_id,
                    text: p.text,
                    id: p.id,
                })
                .collect(),
        );
    }
    let stats = ingest_str(text, &model.normalization);
    let report = evaluate(model, &stats)?;
    Ok(TokenizeOut {
        pieces,
        fertility: report.fertility,
        compression_ratio: report.compression_ratio,
        oov_rate: report.oov_rate,
        total_words: report.total_words,
        total_tokens: report.total_tokens,
    })
}

/// A training/tokenization session holding the current model.
#[wasm_bindgen]
pub struct Playground {
    model: Option<TokenizerModel>,
}

impl Default for Playground {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl Playground {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Playground {
        Playground { model: None }
    }

    pub fn has_model(&self) -> bool {
        self.model.is_some()
    }

    /// Train a tokenizer on the pasted corpus; returns a JSON summary.
    #[allow(clippy::too_many_arguments)]
    pub fn train(
        &mut self,
        corpus: &str,
        algorithm: &str,
        vocab_size: usize,
        preserve_alif4: bool,
        keep_diacritics: bool,
        map_numerals: bool,
        map_punctuation: bool,
        remove_tatweel: bool,
        apply_nfkc: bool,
    ) -> Result<String, String> {
        let config = config_from_flags(
            preserve_alif4,
            keep_diacritics,
            map_numerals,
            map_punctuation,
            remove_tatweel,
            apply_nfkc,
        );
        let model = train_model(corpus, algorithm, vocab_size, config)
            .map_err(|e| e.to_string())?;
        let summary = train_summary(&model, corpus);
        self.model = Some(model);
        Ok(serde_json::to_string(&summary).unwrap())
    }

    /// Tokenize text with the trained model; returns pieces per word plus
    /// fertility / compression / OOV over the text as JSON.
    pub fn tokenize(&self, text: &str) -> Result<String, String> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| "train a model first".to_string())?;
        if text.split_whitespace().next().is_none() {
            return Err("enter some text to tokenize".to_string());
        }
        let out = tokenize_out(model, text).map_err(|e| e.to_string())?;
        Ok(serde_json::to_string(&out).unwrap())
    }

    /// The trained model as its JSON document, for download.
    pub fn export_model(&self) -> Result<String, String> {
        let model = self
            .model
            .as_ref()
            .ok_or_else(|| "train a model first".to_string())?;
        Ok(model.to_json_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORPUS: &str = "كتاب جديد في المكتبة\nقرأت كتابا عن المدرسة\nالكتاب في البيت\n";

    #[test]
    fn normalize_matches_core_behavior() {
        let got = normalize_text("أَحمد ١٢٣؟", false, false, true, true, true, true);
        assert_eq!(got, "احمد 123?");
        let kept = normalize_text("أَحمد", true, true, true, true, true, true);
        assert_eq!(kept, "أَحمد");
    }

    #[test]
    fn rule_table_json_lists_active_rules() {
        let rows: Vec<serde_json::Value> =
            serde_json::from_str(&rule_table_json(false, false, true, true, true)).unwrap();
        assert!(rows.iter().any(|r| r["codepoint"] == "U+0623"));
        let preserved: Vec<serde_json::Value> =
            serde_json::from_str(&rule_table_json(true, false, true, true, true)).unwrap();
        assert!(preserved.iter().all(|r| r["codepoint"] != "U+0623"));
    }

    #[test]
    fn train_and_tokenize_round_trip() {
        let mut playground = Playground::new();
        let summary = playground
            .train(CORPUS, "unigram", 60, false, false, true, true, true, true)
            .unwrap();
        let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
        assert_eq!(summary["algorithm"], "unigram");
        assert!(summary["vocab_size"].as_u64().unwrap() <= 60);

        let out = playground.tokenize("كتاب جديد").unwrap();
        let out: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(out["pieces"].as_array().unwrap().len(), 2);
        assert!(out["fertility"].as_f64().unwrap() >= 1.0);

        let exported = playground.export_model().unwrap();
        assert!(aratok::TokenizerModel::from_json_str(&exported).is_ok());
    }

    #[test]
    fn tokenize_without_model_errors() {
        let playground = Playground::new();
        assert!(playground.tokenize("كتاب").is_err());
    }

    #[test]
    fn bad_algorithm_is_an_error() {
        let mut playground = Playground::new();
        assert!(playground
            .train(CORPUS, "magic", 60, false, false, true, true, true, true)
            .is_err());
    }
}
