use std::collections::HashSet;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use aratok::codec::{decode, encode_opt, segment_word};
use aratok::corpus::{ingest_reader, pre_tokenize, CorpusStats};
use aratok::lep::{EmbeddingMatrix, ExtensionPlan, SubtokenMap, TokenFilter};
use aratok::metrics::{evaluate, MetricsReport};
use aratok::model::{Algorithm, TokenizerModel};
use aratok::normalizer::{DiacriticsMode, NormalizationConfig, Normalizer};
use aratok::trainer::{
    train_bpe, train_unigram, train_wordpiece, BpeOptions, UnigramOptions, WordPieceOptions,
};
use aratok::vocab::{prune_vocab, token_frequencies};

use crate::{Cli, Command};

fn open_input(file: Option<&PathBuf>) -> Result<Box<dyn BufRead>> {
    match file {
        Some(path) => {
            let f = std::fs::File::open(path)
                .with_context(|| format!("opening {}", path.display()))?;
            Ok(Box::new(BufReader::new(f)))
        }
        None => Ok(Box::new(BufReader::new(std::io::stdin()))),
    }
}

fn load_stats(
    path: &Path,
    config: &NormalizationConfig,
    max_lines: Option<u64>,
) -> Result<CorpusStats> {
    let file =
        std::fs::File::open(path).with_context(|| format!("opening corpus {}", path.display()))?;
    let stats = ingest_reader(BufReader::new(file), config, max_lines)
        .with_context(|| format!("ingesting {}", path.display()))?;
    Ok(stats)
}

fn load_model(path: &Path) -> Result<TokenizerModel> {
    TokenizerModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

pub fn run(cli: Cli) -> Result<()> {
    let norm_config = cli.norm.resolve(cli.config.as_ref())?;
    match cli.command {
        Command::Normalize { file } => normalize(file.as_ref(), &norm_config),
        Command::Ingest {
            corpus,
            max_lines,
            top,
        } => ingest(&corpus, max_lines, &norm_config, top),
        Command::Train {
            algo,
            vocab_size,
            corpus,
            output,
            max_lines,
            seed_size,
            max_piece_length,
            em_iters,
            shrink_factor,
            min_pair_freq,
            character_coverage,
        } => {
            let algorithm: Algorithm = algo.parse()?;
            let stats = load_stats(&corpus, &norm_config, max_lines)?;
            let model = match algorithm {
                Algorithm::Unigram => train_unigram(
                    &stats,
                    vocab_size,
                    &UnigramOptions {
                        seed_size,
                        max_piece_length,
                        em_iters,
                        shrink_factor,
                        character_coverage,
                        normalization: norm_config,
                    },
                )?,
                Algorithm::Bpe => train_bpe(
                    &stats,
                    vocab_size,
                    &BpeOptions {
                        min_pair_freq: min_pair_freq.unwrap_or(2),
                        character_coverage,
                        normalization: norm_config,
                        audit_counts: false,
                    },
                )?,
                Algorithm::WordPiece => train_wordpiece(
                    &stats,
                    vocab_size,
                    &WordPieceOptions {
                        min_pair_freq: min_pair_freq.unwrap_or(10),
                        character_coverage,
                        normalization: norm_config,
                    },
                )?,
            };
            model.save(&output)?;
            eprintln!(
                "trained {} model: vocab {} ({} distinct words, {} tokens)",
                algorithm,
                model.vocab_size(),
                stats.distinct_words(),
                stats.total_words
            );
            Ok(())
        }
        Command::Encode {
            model,
            file,
            show_pieces,
            no_normalize,
        } => encode_cmd(&model, file.as_ref(), show_pieces, no_normalize),
        Command::Decode { model, file } => decode_cmd(&model, file.as_ref()),
        Command::Evaluate {
            model,
            corpus,
            max_lines,
            json: _,
            table,
        } => {
            let model = load_model(&model)?;
            // metrics are computed under the model's own normalization
            let stats = load_stats(&corpus, &model.normalization, max_lines)?;
            let report = evaluate(&model, &stats)?;
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            if table {
                writeln!(out, "{}", MetricsReport::table_header())?;
                writeln!(out, "{}", report.table_row(model.algorithm.name()))?;
            } else {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            }
            Ok(())
        }
        Command::Prune {
            model,
            coverage,
            corpus,
            max_lines,
            output,
        } => {
            let model = load_model(&model)?;
            let stats = load_stats(&corpus, &model.normalization, max_lines)?;
            let usage = token_frequencies(&model, &stats);
            let pruned = prune_vocab(&model, &usage, coverage)?;
            eprintln!(
                "pruned vocab {} -> {} at coverage {}",
                model.vocab_size(),
                pruned.vocab_size(),
                coverage
            );
            match output {
                Some(path) => pruned.save(&path)?,
                None => print!("{}", pruned.to_json_string()),
            }
            Ok(())
        }
        Command::Extend {
            arabic,
            base_vocab,
            base_emb,
            submap,
            out,
            unfrozen_layers,
            filter_file,
        } => extend(
            &arabic,
            &base_vocab,
            &base_emb,
            &submap,
            &out,
            &unfrozen_layers,
            filter_file.as_ref(),
        ),
        Command::Repro {
            corpus,
            eval,
            eval_diacritized,
            vocab_size,
            max_lines,
        } => repro(&corpus, &eval, &eval_diacritized, vocab_size, max_lines),
    }
}

fn normalize(file: Option<&PathBuf>, config: &NormalizationConfig) -> Result<()> {
    let normalizer = Normalizer::new(*config);
    let input = open_input(file)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in input.lines() {
        let line = line.context("reading input")?;
        writeln!(out, "{}", normalizer.normalize(&line))?;
    }
    Ok(())
}

fn ingest(
    corpus: &Path,
    max_lines: Option<u64>,
    config: &NormalizationConfig,
    top: usize,
) -> Result<()> {
    let stats = load_stats(corpus, config, max_lines)?;
    let mut ranked: Vec<(&String, &u64)> = stats.word_counts.iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let top_words: Vec<serde_json::Value> = ranked
        .iter()
        .take(top)
        .map(|(word, count)| serde_json::json!({ "word": word, "count": count }))
        .collect();
    let summary = serde_json::json!({
        "total_words": stats.total_words,
        "distinct_words": stats.distinct_words(),
        "total_chars": stats.total_chars,
        "top_words": top_words,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn encode_cmd(
    model_path: &Path,
    file: Option<&PathBuf>,
    show_pieces: bool,
    no_normalize: bool,
) -> Result<()> {
    let model = load_model(model_path)?;
    let input = open_input(file)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in input.lines() {
        let line = line.context("reading input")?;
        if show_pieces {
            let normalizer = Normalizer::new(model.normalization);
            let text = if no_normalize {
                line
            } else {
                normalizer.normalize(&line)
            };
            let mut pieces: Vec<String> = Vec::new();
            for word in pre_tokenize(&text) {
                pieces.extend(segment_word(&model, word).into_iter().map(|p| p.text));
            }
            writeln!(out, "{}", pieces.join(" "))?;
        } else {
            let ids = encode_opt(&model, &line, !no_normalize);
            let rendered: Vec<String> = ids.iter().map(u32::to_string).collect();
            writeln!(out, "{}", rendered.join(" "))?;
        }
    }
    Ok(())
}

fn decode_cmd(model_path: &Path, file: Option<&PathBuf>) -> Result<()> {
    let model = load_model(model_path)?;
    let input = open_input(file)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (idx, line) in input.lines().enumerate() {
        let line = line.context("reading input")?;
        let ids = line
            .split_whitespace()
            .map(|part| {
                part.parse::<u32>()
                    .with_context(|| format!("bad token id {part:?} on line {}", idx + 1))
            })
            .collect::<Result<Vec<u32>>>()?;
        writeln!(out, "{}", decode(&model, &ids)?)?;
    }
    Ok(())
}

fn extend(
    arabic: &Path,
    base_vocab: &Path,
    base_emb: &Path,
    submap: &Path,
    out_dir: &Path,
    unfrozen_layers: &str,
    filter_file: Option<&PathBuf>,
) -> Result<()> {
    let model = load_model(arabic)?;
    let vocab_text = std::fs::read_to_string(base_vocab)
        .with_context(|| format!("reading base vocab {}", base_vocab.display()))?;
    let base_vocab: HashSet<String> = vocab_text
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect();
    let base = EmbeddingMatrix::load_arte(base_emb)
        .with_context(|| format!("reading base embeddings {}", base_emb.display()))?;
    let submap = SubtokenMap::load_tsv(submap)?;
    let filter = match filter_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading filter file {}", path.display()))?;
            TokenFilter::from_file_str(&text)?
        }
        None => TokenFilter::default(),
    };
    let layers = unfrozen_layers
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|e| aratok::Error::Config(format!("bad layer index {part:?}: {e}")))
        })
        .collect::<aratok::Result<Vec<u32>>>()?;

    let plan = ExtensionPlan::build(&model, &base_vocab, &base, &submap, &filter, &layers)?;
    plan.save_dir(out_dir)?;
    eprintln!(
        "extension plan: {} new tokens, freeze threshold {}, unfrozen layers {:?} -> {}",
        plan.new_tokens.len(),
        plan.freeze_threshold,
        plan.unfrozen_layers,
        out_dir.display()
    );
    Ok(())
}

fn repro(
    corpus: &Path,
    eval_path: &Path,
    eval_diac_path: &Path,
    vocab_size: usize,
    max_lines: Option<u64>,
) -> Result<()> {
    let raw = |diacritics| NormalizationConfig {
        alif_mode: aratok::normalizer::AlifMode::Preserve4,
        diacritics,
        map_numerals: false,
        map_punctuation: false,
        remove_tatweel: false,
        apply_nfkc: false,
    };
    let norm = |diacritics| NormalizationConfig {
        diacritics,
        ..NormalizationConfig::default()
    };
    let grid = [
        ("drop", raw(DiacriticsMode::Drop)),
        ("drop_norm", norm(DiacriticsMode::Drop)),
        ("keep", raw(DiacriticsMode::Keep)),
        ("keep_norm", norm(DiacriticsMode::Keep)),
    ];

    println!("{}", MetricsReport::table_header());
    for (tag, config) in grid {
        let stats = load_stats(corpus, &config, max_lines)?;
        let eval_stats = load_stats(eval_path, &config, max_lines)?;
        let diac_stats = load_stats(eval_diac_path, &config, max_lines)?;
        for algorithm in Algorithm::ALL {
            let model = match algorithm {
                Algorithm::Unigram => train_unigram(
                    &stats,
                    vocab_size,
                    &UnigramOptions {
                        normalization: config,
                        ..UnigramOptions::default()
                    },
                )?,
                Algorithm::Bpe => train_bpe(
                    &stats,
                    vocab_size,
                    &BpeOptions {
                        normalization: config,
                        ..BpeOptions::default()
                    },
                )?,
                Algorithm::WordPiece => train_wordpiece(
                    &stats,
                    vocab_size,
                    &WordPieceOptions {
                        normalization: config,
                        ..WordPieceOptions::default()
                    },
                )?,
            };
            let report = evaluate(&model, &eval_stats)?;
            println!("{}", report.table_row(&format!("{}_{tag}", algorithm.name())));
            let diac_report = evaluate(&model, &diac_stats)?;
            println!(
                "{}",
                diac_report.table_row(&format!("{}_{tag}@diacritized", algorithm.name()))
            );
        }
    }
    Ok(())
}
