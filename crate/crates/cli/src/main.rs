//! `aratok` — train, evaluate, prune and deploy Arabic-optimized subword
//! tokenizers from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error. Errors go to stderr,
//! data to stdout.

mod commands;
mod normflags;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use normflags::NormFlags;

#[derive(Parser)]
#[command(
    name = "aratok",
    version,
    about = "Arabic-optimized subword tokenization toolkit",
    propagate_version = true
)]
pub(crate) struct Cli {
    /// Fixes any randomized default. Every pipeline in this toolkit is
    /// already deterministic, so the flag is recorded but has no effect.
    #[arg(long, global = true)]
    pub(crate) seed: Option<u64>,

    /// Cap internal parallelism at N threads
    #[arg(long, global = true)]
    pub(crate) threads: Option<usize>,

    /// Normalization config file (overrides $ARATOK_CONFIG)
    #[arg(long, global = true)]
    pub(crate) config: Option<PathBuf>,

    #[command(flatten)]
    pub(crate) norm: NormFlags,

    #[command(subcommand)]
    pub(crate) command: Command,
}

#[derive(Subcommand)]
pub(crate) enum Command {
    /// Normalize UTF-8 text from a file or stdin to stdout
    Normalize {
        /// Input file; stdin when omitted
        file: Option<PathBuf>,
    },
    /// Ingest a corpus and print its statistics
    Ingest {
        #[arg(long)]
        corpus: PathBuf,
        /// Cap the number of lines read
        #[arg(long)]
        max_lines: Option<u64>,
        /// Print the N most frequent words
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
    /// Train a tokenizer model and write it as JSON
    Train {
        /// unigram, bpe or wordpiece
        #[arg(long)]
        algo: String,
        #[arg(long)]
        vocab_size: usize,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        max_lines: Option<u64>,
        /// Unigram: seed vocabulary cap (default min(1e6, 10×vocab))
        #[arg(long)]
        seed_size: Option<usize>,
        /// Unigram: longest candidate piece in characters
        #[arg(long, default_value_t = 16)]
        max_piece_length: usize,
        /// Unigram: EM iterations per pruning round
        #[arg(long, default_value_t = 2)]
        em_iters: usize,
        /// Unigram: fraction of pieces kept per pruning round
        #[arg(long, default_value_t = 0.75)]
        shrink_factor: f64,
        /// BPE/WordPiece: minimum pair frequency for a merge
        #[arg(long)]
        min_pair_freq: Option<u64>,
        /// Fraction of character occurrences the alphabet must cover
        #[arg(long, default_value_t = 1.0)]
        character_coverage: f64,
    },
    /// Encode lines from a file or stdin to token ids
    Encode {
        model: PathBuf,
        file: Option<PathBuf>,
        /// Print token strings instead of ids
        #[arg(long)]
        show_pieces: bool,
        /// Skip the model's baked-in normalization (input already normalized)
        #[arg(long)]
        no_normalize: bool,
    },
    /// Decode lines of space-separated token ids back to text
    Decode {
        model: PathBuf,
        file: Option<PathBuf>,
    },
    /// Compute fertility, compression ratio and OOV rate over a corpus
    Evaluate {
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        max_lines: Option<u64>,
        /// Emit the report as a JSON object (default)
        #[arg(long, conflicts_with = "table")]
        json: bool,
        /// Print a one-line comparison row instead of JSON
        #[arg(long)]
        table: bool,
    },
    /// Prune a model to a cumulative-coverage target
    Prune {
        model: PathBuf,
        #[arg(long)]
        coverage: f64,
        /// Reference corpus the usage counts come from
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        max_lines: Option<u64>,
        /// Output file; stdout when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a vocabulary-extension plan (tokens, initialized embedding
    /// rows, freeze threshold, unfrozen layers)
    Extend {
        /// Trained tokenizer supplying candidate tokens
        #[arg(long)]
        arabic: PathBuf,
        /// Base vocabulary, one token per line
        #[arg(long)]
        base_vocab: PathBuf,
        /// Base embedding matrix in ARTE format
        #[arg(long)]
        base_emb: PathBuf,
        /// token<TAB>id,id,... map from candidate tokens to base ids
        #[arg(long)]
        submap: PathBuf,
        /// Output directory for plan.json + init_rows.arte
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated layer indices to unfreeze
        #[arg(long, default_value = "24,25,26,27")]
        unfrozen_layers: String,
        /// Replace the rejected-punctuation set from a filter file
        #[arg(long)]
        filter_file: Option<PathBuf>,
    },
    /// Train and evaluate the full comparison grid (3 algorithms ×
    /// normalization on/off × diacritics drop/keep) on the bundled corpus
    Repro {
        #[arg(long, default_value = "assets/train.ar.txt")]
        corpus: PathBuf,
        #[arg(long, default_value = "assets/eval.ar.txt")]
        eval: PathBuf,
        #[arg(long, default_value = "assets/eval_diacritized.ar.txt")]
        eval_diacritized: PathBuf,
        #[arg(long, default_value_t = 4000)]
        vocab_size: usize,
        #[arg(long)]
        max_lines: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };

    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let usage = err
                .downcast_ref::<aratok::Error>()
                .is_some_and(|e| matches!(e, aratok::Error::Config(_)));
            ExitCode::from(if usage { 1 } else { 2 })
        }
    }
}
