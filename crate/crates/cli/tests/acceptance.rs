//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values. The directional experiments run on the bundled
//! corpus at desk scale; the exact-property criteria run on randomized
//! inputs with fixed seeds.

use std::collections::HashSet;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;
use std::time::Instant;

use aratok::codec::{decode, encode, viterbi_segment};
use aratok::corpus::{ingest_reader, CorpusStats};
use aratok::lep::{mask_gradients, mean_subtoken_init, EmbeddingMatrix, NewToken, SubtokenMap};
use aratok::metrics::{evaluate, identity_holds, MetricsReport};
use aratok::model::{Algorithm, TokenizerModel, SPECIAL_LOGPROB, SPECIAL_TOKENS};
use aratok::normalizer::{
    build_rule_table, normalize, AlifMode, DiacriticsMode, NormalizationConfig,
};
use aratok::trainer::{
    train_bpe, train_unigram, train_wordpiece, BpeOptions, UnigramOptions, WordPieceOptions,
};
use aratok::vocab::{prune_vocab, token_frequencies};

const GRID_VOCAB: usize = 4000;
const PRUNE_VOCAB: usize = 2000;

fn assets(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(name)
}

fn load_stats(path: &Path, config: &NormalizationConfig) -> CorpusStats {
    let file = std::fs::File::open(path)
        .unwrap_or_else(|e| panic!("open {}: {e}", path.display()));
    ingest_reader(BufReader::new(file), config, None).unwrap()
}

/// splitmix64 for reproducible randomized criteria.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    fn chance(&mut self, p: f64) -> bool {
        self.f64() < p
    }
}

fn drop_raw() -> NormalizationConfig {
    NormalizationConfig {
        diacritics: DiacriticsMode::Drop,
        ..NormalizationConfig::disabled()
    }
}

fn keep_norm() -> NormalizationConfig {
    NormalizationConfig {
        diacritics: DiacriticsMode::Keep,
        ..NormalizationConfig::default()
    }
}

struct TrainedConfig {
    model: TokenizerModel,
    eval: MetricsReport,
    eval_diacritized: MetricsReport,
}

struct Grid {
    /// (config tag, algorithm) -> trained model + reports
    entries: Vec<((&'static str, Algorithm), TrainedConfig)>,
    build_seconds: f64,
}

impl Grid {
    fn get(&self, tag: &str, algorithm: Algorithm) -> &TrainedConfig {
        &self
            .entries
            .iter()
            .find(|((t, a), _)| *t == tag && *a == algorithm)
            .unwrap_or_else(|| panic!("no grid entry {tag}/{algorithm}"))
            .1
    }
}

fn train_one(
    algorithm: Algorithm,
    stats: &CorpusStats,
    vocab_size: usize,
    config: NormalizationConfig,
) -> TokenizerModel {
    match algorithm {
        Algorithm::Unigram => train_unigram(
            stats,
            vocab_size,
            &UnigramOptions {
                normalization: config,
                ..UnigramOptions::default()
            },
        )
        .unwrap(),
        Algorithm::Bpe => train_bpe(
            stats,
            vocab_size,
            &BpeOptions {
                normalization: config,
                ..BpeOptions::default()
            },
        )
        .unwrap(),
        Algorithm::WordPiece => train_wordpiece(
            stats,
            vocab_size,
            &WordPieceOptions {
                normalization: config,
                ..WordPieceOptions::default()
            },
        )
        .unwrap(),
    }
}

/// The full comparison grid at GRID_VOCAB: four normalization configs by
/// three algorithms, trained on the bundled corpus, evaluated on the held-out
/// slices.
static GRID: LazyLock<Grid> = LazyLock::new(|| {
    let start = Instant::now();
    let configs: [(&'static str, NormalizationConfig); 4] = [
        ("drop_norm", NormalizationConfig::default()),
        ("drop_raw", drop_raw()),
        ("keep_norm", keep_norm()),
        ("keep_raw", NormalizationConfig::disabled()),
    ];
    let mut entries = Vec::new();
    for (tag, config) in configs {
        let stats = load_stats(&assets("train.ar.txt"), &config);
        let eval_stats = load_stats(&assets("eval.ar.txt"), &config);
        let diac_stats = load_stats(&assets("eval_diacritized.ar.txt"), &config);
        for algorithm in Algorithm::ALL {
            let model = train_one(algorithm, &stats, GRID_VOCAB, config);
            let eval = evaluate(&model, &eval_stats).unwrap();
            let eval_diacritized = evaluate(&model, &diac_stats).unwrap();
            entries.push((
                (tag, algorithm),
                TrainedConfig {
                    model,
                    eval,
                    eval_diacritized,
                },
            ));
        }
    }
    Grid {
        entries,
        build_seconds: start.elapsed().as_secs_f64(),
    }
});

struct PruneSet {
    full: MetricsReport,
    p99: MetricsReport,
    p95: MetricsReport,
    full_vocab: Vec<String>,
    p99_vocab: Vec<String>,
    p95_vocab: Vec<String>,
}

/// Pruning experiment at PRUNE_VOCAB on the normalized unigram model.
static PRUNE: LazyLock<PruneSet> = LazyLock::new(|| {
    let config = NormalizationConfig::default();
    let stats = load_stats(&assets("train.ar.txt"), &config);
    let eval_stats = load_stats(&assets("eval.ar.txt"), &config);
    let model = train_one(Algorithm::Unigram, &stats, PRUNE_VOCAB, config);
    let usage = token_frequencies(&model, &stats);
    let p99 = prune_vocab(&model, &usage, 0.99).unwrap();
    let p95 = prune_vocab(&model, &usage, 0.95).unwrap();
    PruneSet {
        full: evaluate(&model, &eval_stats).unwrap(),
        p99: evaluate(&p99, &eval_stats).unwrap(),
        p95: evaluate(&p95, &eval_stats).unwrap(),
        full_vocab: model.vocab,
        p99_vocab: p99.vocab,
        p95_vocab: p95.vocab,
    }
});

#[test]
fn acceptance_01_normalization_improves_fertility() {
    let grid = &*GRID;
    assert!(
        grid.build_seconds <= 300.0,
        "grid took {:.0}s, budget is 300s",
        grid.build_seconds
    );
    for algorithm in Algorithm::ALL {
        let norm = grid.get("drop_norm", algorithm).eval.fertility;
        let raw = grid.get("drop_raw", algorithm).eval.fertility;
        let improvement = (raw - norm) / raw;
        assert!(
            norm < raw,
            "{algorithm}: normalized fertility {norm:.4} not below raw {raw:.4}"
        );
        assert!(
            improvement >= 0.03,
            "{algorithm}: improvement {:.2}% below 3%",
            improvement * 100.0
        );
        println!(
            "criterion 01 (normalization improves fertility): PASS {algorithm} {norm:.4} vs {raw:.4} ({:+.2}%)",
            -improvement * 100.0
        );
    }
    println!(
        "criterion 01 runtime: grid trained in {:.1}s (budget 300s)",
        grid.build_seconds
    );
}

#[test]
fn acceptance_02_algorithm_ordering() {
    let grid = &*GRID;
    let unigram = grid.get("drop_norm", Algorithm::Unigram).eval.fertility;
    let bpe = grid.get("drop_norm", Algorithm::Bpe).eval.fertility;
    let wordpiece = grid.get("drop_norm", Algorithm::WordPiece).eval.fertility;
    assert!(
        unigram <= bpe,
        "fertility(unigram)={unigram:.4} > fertility(bpe)={bpe:.4}"
    );
    assert!(
        unigram <= wordpiece,
        "fertility(unigram)={unigram:.4} > fertility(wordpiece)={wordpiece:.4}"
    );
    println!(
        "criterion 02 (algorithm ordering): PASS unigram {unigram:.4} <= bpe {bpe:.4}, <= wordpiece {wordpiece:.4}"
    );
}

#[test]
fn acceptance_03_diacritics_direction() {
    let grid = &*GRID;
    for algorithm in Algorithm::ALL {
        for (drop_tag, keep_tag) in [("drop_norm", "keep_norm"), ("drop_raw", "keep_raw")] {
            let drop = grid.get(drop_tag, algorithm).eval_diacritized.fertility;
            let keep = grid.get(keep_tag, algorithm).eval_diacritized.fertility;
            assert!(
                drop <= keep,
                "{algorithm} {drop_tag}: fertility(drop)={drop:.4} > fertility(keep)={keep:.4}"
            );
            println!(
                "criterion 03 (diacritics direction): PASS {algorithm} {drop_tag} {drop:.4} <= {keep:.4}"
            );
        }
    }
}

#[test]
fn acceptance_04_pruning_direction() {
    let p = &*PRUNE;
    assert!(
        p.full.fertility <= p.p99.fertility && p.p99.fertility <= p.p95.fertility,
        "fertility order violated: full {:.4}, 0.99 {:.4}, 0.95 {:.4}",
        p.full.fertility,
        p.p99.fertility,
        p.p95.fertility
    );
    assert!(
        p.full.compression_ratio >= p.p99.compression_ratio
            && p.p99.compression_ratio >= p.p95.compression_ratio,
        "compression order violated: full {:.4}, 0.99 {:.4}, 0.95 {:.4}",
        p.full.compression_ratio,
        p.p99.compression_ratio,
        p.p95.compression_ratio
    );
    // retained sets nest: 0.95 ⊆ 0.99 ⊆ full
    let p99: HashSet<&String> = p.p99_vocab.iter().collect();
    let full: HashSet<&String> = p.full_vocab.iter().collect();
    for token in &p.p95_vocab {
        assert!(p99.contains(token), "{token:?} in 0.95 but not 0.99");
    }
    for token in &p.p99_vocab {
        assert!(full.contains(token), "{token:?} in 0.99 but not full");
    }
    println!(
        "criterion 04 (pruning direction): PASS fertility {:.4} <= {:.4} <= {:.4}; compression {:.3} >= {:.3} >= {:.3}; vocab {} -> {} -> {}",
        p.full.fertility,
        p.p99.fertility,
        p.p95.fertility,
        p.full.compression_ratio,
        p.p99.compression_ratio,
        p.p95.compression_ratio,
        p.full_vocab.len(),
        p.p99_vocab.len(),
        p.p95_vocab.len()
    );
}

#[test]
fn acceptance_05_metric_identity() {
    let grid = &*GRID;
    let mut checked = 0usize;
    for ((_, _), trained) in &grid.entries {
        for report in [&trained.eval, &trained.eval_diacritized] {
            assert!(identity_holds(report), "identity violated: {report:?}");
            let implied = report.total_chars as f64 / report.total_words as f64;
            let product = report.fertility * report.compression_ratio;
            assert!((product - implied).abs() <= 1e-12 * implied.max(1.0));
            checked += 1;
        }
    }
    let p = &*PRUNE;
    for report in [&p.full, &p.p99, &p.p95] {
        assert!(identity_holds(report));
        checked += 1;
    }
    // the identity also pins the relation between published-scale values:
    // fertility 1.199 at compression 5.03 implies about 6.03 chars per word
    assert!((1.199f64 * 5.03 - 6.031).abs() < 0.01);
    println!("criterion 05 (metric identity): PASS on {checked} emitted reports");
}

#[test]
fn acceptance_06_viterbi_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = Rng(0xACCE_0006);
    let alphabet = ['a', 'b', 'c', 'd', 'e', 'f'];
    let mut cases = 0usize;

    while cases < 10_000 {
        let alpha_len = 1 + rng.below(6);
        let letters = &alphabet[..alpha_len];

        // singles with gaps (dropped singles exercise the UNK path)
        let mut pieces: Vec<(String, f64)> = Vec::new();
        for &c in letters {
            if rng.chance(0.85) {
                pieces.push((c.to_string(), -rng.f64() * 4.0 - 0.1));
            }
        }
        // random multi-char pieces
        for _ in 0..rng.below(9) {
            let len = 2 + rng.below(3);
            let text: String = (0..len).map(|_| letters[rng.below(alpha_len)]).collect();
            if !pieces.iter().any(|(t, _)| *t == text) {
                pieces.push((text, -rng.f64() * 6.0 - 0.1));
            }
        }
        if pieces.is_empty() {
            continue;
        }

        let mut vocab: Vec<String> = SPECIAL_TOKENS.iter().map(|s| s.to_string()).collect();
        let mut logprobs = vec![SPECIAL_LOGPROB; SPECIAL_TOKENS.len()];
        for (text, lp) in &pieces {
            vocab.push(text.clone());
            logprobs.push(*lp);
        }
        let model = TokenizerModel::from_parts(
            Algorithm::Unigram,
            vocab,
            logprobs,
            vec![],
            0,
            NormalizationConfig::default(),
        )
        .unwrap();

        let word_len = 1 + rng.below(12);
        let word: String = (0..word_len)
            .map(|_| {
                if rng.chance(0.05) {
                    'z' // always outside the alphabet
                } else {
                    letters[rng.below(alpha_len)]
                }
            })
            .collect();

        let piece_score = |text: &str| -> f64 {
            match model.id_of(text) {
                Some(id) if !model.is_special(text) => model.logprob(id),
                _ if text.chars().count() == 1 => model.unk_penalty(),
                _ => f64::NEG_INFINITY,
            }
        };

        // exhaustive enumeration over all 2^(n-1) segmentations, summing
        // left to right exactly like the lattice recurrence
        let chars: Vec<char> = word.chars().collect();
        let splits = chars.len() - 1;
        let mut oracle_best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << splits) {
            let mut score = 0.0f64;
            let mut start = 0usize;
            let mut valid = true;
            for end in 1..=chars.len() {
                let boundary = end == chars.len() || (mask >> (end - 1)) & 1 == 1;
                if !boundary {
                    continue;
                }
                let piece: String = chars[start..end].iter().collect();
                let s = piece_score(&piece);
                if s == f64::NEG_INFINITY {
                    valid = false;
                    break;
                }
                score += s;
                start = end;
            }
            if valid && score > oracle_best {
                oracle_best = score;
            }
        }

        let segmentation = viterbi_segment(&model, &word);
        let mut viterbi_score = 0.0f64;
        for piece in &segmentation {
            viterbi_score += piece_score(&piece.text);
        }
        assert_eq!(
            viterbi_score.to_bits(),
            oracle_best.to_bits(),
            "score mismatch on word {word:?}: viterbi {viterbi_score} vs oracle {oracle_best}"
        );
        cases += 1;
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed <= 60.0, "took {elapsed:.1}s, budget 60s");
    println!(
        "criterion 06 (viterbi oracle equivalence): PASS {cases} cases exactly equal in {elapsed:.1}s"
    );
}

#[test]
fn acceptance_07_round_trip() {
    let grid = &*GRID;
    let text = std::fs::read_to_string(assets("train.ar.txt")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut rng = Rng(0xACCE_0007);

    for algorithm in Algorithm::ALL {
        let model = &grid.get("drop_norm", algorithm).model;
        let expected_config = model.normalization;
        for _ in 0..10_000 {
            let line = lines[rng.below(lines.len())];
            let ids = encode(model, line);
            let decoded = decode(model, &ids).unwrap();
            let expected = normalize(line, &expected_config)
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ");
            assert_eq!(
                decoded, expected,
                "{algorithm} round trip failed on {line:?}"
            );
        }
        println!("criterion 07 (round trip): PASS {algorithm} on 10000 corpus lines");
    }
}

#[test]
fn acceptance_08_mean_subtoken_exactness() {
    let mut rng = Rng(0xACCE_0008);
    for case in 0..1_000 {
        let rows = 1 + rng.below(40);
        let dim = 1 + rng.below(8);
        let data: Vec<f64> = (0..rows * dim).map(|_| rng.f64() * 20.0 - 10.0).collect();
        let base = EmbeddingMatrix::new(rows, dim, data).unwrap();

        let count = 1 + rng.below(6);
        let ids: Vec<u32> = (0..count).map(|_| rng.below(rows) as u32).collect();
        let token = format!("tok{case}");
        let mut submap = SubtokenMap::new();
        submap.insert(token.clone(), ids.clone()).unwrap();
        let tokens = vec![NewToken {
            token,
            lstrip: false,
        }];

        let got = mean_subtoken_init(&base, &submap, &tokens).unwrap();

        // independent oracle: plain summation loop, then divide
        for c in 0..dim {
            let mut sum = 0.0f64;
            for &id in &ids {
                sum += base.row(id as usize)[c];
            }
            let oracle = sum / ids.len() as f64;
            let value = got.row(0)[c];
            assert!(
                (value - oracle).abs() <= 1e-12,
                "case {case} coord {c}: {value} vs oracle {oracle}"
            );

            // convexity: within [min, max] of the subtoken coordinates
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &id in &ids {
                lo = lo.min(base.row(id as usize)[c]);
                hi = hi.max(base.row(id as usize)[c]);
            }
            assert!(
                value >= lo - 1e-12 && value <= hi + 1e-12,
                "case {case} coord {c}: {value} outside [{lo}, {hi}]"
            );
        }

        // norm corollary
        let row_norm: f64 = got.row(0).iter().map(|v| v * v).sum::<f64>().sqrt();
        let max_norm = ids
            .iter()
            .map(|&id| {
                base.row(id as usize)
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0f64, f64::max);
        assert!(row_norm <= max_norm * (1.0 + 1e-9) + 1e-12);
    }
    println!("criterion 08 (mean-subtoken exactness + convexity): PASS 1000 randomized cases");
}

#[test]
fn acceptance_09_gradient_mask_exactness() {
    let mut rng = Rng(0xACCE_0009);
    for _ in 0..500 {
        let rows = 1 + rng.below(24);
        let dim = 1 + rng.below(12);
        let gen = |rng: &mut Rng| -> EmbeddingMatrix {
            let data: Vec<f64> = (0..rows * dim).map(|_| rng.f64() * 6.0 - 3.0).collect();
            EmbeddingMatrix::new(rows, dim, data).unwrap()
        };
        let g1 = gen(&mut rng);
        let g2 = gen(&mut rng);
        let threshold = rng.below(rows + 1);

        let masked = mask_gradients(&g1, threshold).unwrap();
        for r in 0..rows {
            for c in 0..dim {
                if r < threshold {
                    assert_eq!(masked.row(r)[c], 0.0);
                } else {
                    assert_eq!(masked.row(r)[c].to_bits(), g1.row(r)[c].to_bits());
                }
            }
        }

        // idempotence
        let twice = mask_gradients(&masked, threshold).unwrap();
        assert_eq!(twice, masked);

        // linearity: mask(a·g1 + g2) == a·mask(g1) + mask(g2)
        let a = rng.f64() * 4.0 - 2.0;
        let combined = EmbeddingMatrix::new(
            rows,
            dim,
            g1.data()
                .iter()
                .zip(g2.data())
                .map(|(x, y)| a * x + y)
                .collect(),
        )
        .unwrap();
        let lhs = mask_gradients(&combined, threshold).unwrap();
        let m1 = mask_gradients(&g1, threshold).unwrap();
        let m2 = mask_gradients(&g2, threshold).unwrap();
        let rhs = EmbeddingMatrix::new(
            rows,
            dim,
            m1.data()
                .iter()
                .zip(m2.data())
                .map(|(x, y)| a * x + y)
                .collect(),
        )
        .unwrap();
        for (l, r) in lhs.data().iter().zip(rhs.data()) {
            assert_eq!(l.to_bits(), r.to_bits());
        }
    }

    // boundary thresholds
    let grad = EmbeddingMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(mask_gradients(&grad, 0).unwrap(), grad);
    assert!(mask_gradients(&grad, 2)
        .unwrap()
        .data()
        .iter()
        .all(|&v| v == 0.0));
    assert!(mask_gradients(&grad, 3).is_err());
    println!("criterion 09 (gradient mask exactness): PASS 500 randomized matrices + boundaries");
}

#[test]
fn acceptance_10_determinism() {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    std::fs::create_dir_all(&tmp).unwrap();
    let corpus = assets("train.ar.txt");

    // byte-identical model files from repeated `train` runs
    for algo in ["unigram", "bpe", "wordpiece"] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = tmp.join(format!("det-{algo}-{run}.json"));
            let status = std::process::Command::new(env!("CARGO_BIN_EXE_aratok"))
                .args([
                    "train",
                    "--algo",
                    algo,
                    "--vocab-size",
                    "900",
                    "--corpus",
                    corpus.to_str().unwrap(),
                    "--max-lines",
                    "3000",
                    "-o",
                    path.to_str().unwrap(),
                ])
                .status()
                .unwrap();
            assert!(status.success());
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{algo} model files differ");
    }

    // byte-identical plan + ARTE from repeated `extend` runs
    let model_path = tmp.join("det-extend-model.json");
    std::process::Command::new(env!("CARGO_BIN_EXE_aratok"))
        .args([
            "train",
            "--algo",
            "unigram",
            "--vocab-size",
            "300",
            "--corpus",
            corpus.to_str().unwrap(),
            "--max-lines",
            "800",
            "-o",
            model_path.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    let model = TokenizerModel::load(&model_path).unwrap();

    let dim = 6usize;
    let rows = 32usize;
    let mut rng = Rng(0xACCE_0010);
    let data: Vec<f64> = (0..rows * dim).map(|_| rng.f64() * 2.0 - 1.0).collect();
    let base = EmbeddingMatrix::new(rows, dim, data).unwrap();
    let base_path = tmp.join("det-base.arte");
    base.save_arte(&base_path).unwrap();
    let vocab_path = tmp.join("det-base-vocab.txt");
    std::fs::write(&vocab_path, "unused\n").unwrap();
    let mut seen = HashSet::new();
    let mut submap = String::new();
    for token in &model.vocab {
        let stripped = token.trim_start_matches('▁');
        if stripped.is_empty() || model.is_special(token) {
            continue;
        }
        if seen.insert(stripped.to_string()) {
            let a = rng.below(rows);
            let b = rng.below(rows);
            submap.push_str(&format!("{stripped}\t{a},{b}\n"));
        }
    }
    let submap_path = tmp.join("det-submap.tsv");
    std::fs::write(&submap_path, submap).unwrap();

    let mut plans = Vec::new();
    for run in 0..2 {
        let out_dir = tmp.join(format!("det-plan-{run}"));
        let _ = std::fs::remove_dir_all(&out_dir);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_aratok"))
            .args([
                "extend",
                "--arabic",
                model_path.to_str().unwrap(),
                "--base-vocab",
                vocab_path.to_str().unwrap(),
                "--base-emb",
                base_path.to_str().unwrap(),
                "--submap",
                submap_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        plans.push((
            std::fs::read(out_dir.join("plan.json")).unwrap(),
            std::fs::read(out_dir.join("init_rows.arte")).unwrap(),
        ));
    }
    assert_eq!(plans[0].0, plans[1].0, "plan.json differs across runs");
    assert_eq!(plans[0].1, plans[1].1, "init_rows.arte differs across runs");
    println!("criterion 10 (determinism): PASS byte-identical models, plans and matrices");
}

#[test]
fn acceptance_11_normalization_golden_suite() {
    // every replacement-table row, bit-exact
    let config = NormalizationConfig::default();
    let fixtures: Vec<(String, &str)> = vec![
        ("\u{0623}".into(), "\u{0627}"), // Alif Hamza-above
        ("\u{0625}".into(), "\u{0627}"), // Alif Hamza-below
        ("\u{0622}".into(), "\u{0627}"), // Alif Madda
        ("\u{0671}".into(), "\u{0627}"), // Alif Wasla
        ("\u{0660}".into(), "0"),
        ("\u{0661}".into(), "1"),
        ("\u{0662}".into(), "2"),
        ("\u{0663}".into(), "3"),
        ("\u{0664}".into(), "4"),
        ("\u{0665}".into(), "5"),
        ("\u{0666}".into(), "6"),
        ("\u{0667}".into(), "7"),
        ("\u{0668}".into(), "8"),
        ("\u{0669}".into(), "9"),
        ("\u{066B}".into(), "."), // decimal separator
        ("\u{066C}".into(), ","), // thousands separator
        ("\u{061F}".into(), "?"),
        ("\u{061B}".into(), ";"),
        ("\u{060C}".into(), ","),
        ("\u{0640}".into(), ""), // Tatweel removed
    ];
    for (input, expected) in &fixtures {
        assert_eq!(&normalize(input, &config), expected, "fixture {input:?}");
    }
    // harakat deletions
    for code in 0x064B..=0x0652u32 {
        let input = char::from_u32(code).unwrap().to_string();
        assert_eq!(normalize(&input, &config), "", "harakat U+{code:04X}");
    }
    assert_eq!(normalize("\u{0670}", &config), "");
    // the rule table carries exactly these sources
    let table = build_rule_table(&config);
    assert_eq!(table.len(), fixtures.len() + 8 + 1);

    // idempotence over 100,000 random strings across configs
    let configs = [
        NormalizationConfig::default(),
        NormalizationConfig::disabled(),
        NormalizationConfig {
            alif_mode: AlifMode::Preserve4,
            ..NormalizationConfig::default()
        },
        keep_norm(),
    ];
    let mut rng = Rng(0xACCE_0011);
    let arabic_pool: Vec<char> = (0x0600..=0x06FF)
        .chain(0xFB50..=0xFBC1)
        .chain(0xFE70..=0xFEFC)
        .filter_map(char::from_u32)
        .collect();
    for case in 0..100_000u32 {
        let config = &configs[(case as usize) % configs.len()];
        let len = rng.below(48);
        let text: String = (0..len)
            .map(|_| {
                if rng.chance(0.6) {
                    arabic_pool[rng.below(arabic_pool.len())]
                } else if rng.chance(0.5) {
                    char::from_u32(0x20 + rng.below(0x5F) as u32).unwrap()
                } else {
                    // arbitrary scalar values
                    loop {
                        let v = rng.next_u64() as u32 % 0x110000;
                        if let Some(c) = char::from_u32(v) {
                            break c;
                        }
                    }
                }
            })
            .collect();
        let once = normalize(&text, config);
        let twice = normalize(&once, config);
        assert_eq!(once, twice, "idempotence violated for {text:?}");
    }
    println!(
        "criterion 11 (normalization golden suite): PASS {} table fixtures + 100000 idempotence cases",
        fixtures.len() + 9
    );
}
