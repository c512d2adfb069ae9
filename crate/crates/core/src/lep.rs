//! The model-free portion of the language-extension pipeline: select which
//! tokenizer entries extend a base vocabulary, initialize their embedding
//! rows as the mean of their base-tokenizer subtoken embeddings, and emit the
//! gradient-masking/unfreezing plan a training harness needs.
//!
//! The gradient mask is a pure matrix transform; the contract for training
//! frameworks is: apply it to the embedding-gradient buffer after backward,
//! before the optimizer step, with the threshold set to the original
//! vocabulary size. Rows below the threshold stay frozen, rows above train.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{TokenizerModel, BOUNDARY_MARKER};

/// Layers unfrozen by default: the final four of a 28-layer stack.
pub const DEFAULT_UNFROZEN_LAYERS: [u32; 4] = [24, 25, 26, 27];

const ARTE_MAGIC: &[u8; 4] = b"ARTE";
const ARTE_VERSION: u32 = 1;

/// Dense row-major embedding matrix; row `i` is the embedding of token id
/// `i`. Held in f64 so means and masks are exact to well below any file
/// round-off; the on-disk format is IEEE-754 binary32.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::Format(format!(
                "matrix data has {} values, expected {rows}x{dim}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("matrix contains non-finite values".into()));
        }
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Serialize in the ARTE format: magic `ARTE`, u32 LE version, u64 LE
    /// rows, u64 LE dim, then rows×dim binary32 LE values row-major, no
    /// padding.
    pub fn write_arte<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(ARTE_MAGIC)?;
        writer.write_all(&ARTE_VERSION.to_le_bytes())?;
        writer.write_all(&(self.rows as u64).to_le_bytes())?;
        writer.write_all(&(self.dim as u64).to_le_bytes())?;
        for &value in &self.data {
            writer.write_all(&(value as f32).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_arte_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(24 + self.data.len() * 4);
        self.write_arte(&mut bytes).expect("in-memory write");
        bytes
    }

    pub fn read_arte<R: Read>(mut reader: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        reader.read_exact(&mut magic)?;
        if &magic != ARTE_MAGIC {
            return Err(Error::Format(format!(
                "bad magic {magic:?}, expected \"ARTE\""
            )));
        }
        let mut word = [0u8; 4];
        reader.read_exact(&mut word)?;
        let version = u32::from_le_bytes(word);
        if version != ARTE_VERSION {
            return Err(Error::Format(format!(
                "unsupported ARTE version {version}"
            )));
        }
        let mut quad = [0u8; 8];
        reader.read_exact(&mut quad)?;
        let rows = u64::from_le_bytes(quad) as usize;
        reader.read_exact(&mut quad)?;
        let dim = u64::from_le_bytes(quad) as usize;
        let count = rows
            .checked_mul(dim)
            .ok_or_else(|| Error::Format("rows × dim overflows".into()))?;
        let mut data = Vec::with_capacity(count);
        let mut value = [0u8; 4];
        for _ in 0..count {
            reader.read_exact(&mut value)?;
            let v = f32::from_le_bytes(value);
            if !v.is_finite() {
                return Err(Error::Format("matrix contains non-finite values".into()));
            }
            data.push(v as f64);
        }
        if reader.read(&mut value)? != 0 {
            return Err(Error::Format("trailing bytes after matrix data".into()));
        }
        Self::new(rows, dim, data)
    }

    pub fn save_arte(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_arte(&mut file)?;
        Ok(())
    }

    pub fn load_arte(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_arte(file)
    }
}

/// Map from candidate token string to the base-tokenizer ids of its pieces.
/// Produced outside this toolkit for real base models (one line per token,
/// `token<TAB>id,id,id`); desk-scale maps can be generated with this crate's
/// own models.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubtokenMap {
    entries: BTreeMap<String, Vec<u32>>,
}

impl SubtokenMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: String, ids: Vec<u32>) -> Result<()> {
        if ids.is_empty() {
            return Err(Error::Format(format!("empty subtoken list for {token:?}")));
        }
        if self.entries.insert(token.clone(), ids).is_some() {
            return Err(Error::Format(format!("duplicate subtoken entry {token:?}")));
        }
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[u32]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse the tab-separated format. Blank lines and `#` comments are
    /// ignored.
    pub fn from_tsv_str(text: &str) -> Result<Self> {
        let mut map = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |detail: String| Error::Parse {
                what: "subtoken map",
                line: idx as u64 + 1,
                detail,
            };
            let (token, ids_text) = line
                .split_once('\t')
                .ok_or_else(|| parse_err("expected `token<TAB>id,id,...`".into()))?;
            if token.is_empty() {
                return Err(parse_err("empty token".into()));
            }
            let ids = ids_text
                .split(',')
                .map(|part| {
                    part.trim()
                        .parse::<u32>()
                        .map_err(|e| parse_err(format!("bad id {part:?}: {e}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            map.insert(token.to_string(), ids)
                .map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(map)
    }

    pub fn to_tsv_string(&self) -> String {
        let mut out = String::new();
        for (token, ids) in &self.entries {
            out.push_str(token);
            out.push('\t');
            let parts: Vec<String> = ids.iter().map(u32::to_string).collect();
            out.push_str(&parts.join(","));
            out.push('\n');
        }
        out
    }

    pub fn load_tsv(path: &Path) -> Result<Self> {
        Self::from_tsv_str(&std::fs::read_to_string(path)?)
    }
}

/// Which codepoints disqualify a candidate token. Latin letters, ASCII
/// digits and the Cyrillic block are always rejected; the punctuation set
/// defaults to ASCII punctuation and can be replaced from a filter file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenFilter {
    punctuation: HashSet<char>,
}

impl Default for TokenFilter {
    fn default() -> Self {
        Self {
            punctuation: r##"!"#$%&'()*+,-./:;<=>?@[\]^_`{|}~"##.chars().collect(),
        }
    }
}

impl TokenFilter {
    /// Replace the punctuation set from a filter file: one entry per line,
    /// either a literal character, `U+XXXX`, or a range `U+XXXX..U+YYYY`.
    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut punctuation = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |detail: String| Error::Parse {
                what: "token filter",
                line: idx as u64 + 1,
                detail,
            };
            let parse_codepoint = |s: &str| -> Result<char> {
                let hex = s
                    .strip_prefix("U+")
                    .ok_or_else(|| parse_err(format!("expected U+XXXX, got {s:?}")))?;
                let code = u32::from_str_radix(hex, 16)
                    .map_err(|e| parse_err(format!("bad codepoint {s:?}: {e}")))?;
                char::from_u32(code)
                    .ok_or_else(|| parse_err(format!("U+{code:04X} is not a scalar value")))
            };
            if let Some((start, end)) = line.split_once("..") {
                let start = parse_codepoint(start.trim())?;
                let end = parse_codepoint(end.trim())?;
                if start > end {
                    return Err(parse_err(format!("empty range {line:?}")));
                }
                for code in start as u32..=end as u32 {
                    if let Some(c) = char::from_u32(code) {
                        punctuation.insert(c);
                    }
                }
            } else if line.starts_with("U+") {
                punctuation.insert(parse_codepoint(line)?);
            } else {
                let mut chars = line.chars();
                let c = chars.next().ok_or_else(|| parse_err("empty entry".into()))?;
                if chars.next().is_some() {
                    return Err(parse_err(format!(
                        "expected a single character, got {line:?}"
                    )));
                }
                punctuation.insert(c);
            }
        }
        Ok(Self { punctuation })
    }

    pub fn rejects(&self, token: &str) -> bool {
        token.chars().any(|c| {
            c.is_ascii_alphabetic()
                || c.is_ascii_digit()
                || ('\u{0400}'..='\u{04FF}').contains(&c)
                || self.punctuation.contains(&c)
        })
    }
}

/// One vocabulary extension entry: the token string (boundary marker
/// stripped) and whether it was word-initial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewToken {
    pub token: String,
    pub lstrip: bool,
}

/// Walk the tokenizer vocabulary in id order and keep tokens suitable for
/// extending a base vocabulary: specials are skipped, the boundary marker is
/// stripped (recording `lstrip`), tokens containing Latin letters, digits,
/// Cyrillic or punctuation are rejected, and anything already present in the
/// base vocabulary (or appearing twice after marker stripping) is dropped.
pub fn select_extension_tokens(
    arabic_model: &TokenizerModel,
    base_vocab: &HashSet<String>,
    filter: &TokenFilter,
) -> Vec<NewToken> {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut selected = Vec::new();
    for token in &arabic_model.vocab {
        if arabic_model.is_special(token) {
            continue;
        }
        let (stripped, lstrip) = match token.strip_prefix(BOUNDARY_MARKER) {
            Some(rest) => (rest, true),
            None => (token.as_str(), false),
        };
        if stripped.is_empty() || filter.rejects(stripped) {
            continue;
        }
        if base_vocab.contains(stripped) || !seen.insert(stripped) {
            continue;
        }
        selected.push(NewToken {
            token: stripped.to_string(),
            lstrip,
        });
    }
    selected
}

/// Initialize one embedding row per token as the arithmetic mean of its
/// subtoken rows in the base matrix.
pub fn mean_subtoken_init(
    base: &EmbeddingMatrix,
    submap: &SubtokenMap,
    tokens: &[NewToken],
) -> Result<EmbeddingMatrix> {
    let mut out = EmbeddingMatrix::zeros(tokens.len(), base.dim());
    for (row_idx, entry) in tokens.iter().enumerate() {
        let ids = submap
            .get(&entry.token)
            .ok_or_else(|| Error::MissingSubtokens(entry.token.clone()))?;
        if ids.is_empty() {
            return Err(Error::MissingSubtokens(entry.token.clone()));
        }
        for &id in ids {
            if id as usize >= base.rows() {
                return Err(Error::SubtokenIdOutOfRange {
                    token: entry.token.clone(),
                    id,
                    rows: base.rows(),
                });
            }
        }
        let scale = 1.0 / ids.len() as f64;
        let row = out.row_mut(row_idx);
        for &id in ids {
            for (acc, &value) in row.iter_mut().zip(base.row(id as usize)) {
                *acc += value;
            }
        }
        for value in row.iter_mut() {
            *value *= scale;
        }
    }
    Ok(out)
}

/// Zero the gradient rows of all original-vocabulary ids: rows below
/// `threshold` become exactly zero, rows at or above it are bit-identical to
/// the input.
pub fn mask_gradients(grad: &EmbeddingMatrix, threshold: usize) -> Result<EmbeddingMatrix> {
    if threshold > grad.rows() {
        return Err(Error::ThresholdOutOfRange {
            threshold,
            rows: grad.rows(),
        });
    }
    let mut out = grad.clone();
    out.data[..threshold * grad.dim()].fill(0.0);
    Ok(out)
}

/// The complete hand-off bundle for a training harness.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionPlan {
    pub new_tokens: Vec<NewToken>,
    /// Original vocabulary size; the gradient-mask threshold.
    pub freeze_threshold: usize,
    pub unfrozen_layers: Vec<u32>,
    pub initialized_rows: EmbeddingMatrix,
}

/// `plan.json` layout; the matrix lives in a sibling ARTE file.
#[derive(Serialize, Deserialize)]
struct PlanFile {
    new_tokens: Vec<NewToken>,
    freeze_threshold: usize,
    unfrozen_layers: Vec<u32>,
    rows_file: String,
}

impl ExtensionPlan {
    /// Select tokens, initialize their rows, and record the freeze/unfreeze
    /// plan. `freeze_threshold` is the base matrix's row count.
    pub fn build(
        arabic_model: &TokenizerModel,
        base_vocab: &HashSet<String>,
        base: &EmbeddingMatrix,
        submap: &SubtokenMap,
        filter: &TokenFilter,
        unfrozen_layers: &[u32],
    ) -> Result<Self> {
        let new_tokens = select_extension_tokens(arabic_model, base_vocab, filter);
        let initialized_rows = mean_subtoken_init(base, submap, &new_tokens)?;
        Ok(Self {
            new_tokens,
            freeze_threshold: base.rows(),
            unfrozen_layers: unfrozen_layers.to_vec(),
            initialized_rows,
        })
    }

    /// Write `plan.json` and `init_rows.arte` into `dir`. Output bytes are a
    /// pure function of the plan.
    pub fn save_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let rows_file = "init_rows.arte";
        let file = PlanFile {
            new_tokens: self.new_tokens.clone(),
            freeze_threshold: self.freeze_threshold,
            unfrozen_layers: self.unfrozen_layers.clone(),
            rows_file: rows_file.to_string(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("plan serializes");
        text.push('\n');
        std::fs::write(dir.join("plan.json"), text)?;
        self.initialized_rows.save_arte(&dir.join(rows_file))?;
        Ok(())
    }

    pub fn load_dir(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("plan.json"))?;
        let file: PlanFile = serde_json::from_str(&text)?;
        let initialized_rows = EmbeddingMatrix::load_arte(&dir.join(&file.rows_file))?;
        if initialized_rows.rows() != file.new_tokens.len() {
            return Err(Error::Format(format!(
                "plan lists {} tokens but the matrix has {} rows",
                file.new_tokens.len(),
                initialized_rows.rows()
            )));
        }
        Ok(Self {
            new_tokens: file.new_tokens,
            freeze_threshold: file.freeze_threshold,
            unfrozen_layers: file.unfrozen_layers,
            initialized_rows,
        })
    }
}
