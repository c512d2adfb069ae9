//! Character-level Arabic normalization.
//!
//! The pipeline applies NFKC first, then a flat character replacement table
//! covering Alif variants, Arabic-Indic numerals, Arabic punctuation, Tatweel
//! and (optionally) the harakat block. Rule families have disjoint source
//! sets, so a single left-to-right pass applies them all; no rule output is
//! ever re-matched by another rule.
//!
//! `normalize` runs the NFKC + table pass to a fixed point. A second pass is
//! needed only for pathological inputs where a replacement strands a combining
//! mark next to a letter NFKC would re-compose (e.g. bare Alif followed by a
//! combining Hamza); running to the fixed point makes normalization idempotent
//! for every input, not just well-formed text.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use unicode_normalization::{is_nfkc_quick, IsNormalized, UnicodeNormalization};

use crate::error::{Error, Result};

/// Bare Alif, the target of Alif unification.
pub const BARE_ALIF: char = '\u{0627}';

/// The four Alif variants collapsed by [`AlifMode::Unify`]:
/// Madda, Hamza-above, Hamza-below, Wasla.
pub const ALIF_VARIANTS: [char; 4] = ['\u{0622}', '\u{0623}', '\u{0625}', '\u{0671}'];

/// Tatweel (kashida), the elongation filler character.
pub const TATWEEL: char = '\u{0640}';

/// Superscript Alef, removed together with the harakat block.
pub const SUPERSCRIPT_ALEF: char = '\u{0670}';

/// Harakat block removed when diacritics are dropped: Fathatan through Sukun.
pub const HARAKAT_RANGE: (char, char) = ('\u{064B}', '\u{0652}');

/// How Alif variants are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlifMode {
    /// Collapse Madda, Hamza-above, Hamza-below and Wasla to bare Alif.
    #[default]
    Unify,
    /// Keep all four variants distinct.
    Preserve4,
}

/// How diacritical marks (harakat) are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiacriticsMode {
    /// Delete the harakat block and superscript Alef.
    #[default]
    Drop,
    /// Keep vowel marks.
    Keep,
}

/// Which rule families the normalizer applies. All fields are independent;
/// any combination is valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationConfig {
    pub alif_mode: AlifMode,
    pub diacritics: DiacriticsMode,
    /// Map Arabic-Indic digits (and the decimal/thousands separators) to
    /// their Western equivalents.
    pub map_numerals: bool,
    /// Map Arabic question mark, semicolon and comma to Latin.
    pub map_punctuation: bool,
    pub remove_tatweel: bool,
    pub apply_nfkc: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        Self {
            alif_mode: AlifMode::Unify,
            diacritics: DiacriticsMode::Drop,
            map_numerals: true,
            map_punctuation: true,
            remove_tatweel: true,
            apply_nfkc: true,
        }
    }
}

impl NormalizationConfig {
    /// A config with every rule family disabled: NFKC off, Alif preserved,
    /// diacritics kept. `normalize` is then the identity function.
    pub fn disabled() -> Self {
        Self {
            alif_mode: AlifMode::Preserve4,
            diacritics: DiacriticsMode::Keep,
            map_numerals: false,
            map_punctuation: false,
            remove_tatweel: false,
            apply_nfkc: false,
        }
    }

    /// Serialize as a flat `key = value` file, one key per line.
    pub fn to_kv_string(&self) -> String {
        let alif = match self.alif_mode {
            AlifMode::Unify => "unify",
            AlifMode::Preserve4 => "preserve4",
        };
        let diac = match self.diacritics {
            DiacriticsMode::Drop => "drop",
            DiacriticsMode::Keep => "keep",
        };
        format!(
            "alif_mode = {alif}\n\
             diacritics = {diac}\n\
             map_numerals = {}\n\
             map_punctuation = {}\n\
             remove_tatweel = {}\n\
             apply_nfkc = {}\n",
            self.map_numerals, self.map_punctuation, self.remove_tatweel, self.apply_nfkc
        )
    }

    /// Parse the flat `key = value` format written by [`to_kv_string`].
    /// Blank lines and `#` comments are ignored; unknown keys are rejected.
    ///
    /// [`to_kv_string`]: NormalizationConfig::to_kv_string
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "normalization config",
                line: idx as u64 + 1,
                detail: format!("expected `key = value`, got {line:?}"),
            })?;
            config
                .set_key(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    what: "normalization config",
                    line: idx as u64 + 1,
                    detail: e.to_string(),
                })?;
        }
        Ok(config)
    }

    /// Set one field by its config-file key. Used by the file, environment
    /// and flag layers of the CLI.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse_bool(value: &str) -> Result<bool> {
            match value {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(Error::Config(format!(
                    "expected true or false, got {other:?}"
                ))),
            }
        }
        match key {
            "alif_mode" => {
                self.alif_mode = match value {
                    "unify" => AlifMode::Unify,
                    "preserve4" => AlifMode::Preserve4,
                    other => {
                        return Err(Error::Config(format!(
                            "alif_mode must be unify or preserve4, got {other:?}"
                        )))
                    }
                }
            }
            "diacritics" => {
                self.diacritics = match value {
                    "drop" => DiacriticsMode::Drop,
                    "keep" => DiacriticsMode::Keep,
                    other => {
                        return Err(Error::Config(format!(
                            "diacritics must be drop or keep, got {other:?}"
                        )))
                    }
                }
            }
            "map_numerals" => self.map_numerals = parse_bool(value)?,
            "map_punctuation" => self.map_punctuation = parse_bool(value)?,
            "remove_tatweel" => self.remove_tatweel = parse_bool(value)?,
            "apply_nfkc" => self.apply_nfkc = parse_bool(value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }
}

/// An ordered character replacement table. Replacements may be empty
/// (deletion). Applying the table is a single left-to-right pass over
/// codepoints; sources never appear in any replacement, so the pass cannot
/// cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleTable {
    rules: Vec<(char, String)>,
    lookup: HashMap<char, String>,
}

impl RuleTable {
    fn from_rules(rules: Vec<(char, String)>) -> Self {
        let lookup = rules.iter().cloned().collect::<HashMap<_, _>>();
        debug_assert_eq!(lookup.len(), rules.len(), "duplicate rule source");
        Self { rules, lookup }
    }

    /// The rules in application order.
    pub fn rules(&self) -> &[(char, String)] {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    /// Replacement for `c`, if any rule matches it.
    pub fn replacement(&self, c: char) -> Option<&str> {
        self.lookup.get(&c).map(String::as_str)
    }

    /// One left-to-right pass over `text`.
    pub fn apply(&self, text: &str) -> String {
        if self.rules.is_empty() {
            return text.to_string();
        }
        let mut out = String::with_capacity(text.len());
        for c in text.chars() {
            match self.lookup.get(&c) {
                Some(replacement) => out.push_str(replacement),
                None => out.push(c),
            }
        }
        out
    }
}

/// Build the replacement table for `config`. Rule families appear in a fixed
/// order: Alif variants, numerals, punctuation, Tatweel, diacritics. The
/// families have disjoint sources, so the order only fixes the table layout.
pub fn build_rule_table(config: &NormalizationConfig) -> RuleTable {
    let mut rules: Vec<(char, String)> = Vec::new();
    if config.alif_mode == AlifMode::Unify {
        for &variant in &ALIF_VARIANTS {
            rules.push((variant, BARE_ALIF.to_string()));
        }
    }
    if config.map_numerals {
        for offset in 0..10u32 {
            let source = char::from_u32(0x0660 + offset).unwrap();
            let digit = char::from_u32('0' as u32 + offset).unwrap();
            rules.push((source, digit.to_string()));
        }
        rules.push(('\u{066B}', ".".to_string()));
        rules.push(('\u{066C}', ",".to_string()));
    }
    if config.map_punctuation {
        rules.push(('\u{061F}', "?".to_string()));
        rules.push(('\u{061B}', ";".to_string()));
        rules.push(('\u{060C}', ",".to_string()));
    }
    if config.remove_tatweel {
        rules.push((TATWEEL, String::new()));
    }
    if config.diacritics == DiacriticsMode::Drop {
        let (start, end) = HARAKAT_RANGE;
        for code in start as u32..=end as u32 {
            rules.push((char::from_u32(code).unwrap(), String::new()));
        }
        rules.push((SUPERSCRIPT_ALEF, String::new()));
    }
    RuleTable::from_rules(rules)
}

/// A reusable normalizer: the rule table is built once and shared. Pure and
/// safe for concurrent callers.
#[derive(Debug, Clone)]
pub struct Normalizer {
    table: RuleTable,
    apply_nfkc: bool,
    config: NormalizationConfig,
}

impl Normalizer {
    pub fn new(config: NormalizationConfig) -> Self {
        Self {
            table: build_rule_table(&config),
            apply_nfkc: config.apply_nfkc,
            config,
        }
    }

    pub fn config(&self) -> &NormalizationConfig {
        &self.config
    }

    pub fn table(&self) -> &RuleTable {
        &self.table
    }

    fn nfkc(&self, text: &str) -> Option<String> {
        if !self.apply_nfkc {
            return None;
        }
        match is_nfkc_quick(text.chars()) {
            IsNormalized::Yes => None,
            _ => Some(text.nfkc().collect()),
        }
    }

    fn pass(&self, text: &str) -> String {
        match self.nfkc(text) {
            Some(normalized) => self.table.apply(&normalized),
            None => self.table.apply(text),
        }
    }

    /// Normalize `text`: NFKC (when enabled) followed by the rule-table pass,
    /// iterated to a fixed point. Total function; non-Arabic text passes
    /// through unchanged except for NFKC.
    pub fn normalize(&self, text: &str) -> String {
        let mut current = self.pass(text);
        if current == text {
            return current;
        }
        // Deletions can strand a combining mark that NFKC re-composes into a
        // rule source; each extra pass strictly shortens the string, so this
        // terminates. Ordinary text converges on the first pass.
        for _ in 0..16 {
            let next = self.pass(&current);
            if next == current {
                break;
            }
            current = next;
        }
        current
    }
}

/// One-shot normalization. Builds the rule table on each call; use
/// [`Normalizer`] when processing many strings under one config.
pub fn normalize(text: &str, config: &NormalizationConfig) -> String {
    Normalizer::new(*config).normalize(text)
}
