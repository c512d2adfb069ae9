//! Normalization options resolved in layers: built-in defaults, then the
//! config file (`--config` or `$ARATOK_CONFIG`), then per-key `ARATOK_*`
//! environment variables, then explicit flags. Conflicting flag pairs are
//! rejected by clap.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use aratok::normalizer::{AlifMode, DiacriticsMode, NormalizationConfig};

#[derive(Debug, Clone, Args)]
pub struct NormFlags {
    /// Collapse the four Alif variants to bare Alif
    #[arg(long, global = true, conflicts_with = "preserve_alif4")]
    pub unify_alif: bool,
    /// Keep the four Alif variants distinct (the Alif4 configuration)
    #[arg(long, global = true)]
    pub preserve_alif4: bool,
    /// Remove harakat and superscript Alef
    #[arg(long, global = true, conflicts_with = "keep_diacritics")]
    pub drop_diacritics: bool,
    /// Keep vowel marks
    #[arg(long, global = true)]
    pub keep_diacritics: bool,
    /// Map Arabic-Indic digits and separators to Western
    #[arg(long, global = true, conflicts_with = "no_numerals")]
    pub numerals: bool,
    #[arg(long, global = true)]
    pub no_numerals: bool,
    /// Map Arabic question mark, semicolon and comma to Latin
    #[arg(long, global = true, conflicts_with = "no_punctuation")]
    pub punctuation: bool,
    #[arg(long, global = true)]
    pub no_punctuation: bool,
    /// Delete the Tatweel elongation character
    #[arg(long, global = true, conflicts_with = "keep_tatweel")]
    pub remove_tatweel: bool,
    #[arg(long, global = true)]
    pub keep_tatweel: bool,
    /// Apply NFKC Unicode normalization first
    #[arg(long, global = true, conflicts_with = "no_nfkc")]
    pub nfkc: bool,
    #[arg(long, global = true)]
    pub no_nfkc: bool,
    /// Disable every rule family (shorthand for a pass-through config)
    #[arg(long, global = true)]
    pub no_normalization: bool,
}

const ENV_KEYS: [(&str, &str); 6] = [
    ("ARATOK_ALIF_MODE", "alif_mode"),
    ("ARATOK_DIACRITICS", "diacritics"),
    ("ARATOK_MAP_NUMERALS", "map_numerals"),
    ("ARATOK_MAP_PUNCTUATION", "map_punctuation"),
    ("ARATOK_REMOVE_TATWEEL", "remove_tatweel"),
    ("ARATOK_APPLY_NFKC", "apply_nfkc"),
];

impl NormFlags {
    /// Resolve the effective config: defaults < file < env < flags.
    pub fn resolve(&self, config_path: Option<&PathBuf>) -> Result<NormalizationConfig> {
        let mut config = NormalizationConfig::default();

        let file = match config_path {
            Some(path) => Some(path.clone()),
            None => std::env::var_os("ARATOK_CONFIG").map(PathBuf::from),
        };
        if let Some(path) = file {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            config = NormalizationConfig::from_kv_str(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?;
        }

        for (env_key, config_key) in ENV_KEYS {
            if let Ok(value) = std::env::var(env_key) {
                config
                    .set_key(config_key, value.trim())
                    .with_context(|| format!("applying {env_key}"))?;
            }
        }

        if self.no_normalization {
            config = NormalizationConfig::disabled();
        }
        if self.unify_alif {
            config.alif_mode = AlifMode::Unify;
        }
        if self.preserve_alif4 {
            config.alif_mode = AlifMode::Preserve4;
        }
        if self.drop_diacritics {
            config.diacritics = DiacriticsMode::Drop;
        }
        if self.keep_diacritics {
            config.diacritics = DiacriticsMode::Keep;
        }
        if self.numerals {
            config.map_numerals = true;
        }
        if self.no_numerals {
            config.map_numerals = false;
        }
        if self.punctuation {
            config.map_punctuation = true;
        }
        if self.no_punctuation {
            config.map_punctuation = false;
        }
        if self.remove_tatweel {
            config.remove_tatweel = true;
        }
        if self.keep_tatweel {
            config.remove_tatweel = false;
        }
        if self.nfkc {
            config.apply_nfkc = true;
        }
        if self.no_nfkc {
            config.apply_nfkc = false;
        }
        Ok(config)
    }
}
