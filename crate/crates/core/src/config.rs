use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::selection::SelectionConfig;
use crate::textprep::{Language, StemmerKind};

/// Engine settings, usually read from a TOML file.
///
/// Relative paths in a file are resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub max_terms: usize,
    pub c3_threshold: f64,
    pub c4_threshold: f64,
    pub stemmer: StemmerKind,
    pub enable_c5: bool,
    pub language: Language,
    pub fold_accents: bool,
    /// Stop-word list; the built-in list for `language` when unset.
    pub stop_words: Option<PathBuf>,
    /// Negation cues; the built-in list for `language` when unset.
    pub negation_lexicon: Option<PathBuf>,
    pub synonym_lexicon: Option<PathBuf>,
    /// Generate noun/adjective pseudo terms from the built-in pairs.
    pub generate_variants: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_terms: 6,
            c3_threshold: 0.5,
            c4_threshold: 3.0,
            stemmer: StemmerKind::Light,
            enable_c5: false,
            language: Language::Italian,
            fold_accents: false,
            stop_words: None,
            negation_lexicon: None,
            synonym_lexicon: None,
            generate_variants: false,
        }
    }
}

impl EngineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: EngineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(dir) = path.parent() {
            for p in [
                &mut config.stop_words,
                &mut config.negation_lexicon,
                &mut config.synonym_lexicon,
            ]
            .into_iter()
            .flatten()
            {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        if !(self.c3_threshold.is_finite() && self.c4_threshold.is_finite()) {
            return Err(Error::Config("thresholds must be finite".into()));
        }
        Ok(())
    }

    pub fn selection(&self) -> SelectionConfig {
        SelectionConfig {
            c3_threshold: self.c3_threshold,
            c4_threshold: self.c4_threshold,
            enable_c5: self.enable_c5,
        }
    }
}
