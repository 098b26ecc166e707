//! Text preprocessing: tokenization, stop-word removal, stemming and
//! negation cues.
//!
//! The same [`Normalizer`] is applied to dictionary terms and to narrative
//! descriptions, so that exact matching between the two is well defined.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Language of the built-in resources (stop words, negation cues, snowball
/// algorithm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    #[serde(alias = "it")]
    Italian,
    #[serde(alias = "en")]
    English,
}

/// A token cut from the original text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawToken {
    pub surface: String,
    /// `[start, end)` in chars of the original string.
    pub char_span: (usize, usize),
}

/// Lowercases, splits on anything that is not alphanumeric and optionally
/// folds diacritics away.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Normalizer {
    pub fold_accents: bool,
}

impl Normalizer {
    pub fn new(fold_accents: bool) -> Self {
        Normalizer { fold_accents }
    }

    pub fn tokenize(&self, text: &str) -> Vec<RawToken> {
        let mut tokens = Vec::new();
        let mut current = String::new();
        let mut start = 0;
        let mut pos = 0;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if current.is_empty() {
                    start = pos;
                }
                current.extend(c.to_lowercase());
            } else if !current.is_empty() {
                tokens.push(self.finish(&mut current, (start, pos)));
            }
            pos += 1;
        }
        if !current.is_empty() {
            tokens.push(self.finish(&mut current, (start, pos)));
        }
        tokens
    }

    /// Space-joined tokens of `text`.
    pub fn normalize(&self, text: &str) -> String {
        self.tokenize(text)
            .into_iter()
            .map(|t| t.surface)
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn finish(&self, current: &mut String, char_span: (usize, usize)) -> RawToken {
        let word = std::mem::take(current);
        let surface = if self.fold_accents {
            fold_diacritics(&word)
        } else {
            word
        };
        RawToken { surface, char_span }
    }
}

fn fold_diacritics(word: &str) -> String {
    word.nfd().filter(|c| !is_combining_mark(*c)).collect()
}

/// Tokenizes with the default normalizer (diacritics kept distinct).
pub fn tokenize(text: &str) -> Vec<RawToken> {
    Normalizer::default().tokenize(text)
}

/// Reads a one-word-per-line list; `#` starts a comment.
fn read_word_list(path: &Path, normalizer: &Normalizer) -> Result<HashSet<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_word_list(&text, normalizer))
}

fn parse_word_list(text: &str, normalizer: &Normalizer) -> HashSet<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or(""))
        .flat_map(|line| normalizer.tokenize(line))
        .map(|t| t.surface)
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn empty() -> Self {
        StopWords::default()
    }

    pub fn builtin(language: Language) -> Self {
        Self::builtin_with(language, &Normalizer::default())
    }

    pub fn builtin_with(language: Language, normalizer: &Normalizer) -> Self {
        let text = match language {
            Language::Italian => include_str!("../data/stopwords_it.txt"),
            Language::English => include_str!("../data/stopwords_en.txt"),
        };
        StopWords(parse_word_list(text, normalizer))
    }

    pub fn from_file(path: impl AsRef<Path>, normalizer: &Normalizer) -> Result<Self> {
        read_word_list(path.as_ref(), normalizer).map(StopWords)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        StopWords(iter.into_iter().map(Into::into).collect())
    }
}

/// Keeps the non-stop-word tokens in their original order.
pub fn remove_stop_words(tokens: Vec<RawToken>, stop_words: &StopWords) -> Vec<RawToken> {
    tokens
        .into_iter()
        .filter(|t| !stop_words.contains(&t.surface))
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NegationLexicon(HashSet<String>);

impl NegationLexicon {
    pub fn builtin(language: Language) -> Self {
        let text = match language {
            Language::Italian => include_str!("../data/negation_it.txt"),
            Language::English => include_str!("../data/negation_en.txt"),
        };
        NegationLexicon(parse_word_list(text, &Normalizer::default()))
    }

    pub fn from_file(path: impl AsRef<Path>, normalizer: &Normalizer) -> Result<Self> {
        read_word_list(path.as_ref(), normalizer).map(NegationLexicon)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }
}

impl<S: Into<String>> FromIterator<S> for NegationLexicon {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        NegationLexicon(iter.into_iter().map(Into::into).collect())
    }
}

pub trait Stemmer: Send + Sync + fmt::Debug {
    fn stem(&self, word: &str) -> String;
}

const VOWELS: &[char] = &[
    'a', 'e', 'i', 'o', 'u', 'à', 'á', 'â', 'ä', 'è', 'é', 'ê', 'ë', 'ì', 'í', 'î', 'ï', 'ò', 'ó',
    'ô', 'ö', 'ù', 'ú', 'û', 'ü',
];

/// Elides final vowels, never going below two characters.
#[derive(Debug, Clone, Copy, Default)]
pub struct LightStemmer;

impl Stemmer for LightStemmer {
    fn stem(&self, word: &str) -> String {
        let mut chars: Vec<char> = word.chars().collect();
        while chars.len() > 2 && chars.last().is_some_and(|c| VOWELS.contains(c)) {
            chars.pop();
        }
        chars.into_iter().collect()
    }
}

/// Snowball stemmer: suffix-stripping that also conflates some adjectival and
/// noun forms, at the price of splitting some inflections apart.
pub struct SnowballStemmer {
    inner: rust_stemmers::Stemmer,
    language: Language,
}

impl SnowballStemmer {
    pub fn new(language: Language) -> Self {
        let algorithm = match language {
            Language::Italian => rust_stemmers::Algorithm::Italian,
            Language::English => rust_stemmers::Algorithm::English,
        };
        SnowballStemmer {
            inner: rust_stemmers::Stemmer::create(algorithm),
            language,
        }
    }
}

impl fmt::Debug for SnowballStemmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SnowballStemmer")
            .field("language", &self.language)
            .finish()
    }
}

impl Stemmer for SnowballStemmer {
    fn stem(&self, word: &str) -> String {
        let stem = self.inner.stem(word);
        if stem.is_empty() {
            word.to_string()
        } else {
            stem.into_owned()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerKind {
    #[default]
    Light,
    Aggressive,
}

impl StemmerKind {
    pub fn build(self, language: Language) -> Arc<dyn Stemmer> {
        match self {
            StemmerKind::Light => Arc::new(LightStemmer),
            StemmerKind::Aggressive => Arc::new(SnowballStemmer::new(language)),
        }
    }
}

impl std::str::FromStr for StemmerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "light" => Ok(StemmerKind::Light),
            "aggressive" => Ok(StemmerKind::Aggressive),
            other => Err(Error::Config(format!("unknown stemmer {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanToken {
    /// Position among the kept tokens.
    pub index: usize,
    pub surface: String,
    pub stem: String,
    pub char_span: (usize, usize),
}

/// A word that may negate what follows it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegationCue {
    /// Position in the token stream before stop-word removal.
    pub raw_index: usize,
    pub surface: String,
    pub char_span: (usize, usize),
}

/// A description reduced to the array of content words the voting scan reads.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanText {
    pub tokens: Vec<CleanToken>,
    pub negations: Vec<NegationCue>,
}

impl CleanText {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn negation_indexes(&self) -> Vec<usize> {
        self.negations.iter().map(|n| n.raw_index).collect()
    }

    pub fn has_negation(&self) -> bool {
        !self.negations.is_empty()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.surface.as_str())
    }
}

/// Bundles everything needed to turn a description into a [`CleanText`].
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub normalizer: Normalizer,
    pub stop_words: StopWords,
    pub stemmer: Arc<dyn Stemmer>,
    pub negation: NegationLexicon,
}

impl Preprocessor {
    pub fn new(stop_words: StopWords, stemmer: Arc<dyn Stemmer>) -> Self {
        Preprocessor {
            normalizer: Normalizer::default(),
            stop_words,
            stemmer,
            negation: NegationLexicon::default(),
        }
    }

    pub fn with_negation(mut self, negation: NegationLexicon) -> Self {
        self.negation = negation;
        self
    }

    pub fn with_normalizer(mut self, normalizer: Normalizer) -> Self {
        self.normalizer = normalizer;
        self
    }

    pub fn preprocess(&self, text: &str) -> CleanText {
        let raw = self.normalizer.tokenize(text);
        // Negation cues are looked up before stop-word removal: "non" and
        // "senza" are usually stop words themselves.
        let negations = raw
            .iter()
            .enumerate()
            .filter(|(_, t)| self.negation.contains(&t.surface))
            .map(|(raw_index, t)| NegationCue {
                raw_index,
                surface: t.surface.clone(),
                char_span: t.char_span,
            })
            .collect();
        let tokens = remove_stop_words(raw, &self.stop_words)
            .into_iter()
            .enumerate()
            .map(|(index, t)| CleanToken {
                index,
                stem: self.stemmer.stem(&t.surface),
                surface: t.surface,
                char_span: t.char_span,
            })
            .collect();
        CleanText { tokens, negations }
    }
}

/// One-shot preprocessing with the default normalizer and no negation lexicon.
pub fn preprocess(text: &str, stop_words: &StopWords, stemmer: &dyn Stemmer) -> CleanText {
    let tokens = remove_stop_words(tokenize(text), stop_words)
        .into_iter()
        .enumerate()
        .map(|(index, t)| CleanToken {
            index,
            stem: stemmer.stem(&t.surface),
            surface: t.surface,
            char_span: t.char_span,
        })
        .collect();
    CleanText {
        tokens,
        negations: Vec::new(),
    }
}
