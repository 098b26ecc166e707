//! Term store and the inverted word → term meta-dictionaries.

use std::collections::{HashMap, HashSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::csv_rows::read_rows;
use crate::error::{Error, Result};
use crate::textprep::{remove_stop_words, Normalizer, Stemmer, StopWords};

/// Dense handle of an entry inside a [`Terminology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermIdx(pub u32);

impl TermIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub hlt: Option<String>,
    pub hlgt: Option<String>,
    pub soc: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub llt_id: String,
    pub llt_text: String,
    /// Normalized, stop-word-free words in term order.
    pub words: Vec<String>,
    pub pt_id: String,
    pub pt_text: String,
    pub hierarchy: Hierarchy,
    /// Set on pseudo terms: the official entry they resolve to.
    pub pseudo_of: Option<TermIdx>,
}

impl TermEntry {
    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn normalized_text(&self) -> String {
        self.words.join(" ")
    }

    pub fn is_pseudo(&self) -> bool {
        self.pseudo_of.is_some()
    }
}

/// One row of the terminology CSV.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRow {
    pub llt_id: String,
    pub llt_text: String,
    /// Empty means the term is its own preferred term.
    #[serde(default)]
    pub pt_id: String,
    #[serde(default)]
    pub pt_text: String,
    #[serde(default)]
    pub hlt_text: Option<String>,
    #[serde(default)]
    pub hlgt_text: Option<String>,
    #[serde(default)]
    pub soc_text: Option<String>,
}

impl TermRow {
    pub fn new(llt_id: impl Into<String>, llt_text: impl Into<String>) -> Self {
        let llt_id = llt_id.into();
        let llt_text = llt_text.into();
        TermRow {
            pt_id: llt_id.clone(),
            pt_text: llt_text.clone(),
            llt_id,
            llt_text,
            ..TermRow::default()
        }
    }

    pub fn with_pt(mut self, pt_id: impl Into<String>, pt_text: impl Into<String>) -> Self {
        self.pt_id = pt_id.into();
        self.pt_text = pt_text.into();
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    /// Official terms (m).
    pub term_count: usize,
    /// Distinct words over official terms (m').
    pub distinct_words: usize,
    /// Longest term, in words (k).
    pub max_term_len: usize,
    pub pseudo_count: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Terminology {
    entries: Vec<TermEntry>,
    by_id: HashMap<String, TermIdx>,
    stats: TermStats,
    normalizer: Normalizer,
    stop_words: StopWords,
}

fn non_empty(s: Option<String>) -> Option<String> {
    s.map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

impl Terminology {
    pub fn new(stop_words: StopWords, normalizer: Normalizer) -> Self {
        Terminology {
            stop_words,
            normalizer,
            ..Terminology::default()
        }
    }

    /// Builds from in-memory rows; `line` in errors is the 1-based row number.
    pub fn from_rows(
        rows: impl IntoIterator<Item = TermRow>,
        stop_words: StopWords,
        normalizer: Normalizer,
    ) -> Result<Self> {
        let mut terminology = Terminology::new(stop_words, normalizer);
        for (i, row) in rows.into_iter().enumerate() {
            terminology.push_row(row, i as u64 + 1, Path::new("<memory>"))?;
        }
        terminology.recompute_stats();
        Ok(terminology)
    }

    pub fn from_csv_reader<R: Read>(
        reader: R,
        origin: &Path,
        stop_words: StopWords,
        normalizer: Normalizer,
    ) -> Result<Self> {
        let mut terminology = Terminology::new(stop_words, normalizer);
        for (line, row) in read_rows::<TermRow, _>(reader, origin)? {
            terminology.push_row(row, line, origin)?;
        }
        terminology.recompute_stats();
        Ok(terminology)
    }

    pub fn load(
        path: impl AsRef<Path>,
        stop_words: StopWords,
        normalizer: Normalizer,
    ) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(std::io::BufReader::new(file), path, stop_words, normalizer)
    }

    fn push_row(&mut self, mut row: TermRow, line: u64, origin: &Path) -> Result<TermIdx> {
        let parse_error = |message: String| Error::Parse {
            path: PathBuf::from(origin),
            line,
            message,
        };
        if row.llt_id.is_empty() {
            return Err(parse_error("empty llt_id".into()));
        }
        if self.by_id.contains_key(&row.llt_id) {
            return Err(Error::DuplicateTerm {
                llt_id: row.llt_id,
                line,
            });
        }
        if row.pt_id.is_empty() {
            row.pt_id = row.llt_id.clone();
        }
        if row.pt_text.is_empty() && row.pt_id == row.llt_id {
            row.pt_text = row.llt_text.clone();
        }
        let words = self.term_words(&row.llt_text);
        if words.is_empty() {
            return Err(parse_error(format!(
                "term {:?} has no content words",
                row.llt_text
            )));
        }
        let idx = TermIdx(self.entries.len() as u32);
        self.by_id.insert(row.llt_id.clone(), idx);
        self.entries.push(TermEntry {
            llt_id: row.llt_id,
            llt_text: row.llt_text,
            words,
            pt_id: row.pt_id,
            pt_text: row.pt_text,
            hierarchy: Hierarchy {
                hlt: non_empty(row.hlt_text),
                hlgt: non_empty(row.hlgt_text),
                soc: non_empty(row.soc_text),
            },
            pseudo_of: None,
        });
        Ok(idx)
    }

    /// Normalized, stop-word-free words of a term string.
    pub fn term_words(&self, text: &str) -> Vec<String> {
        remove_stop_words(self.normalizer.tokenize(text), &self.stop_words)
            .into_iter()
            .map(|t| t.surface)
            .collect()
    }

    /// Appends a pseudo term resolving to `target`. Returns `None` when the
    /// locution has no content words.
    pub fn push_pseudo(&mut self, text: &str, target: TermIdx) -> Option<TermIdx> {
        let words = self.term_words(text);
        if words.is_empty() {
            return None;
        }
        let official = &self.entries[target.index()];
        let entry = TermEntry {
            llt_id: official.llt_id.clone(),
            llt_text: text.to_string(),
            words,
            pt_id: official.pt_id.clone(),
            pt_text: official.pt_text.clone(),
            hierarchy: official.hierarchy.clone(),
            pseudo_of: Some(target),
        };
        let idx = TermIdx(self.entries.len() as u32);
        self.entries.push(entry);
        self.stats.pseudo_count += 1;
        Some(idx)
    }

    fn recompute_stats(&mut self) {
        let mut words = HashSet::new();
        let mut stats = TermStats::default();
        for entry in &self.entries {
            if entry.is_pseudo() {
                stats.pseudo_count += 1;
                continue;
            }
            stats.term_count += 1;
            stats.max_term_len = stats.max_term_len.max(entry.size());
            words.extend(entry.words.iter().map(String::as_str));
        }
        stats.distinct_words = words.len();
        self.stats = stats;
    }

    pub fn stats(&self) -> TermStats {
        self.stats
    }

    pub fn normalizer(&self) -> Normalizer {
        self.normalizer
    }

    pub fn stop_words(&self) -> &StopWords {
        &self.stop_words
    }

    /// Number of entries, pseudo terms included.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, idx: TermIdx) -> &TermEntry {
        &self.entries[idx.index()]
    }

    pub fn entries(&self) -> impl Iterator<Item = (TermIdx, &TermEntry)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| (TermIdx(i as u32), e))
    }

    /// Official entry by term id.
    pub fn get(&self, llt_id: &str) -> Option<&TermEntry> {
        self.by_id.get(llt_id).map(|&idx| self.entry(idx))
    }

    pub fn index_of(&self, llt_id: &str) -> Option<TermIdx> {
        self.by_id.get(llt_id).copied()
    }

    /// Official terms whose text starts with `query`, case-insensitively,
    /// ordered by text.
    pub fn search_prefix(&self, query: &str, limit: usize) -> Vec<&TermEntry> {
        let query = query.to_lowercase();
        let mut hits: Vec<&TermEntry> = self
            .entries
            .iter()
            .filter(|e| !e.is_pseudo() && e.llt_text.to_lowercase().starts_with(&query))
            .collect();
        hits.sort_by(|a, b| a.llt_text.cmp(&b.llt_text).then(a.llt_id.cmp(&b.llt_id)));
        hits.truncate(limit);
        hits
    }
}

/// Loads a terminology CSV with the default normalizer.
pub fn load_terminology(path: impl AsRef<Path>, stop_words: &StopWords) -> Result<Terminology> {
    Terminology::load(path, stop_words.clone(), Normalizer::default())
}

/// A term containing a word, and where the word first occurs in it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Posting {
    pub term: TermIdx,
    pub position: u32,
}

/// Inverted index from word (or stem) to the terms containing it.
#[derive(Debug, Clone, Default)]
pub struct MetaDictionary {
    index: HashMap<String, Vec<Posting>>,
    stemmed: bool,
}

impl MetaDictionary {
    /// One scan over all term words. A word repeated inside a term is
    /// recorded at its first position only.
    pub fn build(terminology: &Terminology, stemmer: Option<&dyn Stemmer>) -> Self {
        let mut index: HashMap<String, Vec<Posting>> = HashMap::new();
        let mut seen: Vec<String> = Vec::new();
        for (idx, entry) in terminology.entries() {
            seen.clear();
            for (position, word) in entry.words.iter().enumerate() {
                let key = match stemmer {
                    Some(s) => s.stem(word),
                    None => word.clone(),
                };
                if seen.contains(&key) {
                    continue;
                }
                index.entry(key.clone()).or_default().push(Posting {
                    term: idx,
                    position: position as u32,
                });
                seen.push(key);
            }
        }
        MetaDictionary {
            index,
            stemmed: stemmer.is_some(),
        }
    }

    pub fn lookup(&self, key: &str) -> &[Posting] {
        self.index.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn is_stemmed(&self) -> bool {
        self.stemmed
    }

    pub fn key_count(&self) -> usize {
        self.index.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.index.keys().map(String::as_str)
    }

    /// Longest and mean postings-list length.
    pub fn posting_stats(&self) -> (usize, f64) {
        if self.index.is_empty() {
            return (0, 0.0);
        }
        let total: usize = self.index.values().map(Vec::len).sum();
        let max = self.index.values().map(Vec::len).max().unwrap_or(0);
        (max, total as f64 / self.index.len() as f64)
    }
}

pub fn build_meta_dict(terminology: &Terminology, stemmer: Option<&dyn Stemmer>) -> MetaDictionary {
    MetaDictionary::build(terminology, stemmer)
}

pub fn lookup<'a>(dict: &'a MetaDictionary, word: &str) -> &'a [Posting] {
    dict.lookup(word)
}
