//! Pseudo terms: locutions that are voted like ordinary terms but resolve to
//! exactly one official term when they win.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csv_rows::read_rows;
use crate::error::{Error, Result};
use crate::selection::SynonymProvenance;
use crate::terminology::{TermIdx, Terminology};

/// Noun / adjective pairs frequent in the Italian terminology.
pub const DEFAULT_VARIANT_PAIRS: [(&str, &str); 3] = [
    ("aumento", "aumentato"),
    ("diminuzione", "diminuito"),
    ("riduzione", "ridotto"),
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PseudoTerm {
    pub pseudo_text: String,
    pub target_llt_id: String,
}

pub fn parse_pseudo_lexicon<R: Read>(
    reader: R,
    origin: &Path,
    terminology: &Terminology,
) -> Result<Vec<PseudoTerm>> {
    let parse_error = |line: u64, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    for (line, pseudo) in read_rows::<PseudoTerm, _>(reader, origin)? {
        let Some(target) = terminology.get(&pseudo.target_llt_id) else {
            return Err(Error::UnknownTarget {
                line,
                pseudo_text: pseudo.pseudo_text,
                target: pseudo.target_llt_id,
            });
        };
        let normalizer = terminology.normalizer();
        if normalizer.normalize(&pseudo.pseudo_text) == normalizer.normalize(&target.llt_text) {
            return Err(parse_error(
                line,
                format!("pseudo term {:?} repeats its target", pseudo.pseudo_text),
            ));
        }
        if terminology.term_words(&pseudo.pseudo_text).is_empty() {
            return Err(parse_error(
                line,
                format!("pseudo term {:?} has no content words", pseudo.pseudo_text),
            ));
        }
        out.push(pseudo);
    }
    Ok(out)
}

/// Reads a `pseudo_text,target_llt_id` CSV; every target must exist.
pub fn load_pseudo_lexicon(
    path: impl AsRef<Path>,
    terminology: &Terminology,
) -> Result<Vec<PseudoTerm>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_pseudo_lexicon(std::io::BufReader::new(file), path, terminology)
}

/// For every official term containing one side of a pair, a locution with
/// that word swapped for the other side. Italian puts the adjective after
/// the noun it modifies, so an adjective goes after the remaining content
/// words and a noun goes before them.
pub fn generate_variants(terminology: &Terminology, pairs: &[(&str, &str)]) -> Vec<PseudoTerm> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (_, entry) in terminology.entries().filter(|(_, e)| !e.is_pseudo()) {
        for &(noun, adjective) in pairs {
            for (from, to, to_is_adjective) in [(noun, adjective, true), (adjective, noun, false)] {
                if !entry.words.iter().any(|w| w == from) {
                    continue;
                }
                let mut words: Vec<&str> = entry
                    .words
                    .iter()
                    .map(String::as_str)
                    .filter(|w| *w != from)
                    .collect();
                if to_is_adjective {
                    words.push(to);
                } else {
                    words.insert(0, to);
                }
                let pseudo = PseudoTerm {
                    pseudo_text: words.join(" "),
                    target_llt_id: entry.llt_id.clone(),
                };
                if seen.insert(pseudo.clone()) {
                    out.push(pseudo);
                }
            }
        }
    }
    out
}

/// Adds pseudo terms to the searchable entries. Returns how many were added.
pub fn install(terminology: &mut Terminology, pseudo: &[PseudoTerm]) -> Result<usize> {
    let mut added = 0;
    for p in pseudo {
        let target = terminology
            .index_of(&p.target_llt_id)
            .ok_or_else(|| Error::UnknownTerm(p.target_llt_id.clone()))?;
        if terminology.push_pseudo(&p.pseudo_text, target).is_some() {
            added += 1;
        }
    }
    Ok(added)
}

/// The official term behind `term`, with provenance when it was a pseudo term.
pub fn resolve(terminology: &Terminology, term: TermIdx) -> (TermIdx, Option<SynonymProvenance>) {
    let entry = terminology.entry(term);
    match entry.pseudo_of {
        Some(official) => (
            official,
            Some(SynonymProvenance {
                pseudo_text: entry.llt_text.clone(),
            }),
        ),
        None => (term, None),
    }
}

/// Resolves in order and keeps the first occurrence of each official term.
pub fn resolve_all(
    terminology: &Terminology,
    terms: &[TermIdx],
) -> Vec<(TermIdx, TermIdx, Option<SynonymProvenance>)> {
    let mut seen = HashSet::new();
    terms
        .iter()
        .filter_map(|&t| {
            let (official, provenance) = resolve(terminology, t);
            seen.insert(official).then_some((t, official, provenance))
        })
        .collect()
}
