//! From voted terms to the released winners: ordered-phrases pruning,
//! multi-key sort, winner conditions, maximal-set-of-voters, truncation.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::scoring::WeightVector;
use crate::terminology::{TermIdx, Terminology};
use crate::voting::{VoteRecord, VotedSet};

/// Thresholds and switches for the release phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub c3_threshold: f64,
    pub c4_threshold: f64,
    /// Adds coverage distribution as the last sort key and drops the
    /// full-coverage requirement.
    pub enable_c5: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            c3_threshold: 0.5,
            c4_threshold: 3.0,
            enable_c5: false,
        }
    }
}

/// Keeps the terms whose voters, when at least one of them also voted another
/// term, appear in the text in the same relative order as the term's words.
/// Returns the kept terms in handle order.
pub fn ordered_phrases_filter(voted: &VotedSet) -> Vec<TermIdx> {
    let mut terms_per_voter: HashMap<usize, usize> = HashMap::new();
    for rec in voted.records() {
        // voters are strictly increasing within a record
        for &v in &rec.voters {
            *terms_per_voter.entry(v).or_default() += 1;
        }
    }
    let mut kept: Vec<TermIdx> = voted
        .records()
        .filter(|rec| {
            let shared = rec.voters.iter().any(|v| terms_per_voter[v] > 1);
            !(shared && out_of_order(rec))
        })
        .map(|rec| rec.term)
        .collect();
    kept.sort_unstable();
    kept
}

fn out_of_order(rec: &VoteRecord) -> bool {
    // voters are already ascending, so discovery order is voter order
    rec.voted.windows(2).any(|w| w[1] < w[0])
}

fn compare_parsed_ids(a: (Option<u64>, &str), b: (Option<u64>, &str)) -> Ordering {
    match (a.0, b.0) {
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.1.cmp(b.1)),
        _ => a.1.cmp(b.1),
    }
}

/// Term ids compare numerically when both are integers.
pub fn compare_term_ids(a: &str, b: &str) -> Ordering {
    compare_parsed_ids((a.parse().ok(), a), (b.parse().ok(), b))
}

/// Ascending on the weights; ties go to the lower term id, official terms
/// before pseudo terms.
pub fn multi_sort(
    candidates: &[TermIdx],
    weights: &HashMap<TermIdx, WeightVector>,
    terminology: &Terminology,
    with_c5: bool,
) -> Vec<TermIdx> {
    struct Key<'a> {
        weights: &'a WeightVector,
        id: (Option<u64>, &'a str),
        pseudo: bool,
        term: TermIdx,
    }
    let mut keys: Vec<Key> = candidates
        .iter()
        .map(|&term| {
            let entry = terminology.entry(term);
            Key {
                weights: &weights[&term],
                id: (entry.llt_id.parse().ok(), entry.llt_id.as_str()),
                pseudo: entry.is_pseudo(),
                term,
            }
        })
        .collect();
    keys.sort_by(|a, b| {
        a.weights
            .cmp_rank(b.weights, with_c5)
            .then_with(|| compare_parsed_ids(a.id, b.id))
            .then(a.pseudo.cmp(&b.pseudo))
            .then(a.term.cmp(&b.term))
    });
    keys.into_iter().map(|k| k.term).collect()
}

/// `a` is a word-level prefix of `b` (equality included).
fn is_prefix(a: &[String], b: &[String]) -> bool {
    a.len() <= b.len() && a == &b[..a.len()]
}

/// Walks the sorted terms and builds the covering set of selected terms.
///
/// A term is taken when it is fully covered, under both thresholds, not a
/// prefix of an already selected term, and either voted without stems or
/// voted by at least one still-uncovered word. Taking it covers all its
/// voters and evicts selected terms that are prefixes of it.
pub fn select_winners(
    sorted: &[TermIdx],
    weights: &HashMap<TermIdx, WeightVector>,
    voted: &VotedSet,
    terminology: &Terminology,
    description_len: usize,
    config: &SelectionConfig,
) -> Vec<TermIdx> {
    let mut marked = vec![false; description_len];
    let mut selected: Vec<TermIdx> = Vec::new();
    for &t in sorted {
        let w = &weights[&t];
        let Some(rec) = voted.get(t) else { continue };
        if !config.enable_c5 && w.c1_coverage != 0.0 {
            continue;
        }
        if !(w.c3_pair_distance < config.c3_threshold && w.c4_density < config.c4_threshold) {
            continue;
        }
        if selected.contains(&t) {
            continue;
        }
        let words = &terminology.entry(t).words;
        if selected
            .iter()
            .any(|&s| is_prefix(words, &terminology.entry(s).words))
        {
            continue;
        }
        if rec.stem_used && rec.voters.iter().all(|&v| marked[v]) {
            continue;
        }
        for &v in &rec.voters {
            marked[v] = true;
        }
        selected.retain(|&s| !is_prefix(&terminology.entry(s).words, words));
        selected.push(t);
    }
    selected
}

fn is_proper_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Drops terms whose voter set is strictly contained in another selected
/// term's voter set. Of two terms with the same voter set the earlier one
/// stays.
pub fn maximal_voters_filter(selected: &[TermIdx], voted: &VotedSet) -> Vec<TermIdx> {
    let voters: Vec<&[usize]> = selected
        .iter()
        .map(|t| voted.get(*t).map_or(&[][..], |r| r.voters.as_slice()))
        .collect();
    selected
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            !voters.iter().enumerate().any(|(j, other)| {
                j != i && (is_proper_subset(voters[i], other) || (j < i && voters[i] == *other))
            })
        })
        .map(|(_, &t)| t)
        .collect()
}

/// First `n` elements; no padding.
pub fn win<T: Clone>(terms: &[T], n: usize) -> Vec<T> {
    terms[..terms.len().min(n)].to_vec()
}

/// Pseudo term that produced a winner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymProvenance {
    pub pseudo_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Winner {
    pub llt_id: String,
    pub llt_text: String,
    pub pt_id: String,
    pub pt_text: String,
    pub weights: WeightVector,
    pub voters: Vec<usize>,
    /// Char spans of the voting words in the original text.
    pub voter_spans: Vec<(usize, usize)>,
    pub stem_used: bool,
    pub via_synonym: Option<SynonymProvenance>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EncodingResult {
    pub winners: Vec<Winner>,
    /// Winners available before truncation to the requested maximum.
    pub candidate_count: usize,
    pub negation_alert: bool,
    pub negation_spans: Vec<(usize, usize)>,
}

impl EncodingResult {
    pub fn llt_ids(&self) -> Vec<&str> {
        self.winners.iter().map(|w| w.llt_id.as_str()).collect()
    }

    pub fn pt_ids(&self) -> Vec<&str> {
        self.winners.iter().map(|w| w.pt_id.as_str()).collect()
    }
}
