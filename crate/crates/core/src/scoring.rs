//! Weights attached to every voted term.
//!
//! The first three criteria are 0 at best and 1 at worst; density is 1 at
//! best and grows as the voters spread out over the description.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::terminology::{TermEntry, TermIdx, Terminology};
use crate::textprep::{tokenize, CleanText};
use crate::voting::{VoteRecord, VotedSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    /// Share of term words never voted.
    pub c1_coverage: f64,
    /// 1 when at least one vote came through a stem.
    pub c2_stem_flag: u8,
    /// Pair distance between the term and the words that voted it.
    pub c3_pair_distance: f64,
    /// Spread of the voters over the number of matched term positions.
    pub c4_density: f64,
    /// Sum of the matched term positions.
    pub c5_distribution: u64,
}

impl WeightVector {
    /// Lexicographic comparison on (c1, c2, c3, c4), optionally c5 last.
    pub fn cmp_rank(&self, other: &Self, with_c5: bool) -> Ordering {
        self.c1_coverage
            .total_cmp(&other.c1_coverage)
            .then(self.c2_stem_flag.cmp(&other.c2_stem_flag))
            .then(self.c3_pair_distance.total_cmp(&other.c3_pair_distance))
            .then(self.c4_density.total_cmp(&other.c4_density))
            .then_with(|| {
                if with_c5 {
                    self.c5_distribution.cmp(&other.c5_distribution)
                } else {
                    Ordering::Equal
                }
            })
    }
}

pub fn coverage(term: &TermEntry, rec: &VoteRecord) -> f64 {
    let size = term.size();
    let covered = rec.distinct_voted().len().min(size);
    (size - covered) as f64 / size as f64
}

pub fn coverage_type(rec: &VoteRecord) -> u8 {
    u8::from(rec.stem_used)
}

/// Adjacent character pairs, collected word by word, sorted.
fn bigrams<'a>(words: impl IntoIterator<Item = &'a str>) -> Vec<(char, char)> {
    let mut out = Vec::new();
    for word in words {
        let mut chars = word.chars();
        if let Some(mut prev) = chars.next() {
            for c in chars {
                out.push((prev, c));
                prev = c;
            }
        }
    }
    out.sort_unstable();
    out
}

/// Size of the multiset intersection of two sorted lists.
fn common_count<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// [`pair_distance`] over already normalized words.
pub fn pair_distance_words(a: &[&str], b: &[&str]) -> f64 {
    let left = bigrams(a.iter().copied());
    let right = bigrams(b.iter().copied());
    if left.is_empty() && right.is_empty() {
        return if a == b { 0.0 } else { 1.0 };
    }
    let common = common_count(&left, &right);
    1.0 - (2 * common) as f64 / (left.len() + right.len()) as f64
}

/// `1 - 2|A ∩ B| / (|A| + |B|)` over bigram multisets.
///
/// Bigrams never cross word boundaries, so the distance does not change when
/// the words of either string are permuted.
pub fn pair_distance(a: &str, b: &str) -> f64 {
    let a = tokenize(a);
    let b = tokenize(b);
    let a: Vec<&str> = a.iter().map(|t| t.surface.as_str()).collect();
    let b: Vec<&str> = b.iter().map(|t| t.surface.as_str()).collect();
    pair_distance_words(&a, &b)
}

/// Pair distance between the term and the term "rebuilt" from its voters.
pub fn coverage_distance(term: &TermEntry, rec: &VoteRecord, clean: &CleanText) -> f64 {
    let words: Vec<&str> = term.words.iter().map(String::as_str).collect();
    let rebuilt: Vec<&str> = rec
        .voters
        .iter()
        .map(|&i| clean.tokens[i].surface.as_str())
        .collect();
    pair_distance_words(&words, &rebuilt)
}

pub fn coverage_density(rec: &VoteRecord) -> f64 {
    let (Some(min), Some(max)) = (rec.voters.iter().min(), rec.voters.iter().max()) else {
        return f64::INFINITY;
    };
    let matched = rec.distinct_voted().len();
    (max - min + 1) as f64 / matched as f64
}

pub fn coverage_distribution(rec: &VoteRecord) -> u64 {
    rec.distinct_voted().iter().map(|&p| p as u64).sum()
}

pub fn weights_for(term: &TermEntry, rec: &VoteRecord, clean: &CleanText) -> WeightVector {
    WeightVector {
        c1_coverage: coverage(term, rec),
        c2_stem_flag: coverage_type(rec),
        c3_pair_distance: coverage_distance(term, rec, clean),
        c4_density: coverage_density(rec),
        c5_distribution: coverage_distribution(rec),
    }
}

pub fn compute_weights(
    voted: &VotedSet,
    terminology: &Terminology,
    clean: &CleanText,
) -> HashMap<TermIdx, WeightVector> {
    voted
        .records()
        .map(|rec| {
            let term = terminology.entry(rec.term);
            (rec.term, weights_for(term, rec, clean))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terminology::{MetaDictionary, TermRow};
    use crate::textprep::{LightStemmer, Normalizer, Preprocessor, StopWords};
    use crate::voting::vote;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn record(voters: &[usize], voted: &[usize], stem_used: bool) -> VoteRecord {
        VoteRecord {
            term: TermIdx(0),
            voters: voters.to_vec(),
            voted: voted.to_vec(),
            stem_used,
        }
    }

    fn entry(words: &[&str]) -> TermEntry {
        TermEntry {
            llt_id: "0".into(),
            llt_text: words.join(" "),
            words: words.iter().map(|w| w.to_string()).collect(),
            pt_id: "0".into(),
            pt_text: String::new(),
            hierarchy: Default::default(),
            pseudo_of: None,
        }
    }

    /// Bigram lists written out by hand.
    #[test]
    fn night_nacht_shares_one_pair() {
        assert_eq!(pair_distance("night", "nacht"), 0.75);
    }

    #[test]
    fn pair_distance_edges() {
        assert_eq!(
            pair_distance("shock anafilattico", "shock anafilattico"),
            0.0
        );
        assert_eq!(
            pair_distance("Shock, anafilattico", "shock anafilattico"),
            0.0
        );
        assert_eq!(pair_distance("abc", "xyz"), 1.0);
        assert_eq!(pair_distance("", ""), 0.0);
        assert_eq!(pair_distance("a b", "a b"), 0.0);
        assert_eq!(pair_distance("a", "b"), 1.0);
        assert_eq!(pair_distance("ab", ""), 1.0);
    }

    #[test]
    fn febbre_vs_febbri() {
        // febbre: fe eb bb br re / febbri: fe eb bb br ri -> 4 common of 10
        let e = entry(&["febbre"]);
        let clean = CleanText {
            tokens: vec![crate::textprep::CleanToken {
                index: 0,
                surface: "febbri".into(),
                stem: "febbr".into(),
                char_span: (0, 6),
            }],
            negations: vec![],
        };
        let d = coverage_distance(&e, &record(&[0], &[0], true), &clean);
        assert!((d - 0.2).abs() < 1e-12);
    }

    #[test]
    fn coverage_values() {
        assert_eq!(
            coverage(
                &entry(&["anaphylactic", "shock"]),
                &record(&[0, 1], &[0, 1], false)
            ),
            0.0
        );
        let c1 = coverage(
            &entry(&["anaphylactic", "reaction", "drug"]),
            &record(&[0, 9], &[0, 2], false),
        );
        assert_eq!(c1, 1.0 / 3.0);
        assert_eq!((c1 * 100.0).round() / 100.0, 0.33);
        assert_eq!(
            coverage(&entry(&["a", "b", "c", "d"]), &record(&[3], &[1], false)),
            0.75
        );
        // repeated voted positions count once
        assert_eq!(
            coverage(
                &entry(&["local", "reaction"]),
                &record(&[1, 3], &[0, 0], false)
            ),
            0.5
        );
    }

    #[test]
    fn coverage_type_values() {
        assert_eq!(coverage_type(&record(&[0, 1], &[0, 1], false)), 0);
        assert_eq!(coverage_type(&record(&[0], &[0], true)), 1);
        assert_eq!(coverage_type(&record(&[0, 1], &[0, 1], true)), 1);
    }

    #[test]
    fn density_values() {
        assert_eq!(coverage_density(&record(&[0, 1], &[0, 1], false)), 1.0);
        assert_eq!(coverage_density(&record(&[0, 9], &[0, 2], false)), 5.0);
        assert_eq!(coverage_density(&record(&[4], &[0], false)), 1.0);
        assert_eq!(
            coverage_density(&record(&[1, 2, 3], &[0, 1, 0], false)),
            1.5
        );
    }

    #[test]
    fn distribution_values() {
        assert_eq!(coverage_distribution(&record(&[0, 1], &[0, 1], false)), 1);
        assert_eq!(coverage_distribution(&record(&[0, 9], &[0, 2], false)), 2);
        assert_eq!(coverage_distribution(&record(&[5], &[3], false)), 3);
    }

    #[test]
    fn worked_example_weights() {
        let stops: StopWords = ["to", "the"].into_iter().collect();
        let t = Terminology::from_rows(
            [
                TermRow::new("10002199", "Anaphylactic shock"),
                TermRow::new("10054844", "Anaphylactic reaction to drug"),
                TermRow::new("1", "Fever"),
            ],
            stops.clone(),
            Normalizer::default(),
        )
        .unwrap();
        let exact = MetaDictionary::build(&t, None);
        let stemmed = MetaDictionary::build(&t, Some(&LightStemmer));
        let clean = Preprocessor::new(stops, Arc::new(LightStemmer)).preprocess(
            "anaphylactic shock (hypotension + cutaneous rash) 1 hour after taking the drug",
        );
        let weights = compute_weights(&vote(&clean, &exact, &stemmed), &t, &clean);
        let w1 = weights[&t.index_of("10002199").unwrap()];
        assert_eq!(
            (
                w1.c1_coverage,
                w1.c2_stem_flag,
                w1.c3_pair_distance,
                w1.c4_density
            ),
            (0.0, 0, 0.0, 1.0)
        );
        let w2 = weights[&t.index_of("10054844").unwrap()];
        assert_eq!(w2.c1_coverage, 1.0 / 3.0);
        assert_eq!(w2.c2_stem_flag, 0);
        assert!(w2.c3_pair_distance > 0.0 && w2.c3_pair_distance < 1.0);
        assert_eq!(w2.c4_density, 5.0);
        assert!(!weights.contains_key(&t.index_of("1").unwrap()));
    }

    #[test]
    fn rank_order_is_lexicographic() {
        let w = |c1, c2, c3, c4, c5| WeightVector {
            c1_coverage: c1,
            c2_stem_flag: c2,
            c3_pair_distance: c3,
            c4_density: c4,
            c5_distribution: c5,
        };
        assert_eq!(
            w(0.0, 0, 0.2, 2.0, 0).cmp_rank(&w(0.0, 1, 0.0, 1.0, 0), false),
            Ordering::Less
        );
        assert_eq!(
            w(0.0, 0, 0.0, 1.0, 0).cmp_rank(&w(1.0 / 3.0, 0, 0.0, 1.0, 0), false),
            Ordering::Less
        );
        assert_eq!(
            w(0.0, 0, 0.0, 1.0, 5).cmp_rank(&w(0.0, 0, 0.0, 1.0, 1), false),
            Ordering::Equal
        );
        assert_eq!(
            w(0.0, 0, 0.0, 1.0, 5).cmp_rank(&w(0.0, 0, 0.0, 1.0, 1), true),
            Ordering::Greater
        );
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec("[a-e]{0,6}", 0..5)
    }

    proptest! {
        #[test]
        fn pair_distance_properties(a in words(), b in words(), seed in any::<u64>()) {
            let sa = a.join(" ");
            let sb = b.join(" ");
            let d = pair_distance(&sa, &sb);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, pair_distance(&sb, &sa));
            prop_assert_eq!(pair_distance(&sa, &sa), 0.0);
            let mut shuffled = a.clone();
            let n = shuffled.len();
            if n > 1 {
                shuffled.rotate_left((seed as usize) % n);
            }
            prop_assert_eq!(d, pair_distance(&shuffled.join(" "), &sb));
        }

        #[test]
        fn full_coverage_iff_every_position_voted(size in 1usize..6, voted in prop::collection::vec(0usize..6, 1..8)) {
            let voted: Vec<usize> = voted.into_iter().filter(|&p| p < size).collect();
            prop_assume!(!voted.is_empty());
            let words: Vec<String> = (0..size).map(|i| format!("w{i}")).collect();
            let e = entry(&words.iter().map(String::as_str).collect::<Vec<_>>());
            let voters: Vec<usize> = (0..voted.len()).collect();
            let rec = record(&voters, &voted, false);
            let all = (0..size).all(|p| voted.contains(&p));
            prop_assert_eq!(coverage(&e, &rec) == 0.0, all);
            if all && voted.len() == size {
                prop_assert_eq!(coverage_density(&rec), 1.0);
            }
        }
    }
}
