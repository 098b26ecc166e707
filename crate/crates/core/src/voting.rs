//! The voting scan: every content word of the description votes each term it
//! occurs in, exactly or through its stem.

use serde::{Deserialize, Serialize};

use crate::terminology::{MetaDictionary, TermIdx};
use crate::textprep::CleanText;

/// What the scan learned about one term.
///
/// `voters[i]` (a description position) matched term position `voted[i]`.
/// Voters are strictly increasing: a word votes a term at most once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    pub term: TermIdx,
    pub voters: Vec<usize>,
    pub voted: Vec<usize>,
    pub stem_used: bool,
}

impl VoteRecord {
    fn new(term: TermIdx) -> Self {
        VoteRecord {
            term,
            voters: Vec::new(),
            voted: Vec::new(),
            stem_used: false,
        }
    }

    /// `(voter, voted)` pairs in discovery order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.voters.iter().copied().zip(self.voted.iter().copied())
    }

    /// Term positions matched at least once, ascending.
    pub fn distinct_voted(&self) -> Vec<usize> {
        let mut v = self.voted.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn has_voter(&self, i: usize) -> bool {
        // Voters are appended in scan order, so the last one is the only
        // candidate for the current word.
        self.voters.last() == Some(&i)
    }
}

const NO_SLOT: u32 = u32::MAX;

/// The sub-dictionary of terms voted by at least one word.
///
/// Records are kept in the order terms were first voted; a dense table
/// indexed by term handle finds them without hashing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VotedSet {
    records: Vec<VoteRecord>,
    slots: Vec<u32>,
}

impl VotedSet {
    pub fn get(&self, term: TermIdx) -> Option<&VoteRecord> {
        match self.slots.get(term.index()) {
            Some(&slot) if slot != NO_SLOT => Some(&self.records[slot as usize]),
            _ => None,
        }
    }

    pub fn contains(&self, term: TermIdx) -> bool {
        self.get(term).is_some()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in first-vote order.
    pub fn records(&self) -> impl Iterator<Item = &VoteRecord> {
        self.records.iter()
    }

    /// Records ordered by term handle.
    pub fn sorted(&self) -> Vec<&VoteRecord> {
        let mut v: Vec<_> = self.records.iter().collect();
        v.sort_by_key(|r| r.term);
        v
    }

    fn record_mut(&mut self, term: TermIdx) -> &mut VoteRecord {
        let i = term.index();
        if i >= self.slots.len() {
            self.slots.resize(i + 1, NO_SLOT);
        }
        if self.slots[i] == NO_SLOT {
            self.slots[i] = self.records.len() as u32;
            self.records.push(VoteRecord::new(term));
        }
        &mut self.records[self.slots[i] as usize]
    }
}

impl FromIterator<VoteRecord> for VotedSet {
    /// A later record for the same term replaces the earlier one.
    fn from_iter<I: IntoIterator<Item = VoteRecord>>(iter: I) -> Self {
        let mut set = VotedSet::default();
        for rec in iter {
            let term = rec.term;
            *set.record_mut(term) = rec;
        }
        set
    }
}

/// Runs the scan; also returns how many postings were visited.
pub fn vote_counting(
    clean: &CleanText,
    exact: &MetaDictionary,
    stemmed: &MetaDictionary,
) -> (VotedSet, usize) {
    let mut set = VotedSet::default();
    let mut visited = 0;
    for (i, token) in clean.tokens.iter().enumerate() {
        let hits = exact.lookup(&token.surface);
        visited += hits.len();
        for posting in hits {
            let rec = set.record_mut(posting.term);
            rec.voters.push(i);
            rec.voted.push(posting.position as usize);
        }
        let hits = stemmed.lookup(&token.stem);
        visited += hits.len();
        for posting in hits {
            let rec = set.record_mut(posting.term);
            // An exact match of this word already covers the term.
            if !rec.has_voter(i) {
                rec.voters.push(i);
                rec.voted.push(posting.position as usize);
                rec.stem_used = true;
            }
        }
    }
    (set, visited)
}

pub fn vote(clean: &CleanText, exact: &MetaDictionary, stemmed: &MetaDictionary) -> VotedSet {
    vote_counting(clean, exact, stemmed).0
}
