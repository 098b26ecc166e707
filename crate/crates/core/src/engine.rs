use std::collections::HashMap;
use std::path::Path;

use crate::config::EngineConfig;
use crate::error::Result;
use crate::scoring::{compute_weights, WeightVector};
use crate::selection::{
    maximal_voters_filter, multi_sort, ordered_phrases_filter, select_winners, win, EncodingResult,
    SelectionConfig, SynonymProvenance, Winner,
};
use crate::synonyms::{self, DEFAULT_VARIANT_PAIRS};
use crate::terminology::{MetaDictionary, TermIdx, Terminology};
use crate::textprep::{CleanText, NegationLexicon, Normalizer, Preprocessor, StopWords};
use crate::voting::{vote_counting, VotedSet};

/// A terminology with its two indexes, ready to encode descriptions.
#[derive(Debug, Clone)]
pub struct Coder {
    terminology: Terminology,
    exact: MetaDictionary,
    stemmed: MetaDictionary,
    preprocessor: Preprocessor,
    config: EngineConfig,
}

/// Every intermediate stage of one encoding.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub clean: CleanText,
    pub voted: VotedSet,
    pub postings_visited: usize,
    pub weights: HashMap<TermIdx, WeightVector>,
    /// Terms surviving the word-order check, in handle order.
    pub ordered: Vec<TermIdx>,
    pub sorted: Vec<TermIdx>,
    pub selected: Vec<TermIdx>,
    pub maximal: Vec<TermIdx>,
    pub result: EncodingResult,
}

impl Coder {
    /// Builds the indexes over a loaded terminology. Pseudo terms already
    /// installed in it are indexed too.
    pub fn new(terminology: Terminology, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let negation = match &config.negation_lexicon {
            Some(path) => NegationLexicon::from_file(path, &terminology.normalizer())?,
            None => NegationLexicon::builtin(config.language),
        };
        Self::with_negation(terminology, config, negation)
    }

    pub fn with_negation(
        terminology: Terminology,
        config: EngineConfig,
        negation: NegationLexicon,
    ) -> Result<Self> {
        config.validate()?;
        let stemmer = config.stemmer.build(config.language);
        let exact = MetaDictionary::build(&terminology, None);
        let stemmed = MetaDictionary::build(&terminology, Some(stemmer.as_ref()));
        let preprocessor = Preprocessor::new(terminology.stop_words().clone(), stemmer)
            .with_normalizer(terminology.normalizer())
            .with_negation(negation);
        Ok(Coder {
            terminology,
            exact,
            stemmed,
            preprocessor,
            config,
        })
    }

    /// Loads a terminology CSV plus whatever the config points at: stop
    /// words, negation cues and pseudo terms.
    pub fn load(dictionary: impl AsRef<Path>, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let normalizer = Normalizer::new(config.fold_accents);
        let stop_words = match &config.stop_words {
            Some(path) => StopWords::from_file(path, &normalizer)?,
            None => StopWords::builtin_with(config.language, &normalizer),
        };
        let mut terminology = Terminology::load(dictionary, stop_words, normalizer)?;
        let mut pseudo = Vec::new();
        if let Some(path) = &config.synonym_lexicon {
            pseudo.extend(synonyms::load_pseudo_lexicon(path, &terminology)?);
        }
        if config.generate_variants {
            pseudo.extend(synonyms::generate_variants(
                &terminology,
                &DEFAULT_VARIANT_PAIRS,
            ));
        }
        synonyms::install(&mut terminology, &pseudo)?;
        Self::new(terminology, config)
    }

    pub fn terminology(&self) -> &Terminology {
        &self.terminology
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn preprocessor(&self) -> &Preprocessor {
        &self.preprocessor
    }

    pub fn exact_index(&self) -> &MetaDictionary {
        &self.exact
    }

    pub fn stemmed_index(&self) -> &MetaDictionary {
        &self.stemmed
    }

    pub fn encode(&self, text: &str) -> EncodingResult {
        self.analyze_with(text, self.config.max_terms).result
    }

    /// Like [`Coder::encode`] with a different cap on the number of winners.
    pub fn encode_with(&self, text: &str, max_terms: usize) -> EncodingResult {
        self.analyze_with(text, max_terms).result
    }

    /// Encodes with thresholds other than the configured ones.
    pub fn encode_custom(
        &self,
        text: &str,
        max_terms: usize,
        selection: &SelectionConfig,
    ) -> EncodingResult {
        self.run(text, max_terms, selection).result
    }

    pub fn analyze(&self, text: &str) -> Analysis {
        self.analyze_with(text, self.config.max_terms)
    }

    fn analyze_with(&self, text: &str, max_terms: usize) -> Analysis {
        self.run(text, max_terms, &self.config.selection())
    }

    fn run(&self, text: &str, max_terms: usize, selection: &SelectionConfig) -> Analysis {
        let clean = self.preprocessor.preprocess(text);
        let (voted, postings_visited) = vote_counting(&clean, &self.exact, &self.stemmed);
        let weights = compute_weights(&voted, &self.terminology, &clean);
        let ordered = ordered_phrases_filter(&voted);
        let sorted = multi_sort(&ordered, &weights, &self.terminology, selection.enable_c5);
        let selected = select_winners(
            &sorted,
            &weights,
            &voted,
            &self.terminology,
            clean.len(),
            selection,
        );
        let maximal = maximal_voters_filter(&selected, &voted);
        let resolved = synonyms::resolve_all(&self.terminology, &maximal);
        let candidate_count = resolved.len();
        let winners = win(&resolved, max_terms)
            .into_iter()
            .map(|(term, official, provenance)| {
                self.winner(term, official, provenance, &voted, &weights, &clean)
            })
            .collect();
        let result = EncodingResult {
            winners,
            candidate_count,
            negation_alert: clean.has_negation(),
            negation_spans: clean.negations.iter().map(|n| n.char_span).collect(),
        };
        Analysis {
            clean,
            voted,
            postings_visited,
            weights,
            ordered,
            sorted,
            selected,
            maximal,
            result,
        }
    }

    fn winner(
        &self,
        term: TermIdx,
        official: TermIdx,
        via_synonym: Option<SynonymProvenance>,
        voted: &VotedSet,
        weights: &HashMap<TermIdx, WeightVector>,
        clean: &CleanText,
    ) -> Winner {
        let entry = self.terminology.entry(official);
        let rec = voted.get(term).expect("selected terms are voted");
        Winner {
            llt_id: entry.llt_id.clone(),
            llt_text: entry.llt_text.clone(),
            pt_id: entry.pt_id.clone(),
            pt_text: entry.pt_text.clone(),
            weights: weights[&term],
            voters: rec.voters.clone(),
            voter_spans: rec
                .voters
                .iter()
                .map(|&v| clean.tokens[v].char_span)
                .collect(),
            stem_used: rec.stem_used,
            via_synonym,
        }
    }
}
