//! Dictionary-driven auto-coding of free-text adverse drug reaction
//! descriptions into lowest-level terms of a MedDRA-shaped terminology.

pub mod config;
mod csv_rows;
pub mod engine;
mod error;
pub mod evaluation;
pub mod scoring;
pub mod selection;
pub mod synonyms;
pub mod terminology;
pub mod textprep;
pub mod voting;

pub use config::EngineConfig;
pub use engine::{Analysis, Coder};
pub use error::{Error, Result};
pub use scoring::WeightVector;
pub use selection::{EncodingResult, SelectionConfig, SynonymProvenance, Winner};
pub use synonyms::PseudoTerm;
pub use terminology::{MetaDictionary, TermEntry, TermIdx, TermRow, Terminology};
pub use textprep::{Language, Preprocessor, StemmerKind, StopWords};
pub use voting::{VoteRecord, VotedSet};
