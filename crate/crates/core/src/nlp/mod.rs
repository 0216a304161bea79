//! Text pipeline for S2R sentences: preprocessing, sentence and clause
//! segmentation, a small parser for imperative clauses, action extraction
//! rules and partial-clause classification.

mod lexicon;
mod parse;
mod preprocess;
mod rules;
mod segment;

pub use lexicon::{NlpConfig, VerbClass};
pub use parse::{parse_clause, tokenize, Arc, ArcLabel, ClauseParse, Token};
pub use preprocess::{expand_placeholders, preprocess, preprocess_with, Preprocessed};
pub use rules::{classify_partial, classify_partial_info, extract_aga, AbstractGuiAction, PartialInfo, PartialKind};
pub use segment::{split_clauses, split_sentences, SentenceSpan, TERMINATORS};
