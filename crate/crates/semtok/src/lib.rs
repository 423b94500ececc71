//! semtok: a subword tokenization toolkit built around a two-segment
//! vocabulary.
//!
//! The trainer splits the vocabulary into a semantic segment, filled with
//! word stems, suffixes and unstemmable whole words by descending corpus
//! frequency, and a residual segment, filled by byte-pair-encoding merges
//! over whatever the semantic segment cannot represent. Encoding uses plain
//! greedy longest-match-first over the combined token set, so any trained
//! model (including the standalone BPE baseline) runs through one codec.
//!
//! ```
//! use semtok::trainer::{train, TrainerConfig};
//! use semtok::codec::encode_text;
//!
//! let corpus = ["the tokenizer conditions the conditioner",
//!               "conditioning conditions tokens"];
//! let config = TrainerConfig { vocab_size: 64, ..TrainerConfig::default() };
//! let (vocab, _summary) = train(corpus, &config).unwrap();
//! let encoding = encode_text("conditions", &vocab, &config.normalization).unwrap();
//! assert!(!encoding.is_empty());
//! ```

pub mod bpe;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod metrics;
pub mod stemmer;
pub mod trainer;
pub mod vocab;

pub use codec::{decode, encode_text, encode_word, Encoding};
pub use corpus::{
    build_frequency_table, normalize_text, split_words, NormalizationConfig, UnicodeForm,
    WordFrequencyTable,
};
pub use error::{Error, Result};
pub use metrics::{compare_vocabularies, efficiency_report, EfficiencyReport};
pub use stemmer::{split_stem_suffix, stem, StemSplit};
pub use trainer::{train, train_from_files, CandidateStats, TrainerConfig, TrainingSummary};
pub use vocab::{Segment, TokenKind, VocabEntry, Vocabulary};
