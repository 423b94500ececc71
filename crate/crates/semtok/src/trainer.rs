//! The two-segment vocabulary trainer.
//!
//! The semantic segment is filled by walking the word-frequency table in
//! descending count order, splitting each word into its stem and suffix
//! whenever the decomposition is concatenative, and crediting every visited
//! word's occurrence count to its tokens. The residual segment is then
//! filled by BPE: a character alphabet sized by coverage, then frequency
//! merges over the corpus for whatever budget remains.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::PathBuf;

use crate::bpe;
use crate::codec::{encode_word, DEFAULT_MAX_WORD_CHARS};
use crate::corpus::{
    build_frequency_table, build_frequency_table_from_files, NormalizationConfig,
    WordFrequencyTable,
};
use crate::error::{Error, Result};
use crate::stemmer::{split_stem_suffix, DEFAULT_MIN_STEM_LENGTH};
use crate::vocab::{Vocabulary, CONTINUATION_MARKER, DEFAULT_SPECIALS, UNK_TOKEN};

/// Trainer parameters. `semantic_fraction` is the target share of
/// non-special vocabulary slots reserved for the semantic segment.
#[derive(Debug, Clone)]
pub struct TrainerConfig {
    /// Total vocabulary size including special tokens.
    pub vocab_size: usize,
    /// Target |semantic| / (|V| − |specials|), in (0, 1].
    pub semantic_fraction: f64,
    /// Words with fewer occurrences are ignored by the semantic segment.
    pub min_frequency: u64,
    pub min_stem_length: usize,
    /// Fraction of corpus character mass guaranteed single-char tokens.
    pub character_coverage: f64,
    pub specials: Vec<String>,
    pub normalization: NormalizationConfig,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            vocab_size: 8192,
            semantic_fraction: 0.9,
            min_frequency: 2,
            min_stem_length: DEFAULT_MIN_STEM_LENGTH,
            character_coverage: 0.9999,
            specials: DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect(),
            normalization: NormalizationConfig::default(),
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vocab_size <= self.specials.len() {
            return Err(Error::Config(format!(
                "vocab_size {} must exceed the {} special tokens",
                self.vocab_size,
                self.specials.len()
            )));
        }
        if !(self.semantic_fraction > 0.0 && self.semantic_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "semantic_fraction {} outside (0, 1]",
                self.semantic_fraction
            )));
        }
        if !(self.character_coverage > 0.0 && self.character_coverage <= 1.0) {
            return Err(Error::Config(format!(
                "character_coverage {} outside (0, 1]",
                self.character_coverage
            )));
        }
        if self.min_frequency == 0 {
            return Err(Error::Config("min_frequency must be at least 1".into()));
        }
        if self.min_stem_length == 0 {
            return Err(Error::Config("min_stem_length must be at least 1".into()));
        }
        if !self.specials.iter().any(|s| s == UNK_TOKEN) {
            return Err(Error::Config(format!("specials must include {UNK_TOKEN}")));
        }
        Ok(())
    }

    /// Semantic-segment slot budget: round(f · (|V| − |specials|)).
    pub fn semantic_capacity(&self) -> usize {
        let non_special = self.vocab_size.saturating_sub(self.specials.len());
        (self.semantic_fraction * non_special as f64).round() as usize
    }
}

/// A vocabulary candidate with the corpus occurrence mass credited to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateStats {
    pub token: String,
    pub occurrence_mass: u64,
}

/// Fill the semantic segment: visit words by descending count (ties by word
/// order), split stemmable words into stem + `##suffix`, add unstemmable
/// words whole. Insertion stops at the capacity; mass updates to tokens
/// already present continue to the end of the table.
pub fn populate_semantic_segment(
    freq: &WordFrequencyTable,
    config: &TrainerConfig,
) -> Vec<CandidateStats> {
    let capacity = config.semantic_capacity();
    let mut stats: Vec<CandidateStats> = Vec::new();
    let mut slots: HashMap<String, usize> = HashMap::new();

    let mut credit = |token: String, mass: u64, stats: &mut Vec<CandidateStats>| {
        if let Some(&i) = slots.get(&token) {
            stats[i].occurrence_mass += mass;
        } else if stats.len() < capacity {
            slots.insert(token.clone(), stats.len());
            stats.push(CandidateStats {
                token,
                occurrence_mass: mass,
            });
        }
    };

    for (word, count) in freq.sorted_entries() {
        if count < config.min_frequency {
            continue;
        }
        match split_stem_suffix(word, config.min_stem_length) {
            Some(split) => {
                credit(split.stem.to_string(), count, &mut stats);
                credit(format!("{CONTINUATION_MARKER}{}", split.suffix), count, &mut stats);
            }
            None => credit(word.to_string(), count, &mut stats),
        }
    }
    stats
}

/// Fill the residual segment: single-character alphabet tokens covering the
/// configured share of corpus character mass, then greedy BPE merges over
/// the corpus. Tokens already in the semantic segment are skipped. The
/// alphabet alone discharges the UNK objective; the merges buy back piece
/// counts on words the semantic segment cannot reach.
pub fn train_bpe_residual(
    freq: &WordFrequencyTable,
    v1: &[CandidateStats],
    config: &TrainerConfig,
) -> Vec<CandidateStats> {
    residual_segment(freq, v1, config)
        .map(|(stats, _)| stats)
        .unwrap_or_default()
}

fn residual_segment(
    freq: &WordFrequencyTable,
    v1: &[CandidateStats],
    config: &TrainerConfig,
) -> Result<(Vec<CandidateStats>, usize)> {
    let budget = config
        .vocab_size
        .saturating_sub(config.specials.len())
        .saturating_sub(v1.len());
    // f = 1 requests a purely semantic vocabulary: no alphabet, no merges,
    // even when the semantic segment underfills its capacity
    if budget == 0 || config.semantic_fraction >= 1.0 {
        return Ok((Vec::new(), residual_word_count(freq, v1, &[], config)?));
    }

    let stats = bpe::char_stats(freq);
    let alphabet = bpe::select_alphabet(&stats, config.character_coverage);
    let residual_words = residual_word_count(freq, v1, &alphabet, config)?;

    let skip: HashSet<String> = v1.iter().map(|c| c.token.clone()).collect();
    let words = freq.sorted_entries();
    let outcome = bpe::train_pieces(&words, &alphabet, budget, &skip);
    Ok((outcome.candidates, residual_words))
}

/// Distinct words the greedy encoder cannot segment with the semantic
/// segment plus the single-character alphabet (reported in the summary).
fn residual_word_count(
    freq: &WordFrequencyTable,
    v1: &[CandidateStats],
    alphabet: &[(char, u64, u64)],
    config: &TrainerConfig,
) -> Result<usize> {
    let v1_tokens: HashSet<&str> = v1.iter().map(|c| c.token.as_str()).collect();
    let semantic: Vec<(String, f64)> = v1.iter().map(|c| (c.token.clone(), 0.0)).collect();
    let residual: Vec<(String, f64)> = alphabet
        .iter()
        .flat_map(|&(c, ini, cont)| {
            let mut forms = Vec::new();
            if ini > 0 {
                forms.push((c.to_string(), 0.0));
            }
            if cont > 0 {
                forms.push((format!("{CONTINUATION_MARKER}{c}"), 0.0));
            }
            forms
        })
        .filter(|(t, _)| !v1_tokens.contains(t.as_str()))
        .collect();
    let probe = Vocabulary::from_segments(&config.specials, semantic, residual)?;

    let count = freq
        .iter()
        .filter(|(word, _)| {
            let pieces = encode_word(word, &probe, DEFAULT_MAX_WORD_CHARS);
            pieces.first() == Some(&UNK_TOKEN)
        })
        .count();
    Ok(count)
}

/// Log relative occurrence mass per candidate: ln(mass / Σ mass).
pub fn compute_scores(candidates: &[CandidateStats]) -> Vec<f64> {
    let total: u64 = candidates.iter().map(|c| c.occurrence_mass).sum();
    if total == 0 {
        return vec![0.0; candidates.len()];
    }
    candidates
        .iter()
        .map(|c| (c.occurrence_mass as f64 / total as f64).ln())
        .collect()
}

/// Key:value training summary, one line per field.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSummary {
    pub vocab_size: usize,
    pub special_tokens: usize,
    pub semantic_tokens: usize,
    pub residual_tokens: usize,
    pub realized_fraction: f64,
    pub residual_words: usize,
}

impl fmt::Display for TrainingSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vocab_size:{}", self.vocab_size)?;
        writeln!(f, "special_tokens:{}", self.special_tokens)?;
        writeln!(f, "semantic_tokens:{}", self.semantic_tokens)?;
        writeln!(f, "residual_tokens:{}", self.residual_tokens)?;
        writeln!(f, "realized_f:{:.6}", self.realized_fraction)?;
        write!(f, "residual_words:{}", self.residual_words)
    }
}

/// Train a two-segment vocabulary from an in-memory corpus. Deterministic
/// for a fixed corpus and config, independent of document order.
pub fn train<I, S>(lines: I, config: &TrainerConfig) -> Result<(Vocabulary, TrainingSummary)>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    config.validate()?;
    let freq = build_frequency_table(lines, &config.normalization);
    train_from_table(&freq, config)
}

/// Train from corpus files (or directory trees of files).
pub fn train_from_files(
    paths: &[PathBuf],
    config: &TrainerConfig,
) -> Result<(Vocabulary, TrainingSummary)> {
    config.validate()?;
    let freq = build_frequency_table_from_files(paths, &config.normalization)?;
    train_from_table(&freq, config)
}

pub fn train_from_table(
    freq: &WordFrequencyTable,
    config: &TrainerConfig,
) -> Result<(Vocabulary, TrainingSummary)> {
    config.validate()?;
    if freq.is_empty() {
        return Err(Error::Config("corpus contains no words".into()));
    }

    let mut v1 = populate_semantic_segment(freq, config);
    let (v2, residual_words) = residual_segment(freq, &v1, config)?;

    // final order: semantic by descending mass (ties by token), residual in
    // alphabet-then-merge order
    v1.sort_by(|a, b| {
        b.occurrence_mass
            .cmp(&a.occurrence_mass)
            .then_with(|| a.token.cmp(&b.token))
    });

    let semantic_len = v1.len();
    let mut all = v1;
    all.extend(v2);
    let scores = compute_scores(&all);

    let mut semantic = Vec::with_capacity(semantic_len);
    let mut residual = Vec::with_capacity(all.len() - semantic_len);
    for (i, (candidate, score)) in all.into_iter().zip(scores).enumerate() {
        let pair = (candidate.token, score);
        if i < semantic_len {
            semantic.push(pair);
        } else {
            residual.push(pair);
        }
    }

    let vocabulary = Vocabulary::from_segments(&config.specials, semantic, residual)?;
    let summary = TrainingSummary {
        vocab_size: vocabulary.len(),
        special_tokens: vocabulary.special_count(),
        semantic_tokens: semantic_len,
        residual_tokens: vocabulary.len() - vocabulary.special_count() - semantic_len,
        realized_fraction: vocabulary.realized_fraction(),
        residual_words,
    };
    Ok((vocabulary, summary))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(entries: &[(&str, u64)]) -> WordFrequencyTable {
        let mut t = WordFrequencyTable::new();
        for (w, c) in entries {
            t.add(w, *c);
        }
        t
    }

    fn config(vocab_size: usize, f: f64) -> TrainerConfig {
        TrainerConfig {
            vocab_size,
            semantic_fraction: f,
            min_frequency: 1,
            ..TrainerConfig::default()
        }
    }

    fn masses(stats: &[CandidateStats]) -> HashMap<&str, u64> {
        stats
            .iter()
            .map(|c| (c.token.as_str(), c.occurrence_mass))
            .collect()
    }

    #[test]
    fn semantic_segment_credits_stem_and_suffix() {
        // advise → advis + ##e, advised → advis + ##ed
        let freq = table(&[("advise", 10), ("advised", 5)]);
        let stats = populate_semantic_segment(&freq, &config(64, 0.9));
        let m = masses(&stats);
        assert_eq!(m["advis"], 15);
        assert_eq!(m["##e"], 10);
        assert_eq!(m["##ed"], 5);
        assert_eq!(stats.len(), 3);
    }

    #[test]
    fn unstemmable_word_added_whole() {
        let freq = table(&[("the", 100)]);
        let stats = populate_semantic_segment(&freq, &config(64, 0.9));
        let m = masses(&stats);
        assert_eq!(m["the"], 100);
        assert_eq!(stats.len(), 1);
    }

    #[test]
    fn capacity_cuts_mid_word_keeping_stem() {
        // capacity 1: the stem fits, the suffix does not
        let freq = table(&[("advise", 10)]);
        let cfg = config(6, 1.0); // 6 − 5 specials = 1 slot
        assert_eq!(cfg.semantic_capacity(), 1);
        let stats = populate_semantic_segment(&freq, &cfg);
        let m = masses(&stats);
        assert_eq!(m.len(), 1);
        assert_eq!(m["advis"], 10);
    }

    #[test]
    fn mass_updates_continue_after_capacity() {
        // capacity 2 fills on the first word; the second word's mass still
        // lands on the shared stem
        let freq = table(&[("advise", 10), ("advised", 5)]);
        let cfg = config(7, 1.0); // capacity 2
        let stats = populate_semantic_segment(&freq, &cfg);
        let m = masses(&stats);
        assert_eq!(m["advis"], 15);
        assert_eq!(m["##e"], 10);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn min_frequency_filters_semantic_candidates() {
        let freq = table(&[("advise", 10), ("misspelt", 1)]);
        let cfg = TrainerConfig {
            min_frequency: 2,
            ..config(64, 0.9)
        };
        let stats = populate_semantic_segment(&freq, &cfg);
        assert!(!masses(&stats).contains_key("misspelt"));
    }

    #[test]
    fn each_word_contributes_to_exactly_one_path() {
        // stem+suffix mass equals count for stemmable words; whole-word mass
        // equals count otherwise
        let freq = table(&[("advise", 10), ("advised", 5), ("the", 7)]);
        let stats = populate_semantic_segment(&freq, &config(64, 0.9));
        let m = masses(&stats);
        let total_mass: u64 = m.values().sum();
        // advise: 10 to advis + 10 to ##e; advised: 5 to advis + 5 to ##ed;
        // the: 7 whole
        assert_eq!(total_mass, 10 * 2 + 5 * 2 + 7);
    }

    #[test]
    fn scores_are_log_relative_mass() {
        let stats = vec![
            CandidateStats {
                token: "x".into(),
                occurrence_mass: 3,
            },
            CandidateStats {
                token: "y".into(),
                occurrence_mass: 1,
            },
        ];
        let scores = compute_scores(&stats);
        assert!((scores[0] - 0.75f64.ln()).abs() < 1e-12);
        assert!((scores[1] - 0.25f64.ln()).abs() < 1e-12);

        let single = vec![CandidateStats {
            token: "z".into(),
            occurrence_mass: 7,
        }];
        assert_eq!(compute_scores(&single), vec![0.0]);

        let uniform = vec![
            CandidateStats {
                token: "a".into(),
                occurrence_mass: 1,
            },
            CandidateStats {
                token: "b".into(),
                occurrence_mass: 1,
            },
        ];
        let scores = compute_scores(&uniform);
        assert!((scores[0] - 0.5f64.ln()).abs() < 1e-12);
        assert_eq!(scores[0], scores[1]);
    }

    #[test]
    fn residual_budget_zero_yields_empty_segment() {
        let freq = table(&[("advise", 10)]);
        let cfg = config(7, 1.0);
        let v1 = populate_semantic_segment(&freq, &cfg);
        assert_eq!(v1.len(), 2);
        let v2 = train_bpe_residual(&freq, &v1, &cfg);
        assert!(v2.is_empty());
    }

    #[test]
    fn residual_covers_unencodable_words() {
        // capacity 3 holds advis/##e/##ed, so "qx" misses the semantic
        // segment and must be rescued by the residual alphabet
        let freq = table(&[("advise", 10), ("advised", 8), ("qx", 3)]);
        let cfg = config(16, 0.3); // capacity round(0.3*11) = 3
        let v1 = populate_semantic_segment(&freq, &cfg);
        assert!(!v1.iter().any(|c| c.token == "qx"));
        let v2 = train_bpe_residual(&freq, &v1, &cfg);
        assert!(!v2.is_empty());
        let (vocab, _) = train_from_table(&freq, &cfg).unwrap();
        let pieces = encode_word("qx", &vocab, DEFAULT_MAX_WORD_CHARS);
        assert_ne!(pieces, vec![UNK_TOKEN]);
    }

    #[test]
    fn train_is_deterministic_and_order_independent() {
        let docs = ["the cat advises", "the dog advised", "cats and dogs"];
        let cfg = config(48, 0.8);
        let (v1, _) = train(docs, &cfg).unwrap();
        let (v2, _) = train(docs, &cfg).unwrap();
        assert_eq!(v1.to_model_bytes(), v2.to_model_bytes());

        let permuted = ["cats and dogs", "the dog advised", "the cat advises"];
        let (v3, _) = train(permuted, &cfg).unwrap();
        assert_eq!(v1.to_model_bytes(), v3.to_model_bytes());
    }

    #[test]
    fn f_one_leaves_no_residual_segment() {
        // "qx" occurs once and min_frequency keeps it out of the semantic
        // segment; with f = 1.0 there is no residual segment to rescue it
        let freq = table(&[("advise", 10), ("qx", 1)]);
        let cfg = TrainerConfig {
            min_frequency: 2,
            ..config(64, 1.0)
        };
        let (vocab, summary) = train_from_table(&freq, &cfg).unwrap();
        assert_eq!(summary.residual_tokens, 0);
        assert_eq!(vocab.realized_fraction(), 1.0);
        // with no alphabet, the uncovered word stays [UNK]
        let pieces = encode_word("qx", &vocab, DEFAULT_MAX_WORD_CHARS);
        assert_eq!(pieces, vec![UNK_TOKEN]);
    }

    #[test]
    fn capacity_bound_holds() {
        let docs = ["a b c d e f g advise advised advising conditioner conditions"];
        for f in [0.3, 0.6, 0.9] {
            let cfg = config(24, f);
            let (vocab, summary) = train(docs, &cfg).unwrap();
            assert!(summary.semantic_tokens <= cfg.semantic_capacity());
            assert!(vocab.len() <= cfg.vocab_size);
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let err = train(Vec::<&str>::new(), &config(16, 0.9)).unwrap_err();
        assert!(err.to_string().contains("no words"));
    }

    #[test]
    fn summary_prints_key_value_lines() {
        let (_, summary) = train(["the cat sat"], &config(16, 0.9)).unwrap();
        let text = summary.to_string();
        for key in [
            "vocab_size:",
            "special_tokens:",
            "semantic_tokens:",
            "residual_tokens:",
            "realized_f:",
            "residual_words:",
        ] {
            assert!(text.contains(key), "missing {key} in {text}");
        }
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let bad = [
            TrainerConfig {
                vocab_size: 3,
                ..TrainerConfig::default()
            },
            TrainerConfig {
                semantic_fraction: 0.0,
                ..TrainerConfig::default()
            },
            TrainerConfig {
                semantic_fraction: 1.5,
                ..TrainerConfig::default()
            },
            TrainerConfig {
                character_coverage: 0.0,
                ..TrainerConfig::default()
            },
            TrainerConfig {
                specials: vec!["[PAD]".into()],
                ..TrainerConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
