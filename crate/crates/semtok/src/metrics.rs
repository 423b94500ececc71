//! Vocabulary efficiency measurements: wordform coverage, subword counts
//! per word, UNK rates and stem usage, plus side-by-side comparison reports.
//!
//! Statistics weight each distinct corpus word once; occurrence-weighted
//! variants are computed separately where they differ.

use std::fmt;

use crate::codec::{encode_word, DEFAULT_MAX_WORD_CHARS};
use crate::corpus::WordFrequencyTable;
use crate::stemmer::{split_stem_suffix, DEFAULT_MIN_STEM_LENGTH};
use crate::vocab::{Vocabulary, UNK_TOKEN};

/// Subword-efficiency measurements of one vocabulary over one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyReport {
    /// Distinct words encodable in at most 2 non-UNK pieces.
    pub wordforms_le2: u64,
    /// Mean pieces per distinct word; UNK words count as one piece.
    pub avg_pieces: f64,
    /// Coefficient of variation of per-word piece counts, in percent
    /// (population standard deviation over mean).
    pub cov: f64,
    /// Fraction of distinct words that encode to `[UNK]`.
    pub unk_word_rate: f64,
    /// Occurrence-weighted `[UNK]` fraction.
    pub occurrence_unk_rate: f64,
    /// Fraction of stemmable distinct words whose encoding starts with
    /// their stem.
    pub stem_usage_rate: f64,
}

fn word_pieces(vocab: &Vocabulary, word: &str) -> (usize, bool) {
    let pieces = encode_word(word, vocab, DEFAULT_MAX_WORD_CHARS);
    let unk = pieces.first() == Some(&UNK_TOKEN);
    (pieces.len(), unk)
}

/// Distinct words of `freq` whose encoding uses at most `max_pieces` pieces
/// and no `[UNK]`.
pub fn wordform_coverage(vocab: &Vocabulary, freq: &WordFrequencyTable, max_pieces: usize) -> u64 {
    freq.iter()
        .filter(|(word, _)| {
            let (n, unk) = word_pieces(vocab, word);
            !unk && n <= max_pieces
        })
        .count() as u64
}

/// Mean and coefficient of variation (percent) of pieces per distinct word.
pub fn subword_stats(vocab: &Vocabulary, freq: &WordFrequencyTable) -> (f64, f64) {
    piece_count_stats(freq.iter().map(|(word, _)| {
        let (n, _) = word_pieces(vocab, word);
        (n, 1u64)
    }))
}

/// Occurrence-weighted variant of [`subword_stats`].
pub fn occurrence_subword_stats(vocab: &Vocabulary, freq: &WordFrequencyTable) -> (f64, f64) {
    piece_count_stats(freq.iter().map(|(word, count)| {
        let (n, _) = word_pieces(vocab, word);
        (n, count)
    }))
}

fn piece_count_stats<I: Iterator<Item = (usize, u64)>>(counts: I) -> (f64, f64) {
    let mut total_weight = 0u64;
    let mut sum = 0f64;
    let mut sum_sq = 0f64;
    for (n, weight) in counts {
        let w = weight as f64;
        total_weight += weight;
        sum += n as f64 * w;
        sum_sq += (n * n) as f64 * w;
    }
    if total_weight == 0 {
        return (0.0, 0.0);
    }
    let mean = sum / total_weight as f64;
    let variance = (sum_sq / total_weight as f64 - mean * mean).max(0.0);
    let cov = if mean > 0.0 {
        variance.sqrt() / mean * 100.0
    } else {
        0.0
    };
    (mean, cov)
}

/// Distinct-word and occurrence-weighted `[UNK]` rates.
pub fn unk_rates(vocab: &Vocabulary, freq: &WordFrequencyTable) -> (f64, f64) {
    let mut unk_words = 0u64;
    let mut unk_mass = 0u64;
    for (word, count) in freq.iter() {
        let (_, unk) = word_pieces(vocab, word);
        if unk {
            unk_words += 1;
            unk_mass += count;
        }
    }
    let distinct = freq.distinct() as f64;
    let total = freq.total() as f64;
    (
        if distinct > 0.0 { unk_words as f64 / distinct } else { 0.0 },
        if total > 0.0 { unk_mass as f64 / total } else { 0.0 },
    )
}

/// Fraction of stemmable distinct words whose first piece is their stem.
pub fn stem_usage_rate(
    vocab: &Vocabulary,
    freq: &WordFrequencyTable,
    min_stem_length: usize,
) -> f64 {
    let mut stemmable = 0u64;
    let mut used = 0u64;
    for (word, _) in freq.iter() {
        let Some(split) = split_stem_suffix(word, min_stem_length) else {
            continue;
        };
        stemmable += 1;
        let pieces = encode_word(word, vocab, DEFAULT_MAX_WORD_CHARS);
        if pieces.first() == Some(&split.stem) {
            used += 1;
        }
    }
    if stemmable == 0 {
        0.0
    } else {
        used as f64 / stemmable as f64
    }
}

/// Compute the full report. `max_pieces` bounds the coverage count (2 in
/// the headline measurement).
pub fn efficiency_report(
    vocab: &Vocabulary,
    freq: &WordFrequencyTable,
    max_pieces: usize,
) -> EfficiencyReport {
    let (avg_pieces, cov) = subword_stats(vocab, freq);
    let (unk_word_rate, occurrence_unk_rate) = unk_rates(vocab, freq);
    EfficiencyReport {
        wordforms_le2: wordform_coverage(vocab, freq, max_pieces),
        avg_pieces,
        cov,
        unk_word_rate,
        occurrence_unk_rate,
        stem_usage_rate: stem_usage_rate(vocab, freq, DEFAULT_MIN_STEM_LENGTH),
    }
}

impl EfficiencyReport {
    fn rows(&self) -> [(&'static str, String); 6] {
        [
            ("wordforms_le2", format!("{}", self.wordforms_le2)),
            ("avg_pieces", format!("{:.4}", self.avg_pieces)),
            ("cov", format!("{:.2}", self.cov)),
            ("unk_word_rate", format!("{:.6}", self.unk_word_rate)),
            (
                "occurrence_unk_rate",
                format!("{:.6}", self.occurrence_unk_rate),
            ),
            ("stem_usage_rate", format!("{:.6}", self.stem_usage_rate)),
        ]
    }

    pub fn to_tsv(&self) -> String {
        self.rows()
            .iter()
            .map(|(k, v)| format!("{k}\t{v}\n"))
            .collect()
    }
}

impl fmt::Display for EfficiencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.rows() {
            writeln!(f, "{k:<22} {v:>14}")?;
        }
        Ok(())
    }
}

/// Two reports over the same corpus with their per-field deltas
/// (left minus right).
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub left_name: String,
    pub right_name: String,
    pub left: EfficiencyReport,
    pub right: EfficiencyReport,
}

/// Side-by-side reports of two vocabularies over one corpus.
pub fn compare_vocabularies(
    left: &Vocabulary,
    right: &Vocabulary,
    freq: &WordFrequencyTable,
    max_pieces: usize,
) -> ComparisonReport {
    ComparisonReport {
        left_name: "model".to_string(),
        right_name: "baseline".to_string(),
        left: efficiency_report(left, freq, max_pieces),
        right: efficiency_report(right, freq, max_pieces),
    }
}

impl ComparisonReport {
    fn delta_rows(&self) -> Vec<(&'static str, String, String, String)> {
        let l = self.left.rows();
        let r = self.right.rows();
        let deltas = [
            format!(
                "{:+}",
                self.left.wordforms_le2 as i64 - self.right.wordforms_le2 as i64
            ),
            format!("{:+.4}", self.left.avg_pieces - self.right.avg_pieces),
            format!("{:+.2}", self.left.cov - self.right.cov),
            format!("{:+.6}", self.left.unk_word_rate - self.right.unk_word_rate),
            format!(
                "{:+.6}",
                self.left.occurrence_unk_rate - self.right.occurrence_unk_rate
            ),
            format!(
                "{:+.6}",
                self.left.stem_usage_rate - self.right.stem_usage_rate
            ),
        ];
        l.into_iter()
            .zip(r)
            .zip(deltas)
            .map(|(((k, lv), (_, rv)), d)| (k, lv, rv, d))
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "metric\t{}\t{}\tdelta\n",
            self.left_name, self.right_name
        );
        for (k, l, r, d) in self.delta_rows() {
            out.push_str(&format!("{k}\t{l}\t{r}\t{d}\n"));
        }
        out
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<22} {:>14} {:>14} {:>14}",
            "metric", self.left_name, self.right_name, "delta"
        )?;
        for (k, l, r, d) in self.delta_rows() {
            writeln!(f, "{k:<22} {l:>14} {r:>14} {d:>14}")?;
        }
        Ok(())
    }
}
