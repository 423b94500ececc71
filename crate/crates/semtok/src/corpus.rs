//! Corpus ingestion: text normalization, word splitting and word-frequency
//! tables.
//!
//! The word boundary policy is fixed: words are separated by Unicode
//! whitespace, and every punctuation or symbol character (general categories
//! P and S) forms its own single-character word. Digits stay attached to the
//! surrounding word.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use unicode_normalization::UnicodeNormalization;
use unicode_properties::{GeneralCategoryGroup, UnicodeGeneralCategory};

use crate::error::{Error, Result};

/// Unicode normalization form applied before any other processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnicodeForm {
    Nfc,
    Nfkc,
}

/// Text normalization policy. Defaults to NFKC + lowercase + control-char
/// stripping, which matches uncased BERT-style preprocessing.
#[derive(Debug, Clone)]
pub struct NormalizationConfig {
    pub lowercase: bool,
    pub unicode_form: UnicodeForm,
    /// Replace control characters (category Cc) with a space.
    pub strip_control: bool,
}

impl Default for NormalizationConfig {
    fn default() -> Self {
        NormalizationConfig {
            lowercase: true,
            unicode_form: UnicodeForm::Nfkc,
            strip_control: true,
        }
    }
}

/// Normalize `text` according to `config`. Idempotent: applying it twice
/// yields the same string as applying it once.
pub fn normalize_text(text: &str, config: &NormalizationConfig) -> String {
    let normalized = apply_form(text, config.unicode_form);
    let mut out = String::with_capacity(normalized.len());
    for ch in normalized.chars() {
        if config.strip_control && ch.is_control() {
            out.push(' ');
        } else if config.lowercase {
            out.extend(ch.to_lowercase());
        } else {
            out.push(ch);
        }
    }
    // Case mapping can denormalize combining sequences; restore the form.
    apply_form(&out, config.unicode_form)
}

fn apply_form(text: &str, form: UnicodeForm) -> String {
    match form {
        UnicodeForm::Nfc => text.nfc().collect(),
        UnicodeForm::Nfkc => text.nfkc().collect(),
    }
}

/// Split normalized text into words: whitespace separates, punctuation and
/// symbol characters become single-character words.
pub fn split_words(text: &str) -> WordIter<'_> {
    WordIter { text, pos: 0 }
}

pub struct WordIter<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Iterator for WordIter<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        let bytes_len = self.text.len();
        let mut start = self.pos;
        // skip leading whitespace
        for (i, ch) in self.text[self.pos..].char_indices() {
            if !ch.is_whitespace() {
                start = self.pos + i;
                break;
            }
            start = self.pos + i + ch.len_utf8();
        }
        if start >= bytes_len {
            self.pos = bytes_len;
            return None;
        }
        let mut iter = self.text[start..].char_indices();
        let (_, first) = iter.next().expect("non-empty remainder");
        if is_punctuation_or_symbol(first) {
            let end = start + first.len_utf8();
            self.pos = end;
            return Some(&self.text[start..end]);
        }
        let mut end = bytes_len;
        for (i, ch) in iter {
            if ch.is_whitespace() || is_punctuation_or_symbol(ch) {
                end = start + i;
                break;
            }
        }
        self.pos = end;
        Some(&self.text[start..end])
    }
}

fn is_punctuation_or_symbol(ch: char) -> bool {
    matches!(
        ch.general_category_group(),
        GeneralCategoryGroup::Punctuation | GeneralCategoryGroup::Symbol
    )
}

/// Distinct normalized words of a corpus with their occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordFrequencyTable {
    entries: HashMap<String, u64>,
    total: u64,
}

impl WordFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record `n` occurrences of `word`. Empty words and words containing
    /// whitespace are rejected by debug assertion; they cannot be produced
    /// by `split_words`.
    pub fn add(&mut self, word: &str, n: u64) {
        debug_assert!(!word.is_empty() && !word.chars().any(char::is_whitespace));
        if n == 0 {
            return;
        }
        *self.entries.entry(word.to_string()).or_insert(0) += n;
        self.total += n;
    }

    /// Merge another table into this one. Commutative and associative, so
    /// sharded counting yields the same table regardless of partitioning.
    pub fn merge(&mut self, other: &WordFrequencyTable) {
        for (word, count) in &other.entries {
            *self.entries.entry(word.clone()).or_insert(0) += count;
        }
        self.total += other.total;
    }

    pub fn count(&self, word: &str) -> u64 {
        self.entries.get(word).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(w, c)| (w.as_str(), *c))
    }

    /// Entries sorted by descending count, ties broken by word order.
    /// This is the canonical iteration order of the trainer.
    pub fn sorted_entries(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.iter().collect();
        v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Count words from one document/line of already-raw text.
    pub fn add_line(&mut self, line: &str, config: &NormalizationConfig) {
        let normalized = normalize_text(line, config);
        for word in split_words(&normalized) {
            self.add(word, 1);
        }
    }

    /// Debug export: `word<TAB>count` lines, descending count then word.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (word, count) in self.sorted_entries() {
            writeln!(w, "{word}\t{count}")?;
        }
        Ok(())
    }
}

/// Build a frequency table from an iterator of documents (typically lines).
pub fn build_frequency_table<I, S>(lines: I, config: &NormalizationConfig) -> WordFrequencyTable
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut table = WordFrequencyTable::new();
    for line in lines {
        table.add_line(line.as_ref(), config);
    }
    table
}

/// Build a frequency table from UTF-8 text files. Each input path may be a
/// file or a directory tree of files; one document per line.
pub fn build_frequency_table_from_files(
    paths: &[PathBuf],
    config: &NormalizationConfig,
) -> Result<WordFrequencyTable> {
    let mut table = WordFrequencyTable::new();
    for path in collect_corpus_files(paths)? {
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        let mut reader = BufReader::new(file);
        let mut buf = Vec::new();
        let mut offset = 0usize;
        loop {
            buf.clear();
            let n = reader
                .read_until(b'\n', &mut buf)
                .map_err(|e| Error::io(&path, e))?;
            if n == 0 {
                break;
            }
            let line = std::str::from_utf8(&buf).map_err(|e| Error::Decode {
                path: path.clone(),
                offset: offset + e.valid_up_to(),
            })?;
            table.add_line(line, config);
            offset += n;
        }
    }
    Ok(table)
}

/// Expand files and directory trees into a deterministic, sorted file list.
pub fn collect_corpus_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in paths {
        walk(path, &mut files)?;
    }
    files.sort();
    Ok(files)
}

fn walk(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let meta = std::fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_dir() {
        for entry in std::fs::read_dir(path).map_err(|e| Error::io(path, e))? {
            let entry = entry.map_err(|e| Error::io(path, e))?;
            walk(&entry.path(), out)?;
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

/// Read a whole file into lines, reporting I/O and UTF-8 errors with the
/// file identity.
pub fn read_lines(path: &Path) -> Result<Vec<String>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    Ok(text.lines().map(str::to_string).collect())
}
