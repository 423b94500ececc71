//! English Snowball (Porter 2) stemming and stem/suffix decomposition.
//!
//! [`stem`] produces the Porter 2 stem of a lowercase word. [`split_stem_suffix`]
//! turns that into a concatenative decomposition: a word decomposes only when
//! its stem is an exact character prefix, so that `stem + suffix` reassembles
//! the original word. Stems that rewrite letters (`happy` → `happi`) leave
//! the word undecomposed and it is handled whole.

mod porter2;

pub const DEFAULT_MIN_STEM_LENGTH: usize = 2;

/// Porter 2 stem of `word`. Deterministic; non-alphabetic words come back
/// unchanged by the algorithm's own rules.
pub fn stem(word: &str) -> String {
    porter2::stem(word)
}

/// A word split into its stem and the remaining suffix.
/// `stem` and `suffix` are slices of the original word, so reassembly is
/// exact by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StemSplit<'a> {
    pub stem: &'a str,
    pub suffix: &'a str,
}

/// Decompose `word` into stem + suffix when the Porter 2 stem is a strict,
/// exact character prefix of the word with at least `min_stem_length` chars.
/// Returns `None` when no such decomposition exists.
pub fn split_stem_suffix(word: &str, min_stem_length: usize) -> Option<StemSplit<'_>> {
    let stem = stem(word);
    if stem.is_empty() || stem.len() >= word.len() || !word.starts_with(&stem) {
        return None;
    }
    if stem.chars().count() < min_stem_length {
        return None;
    }
    Some(StemSplit {
        stem: &word[..stem.len()],
        suffix: &word[stem.len()..],
    })
}
