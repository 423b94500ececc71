//! Greedy longest-match-first encoding and decoding.
//!
//! A word encodes as the longest vocabulary token that prefixes it, followed
//! by the longest continuation token matching each remainder. A word with no
//! match at any step, or longer than the word-length guard, encodes as the
//! single `[UNK]` piece. `[UNK]` is a value, not an error.

use crate::corpus::{normalize_text, split_words, NormalizationConfig};
use crate::error::{Error, Result};
use crate::vocab::{TokenKind, Vocabulary, CONTINUATION_MARKER, UNK_TOKEN};

/// Words longer than this many chars encode as `[UNK]` outright.
pub const DEFAULT_MAX_WORD_CHARS: usize = 100;

/// A token-id sequence with its parallel piece strings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Encoding {
    pub ids: Vec<u32>,
    pub pieces: Vec<String>,
    /// Indices of `[UNK]` outputs within `pieces`.
    pub unk_positions: Vec<usize>,
}

impl Encoding {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Encode one normalized, whitespace-free word into piece strings.
pub fn encode_word<'v>(word: &str, vocab: &'v Vocabulary, max_word_chars: usize) -> Vec<&'v str> {
    debug_assert!(!word.is_empty() && !word.chars().any(char::is_whitespace));
    // char boundaries, so probes only slice at valid offsets
    let mut boundaries: Vec<usize> = word.char_indices().map(|(i, _)| i).collect();
    boundaries.push(word.len());
    let n_chars = boundaries.len() - 1;
    if n_chars > max_word_chars {
        return vec![UNK_TOKEN];
    }

    let mut pieces: Vec<&'v str> = Vec::new();
    let mut pos = 0; // char index
    while pos < n_chars {
        let (longest, max_len) = if pos == 0 {
            (vocab.max_initial_chars(), n_chars)
        } else {
            (vocab.max_continuation_chars(), n_chars - pos)
        };
        let mut matched = None;
        let mut len = longest.min(max_len);
        while len > 0 {
            let slice = &word[boundaries[pos]..boundaries[pos + len]];
            let hit = if pos == 0 {
                vocab.match_initial(slice)
            } else {
                vocab.match_continuation(slice)
            };
            if let Some(id) = hit {
                matched = Some((id, len));
                break;
            }
            len -= 1;
        }
        match matched {
            Some((id, len)) => {
                let token = &vocab.entry(id).expect("matched id").token;
                pieces.push(token.as_str());
                pos += len;
            }
            None => return vec![UNK_TOKEN],
        }
    }
    pieces
}

/// Normalize, split and encode a text into one flat encoding. No special
/// tokens are inserted; framing is the caller's job.
pub fn encode_text(text: &str, vocab: &Vocabulary, norm: &NormalizationConfig) -> Result<Encoding> {
    let normalized = normalize_text(text, norm);
    let mut enc = Encoding::default();
    for word in split_words(&normalized) {
        for piece in encode_word(word, vocab, DEFAULT_MAX_WORD_CHARS) {
            let id = match vocab.lookup(piece) {
                Some(id) => id,
                None if piece == UNK_TOKEN => vocab
                    .unk_id()
                    .ok_or_else(|| Error::MissingSpecial(UNK_TOKEN.to_string()))?,
                None => unreachable!("piece strings come from the vocabulary"),
            };
            if piece == UNK_TOKEN {
                enc.unk_positions.push(enc.pieces.len());
            }
            enc.ids.push(id);
            enc.pieces.push(piece.to_string());
        }
    }
    Ok(enc)
}

/// Decode ids back to text: continuation pieces append to the current word,
/// anything else starts a new space-separated word.
pub fn decode(ids: &[u32], vocab: &Vocabulary) -> Result<String> {
    let mut out = String::new();
    for &id in ids {
        let entry = vocab.entry(id).ok_or(Error::TokenIdRange(id))?;
        match entry.kind {
            TokenKind::Continuation => {
                out.push_str(&entry.token[CONTINUATION_MARKER.len()..]);
            }
            TokenKind::Initial => {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&entry.token);
            }
        }
    }
    Ok(out)
}
