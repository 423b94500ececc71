//! The vocabulary data model: ordered token entries across a special, a
//! semantic (stem/suffix) and a residual (BPE) segment, with exact-match
//! lookup, a line-oriented model file format and BERT-style `vocab.txt`
//! export.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Marker carried by continuation (word-internal) tokens.
pub const CONTINUATION_MARKER: &str = "##";

/// Reserved tokens, in id order.
pub const DEFAULT_SPECIALS: [&str; 5] = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"];

pub const UNK_TOKEN: &str = "[UNK]";

const MODEL_MAGIC: &str = "#semtok";
const MODEL_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    /// Starts a word.
    Initial,
    /// Continues a word; token text carries the `##` marker.
    Continuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Special,
    Semantic,
    Residual,
}

impl Segment {
    fn code(self) -> char {
        match self {
            Segment::Special => 'S',
            Segment::Semantic => 'M',
            Segment::Residual => 'R',
        }
    }
}

/// One vocabulary token.
#[derive(Debug, Clone, PartialEq)]
pub struct VocabEntry {
    pub token: String,
    pub kind: TokenKind,
    pub segment: Segment,
    /// Log relative occurrence mass; 0 for specials, ≤ 0 otherwise.
    pub score: f64,
    pub id: u32,
}

/// An immutable token set V = specials ∪ semantic ∪ residual with dense ids
/// and exact-match lookup. Safe to share across concurrent encoders.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<String, u32>,
    /// Initial tokens of the semantic/residual segments, keyed by token text.
    match_initial: HashMap<String, u32>,
    /// Continuation tokens keyed by payload (marker stripped).
    match_continuation: HashMap<String, u32>,
    special_count: u32,
    max_initial_chars: usize,
    max_continuation_chars: usize,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl Vocabulary {
    /// Assemble a vocabulary from its segments. Scores are quantized to the
    /// serialized precision (6 decimals) so that serialization round-trips
    /// to structural equality.
    pub fn from_segments(
        specials: &[String],
        semantic: Vec<(String, f64)>,
        residual: Vec<(String, f64)>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(specials.len() + semantic.len() + residual.len());
        for token in specials {
            entries.push((token.clone(), Segment::Special, 0.0));
        }
        for (token, score) in semantic {
            entries.push((token, Segment::Semantic, score));
        }
        for (token, score) in residual {
            entries.push((token, Segment::Residual, score));
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(id, (token, segment, score))| {
                let kind = kind_of(&token);
                VocabEntry {
                    token,
                    kind,
                    segment,
                    score: quantize_score(score),
                    id: id as u32,
                }
            })
            .collect();
        Self::from_entries(entries)
    }

    /// Validate invariants and build the lookup indexes.
    pub fn from_entries(entries: Vec<VocabEntry>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        let mut match_initial = HashMap::new();
        let mut match_continuation = HashMap::new();
        let mut special_count = 0u32;
        let mut past_specials = false;
        let mut max_initial_chars = 0;
        let mut max_continuation_chars = 0;

        for (i, entry) in entries.iter().enumerate() {
            let line = i + 1;
            if entry.id as usize != i {
                return Err(Error::parse(line, format!("non-dense id {}", entry.id)));
            }
            if entry.token.is_empty() {
                return Err(Error::parse(line, "empty token"));
            }
            if entry.token.contains(['\t', '\n']) || entry.token.chars().any(char::is_whitespace) {
                return Err(Error::parse(line, "token contains whitespace"));
            }
            let marked = entry.token.starts_with(CONTINUATION_MARKER);
            match entry.kind {
                TokenKind::Continuation => {
                    if !marked || entry.token.len() == CONTINUATION_MARKER.len() {
                        return Err(Error::parse(
                            line,
                            format!("continuation token {:?} lacks a marked payload", entry.token),
                        ));
                    }
                }
                TokenKind::Initial => {
                    if marked {
                        return Err(Error::parse(
                            line,
                            format!("initial token {:?} carries the continuation marker", entry.token),
                        ));
                    }
                }
            }
            match entry.segment {
                Segment::Special => {
                    if past_specials {
                        return Err(Error::parse(line, "special token after non-special entries"));
                    }
                    if entry.score != 0.0 {
                        return Err(Error::parse(line, "special token with nonzero score"));
                    }
                    special_count += 1;
                }
                _ => {
                    past_specials = true;
                    if entry.score > 0.0 {
                        return Err(Error::parse(
                            line,
                            format!("positive score {} for {:?}", entry.score, entry.token),
                        ));
                    }
                }
            }
            if index.insert(entry.token.clone(), entry.id).is_some() {
                return Err(Error::parse(line, format!("duplicate token {:?}", entry.token)));
            }
            if entry.segment != Segment::Special {
                match entry.kind {
                    TokenKind::Initial => {
                        max_initial_chars = max_initial_chars.max(entry.token.chars().count());
                        match_initial.insert(entry.token.clone(), entry.id);
                    }
                    TokenKind::Continuation => {
                        let payload = entry.token[CONTINUATION_MARKER.len()..].to_string();
                        max_continuation_chars = max_continuation_chars.max(payload.chars().count());
                        match_continuation.insert(payload, entry.id);
                    }
                }
            }
        }

        Ok(Vocabulary {
            entries,
            index,
            match_initial,
            match_continuation,
            special_count,
            max_initial_chars,
            max_continuation_chars,
        })
    }

    /// Exact-match token lookup.
    pub fn lookup(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn entry(&self, id: u32) -> Option<&VocabEntry> {
        self.entries.get(id as usize)
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn special_count(&self) -> usize {
        self.special_count as usize
    }

    pub fn unk_id(&self) -> Option<u32> {
        self.lookup(UNK_TOKEN)
    }

    /// Realized semantic fraction: semantic entries over non-special entries.
    pub fn realized_fraction(&self) -> f64 {
        let non_special = self.len() - self.special_count();
        if non_special == 0 {
            return 0.0;
        }
        let semantic = self
            .entries
            .iter()
            .filter(|e| e.segment == Segment::Semantic)
            .count();
        semantic as f64 / non_special as f64
    }

    pub fn segment_len(&self, segment: Segment) -> usize {
        self.entries.iter().filter(|e| e.segment == segment).count()
    }

    /// Longest initial match for a prefix of `word` (greedy encoder hook).
    pub(crate) fn match_initial(&self, text: &str) -> Option<u32> {
        self.match_initial.get(text).copied()
    }

    /// Longest continuation match for `payload` (marker already stripped).
    pub(crate) fn match_continuation(&self, payload: &str) -> Option<u32> {
        self.match_continuation.get(payload).copied()
    }

    pub(crate) fn max_initial_chars(&self) -> usize {
        self.max_initial_chars
    }

    pub(crate) fn max_continuation_chars(&self) -> usize {
        self.max_continuation_chars
    }

    /// Write the model file: a two-line header followed by one
    /// `token<TAB>score<TAB>kind<TAB>segment` line per token in id order.
    /// Byte-deterministic for a given vocabulary.
    pub fn write_model<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{MODEL_MAGIC}\t{MODEL_VERSION}")?;
        writeln!(w, "#f\t{:.6}", self.realized_fraction())?;
        for e in &self.entries {
            let kind = match e.kind {
                TokenKind::Initial => 'I',
                TokenKind::Continuation => 'C',
            };
            writeln!(w, "{}\t{:.6}\t{}\t{}", e.token, e.score, kind, e.segment.code())?;
        }
        Ok(())
    }

    pub fn to_model_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_model(&mut buf).expect("write to Vec cannot fail");
        buf
    }

    /// Parse a model file produced by [`write_model`] (or written by hand in
    /// the same format), verifying all vocabulary invariants.
    pub fn read_model<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();

        let header = match lines.next() {
            Some((_, line)) => line.map_err(|e| Error::parse(1, e.to_string()))?,
            None => return Err(Error::parse(1, "missing header")),
        };
        let mut fields = header.split('\t');
        if fields.next() != Some(MODEL_MAGIC) {
            return Err(Error::parse(1, "missing header"));
        }
        match fields.next() {
            Some(MODEL_VERSION) => {}
            Some(v) => return Err(Error::parse(1, format!("unsupported format version {v:?}"))),
            None => return Err(Error::parse(1, "missing format version")),
        }

        let fline = match lines.next() {
            Some((_, line)) => line.map_err(|e| Error::parse(2, e.to_string()))?,
            None => return Err(Error::parse(2, "missing #f line")),
        };
        let declared_f = match fline.strip_prefix("#f\t") {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::parse(2, format!("bad fraction {v:?}")))?,
            None => return Err(Error::parse(2, "missing #f line")),
        };
        if !(0.0..=1.0).contains(&declared_f) {
            return Err(Error::parse(2, format!("fraction {declared_f} out of range")));
        }

        let mut entries = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields
                .next()
                .filter(|t| !t.is_empty())
                .ok_or_else(|| Error::parse(lineno, "empty token"))?;
            let score: f64 = fields
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(lineno, "bad score"))?;
            if !score.is_finite() {
                return Err(Error::parse(lineno, "bad score"));
            }
            let kind = match fields.next() {
                Some("I") => TokenKind::Initial,
                Some("C") => TokenKind::Continuation,
                other => return Err(Error::parse(lineno, format!("bad kind {other:?}"))),
            };
            let segment = match fields.next() {
                Some("S") => Segment::Special,
                Some("M") => Segment::Semantic,
                Some("R") => Segment::Residual,
                other => return Err(Error::parse(lineno, format!("bad segment {other:?}"))),
            };
            if fields.next().is_some() {
                return Err(Error::parse(lineno, "trailing fields"));
            }
            entries.push(VocabEntry {
                token: token.to_string(),
                kind,
                segment,
                score: normalize_zero(score),
                id: entries.len() as u32,
            });
        }

        let vocab = Self::from_entries(entries).map_err(shift_parse_lines)?;
        let realized = vocab.realized_fraction();
        if format!("{declared_f:.6}") != format!("{realized:.6}") {
            return Err(Error::parse(
                2,
                format!("declared fraction {declared_f:.6} != realized {realized:.6}"),
            ));
        }
        Ok(vocab)
    }

    pub fn from_model_bytes(bytes: &[u8]) -> Result<Self> {
        Self::read_model(bytes)
    }

    /// BERT-compatible export: one token per line in id order.
    pub fn write_bert_vocab<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for e in &self.entries {
            writeln!(w, "{}", e.token)?;
        }
        Ok(())
    }
}

fn kind_of(token: &str) -> TokenKind {
    if token.starts_with(CONTINUATION_MARKER) {
        TokenKind::Continuation
    } else {
        TokenKind::Initial
    }
}

/// Quantize to the 6-decimal serialized precision so equality survives a
/// serialize/deserialize round trip.
fn quantize_score(score: f64) -> f64 {
    let q: f64 = format!("{score:.6}").parse().expect("formatted float");
    normalize_zero(q)
}

fn normalize_zero(score: f64) -> f64 {
    if score == 0.0 {
        0.0
    } else {
        score
    }
}

/// Entry validation errors from `from_entries` count lines from the first
/// entry; model files carry a two-line header before the entries.
fn shift_parse_lines(err: Error) -> Error {
    match err {
        Error::ModelParse { line, message } => Error::ModelParse { line: line + 2, message },
        other => other,
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vocabulary of {} tokens ({} special, {} semantic, {} residual, f={:.4})",
            self.len(),
            self.special_count(),
            self.segment_len(Segment::Semantic),
            self.segment_len(Segment::Residual),
            self.realized_fraction()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specials() -> Vec<String> {
        DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect()
    }

    fn sample() -> Vocabulary {
        Vocabulary::from_segments(
            &specials(),
            vec![
                ("condit".to_string(), -0.5),
                ("##ion".to_string(), -1.25),
                ("the".to_string(), -0.1),
            ],
            vec![("x".to_string(), -3.0), ("##z".to_string(), -4.5)],
        )
        .unwrap()
    }

    #[test]
    fn lookup_finds_tokens() {
        let v = sample();
        assert_eq!(v.lookup("condit"), Some(5));
        assert_eq!(v.lookup("[UNK]"), Some(1));
        assert_eq!(v.lookup(""), None);
        assert_eq!(v.lookup("##zzz"), None);
    }

    #[test]
    fn ids_dense_and_specials_first() {
        let v = sample();
        for (i, e) in v.entries().iter().enumerate() {
            assert_eq!(e.id as usize, i);
        }
        assert_eq!(v.special_count(), 5);
        assert_eq!(v.entries()[0].segment, Segment::Special);
    }

    #[test]
    fn realized_fraction_counts_non_specials() {
        let v = sample();
        assert!((v.realized_fraction() - 3.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn model_round_trip() {
        let v = sample();
        let bytes = v.to_model_bytes();
        let back = Vocabulary::from_model_bytes(&bytes).unwrap();
        assert_eq!(v, back);
        // determinism: identical bytes on re-serialization
        assert_eq!(bytes, back.to_model_bytes());
    }

    #[test]
    fn model_rejects_duplicate_token() {
        let v = sample();
        let mut text = String::from_utf8(v.to_model_bytes()).unwrap();
        text.push_str("condit\t-0.500000\tI\tR\n");
        let err = Vocabulary::from_model_bytes(text.as_bytes()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("duplicate token"), "{msg}");
        assert!(msg.contains("line 13"), "{msg}");
    }

    #[test]
    fn model_rejects_empty_file() {
        let err = Vocabulary::from_model_bytes(b"").unwrap_err();
        assert!(err.to_string().contains("missing header"));
    }

    #[test]
    fn model_rejects_bad_score() {
        let text = "#semtok\t1\n#f\t1.000000\na\tnope\tI\tM\n";
        let err = Vocabulary::from_model_bytes(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("bad score"));
    }

    #[test]
    fn model_rejects_marker_kind_mismatch() {
        let text = "#semtok\t1\n#f\t1.000000\n##a\t-1.000000\tI\tM\n";
        let err = Vocabulary::from_model_bytes(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("continuation marker"));
    }

    #[test]
    fn bert_export_lists_tokens_in_id_order() {
        let v = Vocabulary::from_segments(
            &["[PAD]".to_string(), "[UNK]".to_string()],
            vec![("a".to_string(), -0.5)],
            vec![],
        )
        .unwrap();
        let mut out = Vec::new();
        v.write_bert_vocab(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "[PAD]\n[UNK]\na\n");
    }

    #[test]
    fn rejects_positive_scores() {
        let err = Vocabulary::from_segments(&specials(), vec![("a".to_string(), 0.5)], vec![])
            .unwrap_err();
        assert!(err.to_string().contains("positive score"));
    }
}
