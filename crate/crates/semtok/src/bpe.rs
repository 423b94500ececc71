//! Frequency-merge BPE: the comparison baseline trainer, and the engine that
//! fills the residual vocabulary segment.
//!
//! Merges are within-word only. Word-internal pieces carry the `##` marker,
//! so BPE tokens live in the same vocabulary space as semantic tokens and
//! encode through the same greedy codec.

use std::collections::{HashMap, HashSet};

use crate::corpus::WordFrequencyTable;
use crate::error::{Error, Result};
use crate::trainer::{compute_scores, CandidateStats, TrainerConfig};
use crate::vocab::{Vocabulary, CONTINUATION_MARKER};

/// One recorded merge. `rank` is the merge order, dense from 0. Pair
/// identity ignores word position: `left` is written bare and `right`
/// marked, but the rule merges matching adjacent pieces anywhere in a word,
/// and the merged piece keeps the position's own marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub rank: u32,
}

impl MergeRule {
    /// Word-initial form of the token produced by the merge.
    pub fn merged(&self) -> String {
        format!("{}{}", payload(&self.left), payload(&self.right))
    }
}

fn payload(piece: &str) -> &str {
    piece.strip_prefix(CONTINUATION_MARKER).unwrap_or(piece)
}

fn intern(s: String, symbols: &mut Vec<String>, ids: &mut HashMap<String, u32>) -> u32 {
    if let Some(&id) = ids.get(&s) {
        return id;
    }
    let id = symbols.len() as u32;
    ids.insert(s.clone(), id);
    symbols.push(s);
    id
}

/// Split a word into character pieces: first char bare, the rest marked.
pub fn char_pieces(word: &str) -> Vec<String> {
    word.chars()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 {
                c.to_string()
            } else {
                format!("{CONTINUATION_MARKER}{c}")
            }
        })
        .collect()
}

/// Apply merge rules to a word, lowest rank first, until none applies.
/// Characters without a single-char token in `alphabet` make the whole word
/// `[UNK]`-equivalent; the caller sees that as `None`.
pub fn apply_merges(word: &str, alphabet: &HashSet<char>, rules: &[MergeRule]) -> Option<Vec<String>> {
    if word.is_empty() || !word.chars().all(|c| alphabet.contains(&c)) {
        return None;
    }
    let mut pieces = char_pieces(word);
    loop {
        let mut applied = false;
        for rule in rules {
            let mut i = 0;
            while i + 1 < pieces.len() {
                if payload(&pieces[i]) == payload(&rule.left)
                    && payload(&pieces[i + 1]) == payload(&rule.right)
                {
                    let marker = if i == 0 { "" } else { CONTINUATION_MARKER };
                    pieces[i] = format!("{marker}{}{}", payload(&pieces[i]), payload(&pieces[i + 1]));
                    pieces.remove(i + 1);
                    applied = true;
                } else {
                    i += 1;
                }
            }
            if applied {
                break; // restart from the lowest rank
            }
        }
        if !applied {
            return Some(pieces);
        }
    }
}

/// Occurrence-weighted single-character statistics of a corpus.
pub(crate) struct CharStats {
    /// (char, word-initial mass, word-internal mass), ordered by total mass
    /// descending, ties by char.
    pub(crate) by_mass: Vec<(char, u64, u64)>,
    pub(crate) total_mass: u64,
}

pub(crate) fn char_stats(freq: &WordFrequencyTable) -> CharStats {
    let mut masses: HashMap<char, (u64, u64)> = HashMap::new();
    let mut total = 0u64;
    for (word, count) in freq.iter() {
        for (i, c) in word.chars().enumerate() {
            let slot = masses.entry(c).or_insert((0, 0));
            if i == 0 {
                slot.0 += count;
            } else {
                slot.1 += count;
            }
            total += count;
        }
    }
    let mut by_mass: Vec<(char, u64, u64)> = masses
        .into_iter()
        .map(|(c, (ini, cont))| (c, ini, cont))
        .collect();
    by_mass.sort_unstable_by(|a, b| {
        let ma = a.1 + a.2;
        let mb = b.1 + b.2;
        mb.cmp(&ma).then_with(|| a.0.cmp(&b.0))
    });
    CharStats {
        by_mass,
        total_mass: total,
    }
}

/// Smallest mass-ordered char prefix covering at least `coverage` of the
/// corpus character mass.
pub(crate) fn select_alphabet(stats: &CharStats, coverage: f64) -> Vec<(char, u64, u64)> {
    let need = (coverage * stats.total_mass as f64).ceil() as u64;
    let mut out = Vec::new();
    let mut cum = 0u64;
    for &(c, ini, cont) in &stats.by_mass {
        if cum >= need && !out.is_empty() {
            break;
        }
        cum += ini + cont;
        out.push((c, ini, cont));
    }
    out
}

pub(crate) struct BpeOutcome {
    pub(crate) candidates: Vec<CandidateStats>,
    pub(crate) merges: Vec<MergeRule>,
    pub(crate) alphabet: Vec<char>,
}

/// Seed the alphabet, then greedily merge the highest-frequency adjacent
/// piece pair (ties by lexicographic pair order) over `words`, inserting the
/// occurring word-initial and word-internal forms of each merged token until
/// `budget` insertions happen or no pair is left. Tokens in `skip` (and
/// duplicates) are merged through but never inserted.
///
/// Pieces are tracked as bare content; a piece is word-initial exactly when
/// it sits at position 0, so pair counts aggregate both positions.
pub(crate) fn train_pieces(
    words: &[(&str, u64)],
    alphabet: &[(char, u64, u64)],
    budget: usize,
    skip: &HashSet<String>,
) -> BpeOutcome {
    let mut candidates = Vec::new();
    let mut produced: HashSet<String> = HashSet::new();
    let push_candidate =
        |token: String, mass: u64, candidates: &mut Vec<CandidateStats>, produced: &mut HashSet<String>| {
            if candidates.len() < budget && mass > 0 && !skip.contains(&token) && produced.insert(token.clone()) {
                candidates.push(CandidateStats {
                    token,
                    occurrence_mass: mass,
                });
            }
        };

    for &(c, ini, cont) in alphabet {
        push_candidate(c.to_string(), ini, &mut candidates, &mut produced);
        push_candidate(
            format!("{CONTINUATION_MARKER}{c}"),
            cont,
            &mut candidates,
            &mut produced,
        );
    }

    let mut merges = Vec::new();
    if candidates.len() >= budget {
        return BpeOutcome {
            candidates,
            merges,
            alphabet: alphabet.iter().map(|&(c, _, _)| c).collect(),
        };
    }

    // interned piece contents; position 0 of a word is the initial piece
    let mut symbols: Vec<String> = Vec::new();
    let mut symbol_ids: HashMap<String, u32> = HashMap::new();

    let mut seqs: Vec<(Vec<u32>, u64)> = Vec::with_capacity(words.len());
    for &(word, count) in words {
        let seq: Vec<u32> = word
            .chars()
            .map(|c| intern(c.to_string(), &mut symbols, &mut symbol_ids))
            .collect();
        seqs.push((seq, count));
    }

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut pair_words: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
    for (w, (seq, count)) in seqs.iter().enumerate() {
        for pair in seq.windows(2) {
            let key = (pair[0], pair[1]);
            *pair_counts.entry(key).or_insert(0) += count;
            pair_words.entry(key).or_default().push(w as u32);
        }
    }

    while candidates.len() < budget && !pair_counts.is_empty() {
        // deterministic selection: max count, then smallest (left, right)
        let max_count = *pair_counts.values().max().expect("non-empty");
        let best = pair_counts
            .iter()
            .filter(|(_, &c)| c == max_count)
            .map(|(&pair, _)| pair)
            .min_by(|a, b| {
                (symbols[a.0 as usize].as_str(), symbols[a.1 as usize].as_str())
                    .cmp(&(symbols[b.0 as usize].as_str(), symbols[b.1 as usize].as_str()))
            })
            .expect("non-empty");

        let left = symbols[best.0 as usize].clone();
        let right = symbols[best.1 as usize].clone();
        let content = format!("{left}{right}");
        let merged_id = intern(content.clone(), &mut symbols, &mut symbol_ids);
        merges.push(MergeRule {
            left,
            right: format!("{CONTINUATION_MARKER}{right}"),
            rank: merges.len() as u32,
        });

        let affected = pair_words.remove(&best).unwrap_or_default();
        let mut seen: HashSet<u32> = HashSet::new();
        let mut initial_mass = 0u64;
        let mut internal_mass = 0u64;
        for w in affected {
            if !seen.insert(w) {
                continue;
            }
            let (seq, count) = &seqs[w as usize];
            let count = *count;
            if !seq.windows(2).any(|p| (p[0], p[1]) == best) {
                continue; // stale index entry
            }
            // retract current pair mass, rewrite, re-add
            for pair in seq.windows(2) {
                let key = (pair[0], pair[1]);
                if let Some(c) = pair_counts.get_mut(&key) {
                    *c -= count;
                    if *c == 0 {
                        pair_counts.remove(&key);
                    }
                }
            }
            let mut rewritten = Vec::with_capacity(seq.len());
            let mut i = 0;
            while i < seq.len() {
                if i + 1 < seq.len() && (seq[i], seq[i + 1]) == best {
                    if i == 0 {
                        initial_mass += count;
                    } else {
                        internal_mass += count;
                    }
                    rewritten.push(merged_id);
                    i += 2;
                } else {
                    rewritten.push(seq[i]);
                    i += 1;
                }
            }
            for pair in rewritten.windows(2) {
                let key = (pair[0], pair[1]);
                *pair_counts.entry(key).or_insert(0) += count;
                pair_words.entry(key).or_default().push(w);
            }
            seqs[w as usize].0 = rewritten;
        }

        push_candidate(content.clone(), initial_mass, &mut candidates, &mut produced);
        push_candidate(
            format!("{CONTINUATION_MARKER}{content}"),
            internal_mass,
            &mut candidates,
            &mut produced,
        );
    }

    BpeOutcome {
        candidates,
        merges,
        alphabet: alphabet.iter().map(|&(c, _, _)| c).collect(),
    }
}

/// Result of a standalone BPE training run.
pub struct BpeTraining {
    pub vocabulary: Vocabulary,
    pub alphabet: Vec<char>,
    pub merges: Vec<MergeRule>,
}

/// Train the baseline BPE vocabulary: specials, then single-character
/// alphabet tokens covering `character_coverage` of the corpus, then one
/// token per merge in merge order. Deterministic for a fixed corpus.
pub fn train_bpe(
    freq: &WordFrequencyTable,
    vocab_size: usize,
    config: &TrainerConfig,
) -> Result<Vocabulary> {
    Ok(train_bpe_detailed(freq, vocab_size, config)?.vocabulary)
}

/// [`train_bpe`], additionally exposing the alphabet and merge rules.
pub fn train_bpe_detailed(
    freq: &WordFrequencyTable,
    vocab_size: usize,
    config: &TrainerConfig,
) -> Result<BpeTraining> {
    config.validate()?;
    if freq.is_empty() {
        return Err(Error::Config("corpus contains no words".into()));
    }
    let budget = vocab_size
        .checked_sub(config.specials.len())
        .ok_or_else(|| Error::Config("vocab_size smaller than the special token set".into()))?;

    let stats = char_stats(freq);
    let alphabet = select_alphabet(&stats, config.character_coverage);
    let alphabet_tokens: usize = alphabet
        .iter()
        .map(|&(_, ini, cont)| usize::from(ini > 0) + usize::from(cont > 0))
        .sum();
    if budget < alphabet_tokens {
        return Err(Error::Config(format!(
            "vocab_size {vocab_size} cannot hold the {alphabet_tokens}-token alphabet \
             at character coverage {}",
            config.character_coverage
        )));
    }

    let words = sorted_words(freq);
    let outcome = train_pieces(&words, &alphabet, budget, &HashSet::new());
    let scores = compute_scores(&outcome.candidates);
    let residual: Vec<(String, f64)> = outcome
        .candidates
        .iter()
        .zip(scores)
        .map(|(c, s)| (c.token.clone(), s))
        .collect();
    let vocabulary = Vocabulary::from_segments(&config.specials, Vec::new(), residual)?;
    Ok(BpeTraining {
        vocabulary,
        alphabet: outcome.alphabet,
        merges: outcome.merges,
    })
}

pub(crate) fn sorted_words(freq: &WordFrequencyTable) -> Vec<(&str, u64)> {
    freq.sorted_entries()
}
