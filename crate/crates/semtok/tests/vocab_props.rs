//! Model-file round-trip properties and the checked-in golden model.

use std::path::PathBuf;

use proptest::collection::vec;
use proptest::prelude::*;

use semtok::vocab::{Vocabulary, DEFAULT_SPECIALS};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn arb_vocabulary() -> impl Strategy<Value = Vocabulary> {
    let token = ("[a-c]{1,5}", any::<bool>()).prop_map(|(payload, marked)| {
        if marked {
            format!("##{payload}")
        } else {
            payload
        }
    });
    (
        vec((token.clone(), -20.0f64..=0.0), 0..12),
        vec((token, -20.0f64..=0.0), 0..12),
    )
        .prop_map(|(semantic, residual)| {
            let specials: Vec<String> = DEFAULT_SPECIALS.iter().map(|s| s.to_string()).collect();
            let mut seen = std::collections::HashSet::new();
            let semantic: Vec<(String, f64)> = semantic
                .into_iter()
                .filter(|(t, _)| seen.insert(t.clone()))
                .collect();
            let residual: Vec<(String, f64)> = residual
                .into_iter()
                .filter(|(t, _)| seen.insert(t.clone()))
                .collect();
            Vocabulary::from_segments(&specials, semantic, residual).unwrap()
        })
}

proptest! {
    #[test]
    fn serialization_round_trips(vocab in arb_vocabulary()) {
        let bytes = vocab.to_model_bytes();
        let back = Vocabulary::from_model_bytes(&bytes).unwrap();
        prop_assert_eq!(&vocab, &back);
        prop_assert_eq!(bytes, back.to_model_bytes());
    }

    #[test]
    fn export_has_one_line_per_token(vocab in arb_vocabulary()) {
        let mut out = Vec::new();
        vocab.write_bert_vocab(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        prop_assert_eq!(text.lines().count(), vocab.len());
        for (line, entry) in text.lines().zip(vocab.entries()) {
            prop_assert_eq!(line, &entry.token);
        }
    }
}

#[test]
fn golden_model_parses_and_reserializes_identically() {
    let bytes = std::fs::read(data("tiny_corpus.model")).expect("golden model");
    let vocab = Vocabulary::from_model_bytes(&bytes).expect("golden parses");
    assert_eq!(vocab.to_model_bytes(), bytes);

    let golden_export = std::fs::read(data("tiny_corpus.vocab.txt")).expect("golden export");
    let mut export = Vec::new();
    vocab.write_bert_vocab(&mut export).unwrap();
    assert_eq!(export, golden_export);
}

#[test]
fn golden_model_has_expected_shape() {
    let bytes = std::fs::read(data("tiny_corpus.model")).unwrap();
    let vocab = Vocabulary::from_model_bytes(&bytes).unwrap();
    assert_eq!(vocab.len(), 64);
    assert_eq!(vocab.special_count(), 5);
    assert_eq!(vocab.lookup("[UNK]"), Some(1));
    assert_eq!(vocab.lookup("condit"), Some(7));
    assert!(vocab.lookup("definitely-absent").is_none());
}
