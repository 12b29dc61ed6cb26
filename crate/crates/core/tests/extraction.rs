mod common;

use mofkg::extract::{extract_document, extract_solvents, extract_steps, segment_sentences, Lexicon};
use proptest::prelude::*;

#[test]
fn corpus_recall() {
    let recall = common::extraction::corpus_recall(&Lexicon::seed());
    assert_eq!(recall.documents, 10);
    assert!(recall.solvent >= 0.9, "solvent recall {}", recall.solvent);
    assert!(recall.action >= 0.8, "action recall {}", recall.action);
}

#[test]
fn corpus_surface_forms_canonicalize() {
    let failures = common::extraction::surface_form_failures(&Lexicon::seed());
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn document_json_shape() {
    let out = extract_document(
        "d1",
        "The mixture was heated at 120 °C for 24 h. It is blue.",
        &Lexicon::seed(),
    );
    let v = serde_json::to_value(&out).unwrap();
    assert_eq!(v["doc_id"], "d1");
    assert_eq!(v["diagnostics"]["sentences"], 2);
    assert_eq!(v["diagnostics"]["skipped"], 1);
    assert_eq!(v["steps"][0]["action"], "heat");
    assert_eq!(v["steps"][0]["temperature"]["unit"], "°C");
    assert!(v["solvents"].as_array().unwrap().is_empty());
}

fn text_strategy() -> impl Strategy<Value = String> {
    let pieces = prop::sample::select(vec![
        "DMF",
        "water",
        "dissolved",
        "heated",
        "at",
        "120 °C",
        "for",
        "24 h",
        "(0.30 g)",
        "e.g.",
        "N,N-dimethyl",
        "formamide",
        "ethanol",
        "was",
        "the",
        "mixture",
        ".",
        ",",
        "Then",
        "stirred",
        "ca.",
        "J.",
        "H2O",
        "5 mL of",
        "methanol",
        "Zn(NO3)2",
        "ü",
        "100–120",
        "days",
    ]);
    prop::collection::vec((pieces, prop::sample::select(vec![" ", "  ", "\n", ""])), 0..40)
        .prop_map(|v| v.into_iter().map(|(p, s)| format!("{p}{s}")).collect())
}

proptest! {
    #[test]
    fn segmentation_partitions_non_whitespace(text in text_strategy()) {
        let spans = segment_sentences(&text);
        let mut covered = vec![false; text.len()];
        let mut last_end = 0;
        for s in &spans {
            prop_assert!(s.start >= last_end && s.start < s.end && s.end <= text.len());
            last_end = s.end;
            covered[s.start..s.end].iter_mut().for_each(|c| *c = true);
        }
        for (i, c) in text.char_indices() {
            if !c.is_whitespace() {
                prop_assert!(covered[i], "byte {} uncovered", i);
            }
        }
    }

    #[test]
    fn steps_ordered_and_in_bounds(text in text_strategy()) {
        let steps = extract_steps(&text, &Lexicon::seed());
        for (k, s) in steps.iter().enumerate() {
            prop_assert_eq!(s.index, k);
            prop_assert!(s.span.end <= text.len());
            if k > 0 {
                prop_assert!(steps[k - 1].span.end <= s.span.start);
            }
        }
    }

    #[test]
    fn mentions_are_verbatim(text in text_strategy()) {
        for m in extract_solvents(&text, &Lexicon::seed()) {
            prop_assert_eq!(&text[m.span.start..m.span.end], m.surface.as_str());
        }
    }

    #[test]
    fn extraction_is_deterministic(text in text_strategy()) {
        let lex = Lexicon::seed();
        prop_assert_eq!(extract_document("x", &text, &lex), extract_document("x", &text, &lex));
    }

    #[test]
    fn adding_a_synonym_keeps_mentions(
        text in text_strategy(),
        word in "[a-z]{3,8}",
        canonical in prop::sample::select(vec!["water", "ethanol", "glycerol"]),
    ) {
        let lex = Lexicon::seed();
        let Ok(extended) = lex.with_synonym(canonical, &word) else { return Ok(()); };
        let text = format!("{text} {word}");
        let before = extract_solvents(&text, &lex);
        let after = extract_solvents(&text, &extended);
        for m in &before {
            prop_assert!(after.contains(m), "lost {:?}", m);
        }
    }
}
