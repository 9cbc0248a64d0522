mod common;

use std::collections::HashSet;
use std::sync::OnceLock;

use common::gen::{date, document_text, record_set, system_gold_pair};
use ie_core::coref::{alias_test, cluster_proper_names, load_nicknames, ChainMember, NicknameTable};
use ie_core::eval::{align, combined_measure, score};
use ie_core::localize::{load_lexicon, localize_records, Lexicon, LocaleFormat};
use ie_core::ne::{EntityClass, GazetteerEntry, Mention, NormalizedDate, Recognizer};
use ie_core::records::{emit_records, parse_records, OutputFormat, RecordSet};
use ie_core::text::{split_sentences, tokenize, Document};
use ie_core::Pipeline;
use proptest::prelude::*;
use proptest::sample::select;

fn shared_pipeline() -> &'static Pipeline {
    static P: OnceLock<Pipeline> = OnceLock::new();
    P.get_or_init(common::pipeline)
}

fn nicknames() -> NicknameTable {
    load_nicknames(&common::read("resources/nicknames.tsv")).unwrap()
}

proptest! {
    #[test]
    fn tokens_reconstruct_the_text(text in "[ A-Za-z0-9.,'\\-\n!?$]{0,80}") {
        let doc = Document::new("p", text.clone());
        let tokens = tokenize(&doc);
        let mut rebuilt = String::new();
        let mut at = 0;
        for t in &tokens {
            prop_assert_eq!(doc.span_text(t.span).unwrap(), t.surface.as_str());
            let gap = doc.slice(at, t.span.start());
            prop_assert!(gap.chars().all(char::is_whitespace));
            rebuilt.push_str(gap);
            rebuilt.push_str(&t.surface);
            at = t.span.end();
        }
        rebuilt.push_str(doc.slice(at, doc.char_len()));
        prop_assert_eq!(rebuilt, text);
        prop_assert_eq!(tokenize(&doc), tokens);
    }

    #[test]
    fn sentences_partition_tokens(text in "[ A-Za-z.!?\n]{0,80}") {
        let doc = Document::new("p", text);
        let tokens = tokenize(&doc);
        let sentences = split_sentences(&doc, &tokens);
        let mut next = 0;
        for s in &sentences {
            prop_assert_eq!(s.tokens.start, next);
            prop_assert!(!s.tokens.is_empty());
            next = s.tokens.end;
        }
        prop_assert_eq!(next, tokens.len());
    }

    #[test]
    fn date_render_parse_round_trip(d in date()) {
        prop_assert_eq!(d.to_string().parse::<NormalizedDate>().unwrap(), d);
    }

    #[test]
    fn mentions_are_disjoint_and_verbatim(text in document_text()) {
        let doc = Document::new("p", text);
        let tokens = tokenize(&doc);
        let mentions = shared_pipeline().recognizer.recognize(&doc, &tokens);
        for w in mentions.windows(2) {
            prop_assert!(w[0].span.end() <= w[1].span.start());
        }
        for m in &mentions {
            prop_assert_eq!(doc.span_text(m.span).unwrap(), m.surface.as_str());
            prop_assert_eq!(m.normalized.is_some(), m.class.is_normalized());
        }
    }

    /// A mention lost after adding a gazetteer entry is always overlapped by
    /// a candidate of the extended recognizer at least as long as it was.
    #[test]
    fn gazetteer_growth_only_displaces_for_longer_candidates(
        text in document_text(),
        words in proptest::collection::vec(select(vec!["New", "York", "Jay", "Street", "police", "Thompson", "heroin", "company"]), 1..=3),
        class in select(EntityClass::ALL.to_vec()),
    ) {
        let base = &shared_pipeline().recognizer;
        let mut gazetteer = base.gazetteer().clone();
        let entry = GazetteerEntry::new(&words.join(" "), class, Default::default()).unwrap();
        prop_assume!(gazetteer.insert(entry).is_ok());
        let grown = Recognizer::new(gazetteer, base.rules().to_vec());
        let doc = Document::new("p", text);
        let tokens = tokenize(&doc);
        let before = base.recognize(&doc, &tokens);
        let after = grown.recognize(&doc, &tokens);
        let candidates = grown.candidates(&tokens);
        for m in before.iter().filter(|m| !after.contains(m)) {
            let displaced = candidates.iter().any(|c| {
                c.tokens.start < m.tokens.end && m.tokens.start < c.tokens.end && c.tokens.len() >= m.tokens.len()
            });
            prop_assert!(displaced, "{:?} vanished without a covering candidate", m.surface);
        }
    }

    #[test]
    fn chains_partition_names_and_keep_classes(text in document_text()) {
        let result = shared_pipeline().run(&Document::new("p", text)).unwrap();
        let mut seen = HashSet::new();
        for chain in &result.coreference.chains {
            prop_assert!(!chain.members.is_empty());
            prop_assert!(chain.names().any(|i| i == chain.representative));
            for i in chain.names() {
                prop_assert!(seen.insert(i));
                prop_assert_eq!(result.mentions[i].class, chain.class);
            }
            let pronouns: HashSet<usize> = chain.pronouns().collect();
            prop_assert!(pronouns.iter().all(|p| !result.coreference.unresolved.contains(p)));
        }
        prop_assert_eq!(seen.len(), result.mentions.len());
    }

    #[test]
    fn alias_tests_are_symmetric(a in "[A-Z][a-z]{0,7}( [A-Z][a-z]{0,7}){0,2}", b in "[A-Z][a-z]{0,7}( [A-Z][a-z]{0,7}){0,2}") {
        let table = nicknames();
        let mention = |s: &str| Mention {
            span: ie_core::text::Span::new(0, s.chars().count()).unwrap(),
            tokens: 0..1,
            class: EntityClass::Person,
            surface: s.to_string(),
            attributes: Default::default(),
            normalized: None,
        };
        let (ma, mb) = (mention(&a), mention(&b));
        prop_assert_eq!(alias_test(&ma, &mb, &table).is_some(), alias_test(&mb, &ma, &table).is_some());
        let chains = cluster_proper_names(&[ma, mb], &table);
        prop_assert_eq!(chains.iter().map(|c| c.members.len()).sum::<usize>(), 2);
        prop_assert!(chains.iter().all(|c| c.members.iter().all(|m| matches!(m, ChainMember::Name(_)))));
    }

    #[test]
    fn pipeline_output_is_closed_and_stable(text in document_text()) {
        let doc = Document::new("p", text);
        let first = shared_pipeline().run(&doc).unwrap();
        prop_assert!(first.records().validate().is_ok());
        for (i, e) in first.entities.iter().enumerate() {
            prop_assert_eq!(e.id.0 as usize, i + 1);
        }
        prop_assert_eq!(ie_core::template::project_records(&first.entities), ie_core::template::project_mentions(&first.mentions));
        let second = shared_pipeline().run(&doc).unwrap();
        prop_assert_eq!(emit_records(&first.records(), OutputFormat::Records), emit_records(&second.records(), OutputFormat::Records));
    }

    #[test]
    fn records_round_trip(set in record_set()) {
        let text = emit_records(&set, OutputFormat::Records);
        prop_assert_eq!(parse_records(&text).unwrap(), set);
    }

    #[test]
    fn self_alignment_scores_one(set in record_set()) {
        let s = score(&align(&set, &set));
        if !set.is_empty() {
            prop_assert_eq!((s.overall.precision, s.overall.recall, s.overall.combined), (1.0, 1.0, 1.0));
        }
        prop_assert_eq!(s.entity.precision, if set.entities.is_empty() { 0.0 } else { 1.0 });
    }

    #[test]
    fn swap_symmetry_and_bounds((system, gold) in system_gold_pair()) {
        let forward = score(&align(&system, &gold));
        let backward = score(&align(&gold, &system));
        for (f, b) in [(forward.entity, backward.entity), (forward.event, backward.event), (forward.overall, backward.overall)] {
            prop_assert_eq!(f.precision, b.recall);
            prop_assert_eq!(f.recall, b.precision);
            prop_assert_eq!(f.combined, b.combined);
            prop_assert!((0.0..=1.0).contains(&f.combined));
            if f.precision + f.recall > 0.0 {
                prop_assert!(f.precision.min(f.recall) <= f.combined + 1e-12);
                prop_assert!(f.combined <= f.precision.max(f.recall) + 1e-12);
            }
        }
    }

    #[test]
    fn removing_a_correct_record_never_raises_recall((system, gold) in system_gold_pair()) {
        let a = align(&system, &gold);
        let perfect = a.entities.iter().find(|m| {
            m.tally.incorrect == 0 && m.tally.missing == 0 && m.tally.spurious == 0
        });
        if let Some(m) = perfect {
            let mut reduced = system.clone();
            reduced.entities.remove(m.system);
            let before = score(&a).overall.recall;
            let after = score(&align(&reduced, &gold)).overall.recall;
            prop_assert!(after <= before, "recall rose from {before} to {after}");
        }
    }

    #[test]
    fn english_localization_is_identity(set in record_set()) {
        let out = localize_records(&set, &Lexicon::identity(), &LocaleFormat::default());
        prop_assert_eq!(out.text, emit_records(&set, OutputFormat::Records));
    }

    #[test]
    fn localization_preserves_structure(set in record_set()) {
        let fr = load_lexicon(&common::read("resources/locale/fr.lex")).unwrap();
        let out = localize_records(&set, &fr, &LocaleFormat::default());
        let canonical = emit_records(&set, OutputFormat::Records);
        let shape = |t: &str| t.lines().map(|l| l.starts_with("    ")).collect::<Vec<_>>();
        prop_assert_eq!(shape(&out.text), shape(&canonical));
        prop_assert_eq!(out.text.matches('?').count(), canonical.matches('?').count());
    }
}

#[test]
fn worked_combined_value() {
    assert!((combined_measure(0.71, 0.51) - 0.5936).abs() <= 1e-4);
}

#[test]
fn empty_system_against_gold() {
    let gold = parse_records(&common::read("fixtures/extended_example.gold")).unwrap();
    let s = score(&align(&RecordSet::default(), &gold));
    assert_eq!((s.overall.precision, s.overall.recall, s.overall.combined), (0.0, 0.0, 0.0));
}

#[test]
fn dropping_one_gold_entity_from_the_system() {
    let gold = parse_records(&common::read("fixtures/extended_example.gold")).unwrap();
    let mut system = gold.clone();
    let idx = system.entities.iter().position(|e| e.name == "Downing-Jones").unwrap();
    let dropped = system.entities.remove(idx).id;
    for e in &mut system.events {
        for (_, v) in &mut e.slots {
            if let ie_core::records::SlotValue::Refs(ids) = v {
                ids.retain(|id| *id != dropped);
            }
        }
    }
    let a = align(&system, &gold);
    assert_eq!(a.entities.len(), 12);
    assert_eq!(a.unmatched_gold_entities.len(), 1);
    let s = score(&a);
    assert_eq!(s.entity.precision, 1.0);
    assert!(s.entity.recall < 1.0);
}
