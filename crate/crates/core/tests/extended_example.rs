mod common;

use common::{fixture, pipeline, read};
use ie_core::coref::ChainMember;
use ie_core::eval::{align, score};
use ie_core::ne::EntityClass;
use ie_core::records::{emit_records, parse_records, OutputFormat};
use ie_core::scenario::{events_subsumed, ScopeDial};
use ie_core::template::{project_mentions, project_records};
use ie_core::text::{split_sentences, tokenize, Span};

#[test]
fn sentence_count() {
    let doc = fixture();
    let tokens = tokenize(&doc);
    assert_eq!(split_sentences(&doc, &tokens).len(), 9);
}

#[test]
fn span_of_a_person_name() {
    let doc = fixture();
    let start = doc.find("Frederick", 0).unwrap();
    let span = Span::new(start, start + 21).unwrap();
    assert_eq!(doc.span_text(span).unwrap(), "Frederick J. Thompson");
}

#[test]
fn mentions_on_the_fixture() {
    let result = pipeline().run(&fixture()).unwrap();
    let pairs: Vec<(String, EntityClass)> =
        result.mentions.iter().map(|m| (m.surface.replace('\n', " "), m.class)).collect();
    assert_eq!(pairs.len(), 18);
    for (surface, class) in [
        ("Frederick J. Thompson", EntityClass::Person),
        ("Jay Street Imports Inc.", EntityClass::Organisation),
        ("Manhattan", EntityClass::Location),
        ("heroin", EntityClass::Drug),
        ("Wednesday 12 July 1996", EntityClass::Date),
        ("New York police", EntityClass::Organisation),
        ("Downing-Jones", EntityClass::Organisation),
        ("Jay Street", EntityClass::Organisation),
        ("United States", EntityClass::Location),
    ] {
        assert!(pairs.contains(&(surface.to_string(), class)), "{surface}");
    }
    for w in result.mentions.windows(2) {
        assert!(w[0].span.end() <= w[1].span.start());
    }
}

#[test]
fn coreference_chains_on_the_fixture() {
    let result = pipeline().run(&fixture()).unwrap();
    let co = &result.coreference;
    let surfaces = |members: &[ChainMember]| -> Vec<String> {
        members
            .iter()
            .map(|m| match *m {
                ChainMember::Name(i) => result.mentions[i].surface.clone(),
                ChainMember::Pronoun(i) => co.pronouns[i].surface.clone(),
            })
            .collect()
    };
    let chains: Vec<Vec<String>> = co.chains.iter().map(|c| surfaces(&c.members)).collect();
    let thompson = chains.iter().find(|c| c.contains(&"Frederick J. Thompson".to_string())).unwrap();
    for s in ["Thompson", "Fred", "His"] {
        assert!(thompson.contains(&s.to_string()), "{s} missing from {thompson:?}");
    }
    let attorney = chains.iter().find(|c| c.contains(&"Robert Giuliani".to_string())).unwrap();
    assert!(attorney.contains(&"Guliani".to_string()));
    assert!(!attorney.contains(&"Thompson".to_string()));
    assert!(result.diagnostics.unresolved_pronouns.is_empty());
}

#[test]
fn records_equal_the_gold_listing() {
    let result = pipeline().run(&fixture()).unwrap();
    let gold = parse_records(&read("fixtures/extended_example.gold")).unwrap();
    assert_eq!(result.entities.len(), 13);
    assert_eq!(result.events.len(), 2);
    assert_eq!(result.records(), gold);
    let s = score(&align(&result.records(), &gold));
    assert_eq!((s.overall.precision, s.overall.recall, s.overall.combined), (1.0, 1.0, 1.0));
}

#[test]
fn records_project_onto_mentions() {
    let result = pipeline().run(&fixture()).unwrap();
    assert_eq!(project_records(&result.entities), project_mentions(&result.mentions));
}

#[test]
fn narrow_scope_events_are_subsumed() {
    let wide = pipeline().run(&fixture()).unwrap();
    let narrow = pipeline().with_scope(ScopeDial::SameSentence).run(&fixture()).unwrap();
    assert_eq!(narrow.events.len(), 2);
    assert!(events_subsumed(&narrow.events, &wide.events));
}

#[test]
fn gold_round_trips() {
    let gold = parse_records(&read("fixtures/extended_example.gold")).unwrap();
    assert_eq!(gold.entities.len(), 13);
    assert_eq!(gold.events.len(), 2);
    assert_eq!(parse_records(&emit_records(&gold, OutputFormat::Records)).unwrap(), gold);
}

#[test]
fn organisation_with_corporate_suffix() {
    let doc = ie_core::text::Document::new("t", "He joined International Business Machines Ltd. last year.");
    let result = pipeline().run(&doc).unwrap();
    let orgs: Vec<&str> = result
        .mentions
        .iter()
        .filter(|m| m.class == EntityClass::Organisation)
        .map(|m| m.surface.as_str())
        .collect();
    assert_eq!(orgs, ["International Business Machines Ltd."]);
}

#[test]
fn empty_and_nameless_documents() {
    let empty = pipeline().run(&ie_core::text::Document::new("e", "")).unwrap();
    assert!(empty.records().is_empty());
    let plain = pipeline().run(&ie_core::text::Document::new("p", "nothing to see here at all")).unwrap();
    assert!(plain.mentions.is_empty());
}

#[test]
fn missing_resource_names_the_path() {
    let mut config = ie_core::PipelineConfig::load(&common::repo_path("resources/default.conf")).unwrap();
    config.gazetteer = common::repo_path("resources/no-such-gazetteer.tsv");
    let err = ie_core::Pipeline::load(&config).unwrap_err();
    assert!(err.to_string().contains("no-such-gazetteer.tsv"));
}
