//! Proptest strategies for well-formed record sets and synthetic documents.
#![allow(dead_code)]

use ie_core::ne::{EntityClass, NormalizedDate};
use ie_core::records::{EntityId, EntityRecord, EventId, EventRecord, RecordSet, SlotValue, ALIASES_SLOT};
use proptest::prelude::*;
use proptest::sample::{select, subsequence};

const WORDS: &[&str] = &["Alpha", "Beta", "Gamma", "Acme", "Reuter", "York", "Jones", "Lima", "Nord", "Vega"];
const TEXTS: &[&str] = &["city", "country", "news", "A", "managing director", "US", "import-export", "transportation"];
const ENTITY_SLOTS: &[&str] = &["subtype", "is_in", "location", ALIASES_SLOT, "business", "class", "profession", "employer", "normalisation"];
const EVENT_TYPES: &[&str] = &["narcotics-smuggling", "joint-venture", "takeover"];
const ROLES: &[&str] = &["destination", "source", "perpetrators", "companies", "type", "status"];
const ROLE_TEXTS: &[&str] = &["unknown", "past", "on-trial", "transport", "planned"];

pub fn date() -> impl Strategy<Value = NormalizedDate> {
    (proptest::option::of(1u8..=31), proptest::option::of(1u8..=12), proptest::option::of(1000u16..=2999))
        .prop_filter_map("valid calendar date", |(d, m, y)| NormalizedDate::new(d, m, y))
}

fn name() -> impl Strategy<Value = String> {
    proptest::collection::vec(select(WORDS), 1..=3).prop_map(|w| w.join(" "))
}

fn class() -> impl Strategy<Value = EntityClass> {
    select(EntityClass::ALL.to_vec())
}

fn refs(n: u32) -> BoxedStrategy<SlotValue> {
    if n == 0 {
        return select(TEXTS).prop_map(SlotValue::text).boxed();
    }
    proptest::collection::btree_set(1..=n, 1..=3.min(n as usize))
        .prop_map(|ids| SlotValue::Refs(ids.into_iter().map(EntityId).collect()))
        .boxed()
}

fn entity_value(slot: &'static str, n: u32) -> BoxedStrategy<SlotValue> {
    if slot == ALIASES_SLOT {
        return proptest::collection::vec(name(), 1..=3).prop_map(SlotValue::Names).boxed();
    }
    prop_oneof![
        select(TEXTS).prop_map(SlotValue::text),
        date().prop_map(SlotValue::Date),
        refs(n),
    ]
    .boxed()
}

fn slots(names: Vec<&'static str>, value: impl Fn(&'static str) -> BoxedStrategy<SlotValue>) -> BoxedStrategy<Vec<(String, SlotValue)>> {
    let values: Vec<_> = names.iter().map(|s| value(s)).collect();
    values
        .prop_map(move |vs| names.iter().map(|s| s.to_string()).zip(vs).collect())
        .boxed()
}

fn entity(id: u32, n: u32) -> BoxedStrategy<EntityRecord> {
    (name(), class(), subsequence(ENTITY_SLOTS.to_vec(), 0..=4))
        .prop_flat_map(move |(name, class, names)| {
            slots(names, move |s| entity_value(s, n)).prop_map(move |slots| EntityRecord {
                id: EntityId(id),
                name: name.clone(),
                class,
                slots,
            })
        })
        .boxed()
}

fn event(id: u32, n: u32) -> BoxedStrategy<EventRecord> {
    (select(EVENT_TYPES), subsequence(ROLES.to_vec(), 1..=4))
        .prop_flat_map(move |(event_type, names)| {
            slots(names, move |_| prop_oneof![select(ROLE_TEXTS).prop_map(SlotValue::text), refs(n)].boxed()).prop_map(
                move |slots| EventRecord { id: EventId(id), event_type: event_type.to_string(), slots },
            )
        })
        .boxed()
}

/// Record sets whose references all resolve.
pub fn record_set() -> impl Strategy<Value = RecordSet> {
    (0u32..=8, 0u32..=4).prop_flat_map(|(n, m)| {
        let entities: Vec<_> = (1..=n).map(|i| entity(i, n)).collect();
        let events: Vec<_> = (1..=m).map(|i| event(i, n)).collect();
        (entities, events).prop_map(|(entities, events)| RecordSet { entities, events })
    })
}

/// Drops some records and rewrites some values, keeping references valid.
pub fn perturbed(set: RecordSet) -> impl Strategy<Value = RecordSet> {
    let n_e = set.entities.len();
    let n_v = set.events.len();
    (
        proptest::collection::vec(any::<bool>(), n_e),
        proptest::collection::vec(any::<bool>(), n_v),
        proptest::collection::vec(proptest::option::weighted(0.2, select(ROLE_TEXTS)), n_e + n_v),
    )
        .prop_map(move |(keep_e, keep_v, edits)| {
            let mut out = set.clone();
            for (i, r) in out.entities.iter_mut().enumerate() {
                if let (Some(t), Some(slot)) = (edits[i], r.slots.first_mut()) {
                    slot.1 = SlotValue::text(t);
                }
            }
            for (i, r) in out.events.iter_mut().enumerate() {
                if let (Some(t), Some(slot)) = (edits[n_e + i], r.slots.first_mut()) {
                    slot.1 = SlotValue::text(t);
                }
            }
            let dropped: Vec<EntityId> =
                out.entities.iter().zip(&keep_e).filter(|(_, k)| !**k).map(|(e, _)| e.id).collect();
            out.entities.retain(|e| !dropped.contains(&e.id));
            let mut keep = keep_v.iter();
            out.events.retain(|_| *keep.next().unwrap());
            let strip = |slots: &mut Vec<(String, SlotValue)>| {
                for (_, v) in slots.iter_mut() {
                    if let SlotValue::Refs(ids) = v {
                        ids.retain(|id| !dropped.contains(id));
                        if ids.is_empty() {
                            *v = SlotValue::text("unknown");
                        }
                    }
                }
            };
            out.entities.iter_mut().for_each(|e| strip(&mut e.slots));
            out.events.iter_mut().for_each(|e| strip(&mut e.slots));
            out
        })
}

/// A (system, gold) pair: either a perturbed copy or two independent sets.
pub fn system_gold_pair() -> impl Strategy<Value = (RecordSet, RecordSet)> {
    prop_oneof![
        record_set().prop_flat_map(|gold| perturbed(gold.clone()).prop_map(move |sys| (sys, gold.clone()))),
        (record_set(), record_set()),
    ]
}

const DOC_WORDS: &[&str] = &[
    "Thompson", "said", "the", "company", "Jay", "Street", "New", "York", "police", "his", "Manhattan", "apartment", "heroin",
    "into", "United", "States", "importing", "drug", "smuggling", "Fred", "Frederick", "J.", "head", "of", "Inc.", ",", ".",
    "transport", "ventures", "had", "been", "Downing-Jones", "accused", "it", "he", "1989", "July", "12", "Reuter", "--",
];

/// Short documents built from vocabulary the shipped resources react to.
pub fn document_text() -> impl Strategy<Value = String> {
    proptest::collection::vec(select(DOC_WORDS), 0..60).prop_map(|w| w.join(" "))
}
