//! Slot-fill scoring of system records against gold records.
//!
//! Records are aligned one-to-one by a greedy pass over all candidate pairs.
//! The pair ranking depends only on record content and on the unordered
//! pair of list positions, so exchanging the system and gold roles yields
//! the mirrored alignment. Ids never count as fills; references compare
//! through the entity alignment.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::records::{EntityId, EntityRecord, EventRecord, RecordSet, SlotValue, Slots};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub combined: f64,
}

/// Harmonic mean of precision and recall; zero when both are zero.
pub fn combined_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl Scores {
    pub fn from_counts(c: Counts) -> Scores {
        let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
        let (precision, recall) = (ratio(c.correct, c.system), ratio(c.correct, c.gold));
        Scores { precision, recall, combined: combined_measure(precision, recall) }
    }
}

/// Slot-fill totals: correct fills, fills produced, fills expected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub correct: usize,
    pub system: usize,
    pub gold: usize,
}

impl std::ops::Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts { correct: self.correct + o.correct, system: self.system + o.system, gold: self.gold + o.gold }
    }
}

/// Per-pair slot outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotTally {
    pub correct: usize,
    pub incorrect: usize,
    pub missing: usize,
    pub spurious: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matched {
    pub system: usize,
    pub gold: usize,
    pub tally: SlotTally,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alignment {
    pub entities: Vec<Matched>,
    pub events: Vec<Matched>,
    pub unmatched_system_entities: Vec<usize>,
    pub unmatched_gold_entities: Vec<usize>,
    pub unmatched_system_events: Vec<usize>,
    pub unmatched_gold_events: Vec<usize>,
    pub entity_counts: Counts,
    pub event_counts: Counts,
    /// Alias list items, scored on their own.
    pub alias_counts: Counts,
}

fn keys(e: &EntityRecord) -> HashSet<String> {
    std::iter::once(&e.name).chain(e.aliases()).map(|s| s.to_lowercase()).collect()
}

fn fingerprint(name: &str, kind: &str, slots: &Slots) -> String {
    let mut s = format!("{name}\u{1}{kind}");
    for (k, v) in slots {
        let _ = write!(s, "\u{1}{k}={v}");
    }
    s
}

fn values_equal(sys: &SlotValue, gold: &SlotValue, map: &HashMap<EntityId, EntityId>) -> bool {
    match (sys, gold) {
        (SlotValue::Refs(a), SlotValue::Refs(b)) => {
            let mapped: Option<HashSet<EntityId>> = a.iter().map(|id| map.get(id).copied()).collect();
            mapped.is_some_and(|m| m == b.iter().copied().collect())
        }
        (SlotValue::Names(a), SlotValue::Names(b)) => {
            a.iter().collect::<HashSet<_>>() == b.iter().collect::<HashSet<_>>()
        }
        (a, b) => a == b,
    }
}

fn tally_slots(sys: &Slots, gold: &Slots, map: &HashMap<EntityId, EntityId>) -> SlotTally {
    let mut t = SlotTally::default();
    for (k, v) in sys {
        match gold.iter().find(|(gk, _)| gk == k) {
            Some((_, g)) if values_equal(v, g, map) => t.correct += 1,
            Some(_) => t.incorrect += 1,
            None => t.spurious += 1,
        }
    }
    t.missing = gold.iter().filter(|(gk, _)| !sys.iter().any(|(k, _)| k == gk)).count();
    t
}

fn non_ref_agreement(a: &EntityRecord, b: &EntityRecord) -> usize {
    let empty = HashMap::new();
    let slots = a
        .slots
        .iter()
        .filter(|(k, v)| !matches!(v, SlotValue::Refs(_)) && b.slot(k).is_some_and(|w| values_equal(v, w, &empty)))
        .count();
    slots + usize::from(a.name == b.name)
}

/// Greedy one-to-one matching over candidates keyed best first.
fn greedy<K: Ord>(n_sys: usize, n_gold: usize, mut candidates: Vec<(K, usize, usize)>) -> Vec<(usize, usize)> {
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let (mut used_s, mut used_g) = (vec![false; n_sys], vec![false; n_gold]);
    let mut pairs = Vec::new();
    for (_, s, g) in candidates {
        if !used_s[s] && !used_g[g] {
            used_s[s] = true;
            used_g[g] = true;
            pairs.push((s, g));
        }
    }
    pairs.sort_unstable();
    pairs
}

fn ordered_pair<T: Ord + Clone>(a: &T, b: &T) -> (T, T) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn entity_fills(e: &EntityRecord) -> usize {
    2 + e.slots.len()
}

fn event_fills(e: &EventRecord) -> usize {
    1 + e.slots.len()
}

pub fn align(system: &RecordSet, gold: &RecordSet) -> Alignment {
    use std::cmp::Reverse;
    let (se, ge) = (&system.entities, &gold.entities);

    let sys_keys: Vec<_> = se.iter().map(keys).collect();
    let gold_keys: Vec<_> = ge.iter().map(keys).collect();
    let sys_fp: Vec<_> = se.iter().map(|e| fingerprint(&e.name, e.class.as_str(), &e.slots)).collect();
    let gold_fp: Vec<_> = ge.iter().map(|e| fingerprint(&e.name, e.class.as_str(), &e.slots)).collect();
    let mut candidates = Vec::new();
    for (s, a) in se.iter().enumerate() {
        for (g, b) in ge.iter().enumerate() {
            if a.class != b.class {
                continue;
            }
            let overlap = sys_keys[s].intersection(&gold_keys[g]).count();
            if overlap == 0 {
                continue;
            }
            let key = (
                Reverse(overlap),
                Reverse(non_ref_agreement(a, b)),
                s.min(g),
                s.max(g),
                ordered_pair(&sys_fp[s], &gold_fp[g]),
                g,
            );
            candidates.push((key, s, g));
        }
    }
    let entity_pairs = greedy(se.len(), ge.len(), candidates);
    let map: HashMap<EntityId, EntityId> = entity_pairs.iter().map(|&(s, g)| (se[s].id, ge[g].id)).collect();

    let (sv, gv) = (&system.events, &gold.events);
    let sys_fp: Vec<_> = sv.iter().map(|e| fingerprint("", &e.event_type, &e.slots)).collect();
    let gold_fp: Vec<_> = gv.iter().map(|e| fingerprint("", &e.event_type, &e.slots)).collect();
    let mut candidates = Vec::new();
    for (s, a) in sv.iter().enumerate() {
        for (g, b) in gv.iter().enumerate() {
            if a.event_type != b.event_type {
                continue;
            }
            let agreement = tally_slots(&a.slots, &b.slots, &map).correct;
            let key = (Reverse(agreement), s.min(g), s.max(g), ordered_pair(&sys_fp[s], &gold_fp[g]), g);
            candidates.push((key, s, g));
        }
    }
    let event_pairs = greedy(sv.len(), gv.len(), candidates);

    let mut al = Alignment::default();
    for &(s, g) in &entity_pairs {
        let mut tally = tally_slots(&se[s].slots, &ge[g].slots, &map);
        // name and type
        tally.correct += 1 + usize::from(se[s].name == ge[g].name);
        tally.incorrect += usize::from(se[s].name != ge[g].name);
        al.entity_counts.correct += tally.correct;
        let (sa, ga): (HashSet<_>, HashSet<_>) = (se[s].aliases().iter().collect(), ge[g].aliases().iter().collect());
        al.alias_counts.correct += sa.intersection(&ga).count();
        al.entities.push(Matched { system: s, gold: g, tally });
    }
    for &(s, g) in &event_pairs {
        let mut tally = tally_slots(&sv[s].slots, &gv[g].slots, &map);
        tally.correct += 1;
        al.event_counts.correct += tally.correct;
        al.events.push(Matched { system: s, gold: g, tally });
    }
    let unmatched = |n: usize, pairs: &[(usize, usize)], side: fn(&(usize, usize)) -> usize| -> Vec<usize> {
        let used: HashSet<usize> = pairs.iter().map(side).collect();
        (0..n).filter(|i| !used.contains(i)).collect()
    };
    al.unmatched_system_entities = unmatched(se.len(), &entity_pairs, |p| p.0);
    al.unmatched_gold_entities = unmatched(ge.len(), &entity_pairs, |p| p.1);
    al.unmatched_system_events = unmatched(sv.len(), &event_pairs, |p| p.0);
    al.unmatched_gold_events = unmatched(gv.len(), &event_pairs, |p| p.1);

    al.entity_counts.system = se.iter().map(entity_fills).sum();
    al.entity_counts.gold = ge.iter().map(entity_fills).sum();
    al.event_counts.system = sv.iter().map(event_fills).sum();
    al.event_counts.gold = gv.iter().map(event_fills).sum();
    let alias_items = |r: &[EntityRecord]| r.iter().map(|e| e.aliases().iter().collect::<HashSet<_>>().len()).sum();
    al.alias_counts.system = alias_items(se);
    al.alias_counts.gold = alias_items(ge);
    al
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreReport {
    pub entity: Scores,
    pub event: Scores,
    /// Raw alias precision and recall; its combined value is not reported.
    pub coreference: Scores,
    pub overall: Scores,
}

pub fn score(a: &Alignment) -> ScoreReport {
    ScoreReport {
        entity: Scores::from_counts(a.entity_counts),
        event: Scores::from_counts(a.event_counts),
        coreference: Scores::from_counts(a.alias_counts),
        overall: Scores::from_counts(a.entity_counts + a.event_counts),
    }
}

impl ScoreReport {
    /// TAB-separated rows: task, precision, recall, combined.
    pub fn to_tsv(&self) -> String {
        let row = |task: &str, s: &Scores| format!("{task}\t{:.4}\t{:.4}\t{:.4}\n", s.precision, s.recall, s.combined);
        let mut out = String::from("task\tprecision\trecall\tcombined\n");
        out.push_str(&row("entity", &self.entity));
        out.push_str(&row("event", &self.event));
        out.push_str(&format!("coreference\t{:.4}\t{:.4}\t-\n", self.coreference.precision, self.coreference.recall));
        out.push_str(&row("overall", &self.overall));
        out
    }
}
