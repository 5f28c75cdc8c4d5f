use std::collections::BTreeMap;

use scholarec_core::ns;
use scholarec_core::quadstore::{QuadStore, Term};
use scholarec_core::schema::{read_relation, RelationKind, Vocabulary};
use scholarec_core::timestamp::Timestamp;
use scholarec_core::walker::RankedList;
use serde::Serialize;

/// Neighbors shown per predicate and direction.
pub const FAN_OUT: usize = 100;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TagView {
    pub concept: String,
    pub weight: Option<f64>,
    pub tagger: String,
    pub insert_time: Option<Timestamp>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourceView {
    pub id: String,
    pub types: Vec<String>,
    pub abbrev: Option<String>,
    pub title: Option<String>,
    #[serde(rename = "abstract")]
    pub abstract_text: Option<String>,
    pub outgoing: BTreeMap<String, Vec<Term>>,
    pub incoming: BTreeMap<String, Vec<Term>>,
    pub tags: Vec<TagView>,
}

fn first_literal(store: &QuadStore, s: &Term, p: &str) -> Option<String> {
    store
        .match_quads(Some(s), Some(&Term::iri(ns::core(p))), None, None)
        .into_iter()
        .find(|q| q.o.is_literal())
        .map(|q| q.o.value().to_string())
}

fn push_capped(groups: &mut BTreeMap<String, Vec<Term>>, p: &Term, t: Term) {
    let list = groups.entry(p.value().to_string()).or_default();
    // Quads arrive sorted, so the same neighbor from another graph is adjacent.
    if list.len() < FAN_OUT && list.last() != Some(&t) {
        list.push(t);
    }
}

pub fn resource_view(store: &QuadStore, vocab: &Vocabulary, id: &Term) -> ResourceView {
    let types = vocab.types_of(store, id);
    let abbrev = types.iter().find_map(|t| vocab.abbrev(t)).map(str::to_string);
    let mut outgoing = BTreeMap::new();
    for q in store.match_quads(Some(id), None, None, None) {
        push_capped(&mut outgoing, &q.p, q.o);
    }
    let mut incoming = BTreeMap::new();
    for q in store.match_quads(None, None, Some(id), None) {
        push_capped(&mut incoming, &q.p, q.s);
    }
    let object = Term::iri(ns::core("object"));
    let mut tags: Vec<TagView> = store
        .match_quads(None, Some(&object), Some(id), None)
        .iter()
        .filter_map(|q| read_relation(store, &q.s))
        .filter(|r| r.kind == RelationKind::Related)
        .map(|r| TagView {
            concept: r.subject.value().to_string(),
            weight: r.weight,
            tagger: r.owner_graph.value().to_string(),
            insert_time: r.insert_time,
        })
        .collect();
    tags.sort_by(|a, b| (&a.concept, &a.tagger).cmp(&(&b.concept, &b.tagger)));
    ResourceView {
        id: id.value().to_string(),
        types,
        abbrev,
        title: first_literal(store, id, "title"),
        abstract_text: first_literal(store, id, "abstract"),
        outgoing,
        incoming,
        tags,
    }
}

/// Case-insensitive keyword search over titles and abstracts. Score is the
/// number of query-token occurrences.
pub fn search(store: &QuadStore, query: &str) -> RankedList {
    let tokens: Vec<String> = query.split_whitespace().map(str::to_lowercase).collect();
    let mut text: BTreeMap<String, String> = BTreeMap::new();
    for p in ["title", "abstract"] {
        for q in store.match_quads(None, Some(&Term::iri(ns::core(p))), None, None) {
            if let (Some(s), true) = (q.s.as_iri(), q.o.is_literal()) {
                let hay = text.entry(s.to_string()).or_default();
                hay.push('\n');
                hay.push_str(&q.o.value().to_lowercase());
            }
        }
    }
    RankedList::from_pairs(text.into_iter().filter_map(|(iri, hay)| {
        let hits: usize = tokens.iter().map(|t| hay.matches(t.as_str()).count()).sum();
        (hits > 0).then_some((iri, hits as f64))
    }))
}
