//! Dublin Core harvesting: parse OAI-PMH XML and translate each record into
//! core-ontology quads in the provider's graph.

pub mod dedup;
mod oai;

use std::collections::{BTreeSet, HashSet};

use chrono::Utc;
use serde::Serialize;

pub use dedup::{article_key, concept_key, normalize, person_key, DedupKey};
pub use oai::{parse_oaipmh, DcRecord};

use crate::ns;
use crate::quadstore::{InsertOutcome, Quad, QuadStore, StoreError, Term};
use crate::schema::{find_relation, RelationKind};
use crate::timestamp::{self, Timestamp};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Quads produced for one record plus the resources they describe.
#[derive(Debug, Clone)]
pub struct Translation {
    pub quads: BTreeSet<Quad>,
    pub article: Term,
    pub persons: Vec<Term>,
    pub concepts: Vec<Term>,
    pub tags: Vec<Term>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub records: usize,
    pub quads_added: usize,
    pub new_resources: usize,
}

fn core(local: &str) -> Term {
    Term::iri(ns::core(local))
}

fn rdf_type() -> Term {
    Term::iri(ns::rdf("type"))
}

/// Concept node for a free-text label. Concepts are shared across
/// providers and users, keyed by normalized label.
pub fn concept_term(label: &str) -> Term {
    Term::iri(concept_key(label).iri())
}

/// Quads that declare a concept node.
pub fn concept_quads(label: &str, graph: &Term) -> Vec<Quad> {
    let concept = concept_term(label);
    vec![
        Quad::new(concept.clone(), rdf_type(), core("Concept"), graph.clone()),
        Quad::new(concept, core("title"), Term::string(label.trim()), graph.clone()),
    ]
}

/// Maps a record onto the core ontology without writing to the store.
/// Existing resources (by guid, or existing tag nodes in `provider`) are
/// reused; new tag nodes get freshly reserved blank labels.
pub fn translate(store: &mut QuadStore, record: &DcRecord, provider: &Term) -> Translation {
    let g = provider.clone();
    let mut quads = BTreeSet::new();
    let mut add = |s: &Term, p: Term, o: Term| {
        quads.insert(Quad::new(s.clone(), p, o, g.clone()));
    };

    let guid_lit = Term::string(record.identifier.as_str());
    let article = store
        .match_quads(None, Some(&core("guid")), Some(&guid_lit), None)
        .into_iter()
        .map(|q| q.s)
        .next()
        .unwrap_or_else(|| {
            let key = article_key(Some(&record.identifier), &record.title, record.type_tag.as_deref());
            Term::iri(key.iri())
        });

    add(&article, rdf_type(), core("Article"));
    add(&article, core("guid"), guid_lit);
    if !record.title.is_empty() {
        add(&article, core("title"), Term::string(record.title.as_str()));
    }
    if !record.description.is_empty() {
        add(&article, core("abstract"), Term::string(record.description.as_str()));
    }
    if let Some(url) = &record.url {
        add(&article, core("url"), Term::typed(url.as_str(), ns::xsd("anyURI")));
    }
    if let Some(date) = record.date.and_then(|d| d.and_hms_opt(0, 0, 0)) {
        let ts = date.and_utc();
        add(&article, core("creationTime"), Term::typed(timestamp::format(&ts), ns::xsd("dateTime")));
    }

    let mut persons = Vec::new();
    for creator in &record.creators {
        let person = Term::iri(person_key(creator).iri());
        if persons.contains(&person) {
            continue;
        }
        let (first, last) = dedup::split_name(creator);
        add(&person, rdf_type(), core("Person"));
        add(&person, core("title"), Term::string(dedup::display_name(creator)));
        add(&person, core("lastName"), Term::string(last));
        if let Some(first) = first {
            add(&person, core("firstName"), Term::string(first));
        }
        add(&person, core("created"), article.clone());
        persons.push(person);
    }

    let insert_time: Timestamp = record
        .datestamp
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|d| d.and_utc())
        .unwrap_or_else(Utc::now);
    let mut concepts = Vec::new();
    let mut tags = Vec::new();
    let mut seen = HashSet::new();
    for subject in &record.subjects {
        if !seen.insert(normalize(subject)) {
            continue;
        }
        let concept = concept_term(subject);
        for q in concept_quads(subject, provider) {
            add(&q.s, q.p, q.o);
        }
        let node = find_relation(store, RelationKind::Related, provider, &concept, &article)
            .unwrap_or_else(|| store.fresh_blank());
        add(&node, rdf_type(), Term::iri(ns::relation("related")));
        add(&node, core("subject"), concept.clone());
        add(&node, core("object"), article.clone());
        add(&node, core("weight"), Term::typed("1.0", ns::xsd("float")));
        // An existing tag keeps its original insert time.
        let existing_time = store
            .match_quads(Some(&node), Some(&core("insertTime")), None, Some(provider))
            .into_iter()
            .next()
            .map(|q| q.o);
        add(
            &node,
            core("insertTime"),
            existing_time
                .unwrap_or_else(|| Term::typed(timestamp::format(&insert_time), ns::xsd("dateTime"))),
        );
        concepts.push(concept);
        tags.push(node);
    }

    Translation {
        quads,
        article,
        persons,
        concepts,
        tags,
    }
}

/// Translates and inserts every record into `provider`'s graph.
pub fn ingest_records(
    store: &mut QuadStore,
    records: &[DcRecord],
    provider: &Term,
) -> Result<IngestReport, StoreError> {
    let mut report = IngestReport {
        records: records.len(),
        ..Default::default()
    };
    for record in records {
        let translation = translate(store, record, provider);
        let mut fresh = BTreeSet::new();
        for quad in &translation.quads {
            if !store.mentions(&quad.s) {
                fresh.insert(quad.s.clone());
            }
        }
        for quad in translation.quads {
            if store.insert(quad)? == InsertOutcome::Inserted {
                report.quads_added += 1;
            }
        }
        report.new_resources += fresh.len();
    }
    Ok(report)
}
