//! Reified `relation:related` (tags) and `relation:usage` (view paths).
//!
//! Each association is a blank node in the owning user's graph carrying
//! `core:subject`, `core:object` and its attributes. There is at most one
//! node per `(graph, subject, object)` and kind.

use serde::Serialize;

use crate::ns;
use crate::quadstore::{Quad, QuadStore, StoreError, Term};
use crate::timestamp::{self, Timestamp};

use super::SchemaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Related,
    Usage,
}

impl RelationKind {
    pub fn class_iri(self) -> String {
        match self {
            RelationKind::Related => ns::relation("related"),
            RelationKind::Usage => ns::relation("usage"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationResource {
    pub node: Term,
    pub kind: RelationKind,
    pub subject: Term,
    pub object: Term,
    pub weight: Option<f64>,
    pub insert_time: Option<Timestamp>,
    pub usage_stamps: Vec<Timestamp>,
    pub owner_graph: Term,
}

fn p(local: &str) -> Term {
    Term::iri(ns::core(local))
}

fn rdf_type() -> Term {
    Term::iri(ns::rdf("type"))
}

/// Existing association node of `kind` in `graph` from `subject` to `object`.
pub fn find_relation(
    store: &QuadStore,
    kind: RelationKind,
    graph: &Term,
    subject: &Term,
    object: &Term,
) -> Option<Term> {
    let class = Term::iri(kind.class_iri());
    store
        .match_quads(None, Some(&p("subject")), Some(subject), Some(graph))
        .into_iter()
        .map(|q| q.s)
        .find(|node| {
            store.contains(&Quad::new(node.clone(), p("object"), object.clone(), graph.clone()))
                && store.contains(&Quad::new(node.clone(), rdf_type(), class.clone(), graph.clone()))
        })
}

/// Reads an association back from its node, if `node` is one.
pub fn read_relation(store: &QuadStore, node: &Term) -> Option<RelationResource> {
    let typed = store.match_quads(Some(node), Some(&rdf_type()), None, None);
    let (kind, owner_graph) = typed.iter().find_map(|q| {
        let kind = match q.o.as_iri()? {
            iri if iri == ns::relation("related") => RelationKind::Related,
            iri if iri == ns::relation("usage") => RelationKind::Usage,
            _ => return None,
        };
        Some((kind, q.g.clone()))
    })?;
    let one = |local: &str| {
        store
            .match_quads(Some(node), Some(&p(local)), None, Some(&owner_graph))
            .into_iter()
            .next()
            .map(|q| q.o)
    };
    let subject = one("subject")?;
    let object = one("object")?;
    let weight = one("weight").and_then(|t| t.value().parse().ok());
    let insert_time = one("insertTime").and_then(|t| timestamp::parse(t.value()));
    let usage_stamps = one("usageStamps")
        .map(|t| parse_stamps(t.value()))
        .unwrap_or_default();
    Some(RelationResource {
        node: node.clone(),
        kind,
        subject,
        object,
        weight,
        insert_time,
        usage_stamps,
        owner_graph,
    })
}

/// All association nodes of `kind`, optionally restricted to one graph.
pub fn relations(store: &QuadStore, kind: RelationKind, graph: Option<&Term>) -> Vec<RelationResource> {
    let class = Term::iri(kind.class_iri());
    store
        .match_quads(None, Some(&rdf_type()), Some(&class), graph)
        .into_iter()
        .filter_map(|q| read_relation(store, &q.s))
        .collect()
}

/// Records that the owner of `graph` relates `concept` to `resource`.
/// Re-tagging the same pair updates weight and insert time in place.
pub fn tag(
    store: &mut QuadStore,
    graph: &Term,
    concept: &Term,
    resource: &Term,
    weight: f64,
    at: Timestamp,
) -> Result<Term, SchemaError> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(SchemaError::WeightOutOfRange(weight));
    }
    let weight_lit = Term::typed(format_weight(weight), ns::xsd("float"));
    let time_lit = Term::typed(timestamp::format(&at), ns::xsd("dateTime"));
    if let Some(node) = find_relation(store, RelationKind::Related, graph, concept, resource) {
        replace_value(store, &node, &p("weight"), weight_lit, graph)?;
        replace_value(store, &node, &p("insertTime"), time_lit, graph)?;
        return Ok(node);
    }
    let node = store.fresh_blank();
    for (pred, obj) in [
        (rdf_type(), Term::iri(ns::relation("related"))),
        (p("subject"), concept.clone()),
        (p("object"), resource.clone()),
        (p("weight"), weight_lit),
        (p("insertTime"), time_lit),
    ] {
        store.insert(Quad::new(node.clone(), pred, obj, graph.clone()))?;
    }
    Ok(node)
}

/// Records a `from → to` view transition for the owner of `graph`.
/// Returns `None` for self-transitions, which are not recorded.
pub fn record_usage(
    store: &mut QuadStore,
    graph: &Term,
    from: &Term,
    to: &Term,
    at: Timestamp,
) -> Result<Option<Term>, StoreError> {
    if from == to {
        return Ok(None);
    }
    if let Some(node) = find_relation(store, RelationKind::Usage, graph, from, to) {
        let mut stamps = read_relation(store, &node)
            .map(|r| r.usage_stamps)
            .unwrap_or_default();
        // Keep the list sorted even if calls arrive out of order.
        let at_pos = stamps.partition_point(|s| *s <= at);
        stamps.insert(at_pos, at);
        replace_value(store, &node, &p("usageStamps"), stamps_literal(&stamps), graph)?;
        return Ok(Some(node));
    }
    let node = store.fresh_blank();
    for (pred, obj) in [
        (rdf_type(), Term::iri(ns::relation("usage"))),
        (p("subject"), from.clone()),
        (p("object"), to.clone()),
        (p("usageStamps"), stamps_literal(&[at])),
    ] {
        store.insert(Quad::new(node.clone(), pred, obj, graph.clone()))?;
    }
    Ok(Some(node))
}

fn replace_value(
    store: &mut QuadStore,
    node: &Term,
    pred: &Term,
    value: Term,
    graph: &Term,
) -> Result<(), StoreError> {
    for old in store.match_quads(Some(node), Some(pred), None, Some(graph)) {
        store.remove(&old)?;
    }
    store.insert(Quad::new(node.clone(), pred.clone(), value, graph.clone()))?;
    Ok(())
}

fn format_weight(w: f64) -> String {
    // Shortest round-trip form, always with a decimal point.
    let s = format!("{w:?}");
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{s}.0")
    }
}

// Stamps are kept as one space-separated xsd:string so duplicates survive
// set semantics and order is explicit.
fn stamps_literal(stamps: &[Timestamp]) -> Term {
    let text: Vec<String> = stamps.iter().map(timestamp::format).collect();
    Term::string(text.join(" "))
}

fn parse_stamps(text: &str) -> Vec<Timestamp> {
    text.split_whitespace().filter_map(timestamp::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://x.org/{s}"))
    }

    fn t(h: u32) -> Timestamp {
        chrono::Utc.with_ymd_and_hms(2009, 1, 1, h, 0, 0).unwrap()
    }

    #[test]
    fn tag_writes_into_user_graph() {
        let mut store = QuadStore::new();
        let marko = iri("marko");
        let node = tag(&mut store, &marko, &iri("sw"), &iri("josh"), 1.0, t(1)).unwrap();
        let rel = read_relation(&store, &node).unwrap();
        assert_eq!(rel.kind, RelationKind::Related);
        assert_eq!(rel.subject, iri("sw"));
        assert_eq!(rel.object, iri("josh"));
        assert_eq!(rel.weight, Some(1.0));
        assert_eq!(rel.insert_time, Some(t(1)));
        assert_eq!(rel.owner_graph, marko);
        assert_eq!(store.match_quads(None, None, None, Some(&marko)).len(), store.len());
    }

    #[test]
    fn weight_out_of_range() {
        let mut store = QuadStore::new();
        for w in [1.5, -0.1, f64::NAN] {
            let err = tag(&mut store, &iri("u"), &iri("c"), &iri("r"), w, t(1));
            assert!(matches!(err, Err(SchemaError::WeightOutOfRange(_))));
        }
        assert!(store.is_empty());
    }

    #[test]
    fn concepts_can_tag_concepts() {
        let mut store = QuadStore::new();
        let node = tag(&mut store, &iri("u"), &iri("semweb"), &iri("rdf"), 0.3, t(1)).unwrap();
        assert_eq!(read_relation(&store, &node).unwrap().object, iri("rdf"));
    }

    #[test]
    fn retag_updates_in_place() {
        let mut store = QuadStore::new();
        let a = tag(&mut store, &iri("u"), &iri("c"), &iri("r"), 0.2, t(1)).unwrap();
        let b = tag(&mut store, &iri("u"), &iri("c"), &iri("r"), 0.9, t(5)).unwrap();
        assert_eq!(a, b);
        let rel = read_relation(&store, &a).unwrap();
        assert_eq!((rel.weight, rel.insert_time), (Some(0.9), Some(t(5))));
        assert_eq!(relations(&store, RelationKind::Related, None).len(), 1);
    }

    #[test]
    fn usage_appends_stamps() {
        let mut store = QuadStore::new();
        let u = iri("u");
        let n1 = record_usage(&mut store, &u, &iri("i"), &iri("j"), t(2)).unwrap().unwrap();
        let rel = read_relation(&store, &n1).unwrap();
        assert_eq!((rel.subject.clone(), rel.object.clone()), (iri("i"), iri("j")));
        assert_eq!(rel.usage_stamps, vec![t(2)]);
        let n2 = record_usage(&mut store, &u, &iri("i"), &iri("j"), t(5)).unwrap().unwrap();
        assert_eq!(n1, n2);
        assert_eq!(read_relation(&store, &n1).unwrap().usage_stamps, vec![t(2), t(5)]);
        // Same instant twice is kept twice.
        record_usage(&mut store, &u, &iri("i"), &iri("j"), t(5)).unwrap();
        assert_eq!(read_relation(&store, &n1).unwrap().usage_stamps.len(), 3);
    }

    #[test]
    fn usage_is_per_user_and_ignores_self_transitions() {
        let mut store = QuadStore::new();
        let a = record_usage(&mut store, &iri("u1"), &iri("i"), &iri("j"), t(1)).unwrap();
        let b = record_usage(&mut store, &iri("u2"), &iri("i"), &iri("j"), t(1)).unwrap();
        assert_ne!(a, b);
        assert_eq!(record_usage(&mut store, &iri("u1"), &iri("i"), &iri("i"), t(2)).unwrap(), None);
        assert_eq!(relations(&store, RelationKind::Usage, None).len(), 2);
    }

    #[test]
    fn out_of_order_stamps_stay_sorted() {
        let mut store = QuadStore::new();
        let u = iri("u");
        let n = record_usage(&mut store, &u, &iri("i"), &iri("j"), t(7)).unwrap().unwrap();
        record_usage(&mut store, &u, &iri("i"), &iri("j"), t(3)).unwrap();
        assert_eq!(read_relation(&store, &n).unwrap().usage_stamps, vec![t(3), t(7)]);
    }
}
