//! Namespace prefixes and the handful of well-known IRIs used throughout the crate.

pub const CORE: &str = "http://knowledgereefsystems.com/2007/11/core#";
pub const RELATION: &str = "http://knowledgereefsystems.com/2008/02/relation#";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const DC: &str = "http://purl.org/dc/elements/1.1/";

/// Graph that holds the vocabulary when it is exported into a store.
pub const SCHEMA_GRAPH: &str = "http://knowledgereefsystems.com/2007/11/core";
/// Graph assigned to N-Quads statements that carry no graph label.
pub const DEFAULT_GRAPH: &str = "urn:scholarec:default-graph";
/// Base under which ingestion mints resource IRIs.
pub const RESOURCE_BASE: &str = "urn:scholarec:resource:";

const PREFIXES: &[(&str, &str)] = &[
    ("core", CORE),
    ("relation", RELATION),
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("owl", OWL),
    ("xsd", XSD),
    ("dc", DC),
];

pub fn core(local: &str) -> String {
    format!("{CORE}{local}")
}

pub fn relation(local: &str) -> String {
    format!("{RELATION}{local}")
}

pub fn rdf(local: &str) -> String {
    format!("{RDF}{local}")
}

pub fn rdfs(local: &str) -> String {
    format!("{RDFS}{local}")
}

pub fn owl(local: &str) -> String {
    format!("{OWL}{local}")
}

pub fn xsd(local: &str) -> String {
    format!("{XSD}{local}")
}

/// Expands `core:Article` style names. Strings that are not a known prefix
/// are returned unchanged, so full IRIs pass straight through.
pub fn expand(name: &str) -> String {
    if let Some((prefix, local)) = name.split_once(':') {
        if let Some((_, base)) = PREFIXES.iter().find(|(p, _)| *p == prefix) {
            return format!("{base}{local}");
        }
    }
    name.to_string()
}

/// Inverse of [`expand`] for display purposes.
pub fn compact(iri: &str) -> String {
    for (prefix, base) in PREFIXES {
        if let Some(local) = iri.strip_prefix(base) {
            return format!("{prefix}:{local}");
        }
    }
    iri.to_string()
}

/// True for predicates that belong to the schema layer (rdf:, rdfs:, owl:).
pub fn is_schema_predicate(iri: &str) -> bool {
    iri.starts_with(RDF) || iri.starts_with(RDFS) || iri.starts_with(OWL)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_and_compact() {
        assert_eq!(expand("core:Article"), format!("{CORE}Article"));
        assert_eq!(expand("http://x.org/a"), "http://x.org/a");
        assert_eq!(expand("unknown:thing"), "unknown:thing");
        assert_eq!(compact(&core("cites")), "core:cites");
    }
}
